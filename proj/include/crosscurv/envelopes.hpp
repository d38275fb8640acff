#pragma once

// Mountains, finite envelopes u(y) = max_i (λ_i − c(y, x̄_i)), c-transforms on
// finite site sets, the double-transform duality gap and c-contact sets.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "crosscurv/cost.hpp"
#include "crosscurv/parallel.hpp"

namespace crosscurv {

struct Mountain {
  Point focus;
  double height = 0.0;

  bool admissible(const CostChart& chart, const Point& y) const { return chart.in_domain(y, focus); }
  double eval(const CostChart& chart, const Point& y) const { return height - chart.eval(y, focus); }
};

struct Envelope {
  std::vector<Mountain> mountains;

  /// Index of the maximal admissible mountain at y (lowest index on ties), or −1.
  int argmax(const CostChart& chart, const Point& y) const {
    int best = -1;
    double value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mountains.size(); ++i) {
      if (!mountains[i].admissible(chart, y)) continue;
      const double v = mountains[i].eval(chart, y);
      if (best < 0 || v > value) {
        best = static_cast<int>(i);
        value = v;
      }
    }
    return best;
  }

  double eval(const CostChart& chart, const Point& y) const {
    if (mountains.empty()) throw InvalidSpec("envelope: no mountains");
    const int i = argmax(chart, y);
    if (i < 0) throw DomainError("envelope: no admissible mountain at the query point");
    return mountains[static_cast<std::size_t>(i)].eval(chart, y);
  }
};

enum class TransformSide {
  Source,  // values on target sites, result at a source point: v^c(x) = sup_x̄ (−c(x, x̄) − v(x̄))
  Target   // values on source sites, result at a target point: v^{c*}(x̄) = sup_x (−c(x, x̄) − v(x))
};

inline double c_transform(const CostChart& chart, const std::vector<Point>& sites, const std::vector<double>& values,
                          const Point& query, TransformSide side) {
  if (sites.size() != values.size()) throw InvalidSpec("c_transform: sites and values differ in length");
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Point& x = side == TransformSide::Source ? query : sites[k];
    const Point& xb = side == TransformSide::Source ? sites[k] : query;
    if (!chart.in_domain(x, xb)) continue;
    any = true;
    best = std::max(best, -chart.eval(x, xb) - values[k]);
  }
  if (!any) throw DomainError("c_transform: no admissible site for the query point");
  return best;
}

/// sup over the source grid of |(u^{c*})^c − u|, where u^{c*} is taken over the
/// source grid and evaluated on target_sites ∪ foci.
inline double duality_check(const CostChart& chart, const Envelope& E, const std::vector<Point>& source_grid,
                            std::vector<Point> target_sites, int workers = 1) {
  for (const auto& m : E.mountains) target_sites.push_back(m.focus);
  std::vector<double> u(source_grid.size());
  parallel_for(source_grid.size(), workers, [&](std::size_t i) { u[i] = E.eval(chart, source_grid[i]); });
  std::vector<double> ustar(target_sites.size());
  parallel_for(target_sites.size(), workers, [&](std::size_t k) {
    ustar[k] = c_transform(chart, source_grid, u, target_sites[k], TransformSide::Target);
  });
  return parallel_reduce(
      source_grid.size(), workers, 0.0,
      [&](std::size_t i) {
        return std::abs(c_transform(chart, target_sites, ustar, source_grid[i], TransformSide::Source) - u[i]);
      },
      [](double a, double b) { return std::max(a, b); });
}

/// Indices of candidates x̄ with u(y) + c(y, x̄) ≥ u(x) + c(x, x̄) − tol for every
/// admissible y of the grid.
inline std::vector<std::size_t> contact_set(const CostChart& chart, const Envelope& E, const Point& x,
                                            const std::vector<Point>& candidates, const std::vector<Point>& y_grid,
                                            double tol) {
  const double ux = E.eval(chart, x);
  std::vector<double> uy(y_grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j < y_grid.size(); ++j)
    if (E.argmax(chart, y_grid[j]) >= 0) uy[j] = E.eval(chart, y_grid[j]);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Point& xb = candidates[k];
    if (!chart.in_domain(x, xb)) continue;
    const double base = ux + chart.eval(x, xb) - tol;
    bool ok = true;
    for (std::size_t j = 0; j < y_grid.size() && ok; ++j) {
      if (std::isnan(uy[j]) || !chart.in_domain(y_grid[j], xb)) continue;
      ok = uy[j] + chart.eval(y_grid[j], xb) >= base;
    }
    if (ok) out.push_back(k);
  }
  return out;
}

}  // namespace crosscurv
