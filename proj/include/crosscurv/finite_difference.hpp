#pragma once

// Central-difference mixed partials with one Richardson extrapolation step,
// used for black-box costs that cannot be evaluated on dual numbers.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "crosscurv/cost.hpp"

namespace crosscurv {

struct FiniteDifferenceConfig {
  double scale = 1.0;  // characteristic coordinate scale
  /// Base step is eps^(1/(order + step_exponent_offset)) * scale.
  double step_exponent_offset = 4.0;
};

/// Product of k central-difference operators along directions `dirs`
/// (repeats allowed) applied to f at z with step h.
inline double central_mixed_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& z, const std::vector<int>& dirs, double h) {
  const int k = static_cast<int>(dirs.size());
  if (k == 0) return f(z);
  double sum = 0.0;
  Eigen::VectorXd w(z.size());
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    w = z;
    int sign = 1;
    for (int l = 0; l < k; ++l) {
      const bool plus = (mask >> l) & 1u;
      w[dirs[static_cast<std::size_t>(l)]] += plus ? h : -h;
      if (!plus) sign = -sign;
    }
    sum += sign * f(w);
  }
  return sum / std::pow(2.0 * h, k);
}

/// Richardson-extrapolated mixed partial: (4 D(h/2) - D(h)) / 3.
inline double richardson_mixed_partial(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& z, const std::vector<int>& dirs,
                                       const FiniteDifferenceConfig& cfg = {}) {
  const int k = static_cast<int>(dirs.size());
  if (k == 0) return f(z);
  const double eps = std::numeric_limits<double>::epsilon();
  const double h = std::pow(eps, 1.0 / (k + cfg.step_exponent_offset)) * cfg.scale;
  const double coarse = central_mixed_difference(f, z, dirs, h);
  const double fine = central_mixed_difference(f, z, dirs, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

/// Cost model for a user-supplied black-box cost. Every stencil point is
/// checked against the domain predicate before the cost is evaluated.
class FiniteDifferenceModel final : public CostModel {
 public:
  using CostFn = std::function<double(const Point&, const Point&)>;
  using DomainFn = std::function<bool(const Point&, const Point&)>;

  FiniteDifferenceModel(int n, CostFn cost, DomainFn admissible, DomainSpec domain, FiniteDifferenceConfig cfg,
                        std::string name)
      : n_(n),
        cost_(std::move(cost)),
        admissible_(std::move(admissible)),
        domain_(std::move(domain)),
        cfg_(cfg),
        name_(std::move(name)) {}

  int dim() const override { return n_; }
  std::string kind() const override { return name_; }
  DerivativeMode mode() const override { return DerivativeMode::FiniteDifference; }
  const DomainSpec& domain() const override { return domain_; }

  bool in_domain(const Point& x, const Point& xb) const override {
    return domain_.source.contains(x) && domain_.target.contains(xb) && (!admissible_ || admissible_(x, xb));
  }

  double eval(const Point& x, const Point& xb) const override { return cost_(x, xb); }

  double partial(const Point& x, const Point& xb, const MultiIndex& idx) const override {
    std::vector<int> dirs;
    for (int i : idx.unbarred) dirs.push_back(i);
    for (int i : idx.barred) dirs.push_back(n_ + i);
    Eigen::VectorXd z(2 * n_);
    z << x, xb;
    auto f = [this](const Eigen::VectorXd& w) {
      Point a = w.head(n_), b = w.tail(n_);
      if (!in_domain(a, b)) throw DomainError("finite-difference stencil leaves the domain of '" + name_ + "'");
      return cost_(a, b);
    };
    return richardson_mixed_partial(f, z, dirs, cfg_);
  }

 private:
  int n_;
  CostFn cost_;
  DomainFn admissible_;
  DomainSpec domain_;
  FiniteDifferenceConfig cfg_;
  std::string name_;
};

/// Wrap a black-box cost (double in, double out) as a finite-difference chart.
inline CostChart make_finite_difference_chart(int n, FiniteDifferenceModel::CostFn cost,
                                              FiniteDifferenceModel::DomainFn admissible, DomainSpec domain,
                                              FiniteDifferenceConfig cfg = {}, std::string name = "black_box") {
  if (n < 1) throw InvalidSpec("cost dimension must be >= 1");
  return CostChart(std::make_shared<FiniteDifferenceModel>(n, std::move(cost), std::move(admissible),
                                                           std::move(domain), cfg, std::move(name)));
}

}  // namespace crosscurv
