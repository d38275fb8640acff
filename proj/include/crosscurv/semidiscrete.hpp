#pragma once

// Semidiscrete transport from a gridded density on a 2-D source chart to
// finitely many weighted targets: dual gradient ascent, region labelling,
// connectivity, Hölder and cut-locus diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crosscurv/costs.hpp"
#include "crosscurv/parallel.hpp"

namespace crosscurv {

/// Rectangular nx × ny cell grid; cell (i, j) is stored at j·nx + i.
struct SourceGrid {
  Box box;
  int nx = 0;
  int ny = 0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double dx0() const { return (box.hi[0] - box.lo[0]) / nx; }
  double dx1() const { return (box.hi[1] - box.lo[1]) / ny; }
  Point center(std::size_t c) const {
    const auto i = static_cast<double>(c % static_cast<std::size_t>(nx));
    const auto j = static_cast<double>(c / static_cast<std::size_t>(nx));
    Point p(2);
    p << box.lo[0] + (i + 0.5) * dx0(), box.lo[1] + (j + 0.5) * dx1();
    return p;
  }
  void validate() const {
    if (nx < 1 || ny < 1) throw InvalidSpec("grid: nx and ny must be >= 1");
    if (box.lo.size() != 2 || box.hi.size() != 2 || !box.bounded() || !(box.hi[0] > box.lo[0]) ||
        !(box.hi[1] > box.lo[1]))
      throw InvalidSpec("grid: box must be a bounded, non-empty 2-D box");
  }
};

struct SemidiscreteProblem {
  CostChart chart;
  SourceGrid grid;
  std::vector<double> mass;  // ρ × metric volume × cell area, normalized to sum 1
  std::vector<Point> targets;
  std::vector<double> weights;  // ε_i
  bool periodic_x1 = false;     // cells wrap around in the second coordinate

  void validate() const {
    grid.validate();
    if (chart.dim() != 2) throw InvalidSpec("semidiscrete: source chart must be 2-D");
    if (mass.size() != grid.size()) throw InvalidSpec("semidiscrete: mass array does not match the grid");
    if (targets.empty() || targets.size() != weights.size())
      throw InvalidSpec("semidiscrete: need one weight per target and at least one target");
    double m = 0.0;
    for (double v : mass) {
      if (!(v >= 0.0)) throw InvalidSpec("semidiscrete: negative or NaN density");
      m += v;
    }
    if (std::abs(m - 1.0) > 1e-9) throw InvalidSpec("semidiscrete: density does not sum to 1");
    double w = 0.0;
    for (double e : weights) {
      if (!(e > 0.0)) throw InvalidSpec("semidiscrete: target weights must be > 0");
      w += e;
    }
    if (std::abs(w - 1.0) > 1e-9) throw InvalidSpec("semidiscrete: target weights must sum to 1");
    for (const auto& t : targets)
      if (t.size() != 2) throw InvalidSpec("semidiscrete: targets must be 2-D");
  }
};

/// Midpoint-rule masses ρ(x)·vol(x)·dA normalized to 1. Cells where no target
/// is admissible must carry zero density.
inline SemidiscreteProblem make_semidiscrete_problem(const CostChart& chart, const SourceGrid& grid,
                                                     const std::function<double(const Point&)>& density,
                                                     std::vector<Point> targets, std::vector<double> weights,
                                                     bool periodic_x1 = false) {
  grid.validate();
  SemidiscreteProblem p{chart, grid, std::vector<double>(grid.size()), std::move(targets), std::move(weights),
                        periodic_x1};
  const double area = grid.dx0() * grid.dx1();
  double total = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Point x = grid.center(c);
    const double rho = density(x);
    if (!(rho >= 0.0)) throw InvalidSpec("semidiscrete: density must be >= 0");
    if (rho == 0.0) continue;
    bool any = false;
    for (const auto& t : p.targets) any = any || chart.in_domain(x, t);
    if (!any) throw InvalidSpec("semidiscrete: density is positive where no target is admissible");
    p.mass[c] = rho * chart.source_volume(x) * area;
    total += p.mass[c];
  }
  if (!(total > 0.0)) throw InvalidSpec("semidiscrete: density has zero total mass");
  for (double& m : p.mass) m /= total;
  p.validate();
  return p;
}

/// Density file: header line "nx,ny,lo0,hi0,lo1,hi1", then ny rows of nx values
/// (row j holds cells (0..nx−1, j)).
struct DensityGrid {
  SourceGrid grid;
  std::vector<double> values;
};

inline DensityGrid read_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("density file not readable: " + path);
  auto split = [](const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidSpec("density file: not a number: '" + cell + "'");
      }
    }
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw InvalidSpec("density file: missing header");
  const auto h = split(line);
  if (h.size() != 6) throw InvalidSpec("density file: header must be nx,ny,lo0,hi0,lo1,hi1");
  DensityGrid d;
  d.grid.nx = static_cast<int>(h[0]);
  d.grid.ny = static_cast<int>(h[1]);
  if (d.grid.nx != h[0] || d.grid.ny != h[1]) throw InvalidSpec("density file: nx, ny must be integers");
  d.grid.box.lo = Eigen::Vector2d(h[2], h[4]);
  d.grid.box.hi = Eigen::Vector2d(h[3], h[5]);
  d.grid.validate();
  d.values.reserve(d.grid.size());
  for (int j = 0; j < d.grid.ny; ++j) {
    if (!std::getline(in, line)) throw InvalidSpec("density file: fewer rows than ny");
    const auto row = split(line);
    if (static_cast<int>(row.size()) != d.grid.nx) throw InvalidSpec("density file: row length differs from nx");
    d.values.insert(d.values.end(), row.begin(), row.end());
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw InvalidSpec("density file: extra rows");
  return d;
}

struct AscentConfig {
  double mass_tolerance = 1e-3;
  int max_iterations = 2000;
  double initial_step = 1.0;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  int workers = 1;

  void validate() const {
    if (!(mass_tolerance > 0.0)) throw InvalidSpec("ascent: mass_tolerance must be > 0");
    if (max_iterations < 1) throw InvalidSpec("ascent: max_iterations must be >= 1");
    if (!(initial_step > 0.0)) throw InvalidSpec("ascent: initial_step must be > 0");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidSpec("ascent: backtrack must lie in (0, 1)");
  }
};

struct AscentStep {
  int iteration = 0;
  double dual = 0.0;
  double max_mass_error = 0.0;
  double step = 0.0;
};

struct SemidiscreteSolution {
  std::vector<double> lambda;  // gauge λ₀ = 0
  std::vector<int> labels;     // per cell; −1 where no target is admissible
  std::vector<double> masses;  // ρ[Ω_i]
  double dual = 0.0;
  double max_mass_error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool empty_region = false;  // some Ω_i with ε_i > 0 ended with zero mass
  std::vector<AscentStep> log;
};

namespace detail {

// Cost table C[c·k + i]; +∞ where (cell, target) is inadmissible.
inline std::vector<double> cost_table(const SemidiscreteProblem& p, int workers) {
  const std::size_t k = p.targets.size();
  std::vector<double> C(p.grid.size() * k);
  parallel_for(p.grid.size(), workers, [&](std::size_t c) {
    const Point x = p.grid.center(c);
    for (std::size_t i = 0; i < k; ++i)
      C[c * k + i] = p.chart.in_domain(x, p.targets[i]) ? p.chart.eval(x, p.targets[i])
                                                         : std::numeric_limits<double>::infinity();
  });
  return C;
}

// Compares λ_i − λ_b against C_i − C_b, so a shift of every λ that is exact
// in floating point leaves the label unchanged bit for bit.
inline int best_label(const double* Crow, const std::vector<double>& lambda) {
  int best = -1;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (std::isinf(Crow[i])) continue;
    const auto b = static_cast<std::size_t>(best);
    if (best < 0 || lambda[i] - lambda[b] > Crow[i] - Crow[b]) best = static_cast<int>(i);
  }
  return best;
}

struct Evaluation {
  double dual = 0.0;
  std::vector<double> masses;
};

inline Evaluation evaluate(const SemidiscreteProblem& p, const std::vector<double>& C,
                           const std::vector<double>& lambda, int workers) {
  const std::size_t k = p.targets.size();
  Evaluation zero{0.0, std::vector<double>(k, 0.0)};
  auto map = [&](std::size_t c) {
    Evaluation e{0.0, std::vector<double>(k, 0.0)};
    if (p.mass[c] == 0.0) return e;
    const int l = best_label(&C[c * k], lambda);
    const auto li = static_cast<std::size_t>(l);
    e.masses[li] = p.mass[c];
    e.dual = -p.mass[c] * (lambda[li] - C[c * k + li]);
    return e;
  };
  auto combine = [](Evaluation a, const Evaluation& b) {
    a.dual += b.dual;
    for (std::size_t i = 0; i < a.masses.size(); ++i) a.masses[i] += b.masses[i];
    return a;
  };
  Evaluation e = parallel_reduce(p.grid.size(), workers, zero, map, combine);
  for (std::size_t i = 0; i < k; ++i) e.dual += p.weights[i] * lambda[i];
  return e;
}

inline double max_error(const std::vector<double>& masses, const std::vector<double>& weights) {
  double m = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) m = std::max(m, std::abs(weights[i] - masses[i]));
  return m;
}

}  // namespace detail

/// Maximizes G(λ) = Σ ε_i λ_i − Σ_cells m_c max_i (λ_i − c(x_c, x̄_i)) by gradient
/// ascent with Armijo backtracking; ∂G/∂λ_i = ε_i − ρ[Ω_i]. Ties go to the lowest index.
inline SemidiscreteSolution solve_semidiscrete(const SemidiscreteProblem& p, const AscentConfig& cfg = {}) {
  p.validate();
  cfg.validate();
  const std::size_t k = p.targets.size();
  const auto C = detail::cost_table(p, cfg.workers);
  std::vector<double> lambda(k, 0.0);
  auto cur = detail::evaluate(p, C, lambda, cfg.workers);

  SemidiscreteSolution s;
  double step = cfg.initial_step;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    std::vector<double> g(k);
    double g2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      g[i] = p.weights[i] - cur.masses[i];
      g2 += g[i] * g[i];
    }
    const double err = detail::max_error(cur.masses, p.weights);
    s.log.push_back({it, cur.dual, err, step});
    if (err <= cfg.mass_tolerance) {
      s.converged = true;
      break;
    }
    bool accepted = false;
    double trial_step = std::min(2.0 * step, 1e6);
    for (int b = 0; b <= cfg.max_backtracks; ++b, trial_step *= cfg.backtrack) {
      std::vector<double> trial(k);
      for (std::size_t i = 0; i < k; ++i) trial[i] = lambda[i] + trial_step * g[i];
      for (std::size_t i = 1; i < k; ++i) trial[i] -= trial[0];
      trial[0] = 0.0;
      auto next = detail::evaluate(p, C, trial, cfg.workers);
      if (next.dual >= cur.dual + cfg.armijo * trial_step * g2) {
        lambda = std::move(trial);
        cur = std::move(next);
        step = trial_step;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no ascent direction left at grid resolution
  }
  s.iterations = it;
  s.lambda = lambda;
  s.masses = cur.masses;
  s.dual = cur.dual;
  s.max_mass_error = detail::max_error(cur.masses, p.weights);
  s.converged = s.max_mass_error <= cfg.mass_tolerance;
  for (std::size_t i = 0; i < k; ++i) s.empty_region = s.empty_region || cur.masses[i] == 0.0;
  s.labels.resize(p.grid.size());
  parallel_for(p.grid.size(), cfg.workers,
               [&](std::size_t c) { s.labels[c] = detail::best_label(&C[c * k], lambda); });
  return s;
}

enum class Adjacency { Four, Eight };

/// Number of connected components of {cells with label == region and positive mass}.
inline int connected_components(const SemidiscreteProblem& p, const SemidiscreteSolution& s, int region,
                                Adjacency adj = Adjacency::Four) {
  const int nx = p.grid.nx, ny = p.grid.ny;
  auto inside = [&](int i, int j) {
    const auto c = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    return s.labels[c] == region && p.mass[c] > 0.0;
  };
  std::vector<char> seen(p.grid.size(), 0);
  std::vector<std::pair<int, int>> stack;
  std::vector<std::pair<int, int>> offsets = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  if (adj == Adjacency::Eight) offsets.insert(offsets.end(), {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
  int count = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto c = static_cast<std::size_t>(j * nx + i);
      if (seen[c] || !inside(i, j)) continue;
      ++count;
      seen[c] = 1;
      stack.push_back({i, j});
      while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        for (auto [da, db] : offsets) {
          int u = a + da, v = b + db;
          if (u < 0 || u >= nx) continue;
          if (v < 0 || v >= ny) {
            if (!p.periodic_x1) continue;
            v = (v + ny) % ny;
          }
          const auto cc = static_cast<std::size_t>(v * nx + u);
          if (seen[cc] || !inside(u, v)) continue;
          seen[cc] = 1;
          stack.push_back({u, v});
        }
      }
    }
  return count;
}

struct HolderFit {
  double exponent = 0.0;
  double intercept = 0.0;
  std::size_t pairs = 0;
  bool discrete_warning = false;
  std::vector<std::pair<double, double>> data;  // (log|x₀ − x₁|, log|x̄₀ − x̄₁|)
};

/// Samples pairs from the contact relation {(x_k, F(x_k))} at log-uniform
/// separations and fits a line through the per-bin maxima of log|x̄₀ − x̄₁|
/// against log|x₀ − x₁| over the smaller half of the separations; the slope
/// estimates the local Hölder exponent of F. Pairs with x̄₀ = x̄₁ carry no
/// information about the exponent and are dropped.
inline HolderFit holder_diagnostic(const std::vector<std::pair<Point, Point>>& contact, std::size_t num_pairs,
                                   std::uint64_t seed, int bins = 12) {
  if (contact.size() < 2) throw InvalidSpec("holder_diagnostic: need at least two contact samples");
  if (bins < 4) throw InvalidSpec("holder_diagnostic: need at least four bins");
  std::mt19937_64 rng(seed);

  constexpr std::size_t kMaxPoints = 4096;
  std::vector<std::size_t> idx(contact.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (idx.size() > kMaxPoints) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(kMaxPoints);
  }
  const auto& x0 = contact[idx[0]].first;
  Point lo_box = x0, hi_box = x0;
  for (auto i : idx) {
    lo_box = lo_box.cwiseMin(contact[i].first);
    hi_box = hi_box.cwiseMax(contact[i].first);
  }
  const double r_max = (hi_box - lo_box).norm();
  if (!(r_max > 0.0)) throw InvalidSpec("holder_diagnostic: contact samples share one source point");
  const double r_min = r_max * 1e-3;

  HolderFit fit;
  std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  const auto n = x0.size();
  for (std::size_t k = 0; k < num_pairs; ++k) {
    const auto& a = contact[idx[pick(rng)]];
    const double r = r_min * std::pow(r_max / r_min, unit(rng));
    Point dir(n);
    for (Eigen::Index d = 0; d < n; ++d) dir[d] = gauss(rng);
    const Point aim = a.first + r * dir.normalized();
    std::size_t best = idx[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (auto i : idx) {
      const double d = (contact[i].first - aim).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const auto& b = contact[best];
    const double dx = (a.first - b.first).norm(), dxb = (a.second - b.second).norm();
    if (dx > 0.0 && dxb > 0.0) fit.data.emplace_back(std::log(dx), std::log(dxb));
  }
  fit.pairs = fit.data.size();
  if (fit.pairs < 20) throw InvalidSpec("holder_diagnostic: fewer than 20 usable pairs");

  std::vector<Point> distinct;
  for (const auto& c : contact) {
    bool seen = false;
    for (const auto& d : distinct) seen = seen || (d - c.second).norm() == 0.0;
    if (!seen) distinct.push_back(c.second);
    if (distinct.size() > contact.size() / 10) break;
  }
  fit.discrete_warning = distinct.size() <= contact.size() / 10;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (auto [u, v] : fit.data) {
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  // Per bin, the pair with the largest log|Δx̄| and its own log|Δx|.
  const auto nb = static_cast<std::size_t>(bins);
  std::vector<std::pair<double, double>> top(nb, {0.0, -std::numeric_limits<double>::infinity()});
  for (auto [u, v] : fit.data) {
    const int b = hi > lo ? std::min(bins - 1, static_cast<int>((u - lo) / (hi - lo) * bins)) : 0;
    auto& t = top[static_cast<std::size_t>(b)];
    if (v > t.second) t = {u, v};
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t b = 0; b < nb / 2; ++b) {
    const auto [u, v] = top[b];
    if (!std::isfinite(v)) continue;
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
    ++m;
  }
  const double den = m * sxx - sx * sx;
  if (m < 2 || !(std::abs(den) > 0.0)) throw InvalidSpec("holder_diagnostic: pair distances span a single bin");
  fit.exponent = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.exponent * sx) / m;
  return fit;
}

/// Contact samples (cell centre, assigned target) over the support.
inline std::vector<std::pair<Point, Point>> contact_samples(const SemidiscreteProblem& p,
                                                            const SemidiscreteSolution& s) {
  std::vector<std::pair<Point, Point>> out;
  for (std::size_t c = 0; c < p.grid.size(); ++c)
    if (p.mass[c] > 0.0 && s.labels[c] >= 0)
      out.emplace_back(p.grid.center(c), p.targets[static_cast<std::size_t>(s.labels[c])]);
  return out;
}

struct CutLocusMargin {
  double margin = std::numeric_limits<double>::infinity();  // min over support of π − d(x, x̄_label)
  Point argmin;
  double delta_cut = 0.0;
  bool flagged = false;  // margin ≤ delta_cut
};

/// delta_cut ≤ 0 selects the chart's cut margin.
inline CutLocusMargin cut_locus_margin(const SemidiscreteProblem& p, const SemidiscreteSolution& s,
                                       double delta_cut = 0.0) {
  if (p.chart.kind() != "sphere_squared") throw InvalidSpec("cut_locus_margin: requires a sphere_squared chart");
  CutLocusMargin out;
  for (std::size_t c = 0; c < p.grid.size(); ++c) {
    if (p.mass[c] == 0.0 || s.labels[c] < 0) continue;
    const Point x = p.grid.center(c);
    const double m =
        std::numbers::pi - SphereSquared::distance(x, p.targets[static_cast<std::size_t>(s.labels[c])]);
    if (m < out.margin) {
      out.margin = m;
      out.argmin = x;
    }
  }
  out.delta_cut = delta_cut > 0.0 ? delta_cut : p.chart.domain().cut_margin;
  out.flagged = out.margin <= out.delta_cut;
  return out;
}

/// Geodesic distance for the squared-distance charts (euclid, sphere, hyperbolic).
inline double geodesic_distance(const CostChart& chart, const Point& a, const Point& b) {
  const std::string kind = chart.kind();
  if (kind == "euclid_quadratic") return (a - b).norm();
  if (kind == "sphere_squared") return SphereSquared::distance(a, b);
  if (kind == "hyperbolic_squared") return HyperbolicSquared::distance(a, b);
  throw InvalidSpec("geodesic_distance: no distance for cost kind '" + kind + "'");
}

/// Indicator of the closed geodesic disk of the given radius about centre.
inline std::function<double(const Point&)> disk_density(const CostChart& chart, const Point& centre, double radius) {
  if (centre.size() != 2 || !(radius > 0.0)) throw InvalidSpec("disk density: need a 2-D centre and radius > 0");
  geodesic_distance(chart, centre, centre);
  return [chart, centre, radius](const Point& x) { return geodesic_distance(chart, x, centre) <= radius ? 1.0 : 0.0; };
}

enum class Figure1Geometry { Plane, Sphere, Hyperbolic };

inline const char* to_string(Figure1Geometry g) {
  switch (g) {
    case Figure1Geometry::Plane: return "plane";
    case Figure1Geometry::Sphere: return "sphere";
    case Figure1Geometry::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

/// Uniform density on a geodesic disk of radius R with three targets on a
/// geodesic through its centre, spaced 0.6·R, and ε = (⅓, ⅓, ⅓).
/// Plane: R = 1, geodesic at angle 0.4. Sphere: R = 1 about (π/2, 0), along the
/// equator. Hyperbolic: R = 3.6 about the origin of the Poincaré disk, along the real axis.
inline SemidiscreteProblem figure1_problem(Figure1Geometry g, int n) {
  std::vector<double> eps(3, 1.0 / 3.0);
  const double half = std::numbers::pi / 2;
  switch (g) {
    case Figure1Geometry::Plane: {
      SourceGrid grid{{Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)}, n, n};
      const Eigen::Vector2d dir(std::cos(0.4), std::sin(0.4));
      const Point centre = Eigen::Vector2d::Zero();
      std::vector<Point> t = {Point(-0.6 * dir), centre, Point(0.6 * dir)};
      const auto chart = euclid_quadratic(2);
      return make_semidiscrete_problem(chart, grid, disk_density(chart, centre, 1.0), t, eps);
    }
    case Figure1Geometry::Sphere: {
      SourceGrid grid{{Eigen::Vector2d(half - 1, -1), Eigen::Vector2d(half + 1, 1)}, n, n};
      const Point centre = Eigen::Vector2d(half, 0.0);
      std::vector<Point> t = {Point(Eigen::Vector2d(half, -0.6)), centre, Point(Eigen::Vector2d(half, 0.6))};
      const auto chart = sphere_squared();
      return make_semidiscrete_problem(chart, grid, disk_density(chart, centre, 1.0), t, eps);
    }
    case Figure1Geometry::Hyperbolic: {
      const double r = std::tanh(1.8), s = std::tanh(1.08);
      SourceGrid grid{{Eigen::Vector2d(-r, -r), Eigen::Vector2d(r, r)}, n, n};
      const Point centre = Eigen::Vector2d::Zero();
      std::vector<Point> t = {Point(Eigen::Vector2d(-s, 0)), centre, Point(Eigen::Vector2d(s, 0))};
      const auto chart = hyperbolic_squared(2);
      return make_semidiscrete_problem(chart, grid, disk_density(chart, centre, 3.6), t, eps);
    }
  }
  throw InvalidSpec("figure1_problem: unknown geometry");
}

}  // namespace crosscurv
