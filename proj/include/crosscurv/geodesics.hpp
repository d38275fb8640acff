#pragma once

// c-exponentials by damped Newton inversion, vertical c-segments, horizontal
// geodesics and geodesic-equation residuals.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "crosscurv/geometry.hpp"

namespace crosscurv {

struct NewtonConfig {
  double tolerance = 1e-10;  // on ‖residual‖₂, relative to max(1, ‖target covector‖₂)
  int max_iterations = 50;
  double backtrack = 0.5;
  int max_backtracks = 40;

  void validate() const {
    if (!(tolerance > 0.0)) throw InvalidSpec("NewtonConfig: tolerance must be > 0");
    if (max_iterations < 1) throw InvalidSpec("NewtonConfig: max_iterations must be >= 1");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidSpec("NewtonConfig: backtrack must lie in (0, 1)");
  }
};

namespace detail {

enum class Side { Target, Source };

// Solve covector + D_side c(fixed, z) = 0 for the free point z, starting at guess.
inline Point newton_invert(const CostChart& chart, const Point& fixed, const Eigen::VectorXd& covector,
                           const Point& guess, const NewtonConfig& cfg, Side side) {
  cfg.validate();
  const int n = chart.dim();
  if (fixed.size() != n || covector.size() != n || guess.size() != n)
    throw InvalidSpec("c-exponential: dimension mismatch");
  auto pair_in_domain = [&](const Point& z) {
    return side == Side::Target ? chart.in_domain(fixed, z) : chart.in_domain(z, fixed);
  };
  auto residual = [&](const Point& z) -> Eigen::VectorXd {
    return side == Side::Target ? Eigen::VectorXd(covector + chart.grad_x(fixed, z))
                                : Eigen::VectorXd(covector + chart.grad_xb(z, fixed));
  };
  auto jacobian = [&](const Point& z) -> Matrix {
    // ∂/∂x̄ of c_i(x, x̄) is H; ∂/∂x of c_ī(x, x̄) is Hᵀ.
    return side == Side::Target ? chart.cross_matrix(fixed, z) : Matrix(chart.cross_matrix(z, fixed).transpose());
  };
  if (!pair_in_domain(guess)) throw DomainError("c-exponential: initial guess outside the domain");

  const double scale = std::max(1.0, covector.norm());
  Point z = guess;
  Eigen::VectorXd r = residual(z);
  double rn = r.norm();
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (rn <= cfg.tolerance * scale) return z;
    Matrix J = jacobian(z);
    Eigen::VectorXd step;
    try {
      const CrossHessian ch = cross_hessian(J);
      step = -(ch.inverse * r);
    } catch (const NondegeneracyFailure& e) {
      throw SingularJacobian(std::string("c-exponential: ") + e.what(), z);
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int b = 0; b <= cfg.max_backtracks; ++b, alpha *= cfg.backtrack) {
      Point trial = z + alpha * step;
      if (!pair_in_domain(trial)) continue;
      Eigen::VectorXd rt = residual(trial);
      const double rtn = rt.norm();
      if (rtn < rn || rtn <= cfg.tolerance * scale) {
        z = std::move(trial);
        r = std::move(rt);
        rn = rtn;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NoConvergence("c-exponential: line search failed to reduce the residual", z);
  }
  if (rn <= cfg.tolerance * scale) return z;
  throw NoConvergence("c-exponential: iteration cap reached", z);
}

}  // namespace detail

namespace detail {

template <class Solve>
Point continue_branch(const Solve& solve, const Point& start, double s_from, double s_to, int depth);

// Direct Newton from the guess; if that fails, continue along the straight
// covector path from the guess's own covector to the target.
inline Point invert_with_homotopy(const CostChart& chart, const Point& fixed, const Eigen::VectorXd& covector,
                                  const Point& guess, const NewtonConfig& cfg, Side side) {
  try {
    return newton_invert(chart, fixed, covector, guess, cfg, side);
  } catch (const NewtonFailure&) {
    const Eigen::VectorXd start =
        side == Side::Target ? Eigen::VectorXd(-chart.grad_x(fixed, guess)) : Eigen::VectorXd(-chart.grad_xb(guess, fixed));
    auto solve = [&](double s, const Point& g) {
      return newton_invert(chart, fixed, (1.0 - s) * start + s * covector, g, cfg, side);
    };
    return continue_branch(solve, guess, 0.0, 1.0, 10);
  }
}

}  // namespace detail

/// x̄ with −Dc(x, x̄) = p*, on the Newton branch through `guess`.
inline Point c_exp(const CostChart& chart, const Point& x, const Eigen::VectorXd& pstar, const Point& guess,
                   const NewtonConfig& cfg = {}) {
  return detail::invert_with_homotopy(chart, x, pstar, guess, cfg, detail::Side::Target);
}

/// x with −D̄c(x, x̄) = q*, on the Newton branch through `guess`.
inline Point c_star_exp(const CostChart& chart, const Point& xb, const Eigen::VectorXd& qstar, const Point& guess,
                        const NewtonConfig& cfg = {}) {
  return detail::invert_with_homotopy(chart, xb, qstar, guess, cfg, detail::Side::Source);
}

/// Vertical geodesic t ↦ (x, x̄(t)) with −Dc(x, x̄(t)) = (1−t) p*₀ + t p*₁.
struct CSegment {
  Point x;
  Point xb0;
  Point xb1;
  Eigen::VectorXd p0;  // −Dc(x, x̄₀)
  Eigen::VectorXd p1;  // −Dc(x, x̄₁)
  std::vector<double> t;
  std::vector<Point> xb;  // x̄(t[k])

  std::size_t size() const { return t.size(); }
};

namespace detail {

// Continuation of a Newton branch along a straight line of covectors, with
// step halving when a solve from the previous point fails.
template <class Solve>
Point continue_branch(const Solve& solve, const Point& start, double s_from, double s_to, int depth) {
  try {
    return solve(s_to, start);
  } catch (const NewtonFailure&) {
    if (depth <= 0) throw;
  } catch (const DomainError&) {
    if (depth <= 0) throw;
  }
  const double mid = 0.5 * (s_from + s_to);
  Point m = continue_branch(solve, start, s_from, mid, depth - 1);
  return continue_branch(solve, m, mid, s_to, depth - 1);
}

}  // namespace detail

inline CSegment c_segment(const CostChart& chart, const Point& x, const Point& xb0, const Point& xb1,
                          int num_samples, const NewtonConfig& cfg = {}) {
  if (num_samples < 2) throw InvalidSpec("c_segment: need at least two samples");
  CSegment seg;
  seg.x = x;
  seg.xb0 = xb0;
  seg.xb1 = xb1;
  seg.p0 = -chart.grad_x(x, xb0);
  seg.p1 = -chart.grad_x(x, xb1);
  auto solve = [&](double t, const Point& guess) {
    return detail::newton_invert(chart, x, (1.0 - t) * seg.p0 + t * seg.p1, guess, cfg, detail::Side::Target);
  };
  Point prev = xb0;
  double tprev = 0.0;
  for (int k = 0; k < num_samples; ++k) {
    const double t = static_cast<double>(k) / (num_samples - 1);
    Point cur;
    try {
      cur = detail::continue_branch(solve, prev, tprev, t, 8);
    } catch (const Error& e) {
      throw SegmentFailure(std::string("c_segment: ") + e.what(), t);
    }
    seg.t.push_back(t);
    seg.xb.push_back(cur);
    prev = cur;
    tprev = t;
  }
  const double gap = (seg.xb.back() - xb1).norm();
  if (gap > 1e-6 * std::max(1.0, xb1.norm()))
    throw SegmentFailure("c_segment: continuation reached a different branch at t = 1", 1.0);
  return seg;
}

/// Max over interior samples of ‖ẍ̄ᵐ + Γ̄ᵐ_{jk} ẋ̄ʲ ẋ̄ᵏ‖ with central differences.
inline double geodesic_residual(const CostChart& chart, const CSegment& seg) {
  const std::size_t N = seg.size();
  if (N < 5) throw InvalidSpec("geodesic_residual: need at least 5 samples");
  const int n = chart.dim();
  const double dt = seg.t[1] - seg.t[0];
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < N; ++k) {
    const Eigen::VectorXd v = (seg.xb[k + 1] - seg.xb[k - 1]) / (2.0 * dt);
    const Eigen::VectorXd a = (seg.xb[k + 1] - 2.0 * seg.xb[k] + seg.xb[k - 1]) / (dt * dt);
    const ChristoffelAtPoint g = christoffel(chart, seg.x, seg.xb[k]);
    Eigen::VectorXd res = a;
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) res[m] += g.barred(m, i, j) * v[i] * v[j];
    worst = std::max(worst, res.norm());
  }
  return worst;
}

/// Horizontal geodesic s ↦ (x(s), x̄) with x(0) = x and ẋ(0) = p:
/// x(s) = c*-Exp_x̄(−D̄c(x, x̄) − s (D̄Dc) p). Samples are returned in grid order.
inline std::vector<std::pair<double, Point>> horizontal_geodesic(const CostChart& chart, const Point& x,
                                                                 const Point& xb, const Eigen::VectorXd& p,
                                                                 const std::vector<double>& s_grid,
                                                                 const NewtonConfig& cfg = {}) {
  const Eigen::VectorXd r0 = -chart.grad_xb(x, xb);
  const Eigen::VectorXd slope = -(chart.cross_matrix(x, xb).transpose() * p);
  auto solve = [&](double s, const Point& guess) {
    return detail::newton_invert(chart, xb, r0 + s * slope, guess, cfg, detail::Side::Source);
  };

  std::vector<std::pair<double, Point>> out(s_grid.size());
  // Walk outward from s = 0 in each direction so each solve is seeded by its neighbour.
  auto sweep = [&](bool positive) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s_grid.size(); ++i)
      if ((s_grid[i] >= 0.0) == positive) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(s_grid[a]) < std::abs(s_grid[b]);
    });
    Point prev = x;
    double sprev = 0.0;
    for (std::size_t i : idx) {
      const double s = s_grid[i];
      Point cur;
      try {
        cur = detail::continue_branch(solve, prev, sprev, s, 8);
      } catch (const Error& e) {
        throw SegmentFailure(std::string("horizontal_geodesic: ") + e.what(), s);
      }
      out[i] = {s, cur};
      prev = cur;
      sprev = s;
    }
  };
  sweep(true);
  sweep(false);
  return out;
}

/// Mirror of geodesic_residual for a horizontal geodesic sampled on a uniform grid.
inline double horizontal_residual(const CostChart& chart, const Point& xb,
                                  const std::vector<std::pair<double, Point>>& samples) {
  const std::size_t N = samples.size();
  if (N < 5) throw InvalidSpec("horizontal_residual: need at least 5 samples");
  const int n = chart.dim();
  const double ds = samples[1].first - samples[0].first;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < N; ++k) {
    const Eigen::VectorXd v = (samples[k + 1].second - samples[k - 1].second) / (2.0 * ds);
    const Eigen::VectorXd a = (samples[k + 1].second - 2.0 * samples[k].second + samples[k - 1].second) / (ds * ds);
    const ChristoffelAtPoint g = christoffel(chart, samples[k].second, xb);
    Eigen::VectorXd res = a;
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) res[m] += g.unbarred(m, i, j) * v[i] * v[j];
    worst = std::max(worst, res.norm());
  }
  return worst;
}

}  // namespace crosscurv
