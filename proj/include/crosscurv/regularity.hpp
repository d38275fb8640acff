#pragma once

// Sampled (A3w)/(A3s) classification, the fourth-derivative curvature
// identity, sliding-mountain and contact-connectivity checks, the local
// double-mountain estimate and the law-of-cosines fit.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "crosscurv/geodesics.hpp"
#include "crosscurv/parallel.hpp"

namespace crosscurv {

enum class Regularity { A3s, A3w, Violated };

inline const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::A3s: return "A3s";
    case Regularity::A3w: return "A3w";
    default: return "violated";
  }
}

inline Regularity classify_value(double min_normalized, double tol) {
  if (min_normalized > tol) return Regularity::A3s;
  if (min_normalized < -tol) return Regularity::Violated;
  return Regularity::A3w;
}

struct NullWitness {
  Point x;
  Point xb;
  Eigen::VectorXd p;
  Eigen::VectorXd pb;
  double normalized = std::numeric_limits<double>::quiet_NaN();
};

struct RegularityReport {
  std::size_t pairs_examined = 0;
  std::size_t samples = 0;  // null directions evaluated
  std::size_t skipped_out_of_domain = 0;
  std::size_t nondegeneracy_failures = 0;
  double min_normalized = std::numeric_limits<double>::infinity();  // min of cross / (|p|²|p̄|²)
  Regularity classification = Regularity::A3w;
  NullWitness witness;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline void require_bounded(const Box& b, const char* what) {
  if (!b.bounded()) throw InvalidSpec(std::string(what) + ": sampling box must be bounded");
}

inline std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Cell centres of a points_per_side^n lattice on the box; `index` in mixed radix.
inline Point lattice_point(const Box& box, int per_side, std::size_t index) {
  const Eigen::Index n = box.lo.size();
  Point p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<double>(index % static_cast<std::size_t>(per_side));
    index /= static_cast<std::size_t>(per_side);
    p[i] = box.lo[i] + (k + 0.5) / per_side * (box.hi[i] - box.lo[i]);
  }
  return p;
}

inline std::pair<Point, Point> lattice_pair(const DomainSpec& d, int per_side, std::size_t index, int n) {
  const std::size_t half = ipow(static_cast<std::size_t>(per_side), n);
  return {lattice_point(d.source, per_side, index % half), lattice_point(d.target, per_side, index / half)};
}

// Unit p and unit q with q·p = 0.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> null_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N01;
  Eigen::VectorXd p(n), q(n);
  for (;;) {
    for (int i = 0; i < n; ++i) p[i] = N01(rng);
    for (int i = 0; i < n; ++i) q[i] = N01(rng);
    if (p.norm() < 1e-8) continue;
    p.normalize();
    q -= q.dot(p) * p;
    if (q.norm() < 1e-8) continue;
    q.normalize();
    return {p, q};
  }
}

struct ClassifyPartial {
  std::size_t pairs = 0, samples = 0, skipped = 0, failures = 0;
  NullWitness best;
};

inline ClassifyPartial merge(ClassifyPartial a, const ClassifyPartial& b) {
  a.pairs += b.pairs;
  a.samples += b.samples;
  a.skipped += b.skipped;
  a.failures += b.failures;
  if (b.best.x.size() && (a.best.x.size() == 0 || b.best.normalized < a.best.normalized)) a.best = b.best;
  return a;
}

}  // namespace detail

/// Minimum of the normalized cross-curvature over null pairs p ⊕ p̄ with
/// p̄ = [c_{ij̄}]⁻¹ q, q ⟂ p, sampled on lattices over domain.source and
/// domain.target. Pairs the chart rejects are skipped; pairs where the cross
/// Hessian degenerates are counted and excluded.
inline RegularityReport classify_regularity(const CostChart& chart, const DomainSpec& domain, int points_per_side,
                                            int directions_per_point, double tol, std::uint64_t seed = 0,
                                            int workers = 1) {
  const int n = chart.dim();
  if (n < 2) throw InvalidSpec("classify_regularity: null directions need n >= 2");
  if (points_per_side < 1 || directions_per_point < 1)
    throw InvalidSpec("classify_regularity: points_per_side and directions_per_point must be >= 1");
  if (!(tol >= 0.0)) throw InvalidSpec("classify_regularity: tol must be >= 0");
  detail::require_bounded(domain.source, "classify_regularity");
  detail::require_bounded(domain.target, "classify_regularity");

  const std::size_t total = detail::ipow(static_cast<std::size_t>(points_per_side), 2 * n);
  auto visit = [&](std::size_t idx) {
    detail::ClassifyPartial out;
    auto [x, xb] = detail::lattice_pair(domain, points_per_side, idx, n);
    if (!chart.in_domain(x, xb)) {
      out.skipped = 1;
      return out;
    }
    out.pairs = 1;
    try {
      const GeometryAt geo(chart, x, xb);
      auto rng = detail::stream_rng(seed, idx);
      for (int d = 0; d < directions_per_point; ++d) {
        auto [p, q] = detail::null_direction(rng, n);
        const Eigen::VectorXd pb = geo.hessian.inverse * q;
        const double value = geo.cross_curvature(p, pb) / (p.squaredNorm() * pb.squaredNorm());
        ++out.samples;
        if (out.best.x.size() == 0 || value < out.best.normalized) out.best = {x, xb, p, pb, value};
      }
    } catch (const NondegeneracyFailure&) {
      out.pairs = 0;
      out.failures = 1;
    }
    return out;
  };
  const auto sum = parallel_reduce(total, workers, detail::ClassifyPartial{}, visit, detail::merge);
  if (sum.samples == 0) throw DomainError("classify_regularity: no admissible sample pairs in the boxes");

  RegularityReport r;
  r.pairs_examined = sum.pairs;
  r.samples = sum.samples;
  r.skipped_out_of_domain = sum.skipped;
  r.nondegeneracy_failures = sum.failures;
  r.min_normalized = sum.best.normalized;
  r.witness = sum.best;
  r.tolerance = tol;
  r.seed = seed;
  r.classification = classify_value(r.min_normalized, tol);
  return r;
}

// ---------------------------------------------------------------------------
// Fourth-derivative identity

struct FourthDerivativeConfig {
  double step = 0.05;         // initial step h; the estimate at h/2 is the consistency partner
  double consistency = 0.1;   // relative disagreement allowed between h and h/2
  double absolute_floor = 1e-6;
  int max_refinements = 4;    // halvings of h tried before giving up
};

/// −2 ∂⁴/∂s²∂t² c(σ(s), τ(t)) at 0, with σ the horizontal geodesic through
/// (x, x̄) with velocity p and τ(t) = x̄ + t p̄. 5-point central stencils in s
/// and t at steps h and h/2, combined by one Richardson step. h is halved
/// while the two estimates disagree.
inline double cross_curvature_via_fd(const CostChart& chart, const Point& x, const Point& xb,
                                     const Eigen::VectorXd& p, const Eigen::VectorXd& pb,
                                     const FourthDerivativeConfig& cfg = {}) {
  if (!(cfg.step > 0.0)) throw InvalidSpec("cross_curvature_via_fd: step must be > 0");
  NewtonConfig tight;
  tight.tolerance = 1e-14;
  static constexpr double w[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  auto estimate = [&](double h) {
    const std::vector<double> grid = {-2 * h, -h, 0.0, h, 2 * h};
    std::vector<std::pair<double, Point>> sigma;
    try {
      sigma = horizontal_geodesic(chart, x, xb, p, grid, tight);
    } catch (const SegmentFailure& e) {
      throw DomainError(std::string("cross_curvature_via_fd: ") + e.what());
    }
    double acc = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const Point tau = xb + grid[static_cast<std::size_t>(j)] * pb;
        const Point& xs = sigma[static_cast<std::size_t>(i)].second;
        if (!chart.in_domain(xs, tau)) throw DomainError("cross_curvature_via_fd: stencil leaves the domain");
        acc += w[i] * w[j] * chart.eval(xs, tau);
      }
    return -2.0 * acc / (h * h * h * h);
  };
  double h = cfg.step;
  double a = estimate(h);
  for (int r = 0; r <= cfg.max_refinements; ++r, h *= 0.5) {
    const double b = estimate(0.5 * h);
    if (std::abs(a - b) <= cfg.consistency * std::max(std::abs(a), std::abs(b)) + cfg.absolute_floor)
      return (16.0 * b - a) / 15.0;
    a = b;
  }
  throw NumericalFailure("cross_curvature_via_fd: estimates at successive steps disagree down to h = " +
                         std::to_string(h));
}

// ---------------------------------------------------------------------------
// Sliding mountain

struct MountainCheck {
  double max_violation = -std::numeric_limits<double>::infinity();
  double argmax_t = std::numeric_limits<double>::quiet_NaN();
  Point argmax_y;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double tolerance = 0.0;
  bool passed = true;
  std::vector<double> t;
  std::vector<Point> y;
  Matrix f;  // f(t_k, y_j) = −c(y_j, x̄(t_k)) + c(x, x̄(t_k)); NaN for skipped y
};

namespace detail {

struct ArgMax {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t row = 0, col = 0;
  bool set = false;
};

inline ArgMax merge_max(ArgMax a, const ArgMax& b) {
  if (b.set && (!a.set || b.value > a.value)) return b;
  return a;
}

inline bool segment_admits(const CostChart& chart, const CSegment& seg, const Point& y) {
  for (const auto& z : seg.xb)
    if (!chart.in_domain(y, z)) return false;
  return true;
}

}  // namespace detail

/// max over (t, y) of f(t, y) − max{f(0, y), f(1, y)} along the c-segment from
/// x̄₀ to x̄₁ at x. y with any inadmissible (y, x̄(t)) are skipped and counted.
inline MountainCheck sliding_mountain_check(const CostChart& chart, const Point& x, const Point& xb0,
                                            const Point& xb1, const std::vector<Point>& y_grid, int t_samples,
                                            double tol, int workers = 1) {
  const CSegment seg = c_segment(chart, x, xb0, xb1, t_samples);
  MountainCheck out;
  out.t = seg.t;
  out.y = y_grid;
  out.tolerance = tol;
  const std::size_t T = seg.size();
  out.f = Matrix::Constant(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(y_grid.size()),
                           std::numeric_limits<double>::quiet_NaN());
  std::vector<double> cx(T);
  for (std::size_t k = 0; k < T; ++k) cx[k] = chart.eval(x, seg.xb[k]);
  std::vector<char> ok(y_grid.size(), 0);
  auto visit = [&](std::size_t j) {
    detail::ArgMax m;
    const Point& y = y_grid[j];
    if (!detail::segment_admits(chart, seg, y)) return m;
    ok[j] = 1;
    for (std::size_t k = 0; k < T; ++k)
      out.f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = -chart.eval(y, seg.xb[k]) + cx[k];
    const auto col = out.f.col(static_cast<Eigen::Index>(j));
    const double ends = std::max(col[0], col[static_cast<Eigen::Index>(T - 1)]);
    for (std::size_t k = 0; k < T; ++k) {
      const double v = col[static_cast<Eigen::Index>(k)] - ends;
      if (!m.set || v > m.value) m = {v, k, j, true};
    }
    return m;
  };
  const auto best = parallel_reduce(y_grid.size(), workers, detail::ArgMax{}, visit, detail::merge_max);
  for (char c : ok) (c ? out.evaluated : out.skipped) += 1;
  if (best.set) {
    out.max_violation = best.value;
    out.argmax_t = seg.t[best.row];
    out.argmax_y = y_grid[best.col];
  }
  out.passed = !(out.max_violation > tol);
  return out;
}

/// Interior critical points of f(t) = −c(y, x̄(t)) + c(x, x̄(t)) located by
/// bisection on ḟ between grid nodes where the discrete slope changes sign,
/// with f̈ from a second difference at each.
inline std::vector<std::pair<double, double>> critical_point_convexity(const CostChart& chart, const Point& x,
                                                                       const Point& y, const Point& xb0,
                                                                       const Point& xb1, int t_samples) {
  const CSegment seg = c_segment(chart, x, xb0, xb1, t_samples);
  NewtonConfig tight;
  tight.tolerance = 1e-14;
  auto point_at = [&](double t) {
    const auto k = static_cast<std::size_t>(std::lround(t * static_cast<double>(seg.size() - 1)));
    return c_exp(chart, x, (1.0 - t) * seg.p0 + t * seg.p1, seg.xb[std::min(k, seg.size() - 1)], tight);
  };
  auto f = [&](double t) {
    const Point z = point_at(t);
    return -chart.eval(y, z) + chart.eval(x, z);
  };
  const double dd = 1e-5, d2 = 1e-3;
  auto fdot = [&](double t) { return (f(t + dd) - f(t - dd)) / (2 * dd); };

  std::vector<double> fs(seg.size());
  for (std::size_t k = 0; k < seg.size(); ++k) fs[k] = -chart.eval(y, seg.xb[k]) + chart.eval(x, seg.xb[k]);
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 1; k + 1 < seg.size(); ++k) {
    const double left = fs[k] - fs[k - 1], right = fs[k + 1] - fs[k];
    if (!(left * right < 0.0 || (right == 0.0 && left != 0.0))) continue;
    double a = std::max(seg.t[k - 1], 2 * dd), b = std::min(seg.t[k + 1], 1.0 - 2 * dd);
    double fa = fdot(a), fb = fdot(b);
    if (fa * fb > 0.0) continue;
    for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = fdot(m);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    const double t0 = 0.5 * (a + b);
    if (t0 - d2 <= 0.0 || t0 + d2 >= 1.0) continue;
    out.emplace_back(t0, (f(t0 + d2) - 2.0 * f(t0) + f(t0 - d2)) / (d2 * d2));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contact connectivity

struct ContactCheck {
  bool passed = true;
  double max_deficit = -std::numeric_limits<double>::infinity();
  double argmax_t = std::numeric_limits<double>::quiet_NaN();
  Point argmax_y;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double lambda1 = 0.0;  // λ₀ = 0
};

/// With u = max(−c(·, x̄₀), λ₁ − c(·, x̄₁)) and λ₁ chosen so both mountains touch u
/// at x, deficit = max over (t, y) of u(x) − c(y, x̄(t)) + c(x, x̄(t)) − u(y).
inline ContactCheck contact_connectivity_check(const CostChart& chart, const Point& x, const Point& xb0,
                                               const Point& xb1, const std::vector<Point>& y_grid, int t_samples,
                                               double tol, int workers = 1) {
  const CSegment seg = c_segment(chart, x, xb0, xb1, t_samples);
  ContactCheck out;
  out.lambda1 = chart.eval(x, xb1) - chart.eval(x, xb0);
  const double ux = -chart.eval(x, xb0);
  const std::size_t T = seg.size();
  std::vector<double> cx(T);
  for (std::size_t k = 0; k < T; ++k) cx[k] = chart.eval(x, seg.xb[k]);
  std::vector<char> ok(y_grid.size(), 0);
  auto visit = [&](std::size_t j) {
    detail::ArgMax m;
    const Point& y = y_grid[j];
    if (!detail::segment_admits(chart, seg, y)) return m;
    ok[j] = 1;
    const double uy = std::max(-chart.eval(y, xb0), out.lambda1 - chart.eval(y, xb1));
    for (std::size_t k = 0; k < T; ++k) {
      const double v = ux - chart.eval(y, seg.xb[k]) + cx[k] - uy;
      if (!m.set || v > m.value) m = {v, k, j, true};
    }
    return m;
  };
  const auto best = parallel_reduce(y_grid.size(), workers, detail::ArgMax{}, visit, detail::merge_max);
  for (char c : ok) (c ? out.evaluated : out.skipped) += 1;
  if (best.set) {
    out.max_deficit = best.value;
    out.argmax_t = seg.t[best.row];
    out.argmax_y = y_grid[best.col];
  }
  out.passed = !(out.max_deficit > tol);
  return out;
}

// ---------------------------------------------------------------------------
// Local double-mountain estimate

struct ConstantsEstimate {
  double C0 = 0.0;             // ½ min normalized null cross-curvature
  double cross_norm = 0.0;     // sup ‖DD̄c‖₂
  double inverse_norm = 0.0;   // sup ‖[DD̄c]⁻¹‖₂
  double c2 = 0.0;             // sup over |α| ≤ 2 of |∂^α c|
  double c3 = 0.0;             // sup over |α| ≤ 3 of |∂^α c|
  double C1 = 0.0;             // C₀ ‖2DD̄c‖⁻² ‖[DD̄c]⁻¹‖⁻²
  Regularity classification = Regularity::A3w;
  RegularityReport report;
};

namespace detail {

// All multisets of size `order` drawn from the 2n joint coordinates.
inline void multi_indices(int n, int order, int first, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (order == 0) {
    out.push_back(cur);
    return;
  }
  for (int v = first; v < 2 * n; ++v) {
    if (v < n)
      cur.unbarred.push_back(v);
    else
      cur.barred.push_back(v - n);
    multi_indices(n, order - 1, v, cur, out);
    if (v < n)
      cur.unbarred.pop_back();
    else
      cur.barred.pop_back();
  }
}

struct NormPartial {
  double h = 0.0, hinv = 0.0, c2 = 0.0, c3 = 0.0;
};

}  // namespace detail

inline ConstantsEstimate estimate_constants(const CostChart& chart, const DomainSpec& domain, int points_per_side,
                                            int directions_per_point, double tol = 1e-8, std::uint64_t seed = 0,
                                            int workers = 1) {
  ConstantsEstimate out;
  out.report = classify_regularity(chart, domain, points_per_side, directions_per_point, tol, seed, workers);
  out.classification = out.report.classification;
  out.C0 = 0.5 * out.report.min_normalized;

  const int n = chart.dim();
  std::vector<MultiIndex> low, third;
  for (int k = 1; k <= 2; ++k) {
    MultiIndex cur;
    detail::multi_indices(n, k, 0, cur, low);
  }
  {
    MultiIndex cur;
    detail::multi_indices(n, 3, 0, cur, third);
  }
  const std::size_t total = detail::ipow(static_cast<std::size_t>(points_per_side), 2 * n);
  auto visit = [&](std::size_t idx) {
    detail::NormPartial r;
    auto [x, xb] = detail::lattice_pair(domain, points_per_side, idx, n);
    if (!chart.in_domain(x, xb)) return r;
    Eigen::JacobiSVD<Matrix> svd(chart.cross_matrix(x, xb));
    const auto& s = svd.singularValues();
    r.h = s[0];
    r.hinv = s[s.size() - 1] > 0.0 ? 1.0 / s[s.size() - 1] : std::numeric_limits<double>::infinity();
    r.c2 = std::abs(chart.eval(x, xb));
    for (const auto& a : low) r.c2 = std::max(r.c2, std::abs(chart.mixed_partial(x, xb, a)));
    r.c3 = r.c2;
    for (const auto& a : third) r.c3 = std::max(r.c3, std::abs(chart.mixed_partial(x, xb, a)));
    return r;
  };
  auto merge = [](detail::NormPartial a, const detail::NormPartial& b) {
    return detail::NormPartial{std::max(a.h, b.h), std::max(a.hinv, b.hinv), std::max(a.c2, b.c2),
                               std::max(a.c3, b.c3)};
  };
  const auto norms = parallel_reduce(total, workers, detail::NormPartial{}, visit, merge);
  out.cross_norm = norms.h;
  out.inverse_norm = norms.hinv;
  out.c2 = norms.c2;
  out.c3 = norms.c3;
  const double two_h = 2.0 * out.cross_norm;
  out.C1 = out.C0 / (two_h * two_h * out.inverse_norm * out.inverse_norm);
  return out;
}

struct LocalEstimate {
  double max_deficit = -std::numeric_limits<double>::infinity();
  double argmax_t = std::numeric_limits<double>::quiet_NaN();
  Point argmax_y;
  double y_radius = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// Lattice of y_per_side^n points on [x − r, x + r]ⁿ restricted to |y − x| ≤ r.
inline std::vector<Point> ball_lattice(const Point& x, double radius, int y_per_side) {
  const int n = static_cast<int>(x.size());
  std::vector<Point> out;
  const std::size_t total = detail::ipow(static_cast<std::size_t>(y_per_side), n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    Point y(n);
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<double>(rem % static_cast<std::size_t>(y_per_side));
      rem /= static_cast<std::size_t>(y_per_side);
      y[i] = y_per_side == 1 ? x[i] : x[i] - radius + 2.0 * radius * k / (y_per_side - 1);
    }
    if ((y - x).norm() <= radius * (1.0 + 1e-12)) out.push_back(std::move(y));
  }
  return out;
}

/// max over (t, y) of f(t, y) + C₁ t(1−t)|x̄₁−x̄₀|²|y−x|² − ‖c‖_{C³}|y−x|³ − max{f(0, y), f(1, y)}.
/// Refuses when the constants come from a box classified as violated.
inline LocalEstimate local_estimate_check(const CostChart& chart, const Point& x, const Point& xb0, const Point& xb1,
                                          const ConstantsEstimate& consts, double y_radius, int t_samples,
                                          int y_per_side, int workers = 1) {
  if (consts.classification == Regularity::Violated)
    throw InvalidSpec("local_estimate_check: the sampled box violates (A3w); C0 < 0 and the estimate does not apply");
  if (!(y_radius > 0.0)) throw InvalidSpec("local_estimate_check: y_radius must be > 0");
  const auto ys = ball_lattice(x, y_radius, y_per_side);
  const CSegment seg = c_segment(chart, x, xb0, xb1, t_samples);
  const double span2 = (xb1 - xb0).squaredNorm();
  const std::size_t T = seg.size();
  std::vector<double> cx(T);
  for (std::size_t k = 0; k < T; ++k) cx[k] = chart.eval(x, seg.xb[k]);
  std::vector<char> ok(ys.size(), 0);
  auto visit = [&](std::size_t j) {
    detail::ArgMax m;
    const Point& y = ys[j];
    if (!detail::segment_admits(chart, seg, y)) return m;
    ok[j] = 1;
    const double r = (y - x).norm();
    std::vector<double> f(T);
    for (std::size_t k = 0; k < T; ++k) f[k] = -chart.eval(y, seg.xb[k]) + cx[k];
    const double ends = std::max(f.front(), f.back());
    for (std::size_t k = 0; k < T; ++k) {
      const double t = seg.t[k];
      const double v = f[k] + consts.C1 * t * (1.0 - t) * span2 * r * r - consts.c3 * r * r * r - ends;
      if (!m.set || v > m.value) m = {v, k, j, true};
    }
    return m;
  };
  const auto best = parallel_reduce(ys.size(), workers, detail::ArgMax{}, visit, detail::merge_max);
  LocalEstimate out;
  out.y_radius = y_radius;
  for (char c : ok) (c ? out.evaluated : out.skipped) += 1;
  if (best.set) {
    out.max_deficit = best.value;
    out.argmax_t = seg.t[best.row];
    out.argmax_y = ys[best.col];
  }
  return out;
}

/// Largest radius r = r_start / 2^k (k ≤ max_halvings) at which the local
/// estimate holds on the sampled lattice, or 0 if none does.
inline double r0_proxy(const CostChart& chart, const Point& x, const Point& xb0, const Point& xb1,
                       const ConstantsEstimate& consts, double r_start, int t_samples, int y_per_side,
                       int max_halvings = 20, int workers = 1) {
  double r = r_start;
  for (int k = 0; k <= max_halvings; ++k, r *= 0.5)
    if (local_estimate_check(chart, x, xb0, xb1, consts, r, t_samples, y_per_side, workers).max_deficit <= 0.0)
      return r;
  return 0.0;
}

// ---------------------------------------------------------------------------
// Law of cosines

struct LawOfCosinesFit {
  double k = 0.0;
  double coefficient = 0.0;  // fitted s²t² coefficient of d² − (s² + t² − 2st cosθ)
  double rms_residual = 0.0;
  double condition = 0.0;
  bool ill_conditioned = false;
};

namespace detail {

// Points exp_x(s·v) for s on the grid, by c-exponential of the covector s·g v
// (−Dc(x, exp_x v) = g v for c = d²/2), continued outward from s = 0.
inline std::vector<Point> exp_sweep(const CostChart& chart, const Point& x, const Eigen::VectorXd& covector,
                                    const std::vector<double>& grid, const NewtonConfig& cfg) {
  std::vector<Point> out(grid.size());
  for (int dir : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if ((dir > 0) == (grid[i] >= 0.0)) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(grid[a]) < std::abs(grid[b]); });
    Point prev = x;
    for (std::size_t i : idx) {
      out[i] = c_exp(chart, x, grid[i] * covector, prev, cfg);
      prev = out[i];
    }
  }
  return out;
}

}  // namespace detail

/// Fits d²(x(s), x̄(t)) − (s² + t² − 2st cosθ) on a grid_n × grid_n lattice in
/// [−s_max, s_max]², with x(s), x̄(t) unit-speed geodesics from x at angle θ and
/// d² = 2c. Basis s²t² plus the fifth- and sixth-order terms; k = −3a/sin²θ.
inline LawOfCosinesFit law_of_cosines_fit(const CostChart& chart, const Point& x, double theta, double s_max,
                                          int grid_n) {
  const int n = chart.dim();
  if (n < 2) throw InvalidSpec("law_of_cosines_fit: needs n >= 2");
  if (!(s_max > 0.0) || grid_n < 4) throw InvalidSpec("law_of_cosines_fit: need s_max > 0 and grid_n >= 4");
  const double st = std::sin(theta);
  if (std::abs(st) < 1e-3) throw InvalidSpec("law_of_cosines_fit: theta too close to 0 or pi");
  const Matrix H = chart.cross_matrix(x, x);
  const Matrix g = -0.5 * (H + H.transpose());
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw InvalidSpec("law_of_cosines_fit: −c_{ij̄}(x, x) is not positive definite; not a squared-distance cost");
  // Columns of E are g-orthonormal.
  const Matrix E = llt.matrixU().solve(Matrix::Identity(n, n));
  const Eigen::VectorXd u = E.col(0);
  const Eigen::VectorXd w = std::cos(theta) * E.col(0) + st * E.col(1);

  std::vector<double> grid(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) grid[static_cast<std::size_t>(i)] = -s_max + 2.0 * s_max * i / (grid_n - 1);
  NewtonConfig tight;
  tight.tolerance = 1e-13;
  const auto xs = detail::exp_sweep(chart, x, g * u, grid, tight);
  const auto xbs = detail::exp_sweep(chart, x, g * w, grid, tight);

  const int m = grid_n * grid_n;
  Matrix A(m, 6);
  Eigen::VectorXd rhs(m);
  int row = 0;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j, ++row) {
      const double s = grid[static_cast<std::size_t>(i)], t = grid[static_cast<std::size_t>(j)];
      const double d2 = 2.0 * chart.eval(xs[static_cast<std::size_t>(i)], xbs[static_cast<std::size_t>(j)]);
      rhs[row] = d2 - (s * s + t * t - 2.0 * s * t * std::cos(theta));
      const double s2t2 = s * s * t * t;
      A.row(row) << s2t2, s2t2 * s, s2t2 * t, s2t2 * s * s, s2t2 * s * t, s2t2 * t * t;
    }
  // Column scaling keeps the normal equations well conditioned for small s_max.
  Eigen::VectorXd scale(6);
  for (int c = 0; c < 6; ++c) scale[c] = std::max(A.col(c).norm(), 1e-300);
  const Matrix As = A * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd coef = svd.solve(rhs).cwiseQuotient(scale);
  const auto& sv = svd.singularValues();

  LawOfCosinesFit out;
  out.coefficient = coef[0];
  out.k = -3.0 * coef[0] / (st * st);
  out.rms_residual = std::sqrt((A * coef - rhs).squaredNorm() / m);
  out.condition = sv[0] / sv[sv.size() - 1];
  out.ill_conditioned = !(out.condition < 1e10);
  return out;
}

// ---------------------------------------------------------------------------
// Violation search

struct ViolationSearchConfig {
  std::uint64_t seed = 1;
  int iterations = 600;
  double box = 0.6;          // all points drawn from [−box, box]ⁿ
  double initial_step = 0.15;
  double initial_temperature = 1e-3;
  int t_samples = 33;
};

struct MountainWitness {
  Point x, xb0, xb1, y;
  double t = std::numeric_limits<double>::quiet_NaN();
  double violation = -std::numeric_limits<double>::infinity();
};

/// Simulated annealing over (x, x̄₀, x̄₁, y) maximizing the sliding-mountain
/// violation at a single y. Deterministic for a fixed seed.
inline MountainWitness search_mountain_violation(const CostChart& chart, const ViolationSearchConfig& cfg) {
  const int n = chart.dim();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-cfg.box, cfg.box), U01(0.0, 1.0);
  std::normal_distribution<double> N01;
  auto score = [&](MountainWitness& w) {
    w.violation = -std::numeric_limits<double>::infinity();
    try {
      if (!chart.in_domain(w.x, w.xb0) || !chart.in_domain(w.x, w.xb1)) return;
      const auto r = sliding_mountain_check(chart, w.x, w.xb0, w.xb1, {w.y}, cfg.t_samples, 0.0);
      if (r.evaluated == 0) return;
      w.violation = r.max_violation;
      w.t = r.argmax_t;
    } catch (const Error&) {
    }
  };
  auto random_point = [&] {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = U(rng);
    return p;
  };
  auto jitter = [&](const Point& p, double step) {
    Point q = p;
    for (int i = 0; i < n; ++i) q[i] = std::clamp(q[i] + step * N01(rng), -cfg.box, cfg.box);
    return q;
  };
  MountainWitness cur{random_point(), random_point(), random_point(), random_point()};
  score(cur);
  MountainWitness best = cur;
  for (int it = 0; it < cfg.iterations; ++it) {
    const double frac = static_cast<double>(it) / std::max(1, cfg.iterations - 1);
    const double step = cfg.initial_step * std::pow(0.05, frac);
    const double temp = cfg.initial_temperature * std::pow(1e-3, frac);
    MountainWitness cand{jitter(cur.x, step), jitter(cur.xb0, step), jitter(cur.xb1, step), jitter(cur.y, step)};
    score(cand);
    const bool accept = cand.violation > cur.violation ||
                        (std::isfinite(cand.violation) && U01(rng) < std::exp((cand.violation - cur.violation) / temp));
    if (accept) cur = cand;
    if (cur.violation > best.violation) best = cur;
  }
  return best;
}

}  // namespace crosscurv
