#pragma once

// Built-in cost functors and the tensor-product construction.
//
// Each functor is templated on the scalar type so it can be evaluated on
// nested dual numbers; see DualNumberModel in cost.hpp.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "crosscurv/cost.hpp"

namespace crosscurv {

namespace detail {

template <class T>
T squared_distance(std::span<const T> a, std::span<const T> b) {
  T s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    T d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double squared_distance(const Point& a, const Point& b) { return (a - b).squaredNorm(); }

// 1 / (k^2 binom(2k, k)), the coefficients of the asin^2 / asinh^2 series.
inline const std::vector<double>& asin2_coefficients() {
  static const std::vector<double> coeffs = [] {
    std::vector<double> c(41, 0.0);
    double binom = 1.0;
    for (int k = 1; k <= 40; ++k) {
      binom *= 2.0 * (2 * k - 1) / k;
      c[static_cast<std::size_t>(k)] = 1.0 / (static_cast<double>(k) * k * binom);
    }
    return c;
  }();
  return coeffs;
}

// 2 sum_k s^k u^k / (k^2 binom(2k,k)) by Horner, s = +1 or -1.
template <class T>
T asin2_series(const T& u, double s) {
  const auto& c = asin2_coefficients();
  T acc(0.0);
  for (int k = 40; k >= 1; --k) {
    const double sk = (k % 2 == 1) ? 1.0 : s;
    acc = (acc + sk * c[static_cast<std::size_t>(k)]) * u;
  }
  return 2.0 * acc;
}

}  // namespace detail

/// c = |x - x̄|² / 2 on ℝⁿ.
struct EuclidQuadratic {
  int n = 2;

  int dim() const { return n; }
  std::string kind() const { return "euclid_quadratic"; }
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> xb) const {
    return 0.5 * detail::squared_distance(x, xb);
  }
  bool admissible(const Point&, const Point&, const DomainSpec&) const { return true; }
};

/// c = -log|x - x̄| on ℝⁿ minus the collar |x - x̄| < cut_margin.
struct LogEuclid {
  int n = 2;

  int dim() const { return n; }
  std::string kind() const { return "log_euclid"; }
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> xb) const {
    return -0.5 * log(detail::squared_distance(x, xb));
  }
  bool admissible(const Point& x, const Point& xb, const DomainSpec& d) const {
    return (x - xb).norm() >= d.cut_margin;
  }
};

/// Half squared great-circle distance on the unit sphere in the chart
/// (θ, φ) ↦ (sin θ cos φ, sin θ sin φ, cos θ).
struct SphereSquared {
  double theta_min = 0.15;

  static constexpr int n = 2;
  int dim() const { return 2; }
  std::string kind() const { return "sphere_squared"; }

  template <class T>
  static void embed(const T& theta, const T& phi, T out[3]) {
    T st = sin(theta);
    out[0] = st * cos(phi);
    out[1] = st * sin(phi);
    out[2] = cos(theta);
  }

  /// Squared geodesic distance as a function of the squared chord u.
  /// The series branch keeps the function smooth at u = 0.
  template <class T>
  static T distance_squared_from_chord(const T& u) {
    if (value_of(u) < 1.0) return detail::asin2_series(u, 1.0);
    T a = asin(0.5 * sqrt(u));
    return 4.0 * a * a;
  }

  template <class T>
  T operator()(std::span<const T> x, std::span<const T> xb) const {
    T a[3], b[3];
    embed(x[0], x[1], a);
    embed(xb[0], xb[1], b);
    T u(0.0);
    for (int i = 0; i < 3; ++i) {
      T d = a[i] - b[i];
      u += d * d;
    }
    return 0.5 * distance_squared_from_chord(u);
  }

  static double distance(const Point& x, const Point& xb) {
    const double c = std::sin(x[0]) * std::sin(xb[0]) * std::cos(x[1] - xb[1]) + std::cos(x[0]) * std::cos(xb[0]);
    return std::acos(std::clamp(c, -1.0, 1.0));
  }

  bool admissible(const Point& x, const Point& xb, const DomainSpec& d) const {
    const double hi = std::numbers::pi - theta_min;
    if (x[0] < theta_min || x[0] > hi || xb[0] < theta_min || xb[0] > hi) return false;
    return distance(x, xb) <= std::numbers::pi - d.cut_margin;
  }

  double source_volume(const Point& x) const { return std::sin(x[0]); }

  /// Round metric g = diag(1, sin²θ) at a chart point.
  static Matrix metric(const Point& x) {
    Matrix g = Matrix::Identity(2, 2);
    g(1, 1) = std::sin(x[0]) * std::sin(x[0]);
    return g;
  }
};

/// Half squared hyperbolic distance in the Poincaré ball model,
/// restricted to |z| ≤ radius_cap.
struct HyperbolicSquared {
  int n = 2;
  double radius_cap = 0.95;

  int dim() const { return n; }
  std::string kind() const { return "hyperbolic_squared"; }

  /// Squared distance from w = 4|z-ζ|²/((1-|z|²)(1-|ζ|²)), d = 2 asinh(√w / 2).
  template <class T>
  static T distance_squared_from_ratio(const T& w) {
    if (value_of(w) < 1.0) return detail::asin2_series(w, -1.0);
    T a = asinh(0.5 * sqrt(w));
    return 4.0 * a * a;
  }

  template <class T>
  T operator()(std::span<const T> z, std::span<const T> zb) const {
    T nz(0.0), nzb(0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
      nz += z[i] * z[i];
      nzb += zb[i] * zb[i];
    }
    T w = 4.0 * detail::squared_distance(z, zb) / ((1.0 - nz) * (1.0 - nzb));
    return 0.5 * distance_squared_from_ratio(w);
  }

  static double distance(const Point& z, const Point& zb) {
    const double w = 4.0 * (z - zb).squaredNorm() / ((1.0 - z.squaredNorm()) * (1.0 - zb.squaredNorm()));
    return 2.0 * std::asinh(0.5 * std::sqrt(w));
  }

  bool admissible(const Point& z, const Point& zb, const DomainSpec&) const {
    return z.norm() <= radius_cap && zb.norm() <= radius_cap;
  }

  double source_volume(const Point& z) const {
    const double s = 1.0 - z.squaredNorm();
    return 4.0 / (s * s);
  }

  /// Conformal metric 4/(1-|z|²)² δ.
  static Matrix metric(const Point& z) {
    const double s = 1.0 - z.squaredNorm();
    return Matrix::Identity(z.size(), z.size()) * (4.0 / (s * s));
  }
};

/// One-dimensional cost c(x, x̄) = sign ∫_{x0}^{x} ∫_{x̄0}^{x̄} exp(λ(s, t)) dt ds with
/// λ a polynomial Σ a_pq s^p t^q. Then c_{x x̄} = sign · exp(λ(x, x̄)).
/// The integral is evaluated by tensor Gauss–Legendre quadrature, which is
/// itself differentiable on dual numbers.
struct OneDimFamily {
  struct Term {
    int p;
    int q;
    double coeff;
  };
  std::vector<Term> lambda{{1, 1, 1.0}};
  double sign = -1.0;
  double x0 = 0.0;
  double xb0 = 0.0;

  int dim() const { return 1; }
  std::string kind() const { return "one_dim_family"; }

  template <class T>
  T lambda_at(const T& s, const T& t) const {
    T acc(0.0);
    for (const Term& term : lambda) acc += term.coeff * ipow(s, term.p) * ipow(t, term.q);
    return acc;
  }

  double lambda_value(double s, double t) const { return lambda_at(s, t); }

  template <class T>
  T operator()(std::span<const T> x, std::span<const T> xb) const {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    static const auto nodes = [] {
      std::vector<std::pair<double, double>> out;  // (node on [0,1], weight)
      const auto& a = Rule::abscissa();
      const auto& w = Rule::weights();
      for (std::size_t i = 0; i < a.size(); ++i) {
        out.emplace_back(0.5 * (1.0 + a[i]), 0.5 * w[i]);
        if (a[i] != 0.0) out.emplace_back(0.5 * (1.0 - a[i]), 0.5 * w[i]);
      }
      return out;
    }();
    const T dx = x[0] - x0;
    const T dxb = xb[0] - xb0;
    T sum(0.0);
    for (const auto& [sa, wa] : nodes) {
      const T s = x0 + sa * dx;
      for (const auto& [tb, wb] : nodes) {
        const T t = xb0 + tb * dxb;
        sum += (wa * wb) * exp(lambda_at(s, t));
      }
    }
    return sign * dx * dxb * sum;
  }

  bool admissible(const Point&, const Point&, const DomainSpec&) const { return true; }
};

/// Squared distance between points of two convex graphs over ℝⁿ:
/// c(X, X̄) = |X - X̄|²/2 + (f(X) - g(X̄))²/2 with quadratic
/// f(X) = ½ XᵀAX + a·X and g(X̄) = ½ X̄ᵀBX̄ + b·X̄.
struct ConvexBoundary {
  Matrix A;
  Eigen::VectorXd a;
  Matrix B;
  Eigen::VectorXd b;

  int dim() const { return static_cast<int>(a.size()); }
  std::string kind() const { return "convex_boundary"; }

  template <class T>
  static T quadratic(const Matrix& Q, const Eigen::VectorXd& lin, std::span<const T> x) {
    T acc(0.0);
    const auto n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      acc += lin[static_cast<Eigen::Index>(i)] * x[i];
      for (std::size_t j = 0; j < n; ++j)
        acc += 0.5 * Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[i] * x[j];
    }
    return acc;
  }

  template <class T>
  T operator()(std::span<const T> x, std::span<const T> xb) const {
    T h = quadratic(A, a, x) - quadratic(B, b, xb);
    return 0.5 * detail::squared_distance(x, xb) + 0.5 * h * h;
  }

  Eigen::VectorXd grad_f(const Point& x) const { return A * x + a; }
  Eigen::VectorXd grad_g(const Point& xb) const { return B * xb + b; }

  bool admissible(const Point&, const Point&, const DomainSpec&) const { return true; }
};

// ---------------------------------------------------------------------------
// Tensor products

/// c((x₊,x₋),(x̄₊,x̄₋)) = c₊(x₊,x̄₊) + c₋(x₋,x̄₋).
class ProductModel final : public CostModel {
 public:
  ProductModel(CostChart plus, CostChart minus) : plus_(std::move(plus)), minus_(std::move(minus)) {
    const auto& dp = plus_.domain();
    const auto& dm = minus_.domain();
    domain_.source = {concat(dp.source.lo, dm.source.lo), concat(dp.source.hi, dm.source.hi)};
    domain_.target = {concat(dp.target.lo, dm.target.lo), concat(dp.target.hi, dm.target.hi)};
    domain_.cut_margin = std::min(dp.cut_margin, dm.cut_margin);
  }

  int dim() const override { return plus_.dim() + minus_.dim(); }
  std::string kind() const override { return "product(" + plus_.kind() + "," + minus_.kind() + ")"; }
  DerivativeMode mode() const override {
    return plus_.mode() == DerivativeMode::DualNumber && minus_.mode() == DerivativeMode::DualNumber
               ? DerivativeMode::DualNumber
               : DerivativeMode::FiniteDifference;
  }
  const DomainSpec& domain() const override { return domain_; }
  const CostChart& plus() const { return plus_; }
  const CostChart& minus() const { return minus_; }

  bool in_domain(const Point& x, const Point& xb) const override {
    return plus_.in_domain(head(x), head(xb)) && minus_.in_domain(tail(x), tail(xb));
  }

  double eval(const Point& x, const Point& xb) const override {
    return plus_.model().eval(head(x), head(xb)) + minus_.model().eval(tail(x), tail(xb));
  }

  double partial(const Point& x, const Point& xb, const MultiIndex& idx) const override {
    if (idx.order() == 0) return eval(x, xb);
    const int np = plus_.dim();
    bool any_plus = false, any_minus = false;
    for (int i : idx.unbarred) (i < np ? any_plus : any_minus) = true;
    for (int i : idx.barred) (i < np ? any_plus : any_minus) = true;
    if (any_plus && any_minus) return 0.0;
    if (any_plus) return plus_.model().partial(head(x), head(xb), idx);
    MultiIndex shifted = idx;
    for (int& i : shifted.unbarred) i -= np;
    for (int& i : shifted.barred) i -= np;
    return minus_.model().partial(tail(x), tail(xb), shifted);
  }

  CostJet jet(const Point& x, const Point& xb) const override {
    const int np = plus_.dim(), nm = minus_.dim(), n = np + nm;
    const CostJet jp = plus_.model().jet(head(x), head(xb));
    const CostJet jm = minus_.model().jet(tail(x), tail(xb));
    CostJet j(n);
    j.value = jp.value + jm.value;
    j.dx << jp.dx, jm.dx;
    j.dxb << jp.dxb, jm.dxb;
    j.dxx.topLeftCorner(np, np) = jp.dxx;
    j.dxx.bottomRightCorner(nm, nm) = jm.dxx;
    j.dxxb.topLeftCorner(np, np) = jp.dxxb;
    j.dxxb.bottomRightCorner(nm, nm) = jm.dxxb;
    j.dxbxb.topLeftCorner(np, np) = jp.dxbxb;
    j.dxbxb.bottomRightCorner(nm, nm) = jm.dxbxb;
    auto fill = [](CostJet& dst, const CostJet& src, int off) {
      const int m = src.dim();
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) {
            dst.xxxb(a + off, b + off, c + off) = src.xxxb(a, b, c);
            dst.xxbxb(a + off, b + off, c + off) = src.xxbxb(a, b, c);
            for (int d = 0; d < m; ++d) dst.xxxbxb(a + off, b + off, c + off, d + off) = src.xxxbxb(a, b, c, d);
          }
    };
    fill(j, jp, 0);
    fill(j, jm, np);
    return j;
  }

  double source_volume(const Point& x) const override {
    return plus_.source_volume(head(x)) * minus_.source_volume(tail(x));
  }

 private:
  static Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() + b.size());
    out << a, b;
    return out;
  }
  Point head(const Point& v) const { return v.head(plus_.dim()); }
  Point tail(const Point& v) const { return v.tail(minus_.dim()); }

  CostChart plus_;
  CostChart minus_;
  DomainSpec domain_;
};

inline CostChart make_product_cost(CostChart plus, CostChart minus) {
  return CostChart(std::make_shared<ProductModel>(std::move(plus), std::move(minus)));
}

// ---------------------------------------------------------------------------
// Convenience constructors with the default working domains.

inline CostChart euclid_quadratic(int n) {
  if (n < 1) throw InvalidSpec("euclid_quadratic: n must be >= 1");
  return make_dual_chart(EuclidQuadratic{n}, DomainSpec::unbounded(n));
}

inline CostChart log_euclid(int n, double cut_margin = 0.1) {
  if (n < 1) throw InvalidSpec("log_euclid: n must be >= 1");
  if (!(cut_margin > 0.0)) throw InvalidSpec("log_euclid: cut_margin must be > 0");
  return make_dual_chart(LogEuclid{n}, DomainSpec::unbounded(n, cut_margin));
}

inline DomainSpec sphere_default_domain(double theta_min = 0.15, double cut_margin = 0.1) {
  const double inf = std::numeric_limits<double>::infinity();
  Box box{Eigen::Vector2d(theta_min, -inf), Eigen::Vector2d(std::numbers::pi - theta_min, inf)};
  return {box, box, cut_margin};
}

inline CostChart sphere_squared(double theta_min = 0.15, double cut_margin = 0.1) {
  if (!(theta_min > 0.0) || theta_min >= std::numbers::pi / 2)
    throw InvalidSpec("sphere_squared: theta_min must lie in (0, pi/2)");
  if (!(cut_margin > 0.0)) throw InvalidSpec("sphere_squared: cut_margin must be > 0");
  return make_dual_chart(SphereSquared{theta_min}, sphere_default_domain(theta_min, cut_margin));
}

inline CostChart hyperbolic_squared(int n = 2, double radius_cap = 0.95) {
  if (n < 1) throw InvalidSpec("hyperbolic_squared: n must be >= 1");
  if (!(radius_cap > 0.0 && radius_cap < 1.0)) throw InvalidSpec("hyperbolic_squared: radius_cap must lie in (0, 1)");
  Box box{Eigen::VectorXd::Constant(n, -radius_cap), Eigen::VectorXd::Constant(n, radius_cap)};
  return make_dual_chart(HyperbolicSquared{n, radius_cap}, DomainSpec{box, box, 0.1});
}

inline CostChart one_dim_family(OneDimFamily family = {}, double box_half_width = 2.0) {
  if (family.sign != 1.0 && family.sign != -1.0) throw InvalidSpec("one_dim_family: sign must be +1 or -1");
  for (const auto& t : family.lambda)
    if (t.p < 0 || t.q < 0 || !std::isfinite(t.coeff)) throw InvalidSpec("one_dim_family: invalid lambda term");
  Box box{Eigen::VectorXd::Constant(1, -box_half_width), Eigen::VectorXd::Constant(1, box_half_width)};
  return make_dual_chart(std::move(family), DomainSpec{box, box, 0.1});
}

inline CostChart convex_boundary(Matrix A, Eigen::VectorXd a, Matrix B, Eigen::VectorXd b) {
  const auto n = a.size();
  if (n < 1) throw InvalidSpec("convex_boundary: n must be >= 1");
  if (A.rows() != n || A.cols() != n || B.rows() != n || B.cols() != n || b.size() != n)
    throw InvalidSpec("convex_boundary: inconsistent dimensions");
  if (!A.isApprox(A.transpose()) || !B.isApprox(B.transpose()))
    throw InvalidSpec("convex_boundary: Hessians must be symmetric");
  const int dim = static_cast<int>(n);
  return make_dual_chart(ConvexBoundary{std::move(A), std::move(a), std::move(B), std::move(b)},
                         DomainSpec::unbounded(dim));
}

/// Convex graphs f = g = |·|²/2 through the origin, i.e. A = B = I, a = b = 0.
inline CostChart convex_boundary(int n) {
  if (n < 1) throw InvalidSpec("convex_boundary: n must be >= 1");
  return convex_boundary(Matrix::Identity(n, n), Eigen::VectorXd::Zero(n), Matrix::Identity(n, n),
                         Eigen::VectorXd::Zero(n));
}

}  // namespace crosscurv
