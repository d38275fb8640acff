#pragma once

// Pseudo-Riemannian geometry induced by a cost at a base pair (x, x̄):
// the metric h, Christoffel symbols, the mixed Riemann tensor, cross-curvature,
// the MTW form and the symplectic form.
//
// Index conventions. H = c_{i j̄} with rows unbarred, columns barred, and
// Hinv = H⁻¹, so Hinv(k̄, m) H(m, l̄) = δ. The inverse pairing c^{k̄ m} is Hinv(k, m).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "crosscurv/cost.hpp"

namespace crosscurv {

inline constexpr double kDefaultConditionCap = 1e8;

struct CrossHessian {
  Matrix c;        // c_{i j̄}
  Matrix inverse;  // c^{j̄ i}: inverse(j, i)
  double condition = 1.0;
  double smallest_singular_value = 0.0;
};

/// c_{i j̄}, its inverse and 2-norm condition number. Throws NondegeneracyFailure
/// when the matrix is singular or its condition number exceeds `condition_cap`.
inline CrossHessian cross_hessian(const Matrix& c, double condition_cap = kDefaultConditionCap) {
  Eigen::JacobiSVD<Matrix> svd(c);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  const double smin = s.size() ? s[s.size() - 1] : 0.0;
  if (!(smin > 0.0) || !std::isfinite(smax))
    throw NondegeneracyFailure("cross Hessian c_{ij̄} is singular", smin);
  const double cond = smax / smin;
  if (cond > condition_cap)
    throw NondegeneracyFailure("cross Hessian c_{ij̄} condition number exceeds the cap", smin);
  return {c, c.inverse(), cond, smin};
}

inline CrossHessian cross_hessian(const CostChart& chart, const Point& x, const Point& xb,
                                  double condition_cap = kDefaultConditionCap) {
  return cross_hessian(chart.cross_matrix(x, xb), condition_cap);
}

struct PseudoMetricAtPoint {
  Point x;
  Point xb;
  Matrix h;  // 2n × 2n
};

/// h = ½ [[0, −H], [−Hᵀ, 0]] in the splitting T(M × M̄) = TM ⊕ TM̄.
inline Matrix pseudo_metric_matrix(const Matrix& H) {
  const auto n = H.rows();
  Matrix h = Matrix::Zero(2 * n, 2 * n);
  h.topRightCorner(n, n) = -0.5 * H;
  h.bottomLeftCorner(n, n) = -0.5 * H.transpose();
  return h;
}

inline PseudoMetricAtPoint assemble_pseudo_metric(const CostChart& chart, const Point& x, const Point& xb,
                                                  double condition_cap = kDefaultConditionCap) {
  const CrossHessian ch = cross_hessian(chart, x, xb, condition_cap);
  return {x, xb, pseudo_metric_matrix(ch.c)};
}

inline double h_inner(const CostChart& chart, const Point& x, const Point& xb, const Eigen::VectorXd& v1,
                      const Eigen::VectorXd& v2) {
  const int n = chart.dim();
  if (v1.size() != 2 * n || v2.size() != 2 * n) throw InvalidSpec("h_inner: vectors must have length 2n");
  const Matrix H = chart.cross_matrix(x, xb);
  return v1.dot(pseudo_metric_matrix(H) * v2);
}

/// p ⊕ p̄ is null iff |c_{ij̄} pⁱ p̄ʲ| ≤ tol |p| |p̄| ‖c_{ij̄}‖.
inline bool is_null(const CostChart& chart, const Point& x, const Point& xb, const Eigen::VectorXd& p,
                    const Eigen::VectorXd& pb, double tol = 1e-10) {
  const Matrix H = chart.cross_matrix(x, xb);
  const double norm = Eigen::JacobiSVD<Matrix>(H).singularValues()[0];
  return std::abs(p.dot(H * pb)) <= tol * p.norm() * pb.norm() * norm;
}

/// The two families of non-vanishing Christoffel symbols.
struct ChristoffelAtPoint {
  int n = 0;
  std::vector<double> gamma_u;  // Γ^m_{ij}, stored [m][i][j]
  std::vector<double> gamma_b;  // Γ^m̄_{īj̄}

  double unbarred(int m, int i, int j) const { return gamma_u[idx(m, i, j)]; }
  double barred(int m, int i, int j) const { return gamma_b[idx(m, i, j)]; }
  std::size_t idx(int m, int i, int j) const { return static_cast<std::size_t>((m * n + i) * n + j); }
};

/// Γ^m_{ij} = c^{m k̄} c_{k̄ i j},  Γ^m̄_{j̄k̄} = c^{m̄ i} c_{i j̄ k̄}.
inline ChristoffelAtPoint christoffel(const CostJet& jet, const CrossHessian& ch) {
  const int n = jet.dim();
  ChristoffelAtPoint g;
  g.n = n;
  g.gamma_u.assign(static_cast<std::size_t>(n * n * n), 0.0);
  g.gamma_b.assign(static_cast<std::size_t>(n * n * n), 0.0);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double u = 0.0, b = 0.0;
        for (int k = 0; k < n; ++k) {
          u += ch.inverse(k, m) * jet.xxxb(i, j, k);
          b += ch.inverse(m, k) * jet.xxbxb(k, i, j);
        }
        g.gamma_u[g.idx(m, i, j)] = u;
        g.gamma_b[g.idx(m, i, j)] = b;
      }
  return g;
}

inline ChristoffelAtPoint christoffel(const CostChart& chart, const Point& x, const Point& xb,
                                      double condition_cap = kDefaultConditionCap) {
  const CostJet jet = chart.jet(x, xb);
  return christoffel(jet, cross_hessian(jet.dxxb, condition_cap));
}

/// Mixed Riemann components R_{i j̄ k̄ ℓ}, the only independent family.
/// 2 R_{i j̄ k̄ ℓ} = c_{i j̄ k̄ ℓ} − c_{ℓ i f̄} c^{f̄ a} c_{a j̄ k̄}.
class MixedRiemann {
 public:
  MixedRiemann() = default;
  MixedRiemann(const CostJet& jet, const CrossHessian& ch) : n_(jet.dim()) {
    const int n = n_;
    r_.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
    // t(l, i, a) = Σ_f c_{l i f̄} c^{f̄ a}
    std::vector<double> t(static_cast<std::size_t>(n * n * n), 0.0);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a) {
          double s = 0.0;
          for (int f = 0; f < n; ++f) s += jet.xxxb(l, i, f) * ch.inverse(f, a);
          t[static_cast<std::size_t>((l * n + i) * n + a)] = s;
        }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = jet.xxxbxb(i, l, j, k);
            for (int a = 0; a < n; ++a) s -= t[static_cast<std::size_t>((l * n + i) * n + a)] * jet.xxbxb(a, j, k);
            at(i, j, k, l) = 0.5 * s;
          }
  }

  int dim() const { return n_; }
  /// R_{i j̄ k̄ ℓ}
  double operator()(int i, int j, int k, int l) const { return r_[idx(i, j, k, l)]; }

  /// R(P, Q, P, Q) for P = Pu ⊕ Pb, Q = Qu ⊕ Qb, summing the four non-zero
  /// index types obtained from R_{i j̄ k̄ ℓ} by the curvature symmetries.
  double contract(const Eigen::VectorXd& Pu, const Eigen::VectorXd& Pb, const Eigen::VectorXd& Qu,
                  const Eigen::VectorXd& Qb) const {
    const int n = n_;
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            const double w = -Pu[a] * Qb[b] * Pu[d] * Qb[c] + Pu[a] * Qb[b] * Pb[c] * Qu[d] +
                             Pb[b] * Qu[a] * Pu[d] * Qb[c] - Pb[b] * Qu[a] * Pb[c] * Qu[d];
            s += (*this)(a, b, c, d) * w;
          }
    return s;
  }

 private:
  double& at(int i, int j, int k, int l) { return r_[idx(i, j, k, l)]; }
  std::size_t idx(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
  }

  int n_ = 0;
  std::vector<double> r_;
};

/// Sectional-curvature normalization: sec(P ∧ Q) = kSectionalScale · R(P,Q,P,Q).
/// With this factor the cross-curvature equals −2 ∂⁴c/∂s²∂t² along a horizontal
/// and a vertical geodesic, and the round unit sphere gives 4/3 on the diagonal.
inline constexpr double kSectionalScale = 4.0;

/// Everything the curvature routines need at one base pair, computed once.
struct GeometryAt {
  Point x;
  Point xb;
  CostJet jet;
  CrossHessian hessian;
  MixedRiemann riemann;

  GeometryAt(const CostChart& chart, const Point& x_, const Point& xb_,
             double condition_cap = kDefaultConditionCap)
      : x(x_), xb(xb_), jet(chart.jet(x_, xb_)), hessian(cross_hessian(jet.dxxb, condition_cap)),
        riemann(jet, hessian) {}

  int dim() const { return jet.dim(); }

  /// Unnormalized cross-curvature sec((p ⊕ 0) ∧ (0 ⊕ p̄)).
  double cross_curvature(const Eigen::VectorXd& p, const Eigen::VectorXd& pb) const {
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(dim());
    return kSectionalScale * riemann.contract(p, z, z, pb);
  }

  double sectional(const Eigen::VectorXd& P, const Eigen::VectorXd& Q) const {
    const int n = dim();
    if (P.size() != 2 * n || Q.size() != 2 * n) throw InvalidSpec("sectional: vectors must have length 2n");
    return kSectionalScale * riemann.contract(P.head(n), P.tail(n), Q.head(n), Q.tail(n));
  }

  /// Σ (−c_{ijk̄ℓ̄} + c_{ijā} c^{āb} c_{k̄ℓ̄b}) c^{k̄e} c^{ℓ̄f} p_i p_j q_e q_f, computed
  /// directly from the cost derivatives.
  double mtw_form(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const {
    const int n = dim();
    const Eigen::VectorXd pb = hessian.inverse * q;  // p̄^k̄ = c^{k̄e} q_e
    // v_b = Σ_{i,j,a} c_{ijā} c^{āb} p_i p_j
    Eigen::VectorXd ta = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ta[a] += jet.xxxb(i, j, a) * p[i] * p[j];
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) v[b] += ta[a] * hessian.inverse(a, b);
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double fourth = 0.0, third = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) fourth += jet.xxxbxb(i, j, k, l) * p[i] * p[j];
        for (int b = 0; b < n; ++b) third += v[b] * jet.xxbxb(b, k, l);
        s += (-fourth + third) * pb[k] * pb[l];
      }
    return s;
  }
};

inline MixedRiemann mixed_riemann(const CostChart& chart, const Point& x, const Point& xb,
                                  double condition_cap = kDefaultConditionCap) {
  return GeometryAt(chart, x, xb, condition_cap).riemann;
}

inline double cross_curvature(const CostChart& chart, const Point& x, const Point& xb, const Eigen::VectorXd& p,
                              const Eigen::VectorXd& pb, double condition_cap = kDefaultConditionCap) {
  return GeometryAt(chart, x, xb, condition_cap).cross_curvature(p, pb);
}

inline double sectional_general(const CostChart& chart, const Point& x, const Point& xb, const Eigen::VectorXd& P,
                                const Eigen::VectorXd& Q, double condition_cap = kDefaultConditionCap) {
  return GeometryAt(chart, x, xb, condition_cap).sectional(P, Q);
}

inline double mtw_form(const CostChart& chart, const Point& x, const Point& xb, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& q, double condition_cap = kDefaultConditionCap) {
  return GeometryAt(chart, x, xb, condition_cap).mtw_form(p, q);
}

// ---------------------------------------------------------------------------
// Symplectic structure and graph diagnostics

struct SymplecticAtPoint {
  Point x;
  Point xb;
  Matrix omega;  // 2n × 2n, antisymmetric
};

/// ω = ½ [[0, H], [−Hᵀ, 0]].
inline Matrix symplectic_matrix(const Matrix& H) {
  const auto n = H.rows();
  Matrix w = Matrix::Zero(2 * n, 2 * n);
  w.topRightCorner(n, n) = 0.5 * H;
  w.bottomLeftCorner(n, n) = -0.5 * H.transpose();
  return w;
}

inline SymplecticAtPoint symplectic_form(const CostChart& chart, const Point& x, const Point& xb,
                                         double condition_cap = kDefaultConditionCap) {
  const CrossHessian ch = cross_hessian(chart, x, xb, condition_cap);
  return {x, xb, symplectic_matrix(ch.c)};
}

/// One sample of a map F: x ↦ F(x) with Jacobian DF(x).
struct MapSample {
  Point x;
  Point fx;
  Matrix jacobian;
};

struct GraphDiagnostics {
  double max_omega_defect = 0.0;  // max |ω((v,DFv),(w,DFw))| over coordinate pairs
  double min_h_value = std::numeric_limits<double>::infinity();  // min of h on unit graph tangents
  int accepted = 0;
  int rejected = 0;  // samples off the domain or with a non-finite Jacobian
};

/// Lagrangian and spacelike tests for the graph of F in (N, ω, h).
inline GraphDiagnostics graph_diagnostics(const CostChart& chart, const std::vector<MapSample>& samples,
                                          double condition_cap = kDefaultConditionCap) {
  const int n = chart.dim();
  GraphDiagnostics out;
  for (const MapSample& s : samples) {
    if (s.jacobian.rows() != n || s.jacobian.cols() != n || !s.jacobian.allFinite() ||
        !chart.in_domain(s.x, s.fx)) {
      ++out.rejected;
      continue;
    }
    const CrossHessian ch = cross_hessian(chart, s.x, s.fx, condition_cap);
    Matrix graph(2 * n, n);  // columns (e_a, DF e_a)
    graph.topRows(n) = Matrix::Identity(n, n);
    graph.bottomRows(n) = s.jacobian;
    const Matrix w = graph.transpose() * symplectic_matrix(ch.c) * graph;
    out.max_omega_defect = std::max(out.max_omega_defect, w.cwiseAbs().maxCoeff());
    Matrix g = graph.transpose() * pseudo_metric_matrix(ch.c) * graph;
    g = 0.5 * (g + g.transpose());
    const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues().minCoeff();
    out.min_h_value = std::min(out.min_h_value, lo);
    ++out.accepted;
  }
  return out;
}

}  // namespace crosscurv
