#pragma once

// Cost charts: a cost c(x, x̄) on a pair of coordinate charts together with
// an oracle for its mixed partial derivatives up to total order four and
// the predicate describing the working domain N.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "crosscurv/dual.hpp"
#include "crosscurv/errors.hpp"

namespace crosscurv {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMaxOrder = 4;

/// Index pattern of a mixed partial: derivatives in the unbarred (source)
/// coordinates and in the barred (target) coordinates, 0-based.
struct MultiIndex {
  std::vector<int> unbarred;
  std::vector<int> barred;

  int order() const { return static_cast<int>(unbarred.size() + barred.size()); }
};

enum class DerivativeMode { DualNumber, FiniteDifference };

inline const char* to_string(DerivativeMode m) {
  return m == DerivativeMode::DualNumber ? "dual-number" : "finite-difference";
}

/// Axis-aligned box; infinite bounds mean "unbounded along this axis".
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box unbounded(int n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
  }
  bool contains(const Point& p) const {
    if (p.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p[i]) || p[i] < lo[i] || p[i] > hi[i]) return false;
    }
    return true;
  }
  bool bounded() const { return lo.allFinite() && hi.allFinite(); }
};

struct DomainSpec {
  Box source;
  Box target;
  double cut_margin = 0.1;  // exclusion radius around the singular set

  static DomainSpec unbounded(int n, double cut = 0.1) { return {Box::unbounded(n), Box::unbounded(n), cut}; }
};

/// Sampled sup-norm bounds of c and its derivatives over a box.
struct NormHints {
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

/// All derivatives of c at (x, x̄) needed by the geometry: orders ≤ 2 in full,
/// the (2,1), (1,2) third-order patterns and the (2,2) fourth-order pattern.
class CostJet {
 public:
  explicit CostJet(int n = 0)
      : dx(Eigen::VectorXd::Zero(n)),
        dxb(Eigen::VectorXd::Zero(n)),
        dxx(Matrix::Zero(n, n)),
        dxxb(Matrix::Zero(n, n)),
        dxbxb(Matrix::Zero(n, n)),
        n_(n),
        xxxb_(static_cast<std::size_t>(n * n * n), 0.0),
        xxbxb_(static_cast<std::size_t>(n * n * n), 0.0),
        xxxbxb_(static_cast<std::size_t>(n * n * n * n), 0.0) {}

  int dim() const { return n_; }

  double value = 0.0;
  Eigen::VectorXd dx;   // c_i
  Eigen::VectorXd dxb;  // c_ī
  Matrix dxx;           // c_ij
  Matrix dxxb;          // c_{i j̄}, rows unbarred, columns barred
  Matrix dxbxb;         // c_{ī j̄}

  /// c_{i j k̄}
  double& xxxb(int i, int j, int k) { return xxxb_[idx3(i, j, k)]; }
  double xxxb(int i, int j, int k) const { return xxxb_[idx3(i, j, k)]; }
  /// c_{i j̄ k̄}
  double& xxbxb(int i, int j, int k) { return xxbxb_[idx3(i, j, k)]; }
  double xxbxb(int i, int j, int k) const { return xxbxb_[idx3(i, j, k)]; }
  /// c_{i j k̄ l̄}
  double& xxxbxb(int i, int j, int k, int l) { return xxxbxb_[idx4(i, j, k, l)]; }
  double xxxbxb(int i, int j, int k, int l) const { return xxxbxb_[idx4(i, j, k, l)]; }

 private:
  std::size_t idx3(int i, int j, int k) const { return static_cast<std::size_t>((i * n_ + j) * n_ + k); }
  std::size_t idx4(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
  }

  int n_;
  std::vector<double> xxxb_;
  std::vector<double> xxbxb_;
  std::vector<double> xxxbxb_;
};

/// Polymorphic cost implementation. Methods are unchecked; CostChart enforces
/// the domain predicate and the order limit before calling them.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  virtual DerivativeMode mode() const = 0;
  virtual const DomainSpec& domain() const = 0;
  virtual bool in_domain(const Point& x, const Point& xb) const = 0;
  virtual double eval(const Point& x, const Point& xb) const = 0;
  virtual double partial(const Point& x, const Point& xb, const MultiIndex& idx) const = 0;

  /// Density of the source-side reference volume in chart coordinates
  /// (sin θ on the sphere, 4/(1-|z|²)² on the Poincaré disk).
  virtual double source_volume(const Point&) const { return 1.0; }

  virtual CostJet jet(const Point& x, const Point& xb) const {
    const int n = dim();
    CostJet j(n);
    j.value = eval(x, xb);
    for (int a = 0; a < n; ++a) {
      j.dx[a] = partial(x, xb, {{a}, {}});
      j.dxb[a] = partial(x, xb, {{}, {a}});
      for (int b = 0; b < n; ++b) {
        j.dxx(a, b) = partial(x, xb, {{a, b}, {}});
        j.dxxb(a, b) = partial(x, xb, {{a}, {b}});
        j.dxbxb(a, b) = partial(x, xb, {{}, {a, b}});
        for (int c = 0; c < n; ++c) {
          j.xxxb(a, b, c) = partial(x, xb, {{a, b}, {c}});
          j.xxbxb(a, b, c) = partial(x, xb, {{a}, {b, c}});
          for (int d = 0; d < n; ++d) j.xxxbxb(a, b, c, d) = partial(x, xb, {{a, b}, {c, d}});
        }
      }
    }
    return j;
  }
};

/// Value-semantic handle to an immutable cost model. Safe to share across
/// threads: every method is const and the model holds no mutable state.
class CostChart {
 public:
  CostChart() = default;
  explicit CostChart(std::shared_ptr<const CostModel> model) : model_(std::move(model)) {}

  int dim() const { return model_->dim(); }
  std::string kind() const { return model_->kind(); }
  DerivativeMode mode() const { return model_->mode(); }
  const DomainSpec& domain() const { return model_->domain(); }
  const CostModel& model() const { return *model_; }
  const std::shared_ptr<const CostModel>& model_ptr() const { return model_; }

  bool in_domain(const Point& x, const Point& xb) const {
    return x.size() == dim() && xb.size() == dim() && model_->in_domain(x, xb);
  }

  double eval(const Point& x, const Point& xb) const {
    require_domain(x, xb);
    return model_->eval(x, xb);
  }

  double mixed_partial(const Point& x, const Point& xb, const MultiIndex& idx) const {
    if (idx.order() > kMaxOrder) throw InvalidSpec("mixed partial of order > 4 requested");
    for (int i : idx.unbarred)
      if (i < 0 || i >= dim()) throw InvalidSpec("multi-index entry out of range");
    for (int i : idx.barred)
      if (i < 0 || i >= dim()) throw InvalidSpec("multi-index entry out of range");
    require_domain(x, xb);
    return model_->partial(x, xb, idx);
  }

  CostJet jet(const Point& x, const Point& xb) const {
    require_domain(x, xb);
    return model_->jet(x, xb);
  }

  /// Gradient in x (D c) and in x̄ (D̄ c).
  Eigen::VectorXd grad_x(const Point& x, const Point& xb) const {
    require_domain(x, xb);
    Eigen::VectorXd g(dim());
    for (int i = 0; i < dim(); ++i) g[i] = model_->partial(x, xb, {{i}, {}});
    return g;
  }
  Eigen::VectorXd grad_xb(const Point& x, const Point& xb) const {
    require_domain(x, xb);
    Eigen::VectorXd g(dim());
    for (int i = 0; i < dim(); ++i) g[i] = model_->partial(x, xb, {{}, {i}});
    return g;
  }
  /// c_{i j̄}, rows unbarred.
  Matrix cross_matrix(const Point& x, const Point& xb) const {
    require_domain(x, xb);
    Matrix h(dim(), dim());
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) h(i, j) = model_->partial(x, xb, {{i}, {j}});
    return h;
  }

  double source_volume(const Point& x) const { return model_->source_volume(x); }

  const std::optional<NormHints>& norm_hints() const { return hints_; }
  CostChart with_norm_hints(NormHints h) const {
    CostChart c = *this;
    c.hints_ = h;
    return c;
  }

 private:
  void require_domain(const Point& x, const Point& xb) const {
    if (!in_domain(x, xb)) throw DomainError("evaluation outside the domain of cost '" + kind() + "'");
  }

  std::shared_ptr<const CostModel> model_;
  std::optional<NormHints> hints_;
};

// ---------------------------------------------------------------------------
// Dual-number backed models

/// A cost functor usable with DualNumberModel provides
///   int dim() const;
///   std::string kind() const;
///   template <class T> T operator()(std::span<const T> x, std::span<const T> xb) const;
///   bool admissible(const Point& x, const Point& xb, const DomainSpec&) const;
/// and optionally double source_volume(const Point&) const.
template <class Cost>
class DualNumberModel final : public CostModel {
 public:
  DualNumberModel(Cost cost, DomainSpec domain) : cost_(std::move(cost)), domain_(std::move(domain)) {}

  int dim() const override { return cost_.dim(); }
  std::string kind() const override { return cost_.kind(); }
  DerivativeMode mode() const override { return DerivativeMode::DualNumber; }
  const DomainSpec& domain() const override { return domain_; }
  const Cost& cost() const { return cost_; }

  bool in_domain(const Point& x, const Point& xb) const override {
    return domain_.source.contains(x) && domain_.target.contains(xb) && cost_.admissible(x, xb, domain_);
  }

  double eval(const Point& x, const Point& xb) const override {
    return cost_(std::span<const double>(x.data(), x.size()), std::span<const double>(xb.data(), xb.size()));
  }

  double partial(const Point& x, const Point& xb, const MultiIndex& idx) const override {
    const int n = dim();
    std::array<std::size_t, kMaxOrder> dirs{};
    std::size_t k = 0;
    for (int i : idx.unbarred) dirs[k++] = static_cast<std::size_t>(i);
    for (int i : idx.barred) dirs[k++] = static_cast<std::size_t>(n + i);
    switch (k) {
      case 0: return eval(x, xb);
      case 1: return component<1>(evaluate<1>(x, xb, dirs.data()), 0x1u);
      case 2: return component<2>(evaluate<2>(x, xb, dirs.data()), 0x3u);
      case 3: return component<3>(evaluate<3>(x, xb, dirs.data()), 0x7u);
      default: return component<4>(evaluate<4>(x, xb, dirs.data()), 0xFu);
    }
  }

  // One fourth-level evaluation seeded along (i, j, k̄, l̄) yields all 16
  // sub-derivatives; looping over i ≤ j, k ≤ l fills the whole jet.
  CostJet jet(const Point& x, const Point& xb) const override {
    const int n = dim();
    CostJet jt(n);
    constexpr unsigned I = 1u, J = 2u, K = 4u, L = 8u;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (int l = k; l < n; ++l) {
            const std::array<std::size_t, 4> dirs{static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                                  static_cast<std::size_t>(n + k), static_cast<std::size_t>(n + l)};
            const Nested<4> r = evaluate<4>(x, xb, dirs.data());
            const double v4 = component<4>(r, I | J | K | L);
            jt.xxxbxb(i, j, k, l) = jt.xxxbxb(j, i, k, l) = jt.xxxbxb(i, j, l, k) = jt.xxxbxb(j, i, l, k) = v4;
            const double ijk = component<4>(r, I | J | K);
            jt.xxxb(i, j, k) = jt.xxxb(j, i, k) = ijk;
            const double ikl = component<4>(r, I | K | L);
            jt.xxbxb(i, k, l) = jt.xxbxb(i, l, k) = ikl;
            if (i == 0 && j == 0) {
              // only depends on (k, l); fill once
              jt.dxbxb(k, l) = jt.dxbxb(l, k) = component<4>(r, K | L);
            }
            if (k == 0 && l == 0) {
              jt.dxx(i, j) = jt.dxx(j, i) = component<4>(r, I | J);
            }
            if (j == i && l == k) {
              jt.dxxb(i, k) = component<4>(r, I | K);
            }
            if (i == 0 && j == 0 && k == 0 && l == 0) jt.value = component<4>(r, 0u);
            if (j == i && k == 0 && l == 0) jt.dx[i] = component<4>(r, I);
            if (i == 0 && j == 0 && l == k) jt.dxb[k] = component<4>(r, K);
          }
        }
      }
    }
    return jt;
  }

  double source_volume(const Point& x) const override {
    if constexpr (requires { cost_.source_volume(x); }) {
      return cost_.source_volume(x);
    } else {
      return 1.0;
    }
  }

 private:
  template <std::size_t K>
  Nested<K> evaluate(const Point& x, const Point& xb, const std::size_t* dirs) const {
    const int n = dim();
    std::vector<Nested<K>> zx(static_cast<std::size_t>(n)), zxb(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      zx[static_cast<std::size_t>(i)] = seed_variable<K>(x[i], static_cast<std::size_t>(i), dirs);
      zxb[static_cast<std::size_t>(i)] = seed_variable<K>(xb[i], static_cast<std::size_t>(n + i), dirs);
    }
    return cost_(std::span<const Nested<K>>(zx), std::span<const Nested<K>>(zxb));
  }

  Cost cost_;
  DomainSpec domain_;
};

template <class Cost>
CostChart make_dual_chart(Cost cost, DomainSpec domain) {
  if (cost.dim() < 1) throw InvalidSpec("cost dimension must be >= 1");
  return CostChart(std::make_shared<DualNumberModel<Cost>>(std::move(cost), std::move(domain)));
}

}  // namespace crosscurv
