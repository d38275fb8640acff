#pragma once

// Random samplers for the built-in charts, closed-form sphere helpers and
// g-orthonormal frames, shared by the test suites and the self-test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "crosscurv/costs.hpp"

namespace crosscurv::sampling {


struct NamedChart {
  std::string name;
  CostChart chart;
  // Draws an in-domain pair well away from the singular set.
  std::function<std::pair<Point, Point>(std::mt19937_64&)> sample;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Point uniform_point(std::mt19937_64& rng, int n, double lo, double hi) {
  Point p(n);
  for (int i = 0; i < n; ++i) p[i] = uniform(rng, lo, hi);
  return p;
}

inline Point unit_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Point p(n);
  do {
    for (int i = 0; i < n; ++i) p[i] = g(rng);
  } while (p.norm() < 1e-3);
  return p.normalized();
}

inline Point ball_point(std::mt19937_64& rng, int n, double radius) {
  Point p;
  do {
    p = uniform_point(rng, n, -radius, radius);
  } while (p.norm() > radius);
  return p;
}

inline NamedChart euclid_entry(int n = 2) {
  return {"euclid_quadratic", euclid_quadratic(n), [n](std::mt19937_64& r) {
            return std::make_pair(uniform_point(r, n, -1, 1), uniform_point(r, n, -1, 1));
          }};
}

inline NamedChart log_entry() {
  return {"log_euclid", log_euclid(2), [](std::mt19937_64& r) {
            Point x, xb;
            do {
              x = uniform_point(r, 2, -1, 1);
              xb = uniform_point(r, 2, -1, 1);
            } while ((x - xb).norm() < 0.4);
            return std::make_pair(x, xb);
          }};
}

inline Point sphere_point(std::mt19937_64& r) {
  Point p(2);
  p << uniform(r, 0.5, std::numbers::pi - 0.5), uniform(r, -1.0, 1.0);
  return p;
}

inline NamedChart sphere_entry() {
  return {"sphere_squared", sphere_squared(), [](std::mt19937_64& r) {
            Point x, xb;
            do {
              x = sphere_point(r);
              xb = sphere_point(r);
            } while (SphereSquared::distance(x, xb) > 2.4);
            return std::make_pair(x, xb);
          }};
}

inline NamedChart hyperbolic_entry() {
  return {"hyperbolic_squared", hyperbolic_squared(2), [](std::mt19937_64& r) {
            return std::make_pair(ball_point(r, 2, 0.6), ball_point(r, 2, 0.6));
          }};
}

inline NamedChart one_dim_entry() {
  return {"one_dim_family", one_dim_family(), [](std::mt19937_64& r) {
            return std::make_pair(uniform_point(r, 1, -1, 1), uniform_point(r, 1, -1, 1));
          }};
}

inline CostChart sample_convex_boundary() {
  Matrix A(2, 2), B(2, 2);
  A << 1.0, 0.2, 0.2, 2.0;
  B << 1.5, -0.1, -0.1, 0.5;
  Eigen::VectorXd a(2), b(2);
  a << 0.1, -0.2;
  b << 0.05, 0.1;
  return convex_boundary(A, a, B, b);
}

inline NamedChart convex_entry() {
  return {"convex_boundary", sample_convex_boundary(), [](std::mt19937_64& r) {
            return std::make_pair(uniform_point(r, 2, -0.3, 0.3), uniform_point(r, 2, -0.3, 0.3));
          }};
}

inline Point P(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

inline Eigen::Vector3d embed(const Point& x) {
  return {std::sin(x[0]) * std::cos(x[1]), std::sin(x[0]) * std::sin(x[1]), std::cos(x[0])};
}

// Great-circle exponential of the chart vector v at x, returned in the chart
// with φ unwrapped next to x[1].
inline Point sphere_exp(const Point& x, const Point& v) {
  const double th = x[0], ph = x[1];
  Eigen::Vector3d X = embed(x);
  Eigen::Vector3d et(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
  Eigen::Vector3d ep(-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0);
  Eigen::Vector3d v3 = v[0] * et + v[1] * ep;
  const double a = v3.norm();
  Eigen::Vector3d Y = a > 0 ? Eigen::Vector3d(std::cos(a) * X + std::sin(a) * v3 / a) : X;
  double phi = std::atan2(Y[1], Y[0]);
  while (phi - ph > std::numbers::pi) phi -= 2 * std::numbers::pi;
  while (phi - ph < -std::numbers::pi) phi += 2 * std::numbers::pi;
  return P({std::acos(std::clamp(Y[2], -1.0, 1.0)), phi});
}

// g-orthonormal pair (p, p̄) at a point of the round sphere chart.
inline std::pair<Point, Point> sphere_orthonormal(double theta, double alpha) {
  Point et = P({1, 0}), ep = P({0, 1.0 / std::sin(theta)});
  return {std::cos(alpha) * et + std::sin(alpha) * ep, -std::sin(alpha) * et + std::cos(alpha) * ep};
}

inline std::pair<Point, Point> hyperbolic_orthonormal(const Point& z, double alpha) {
  const double scale = (1.0 - z.squaredNorm()) / 2.0;
  return {scale * P({std::cos(alpha), std::sin(alpha)}), scale * P({-std::sin(alpha), std::cos(alpha)})};
}

inline std::vector<NamedChart> builtin_charts() {
  return {euclid_entry(), log_entry(), sphere_entry(), hyperbolic_entry(), one_dim_entry(), convex_entry()};
}

// A c-segment configuration at x on the sphere chart whose segment stays at
// least 0.4 away from the poles.
struct SphereSegment {
  Point x, xb0, xb1;
};

inline SphereSegment sphere_segment(std::mt19937_64& rng) {
  for (;;) {
    Point x = P({uniform(rng, 1.0, std::numbers::pi - 1.0), uniform(rng, -1, 1)});
    Point v0 = unit_vector(rng, 2) * uniform(rng, 0.2, 1.0);
    Point v1 = unit_vector(rng, 2) * uniform(rng, 0.2, 1.0);
    // The c-segment at x is the exponential of the chord from v0 to v1.
    bool inside = true;
    for (int j = 0; j <= 20; ++j) {
      const Point z = sphere_exp(x, v0 + (v1 - v0) * (j / 20.0));
      inside = inside && z[0] > 0.4 && z[0] < std::numbers::pi - 0.4;
    }
    if (inside) return {x, sphere_exp(x, v0), sphere_exp(x, v1)};
  }
}

/// g-orthonormal pair at angle alpha for g = −sym c_{ij̄}(x, x); throws when g is
/// not positive definite.
inline std::pair<Point, Point> diagonal_frame(const CostChart& chart, const Point& x, double alpha) {
  const Matrix H = chart.cross_matrix(x, x);
  const Matrix g = -0.5 * (H + H.transpose());
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success || g.rows() < 2)
    throw InvalidSpec("diagonal_frame: −c_{ij̄}(x, x) is not a positive definite metric of rank >= 2");
  const Matrix E = llt.matrixU().solve(Matrix::Identity(g.rows(), g.cols()));
  return {Point(std::cos(alpha) * E.col(0) + std::sin(alpha) * E.col(1)),
          Point(-std::sin(alpha) * E.col(0) + std::cos(alpha) * E.col(1))};
}

}  // namespace crosscurv::sampling
