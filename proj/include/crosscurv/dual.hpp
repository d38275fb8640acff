#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<...>> k times yields exact
// k-th order mixed partial derivatives: each level carries one seeded
// direction, and the all-infinitesimal component of the innermost value is
// the mixed derivative along the seeded directions.

#include <cmath>
#include <cstddef>
#include <type_traits>

namespace crosscurv {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit by design of scalar promotion
  constexpr Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

namespace detail {
template <std::size_t K> struct nest { using type = Dual<typename nest<K - 1>::type>; };
template <> struct nest<0> { using type = double; };
}  // namespace detail

/// Dual number nested K levels deep; Nested<0> is double.
template <std::size_t K>
using Nested = typename detail::nest<K>::type;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

// ---- arithmetic ----------------------------------------------------------

template <class T> Dual<T> operator+(const Dual<T>& a) { return a; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv = 1.0 / b.v;
  T q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) {
  T q = a / b.v;
  return {q, -q * b.d / b.v};
}

template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return value_of(a) < value_of(b); }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return value_of(a) > value_of(b); }
template <class T> bool operator<(const Dual<T>& a, double b) { return value_of(a) < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return value_of(a) > b; }

// ---- elementary functions (chain rule, recursive in T) -------------------

using std::acos;
using std::acosh;
using std::asin;
using std::asinh;
using std::atan;
using std::atan2;
using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tan;
using std::tanh;

template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -sin(a.v) * a.d}; }
template <class T> Dual<T> tan(const Dual<T>& a) {
  T t = tan(a.v);
  return {t, (1.0 + t * t) * a.d};
}
template <class T> Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> sinh(const Dual<T>& a) { return {sinh(a.v), cosh(a.v) * a.d}; }
template <class T> Dual<T> cosh(const Dual<T>& a) { return {cosh(a.v), sinh(a.v) * a.d}; }
template <class T> Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return {t, (1.0 - t * t) * a.d};
}
template <class T> Dual<T> asin(const Dual<T>& a) { return {asin(a.v), a.d / sqrt(1.0 - a.v * a.v)}; }
template <class T> Dual<T> acos(const Dual<T>& a) { return {acos(a.v), -a.d / sqrt(1.0 - a.v * a.v)}; }
template <class T> Dual<T> atan(const Dual<T>& a) { return {atan(a.v), a.d / (1.0 + a.v * a.v)}; }
template <class T> Dual<T> asinh(const Dual<T>& a) { return {asinh(a.v), a.d / sqrt(a.v * a.v + 1.0)}; }
template <class T> Dual<T> acosh(const Dual<T>& a) { return {acosh(a.v), a.d / sqrt(a.v * a.v - 1.0)}; }
template <class T> Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T r2 = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / r2};
}

/// Integer power by repeated squaring; exact for dual arithmetic.
template <class T>
T ipow(const T& base, int e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  T result = T(1.0);
  T b = base;
  while (e > 0) {
    if (e & 1) result = result * b;
    b = b * b;
    e >>= 1;
  }
  return result;
}

// ---- seeding and extraction ---------------------------------------------

namespace detail {
template <std::size_t K>
Nested<K> seeded(double value, std::size_t var, const std::size_t* dirs) {
  if constexpr (K == 0) {
    return value;
  } else {
    Nested<K - 1> d = (var == dirs[K - 1]) ? Nested<K - 1>(1.0) : Nested<K - 1>(0.0);
    return Nested<K>(seeded<K - 1>(value, var, dirs), d);
  }
}

template <std::size_t K>
double component_impl(const Nested<K>& x, unsigned mask) {
  if constexpr (K == 0) {
    return x;
  } else {
    return (mask >> (K - 1)) & 1u ? component_impl<K - 1>(x.d, mask) : component_impl<K - 1>(x.v, mask);
  }
}
}  // namespace detail

/// Variable `var` lifted to Nested<K>, with level L (1-based, innermost first)
/// seeded along coordinate dirs[L-1].
template <std::size_t K>
Nested<K> seed_variable(double value, std::size_t var, const std::size_t* dirs) {
  return detail::seeded<K>(value, var, dirs);
}

/// Component of a Nested<K> selected by a bit mask over levels: bit L-1 set
/// means "differentiated along dirs[L-1]". mask = 2^K - 1 gives the full
/// K-th mixed partial; mask = 0 gives the value.
template <std::size_t K>
double component(const Nested<K>& x, unsigned mask) {
  return detail::component_impl<K>(x, mask);
}

}  // namespace crosscurv
