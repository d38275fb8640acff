#pragma once

// JSON cost descriptions:
//   {"kind": "...", "n": 2, "params": {...}, "domain": {"box": [[lo, hi], ...], "cut_margin": 0.1}}
// "product" takes {"kind": "product", "factors": [spec, spec]}.
// Unknown keys are rejected. null bounds in a box mean unbounded.

#include <initializer_list>
#include <limits>
#include <set>
#include <string>

#include <json.hpp>

#include "crosscurv/costs.hpp"

namespace crosscurv {

using Json = nlohmann::json;

namespace detail {

inline void require_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidSpec(where + ": expected a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!ok.count(key)) throw InvalidSpec(where + ": unknown key '" + key + "'");
  }
}

inline double number_or(const Json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) throw InvalidSpec(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline Eigen::VectorXd vector_from(const Json& v, const std::string& where) {
  if (!v.is_array()) throw InvalidSpec(where + ": expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw InvalidSpec(where + ": expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

inline Matrix matrix_from(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw InvalidSpec(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  Matrix out(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    Eigen::VectorXd r = vector_from(v[static_cast<std::size_t>(i)], where);
    if (r.size() != rows) throw InvalidSpec(where + ": matrix must be square");
    out.row(i) = r.transpose();
  }
  return out;
}

inline Box box_from(const Json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw InvalidSpec(where + ": box must list one [lo, hi] pair per coordinate");
  Box b = Box::unbounded(n);
  for (int i = 0; i < n; ++i) {
    const Json& pair = v[static_cast<std::size_t>(i)];
    if (!pair.is_array() || pair.size() != 2) throw InvalidSpec(where + ": box entries must be [lo, hi]");
    if (!pair[0].is_null()) b.lo[i] = pair[0].get<double>();
    if (!pair[1].is_null()) b.hi[i] = pair[1].get<double>();
    if (!(b.lo[i] < b.hi[i])) throw InvalidSpec(where + ": empty box");
  }
  return b;
}

/// Intersect the chart's default domain with user-supplied boxes.
inline DomainSpec apply_domain(DomainSpec base, const Json& spec, int n, const std::string& where) {
  if (!spec.contains("domain")) return base;
  const Json& d = spec.at("domain");
  require_keys(d, {"box", "source_box", "target_box", "cut_margin"}, where + ".domain");
  auto intersect = [&](Box& into, const Json& v) {
    Box b = box_from(v, n, where + ".domain");
    into.lo = into.lo.cwiseMax(b.lo);
    into.hi = into.hi.cwiseMin(b.hi);
    for (int i = 0; i < n; ++i)
      if (!(into.lo[i] < into.hi[i])) throw InvalidSpec(where + ".domain: box does not meet the chart domain");
  };
  if (d.contains("box")) {
    intersect(base.source, d.at("box"));
    intersect(base.target, d.at("box"));
  }
  if (d.contains("source_box")) intersect(base.source, d.at("source_box"));
  if (d.contains("target_box")) intersect(base.target, d.at("target_box"));
  if (d.contains("cut_margin")) {
    base.cut_margin = number_or(d, "cut_margin", base.cut_margin, where + ".domain");
    if (!(base.cut_margin > 0.0)) throw InvalidSpec(where + ".domain: cut_margin must be > 0");
  }
  return base;
}

template <class Cost>
CostChart rebuild(const CostChart& chart, const Json& spec, int n, const std::string& where) {
  const auto& model = dynamic_cast<const DualNumberModel<Cost>&>(chart.model());
  return make_dual_chart(model.cost(), apply_domain(chart.domain(), spec, n, where));
}

inline int dimension_of(const Json& spec, int fallback, const std::string& where) {
  if (!spec.contains("n")) return fallback;
  const Json& v = spec.at("n");
  if (!v.is_number_integer()) throw InvalidSpec(where + ": 'n' must be an integer");
  const int n = v.get<int>();
  if (n < 1) throw InvalidSpec(where + ": 'n' must be >= 1");
  return n;
}

inline CostChart build_cost(const Json& spec, const std::string& where) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
    throw InvalidSpec(where + ": missing string field 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  const Json params = spec.value("params", Json::object());

  if (kind == "product") {
    require_keys(spec, {"kind", "factors"}, where);
    const Json& f = spec.at("factors");
    if (!f.is_array() || f.size() != 2) throw InvalidSpec(where + ": product needs exactly two factors");
    return make_product_cost(build_cost(f[0], where + ".factors[0]"), build_cost(f[1], where + ".factors[1]"));
  }

  require_keys(spec, {"kind", "n", "params", "domain"}, where);
  const std::string pw = where + ".params";

  if (kind == "euclid_quadratic") {
    require_keys(params, {}, pw);
    const int n = dimension_of(spec, 2, where);
    return rebuild<EuclidQuadratic>(euclid_quadratic(n), spec, n, where);
  }
  if (kind == "log_euclid") {
    require_keys(params, {}, pw);
    const int n = dimension_of(spec, 2, where);
    return rebuild<LogEuclid>(log_euclid(n), spec, n, where);
  }
  if (kind == "sphere_squared") {
    require_keys(params, {"theta_min"}, pw);
    const int n = dimension_of(spec, 2, where);
    if (n != 2) throw InvalidSpec(where + ": sphere_squared is only charted for n = 2");
    return rebuild<SphereSquared>(sphere_squared(number_or(params, "theta_min", 0.15, pw)), spec, n, where);
  }
  if (kind == "hyperbolic_squared") {
    require_keys(params, {"radius_cap"}, pw);
    const int n = dimension_of(spec, 2, where);
    return rebuild<HyperbolicSquared>(hyperbolic_squared(n, number_or(params, "radius_cap", 0.95, pw)), spec, n,
                                      where);
  }
  if (kind == "one_dim_family") {
    require_keys(params, {"lambda", "sign", "x0", "xb0"}, pw);
    const int n = dimension_of(spec, 1, where);
    if (n != 1) throw InvalidSpec(where + ": one_dim_family requires n = 1");
    OneDimFamily fam;
    fam.sign = number_or(params, "sign", -1.0, pw);
    fam.x0 = number_or(params, "x0", 0.0, pw);
    fam.xb0 = number_or(params, "xb0", 0.0, pw);
    if (params.contains("lambda")) {
      const Json& terms = params.at("lambda");
      if (!terms.is_array() || terms.empty())
        throw InvalidSpec(pw + ": 'lambda' must be a non-empty list of {p, q, coeff}");
      fam.lambda.clear();
      for (const Json& t : terms) {
        require_keys(t, {"p", "q", "coeff"}, pw + ".lambda");
        if (!t.contains("p") || !t.contains("q") || !t.contains("coeff"))
          throw InvalidSpec(pw + ".lambda: each term needs p, q and coeff");
        fam.lambda.push_back({t.at("p").get<int>(), t.at("q").get<int>(), t.at("coeff").get<double>()});
      }
    }
    return rebuild<OneDimFamily>(one_dim_family(fam), spec, n, where);
  }
  if (kind == "convex_boundary") {
    require_keys(params, {"A", "a", "B", "b"}, pw);
    const int n = dimension_of(spec, 2, where);
    Matrix A = params.contains("A") ? matrix_from(params.at("A"), pw + ".A") : Matrix::Identity(n, n);
    Matrix B = params.contains("B") ? matrix_from(params.at("B"), pw + ".B") : Matrix::Identity(n, n);
    Eigen::VectorXd a = params.contains("a") ? vector_from(params.at("a"), pw + ".a") : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd b = params.contains("b") ? vector_from(params.at("b"), pw + ".b") : Eigen::VectorXd::Zero(n);
    if (A.rows() != n || a.size() != n) throw InvalidSpec(pw + ": parameter sizes must match n");
    return rebuild<ConvexBoundary>(convex_boundary(A, a, B, b), spec, n, where);
  }
  throw InvalidSpec(where + ": unknown cost kind '" + kind + "'");
}

}  // namespace detail

/// Build a cost chart from its JSON description.
inline CostChart make_builtin_cost(const Json& spec, const std::string& where = "cost") {
  try {
    return detail::build_cost(spec, where);
  } catch (const Json::exception& e) {
    throw InvalidSpec(where + ": " + e.what());
  }
}

}  // namespace crosscurv
