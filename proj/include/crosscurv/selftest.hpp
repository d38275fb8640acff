#pragma once

// The acceptance suite: fifteen end-to-end checks, each reporting pass/fail
// with the measured quantities. Used by `crosscurv selftest` and the
// acceptance binary.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "crosscurv/cli.hpp"
#include "crosscurv/envelopes.hpp"
#include "crosscurv/geodesics.hpp"
#include "crosscurv/geometry.hpp"
#include "crosscurv/regularity.hpp"
#include "crosscurv/report_io.hpp"
#include "crosscurv/sampling.hpp"
#include "crosscurv/semidiscrete.hpp"

namespace crosscurv::selftest {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  std::filesystem::path fixture_dir;
  int workers = 1;
};

namespace detail {

using namespace crosscurv::sampling;

inline std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Outcome {
  bool passed;
  std::string detail;
};

inline Outcome flat_nullity() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + k % 2;
    const auto chart = euclid_quadratic(n);
    const Point x = uniform_point(rng, n, -1, 1), xb = uniform_point(rng, n, -1, 1);
    const Point p = unit_vector(rng, n), pb = unit_vector(rng, n), q = unit_vector(rng, n);
    const GeometryAt geo(chart, x, xb);
    worst = std::max({worst, std::abs(geo.cross_curvature(p, pb)), std::abs(geo.mtw_form(p, q))});
    const auto gamma = christoffel(geo.jet, geo.hessian);
    for (double v : gamma.gamma_u) worst = std::max(worst, std::abs(v));
    for (double v : gamma.gamma_b) worst = std::max(worst, std::abs(v));
  }
  return {worst <= 1e-10, fmt("max |cross|, |mtw|, |Gamma| = %.3g over 1000 samples", worst)};
}

inline Outcome diagonal_constant(const CostChart& chart, double expected, double tol,
                                 const std::function<std::pair<Point, std::pair<Point, Point>>(std::mt19937_64&)>& draw,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double err = 0.0, fd_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto [x, frame] = draw(rng);
    const double v = cross_curvature(chart, x, x, frame.first, frame.second);
    err = std::max(err, std::abs(v - expected));
    fd_err = std::max(fd_err, std::abs(cross_curvature_via_fd(chart, x, x, frame.first, frame.second) - v));
  }
  return {err <= tol && fd_err <= 1e-3,
          fmt2("max |cross - expected| = %.3g, max |fd - analytic| = %.3g", err, fd_err)};
}

inline Outcome sphere_diagonal() {
  return diagonal_constant(sphere_squared(), 4.0 / 3.0, 1e-6,
                           [](std::mt19937_64& r) {
                             const Point x = sphere_point(r);
                             return std::make_pair(x, sphere_orthonormal(x[0], uniform(r, 0, 2 * std::numbers::pi)));
                           },
                           102);
}

inline Outcome hyperbolic_diagonal() {
  const auto chart = hyperbolic_squared(2);
  auto o = diagonal_constant(chart, -4.0 / 3.0, 1e-3,
                             [](std::mt19937_64& r) {
                               const Point z = ball_point(r, 2, 0.8);
                               return std::make_pair(z, hyperbolic_orthonormal(z, uniform(r, 0, 2 * std::numbers::pi)));
                             },
                             103);
  const Box box{P({-0.5, -0.5}), P({0.5, 0.5})};
  const auto rep = classify_regularity(chart, {box, box, 0.1}, 4, 8, 1e-8, 0);
  const bool witness = rep.witness.x.size() == 2 && rep.witness.normalized < 0.0;
  o.passed = o.passed && rep.classification == Regularity::Violated && witness;
  o.detail += "; classification " + std::string(to_string(rep.classification)) +
              fmt(", witness normalized cross-curvature %.4g", rep.witness.normalized);
  return o;
}

inline Outcome reflector_identity() {
  const auto chart = log_euclid(2);
  std::mt19937_64 rng(104);
  double err = 0.0, exp_err = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Point x = uniform_point(rng, 2, -1, 1);
    const Point p = uniform_point(rng, 2, -1, 1);
    const Point q = unit_vector(rng, 2) * uniform(rng, 0.5, 3.0);
    const Point xb = x - q / q.squaredNorm();
    const Matrix cxx = chart.jet(x, xb).dxx;
    const double lhs = p.dot(cxx * p);
    const double rhs = 2.0 * std::pow(q.dot(p), 2) - p.squaredNorm() * q.squaredNorm();
    err = std::max(err, std::abs(lhs - rhs));
    if (k < 100) {
      const Point guess = xb + 0.05 * unit_vector(rng, 2) / q.norm();
      exp_err = std::max(exp_err, (c_exp(chart, x, q, guess) - xb).norm());
    }
  }
  return {err <= 1e-9 && exp_err <= 1e-8,
          fmt2("max identity error %.3g over 500 samples, max |Newton - closed form| %.3g", err, exp_err)};
}

inline Outcome kappa_consistency() {
  const auto od = one_dim_family();
  const GeometryAt o(od, P({0}), P({0}));
  const double kappa = o.mtw_form(P({1}), P({1})) / o.cross_curvature(P({1}), o.hessian.inverse * P({1}));
  std::mt19937_64 rng(105);
  const auto charts = builtin_charts();
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto& e = charts[static_cast<std::size_t>(k) % charts.size()];
    const auto [x, xb] = e.sample(rng);
    const int n = e.chart.dim();
    const GeometryAt geo(e.chart, x, xb);
    const Point p = unit_vector(rng, n), q = unit_vector(rng, n);
    const double cross = geo.cross_curvature(p, geo.hessian.inverse * q);
    const double mtw = geo.mtw_form(p, q);
    worst = std::max(worst, std::abs(mtw - kappa * cross) / std::max(1.0, std::abs(mtw)));
  }
  return {std::abs(kappa - 0.5) <= 1e-12 && worst <= 1e-8,
          fmt2("kappa = %.15g, max relative mismatch %.3g over 200 configurations", kappa, worst)};
}

inline Outcome geodesic_residuals() {
  struct Case {
    CostChart chart;
    Point x, a, b;
  };
  const std::vector<Case> cases = {{sphere_squared(), P({1.2, 0.1}), P({1.6, 0.4}), P({1.0, 1.0})},
                                   {log_euclid(2), P({0, 0}), P({1.5, 0}), P({1.3, 0.6})}};
  bool ok = true;
  std::string detail;
  for (const auto& cs : cases) {
    const double r65 = geodesic_residual(cs.chart, c_segment(cs.chart, cs.x, cs.a, cs.b, 65));
    const double r129 = geodesic_residual(cs.chart, c_segment(cs.chart, cs.x, cs.a, cs.b, 129));
    ok = ok && r65 <= 1e-4 && r65 / r129 > 3.0 && r65 / r129 < 5.0;
    detail += (detail.empty() ? "" : "; ") + cs.chart.kind() + fmt2(" r65 = %.3g, r65/r129 = %.3f", r65, r65 / r129);
  }
  return {ok, detail};
}

inline Outcome maximum_principle(const std::filesystem::path& fixture_dir) {
  const auto chart = sphere_squared();
  std::mt19937_64 rng(106);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    const auto s = sphere_segment(rng);
    const auto r = sliding_mountain_check(chart, s.x, s.xb0, s.xb1, ball_lattice(s.x, 0.5, 7), 33, 1e-8);
    worst = std::max(worst, r.max_violation);
  }
  const auto found = search_mountain_violation(hyperbolic_squared(2), ViolationSearchConfig{});
  bool fixture_ok = false;
  std::string fixture_note;
  try {
    const auto path = fixture_dir / "hyperbolic_mountain_witness.json";
    std::ifstream in(path);
    if (!in) throw InvalidSpec("fixture not readable: " + path.string());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw InvalidSpec(std::string("fixture is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("witness")) throw InvalidSpec("fixture has no 'witness'");
    const auto stored = witness_from_json(j.at("witness"));
    fixture_ok = dump_json(to_json(stored)) == dump_json(to_json(found));
    fixture_note = fixture_ok ? "matches fixture" : "differs from fixture";
  } catch (const Error& e) {
    fixture_note = e.what();
  }
  return {worst <= 1e-8 && found.violation >= 1e-4 && fixture_ok,
          fmt2("sphere max violation %.3g over 50 configurations; hyperbolic search violation %.6g, ", worst,
               found.violation) +
              fixture_note};
}

inline Outcome contact_connectivity() {
  const auto chart = sphere_squared();
  std::mt19937_64 rng(107);
  double worst = -std::numeric_limits<double>::infinity();
  bool all = true;
  for (int k = 0; k < 20; ++k) {
    const auto s = sphere_segment(rng);
    const auto r = contact_connectivity_check(chart, s.x, s.xb0, s.xb1, ball_lattice(s.x, 0.5, 7), 33, 1e-8);
    worst = std::max(worst, r.max_deficit);
    all = all && r.passed;
  }
  return {all && worst <= 1e-8, fmt("max deficit %.3g over 20 configurations", worst)};
}

inline Outcome local_estimate() {
  const auto sphere = sphere_squared();
  const Box sb{P({1.4, -0.2}), P({1.8, 0.2})};
  const auto ks = estimate_constants(sphere, {sb, sb, 0.1}, 4, 8);
  const auto rs = local_estimate_check(sphere, P({1.6, 0}), P({1.45, -0.15}), P({1.75, 0.15}), ks, 0.05, 33, 9);
  const auto lg = log_euclid(2);
  const DomainSpec lb{{P({-0.3, -0.3}), P({0.3, 0.3})}, {P({1.2, -0.3}), P({1.8, 0.3})}, 0.1};
  const auto kl = estimate_constants(lg, lb, 4, 4);
  const auto rl = local_estimate_check(lg, P({0, 0}), P({1.3, -0.2}), P({1.7, 0.2}), kl, 0.05, 33, 9);
  const bool ok = rs.max_deficit <= 1e-6 && rl.max_deficit <= 1e-6 && rs.evaluated > 0 && rl.evaluated > 0;
  char buf[256];
  std::snprintf(buf, sizeof buf, "sphere C0 = %.4g, C1 = %.4g, deficit %.3g; log_euclid C0 = %.4g, C1 = %.4g, deficit %.3g",
                ks.C0, ks.C1, rs.max_deficit, kl.C0, kl.C1, rl.max_deficit);
  return {ok, buf};
}

inline Outcome law_of_cosines() {
  const double right = std::numbers::pi / 2;
  const double ks = law_of_cosines_fit(sphere_squared(), P({1.2, 0.2}), right, 0.2, 9).k;
  const double kf = law_of_cosines_fit(euclid_quadratic(2), P({0.1, 0.05}), right, 0.2, 9).k;
  const double kh = law_of_cosines_fit(hyperbolic_squared(2), P({0.1, 0.05}), right, 0.2, 9).k;
  char buf[160];
  std::snprintf(buf, sizeof buf, "k sphere = %.6f, flat = %.3g, hyperbolic = %.6f", ks, kf, kh);
  return {std::abs(ks - 1.0) <= 5e-2 && std::abs(kf) <= 1e-6 && std::abs(kh + 1.0) <= 5e-2, buf};
}

inline Outcome figure1(int workers) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"figure1-plane", "figure1-sphere", "figure1-hyperbolic"}) {
    const auto [command, cfg] = cli::preset(name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = cli::run_command(command, cfg, {std::nullopt, workers});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Json r = Json::parse(out.files.at("semidiscrete.json"));
    const auto masses = r.at("solution").at("masses").get<std::vector<double>>();
    const int middle = r.at("components").at(1).get<int>();
    double err = 0.0;
    for (double m : masses) err = std::max(err, std::abs(m - 1.0 / 3.0));
    const bool hyper = std::string(name) == "figure1-hyperbolic";
    ok = ok && out.exit_code == 0 && err <= 1e-3 && (hyper ? middle >= 2 : middle == 1) && secs < 60.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s: mass error %.2g, middle components %d, %.1f s", detail.empty() ? "" : "; ",
                  name + 8, err, middle, secs);
    detail += buf;
  }
  return {ok, detail};
}

inline Outcome duality() {
  std::mt19937_64 rng(112);
  double worst = 0.0;
  std::string detail;
  for (const auto& e : builtin_charts()) {
    std::vector<Point> src, tgt;
    for (int k = 0; k < 300; ++k) {
      const auto [x, xb] = e.sample(rng);
      src.push_back(x);
      if (k < 40) tgt.push_back(xb);
    }
    Envelope E;
    for (int i = 0; i < 3; ++i) E.mountains.push_back({tgt[static_cast<std::size_t>(i)], uniform(rng, -0.1, 0.1)});
    // Keep only source points where some mountain is admissible.
    std::vector<Point> grid;
    for (const auto& x : src)
      if (E.argmax(e.chart, x) >= 0) grid.push_back(x);
    const double gap = duality_check(e.chart, E, grid, tgt);
    worst = std::max(worst, gap);
  }
  return {worst <= 1e-9, fmt("max gap %.3g over the six built-in costs", worst)};
}

inline Outcome product_laws() {
  const auto cp = sphere_squared();
  const auto cm = one_dim_family();
  const auto prod = make_product_cost(cp, cm);
  std::mt19937_64 rng(113);
  const auto se = sphere_entry();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto [xp, xbp] = se.sample(rng);
    const Point xm = uniform_point(rng, 1, -1, 1), xbm = uniform_point(rng, 1, -1, 1);
    const Point pp = unit_vector(rng, 2), pbp = unit_vector(rng, 2), pm = unit_vector(rng, 1),
                pbm = unit_vector(rng, 1);
    Point x(3), xb(3), p(3), pb(3);
    x << xp, xm;
    xb << xbp, xbm;
    p << pp, pm;
    pb << pbp, pbm;
    const double lhs = cross_curvature(prod, x, xb, p, pb);
    const double rhs = cross_curvature(cp, xp, xbp, pp, pbp) + cross_curvature(cm, xm, xbm, pm, pbm);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  const auto ss = make_product_cost(sphere_squared(), sphere_squared());
  const Point x = P({1.0, 0.2, 1.4, -0.3}), xb = P({1.3, 0.5, 1.2, 0.1});
  const Point p = P({0.7, -0.4, 0, 0}), pb = P({0, 0, 0.3, 0.9});
  const bool null = is_null(ss, x, xb, p, pb, 1e-14);
  const double zero = cross_curvature(ss, x, xb, p, pb);
  return {worst <= 1e-10 && null && zero == 0.0,
          fmt2("max additivity error %.3g; split null witness cross-curvature %.3g", worst, zero)};
}

inline Outcome symplectic() {
  const auto chart = euclid_quadratic(2);
  std::mt19937_64 rng(114);
  Matrix B(2, 2);
  B << uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1);
  const Matrix A = B * B.transpose() + 0.5 * Matrix::Identity(2, 2);  // u = xᵀAx/2, convex
  std::vector<MapSample> samples;
  for (int k = 0; k < 50; ++k) {
    const Point x = uniform_point(rng, 2, -1, 1);
    samples.push_back({x, Point(x + A * x), Matrix(Matrix::Identity(2, 2) + A)});
  }
  const auto d = graph_diagnostics(chart, samples);
  return {d.accepted == 50 && d.max_omega_defect <= 1e-10 && d.min_h_value > 1e-10,
          fmt2("max omega defect %.3g, min h %.4g", d.max_omega_defect, d.min_h_value)};
}

inline Outcome determinism() {
  auto [command, cfg] = cli::preset("figure1-hyperbolic");
  cfg["diagnostics"] = {{"holder_pairs", 2000}};
  const auto a = cli::run_command(command, cfg, {7, 1});
  const auto b = cli::run_command(command, cfg, {7, 8});
  bool same = a.files == b.files;
  std::size_t bytes = 0;
  for (const auto& [k, v] : a.files) bytes += v.size();
  return {same, std::string(same ? "identical" : "different") + " reports for 1 and 8 workers (" +
                    std::to_string(bytes) + " bytes)"};
}

}  // namespace detail

inline std::vector<CheckResult> run_suite(const SuiteOptions& opt) {
  using Fn = std::function<detail::Outcome()>;
  const std::vector<std::pair<std::string, Fn>> checks = {
      {"flat-cost nullity", detail::flat_nullity},
      {"sphere diagonal constant 4/3", detail::sphere_diagonal},
      {"hyperbolic diagonal constant -4/3 and violated classification", detail::hyperbolic_diagonal},
      {"reflector identity and closed-form c-exponential", detail::reflector_identity},
      {"MTW/cross-curvature constant", detail::kappa_consistency},
      {"c-segment geodesic residuals", detail::geodesic_residuals},
      {"maximum principle and hyperbolic witness", [&] { return detail::maximum_principle(opt.fixture_dir); }},
      {"contact-set connectivity", detail::contact_connectivity},
      {"local double-mountain estimate", detail::local_estimate},
      {"law of cosines curvature", detail::law_of_cosines},
      {"three-target semidiscrete partitions", [&] { return detail::figure1(opt.workers); }},
      {"c-transform duality", detail::duality},
      {"product cost laws", detail::product_laws},
      {"symplectic and spacelike graph diagnostics", detail::symplectic},
      {"worker-count determinism", detail::determinism},
  };
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    CheckResult r;
    r.id = static_cast<int>(i + 1);
    r.name = checks[i].first;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto o = checks[i].second();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(r);
  }
  return out;
}

inline std::string format_line(const CheckResult& r) {
  char head[128];
  std::snprintf(head, sizeof head, "%s %2d %s (%.2f s): ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
  return head + r.detail;
}

}  // namespace crosscurv::selftest
