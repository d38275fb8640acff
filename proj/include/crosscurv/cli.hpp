#pragma once

// Command implementations behind the crosscurv executable. Each command takes
// a validated JSON config and returns its report files in memory together with
// the process exit code; the executable writes the files atomically.
//
// Exit codes: curvature 0 = A3s, 1 = A3w, 2 = violated; mountaincheck 0 = pass,
// 2 = violation; semidiscrete 0 = converged, 2 = flagged (iteration cap or an
// empty region). 3 = runtime failure, 4 = usage or config error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crosscurv/cost_spec.hpp"
#include "crosscurv/geometry.hpp"
#include "crosscurv/regularity.hpp"
#include "crosscurv/report_io.hpp"
#include "crosscurv/sampling.hpp"
#include "crosscurv/semidiscrete.hpp"

namespace crosscurv::cli {

inline constexpr int kExitRuntime = 3;
inline constexpr int kExitUsage = 4;

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  int workers = 1;
};

struct CommandOutput {
  int exit_code = 0;
  std::map<std::string, std::string> files;  // file name → content
  std::string summary;
};

inline Json parse_config_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidSpec(where + ": not valid JSON: " + e.what());
  }
}

inline Json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("config file not readable: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

inline void write_outputs(const std::filesystem::path& dir, const CommandOutput& out) {
  for (const auto& [name, content] : out.files) write_atomic(dir / name, content);
}

namespace detail {

using crosscurv::detail::require_keys;

inline int int_or(const Json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) throw InvalidSpec(where + ": '" + key + "' must be an integer");
  return v.get<int>();
}

inline double num_or(const Json& obj, const char* key, double fallback, const std::string& where) {
  return crosscurv::detail::number_or(obj, key, fallback, where);
}

inline bool bool_or(const Json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw InvalidSpec(where + ": '" + key + "' must be a boolean");
  return obj.at(key).get<bool>();
}

inline std::uint64_t seed_of(const Json& cfg, const RunOptions& opt, const std::string& where) {
  if (opt.seed) return *opt.seed;
  if (!cfg.contains("seed")) return 0;
  if (!cfg.at("seed").is_number_unsigned()) throw InvalidSpec(where + ": 'seed' must be a non-negative integer");
  return cfg.at("seed").get<std::uint64_t>();
}

inline Point point_of(const Json& cfg, const char* key, int n, const std::string& where) {
  if (!cfg.contains(key)) throw InvalidSpec(where + ": missing '" + key + "'");
  Point p = crosscurv::detail::vector_from(cfg.at(key), where + "." + key);
  if (p.size() != n) throw InvalidSpec(where + "." + key + ": expected " + std::to_string(n) + " coordinates");
  return p;
}

inline CostChart cost_of(const Json& cfg, const std::string& where) {
  if (!cfg.contains("cost")) throw InvalidSpec(where + ": missing 'cost'");
  return make_builtin_cost(cfg.at("cost"), where + ".cost");
}

inline std::vector<Point> box_lattice(const Box& box, int per_side) {
  const auto n = static_cast<int>(box.lo.size());
  std::vector<Point> out;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_side);
  for (std::size_t k = 0; k < total; ++k) {
    Point p(n);
    std::size_t r = k;
    for (int i = 0; i < n; ++i) {
      const auto j = static_cast<double>(r % static_cast<std::size_t>(per_side));
      r /= static_cast<std::size_t>(per_side);
      p[i] = per_side == 1 ? 0.5 * (box.lo[i] + box.hi[i])
                           : box.lo[i] + (box.hi[i] - box.lo[i]) * j / (per_side - 1);
    }
    out.push_back(p);
  }
  return out;
}

inline std::string summary_line(const std::string& key, const std::string& value) { return key + ": " + value + "\n"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// curvature

/// Config: {"cost": spec with a bounded domain, "points_per_side": 8,
/// "directions_per_point": 8, "tolerance": 1e-8, "seed": 0,
/// "diagonal": {"points": 20, "fd": true}}.
inline CommandOutput cmd_curvature(const Json& cfg, const RunOptions& opt) {
  const std::string w = "curvature";
  detail::require_keys(cfg, {"cost", "points_per_side", "directions_per_point", "tolerance", "seed", "diagonal"}, w);
  const CostChart chart = detail::cost_of(cfg, w);
  const int pps = detail::int_or(cfg, "points_per_side", 8, w);
  const int dirs = detail::int_or(cfg, "directions_per_point", 8, w);
  const double tol = detail::num_or(cfg, "tolerance", 1e-8, w);
  const std::uint64_t seed = detail::seed_of(cfg, opt, w);
  if (!(tol >= 0.0)) throw InvalidSpec(w + ": tolerance must be >= 0");

  std::optional<Json> diag_cfg;
  if (cfg.contains("diagonal")) {
    diag_cfg = cfg.at("diagonal");
    detail::require_keys(*diag_cfg, {"points", "fd"}, w + ".diagonal");
    if (chart.dim() < 2) throw InvalidSpec(w + ".diagonal: needs n >= 2");
  }

  const RegularityReport report = classify_regularity(chart, chart.domain(), pps, dirs, tol, seed, opt.workers);
  Json j = {{"command", "curvature"}, {"config", cfg}, {"seed", seed}, {"report", to_json(report)}};

  std::string summary = detail::summary_line("classification", to_string(report.classification)) +
                        detail::summary_line("min_normalized_cross_curvature", format_double(report.min_normalized));

  if (diag_cfg) {
    const int points = detail::int_or(*diag_cfg, "points", 20, w + ".diagonal");
    const bool fd = detail::bool_or(*diag_cfg, "fd", true, w + ".diagonal");
    if (points < 1) throw InvalidSpec(w + ".diagonal: points must be >= 1");
    // Diagonal points drawn from the middle half of the source/target box
    // intersection, so the finite-difference stencils stay inside the domain.
    const auto& d = chart.domain();
    Box box{d.source.lo.cwiseMax(d.target.lo), d.source.hi.cwiseMin(d.target.hi)};
    crosscurv::detail::require_bounded(box, "curvature.diagonal");
    const Point quarter = 0.25 * (box.hi - box.lo);
    box.lo += quarter;
    box.hi -= quarter;
    std::mt19937_64 rng = crosscurv::detail::stream_rng(seed, 0xd1a6);
    Json samples = Json::array();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, max_fd_gap = 0.0;
    int fd_failures = 0;
    for (int k = 0; k < points; ++k) {
      Point x(chart.dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = sampling::uniform(rng, box.lo[i], box.hi[i]);
      const double alpha = sampling::uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const auto [p, pb] = sampling::diagonal_frame(chart, x, alpha);
      const double value = cross_curvature(chart, x, x, p, pb);
      Json s = {{"x", to_json(x)}, {"p", to_json(p)}, {"pb", to_json(pb)}, {"cross_curvature", value}};
      if (fd) {
        try {
          const double v_fd = cross_curvature_via_fd(chart, x, x, p, pb);
          s["cross_curvature_fd"] = v_fd;
          max_fd_gap = std::max(max_fd_gap, std::abs(v_fd - value));
        } catch (const DomainError& e) {
          s["fd_error"] = e.what();
          ++fd_failures;
        }
      }
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      samples.push_back(s);
    }
    Json dj = {{"points", points}, {"min", lo}, {"max", hi}, {"samples", samples}};
    if (fd) {
      dj["max_fd_gap"] = max_fd_gap;
      dj["fd_failures"] = fd_failures;
    }
    j["diagonal"] = dj;
    summary += detail::summary_line("diagonal_cross_curvature", "[" + format_double(lo) + ", " + format_double(hi) + "]");
  }

  CommandOutput out;
  out.exit_code = report.classification == Regularity::A3s ? 0 : report.classification == Regularity::A3w ? 1 : 2;
  out.files["curvature.json"] = dump_json(j);
  out.summary = summary;
  return out;
}

// ---------------------------------------------------------------------------
// mountaincheck

/// Config: {"cost", "x", "xb0", "xb1", "y_box": [[lo, hi], ...], "y_per_side": 9,
/// "t_samples": 33, "tolerance": 1e-8, "seed",
/// "search": {"iterations", "box", "initial_step", "initial_temperature", "t_samples"}}.
/// The search, when present, uses the run seed.
inline CommandOutput cmd_mountaincheck(const Json& cfg, const RunOptions& opt) {
  const std::string w = "mountaincheck";
  detail::require_keys(cfg, {"cost", "x", "xb0", "xb1", "y_box", "y_per_side", "t_samples", "tolerance", "seed", "search"},
                       w);
  const CostChart chart = detail::cost_of(cfg, w);
  const int n = chart.dim();
  const Point x = detail::point_of(cfg, "x", n, w);
  const Point xb0 = detail::point_of(cfg, "xb0", n, w);
  const Point xb1 = detail::point_of(cfg, "xb1", n, w);
  if (!cfg.contains("y_box")) throw InvalidSpec(w + ": missing 'y_box'");
  const Box ybox = crosscurv::detail::box_from(cfg.at("y_box"), n, w + ".y_box");
  crosscurv::detail::require_bounded(ybox, "mountaincheck.y_box");
  const int y_per_side = detail::int_or(cfg, "y_per_side", 9, w);
  const int t_samples = detail::int_or(cfg, "t_samples", 33, w);
  const double tol = detail::num_or(cfg, "tolerance", 1e-8, w);
  const std::uint64_t seed = detail::seed_of(cfg, opt, w);
  if (y_per_side < 1) throw InvalidSpec(w + ": y_per_side must be >= 1");
  if (t_samples < 3) throw InvalidSpec(w + ": t_samples must be >= 3");
  if (!(tol >= 0.0)) throw InvalidSpec(w + ": tolerance must be >= 0");
  if (!chart.in_domain(x, xb0) || !chart.in_domain(x, xb1))
    throw InvalidSpec(w + ": (x, xb0) and (x, xb1) must lie in the cost domain");

  std::optional<ViolationSearchConfig> search;
  if (cfg.contains("search")) {
    const Json& s = cfg.at("search");
    const std::string sw = w + ".search";
    detail::require_keys(s, {"iterations", "box", "initial_step", "initial_temperature", "t_samples"}, sw);
    ViolationSearchConfig sc;
    sc.seed = seed;
    sc.iterations = detail::int_or(s, "iterations", sc.iterations, sw);
    sc.box = detail::num_or(s, "box", sc.box, sw);
    sc.initial_step = detail::num_or(s, "initial_step", sc.initial_step, sw);
    sc.initial_temperature = detail::num_or(s, "initial_temperature", sc.initial_temperature, sw);
    sc.t_samples = detail::int_or(s, "t_samples", sc.t_samples, sw);
    if (sc.iterations < 1 || !(sc.box > 0.0) || !(sc.initial_step > 0.0) || !(sc.initial_temperature > 0.0) ||
        sc.t_samples < 3)
      throw InvalidSpec(sw + ": iterations >= 1, t_samples >= 3 and positive box, step and temperature required");
    search = sc;
  }

  const auto ys = detail::box_lattice(ybox, y_per_side);
  const MountainCheck sliding = sliding_mountain_check(chart, x, xb0, xb1, ys, t_samples, tol, opt.workers);
  const ContactCheck contact = contact_connectivity_check(chart, x, xb0, xb1, ys, t_samples, tol, opt.workers);
  bool passed = sliding.passed && contact.passed;

  Json j = {{"command", "mountaincheck"},
            {"config", cfg},
            {"seed", seed},
            {"sliding_mountain", to_json(sliding)},
            {"contact_connectivity", to_json(contact)}};
  std::string summary = detail::summary_line("sliding_max_violation", format_double(sliding.max_violation)) +
                        detail::summary_line("contact_max_deficit", format_double(contact.max_deficit));
  if (search) {
    const MountainWitness wit = search_mountain_violation(chart, *search);
    const bool found = std::isfinite(wit.violation) && wit.violation > tol;
    passed = passed && !found;
    j["search"] = {{"witness", to_json(wit)}, {"violation_found", found}};
    summary += detail::summary_line("search_max_violation", format_double(wit.violation));
  }
  j["passed"] = passed;
  summary += detail::summary_line("passed", passed ? "true" : "false");

  CommandOutput out;
  out.exit_code = passed ? 0 : 2;
  out.files["mountaincheck.json"] = dump_json(j);
  out.files["mountain_grid.csv"] = mountain_grid_csv(sliding);
  out.summary = summary;
  return out;
}

// ---------------------------------------------------------------------------
// semidiscrete

namespace detail {

inline SourceGrid grid_of(const Json& g, const std::string& where) {
  require_keys(g, {"n", "box"}, where);
  if (!g.contains("n") || !g.contains("box")) throw InvalidSpec(where + ": needs 'n' and 'box'");
  SourceGrid grid;
  const Json& n = g.at("n");
  if (n.is_number_integer()) {
    grid.nx = grid.ny = n.get<int>();
  } else if (n.is_array() && n.size() == 2 && n[0].is_number_integer() && n[1].is_number_integer()) {
    grid.nx = n[0].get<int>();
    grid.ny = n[1].get<int>();
  } else {
    throw InvalidSpec(where + ".n: expected an integer or [nx, ny]");
  }
  grid.box = crosscurv::detail::box_from(g.at("box"), 2, where + ".box");
  grid.validate();
  return grid;
}

struct ParsedSemidiscrete {
  SemidiscreteProblem problem;
  AscentConfig ascent;
  Adjacency adjacency = Adjacency::Four;
  std::optional<std::size_t> holder_pairs;
  std::optional<double> delta_cut;
};

inline ParsedSemidiscrete parse_semidiscrete(const Json& cfg, const RunOptions& opt,
                                             const std::filesystem::path& base_dir) {
  const std::string w = "semidiscrete";
  require_keys(cfg, {"cost", "grid", "density", "targets", "weights", "ascent", "periodic_x1", "adjacency", "seed",
                     "diagnostics"},
               w);
  const CostChart chart = cost_of(cfg, w);
  if (chart.dim() != 2) throw InvalidSpec(w + ": the source chart must be 2-D");

  if (!cfg.contains("targets") || !cfg.at("targets").is_array() || cfg.at("targets").empty())
    throw InvalidSpec(w + ": 'targets' must be a non-empty list of points");
  std::vector<Point> targets;
  for (std::size_t i = 0; i < cfg.at("targets").size(); ++i) {
    Point t = crosscurv::detail::vector_from(cfg.at("targets")[i], w + ".targets");
    if (t.size() != 2) throw InvalidSpec(w + ".targets: points must be 2-D");
    targets.push_back(t);
  }
  std::vector<double> weights;
  if (cfg.contains("weights")) {
    const Eigen::VectorXd e = crosscurv::detail::vector_from(cfg.at("weights"), w + ".weights");
    weights.assign(e.data(), e.data() + e.size());
  } else {
    weights.assign(targets.size(), 1.0 / static_cast<double>(targets.size()));
  }

  const Json density = cfg.value("density", Json{{"kind", "uniform"}});
  if (!density.is_object() || !density.contains("kind") || !density.at("kind").is_string())
    throw InvalidSpec(w + ".density: missing string field 'kind'");
  const std::string kind = density.at("kind").get<std::string>();
  const std::string dw = w + ".density";
  const bool periodic = bool_or(cfg, "periodic_x1", false, w);

  SemidiscreteProblem problem;
  if (kind == "csv") {
    require_keys(density, {"kind", "path"}, dw);
    if (cfg.contains("grid")) throw InvalidSpec(w + ": 'grid' must be omitted for a csv density (the file defines it)");
    if (!density.contains("path") || !density.at("path").is_string()) throw InvalidSpec(dw + ": missing 'path'");
    std::filesystem::path path = density.at("path").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    const DensityGrid d = read_density_csv(path.string());
    std::size_t idx = 0;
    const auto values = d.values;
    // Cell lookup by centre: the grid iterates cells in storage order.
    problem = make_semidiscrete_problem(
        chart, d.grid, [&](const Point&) { return values[idx++]; }, targets, weights, periodic);
  } else {
    if (!cfg.contains("grid")) throw InvalidSpec(w + ": missing 'grid'");
    const SourceGrid grid = grid_of(cfg.at("grid"), w + ".grid");
    std::function<double(const Point&)> rho;
    if (kind == "uniform") {
      require_keys(density, {"kind"}, dw);
      rho = [](const Point&) { return 1.0; };
    } else if (kind == "disk") {
      require_keys(density, {"kind", "center", "radius"}, dw);
      const Point c = point_of(density, "center", 2, dw);
      if (!density.contains("radius")) throw InvalidSpec(dw + ": missing 'radius'");
      rho = disk_density(chart, c, num_or(density, "radius", 0.0, dw));
    } else {
      throw InvalidSpec(dw + ": unknown density kind '" + kind + "' (uniform, disk, csv)");
    }
    problem = make_semidiscrete_problem(chart, grid, rho, targets, weights, periodic);
  }

  ParsedSemidiscrete out{problem, {}, Adjacency::Four, std::nullopt, std::nullopt};
  out.ascent.workers = opt.workers;
  if (cfg.contains("ascent")) {
    const Json& a = cfg.at("ascent");
    const std::string aw = w + ".ascent";
    require_keys(a, {"mass_tolerance", "max_iterations", "initial_step"}, aw);
    out.ascent.mass_tolerance = num_or(a, "mass_tolerance", out.ascent.mass_tolerance, aw);
    out.ascent.max_iterations = int_or(a, "max_iterations", out.ascent.max_iterations, aw);
    out.ascent.initial_step = num_or(a, "initial_step", out.ascent.initial_step, aw);
  }
  out.ascent.validate();
  const int adj = int_or(cfg, "adjacency", 4, w);
  if (adj != 4 && adj != 8) throw InvalidSpec(w + ": adjacency must be 4 or 8");
  out.adjacency = adj == 8 ? Adjacency::Eight : Adjacency::Four;
  if (cfg.contains("diagnostics")) {
    const Json& d = cfg.at("diagnostics");
    const std::string dgw = w + ".diagnostics";
    require_keys(d, {"holder_pairs", "delta_cut"}, dgw);
    if (d.contains("holder_pairs")) {
      const int pairs = int_or(d, "holder_pairs", 0, dgw);
      if (pairs < 20) throw InvalidSpec(dgw + ": holder_pairs must be >= 20");
      out.holder_pairs = static_cast<std::size_t>(pairs);
    }
    if (d.contains("delta_cut")) {
      if (chart.kind() != "sphere_squared") throw InvalidSpec(dgw + ": delta_cut applies to sphere_squared only");
      out.delta_cut = num_or(d, "delta_cut", 0.0, dgw);
    }
  }
  return out;
}

inline std::string partition_csv(const SemidiscreteProblem& p, const SemidiscreteSolution& s) {
  std::ostringstream os;
  os << "x0,x1,label\n";
  for (std::size_t c = 0; c < p.grid.size(); ++c) {
    const Point x = p.grid.center(c);
    os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << (p.mass[c] > 0.0 ? s.labels[c] : -1) << '\n';
  }
  return os.str();
}

template <class T>
Json array_of(const std::vector<T>& v) {
  Json a = Json::array();
  for (const auto& e : v) a.push_back(e);
  return a;
}

}  // namespace detail

/// Config: {"cost", "grid": {"n": 512 | [nx, ny], "box": [[lo, hi], [lo, hi]]},
/// "density": {"kind": "uniform"} | {"kind": "disk", "center", "radius"} |
/// {"kind": "csv", "path"}, "targets", "weights" (default uniform),
/// "ascent": {"mass_tolerance", "max_iterations", "initial_step"}, "periodic_x1",
/// "adjacency": 4 | 8, "seed", "diagnostics": {"holder_pairs", "delta_cut"}}.
/// The cut-locus margin is always reported on sphere_squared.
inline CommandOutput cmd_semidiscrete(const Json& cfg, const RunOptions& opt,
                                      const std::filesystem::path& base_dir = ".") {
  const auto parsed = detail::parse_semidiscrete(cfg, opt, base_dir);
  const std::uint64_t seed = detail::seed_of(cfg, opt, "semidiscrete");
  const auto& p = parsed.problem;
  const SemidiscreteSolution s = solve_semidiscrete(p, parsed.ascent);

  Json comps = Json::array();
  std::vector<int> counts;
  for (std::size_t i = 0; i < p.targets.size(); ++i) {
    counts.push_back(connected_components(p, s, static_cast<int>(i), parsed.adjacency));
    comps.push_back(counts.back());
  }
  Json log = Json::array();
  for (const auto& st : s.log)
    log.push_back({{"iteration", st.iteration}, {"dual", st.dual}, {"max_mass_error", st.max_mass_error},
                   {"step", st.step}});
  Json solution = {{"lambda", detail::array_of(s.lambda)},
                   {"masses", detail::array_of(s.masses)},
                   {"weights", detail::array_of(p.weights)},
                   {"dual", s.dual},
                   {"max_mass_error", s.max_mass_error},
                   {"total_mass", std::accumulate(s.masses.begin(), s.masses.end(), 0.0)},
                   {"iterations", s.iterations},
                   {"converged", s.converged},
                   {"empty_region", s.empty_region},
                   {"mass_tolerance", parsed.ascent.mass_tolerance},
                   {"log", log}};
  Json j = {{"command", "semidiscrete"},
            {"config", cfg},
            {"seed", seed},
            {"grid", {{"nx", p.grid.nx}, {"ny", p.grid.ny}, {"lo", to_json(p.grid.box.lo)}, {"hi", to_json(p.grid.box.hi)}}},
            {"solution", solution},
            {"components", comps},
            {"adjacency", parsed.adjacency == Adjacency::Eight ? 8 : 4}};

  Json diagnostics = Json::object();
  if (parsed.holder_pairs) {
    const auto fit = holder_diagnostic(contact_samples(p, s), *parsed.holder_pairs, seed);
    diagnostics["holder"] = {{"exponent", fit.exponent},
                             {"intercept", fit.intercept},
                             {"pairs", fit.pairs},
                             {"discrete_warning", fit.discrete_warning}};
  }
  if (p.chart.kind() == "sphere_squared") {
    const auto m = cut_locus_margin(p, s, parsed.delta_cut.value_or(0.0));
    diagnostics["cut_locus"] = {
        {"margin", m.margin}, {"argmin", to_json(m.argmin)}, {"delta_cut", m.delta_cut}, {"flagged", m.flagged}};
  }
  if (!diagnostics.empty()) j["diagnostics"] = diagnostics;

  std::string masses, cstr;
  for (std::size_t i = 0; i < s.masses.size(); ++i) {
    masses += (i ? ", " : "") + format_double(s.masses[i]);
    cstr += (i ? ", " : "") + std::to_string(counts[i]);
  }
  CommandOutput out;
  out.exit_code = s.converged && !s.empty_region ? 0 : 2;
  out.files["semidiscrete.json"] = dump_json(j);
  out.files["partition.csv"] = detail::partition_csv(p, s);
  out.summary = detail::summary_line("converged", s.converged ? "true" : "false") +
                detail::summary_line("iterations", std::to_string(s.iterations)) +
                detail::summary_line("masses", "[" + masses + "]") +
                detail::summary_line("components", "[" + cstr + "]");
  return out;
}

// ---------------------------------------------------------------------------
// Presets

struct Preset {
  const char* command;
  const char* config;
};

inline const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table = {
      {"figure1-plane",
       {"semidiscrete", R"({
  "cost": {"kind": "euclid_quadratic", "n": 2},
  "grid": {"n": 512, "box": [[-1, 1], [-1, 1]]},
  "density": {"kind": "disk", "center": [0, 0], "radius": 1},
  "targets": [[-0.552636596401731, -0.2336510053851903], [0, 0], [0.552636596401731, 0.2336510053851903]],
  "weights": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]
})"}},
      {"figure1-sphere",
       {"semidiscrete", R"({
  "cost": {"kind": "sphere_squared", "n": 2},
  "grid": {"n": 512, "box": [[0.5707963267948966, 2.5707963267948966], [-1, 1]]},
  "density": {"kind": "disk", "center": [1.5707963267948966, 0], "radius": 1},
  "targets": [[1.5707963267948966, -0.6], [1.5707963267948966, 0], [1.5707963267948966, 0.6]],
  "weights": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]
})"}},
      {"figure1-hyperbolic",
       {"semidiscrete", R"({
  "cost": {"kind": "hyperbolic_squared", "n": 2},
  "grid": {"n": 512, "box": [[-0.9468060128462683, 0.9468060128462683], [-0.9468060128462683, 0.9468060128462683]]},
  "density": {"kind": "disk", "center": [0, 0], "radius": 3.6},
  "targets": [[-0.7931990970835009, 0], [0, 0], [0.7931990970835009, 0]],
  "weights": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]
})"}},
      {"reflector-a3s",
       {"curvature", R"({
  "cost": {"kind": "log_euclid", "n": 2,
           "domain": {"source_box": [[-0.3, 0.3], [-0.3, 0.3]], "target_box": [[1.2, 1.8], [-0.3, 0.3]]}},
  "points_per_side": 4,
  "directions_per_point": 8
})"}},
      {"sphere-diagonal-43",
       {"curvature", R"({
  "cost": {"kind": "sphere_squared", "n": 2, "domain": {"box": [[1.0, 2.1], [-0.5, 0.5]]}},
  "points_per_side": 4,
  "directions_per_point": 8,
  "diagonal": {"points": 20, "fd": true}
})"}},
  };
  return table;
}

inline std::pair<std::string, Json> preset(const std::string& name) {
  const auto& t = presets();
  const auto it = t.find(name);
  if (it == t.end()) {
    std::string names;
    for (const auto& [k, v] : t) names += (names.empty() ? "" : ", ") + k;
    throw InvalidSpec("unknown preset '" + name + "' (available: " + names + ")");
  }
  return {it->second.command, parse_config_text(it->second.config, "preset " + name)};
}

inline CommandOutput run_command(const std::string& command, const Json& cfg, const RunOptions& opt,
                                 const std::filesystem::path& base_dir = ".") {
  if (command == "curvature") return cmd_curvature(cfg, opt);
  if (command == "mountaincheck") return cmd_mountaincheck(cfg, opt);
  if (command == "semidiscrete") return cmd_semidiscrete(cfg, opt, base_dir);
  throw InvalidSpec("unknown command '" + command + "'");
}

}  // namespace crosscurv::cli
