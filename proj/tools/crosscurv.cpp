// crosscurv <command> --config <path> [--out <dir>] [--seed N] [--workers N]

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crosscurv/cli.hpp"
#include "crosscurv/selftest.hpp"

#ifndef CROSSCURV_FIXTURE_DIR
#define CROSSCURV_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

using namespace crosscurv;

struct CommandArgs {
  std::string config;
  std::string preset;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

void add_common(CLI::App* sub, CommandArgs& a) {
  auto* cfg = sub->add_option("--config", a.config, "JSON config file");
  auto* pre = sub->add_option("--preset", a.preset, "embedded config (see `crosscurv presets`)");
  cfg->excludes(pre);
  sub->add_option("--out", a.out, "output directory")->capture_default_str();
  sub->add_option("--seed", a.seed, "seed overriding the config");
  sub->add_option("--workers", a.workers, "worker threads (<= 0: all cores)")->capture_default_str();
}

int run(const std::string& command, const CommandArgs& a) {
  Json cfg;
  std::filesystem::path base = ".";
  if (!a.preset.empty()) {
    auto [preset_command, preset_cfg] = cli::preset(a.preset);
    if (preset_command != command)
      throw InvalidSpec("preset '" + a.preset + "' belongs to the '" + preset_command + "' command");
    cfg = preset_cfg;
  } else if (!a.config.empty()) {
    cfg = cli::load_config(a.config);
    base = std::filesystem::path(a.config).parent_path();
    if (base.empty()) base = ".";
  } else {
    throw InvalidSpec(command + ": one of --config or --preset is required");
  }
  const auto out = cli::run_command(command, cfg, {a.seed, a.workers}, base);
  cli::write_outputs(a.out, out);
  std::cout << out.summary;
  for (const auto& [name, content] : out.files) std::cout << "wrote " << (std::filesystem::path(a.out) / name).string() << "\n";
  return out.exit_code;
}

int run_selftest(const std::string& fixtures, const std::string& out, int workers) {
  const auto results = selftest::run_suite({fixtures, workers});
  bool ok = true;
  Json j = Json::array();
  for (const auto& r : results) {
    std::cout << selftest::format_line(r) << "\n";
    ok = ok && r.passed;
    j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  if (!out.empty()) write_atomic(std::filesystem::path(out) / "selftest.json", dump_json(j));
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-induced pseudo-Riemannian geometry, regularity checks and semidiscrete transport"};
  app.require_subcommand(1);

  CommandArgs curv, mount, semi;
  auto* c1 = app.add_subcommand("curvature", "classify a cost as A3s / A3w / violated (exit 0 / 1 / 2)");
  add_common(c1, curv);
  auto* c2 = app.add_subcommand("mountaincheck", "sliding-mountain and contact-connectivity checks (exit 0 / 2)");
  add_common(c2, mount);
  auto* c3 = app.add_subcommand("semidiscrete", "semidiscrete transport partition (exit 0, or 2 when flagged)");
  add_common(c3, semi);

  std::string fixtures = CROSSCURV_FIXTURE_DIR, st_out;
  int st_workers = 1;
  auto* c4 = app.add_subcommand("selftest", "run the acceptance suite and print a pass/fail table");
  c4->add_option("--fixtures", fixtures, "fixture directory")->capture_default_str();
  c4->add_option("--out", st_out, "directory for selftest.json");
  c4->add_option("--workers", st_workers, "worker threads")->capture_default_str();

  auto* c5 = app.add_subcommand("presets", "list embedded configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (c1->parsed()) return run("curvature", curv);
    if (c2->parsed()) return run("mountaincheck", mount);
    if (c3->parsed()) return run("semidiscrete", semi);
    if (c4->parsed()) return run_selftest(fixtures, st_out, st_workers);
    if (c5->parsed()) {
      for (const auto& [name, p] : cli::presets()) std::cout << name << " (" << p.command << ")\n";
      return 0;
    }
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitRuntime;
  }
  return cli::kExitUsage;
}
