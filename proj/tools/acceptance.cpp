// Prints one PASS/FAIL line per acceptance criterion; exit 0 only if all pass.
// Usage: crosscurv_acceptance [fixture_dir]

#include <iostream>

#include "crosscurv/selftest.hpp"

#ifndef CROSSCURV_FIXTURE_DIR
#define CROSSCURV_FIXTURE_DIR "tests/fixtures"
#endif

int main(int argc, char** argv) {
  const std::string fixtures = argc > 1 ? argv[1] : CROSSCURV_FIXTURE_DIR;
  bool ok = true;
  for (const auto& r : crosscurv::selftest::run_suite({fixtures, 1})) {
    std::cout << crosscurv::selftest::format_line(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}
