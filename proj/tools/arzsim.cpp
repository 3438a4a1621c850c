#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "arz/scenario.hpp"

namespace sc = arz::scenario;

namespace {

void print_header(const sc::Meta& m) {
  for (const auto& [k, v] : m.rows) std::printf("%s = %s\n", k.c_str(), v.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARZ traffic scenarios with moving and fixed flux constraints"};
  app.require_subcommand(1);
  std::string config, out;
  int refinements = 3;

  auto* run = app.add_subcommand("run", "run one scenario and write CSV outputs");
  run->add_option("--config", config, "scenario JSON file")->required();
  run->add_option("--out", out, "output directory")->required();

  auto* study = app.add_subcommand("study", "convergence study against the exact Riemann solution");
  study->add_option("--config", config, "scenario JSON file")->required();
  study->add_option("--refinements", refinements, "number of mesh levels")->required();
  study->add_option("--out", out, "output directory")->required();

  auto* val = app.add_subcommand("validate", "load and validate a scenario");
  val->add_option("--config", config, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    sc::Scenario s = sc::load_scenario(config);
    if (*val) {
      std::printf("ok: %s (%s)\n", s.name.c_str(), arz::sim::scheme_name(s.scheme));
      return 0;
    }
    if (*run) {
      sc::Report rep = sc::run_scenario(s, out);
      print_header(rep.meta);
      return 0;
    }
    sc::check_study(s, refinements);
    auto rows = sc::convergence_study(s, refinements, out);
    std::printf("%8s %12s %24s %24s %10s\n", "cells", "h", "l1_rho", "l1_z", "order_rho");
    for (const auto& r : rows)
      std::printf("%8d %12.6g %24.17g %24.17g %10.4f\n", r.cells, r.h, r.l1_rho, r.l1_z, r.order_rho);
    std::printf("regression order (rho): %.4f\n", sc::regression_order(rows));
    return 0;
  } catch (const sc::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const arz::DomainError& e) {
    // invalid parameters caught by the solvers before any step
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 3;
  }
}
