#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qlab/acceptance.hpp"
#include "qlab/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lab - Lindblad open-system laboratory"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run scenarios from a config file");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  run->add_option("--config", config_path, "scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--jobs", jobs, "parallel scenarios")->check(CLI::PositiveNumber);

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite at d in {2,3,4}");
  std::string mutate;
  selftest
      ->add_option("--mutate", mutate, "inject a fault to prove the suite catches it")
      ->check(CLI::IsMember({"sign-flip-g"}));

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    auto t0 = std::chrono::steady_clock::now();
    int code = qlab::run_config_file(config_path, out_dir, seed, jobs);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << "elapsed " << ms << " ms\n";  // stdout only; report.json stays byte-stable
    return code;
  }

  qlab::AcceptanceOptions opts;
  opts.dims = {2, 3, 4};
  opts.tol_scale = qlab::tolerance_scale_from_env();
  if (mutate == "sign-flip-g") opts.mutation = qlab::Mutation::SignFlipG;
  auto t0 = std::chrono::steady_clock::now();
  qlab::AcceptanceSummary summary = qlab::run_acceptance(opts);
  bool ok = qlab::print_acceptance(summary, std::cout);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                  t0)
                .count();
  std::cout << "elapsed " << ms << " ms\n";
  return ok ? 0 : 2;
}
