#include <iostream>

#include "qlab/acceptance.hpp"
#include "qlab/scenario.hpp"

int main() {
  qlab::AcceptanceOptions opts;  // full range d in {2,...,6}
  opts.tol_scale = qlab::tolerance_scale_from_env();
  qlab::AcceptanceSummary summary = qlab::run_acceptance(opts);
  bool ok = qlab::print_acceptance(summary, std::cout);
  return ok ? 0 : 1;
}
