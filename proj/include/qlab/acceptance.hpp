#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlab/core.hpp"

namespace qlab {

enum class Mutation { None, SignFlipG };

struct AcceptanceOptions {
  std::vector<Index> dims = {2, 3, 4, 5, 6};
  std::uint64_t seed = 20240901;
  double tol_scale = 1.0;
  Mutation mutation = Mutation::None;  // selftest hook: corrupt a generator on purpose
};

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

struct AcceptanceSummary {
  std::vector<CriterionResult> results;
  bool all_passed() const;
};

/// The thirteen acceptance criteria; each runs in seconds at desk scale.
AcceptanceSummary run_acceptance(const AcceptanceOptions& opts);

/// One line per criterion to the given stream; returns all_passed().
bool print_acceptance(const AcceptanceSummary& summary, std::ostream& os);

}  // namespace qlab
