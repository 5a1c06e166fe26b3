#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "springfem/elasticity.hpp"

namespace springfem {

inline const std::vector<std::string> kVerifyGroups{"symmetry",          "row-sum", "thm2-equivalence",
                                                    "thm3-implication",  "lemma4",  "proposition1"};

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::vector<std::string> groups;  // empty: all of kVerifyGroups
  // Additional tensor checked by the symmetry and row-sum groups.
  std::optional<ElasticityTensor> tensor;
};

struct VerifyGroupResult {
  std::string group;
  bool pass = false;
  std::size_t cases = 0;
  double worst = 0.0;  // largest error or number of counterexamples
  double limit = 0.0;
  std::string note;
};

// Runs the invariant suites on the built-in meshes. Failures are reported in
// the results, never thrown. Unknown group names throw InputError.
std::vector<VerifyGroupResult> run_verification(const VerifyOptions& options = {});

inline constexpr const char* kVerifyCsvHeader = "group,status,cases,worst,limit,note";
std::string verification_csv(const std::vector<VerifyGroupResult>& results);

}  // namespace springfem
