// Copyright 2026 the ksat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KSAT_VERIFY_HPP
#define KSAT_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksat/formula.hpp"

namespace ksat {

enum class CheckStatus { kPass, kFail, kSkipped };

struct VerifyCheck {
  std::string name;
  CheckStatus status = CheckStatus::kSkipped;
  double value = 0;      // measured statistic
  double threshold = 0;  // pass bound on the statistic
  std::string detail;
};

struct VerifyOptions {
  uint64_t seed = 1;
  uint32_t samples = 20000;
  // run only the named checks when non-empty
  std::vector<std::string> only;
};

/// Oracle-backed correctness checks on one instance: sampler TV against the
/// exact law, detailed balance of the idealized chain, the annealing
/// identities, the clause-addition bound, local uniformity, and the
/// auxiliary-variable construction. Checks whose preconditions the instance
/// cannot meet report kSkipped with the reason.
std::vector<VerifyCheck> verify_formula(const CnfFormula& f,
                                        const VerifyOptions& opts);

/// The default battery over internally generated desk-scale instances.
std::vector<VerifyCheck> verify_battery(const VerifyOptions& opts);

const char* check_status_name(CheckStatus s);

}  // namespace ksat

#endif  // KSAT_VERIFY_HPP
