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

#ifndef KSAT_REGIME_HPP
#define KSAT_REGIME_HPP

#include <cstdint>
#include <optional>

namespace ksat {

enum class ParamMode { kStrict, kManual };

/// Every tunable of the sampler and counter in one record. Strict-mode values
/// all derive from (n, k, d, eps, xi); manual mode lets desk-scale experiments
/// override the pieces the regime inequality would otherwise forbid.
struct RegimeParams {
  ParamMode mode = ParamMode::kStrict;
  uint64_t n = 0;
  uint32_t k = 0;
  uint32_t d = 0;
  double epsilon = 0;
  double xi = 0;

  uint32_t k_alpha = 0;
  uint32_t k_beta = 0;
  double eta = 0;
  uint64_t T = 0;
  double delta = 0;
  uint64_t R = 0;

  // reported for diagnostics; consumed nowhere else
  double zeta = 0;

  // consumed by the coupling lab
  double s = 0;        // 36 d^4 k^5
  uint32_t k_gamma = 0;  // ceil(4/9 k_beta)
};

/// k >= 20 log2 k + 20 log2 d + 60 + xi
bool regime_holds(uint32_t k, uint32_t d, double xi);

/// All parameters from the closed-form recipe; throws ErrorCode::kRegime when
/// the regime inequality fails.
RegimeParams derive_params(uint64_t n, uint32_t k, uint32_t d, double eps,
                           double xi);

struct ManualOverrides {
  uint32_t k_alpha = 0;  // required
  uint32_t k_beta = 0;   // required
  std::optional<double> eta;
  std::optional<uint64_t> T;
  std::optional<uint64_t> R;
  std::optional<double> delta;
};

/// Manual parameters for desk-scale experiments. Unsupplied fields fall back
/// to the derive_params formulas; k_alpha + k_beta <= k is still enforced.
RegimeParams manual_params(uint64_t n, uint32_t k, uint32_t d, double eps,
                           double xi, const ManualOverrides& ov);

}  // namespace ksat

#endif  // KSAT_REGIME_HPP
