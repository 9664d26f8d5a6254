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

#ifndef KSAT_BIAS_HPP
#define KSAT_BIAS_HPP

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "ksat/error.hpp"
#include "ksat/rng.hpp"

namespace ksat {

/// Product distribution over variable values: every variable draws 1 with
/// default_one_prob unless overridden. Uniform mode is the default-constructed
/// state (1/2, no overrides); the counter overrides the auxiliary variables.
class Bias {
 public:
  Bias() = default;
  explicit Bias(double default_one_prob) : default_p1_(default_one_prob) {
    check(default_one_prob);
  }

  void set_override(uint32_t var, double p1) {
    check(p1);
    auto it = std::lower_bound(
        overrides_.begin(), overrides_.end(), var,
        [](const std::pair<uint32_t, double>& e, uint32_t v) { return e.first < v; });
    if (it != overrides_.end() && it->first == var)
      it->second = p1;
    else
      overrides_.insert(it, {var, p1});
  }

  double prob_one(uint32_t var) const {
    if (overrides_.empty()) return default_p1_;
    auto it = std::lower_bound(
        overrides_.begin(), overrides_.end(), var,
        [](const std::pair<uint32_t, double>& e, uint32_t v) { return e.first < v; });
    if (it != overrides_.end() && it->first == var) return it->second;
    return default_p1_;
  }

  bool is_uniform() const { return default_p1_ == 0.5 && overrides_.empty(); }

  bool draw(uint32_t var, RandomSource& rng) const {
    double p1 = prob_one(var);
    if (p1 == 0.5) return rng.next_bit();
    return rng.next_real() < p1;
  }

 private:
  static void check(double p) {
    if (!(p >= 0.0 && p <= 1.0))
      fail(ErrorCode::kInvalidArgument, "probability out of [0,1]");
  }

  double default_p1_ = 0.5;
  std::vector<std::pair<uint32_t, double>> overrides_;  // sorted by var
};

}  // namespace ksat

#endif  // KSAT_BIAS_HPP
