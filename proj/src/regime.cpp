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

#include "ksat/regime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ksat/error.hpp"

namespace ksat {

namespace {

// bare "log" means log2 throughout the sampler's formulas
double log2d(double x) { return std::log2(x); }

uint64_t chain_length(uint64_t n, double eps) {
  return static_cast<uint64_t>(
      std::ceil(2.0 * static_cast<double>(n) * log2d(4.0 * static_cast<double>(n) / eps)));
}

uint64_t rejection_budget(uint64_t n, double delta, double eta) {
  double ratio = static_cast<double>(n) / delta;
  return static_cast<uint64_t>(
      std::ceil(std::pow(ratio, eta / 10.0) * log2d(ratio)));
}

void fill_common(RegimeParams& p) {
  p.zeta = std::pow(0.5, 20.0 + p.xi / 3.0);
  double kd = static_cast<double>(std::max(p.k, 1u));
  double dd = static_cast<double>(std::max(p.d, 1u));
  p.eta = p.zeta * std::pow(1.0 / (dd * kd), 9.0);
  p.s = 36.0 * dd * dd * dd * dd * kd * kd * kd * kd * kd;
  p.k_gamma = static_cast<uint32_t>(std::ceil(4.0 * p.k_beta / 9.0));
}

}  // namespace

bool regime_holds(uint32_t k, uint32_t d, double xi) {
  if (k < 1 || d < 1)
    fail(ErrorCode::kInvalidArgument, "k and d must be >= 1");
  if (xi < 0) fail(ErrorCode::kInvalidArgument, "xi must be >= 0");
  return static_cast<double>(k) >=
         20.0 * log2d(k) + 20.0 * log2d(d) + 60.0 + xi;
}

RegimeParams derive_params(uint64_t n, uint32_t k, uint32_t d, double eps,
                           double xi) {
  if (!(eps > 0.0 && eps < 1.0))
    fail(ErrorCode::kInvalidArgument, "epsilon must lie in (0,1)");
  if (!regime_holds(k, d, xi))
    fail(ErrorCode::kRegime,
         "regime violated: k=" + std::to_string(k) + " d=" + std::to_string(d) +
             " fails k >= 20 log k + 20 log d + 60 + xi");
  RegimeParams p;
  p.mode = ParamMode::kStrict;
  p.n = n;
  p.k = k;
  p.d = d;
  p.epsilon = eps;
  p.xi = xi;
  p.k_alpha = static_cast<uint32_t>(std::floor(0.1133 * k));
  p.k_beta = static_cast<uint32_t>(std::floor(0.5097 * k));
  p.T = chain_length(n, eps);
  p.delta = eps / (4.0 * static_cast<double>(p.T + 1));
  fill_common(p);
  p.R = rejection_budget(n, p.delta, p.eta);
  return p;
}

RegimeParams manual_params(uint64_t n, uint32_t k, uint32_t d, double eps,
                           double xi, const ManualOverrides& ov) {
  if (!(eps > 0.0 && eps < 1.0))
    fail(ErrorCode::kInvalidArgument, "epsilon must lie in (0,1)");
  if (ov.k_alpha < 1 || ov.k_beta < 1)
    fail(ErrorCode::kInvalidArgument, "k_alpha and k_beta must be >= 1");
  // k == 0 means a clause-free formula; the per-clause budget is vacuous
  if (k > 0 && ov.k_alpha + ov.k_beta > k)
    fail(ErrorCode::kInvalidArgument,
         "k_alpha + k_beta = " + std::to_string(ov.k_alpha + ov.k_beta) +
             " exceeds clause width " + std::to_string(k));
  RegimeParams p;
  p.mode = ParamMode::kManual;
  p.n = n;
  p.k = k;
  p.d = std::max(d, 1u);
  p.epsilon = eps;
  p.xi = xi;
  p.k_alpha = ov.k_alpha;
  p.k_beta = ov.k_beta;
  p.T = ov.T ? *ov.T : chain_length(n, eps);
  if (ov.delta) {
    if (!(*ov.delta > 0.0 && *ov.delta < 1.0))
      fail(ErrorCode::kInvalidArgument, "delta must lie in (0,1)");
    p.delta = *ov.delta;
  } else {
    p.delta = eps / (4.0 * static_cast<double>(p.T + 1));
  }
  fill_common(p);
  if (ov.eta) {
    if (!(*ov.eta > 0.0 && *ov.eta < 1.0))
      fail(ErrorCode::kInvalidArgument, "eta must lie in (0,1)");
    p.eta = *ov.eta;
  }
  p.R = ov.R ? *ov.R : rejection_budget(n, p.delta, p.eta);
  if (p.R < 1) fail(ErrorCode::kInvalidArgument, "R must be >= 1");
  return p;
}

}  // namespace ksat
