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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ksat/error.hpp"
#include "ksat/regime.hpp"

using namespace ksat;

TEST_CASE("regime inequality") {
  CHECK(regime_holds(256, 1, 0));   // 256 >= 20*8 + 60
  CHECK_FALSE(regime_holds(60, 1, 0));
  CHECK_FALSE(regime_holds(1, 1, 0));
  CHECK(regime_holds(240, 1, 0));   // 240 >= 20*log2(240) + 60 ~ 218.1
  CHECK_FALSE(regime_holds(240, 8, 0));
  CHECK_THROWS_AS(regime_holds(0, 1, 0), Error);
  CHECK_THROWS_AS(regime_holds(4, 1, -1.0), Error);
}

TEST_CASE("regime is monotone in k beyond 30") {
  for (uint32_t d : {1u, 2u, 8u}) {
    bool seen_true = false;
    for (uint32_t k = 30; k <= 1500; ++k) {
      bool now = regime_holds(k, d, 0);
      if (seen_true) CHECK(now);
      if (now) seen_true = true;
    }
  }
}

TEST_CASE("derived marking fractions") {
  RegimeParams p60 = derive_params(100, 256, 1, 0.5, 0);
  CHECK(p60.k_alpha == 29);   // floor(0.1133 * 256)
  CHECK(p60.k_beta == 130);   // floor(0.5097 * 256)

  RegimeParams p240 = derive_params(100, 240, 1, 0.5, 0);
  CHECK(p240.k_alpha == 27);
  CHECK(p240.k_beta == 122);

  // out of regime the same fractions come from the manual path
  ManualOverrides ov;
  ov.k_alpha = static_cast<uint32_t>(std::floor(0.1133 * 60));
  ov.k_beta = static_cast<uint32_t>(std::floor(0.5097 * 60));
  CHECK(ov.k_alpha == 6);
  CHECK(ov.k_beta == 30);
  RegimeParams m = manual_params(100, 60, 1, 0.5, 0, ov);
  CHECK(m.k_alpha == 6);
  CHECK(m.k_beta == 30);
}

TEST_CASE("chain length and per-call budget") {
  RegimeParams p = derive_params(8, 256, 1, 0.5, 0);
  CHECK(p.T == 96);  // ceil(16 * log2(64))
  CHECK(p.delta == doctest::Approx(0.5 / 388.0).epsilon(1e-15));
  // delta * 4(T+1) = epsilon exactly
  CHECK(std::abs(p.delta * 4.0 * (p.T + 1) - 0.5) <= 1e-12 * 0.5);
}

TEST_CASE("eta stays within its theoretical band") {
  for (uint32_t k : {1u, 2u, 60u, 240u, 1000u}) {
    for (uint32_t d : {1u, 3u, 50u}) {
      for (double xi : {0.0, 1.0, 30.0}) {
        ManualOverrides ov;
        ov.k_alpha = 1;
        ov.k_beta = 1;
        if (k < 2) continue;
        RegimeParams p = manual_params(10, k, d, 0.5, xi, ov);
        CHECK(p.eta > 0.0);
        CHECK(p.eta <= std::pow(0.5, 20.0));
      }
    }
  }
}

TEST_CASE("manual overrides") {
  ManualOverrides ov;
  ov.k_alpha = 1;
  ov.k_beta = 2;
  RegimeParams p = manual_params(16, 4, 2, 0.25, 0, ov);
  CHECK(p.mode == ParamMode::kManual);
  CHECK(p.k_alpha == 1);
  CHECK(p.k_beta == 2);
  CHECK(p.T == static_cast<uint64_t>(
                   std::ceil(32.0 * std::log2(4 * 16 / 0.25))));

  ov.T = 10000;
  RegimeParams q = manual_params(16, 4, 2, 0.25, 0, ov);
  CHECK(q.T == 10000);

  ov.k_alpha = 3;
  CHECK_THROWS_AS(manual_params(16, 4, 2, 0.25, 0, ov), Error);
}

TEST_CASE("derived auxiliary quantities") {
  RegimeParams p = derive_params(100, 240, 1, 0.5, 0);
  CHECK(p.zeta == doctest::Approx(std::pow(0.5, 20.0)));
  CHECK(p.s == doctest::Approx(36.0 * std::pow(240.0, 5)));
  CHECK(p.k_gamma == (p.k_beta * 4 + 8) / 9);  // ceil(4/9 * 122) = 55
  CHECK(p.k_gamma == 55);
  CHECK(p.R >= 1);
}

TEST_CASE("strict derivation refuses an out-of-regime pair") {
  CHECK_THROWS_AS(derive_params(100, 60, 1, 0.5, 0), Error);
  CHECK_THROWS_AS(derive_params(100, 256, 1, 1.5, 0), Error);
}
