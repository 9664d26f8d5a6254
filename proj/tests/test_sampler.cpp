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

#include "ksat/oracle.hpp"
#include "ksat/sampler.hpp"
#include "support/brute.hpp"

using namespace ksat;
using testing::make_formula;

namespace {

RegimeParams desk(uint32_t n, uint32_t k, uint32_t d, uint32_t ka, uint32_t kb,
                  uint64_t T, uint64_t R = 200) {
  ManualOverrides ov;
  ov.k_alpha = ka;
  ov.k_beta = kb;
  ov.T = T;
  ov.R = R;
  return manual_params(n, k, d, 0.1, 0, ov);
}

uint64_t pack_pairs(const std::vector<std::pair<uint32_t, bool>>& values) {
  uint64_t key = 0;
  for (size_t i = 0; i < values.size(); ++i)
    key |= static_cast<uint64_t>(values[i].second) << i;
  return key;
}

}  // namespace

TEST_CASE("rejection sampling on an unconstrained component") {
  CnfFormula f = make_formula(2, {});
  PartialAssignment x(2);
  auto sf = simplify(f, x);
  Component comp{{0, 1}, {}};
  RandomSource rng(1, 0);
  auto draw = rejection_sampling(sf, comp, 1, Bias(), rng);
  REQUIRE(draw.has_value());
  CHECK(draw->size() == 2);
}

TEST_CASE("rejection sampling respects a unit residual clause") {
  CnfFormula f = make_formula(1, {{1}});
  PartialAssignment x(1);
  auto sf = simplify(f, x);
  Component comp{{0}, {0}};
  RandomSource rng(2, 0);
  int successes = 0;
  for (int i = 0; i < 300; ++i) {
    auto draw = rejection_sampling(sf, comp, 4, Bias(), rng);
    if (draw) {
      ++successes;
      CHECK((*draw)[0] == 1);
    }
  }
  CHECK(successes > 250);
}

TEST_CASE("rejection sampling never succeeds on a falsified residual") {
  CnfFormula f = make_formula(2, {{1, 2}});
  PartialAssignment x(2);
  x.set(0, false);
  x.set(1, false);
  auto sf = simplify(f, x);
  REQUIRE(sf.residuals.size() == 1);
  Component comp{{}, {0}};
  RandomSource rng(3, 0);
  CHECK_FALSE(rejection_sampling(sf, comp, 64, Bias(), rng).has_value());
}

TEST_CASE("conditioned on success the law is uniform over solutions") {
  CnfFormula f = make_formula(2, {{1, 2}});
  PartialAssignment x(2);
  auto sf = simplify(f, x);
  Component comp{{0, 1}, {0}};
  RandomSource rng(5, 0);
  std::vector<uint64_t> samples;
  while (samples.size() < 100000) {
    auto draw = rejection_sampling(sf, comp, 1, Bias(), rng);
    if (!draw) continue;
    samples.push_back((*draw)[0] | (uint64_t((*draw)[1]) << 1));
  }
  oracle::ExactDistribution target{{0, 1},
                                   {0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3}};
  CHECK(oracle::empirical_tv(samples, target) <= 0.02);
}

TEST_CASE("subroutine on an isolated variable is a clean bias draw") {
  CnfFormula f = make_formula(3, {{2, 3}});
  RegimeParams p = desk(3, 2, 1, 1, 1, 0);
  PartialAssignment x(3);
  RandomSource rng(7, 0);
  int ones = 0;
  for (int i = 0; i < 20000; ++i) {
    auto r = sample_subroutine(f, p.delta, x, {0}, Bias(), p, rng);
    REQUIRE_FALSE(r.fallback);
    REQUIRE(r.values.size() == 1);
    ones += r.values[0].second;
  }
  CHECK(std::abs(ones / 20000.0 - 0.5) < 0.02);
}

TEST_CASE("subroutine output follows the conditional law when it succeeds") {
  RandomSource gen(41, kStreamGenerate);
  CnfFormula f = generate_random(10, 5, 3, 3, gen);
  RegimeParams p = desk(10, 3, 3, 1, 1, 0);
  PartialAssignment x(10);
  x.set(1, true);
  x.set(4, false);
  std::vector<uint32_t> s = {0, 2, 3};

  auto target = oracle::exact_conditional(f, x, s);
  RandomSource rng(11, 0);
  std::vector<uint64_t> samples;
  int fallbacks = 0;
  for (int i = 0; i < 40000; ++i) {
    auto r = sample_subroutine(f, p.delta, x, s, Bias(), p, rng);
    if (r.fallback) {
      ++fallbacks;
      continue;
    }
    samples.push_back(pack_pairs(r.values));
  }
  CHECK(fallbacks < 400);
  CHECK(oracle::empirical_tv(samples, target) <= 0.03);
}

TEST_CASE("the conditional law survives heavy rejection pressure") {
  // with R = 2 most calls fall back; the survivors must still follow the
  // exact conditional law
  CnfFormula f = make_formula(4, {{1, 2}, {-2, 3, 4}});
  RegimeParams p = desk(4, 2, 2, 1, 1, 0, 2);
  PartialAssignment x(4);
  std::vector<uint32_t> s = {0, 1, 2, 3};
  auto target = oracle::exact_conditional(f, x, s);
  RandomSource rng(31, 0);
  std::vector<uint64_t> kept;
  int fallbacks = 0;
  for (int i = 0; i < 200000; ++i) {
    auto r = sample_subroutine(f, p.delta, x, s, Bias(), p, rng);
    if (r.fallback) {
      ++fallbacks;
      continue;
    }
    kept.push_back(pack_pairs(r.values));
  }
  CHECK(fallbacks > 1000);  // the pressure is real
  REQUIRE(kept.size() > 50000);
  CHECK(oracle::empirical_tv(kept, target) <= 0.02);
}

TEST_CASE("a contrived delta forces the too-large fallback") {
  CnfFormula f = make_formula(4, {{1, 2}, {2, 3}, {3, 4}});
  RegimeParams p = desk(4, 2, 2, 1, 1, 0);
  PartialAssignment x(4);
  RandomSource rng(13, 0);
  // delta above n drives the cap to zero, so any clause is oversize
  auto r = sample_subroutine(f, 8.0, x, {0}, Bias(), p, rng);
  CHECK(r.fallback);
  CHECK(r.kind == FallbackKind::kTooLarge);
  REQUIRE(r.values.size() == 1);
}

TEST_CASE("glauber run with an empty marking returns nothing") {
  CnfFormula f = make_formula(3, {{1, 2, 3}});
  RegimeParams p = desk(3, 3, 1, 1, 1, 50);
  Marking m;
  m.marked.assign(3, false);
  m.per_clause_marked = {0};
  RandomSource rng(17, 0);
  auto [x, report] = glauber_run(f, m, p, Bias(), rng, MarginalMode::kComponent);
  CHECK(x.domain_size() == 0);
}

TEST_CASE("zero chain steps return the initial draw") {
  CnfFormula f = make_formula(2, {});
  RegimeParams p = desk(2, 0, 1, 1, 1, 0);
  Marking m;
  m.marked.assign(2, true);
  RandomSource rng(19, 0), replay(19, 0);
  auto [x, report] = glauber_run(f, m, p, Bias(), rng, MarginalMode::kComponent);
  CHECK(x.domain_size() == 2);
  CHECK(x.value(0) == Bias().draw(0, replay));
  CHECK(x.value(1) == Bias().draw(1, replay));
}

TEST_CASE("detailed balance of the idealized chain") {
  RandomSource gen(43, kStreamGenerate);
  CnfFormula f = generate_random(8, 4, 3, 2, gen);
  RegimeParams p = desk(8, 3, 2, 1, 1, 10);
  RandomSource mrng(3, 0);
  MarkResult mr = mark_variables(f, p, 0.1, mrng);
  REQUIRE(mr.marking.has_value());
  std::vector<uint32_t> m_vars = mr.marking->marked_vars();
  REQUIRE(!m_vars.empty());

  PartialAssignment empty(8);
  auto mu_m = oracle::exact_conditional(f, empty, m_vars);
  oracle::MarginalOracle backend(f);
  for (uint64_t key = 0; key < mu_m.probs.size(); ++key) {
    for (size_t i = 0; i < m_vars.size(); ++i) {
      uint64_t other = key | (1ULL << i);
      if (other == key) continue;
      PartialAssignment sigma(8);
      for (size_t j = 0; j < m_vars.size(); ++j)
        if (j != i) sigma.set(m_vars[j], (key >> j) & 1);
      double sigma_mass = mu_m.probs[key] + mu_m.probs[other];
      if (sigma_mass == 0) continue;
      double p0 = backend.prob_zero(m_vars[i], sigma);
      double lhs = mu_m.probs[key] * (1.0 - p0);   // key has bit 0 at i
      double rhs = mu_m.probs[other] * p0;
      CHECK(std::abs(lhs - rhs) <=
            1e-9 * std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
    }
  }
}

TEST_CASE("oracle-mode chain reaches the marked marginal") {
  RandomSource gen(47, kStreamGenerate);
  CnfFormula f = generate_random(7, 4, 3, 2, gen);
  uint64_t T = static_cast<uint64_t>(std::ceil(50.0 * 7 * std::log2(7.0)));
  RegimeParams p = desk(7, 3, 2, 1, 1, T);
  RandomSource mrng(5, 0);
  MarkResult mr = mark_variables(f, p, 0.1, mrng);
  REQUIRE(mr.marking.has_value());
  std::vector<uint32_t> m_vars = mr.marking->marked_vars();

  PartialAssignment empty(7);
  auto mu_m = oracle::exact_conditional(f, empty, m_vars);
  oracle::MarginalOracle shared(f);
  std::vector<uint64_t> samples;
  for (int run = 0; run < 30000; ++run) {
    RandomSource rng(run, 100);
    auto [x, report] = glauber_run(f, *mr.marking, p, Bias(), rng,
                                   MarginalMode::kOracle, &shared);
    samples.push_back(oracle::pack_assignment(x, m_vars));
  }
  CHECK(oracle::empirical_tv(samples, mu_m) <= 0.05);
}

TEST_CASE("conditional marginals stay locally uniform on marked contexts") {
  // every clause keeps >= 7 unmarked variables, so with s = k = 8 the
  // conditional marginal of any free variable is within (1/2) e^{1/8}
  CnfFormula f = make_formula(
      10, {{1, -2, 3, 4, -5, 6, 7, 8}, {-3, 4, 5, -6, 7, 8, 9, -10}});
  Marking m;
  m.marked.assign(10, false);
  m.marked[0] = true;  // only in clause 0
  m.marked[8] = true;  // only in clause 1
  m.per_clause_marked = {1, 1};
  REQUIRE(check_condition(f, m, 1, 7));
  std::vector<uint32_t> m_vars = m.marked_vars();
  oracle::MarginalOracle backend(f);
  const double bound = 0.5 * std::exp(1.0 / 8.0) + 1e-12;
  for (uint32_t v = 0; v < f.num_vars(); ++v) {
    for (uint64_t sigma = 0; sigma < (1ULL << m_vars.size()); ++sigma) {
      PartialAssignment ctx(10);
      bool skip = false;
      for (size_t j = 0; j < m_vars.size(); ++j) {
        if (m_vars[j] == v) continue;
        ctx.set(m_vars[j], (sigma >> j) & 1);
      }
      if (ctx.assigned(v)) skip = true;
      if (skip) continue;
      double p0 = backend.prob_zero(v, ctx);
      CHECK(std::max(p0, 1.0 - p0) <= bound);
    }
  }
}

TEST_CASE("full sample on a clause-free formula is uniform") {
  CnfFormula f = make_formula(4, {});
  SampleOptions opts;
  opts.params = desk(4, 0, 1, 1, 1, 20);
  std::vector<uint32_t> all = {0, 1, 2, 3};
  oracle::ExactDistribution target{all,
                                   std::vector<double>(16, 1.0 / 16)};
  std::vector<uint64_t> samples;
  for (int i = 0; i < 30000; ++i) {
    auto r = full_sample(f, 0.1, i, opts);
    CHECK(r.assignment.domain_size() == 4);
    samples.push_back(oracle::pack_assignment(r.assignment, all));
  }
  CHECK(oracle::empirical_tv(samples, target) <= 0.02);
}

TEST_CASE("identical seeds give identical outputs and reports") {
  RandomSource gen(59, kStreamGenerate);
  CnfFormula f = generate_random(12, 6, 3, 3, gen);
  SampleOptions opts;
  opts.params = desk(12, 3, 3, 1, 1, 300);
  auto a = full_sample(f, 0.1, 424242, opts);
  auto b = full_sample(f, 0.1, 424242, opts);
  for (uint32_t v = 0; v < 12; ++v)
    CHECK(a.assignment.value(v) == b.assignment.value(v));
  CHECK(a.report.fallback_toolarge_count == b.report.fallback_toolarge_count);
  CHECK(a.report.fallback_rejection_count ==
        b.report.fallback_rejection_count);
  CHECK(a.marking.marked == b.marking.marked);

  auto c = full_sample(f, 0.1, 424243, opts);
  bool same = true;
  for (uint32_t v = 0; v < 12; ++v)
    same = same && a.assignment.value(v) == c.assignment.value(v);
  CHECK_FALSE(same);
}

TEST_CASE("component-mode full samples satisfy the formula when no fallback fires") {
  RandomSource gen(61, kStreamGenerate);
  CnfFormula f = generate_random(12, 5, 4, 3, gen);
  SampleOptions opts;
  opts.params = desk(12, 4, 3, 1, 2, 200);
  int satisfied = 0;
  for (int i = 0; i < 200; ++i) {
    auto r = full_sample(f, 0.1, i, opts);
    if (r.report.fallback_toolarge_count + r.report.fallback_rejection_count ==
            0 &&
        !r.report.marking_failed)
      CHECK(satisfies(f, r.assignment));
    if (satisfies(f, r.assignment)) ++satisfied;
  }
  CHECK(satisfied >= 195);
}

TEST_CASE("forced fallbacks honor the bias unless told otherwise") {
  CnfFormula f = make_formula(2, {{1, 2}});
  RegimeParams p = desk(2, 2, 1, 1, 1, 0);
  Bias bias;
  bias.set_override(0, 1.0);
  bias.set_override(1, 1.0);

  RandomSource rng(23, 0);
  auto biased = sample_subroutine(f, 8.0, PartialAssignment(2), {0, 1}, bias,
                                  p, rng, false);
  REQUIRE(biased.fallback);
  CHECK(biased.values[0].second);
  CHECK(biased.values[1].second);

  // literal-uniform fallback ignores the bias
  int zeros = 0;
  RandomSource rng2(29, 0);
  for (int i = 0; i < 2000; ++i) {
    auto r = sample_subroutine(f, 8.0, PartialAssignment(2), {0, 1}, bias, p,
                               rng2, true);
    REQUIRE(r.fallback);
    zeros += !r.values[0].second;
  }
  CHECK(zeros > 800);
  CHECK(zeros < 1200);
}
