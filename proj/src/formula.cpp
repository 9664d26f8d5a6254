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

#include "ksat/formula.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace ksat {

CnfFormula CnfFormula::make(uint32_t num_vars, std::vector<Clause> clauses) {
  CnfFormula f;
  f.num_vars_ = num_vars;
  f.clauses_ = std::move(clauses);
  f.incidence_.assign(num_vars, {});
  f.width_min_ = f.clauses_.empty() ? 0 : UINT32_MAX;
  f.width_max_ = 0;
  std::vector<uint32_t> seen(num_vars, UINT32_MAX);
  for (uint32_t cid = 0; cid < f.clauses_.size(); ++cid) {
    const Clause& c = f.clauses_[cid];
    if (c.literals.empty())
      fail(ErrorCode::kInvalidArgument, "empty clause " + std::to_string(cid));
    for (const Literal& lit : c.literals) {
      if (lit.var >= num_vars)
        fail(ErrorCode::kInvalidArgument,
             "variable index out of range in clause " + std::to_string(cid));
      if (seen[lit.var] == cid)
        fail(ErrorCode::kInvalidArgument,
             "duplicate variable in clause " + std::to_string(cid));
      seen[lit.var] = cid;
      f.incidence_[lit.var].push_back(cid);
    }
    uint32_t w = static_cast<uint32_t>(c.literals.size());
    f.width_min_ = std::min(f.width_min_, w);
    f.width_max_ = std::max(f.width_max_, w);
  }
  for (const auto& inc : f.incidence_)
    f.max_degree_ = std::max(f.max_degree_, static_cast<uint32_t>(inc.size()));
  return f;
}

ParseResult parse_dimacs(std::string_view text) {
  std::vector<Clause> clauses;
  long long n = -1, m = -1;
  size_t pos = 0;
  const size_t len = text.size();
  Clause current;
  std::vector<std::string> warnings;

  auto skip_ws = [&](bool stop_at_nl) {
    while (pos < len && (text[pos] == ' ' || text[pos] == '\t' ||
                         text[pos] == '\r' || (!stop_at_nl && text[pos] == '\n')))
      ++pos;
  };

  while (pos < len) {
    skip_ws(false);
    if (pos >= len) break;
    char ch = text[pos];
    if (ch == 'c') {
      while (pos < len && text[pos] != '\n') ++pos;
      continue;
    }
    if (ch == 'p') {
      if (n >= 0) fail(ErrorCode::kParse, "duplicate DIMACS header");
      size_t eol = text.find('\n', pos);
      std::string line(text.substr(pos, eol == std::string_view::npos
                                            ? std::string_view::npos
                                            : eol - pos));
      std::istringstream hs(line);
      std::string p, cnf;
      hs >> p >> cnf >> n >> m;
      if (hs.fail() || p != "p" || cnf != "cnf" || n < 0 || m < 0)
        fail(ErrorCode::kParse, "malformed DIMACS header: " + line);
      pos = (eol == std::string_view::npos) ? len : eol + 1;
      continue;
    }
    if (ch == '-' || (ch >= '0' && ch <= '9')) {
      if (n < 0) fail(ErrorCode::kParse, "clause before DIMACS header");
      long long lit = 0;
      auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + len, lit);
      if (ec != std::errc())
        fail(ErrorCode::kParse, "malformed literal");
      pos = static_cast<size_t>(ptr - text.data());
      if (lit == 0) {
        clauses.push_back(std::move(current));
        current = Clause{};
        continue;
      }
      long long var = lit < 0 ? -lit : lit;
      if (var > n)
        fail(ErrorCode::kParse,
             "variable index " + std::to_string(var) + " out of range");
      current.literals.push_back(
          Literal{static_cast<uint32_t>(var - 1), lit > 0});
      continue;
    }
    fail(ErrorCode::kParse,
         std::string("unexpected character '") + ch + "' in DIMACS input");
  }
  if (n < 0) fail(ErrorCode::kParse, "missing DIMACS header");
  if (!current.literals.empty())
    fail(ErrorCode::kParse, "unterminated clause at end of input");
  if (static_cast<long long>(clauses.size()) != m)
    warnings.push_back("header declares " + std::to_string(m) +
                       " clauses, found " + std::to_string(clauses.size()));

  // duplicate-variable detection (also covers x and !x in one clause)
  for (uint32_t cid = 0; cid < clauses.size(); ++cid) {
    std::vector<uint32_t> vars;
    for (const Literal& l : clauses[cid].literals) vars.push_back(l.var);
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
      fail(ErrorCode::kParse,
           "duplicate variable in clause " + std::to_string(cid + 1));
  }

  return ParseResult{CnfFormula::make(static_cast<uint32_t>(n), std::move(clauses)),
                     std::move(warnings)};
}

std::string emit_dimacs(const CnfFormula& f) {
  std::string out = "p cnf " + std::to_string(f.num_vars()) + " " +
                    std::to_string(f.num_clauses()) + "\n";
  for (const Clause& c : f.clauses()) {
    for (const Literal& l : c.literals) {
      if (!l.positive) out += '-';
      out += std::to_string(l.var + 1);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfFormula generate_random(uint32_t n, uint32_t m, uint32_t k, uint32_t d_cap,
                           RandomSource& rng) {
  if (k == 0 || k > n)
    fail(ErrorCode::kInvalidArgument, "clause width must be in [1, n]");
  if (d_cap == 0) fail(ErrorCode::kInvalidArgument, "degree cap must be >= 1");
  if (static_cast<uint64_t>(m) * k > static_cast<uint64_t>(n) * d_cap)
    fail(ErrorCode::kInvalidArgument, "m*k exceeds n*d_cap");

  constexpr int kMaxRetries = 64;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::vector<uint32_t> degree(n, 0);
    std::vector<Clause> clauses;
    clauses.reserve(m);
    bool stuck = false;
    for (uint32_t c = 0; c < m && !stuck; ++c) {
      std::vector<uint32_t> pool;
      for (uint32_t v = 0; v < n; ++v)
        if (degree[v] < d_cap) pool.push_back(v);
      if (pool.size() < k) {
        stuck = true;
        break;
      }
      Clause clause;
      for (uint32_t i = 0; i < k; ++i) {
        uint64_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        clause.literals.push_back(Literal{pool[i], rng.next_bit()});
        ++degree[pool[i]];
      }
      std::sort(clause.literals.begin(), clause.literals.end(),
                [](const Literal& a, const Literal& b) { return a.var < b.var; });
      clauses.push_back(std::move(clause));
    }
    if (!stuck) return CnfFormula::make(n, std::move(clauses));
  }
  fail(ErrorCode::kInfeasible,
       "could not place clauses within the degree cap after bounded retries");
}

std::vector<uint32_t> PartialAssignment::domain() const {
  std::vector<uint32_t> vars;
  vars.reserve(assigned_count_);
  for (uint32_t v = 0; v < values_.size(); ++v)
    if (values_[v] >= 0) vars.push_back(v);
  return vars;
}

void simplify_into(const CnfFormula& f, const PartialAssignment& x,
                   SimplifiedFormula& sf) {
  sf.base = &f;
  sf.assignment = &x;
  sf.residual_of_clause.assign(f.num_clauses(), -1);
  size_t used = 0;
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
    const Clause& c = f.clauses()[cid];
    bool satisfied = false;
    ResidualClause* rc;
    if (used < sf.residuals.size()) {
      rc = &sf.residuals[used];
      rc->literals.clear();
    } else {
      sf.residuals.emplace_back();
      rc = &sf.residuals.back();
    }
    rc->orig_id = cid;
    for (const Literal& l : c.literals) {
      if (x.assigned(l.var)) {
        if (x.value(l.var) == l.positive) {
          satisfied = true;
          break;
        }
      } else {
        rc->literals.push_back(l);
      }
    }
    if (satisfied) continue;
    sf.residual_of_clause[cid] = static_cast<int32_t>(used);
    ++used;
  }
  sf.residuals.resize(used);
}

SimplifiedFormula simplify(const CnfFormula& f, const PartialAssignment& x) {
  SimplifiedFormula sf;
  simplify_into(f, x, sf);
  return sf;
}

void components_touching_into(const SimplifiedFormula& sf,
                              const std::vector<uint32_t>& s,
                              uint64_t edge_cap, ComponentsResult& result) {
  const CnfFormula& f = *sf.base;
  result.too_large = false;
  result.offending_clause = 0;
  if (result.var_epoch.size() < f.num_vars())
    result.var_epoch.assign(f.num_vars(), 0);
  if (result.clause_epoch.size() < sf.residuals.size())
    result.clause_epoch.assign(sf.residuals.size(), 0);
  if (++result.epoch == 0) {  // wrapped: reset the stamps
    std::fill(result.var_epoch.begin(), result.var_epoch.end(), 0);
    std::fill(result.clause_epoch.begin(), result.clause_epoch.end(), 0);
    result.epoch = 1;
  }
  auto& stack = result.stack;
  size_t used = 0;

  for (uint32_t seed : s) {
    if (!sf.is_free(seed))
      fail(ErrorCode::kInvalidArgument,
           "seed variable is assigned in the partial assignment");
    if (result.var_epoch[seed] == result.epoch) continue;

    Component* comp;
    if (used < result.components.size()) {
      comp = &result.components[used];
      comp->vars.clear();
      comp->clause_ids.clear();
    } else {
      result.components.emplace_back();
      comp = &result.components.back();
    }
    stack.clear();
    result.var_epoch[seed] = result.epoch;
    stack.push_back(seed);
    comp->vars.push_back(seed);

    while (!stack.empty()) {
      uint32_t v = stack.back();
      stack.pop_back();
      for (uint32_t cid : f.clauses_of(v)) {
        int32_t rid = sf.residual_of_clause[cid];
        if (rid < 0 || result.clause_epoch[rid] == result.epoch) continue;
        result.clause_epoch[rid] = result.epoch;
        comp->clause_ids.push_back(static_cast<uint32_t>(rid));
        if (comp->clause_ids.size() > edge_cap) {
          result.too_large = true;
          result.offending_clause = cid;
          result.components.resize(0);
          return;
        }
        for (const Literal& l : sf.residuals[rid].literals) {
          if (result.var_epoch[l.var] != result.epoch) {
            result.var_epoch[l.var] = result.epoch;
            stack.push_back(l.var);
            comp->vars.push_back(l.var);
          }
        }
      }
    }
    std::sort(comp->vars.begin(), comp->vars.end());
    std::sort(comp->clause_ids.begin(), comp->clause_ids.end());
    ++used;
  }
  result.components.resize(used);
}

ComponentsResult components_touching(const SimplifiedFormula& sf,
                                     const std::vector<uint32_t>& s,
                                     uint64_t edge_cap) {
  ComponentsResult result;
  components_touching_into(sf, s, edge_cap, result);
  return result;
}

bool clause_satisfied(const Clause& c, const PartialAssignment& x) {
  for (const Literal& l : c.literals)
    if (x.assigned(l.var) && x.value(l.var) == l.positive) return true;
  return false;
}

bool satisfies(const CnfFormula& f, const PartialAssignment& x) {
  for (const Clause& c : f.clauses())
    if (!clause_satisfied(c, x)) return false;
  return true;
}

}  // namespace ksat
