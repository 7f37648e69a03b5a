#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tfnp/oracle_eval.hpp"
#include "tfnp/problems.hpp"

namespace tfnp {

using WitnessRow = std::vector<BitVec>;

// A solution y together with one witness row per verifier evaluation
// (rows stay empty for oracle-free instances).
struct Solution {
  BitVec y;
  std::vector<WitnessRow> rows;
  friend bool operator==(const Solution&, const Solution&) = default;
};

struct LiftedVerdict {
  Verdict verdict = Verdict::Reject;
  std::string reason;
  std::size_t rows_used = 0;
  bool accepted() const { return verdict == Verdict::Accept; }
};

// Runs the base verifier, answering its i-th evaluation with C*(x, rows[i]) and a
// ledger shared by all rows. Exactly one row per evaluation is required.
LiftedVerdict verify_lifted(const Instance& inst, const Solution& sol);

// verify_lifted for instances with oracle gates, plain verification otherwise.
LiftedVerdict verify_solution(const Instance& inst, const Solution& sol);

// Answers an oracle query, or nullopt if unknown.
using AnswerFn = std::function<std::optional<BitVec>(const std::string& problem, const BitVec& query)>;

// Runs the verifier on y with gate answers from `answers`, recording them as rows.
// Returns nullopt unless the verifier accepts.
std::optional<Solution> package_rows(const Instance& inst, const BitVec& y, const AnswerFn& answers);

// How a lifted solver instantiates the oracle.
enum class AnswerPolicy { Canonical, RandomValid };

class Instantiation {
 public:
  Instantiation(AnswerPolicy policy, std::uint64_t seed) : policy_(policy), seed_(seed) {}
  const BitVec& answer(const std::string& problem, const BitVec& query);
  AnswerFn fn() {
    return [this](const std::string& p, const BitVec& q) { return std::optional<BitVec>(answer(p, q)); };
  }

 private:
  AnswerPolicy policy_;
  std::uint64_t seed_;
  QueryTable canonical_;
  std::map<std::pair<std::string, BitVec>, BitVec> chosen_;
};

struct LiftedSolveResult {
  Solution solution;
  std::size_t candidates = 0;
};

// Brute force over y under a fixed instantiation of the oracle.
LiftedSolveResult lifted_solve(const Instance& inst, Instantiation& inst_oracle,
                               std::optional<std::size_t> cap = std::nullopt);

// Solves any instance: brute force for oracle-free ones, canonical lifting otherwise.
Solution solve_any(const Instance& inst);

}  // namespace tfnp
