#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tfnp/circuit.hpp"
#include "tfnp/problems.hpp"

namespace tfnp {

// query -> answer pairs recorded across evaluations; a key is never remapped.
class AnswerLedger {
 public:
  // Returns false when the query already carries a different answer.
  bool record(const std::string& problem, const BitVec& query, const BitVec& answer);
  const BitVec* find(const std::string& problem, const BitVec& query) const;
  std::size_t size() const { return map_.size(); }
  const auto& entries() const { return map_; }

 private:
  std::map<std::pair<std::string, BitVec>, BitVec> map_;
};

struct TraceEntry {
  std::size_t gate;  // oracle ordinal within the circuit
  std::string problem;
  BitVec query;
  BitVec answer;
  std::size_t witness;  // C_*: 1-based witness index used, 0 for the all-zero answer
};

enum class OutcomeKind { Result, Bottom, Error };

struct EvalOutcome {
  OutcomeKind kind = OutcomeKind::Result;
  BitVec output;
  bool inconsistent = false;
  std::size_t bottom_gate = 0;  // 1-based ordinal of the first invalid witness
  std::size_t error_index = 0;  // C_*: least unused witness index (1-based)
  std::string error_problem;
  BitVec error_query;
  std::vector<TraceEntry> trace;
  std::set<std::size_t> used;
};

// Throws MalformedError unless every oracle gate names a known problem and has
// output width equal to that problem's answer length for the query width.
void validate_oracle_gates(const Circuit& c);
void validate_instance(const Instance& inst);

bool is_valid_answer(const std::string& problem, const BitVec& query, const BitVec& answer);

// C*: gate i outputs w_i when w_i is a valid answer, else the result is Bottom.
// Consistency is checked against `ledger` (a fresh one when null), which is updated.
EvalOutcome eval_c_star(const Circuit& c, const BitVec& x, const std::vector<BitVec>& w,
                        AnswerLedger* ledger = nullptr);

// C_*: each gate answers all-zero if valid, else the first valid witness from
// `pool`; if none is valid the result is Error(least unused index, query).
EvalOutcome eval_c_sub_star(const Circuit& c, const BitVec& x, const std::vector<BitVec>& pool,
                            std::set<std::size_t>* used = nullptr);

// Gate answers in evaluation order; replaying them through C* gives the same output.
std::vector<BitVec> used_witnesses_in_order(const EvalOutcome& o);

struct SolveError : std::runtime_error {
  enum class Kind { CapExceeded, TotalityViolation };
  SolveError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// Candidate cap: TFNP_FORGE_CAP or 2^16.
std::size_t forge_cap();

// Lexicographically first solution of an oracle-free instance.
BitVec brute_solve(const Instance& inst, std::optional<std::size_t> cap = std::nullopt);

// Memo of canonical (lexicographically first) oracle answers.
class QueryTable {
 public:
  const BitVec& answer(const std::string& problem, const BitVec& query);
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::pair<std::string, BitVec>, BitVec> map_;
};

// Evaluates c answering each oracle query with its canonical solution.
EvalOutcome canonical_instantiation(const Circuit& c, const BitVec& x, QueryTable& table);

}  // namespace tfnp
