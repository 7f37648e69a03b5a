#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tfnp/bitvec.hpp"
#include "tfnp/circuit.hpp"

namespace tfnp {

// An instance of a registered problem. Circuit problems carry one or more
// circuits (e.g. C and D for Lossy); numeric problems carry only `aux`.
struct Instance {
  std::string problem;
  std::vector<Circuit> circuits;
  BitVec aux;

  bool has_oracle_gates() const;
  std::size_t oracle_count() const;
  std::string oracle_problem() const;  // empty if none
};

// Black-box access the verifiers use to query instance circuits.
// nullopt aborts the verification (used by the lifted verifier).
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::optional<BitVec> eval(std::size_t circuit, const BitVec& x) = 0;
};

class PlainEvaluator final : public Evaluator {
 public:
  explicit PlainEvaluator(const Instance& inst) : inst_(inst) {}
  std::optional<BitVec> eval(std::size_t circuit, const BitVec& x) override;

 private:
  const Instance& inst_;
};

enum class Verdict { Accept, Reject, Malformed, Aborted };
const char* verdict_name(Verdict v);

// Shape of a table-backed query encoding with size parameter k.
struct Layout {
  struct Fn {
    std::size_t in, out;
  };
  std::vector<Fn> fns;
  std::size_t aux = 0;
  std::size_t length() const;
};

class Problem {
 public:
  virtual ~Problem() = default;
  virtual std::string id() const = 0;

  // Size parameter n of an instance (input width of the main circuit, or |x|).
  virtual std::size_t size_param(const Instance& inst) const;
  virtual std::size_t solution_length(std::size_t n) const = 0;
  std::size_t solution_length(const Instance& inst) const { return solution_length(size_param(inst)); }

  // Throws MalformedError when circuit widths do not fit the problem.
  virtual void validate(const Instance& inst) const;

  // Runs the verifier; `cand` must have the right length (else Malformed).
  virtual Verdict check(const Instance& inst, const BitVec& cand, Evaluator& ev) const = 0;

  // Lexicographically first solution computed without enumeration, if supported.
  virtual std::optional<BitVec> first_solution(const Instance&) const { return std::nullopt; }

  // Query codec: table layout per size parameter, and size parameter per query length.
  virtual std::size_t min_param() const { return 1; }
  virtual Layout layout(std::size_t k) const = 0;
  virtual std::size_t param_for_length(std::size_t z) const;
  virtual Instance decode_query(const BitVec& u) const;
  virtual BitVec encode_query(const Instance& inst) const;
  std::size_t answer_length(std::size_t z) const { return solution_length(param_for_length(z)); }

  // Whether circuits of the given sizes form a legal instance (used by generators).
  virtual Layout instance_layout(std::size_t n) const { return layout(n); }
};

const Problem& problem(const std::string& id);  // throws MalformedError on unknown ids
std::vector<std::string> problem_ids();

Verdict verify(const Instance& inst, const BitVec& cand);

// Miller-Rabin, deterministic below 2^64; probabilistic (40 rounds) above.
bool is_prime_u64(std::uint64_t n);
bool is_prime_bits(const BitVec& v);

// Normalized neighbour list of vertex v given its raw Set<=2 output.
std::vector<BitVec> bipartite_neighbors(const BitVec& v, const BitVec& out);

// Lifts a table layout into an instance with table circuits.
Instance instance_from_tables(const std::string& problem, const Layout& layout, const BitVec& bits);

}  // namespace tfnp
