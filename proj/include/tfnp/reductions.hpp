#pragma once

#include <any>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfnp/lifting.hpp"
#include "tfnp/problems.hpp"

namespace tfnp {

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a reduction breaks its declared discipline (many-one or black-box).
struct HookViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// What a reduction may do to its source instance: evaluate circuits as black
// boxes and query the source oracle B.
class ReductionContext {
 public:
  ReductionContext();
  explicit ReductionContext(AnswerFn answers);

  std::optional<BitVec> answer(const std::string& problem, const BitVec& query);
  std::optional<BitVec> eval(const Instance& inst, std::size_t circuit, const BitVec& x);
  // Evaluator view of `inst` through this context.
  std::unique_ptr<Evaluator> evaluator(const Instance& inst);
  // Source-verifier check of a candidate, evaluated through this context.
  bool accepts(const Instance& inst, const BitVec& y);
  AnswerFn answer_fn() {
    return [this](const std::string& p, const BitVec& q) { return answer(p, q); };
  }

  // Calls to the target-problem oracle; many-one reductions must not make any.
  void set_target_budget(std::size_t calls) { target_budget_ = calls; }
  Solution solve_target(const Instance& target);

  std::size_t evaluations = 0;
  std::size_t oracle_queries = 0;
  std::size_t target_calls = 0;

 private:
  AnswerFn answers_;
  std::shared_ptr<Instantiation> canonical_;
  std::size_t target_budget_ = 0;
};

// Result of the forward map. When `direct` is set the reduction solved the
// source itself and no target call is needed.
struct Image {
  Instance target;
  std::any state;
  std::optional<Solution> direct;
};

struct Reduction {
  std::string name;
  std::string source;         // problem id of the source (the base problem A for lifted sources)
  std::string source_oracle;  // B for A^B sources, empty otherwise
  std::string target;
  bool many_one = true;
  bool black_box = true;
  std::function<Image(const Instance&, ReductionContext&)> forward;
  std::function<std::optional<Solution>(const Instance& src, const Image& img, const Solution& target_sol,
                                        ReductionContext&)>
      backward;
};

// Looks up a registered reduction or builds a combinator expression:
// lift(r), swap(r), chain(r1,r2,...). Throws MalformedError for unknown names.
Reduction find_reduction(const std::string& name);
std::vector<std::string> reduction_names();

// Combinators.
Reduction lift_blackbox_reduction(const Reduction& r);
Reduction swap_oracle(const Reduction& r);
Reduction chain(const std::vector<Reduction>& rs);

// Self-reductions (mutation = "" for the faithful construction).
Reduction lonely_selflow(const std::string& mutation = "");
Reduction iter_selflow(const std::string& mutation = "");
Reduction lossy_selflow(const std::string& mutation = "");
Reduction pad_lossy(std::size_t target_width = 0);

// Target point of the Lonely self-reduction that the flip of the bad-event map
// leaves without a partner: (0, a, 0..0, 1).
BitVec lonely_selflow_orphan(const Image& img);

struct RoundTrip {
  bool ok = false;
  bool direct = false;
  std::string reason;
  Instance target;
  Solution target_solution;
  Solution source_solution;
};

// f, one target call (brute force or canonical lifting), g, and the source verifier.
RoundTrip round_trip(const Reduction& r, const Instance& src, AnswerPolicy target_policy = AnswerPolicy::Canonical,
                     std::uint64_t seed = 0);

}  // namespace tfnp
