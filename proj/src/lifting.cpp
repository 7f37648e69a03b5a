#include "tfnp/lifting.hpp"

#include <random>
#include <unordered_map>

namespace tfnp {

namespace {

class RowsEvaluator final : public Evaluator {
 public:
  RowsEvaluator(const Instance& inst, const std::vector<WitnessRow>& rows) : inst_(inst), rows_(rows) {}

  std::optional<BitVec> eval(std::size_t circuit, const BitVec& x) override {
    if (next_ >= rows_.size()) return fail(Verdict::Malformed, "fewer witness rows than verifier evaluations");
    const auto& c = inst_.circuits.at(circuit);
    const auto& row = rows_[next_++];
    if (row.size() != c.oracle_count()) return fail(Verdict::Malformed, "witness row has the wrong length");
    auto widths = c.oracle_widths();
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i].size() != widths[i]) return fail(Verdict::Malformed, "witness has the wrong width");
    auto r = eval_c_star(c, x, row, &ledger_);
    if (r.kind == OutcomeKind::Bottom)
      return fail(Verdict::Reject, "row " + std::to_string(next_ - 1) + ": witness " +
                                       std::to_string(r.bottom_gate) + " is not a valid answer");
    if (r.inconsistent) return fail(Verdict::Reject, "row " + std::to_string(next_ - 1) + ": inconsistent answers");
    return r.output;
  }

  std::size_t used() const { return next_; }
  Verdict failure = Verdict::Accept;
  std::string reason;

 private:
  std::optional<BitVec> fail(Verdict v, std::string why) {
    failure = v;
    reason = std::move(why);
    return std::nullopt;
  }
  const Instance& inst_;
  const std::vector<WitnessRow>& rows_;
  std::size_t next_ = 0;
  AnswerLedger ledger_;
};

class AnswerEvaluator final : public Evaluator {
 public:
  AnswerEvaluator(const Instance& inst, const AnswerFn& answers, bool record)
      : inst_(inst), answers_(answers), record_(record), memo_(inst.circuits.size()) {}

  std::optional<BitVec> eval(std::size_t circuit, const BitVec& x) override {
    if (!record_) {
      auto it = memo_[circuit].find(x);
      if (it != memo_[circuit].end()) return it->second;
    }
    WitnessRow row;
    auto r = inst_.circuits.at(circuit).evaluate(x, [&](std::size_t, const Gate& g, const BitVec& q) {
      auto a = answers_(g.tag, q);
      if (a) row.push_back(*a);
      return a;
    });
    if (!r) return std::nullopt;
    if (record_) rows.push_back(std::move(row));
    else memo_[circuit].emplace(x, *r);
    return r;
  }

  std::vector<WitnessRow> rows;

 private:
  const Instance& inst_;
  const AnswerFn& answers_;
  bool record_;
  std::vector<std::unordered_map<BitVec, BitVec>> memo_;
};

}  // namespace

LiftedVerdict verify_lifted(const Instance& inst, const Solution& sol) {
  LiftedVerdict out;
  try {
    validate_instance(inst);
  } catch (const MalformedError& e) {
    out.verdict = Verdict::Malformed;
    out.reason = e.what();
    return out;
  }
  const auto& p = problem(inst.problem);
  if (sol.y.size() != p.solution_length(inst)) {
    out.verdict = Verdict::Malformed;
    out.reason = "solution has the wrong length";
    return out;
  }
  RowsEvaluator ev(inst, sol.rows);
  Verdict v;
  try {
    v = p.check(inst, sol.y, ev);
  } catch (const MalformedError& e) {
    out.verdict = Verdict::Malformed;
    out.reason = e.what();
    return out;
  }
  out.rows_used = ev.used();
  if (v == Verdict::Aborted) {
    out.verdict = ev.failure;
    out.reason = ev.reason;
    return out;
  }
  out.verdict = v;
  if (v == Verdict::Reject) out.reason = "base verifier rejects";
  if (v == Verdict::Accept && ev.used() != sol.rows.size()) {
    out.verdict = Verdict::Malformed;
    out.reason = "more witness rows than verifier evaluations";
  }
  return out;
}

LiftedVerdict verify_solution(const Instance& inst, const Solution& sol) {
  if (inst.has_oracle_gates()) return verify_lifted(inst, sol);
  LiftedVerdict out;
  if (!sol.rows.empty()) {
    out.verdict = Verdict::Malformed;
    out.reason = "witness rows given for an oracle-free instance";
    return out;
  }
  try {
    out.verdict = verify(inst, sol.y);
  } catch (const MalformedError& e) {
    out.verdict = Verdict::Malformed;
    out.reason = e.what();
  }
  if (out.verdict == Verdict::Reject) out.reason = "verifier rejects";
  return out;
}

std::optional<Solution> package_rows(const Instance& inst, const BitVec& y, const AnswerFn& answers) {
  AnswerEvaluator ev(inst, answers, true);
  if (problem(inst.problem).check(inst, y, ev) != Verdict::Accept) return std::nullopt;
  return Solution{y, std::move(ev.rows)};
}

const BitVec& Instantiation::answer(const std::string& prob, const BitVec& query) {
  if (policy_ == AnswerPolicy::Canonical) return canonical_.answer(prob, query);
  auto key = std::make_pair(prob, query);
  if (auto it = chosen_.find(key); it != chosen_.end()) return it->second;
  const auto& p = problem(prob);
  auto inst = p.decode_query(query);
  auto len = p.solution_length(inst);
  if (len > 16) return canonical_.answer(prob, query);
  std::vector<BitVec> valid;
  PlainEvaluator ev(inst);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
    auto y = BitVec::from_uint(v, len);
    if (p.check(inst, y, ev) == Verdict::Accept) valid.push_back(y);
  }
  if (valid.empty()) throw SolveError(SolveError::Kind::TotalityViolation, prob + ": query without a solution");
  std::mt19937_64 rng(seed_ ^ (query.hash() * 0x9e3779b97f4a7c15ULL));
  auto pick = valid[rng() % valid.size()];
  return chosen_.emplace(std::move(key), std::move(pick)).first->second;
}

LiftedSolveResult lifted_solve(const Instance& inst, Instantiation& oracle, std::optional<std::size_t> cap) {
  validate_instance(inst);
  const auto& p = problem(inst.problem);
  auto len = p.solution_length(inst);
  auto limit = cap.value_or(forge_cap());
  bool exhaustive = len < 63 && (std::uint64_t{1} << len) <= limit;
  std::uint64_t count = exhaustive ? (std::uint64_t{1} << len) : limit;
  auto fn = oracle.fn();
  AnswerEvaluator ev(inst, fn, false);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto y = BitVec::from_uint(i, len);
    if (p.check(inst, y, ev) != Verdict::Accept) continue;
    auto sol = package_rows(inst, y, fn);
    if (!sol) throw std::logic_error("verifier is not deterministic");
    return LiftedSolveResult{std::move(*sol), i + 1};
  }
  if (exhaustive)
    throw SolveError(SolveError::Kind::TotalityViolation, inst.problem + ": no solution under this instantiation");
  throw SolveError(SolveError::Kind::CapExceeded,
                   inst.problem + ": no solution among the first " + std::to_string(limit) + " candidates");
}

Solution solve_any(const Instance& inst) {
  if (!inst.has_oracle_gates()) return Solution{brute_solve(inst), {}};
  Instantiation canon(AnswerPolicy::Canonical, 0);
  return lifted_solve(inst, canon).solution;
}

}  // namespace tfnp
