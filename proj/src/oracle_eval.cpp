#include "tfnp/oracle_eval.hpp"

#include <cstdlib>
#include <memory>
#include <tuple>
#include <unordered_map>

namespace tfnp {

bool AnswerLedger::record(const std::string& problem, const BitVec& query, const BitVec& answer) {
  auto [it, inserted] = map_.try_emplace({problem, query}, answer);
  return inserted || it->second == answer;
}

const BitVec* AnswerLedger::find(const std::string& problem, const BitVec& query) const {
  auto it = map_.find({problem, query});
  return it == map_.end() ? nullptr : &it->second;
}

void validate_oracle_gates(const Circuit& c) {
  for (auto i : c.oracle_nodes()) {
    const auto& g = c.nodes()[i];
    std::size_t z = 0;
    for (const auto& f : g.fanin) z += f.width;
    if (g.width != problem(g.tag).answer_length(z))
      throw MalformedError("oracle gate " + std::to_string(i) + " width disagrees with " + g.tag +
                           " answer length");
  }
}

void validate_instance(const Instance& inst) {
  problem(inst.problem).validate(inst);
  for (const auto& c : inst.circuits) validate_oracle_gates(c);
}

namespace {

using QueryKey = std::pair<std::string, BitVec>;

std::shared_ptr<const Instance> decoded(const std::string& prob, const BitVec& query) {
  static std::map<QueryKey, std::shared_ptr<const Instance>> cache;
  QueryKey key{prob, query};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto inst = std::make_shared<const Instance>(problem(prob).decode_query(query));
  if (cache.size() > 50000) cache.clear();
  cache.emplace(std::move(key), inst);
  return inst;
}

}  // namespace

bool is_valid_answer(const std::string& prob, const BitVec& query, const BitVec& answer) {
  static std::map<std::tuple<std::string, BitVec, BitVec>, bool> memo;
  auto key = std::make_tuple(prob, query, answer);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const auto& p = problem(prob);
  auto inst = decoded(prob, query);
  auto len = p.solution_length(*inst);
  bool ok = false;
  if (answer.size() >= len) {
    PlainEvaluator ev(*inst);
    ok = p.check(*inst, answer.suffix(len), ev) == Verdict::Accept;
  }
  if (memo.size() > 500000) memo.clear();
  memo.emplace(std::move(key), ok);
  return ok;
}

EvalOutcome eval_c_star(const Circuit& c, const BitVec& x, const std::vector<BitVec>& w, AnswerLedger* ledger) {
  if (w.size() != c.oracle_count()) throw MalformedError("witness count does not match oracle gate count");
  AnswerLedger local;
  AnswerLedger& led = ledger ? *ledger : local;
  EvalOutcome out;
  auto r = c.evaluate(x, [&](std::size_t i, const Gate& g, const BitVec& q) -> std::optional<BitVec> {
    if (w[i].size() != g.width) throw MalformedError("witness width does not match oracle gate width");
    if (!is_valid_answer(g.tag, q, w[i])) {
      out.bottom_gate = i + 1;
      return std::nullopt;
    }
    if (!led.record(g.tag, q, w[i])) out.inconsistent = true;
    out.trace.push_back(TraceEntry{i, g.tag, q, w[i], i + 1});
    return w[i];
  });
  if (!r) {
    out.kind = OutcomeKind::Bottom;
    return out;
  }
  out.output = std::move(*r);
  return out;
}

EvalOutcome eval_c_sub_star(const Circuit& c, const BitVec& x, const std::vector<BitVec>& pool,
                            std::set<std::size_t>* used) {
  EvalOutcome out;
  std::set<std::size_t> local;
  std::set<std::size_t>& m = used ? *used : local;
  auto r = c.evaluate(x, [&](std::size_t i, const Gate& g, const BitVec& q) -> std::optional<BitVec> {
    BitVec zero(g.width);
    if (is_valid_answer(g.tag, q, zero)) {
      out.trace.push_back(TraceEntry{i, g.tag, q, zero, 0});
      return zero;
    }
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (pool[j].size() != g.width || !is_valid_answer(g.tag, q, pool[j])) continue;
      m.insert(j + 1);
      out.trace.push_back(TraceEntry{i, g.tag, q, pool[j], j + 1});
      return pool[j];
    }
    std::size_t idx = 1;
    while (m.count(idx)) ++idx;
    out.error_index = idx;
    out.error_problem = g.tag;
    out.error_query = q;
    return std::nullopt;
  });
  out.used = m;
  if (!r) {
    out.kind = OutcomeKind::Error;
    return out;
  }
  out.output = std::move(*r);
  return out;
}

std::vector<BitVec> used_witnesses_in_order(const EvalOutcome& o) {
  std::vector<BitVec> w;
  for (const auto& t : o.trace) w.push_back(t.answer);
  return w;
}

std::size_t forge_cap() {
  if (const char* env = std::getenv("TFNP_FORGE_CAP")) {
    char* end = nullptr;
    auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 16;
}

namespace {

class MemoEvaluator final : public Evaluator {
 public:
  explicit MemoEvaluator(const Instance& inst) : inst_(inst), memo_(inst.circuits.size()) {}
  std::optional<BitVec> eval(std::size_t circuit, const BitVec& x) override {
    auto& m = memo_.at(circuit);
    if (auto it = m.find(x); it != m.end()) return it->second;
    auto r = eval_plain(inst_.circuits[circuit], x);
    m.emplace(x, r);
    return r;
  }

 private:
  const Instance& inst_;
  std::vector<std::unordered_map<BitVec, BitVec>> memo_;
};

}  // namespace

BitVec brute_solve(const Instance& inst, std::optional<std::size_t> cap) {
  const auto& p = problem(inst.problem);
  p.validate(inst);
  if (inst.has_oracle_gates()) throw MalformedError("brute_solve needs an oracle-free instance");
  if (auto s = p.first_solution(inst)) return *s;
  auto len = p.solution_length(inst);
  auto limit = cap.value_or(forge_cap());
  bool exhaustive = len < 63 && (std::uint64_t{1} << len) <= limit;
  std::uint64_t count = exhaustive ? (std::uint64_t{1} << len) : limit;
  MemoEvaluator ev(inst);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto y = BitVec::from_uint(i, len);
    if (p.check(inst, y, ev) == Verdict::Accept) return y;
  }
  if (exhaustive)
    throw SolveError(SolveError::Kind::TotalityViolation, inst.problem + ": no solution exists (totality violation)");
  throw SolveError(SolveError::Kind::CapExceeded,
                   inst.problem + ": no solution among the first " + std::to_string(limit) + " candidates");
}

const BitVec& QueryTable::answer(const std::string& prob, const BitVec& query) {
  QueryKey key{prob, query};
  if (auto it = map_.find(key); it != map_.end()) return it->second;
  auto ans = brute_solve(*decoded(prob, query));
  return map_.emplace(std::move(key), std::move(ans)).first->second;
}

EvalOutcome canonical_instantiation(const Circuit& c, const BitVec& x, QueryTable& table) {
  EvalOutcome out;
  auto r = c.evaluate(x, [&](std::size_t i, const Gate& g, const BitVec& q) -> std::optional<BitVec> {
    auto a = table.answer(g.tag, q).resized(g.width);
    out.trace.push_back(TraceEntry{i, g.tag, q, a, 0});
    return a;
  });
  out.output = std::move(*r);
  return out;
}

}  // namespace tfnp
