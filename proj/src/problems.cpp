#include "tfnp/problems.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

namespace tfnp {

namespace mp = boost::multiprecision;

bool Instance::has_oracle_gates() const { return oracle_count() > 0; }

std::size_t Instance::oracle_count() const {
  std::size_t t = 0;
  for (const auto& c : circuits) t += c.oracle_count();
  return t;
}

std::string Instance::oracle_problem() const {
  for (const auto& c : circuits)
    for (auto i : c.oracle_nodes()) return c.nodes()[i].tag;
  return {};
}

std::optional<BitVec> PlainEvaluator::eval(std::size_t circuit, const BitVec& x) {
  return eval_plain(inst_.circuits.at(circuit), x);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::Malformed: return "malformed";
    case Verdict::Aborted: return "aborted";
  }
  return "?";
}

std::size_t Layout::length() const {
  std::size_t z = aux;
  for (const auto& f : fns) z += (std::size_t{1} << f.in) * f.out;
  return z;
}

// ---------------------------------------------------------------- primality

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

mp::cpp_int to_big(const BitVec& v) {
  mp::cpp_int r = 0;
  for (std::size_t i = 0; i < v.size(); ++i) r = (r << 1) | (v[i] ? 1 : 0);
  return r;
}

BitVec from_big(mp::cpp_int v, std::size_t width) {
  BitVec r(width);
  for (std::size_t i = 0; i < width; ++i) {
    r.set(width - 1 - i, static_cast<bool>(v & 1));
    v >>= 1;
  }
  return r;
}

bool big_prime(const mp::cpp_int& v) {
  std::mt19937 gen(20240601);
  return mp::miller_rabin_test(v, 40, gen);
}

// Strips leading zeros so wide encodings of small numbers take the fast path.
std::optional<std::uint64_t> small_value(const BitVec& v) {
  std::size_t lead = 0;
  while (lead < v.size() && !v[lead]) ++lead;
  if (v.size() - lead > 64) return std::nullopt;
  return v.slice(lead, v.size() - lead).to_uint();
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p < 65536 && p * p <= n; ++p)
    if (n % p == 0) return n == p;
  if (n < 65536ULL * 65536ULL) return true;
  std::uint64_t d = n - 1;
  int s = 0;
  while (!(d & 1)) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    auto x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_prime_bits(const BitVec& v) {
  if (auto s = small_value(v)) return is_prime_u64(*s);
  return big_prime(to_big(v));
}

// ---------------------------------------------------------------- generic codec

std::size_t Problem::size_param(const Instance& inst) const {
  return inst.circuits.empty() ? inst.aux.size() : inst.circuits.front().n();
}

void Problem::validate(const Instance& inst) const {
  auto n = size_param(inst);
  auto lay = instance_layout(n);
  if (inst.circuits.size() != lay.fns.size()) throw MalformedError(id() + ": wrong number of circuits");
  for (std::size_t i = 0; i < lay.fns.size(); ++i)
    if (inst.circuits[i].n() != lay.fns[i].in || inst.circuits[i].m() != lay.fns[i].out)
      throw MalformedError(id() + ": circuit " + std::to_string(i) + " has the wrong width");
  if (inst.aux.size() != lay.aux) throw MalformedError(id() + ": wrong auxiliary input width");
}

std::size_t Problem::param_for_length(std::size_t z) const {
  std::size_t k = min_param();
  while (k < 20 && layout(k + 1).length() <= z) ++k;
  return k;
}

Instance instance_from_tables(const std::string& problem, const Layout& lay, const BitVec& bits) {
  Instance inst;
  inst.problem = problem;
  BitVec padded = bits.size() >= lay.length() ? bits : concat({bits, BitVec(lay.length() - bits.size())});
  std::size_t pos = 0;
  for (const auto& f : lay.fns) {
    auto len = (std::size_t{1} << f.in) * f.out;
    inst.circuits.push_back(table_circuit(static_cast<std::uint32_t>(f.in), static_cast<std::uint32_t>(f.out),
                                          padded.slice(pos, len)));
    pos += len;
  }
  inst.aux = padded.slice(pos, lay.aux);
  return inst;
}

Instance Problem::decode_query(const BitVec& u) const {
  return instance_from_tables(id(), layout(param_for_length(u.size())), u);
}

BitVec Problem::encode_query(const Instance& inst) const {
  validate(inst);
  auto lay = layout(size_param(inst));
  BitVec out;
  for (std::size_t i = 0; i < lay.fns.size(); ++i) {
    if (inst.circuits[i].n() != lay.fns[i].in || inst.circuits[i].m() != lay.fns[i].out)
      throw MalformedError(id() + ": instance does not fit the query layout");
    out.append(tabulate(inst.circuits[i]));
  }
  out.append(inst.aux);
  return out;
}

// ---------------------------------------------------------------- problems

namespace {

#define EVAL_OR_ABORT(var, c, x)    \
  auto var##_opt = ev.eval(c, x);   \
  if (!var##_opt) return Verdict::Aborted; \
  const BitVec var = std::move(*var##_opt)

Verdict accept_if(bool b) { return b ? Verdict::Accept : Verdict::Reject; }

class Factor final : public Problem {
 public:
  std::string id() const override { return "factor"; }
  std::size_t solution_length(std::size_t n) const override { return n ? n - 1 : 0; }
  std::size_t min_param() const override { return 0; }
  Layout layout(std::size_t k) const override { return Layout{{}, k}; }
  std::size_t param_for_length(std::size_t z) const override { return z; }

  Verdict check(const Instance& inst, const BitVec& y, Evaluator&) const override {
    const auto& x = inst.aux;
    if (y.size() != solution_length(x.size())) return Verdict::Malformed;
    auto xs = small_value(x);
    auto ys = small_value(y);
    if (xs && ys) {
      if (*xs < 2 || is_prime_u64(*xs)) return accept_if(*ys == 0);
      return accept_if(*ys > 1 && *ys < *xs && *xs % *ys == 0);
    }
    auto xb = to_big(x), yb = to_big(y);
    if (xb < 2 || big_prime(xb)) return accept_if(yb == 0);
    return accept_if(yb > 1 && yb < xb && xb % yb == 0);
  }

  std::optional<BitVec> first_solution(const Instance& inst) const override {
    auto len = solution_length(inst.aux.size());
    auto xs = small_value(inst.aux);
    if (!xs) return std::nullopt;
    if (*xs < 2 || is_prime_u64(*xs)) return BitVec(len);
    for (std::uint64_t d = 2;; ++d)
      if (*xs % d == 0) return BitVec::from_uint(d, len);
  }
};

class WeakBertrand final : public Problem {
 public:
  std::string id() const override { return "weak_bertrand"; }
  std::size_t solution_length(std::size_t n) const override { return 32 * n; }
  std::size_t min_param() const override { return 0; }
  Layout layout(std::size_t k) const override { return Layout{{}, k}; }
  std::size_t param_for_length(std::size_t z) const override { return z; }

  Verdict check(const Instance& inst, const BitVec& p, Evaluator&) const override {
    auto n = inst.aux.size();
    if (p.size() != solution_length(n)) return Verdict::Malformed;
    return accept_if(to_big(p) > (mp::cpp_int(1) << n) && is_prime_bits(p));
  }

  std::optional<BitVec> first_solution(const Instance& inst) const override {
    auto n = inst.aux.size();
    mp::cpp_int p = (mp::cpp_int(1) << n) + 1;
    auto len = solution_length(n);
    if (n == 0) return BitVec(0);
    while (!is_prime_bits(from_big(p, len))) ++p;
    return from_big(p, len);
  }
};

class Pigeon final : public Problem {
 public:
  std::string id() const override { return "pigeon"; }
  std::size_t solution_length(std::size_t n) const override { return 2 * n + 1; }
  Layout layout(std::size_t k) const override { return Layout{{{k, k}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& y, Evaluator& ev) const override {
    auto n = size_param(inst);
    if (y.size() != solution_length(n)) return Verdict::Malformed;
    auto x1 = y.slice(1, n), x2 = y.slice(1 + n, n);
    if (!y[0]) {
      if (!x2.is_zero()) return Verdict::Reject;
      EVAL_OR_ABORT(c1, 0, x1);
      return accept_if(c1.is_zero());
    }
    if (x1 == x2) return Verdict::Reject;
    EVAL_OR_ABORT(c1, 0, x1);
    EVAL_OR_ABORT(c2, 0, x2);
    return accept_if(c1 == c2);
  }
};

class WeakPigeon final : public Problem {
 public:
  std::string id() const override { return "weak_pigeon"; }
  std::size_t solution_length(std::size_t n) const override { return 2 * n; }
  std::size_t min_param() const override { return 2; }
  Layout layout(std::size_t k) const override { return Layout{{{k, k - 1}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& y, Evaluator& ev) const override {
    auto n = size_param(inst);
    if (y.size() != solution_length(n)) return Verdict::Malformed;
    auto x1 = y.slice(0, n), x2 = y.slice(n, n);
    if (x1 == x2) return Verdict::Reject;
    EVAL_OR_ABORT(c1, 0, x1);
    EVAL_OR_ABORT(c2, 0, x2);
    return accept_if(c1 == c2);
  }
};

// C : [2^n] -> [2^n - 1]; an all-ones output of C is read as 2^n - 2.
class InjectivePigeon final : public Problem {
 public:
  std::string id() const override { return "injective_pigeon"; }
  std::size_t solution_length(std::size_t n) const override { return n; }
  Layout layout(std::size_t k) const override { return Layout{{{k, k}, {k, k}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& x, Evaluator& ev) const override {
    auto n = size_param(inst);
    if (x.size() != n) return Verdict::Malformed;
    EVAL_OR_ABORT(c, 0, x);
    BitVec clamped = c;
    if (n > 0 && c == BitVec::ones(n)) clamped.set(n - 1, false);
    EVAL_OR_ABORT(d, 1, clamped);
    return accept_if(d != x);
  }
};

// f(n)-Lossy for any f < n; the query codec uses f = n/2.
class Lossy final : public Problem {
 public:
  std::string id() const override { return "lossy"; }
  std::size_t solution_length(std::size_t n) const override { return n; }
  std::size_t min_param() const override { return 2; }
  Layout layout(std::size_t k) const override {
    k -= k % 2;
    return Layout{{{k, k / 2}, {k / 2, k}}, 0};
  }
  std::size_t param_for_length(std::size_t z) const override {
    std::size_t k = 2;
    while (k < 20 && layout(k + 2).length() <= z) k += 2;
    return k;
  }
  void validate(const Instance& inst) const override {
    if (inst.circuits.size() != 2 || !inst.aux.empty()) throw MalformedError("lossy: expects circuits C and D");
    const auto& c = inst.circuits[0];
    const auto& d = inst.circuits[1];
    if (c.m() >= c.n() || d.n() != c.m() || d.m() != c.n())
      throw MalformedError("lossy: need C: n -> f and D: f -> n with f < n");
  }

  Verdict check(const Instance& inst, const BitVec& x, Evaluator& ev) const override {
    if (x.size() != size_param(inst)) return Verdict::Malformed;
    EVAL_OR_ABORT(c, 0, x);
    EVAL_OR_ABORT(d, 1, c);
    return accept_if(d != x);
  }
};

class Lonely final : public Problem {
 public:
  std::string id() const override { return "lonely"; }
  std::size_t solution_length(std::size_t n) const override { return n; }
  Layout layout(std::size_t k) const override { return Layout{{{k, k}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& w, Evaluator& ev) const override {
    auto n = size_param(inst);
    if (w.size() != n) return Verdict::Malformed;
    EVAL_OR_ABORT(c0, 0, BitVec(n));
    if (!c0.is_zero()) return Verdict::Accept;
    if (w.is_zero()) return Verdict::Reject;
    EVAL_OR_ABORT(c1, 0, w);
    if (c1 == w) return Verdict::Accept;
    EVAL_OR_ABORT(c2, 0, c1);
    return accept_if(c2 != w);
  }
};

class LonelyPlus final : public Problem {
 public:
  std::string id() const override { return "lonely_plus"; }
  std::size_t solution_length(std::size_t n) const override { return n; }
  Layout layout(std::size_t k) const override { return Layout{{{k, k}}, k}; }

  Verdict check(const Instance& inst, const BitVec& w, Evaluator& ev) const override {
    auto n = size_param(inst);
    if (w.size() != n) return Verdict::Malformed;
    const auto& u = inst.aux;
    EVAL_OR_ABORT(cu, 0, u);
    if (cu != u) return accept_if(w.is_zero());
    if (w == u) return Verdict::Reject;
    EVAL_OR_ABORT(c1, 0, w);
    if (c1 == w) return Verdict::Accept;
    EVAL_OR_ABORT(c2, 0, c1);
    return accept_if(c2 != w);
  }
};

class IterBase : public Problem {
 public:
  explicit IterBase(bool two) : two_(two) {}
  std::string id() const override { return two_ ? "iter2" : "iter"; }
  std::size_t solution_length(std::size_t n) const override { return n; }
  Layout layout(std::size_t k) const override { return Layout{{{k, k}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& x, Evaluator& ev) const override {
    if (x.size() != size_param(inst)) return Verdict::Malformed;
    EVAL_OR_ABORT(y, 0, x);
    if (x.is_zero() && y.is_zero()) return Verdict::Accept;
    if (two_ && y < x) return Verdict::Accept;
    if (!(y > x)) return Verdict::Reject;
    EVAL_OR_ABORT(z, 0, y);
    return accept_if(z <= y);
  }

 private:
  bool two_;
};

// Single circuit SV(x) = S(x) || V(x).
class SinkOfDag final : public Problem {
 public:
  std::string id() const override { return "sink_of_dag"; }
  std::size_t solution_length(std::size_t n) const override { return n; }
  Layout layout(std::size_t k) const override { return Layout{{{k, 2 * k}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& v, Evaluator& ev) const override {
    auto n = size_param(inst);
    if (v.size() != n) return Verdict::Malformed;
    EVAL_OR_ABORT(r, 0, v);
    auto s = r.slice(0, n);
    if (v.is_zero() && s.is_zero()) return Verdict::Accept;
    if (s == v) return Verdict::Reject;
    EVAL_OR_ABORT(r2, 0, s);
    auto s2 = r2.slice(0, n);
    return accept_if(s2 == s || r2.slice(n, n) <= r.slice(n, n));
  }
};

// Single circuit SP(x) = S(x) || P(x).
class Line final : public Problem {
 public:
  explicit Line(bool end) : end_(end) {}
  std::string id() const override { return end_ ? "end_of_line" : "sink_of_line"; }
  std::size_t solution_length(std::size_t n) const override { return n; }
  Layout layout(std::size_t k) const override { return Layout{{{k, 2 * k}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& v, Evaluator& ev) const override {
    auto n = size_param(inst);
    if (v.size() != n) return Verdict::Malformed;
    EVAL_OR_ABORT(r, 0, v);
    auto s = r.slice(0, n), p = r.slice(n, n);
    if (v.is_zero() && (s.is_zero() || !p.is_zero())) return Verdict::Accept;
    EVAL_OR_ABORT(rs, 0, s);
    if (rs.slice(n, n) != v) return Verdict::Accept;
    if (!end_ || v.is_zero()) return Verdict::Reject;
    EVAL_OR_ABORT(rp, 0, p);
    return accept_if(rp.slice(0, n) != v);
  }

 private:
  bool end_;
};

// Vertices are V-bit strings whose first bit is the side. C returns two
// (presence, vertex) slots; same-side entries are dropped.
class Bipartite final : public Problem {
 public:
  std::string id() const override { return "bipartite_mod2"; }
  std::size_t solution_length(std::size_t v) const override { return 1 + 2 * v; }
  Layout layout(std::size_t k) const override { return Layout{{{k, 2 * (k + 1)}}, 0}; }

  Verdict check(const Instance& inst, const BitVec& y, Evaluator& ev) const override {
    auto vw = size_param(inst);
    if (y.size() != solution_length(vw)) return Verdict::Malformed;
    auto x = y.slice(1, vw), z = y.slice(1 + vw, vw);
    if (!y[0]) {
      if (!z.is_zero()) return Verdict::Reject;
      EVAL_OR_ABORT(cx, 0, x);
      auto deg = neighbors(x, cx).size();
      return accept_if(x.is_zero() ? deg != 1 : deg == 1);
    }
    EVAL_OR_ABORT(cx, 0, x);
    auto nx = neighbors(x, cx);
    if (std::find(nx.begin(), nx.end(), z) == nx.end()) return Verdict::Reject;
    EVAL_OR_ABORT(cz, 0, z);
    auto nz = neighbors(z, cz);
    return accept_if(std::find(nz.begin(), nz.end(), x) == nz.end());
  }

  static std::vector<BitVec> neighbors(const BitVec& v, const BitVec& out) {
    auto vw = v.size();
    std::vector<BitVec> r;
    for (std::size_t slot = 0; slot < 2; ++slot) {
      auto base = slot * (vw + 1);
      if (!out[base]) continue;
      auto u = out.slice(base + 1, vw);
      if (vw == 0 || u[0] == v[0]) continue;
      r.push_back(u);
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
  }
};

#undef EVAL_OR_ABORT

std::map<std::string, std::unique_ptr<Problem>>& problems_map() {
  static auto* m = [] {
    auto* r = new std::map<std::string, std::unique_ptr<Problem>>;
    auto add = [&](Problem* p) { (*r)[p->id()] = std::unique_ptr<Problem>(p); };
    add(new Factor);
    add(new WeakBertrand);
    add(new Pigeon);
    add(new WeakPigeon);
    add(new InjectivePigeon);
    add(new Lossy);
    add(new Lonely);
    add(new LonelyPlus);
    add(new IterBase(false));
    add(new IterBase(true));
    add(new SinkOfDag);
    add(new Line(true));
    add(new Line(false));
    add(new Bipartite);
    return r;
  }();
  return *m;
}

}  // namespace

std::vector<BitVec> bipartite_neighbors(const BitVec& v, const BitVec& out) { return Bipartite::neighbors(v, out); }

const Problem& problem(const std::string& id) {
  auto& m = problems_map();
  auto it = m.find(id);
  if (it == m.end()) throw MalformedError("unknown problem: " + id);
  return *it->second;
}

std::vector<std::string> problem_ids() {
  std::vector<std::string> ids;
  for (const auto& [k, v] : problems_map()) ids.push_back(k);
  return ids;
}

Verdict verify(const Instance& inst, const BitVec& cand) {
  const auto& p = problem(inst.problem);
  p.validate(inst);
  if (inst.has_oracle_gates()) throw MalformedError("instance has oracle gates; use the lifted verifier");
  if (cand.size() != p.solution_length(inst)) return Verdict::Malformed;
  PlainEvaluator ev(inst);
  return p.check(inst, cand, ev);
}

}  // namespace tfnp
