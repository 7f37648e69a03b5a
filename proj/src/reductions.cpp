#include "tfnp/reductions.hpp"

#include <map>

#include "reduction_util.hpp"

namespace tfnp {

using detail::LambdaHost;
using detail::num;

// ---------------------------------------------------------------- context

namespace {

class CtxEvaluator final : public Evaluator {
 public:
  CtxEvaluator(ReductionContext& ctx, const Instance& inst) : ctx_(ctx), inst_(inst) {}
  std::optional<BitVec> eval(std::size_t circuit, const BitVec& x) override { return ctx_.eval(inst_, circuit, x); }

 private:
  ReductionContext& ctx_;
  const Instance& inst_;
};

}  // namespace

ReductionContext::ReductionContext() : canonical_(std::make_shared<Instantiation>(AnswerPolicy::Canonical, 0)) {}

ReductionContext::ReductionContext(AnswerFn answers) : ReductionContext() { answers_ = std::move(answers); }

std::optional<BitVec> ReductionContext::answer(const std::string& prob, const BitVec& query) {
  ++oracle_queries;
  if (answers_) return answers_(prob, query);
  return canonical_->answer(prob, query);
}

std::optional<BitVec> ReductionContext::eval(const Instance& inst, std::size_t circuit, const BitVec& x) {
  ++evaluations;
  return inst.circuits.at(circuit).evaluate(
      x, [&](std::size_t, const Gate& g, const BitVec& q) { return answer(g.tag, q); });
}

std::unique_ptr<Evaluator> ReductionContext::evaluator(const Instance& inst) {
  return std::make_unique<CtxEvaluator>(*this, inst);
}

bool ReductionContext::accepts(const Instance& inst, const BitVec& y) {
  const auto& p = problem(inst.problem);
  if (y.size() != p.solution_length(inst)) return false;
  auto ev = evaluator(inst);
  return p.check(inst, y, *ev) == Verdict::Accept;
}

Solution ReductionContext::solve_target(const Instance& target) {
  if (target_calls >= target_budget_) throw HookViolation("target oracle called beyond the reduction's budget");
  ++target_calls;
  return solve_any(target);
}

// ---------------------------------------------------------------- plumbing circuits

namespace {

Instance single(const std::string& prob, Circuit c) {
  Instance r;
  r.problem = prob;
  r.circuits.push_back(std::move(c));
  return r;
}

// S'(x) = x if S(x) < x, else S(x).
Circuit iter_monotone(const Circuit& s) {
  auto n = s.n();
  CircuitBuilder b(n);
  auto x = b.input();
  auto y = b.embed(s, x);
  auto lt = b.host("ult:" + num(n), {y, x});
  return b.finish(b.host("mux:" + num(n), {lt, y, x}));
}

Reduction iter_pair(const std::string& name, const std::string& src, const std::string& dst) {
  Reduction r;
  r.name = name;
  r.source = src;
  r.target = dst;
  r.forward = [dst](const Instance& in, ReductionContext&) {
    return Image{single(dst, iter_monotone(in.circuits.at(0))), {}, {}};
  };
  r.backward = [](const Instance&, const Image&, const Solution& s, ReductionContext&) {
    return std::optional<Solution>(Solution{s.y, {}});
  };
  return r;
}

// S2(x) = S(x) if S(x) > x else x; V2(x) = x.
Reduction iter_to_sinkofdag() {
  Reduction r;
  r.name = "iter_to_sinkofdag";
  r.source = "iter";
  r.target = "sink_of_dag";
  r.forward = [](const Instance& in, ReductionContext&) {
    const auto& s = in.circuits.at(0);
    auto n = s.n();
    CircuitBuilder b(n);
    auto x = b.input();
    auto y = b.embed(s, x);
    auto gt = b.host("ult:" + num(n), {x, y});
    auto s2 = b.host("mux:" + num(n), {gt, x, y});
    return Image{single("sink_of_dag", b.finish(b.concat({s2, x}))), {}, {}};
  };
  r.backward = [](const Instance&, const Image&, const Solution& s, ReductionContext&) {
    return std::optional<Solution>(Solution{s.y, {}});
  };
  return r;
}

// Iter over pairs (value, vertex); valid nodes are (V(v), v) and step to the
// successor while V strictly increases. The all-zero point steps to (V(0), 0).
BitVec sod_step(std::size_t n, const BitVec& in) {
  auto x = in.slice(0, 2 * n);
  auto r = in.slice(2 * n, 2 * n);
  auto r2 = in.slice(4 * n, 2 * n);
  auto alpha = x.slice(0, n), v = x.slice(n, n);
  auto s = r.slice(0, n), val = r.slice(n, n), val2 = r2.slice(n, n);
  if (x.is_zero() && !val.is_zero()) return concat({val, v});
  if (alpha != val) return x;
  if (s != v && val2 > val) return concat({val2, s});
  return x;
}

Reduction sinkofdag_to_iter() {
  Reduction r;
  r.name = "sinkofdag_to_iter";
  r.source = "sink_of_dag";
  r.target = "iter";
  r.forward = [](const Instance& in, ReductionContext&) {
    const auto& sv = in.circuits.at(0);
    auto n = sv.n();
    CircuitBuilder b(2 * n);
    auto x = b.input();
    auto r1 = b.embed(sv, CircuitBuilder::slice(x, n, n));
    auto r2 = b.embed(sv, CircuitBuilder::slice(r1, 0, n));
    return Image{single("iter", b.finish(b.host("sod-step:" + num(n), {x, r1, r2}))), {}, {}};
  };
  r.backward = [](const Instance& src, const Image&, const Solution& s, ReductionContext& ctx)
      -> std::optional<Solution> {
    auto n = src.circuits.at(0).n();
    auto v = s.y.slice(n, n);
    if (ctx.accepts(src, v)) return Solution{v, {}};
    auto r = ctx.eval(src, 0, v);
    if (!r) return std::nullopt;
    auto next = r->slice(0, n);
    if (ctx.accepts(src, next)) return Solution{next, {}};
    return Solution{v, {}};
  };
  return r;
}

// Slot layout of a vertex: two neighbours fill both slots, a single neighbour
// sits in slot 1 so the designated vertex's empty slot 0 is the fixed point 0.
std::pair<std::optional<BitVec>, std::optional<BitVec>> slots(const BitVec& v, const BitVec& out) {
  auto nb = bipartite_neighbors(v, out);
  if (nb.size() == 2) return {nb[0], nb[1]};
  if (nb.size() == 1) return {std::nullopt, nb[0]};
  return {std::nullopt, std::nullopt};
}

std::optional<BitVec> slot_at(const BitVec& v, const BitVec& out, bool i) {
  auto s = slots(v, out);
  return i ? s.second : s.first;
}

BitVec bip_select(std::size_t vw, const BitVec& in) {
  bool i = in[0];
  auto v = in.slice(1, vw);
  auto rv = in.slice(1 + vw, 2 * (vw + 1));
  auto u = slot_at(v, rv, i);
  return u ? *u : BitVec(vw);
}

BitVec bip_pair(std::size_t vw, const BitVec& in) {
  bool i = in[0];
  auto v = in.slice(1, vw);
  auto rv = in.slice(1 + vw, 2 * (vw + 1));
  auto ru = in.slice(1 + vw + 2 * (vw + 1), 2 * (vw + 1));
  auto self = concat({BitVec(1, i), v});
  auto s = slots(v, rv);
  auto mine = i ? s.second : s.first;
  auto other = i ? s.first : s.second;
  if (!mine) return other ? self : concat({BitVec(1, !i), v});
  auto su = slots(*mine, ru);
  if (su.first == v) return concat({BitVec(1, false), *mine});
  if (su.second == v) return concat({BitVec(1, true), *mine});
  return self;
}

Reduction bipartite_to_lonely() {
  Reduction r;
  r.name = "bipartite_to_lonely";
  r.source = "bipartite_mod2";
  r.target = "lonely";
  r.forward = [](const Instance& in, ReductionContext&) {
    const auto& c = in.circuits.at(0);
    auto vw = c.n();
    CircuitBuilder b(vw + 1);
    auto w = b.input();
    auto i = CircuitBuilder::slice(w, 0, 1);
    auto v = CircuitBuilder::slice(w, 1, vw);
    auto rv = b.embed(c, v);
    auto u = b.host("bip-select:" + num(vw), {i, v, rv});
    auto ru = b.embed(c, u);
    return Image{single("lonely", b.finish(b.host("bip-pair:" + num(vw), {i, v, rv, ru}))), {}, {}};
  };
  r.backward = [](const Instance& src, const Image&, const Solution& s, ReductionContext& ctx)
      -> std::optional<Solution> {
    auto vw = src.circuits.at(0).n();
    BitVec zero_sol(1 + 2 * vw);
    if (ctx.accepts(src, zero_sol)) return Solution{zero_sol, {}};
    bool i = s.y[0];
    auto v = s.y.slice(1, vw);
    std::vector<BitVec> cands{concat({BitVec(1), v, BitVec(vw)})};
    if (auto rv = ctx.eval(src, 0, v))
      if (auto u = slot_at(v, *rv, i)) cands.push_back(concat({BitVec(1, true), v, *u}));
    for (const auto& c : cands)
      if (ctx.accepts(src, c)) return Solution{c, {}};
    return Solution{cands[0], {}};
  };
  return r;
}

// Bipartite graph on (side, buddy, x): left (0,0,x) joins its buddy vertex
// (1,1,x&~1) and, when x is matched with C(x), the pair vertex (1,0,min).
BitVec lonely_edges(std::size_t n, const BitVec& in) {
  auto vw = n + 2;
  auto v = in.slice(0, vw);
  auto x = v.slice(2, n);
  auto c = in.slice(vw, n);
  auto cc = in.slice(vw + n, n);
  bool matched = c != x && cc == x;
  auto vert = [&](bool side, bool buddy, const BitVec& p) { return concat({BitVec(1, side), BitVec(1, buddy), p}); };
  std::vector<BitVec> nb;
  auto even = x;
  even.set(n - 1, false);
  auto odd = x;
  odd.set(n - 1, true);
  if (!v[0] && !v[1]) {
    nb.push_back(vert(true, true, even));
    if (matched) nb.push_back(vert(true, false, std::min(x, c)));
  } else if (v[0] && !v[1]) {
    if (matched && x < c) {
      nb.push_back(vert(false, false, x));
      nb.push_back(vert(false, false, c));
    }
  } else if (v[0] && v[1]) {
    if (!x[n - 1]) {
      nb.push_back(vert(false, false, even));
      nb.push_back(vert(false, false, odd));
    }
  }
  BitVec out;
  for (std::size_t k = 0; k < 2; ++k) {
    if (k < nb.size()) out.append(concat({BitVec(1, true), nb[k]}));
    else out.append(BitVec(vw + 1));
  }
  return out;
}

Reduction lonely_to_bipartite() {
  Reduction r;
  r.name = "lonely_to_bipartite";
  r.source = "lonely";
  r.target = "bipartite_mod2";
  r.forward = [](const Instance& in, ReductionContext&) {
    const auto& c = in.circuits.at(0);
    auto n = c.n();
    if (n == 0) throw PreconditionError("lonely_to_bipartite needs n >= 1");
    CircuitBuilder b(n + 2);
    auto v = b.input();
    auto r1 = b.embed(c, CircuitBuilder::slice(v, 2, n));
    auto r2 = b.embed(c, r1);
    return Image{single("bipartite_mod2", b.finish(b.host("lonely-edges:" + num(n), {v, r1, r2}))), {}, {}};
  };
  r.backward = [](const Instance& src, const Image&, const Solution& s, ReductionContext& ctx)
      -> std::optional<Solution> {
    auto n = src.circuits.at(0).n();
    auto c0 = ctx.eval(src, 0, BitVec(n));
    if (!c0) return std::nullopt;
    if (!c0->is_zero()) return Solution{BitVec(n), {}};
    return Solution{s.y.slice(3, n), {}};
  };
  return r;
}

// C'(x) = 0^(n-f) || C(x), D'(z) = D(low f bits of z).
Reduction lossy_to_injective_pigeon() {
  Reduction r;
  r.name = "lossy_to_injective_pigeon";
  r.source = "lossy";
  r.target = "injective_pigeon";
  r.forward = [](const Instance& in, ReductionContext&) {
    const auto& c = in.circuits.at(0);
    const auto& d = in.circuits.at(1);
    auto n = c.n(), f = c.m();
    Instance out;
    out.problem = "injective_pigeon";
    {
      CircuitBuilder b(n);
      auto y = b.embed(c, b.input());
      out.circuits.push_back(b.finish(b.concat({b.constant(BitVec(n - f)), y})));
    }
    {
      CircuitBuilder b(n);
      out.circuits.push_back(b.finish(b.embed(d, CircuitBuilder::slice(b.input(), n - f, f))));
    }
    return Image{std::move(out), {}, {}};
  };
  r.backward = [](const Instance&, const Image&, const Solution& s, ReductionContext&) {
    return std::optional<Solution>(Solution{s.y, {}});
  };
  return r;
}

const bool plumbing_hosts = [] {
  auto sized = [](auto in_w, auto out_w, auto fn) {
    return [=](std::string_view p) -> std::shared_ptr<const HostFn> {
      auto n = param_size(p);
      return std::make_shared<LambdaHost>(in_w(n), out_w(n), [=](const BitVec& x) { return fn(n, x); });
    };
  };
  register_host("sod-step", sized([](std::size_t n) { return 6 * n; }, [](std::size_t n) { return 2 * n; }, sod_step));
  register_host("bip-select", sized([](std::size_t v) { return 1 + v + 2 * (v + 1); },
                                    [](std::size_t v) { return v; }, bip_select));
  register_host("bip-pair", sized([](std::size_t v) { return 1 + v + 4 * (v + 1); },
                                  [](std::size_t v) { return v + 1; }, bip_pair));
  register_host("lonely-edges", sized([](std::size_t n) { return 3 * n + 2; },
                                      [](std::size_t n) { return 2 * (n + 3); }, lonely_edges));
  return true;
}();

}  // namespace

// ---------------------------------------------------------------- registry

namespace {

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    cur.push_back(ch);
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

Reduction find_reduction(const std::string& name) {
  auto open = name.find('(');
  if (open != std::string::npos && name.back() == ')') {
    auto head = name.substr(0, open);
    auto args = split_args(name.substr(open + 1, name.size() - open - 2));
    std::vector<Reduction> rs;
    for (const auto& a : args) rs.push_back(find_reduction(a));
    Reduction out;
    if (head == "lift" && rs.size() == 1) out = lift_blackbox_reduction(rs[0]);
    else if (head == "swap" && rs.size() == 1) out = swap_oracle(rs[0]);
    else if (head == "chain" && !rs.empty()) out = chain(rs);
    else throw MalformedError("unknown reduction combinator: " + head);
    out.name = name;
    return out;
  }
  auto bang = name.find('!');
  auto base = name.substr(0, bang);
  auto mutation = bang == std::string::npos ? std::string() : name.substr(bang + 1);
  auto colon = base.find(':');
  auto stem = base.substr(0, colon);
  Reduction r;
  if (stem == "iter2_to_iter") r = iter_pair(stem, "iter2", "iter");
  else if (stem == "iter_to_iter2") r = iter_pair(stem, "iter", "iter2");
  else if (stem == "iter_to_sinkofdag") r = iter_to_sinkofdag();
  else if (stem == "sinkofdag_to_iter") r = sinkofdag_to_iter();
  else if (stem == "bipartite_to_lonely") r = bipartite_to_lonely();
  else if (stem == "lonely_to_bipartite") r = lonely_to_bipartite();
  else if (stem == "lossy_to_injective_pigeon") r = lossy_to_injective_pigeon();
  else if (stem == "pad_lossy") r = pad_lossy(colon == std::string::npos ? 0 : param_size(base.substr(colon + 1)));
  else if (stem == "lonely_selflow") r = lonely_selflow(mutation);
  else if (stem == "iter_selflow") r = iter_selflow(mutation);
  else if (stem == "lossy_selflow") r = lossy_selflow(mutation);
  else throw MalformedError("unknown reduction: " + name);
  if (!mutation.empty() && stem.find("selflow") == std::string::npos)
    throw MalformedError("mutations exist only for the self-reductions");
  r.name = name;
  return r;
}

std::vector<std::string> reduction_names() {
  return {"iter2_to_iter",       "iter_to_iter2",       "iter_to_sinkofdag", "sinkofdag_to_iter",
          "bipartite_to_lonely", "lonely_to_bipartite", "lossy_to_injective_pigeon",
          "pad_lossy",           "lonely_selflow",      "iter_selflow",      "lossy_selflow"};
}

// ---------------------------------------------------------------- round trip

RoundTrip round_trip(const Reduction& r, const Instance& src, AnswerPolicy policy, std::uint64_t seed) {
  RoundTrip out;
  try {
    ReductionContext ctx;
    auto img = r.forward(src, ctx);
    if (img.direct) {
      out.direct = true;
      out.source_solution = *img.direct;
    } else {
      out.target = img.target;
      if (img.target.has_oracle_gates()) {
        Instantiation inst(policy, seed);
        out.target_solution = lifted_solve(img.target, inst).solution;
      } else {
        out.target_solution = Solution{brute_solve(img.target), {}};
      }
      auto back = r.backward(src, img, out.target_solution, ctx);
      if (!back) {
        out.reason = "backward map failed";
        return out;
      }
      out.source_solution = *back;
    }
    if (ctx.target_calls > 0 && r.many_one) throw HookViolation("many-one reduction called the target oracle");
    auto v = verify_solution(src, out.source_solution);
    out.ok = v.accepted();
    if (!out.ok) out.reason = std::string("source verifier: ") + verdict_name(v.verdict) + " (" + v.reason + ")";
  } catch (const PreconditionError& e) {
    out.reason = std::string("precondition: ") + e.what();
  } catch (const HookViolation& e) {
    out.reason = std::string("hook: ") + e.what();
  } catch (const SolveError& e) {
    out.reason = std::string(e.kind == SolveError::Kind::CapExceeded ? "cap exceeded: " : "target solve: ") + e.what();
  }
  return out;
}

}  // namespace tfnp
