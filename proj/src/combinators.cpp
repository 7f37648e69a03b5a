// lift(r), swap(r) and chain(r1, ..., rk).
#include <map>
#include <mutex>

#include "reduction_util.hpp"
#include "tfnp/oracle_eval.hpp"
#include "tfnp/reductions.hpp"

namespace tfnp {

using detail::LambdaHost;
using detail::num;

namespace {

using AnswerMap = std::map<std::pair<std::string, BitVec>, BitVec>;

std::string hex_name(const std::string& s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char ch : s) {
    out.push_back(digits[ch >> 4]);
    out.push_back(digits[ch & 15]);
  }
  return out;
}

std::string unhex_name(std::string_view h) {
  std::string out;
  for (std::size_t i = 0; i + 1 < h.size(); i += 2) out.push_back(static_cast<char>(std::stoi(std::string(h.substr(i, 2)), nullptr, 16)));
  return out;
}

// Gate answers of the verifier run on `sol`, first answer per query.
AnswerMap answers_of(const Instance& inst, const Solution& sol) {
  AnswerMap seen;
  std::vector<BitVec> flat;
  for (const auto& row : sol.rows) flat.insert(flat.end(), row.begin(), row.end());
  std::size_t next = 0;
  package_rows(inst, sol.y, [&](const std::string& p, const BitVec& q) -> std::optional<BitVec> {
    if (next >= flat.size()) return std::nullopt;
    auto a = flat[next++];
    seen.emplace(std::make_pair(p, q), a);
    return a;
  });
  return seen;
}

AnswerFn layered(std::vector<const AnswerMap*> maps, ReductionContext& ctx) {
  return [maps, &ctx](const std::string& p, const BitVec& q) -> std::optional<BitVec> {
    for (const auto* m : maps) {
      auto it = m->find({p, q});
      if (it != m->end()) return it->second;
    }
    return ctx.answer(p, q);
  };
}

// ---------------------------------------------------------------- lift

struct LiftState {
  Image inner;
  AnswerMap seen;
};

// t-lookup:<query width>:<answer width>:<entries>:<keys>:<values>; output hit || answer.
std::shared_ptr<const HostFn> make_t_lookup(std::string_view params) {
  auto p = split_params(params, 5);
  auto qw = param_size(p[0]), aw = param_size(p[1]), count = param_size(p[2]);
  auto keys = BitVec::from_hex(p[3], count * qw);
  auto vals = BitVec::from_hex(p[4], count * aw);
  std::map<BitVec, BitVec> table;
  for (std::size_t i = 0; i < count; ++i) table.emplace(keys.slice(i * qw, qw), vals.slice(i * aw, aw));
  return std::make_shared<LambdaHost>(qw, 1 + aw, [table, aw](const BitVec& q) {
    auto it = table.find(q);
    return it == table.end() ? BitVec(1 + aw) : concat({BitVec(1, true), it->second});
  });
}

Circuit pin_answers(const Circuit& c, const AnswerMap& seen) {
  if (c.oracle_count() == 0) return c;
  CircuitBuilder b(c.n());
  auto out = b.embed_rewriting(c, b.input(), [&](CircuitBuilder& bb, const Gate& g, Wire q) {
    auto ans = bb.oracle(g.tag, g.width, {q});
    BitVec keys, vals;
    std::size_t count = 0;
    for (const auto& [k, v] : seen)
      if (k.first == g.tag && k.second.size() == q.width && v.size() == g.width) {
        keys.append(k.second);
        vals.append(v);
        ++count;
      }
    if (keys.empty()) return ans;
    auto id = "t-lookup:" + num(q.width) + ":" + num(g.width) + ":" + num(count) + ":" + keys.to_hex() + ":" + vals.to_hex();
    auto hit = bb.host(id, {q});
    return bb.host("mux:" + num(g.width), {CircuitBuilder::slice(hit, 0, 1), ans, CircuitBuilder::slice(hit, 1, g.width)});
  });
  return b.finish(out);
}

// ---------------------------------------------------------------- swap

struct SwapPlan {
  std::size_t z2 = 0;
};

struct SwapCache {
  Reduction r;
  std::mutex mu;
  std::map<BitVec, std::shared_ptr<std::pair<Instance, Image>>> images;
  std::map<std::size_t, SwapPlan> plans;

  std::shared_ptr<std::pair<Instance, Image>> image(const BitVec& z1) {
    std::lock_guard lock(mu);
    auto it = images.find(z1);
    if (it != images.end()) return it->second;
    auto inst = problem(r.source).decode_query(z1);
    ReductionContext ctx;
    auto img = r.forward(inst, ctx);
    auto entry = std::make_shared<std::pair<Instance, Image>>(std::move(inst), std::move(img));
    images.emplace(z1, entry);
    return entry;
  }

  std::size_t z2_length(std::size_t z1len) {
    {
      std::lock_guard lock(mu);
      auto it = plans.find(z1len);
      if (it != plans.end()) return it->second.z2;
    }
    const auto& target = problem(r.target);
    std::size_t z2 = target.layout(target.min_param()).length();
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    for (int attempt = 0; attempt < 32; ++attempt) {
      BitVec z1(z1len);
      if (attempt > 0)
        for (std::size_t i = 0; i < z1len; ++i) {
          state ^= state << 13, state ^= state >> 7, state ^= state << 17;
          z1.set(i, state & 1);
        }
      auto e = image(z1);
      if (e->second.direct) continue;
      z2 = target.encode_query(e->second.target).size();
      break;
    }
    std::lock_guard lock(mu);
    plans[z1len] = SwapPlan{z2};
    return z2;
  }

  BitVec reduce_instance(const BitVec& z1, std::size_t z2len) {
    auto e = image(z1);
    if (e->second.direct) return BitVec(z2len);
    auto z2 = problem(r.target).encode_query(e->second.target);
    return z2.size() == z2len ? z2 : BitVec(z2len);
  }

  BitVec reduce_solution(const BitVec& z1, const BitVec& w2, std::size_t a1) {
    auto e = image(z1);
    if (e->second.direct) return e->second.direct->y.resized(a1);
    ReductionContext ctx;
    try {
      auto back = r.backward(e->first, e->second, Solution{w2, {}}, ctx);
      if (back && back->y.size() == a1) return back->y;
    } catch (const std::exception&) {
    }
    return BitVec(a1);
  }
};

std::mutex registry_mu;
std::map<std::string, std::shared_ptr<SwapCache>>& swap_registry() {
  static std::map<std::string, std::shared_ptr<SwapCache>> m;
  return m;
}

std::shared_ptr<SwapCache> swap_cache(const std::string& name, const Reduction* r = nullptr) {
  std::lock_guard lock(registry_mu);
  auto& m = swap_registry();
  auto it = m.find(name);
  if (it != m.end()) return it->second;
  auto c = std::make_shared<SwapCache>();
  c->r = r ? *r : find_reduction(name);
  m.emplace(name, c);
  return c;
}

const bool combinator_hosts = [] {
  register_host("t-lookup", make_t_lookup);
  register_host("reduce-instance", [](std::string_view p) -> std::shared_ptr<const HostFn> {
    auto parts = split_params(p, 2);
    auto cache = swap_cache(unhex_name(parts[0]));
    auto z1 = param_size(parts[1]);
    auto z2 = cache->z2_length(z1);
    return std::make_shared<LambdaHost>(z1, z2, [cache, z2](const BitVec& q) { return cache->reduce_instance(q, z2); });
  });
  register_host("reduce-solution", [](std::string_view p) -> std::shared_ptr<const HostFn> {
    auto parts = split_params(p, 3);
    auto cache = swap_cache(unhex_name(parts[0]));
    auto z1 = param_size(parts[1]);
    auto a1 = param_size(parts[2]);
    auto a2 = problem(cache->r.target).answer_length(cache->z2_length(z1));
    return std::make_shared<LambdaHost>(z1 + a2, a1, [cache, z1, a1](const BitVec& in) {
      return cache->reduce_solution(in.slice(0, z1), in.slice(z1, in.size() - z1), a1);
    });
  });
  return true;
}();

struct ChainState {
  std::vector<Instance> inputs;
  std::vector<Image> images;
};

}  // namespace

Reduction lift_blackbox_reduction(const Reduction& r) {
  if (!r.black_box) throw PreconditionError(r.name + " is not black-box and cannot be lifted");
  if (!r.source_oracle.empty()) throw PreconditionError(r.name + " already has an oracle source");
  Reduction out = r;
  out.name = "lift(" + r.name + ")";
  out.forward = [r](const Instance& in, ReductionContext& ctx) {
    auto st = std::make_shared<LiftState>();
    ReductionContext inner([&](const std::string& p, const BitVec& q) {
      auto a = ctx.answer(p, q);
      if (a) st->seen.emplace(std::make_pair(p, q), *a);
      return a;
    });
    st->inner = r.forward(in, inner);
    ctx.evaluations += inner.evaluations;
    Image img;
    if (st->inner.direct) {
      auto fn = layered({&st->seen}, ctx);
      img.direct = package_rows(in, st->inner.direct->y, fn);
      if (!img.direct) img.direct = Solution{st->inner.direct->y, {}};
      return img;
    }
    img.target = st->inner.target;
    for (auto& c : img.target.circuits) c = pin_answers(c, st->seen);
    img.state = st;
    return img;
  };
  out.backward = [r](const Instance& src, const Image& img, const Solution& sol, ReductionContext& ctx)
      -> std::optional<Solution> {
    auto st = std::any_cast<std::shared_ptr<LiftState>>(img.state);
    auto from_target = answers_of(img.target, sol);
    auto fn = layered({&st->seen, &from_target}, ctx);
    ReductionContext inner(fn);
    auto y = r.backward(src, st->inner, Solution{sol.y, {}}, inner);
    if (!y) return std::nullopt;
    if (!src.has_oracle_gates()) return Solution{y->y, {}};
    return package_rows(src, y->y, fn);
  };
  return out;
}

Reduction swap_oracle(const Reduction& r) {
  if (!r.source_oracle.empty()) throw PreconditionError("swap needs a reduction between plain problems");
  Reduction out;
  out.name = "swap(" + r.name + ")";
  out.source = "";
  out.source_oracle = r.source;
  out.target = "";
  out.many_one = true;
  out.black_box = r.black_box;
  auto name = r.name;
  swap_cache(name, &r);
  out.forward = [r, name](const Instance& in, ReductionContext&) {
    auto cache = swap_cache(name);
    auto key = hex_name(name);
    Image img;
    img.target = in;
    for (auto& c : img.target.circuits) {
      if (c.oracle_count() == 0) continue;
      CircuitBuilder b(c.n());
      auto o = b.embed_rewriting(c, b.input(), [&](CircuitBuilder& bb, const Gate& g, Wire q) -> Wire {
        if (g.tag != r.source) return bb.oracle(g.tag, g.width, {q});
        auto z2 = cache->z2_length(q.width);
        auto a2 = problem(r.target).answer_length(z2);
        auto zq = bb.host("reduce-instance:" + key + ":" + num(q.width), {q});
        auto w2 = bb.oracle(r.target, static_cast<std::uint32_t>(a2), {zq});
        return bb.host("reduce-solution:" + key + ":" + num(q.width) + ":" + num(g.width), {q, w2});
      });
      c = b.finish(o);
    }
    return img;
  };
  out.backward = [name](const Instance& src, const Image& img, const Solution& sol, ReductionContext& ctx)
      -> std::optional<Solution> {
    auto cache = swap_cache(name);
    auto from_target = answers_of(img.target, sol);
    auto fn = [&](const std::string& p, const BitVec& q) -> std::optional<BitVec> {
      if (p != cache->r.source) return ctx.answer(p, q);
      auto z2len = cache->z2_length(q.size());
      auto z2 = cache->reduce_instance(q, z2len);
      auto it = from_target.find({cache->r.target, z2});
      auto w2 = it != from_target.end() ? std::optional<BitVec>(it->second) : ctx.answer(cache->r.target, z2);
      if (!w2) return std::nullopt;
      return cache->reduce_solution(q, *w2, problem(p).answer_length(q.size()));
    };
    return package_rows(src, sol.y, fn);
  };
  return out;
}

Reduction chain(const std::vector<Reduction>& rs) {
  if (rs.empty()) throw MalformedError("empty chain");
  Reduction out;
  out.name = "chain(";
  for (std::size_t i = 0; i < rs.size(); ++i) out.name += (i ? "," : "") + rs[i].name;
  out.name += ")";
  out.source = rs.front().source;
  out.source_oracle = rs.front().source_oracle;
  out.target = rs.back().target;
  for (const auto& r : rs) {
    out.many_one = out.many_one && r.many_one;
    out.black_box = out.black_box && r.black_box;
  }
  auto unwind = [rs](const ChainState& st, std::size_t from, Solution sol,
                     ReductionContext& ctx) -> std::optional<Solution> {
    for (std::size_t i = from; i-- > 0;) {
      auto back = rs[i].backward(st.inputs[i], st.images[i], sol, ctx);
      if (!back) return std::nullopt;
      sol = std::move(*back);
    }
    return sol;
  };
  out.forward = [rs, unwind](const Instance& in, ReductionContext& ctx) {
    auto st = std::make_shared<ChainState>();
    st->inputs.push_back(in);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      auto img = rs[i].forward(st->inputs.back(), ctx);
      if (img.direct) {
        auto sol = unwind(*st, i, *img.direct, ctx);
        Image done;
        done.direct = sol ? *sol : Solution{};
        return done;
      }
      st->inputs.push_back(img.target);
      st->images.push_back(std::move(img));
    }
    Image img;
    img.target = st->inputs.back();
    img.state = st;
    return img;
  };
  out.backward = [unwind, n = rs.size()](const Instance&, const Image& img, const Solution& sol,
                                         ReductionContext& ctx) {
    auto st = std::any_cast<std::shared_ptr<ChainState>>(img.state);
    return unwind(*st, n, sol, ctx);
  };
  return out;
}

}  // namespace tfnp
