// Self-reductions for Lonely^Lonely, Iter^Iter2 and Lossy^Lossy, and Lossy padding.
#include <cmath>

#include "reduction_util.hpp"
#include "tfnp/oracle_eval.hpp"
#include "tfnp/reductions.hpp"

namespace tfnp {

using detail::LambdaHost;
using detail::num;

namespace {

std::string pack(const BitVec& b) { return num(b.size()) + "." + b.to_hex(); }

BitVec unpack(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos) throw MalformedError("bad packed bit string");
  return BitVec::from_hex(s.substr(dot + 1), param_size(s.substr(0, dot)));
}

std::size_t total(const std::vector<std::size_t>& w) {
  std::size_t s = 0;
  for (auto x : w) s += x;
  return s;
}

std::vector<BitVec> split_widths(const BitVec& v, const std::vector<std::size_t>& widths) {
  std::vector<BitVec> out;
  std::size_t pos = 0;
  for (auto w : widths) {
    out.push_back(v.slice(pos, w));
    pos += w;
  }
  return out;
}

BitVec join(const std::vector<BitVec>& parts) {
  BitVec r;
  for (const auto& p : parts) r.append(p);
  return r;
}

// Canonical answers for the evaluation of c at x.
std::vector<BitVec> answers_at(const Circuit& c, const BitVec& x, ReductionContext& ctx) {
  std::vector<BitVec> a;
  c.evaluate(x, [&](std::size_t, const Gate& g, const BitVec& q) {
    auto r = ctx.answer(g.tag, q);
    if (r) a.push_back(*r);
    return r;
  });
  return a;
}

Circuit host_circuit(std::size_t in, const std::string& id) {
  CircuitBuilder b(static_cast<std::uint32_t>(in));
  return b.finish(b.host(id, {b.input()}));
}

// ---------------------------------------------------------------- Lonely

struct LonelyData {
  Circuit c;
  std::size_t n = 0, s = 0;
  std::vector<std::size_t> widths;
  BitVec a;
  bool drop_consistency = false;
};

LonelyData lonely_data(std::string_view params) {
  auto p = split_params(params, 3);
  LonelyData d;
  d.drop_consistency = p[0] == "drop-consistency";
  d.a = unpack(p[1]);
  d.c = decode_circuit(unpack(p[2]));
  d.n = d.c.n();
  d.widths = d.c.oracle_widths();
  d.s = total(d.widths);
  return d;
}

// Record (x1, W1, W2, b). Bad inputs flip b; good ones map to (x2, W2, W1, b).
BitVec lonely_step(const LonelyData& d, const BitVec& v) {
  auto n = d.n, s = d.s;
  auto u = concat({BitVec(n), d.a, BitVec(s), BitVec(1)});
  if (v == u) return u;
  auto x1 = v.slice(0, n);
  auto w1 = split_widths(v.slice(n, s), d.widths);
  auto w2 = split_widths(v.slice(n + s, s), d.widths);
  bool b = v[n + 2 * s];
  AnswerLedger ledger;
  eval_c_star(d.c, BitVec(n), split_widths(d.a, d.widths), &ledger);
  bool bad = x1.is_zero();
  bool inconsistent = false;
  BitVec x2;
  if (!bad) {
    auto r1 = eval_c_star(d.c, x1, w1, &ledger);
    if (r1.kind != OutcomeKind::Result) bad = true;
    else {
      x2 = r1.output;
      inconsistent = r1.inconsistent;
    }
  }
  if (!bad) {
    auto r2 = eval_c_star(d.c, x2, w2, &ledger);
    if (r2.kind != OutcomeKind::Result) bad = true;
    else inconsistent = inconsistent || r2.inconsistent;
  }
  if (!bad && inconsistent && !d.drop_consistency) bad = true;
  if (bad) {
    auto r = v;
    r.set(n + 2 * s, !b);
    return r;
  }
  return concat({x2, v.slice(n + s, s), v.slice(n, s), BitVec(1, b)});
}

struct LonelyState {
  BitVec a;
  BitVec orphan;
};

// ---------------------------------------------------------------- Iter

struct IterData {
  Circuit s;
  std::size_t n = 0, total = 0;
  std::vector<std::size_t> widths;
  BitVec a;
  bool swap_cases = false;
};

IterData iter_data(std::string_view params) {
  auto p = split_params(params, 3);
  IterData d;
  d.swap_cases = p[0] == "swap-cases";
  d.a = unpack(p[1]);
  d.s = decode_circuit(unpack(p[2]));
  d.n = d.s.n();
  d.widths = d.s.oracle_widths();
  d.total = tfnp::total(d.widths);
  return d;
}

struct Answered {
  std::string problem;
  BitVec query, answer;
};

// Domain (x, W1, W2). Identity unless S*(x, W1) = y > x; then either advance to
// (y, W2, 0) or repair the first bad witness of the second evaluation.
BitVec iter_step(const IterData& d, const BitVec& v) {
  auto n = d.n, s = d.total;
  auto p = concat({BitVec(n), d.a, BitVec(s)});
  if (v.is_zero() && !p.is_zero()) return p;
  auto x = v.slice(0, n);
  auto w1 = split_widths(v.slice(n, s), d.widths);
  auto w2 = split_widths(v.slice(n + s, s), d.widths);
  AnswerLedger ledger;
  auto r1 = eval_c_star(d.s, x, w1, &ledger);
  if (r1.kind != OutcomeKind::Result || r1.inconsistent) return v;
  const auto& y = r1.output;
  if (!(y > x)) return v;
  auto advance = concat({y, v.slice(n + s, s), BitVec(s)});
  if (d.swap_cases) return advance;

  std::vector<Answered> prev;
  for (const auto& t : r1.trace) prev.push_back({t.problem, t.query, t.answer});
  std::optional<std::pair<std::size_t, BitVec>> repair;
  d.s.evaluate(y, [&](std::size_t j, const Gate& g, const BitVec& q) -> std::optional<BitVec> {
    for (const auto& e : prev) {
      if (e.problem != g.tag || e.query != q) continue;
      if (e.answer != w2[j]) {
        repair = {j, e.answer};
        return std::nullopt;
      }
      break;
    }
    if (!is_valid_answer(g.tag, q, w2[j])) {
      auto h = problem(g.tag).decode_query(q);
      repair = {j, eval_plain(h.circuits.at(0), w2[j].suffix(h.circuits[0].n())).resized(w2[j].size())};
      return std::nullopt;
    }
    prev.push_back({g.tag, q, w2[j]});
    return w2[j];
  });
  if (!repair) return advance;
  auto [j, fix] = *repair;
  BitVec out = concat({x, v.slice(n, s)});
  for (std::size_t k = 0; k < j; ++k) out.append(w2[k]);
  out.append(fix);
  return concat({out, BitVec(v.size() - out.size())});
}

// ---------------------------------------------------------------- Lossy

struct LossyData {
  Circuit c, d, cd;
  std::size_t n = 0, f = 0, t = 0, q = 0, ib = 0;
  bool no_tag = false;
  std::size_t width() const { return n + t * q; }
};

std::size_t index_bits(std::size_t t) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < t) ++b;
  return b;
}

LossyData lossy_data(std::string_view params) {
  auto p = split_params(params, 3);
  LossyData d;
  d.no_tag = p[0] == "no-tag";
  d.c = decode_circuit(unpack(p[1]));
  d.d = decode_circuit(unpack(p[2]));
  d.cd = compose(d.c, d.d);
  d.n = d.c.n();
  d.f = d.c.m();
  auto w = d.cd.oracle_widths();
  d.t = w.size();
  d.q = w.empty() ? 0 : w[0];
  d.ib = index_bits(d.t);
  return d;
}

BitVec compress_with(const BitVec& query, const BitVec& w, bool decompress) {
  auto inst = problem("lossy").decode_query(query);
  return eval_plain(inst.circuits.at(decompress ? 1 : 0), w);
}

BitVec lossy_c(const LossyData& d, const BitVec& v) {
  auto N = d.width();
  auto x1 = v.slice(0, d.n);
  auto w = split_widths(v.slice(d.n, d.t * d.q), std::vector<std::size_t>(d.t, d.q));
  auto o = eval_c_sub_star(d.cd, x1, w);
  BitVec out;
  if (o.kind == OutcomeKind::Error && o.error_index <= d.t) {
    auto m = o.error_index - 1;
    out = concat({BitVec(1, true), BitVec::from_uint(m, d.ib), x1});
    for (std::size_t j = 0; j < d.t; ++j) out.append(j == m ? compress_with(o.error_query, w[j], false) : w[j]);
  } else if (o.kind == OutcomeKind::Error) {
    return BitVec(N - 1);
  } else {
    auto oc = eval_c_sub_star(d.c, x1, w);
    out = concat({BitVec(1, false), oc.output, join(w)});
  }
  if (d.no_tag) out = out.slice(1, out.size() - 1);
  return concat({out, BitVec(N - 1 - out.size())});
}

BitVec lossy_d(const LossyData& d, const BitVec& z) {
  auto N = d.width();
  auto widths = std::vector<std::size_t>(d.t, d.q);
  if (!z[0]) {
    auto x2 = z.slice(1, d.f);
    auto w = split_widths(z.slice(1 + d.f, d.t * d.q), widths);
    auto o = eval_c_sub_star(d.d, x2, w);
    if (o.kind != OutcomeKind::Result) return BitVec(N);
    return concat({o.output, join(w)});
  }
  auto m = z.slice(1, d.ib).to_uint();
  if (m >= d.t) return BitVec(N);
  auto x1 = z.slice(1 + d.ib, d.n);
  std::size_t pos = 1 + d.ib + d.n;
  std::vector<BitVec> w;
  BitVec packed;
  for (std::size_t j = 0; j < d.t; ++j) {
    if (j == m) {
      packed = z.slice(pos, d.q / 2);
      w.push_back(BitVec(d.q));
      pos += d.q / 2;
    } else {
      w.push_back(z.slice(pos, d.q));
      pos += d.q;
    }
  }
  auto o = eval_c_sub_star(d.cd, x1, w);
  if (o.kind == OutcomeKind::Result) return BitVec(N);
  w[m] = compress_with(o.error_query, packed, true);
  return concat({x1, join(w)});
}

const bool selflow_hosts = [] {
  register_host("lonely-selflow", [](std::string_view p) -> std::shared_ptr<const HostFn> {
    auto d = std::make_shared<LonelyData>(lonely_data(p));
    auto w = d->n + 2 * d->s + 1;
    return std::make_shared<LambdaHost>(w, w, [d](const BitVec& v) { return lonely_step(*d, v); });
  });
  register_host("iter-selflow", [](std::string_view p) -> std::shared_ptr<const HostFn> {
    auto d = std::make_shared<IterData>(iter_data(p));
    auto w = d->n + 2 * d->total;
    return std::make_shared<LambdaHost>(w, w, [d](const BitVec& v) { return iter_step(*d, v); });
  });
  register_host("lossy-selflow-c", [](std::string_view p) -> std::shared_ptr<const HostFn> {
    auto d = std::make_shared<LossyData>(lossy_data(p));
    return std::make_shared<LambdaHost>(d->width(), d->width() - 1, [d](const BitVec& v) { return lossy_c(*d, v); });
  });
  register_host("lossy-selflow-d", [](std::string_view p) -> std::shared_ptr<const HostFn> {
    auto d = std::make_shared<LossyData>(lossy_data(p));
    return std::make_shared<LambdaHost>(d->width() - 1, d->width(), [d](const BitVec& v) { return lossy_d(*d, v); });
  });
  return true;
}();

void require_oracle(const Instance& in, const std::string& b) {
  validate_instance(in);
  for (const auto& c : in.circuits)
    for (auto i : c.oracle_nodes())
      if (c.nodes()[i].tag != b) throw PreconditionError("oracle gates must be " + b + " gates");
}

}  // namespace

Reduction lonely_selflow(const std::string& mutation) {
  if (!mutation.empty() && mutation != "drop-consistency") throw MalformedError("unknown mutation: " + mutation);
  Reduction r;
  r.name = "lonely_selflow";
  r.source = "lonely";
  r.source_oracle = "lonely";
  r.target = "lonely_plus";
  r.many_one = false;
  r.forward = [mutation](const Instance& in, ReductionContext& ctx) {
    require_oracle(in, "lonely");
    const auto& c = in.circuits.at(0);
    auto n = c.n();
    auto a_parts = answers_at(c, BitVec(n), ctx);
    auto r0 = eval_c_star(c, BitVec(n), a_parts);
    auto a = join(a_parts);
    Image img;
    if (!r0.output.is_zero()) {
      img.direct = Solution{BitVec(n), {a_parts}};
      return img;
    }
    auto s = a.size();
    auto id = "lonely-selflow:" + (mutation.empty() ? std::string("none") : mutation) + ":" + pack(a) + ":" +
              pack(encode_circuit(c));
    img.target.problem = "lonely_plus";
    img.target.circuits.push_back(host_circuit(n + 2 * s + 1, id));
    img.target.aux = concat({BitVec(n), a, BitVec(s), BitVec(1)});
    img.state = LonelyState{a, concat({BitVec(n), a, BitVec(s), BitVec(1, true)})};
    return img;
  };
  r.backward = [](const Instance& src, const Image& img, const Solution& sol, ReductionContext&)
      -> std::optional<Solution> {
    const auto& c = src.circuits.at(0);
    auto n = c.n();
    auto widths = c.oracle_widths();
    auto s = total(widths);
    const auto& st = std::any_cast<const LonelyState&>(img.state);
    if (sol.y == st.orphan) return std::nullopt;
    auto a = split_widths(st.a, widths);
    auto v1 = sol.y.slice(0, n);
    auto w1 = split_widths(sol.y.slice(n, s), widths);
    auto w2 = split_widths(sol.y.slice(n + s, s), widths);
    if (!src.has_oracle_gates()) return Solution{v1, {}};
    auto r1 = eval_c_star(c, v1, w1);
    if (r1.kind != OutcomeKind::Result || r1.output == v1) return Solution{v1, {a, w1}};
    if (r1.output.is_zero()) return Solution{v1, {a, w1, a}};
    return Solution{v1, {a, w1, w2}};
  };
  return r;
}

BitVec lonely_selflow_orphan(const Image& img) { return std::any_cast<const LonelyState&>(img.state).orphan; }

Reduction iter_selflow(const std::string& mutation) {
  if (!mutation.empty() && mutation != "swap-cases") throw MalformedError("unknown mutation: " + mutation);
  Reduction r;
  r.name = "iter_selflow";
  r.source = "iter";
  r.source_oracle = "iter2";
  r.target = "iter";
  r.many_one = false;
  r.forward = [mutation](const Instance& in, ReductionContext& ctx) {
    require_oracle(in, "iter2");
    const auto& s = in.circuits.at(0);
    auto n = s.n();
    auto a_parts = answers_at(s, BitVec(n), ctx);
    auto r0 = eval_c_star(s, BitVec(n), a_parts);
    Image img;
    if (r0.output.is_zero()) {
      img.direct = Solution{BitVec(n), {a_parts}};
      return img;
    }
    auto a = join(a_parts);
    auto id = "iter-selflow:" + (mutation.empty() ? std::string("none") : mutation) + ":" + pack(a) + ":" +
              pack(encode_circuit(s));
    img.target.problem = "iter";
    img.target.circuits.push_back(host_circuit(n + 2 * a.size(), id));
    return img;
  };
  r.backward = [](const Instance& src, const Image&, const Solution& sol, ReductionContext&)
      -> std::optional<Solution> {
    const auto& s = src.circuits.at(0);
    auto n = s.n();
    auto widths = s.oracle_widths();
    auto t = total(widths);
    auto x = sol.y.slice(0, n);
    auto w1 = split_widths(sol.y.slice(n, t), widths);
    auto w2 = split_widths(sol.y.slice(n + t, t), widths);
    if (!src.has_oracle_gates()) return Solution{x, {}};
    auto r1 = eval_c_star(s, x, w1);
    if (r1.kind == OutcomeKind::Result && x.is_zero() && r1.output.is_zero()) return Solution{x, {w1}};
    return Solution{x, {w1, w2}};
  };
  return r;
}

Reduction lossy_selflow(const std::string& mutation) {
  if (!mutation.empty() && mutation != "no-tag") throw MalformedError("unknown mutation: " + mutation);
  Reduction r;
  r.name = "lossy_selflow";
  r.source = "lossy";
  r.source_oracle = "lossy";
  r.target = "lossy";
  r.forward = [mutation](const Instance& in, ReductionContext&) {
    require_oracle(in, "lossy");
    const auto& c = in.circuits.at(0);
    const auto& d = in.circuits.at(1);
    auto widths = compose(c, d).oracle_widths();
    if (widths.empty()) throw PreconditionError("lossy_selflow needs at least one oracle gate");
    auto q = widths[0];
    for (auto w : widths)
      if (w != q) throw PreconditionError("lossy_selflow needs every oracle gate to have the same width");
    auto need = index_bits(widths.size()) + 2;
    if (q / 2 < need)
      throw PreconditionError("padding precondition unmet: oracle queries need q >= " + num(2 * need));
    if (c.m() + 2 > c.n()) throw PreconditionError("lossy_selflow needs f(n) <= n - 2");
    auto params = (mutation.empty() ? std::string("none") : mutation) + ":" + pack(encode_circuit(c)) + ":" +
                  pack(encode_circuit(d));
    auto width = c.n() + widths.size() * q;
    Image img;
    img.target.problem = "lossy";
    img.target.circuits.push_back(host_circuit(width, "lossy-selflow-c:" + params));
    img.target.circuits.push_back(host_circuit(width - 1, "lossy-selflow-d:" + params));
    return img;
  };
  r.backward = [](const Instance& src, const Image&, const Solution& sol, ReductionContext&)
      -> std::optional<Solution> {
    const auto& c = src.circuits.at(0);
    auto cd = compose(c, src.circuits.at(1));
    auto n = c.n();
    auto widths = cd.oracle_widths();
    auto w = split_widths(sol.y.slice(n, sol.y.size() - n), widths);
    auto o = eval_c_sub_star(cd, sol.y.slice(0, n), w);
    if (o.kind != OutcomeKind::Result) return std::nullopt;
    auto used = used_witnesses_in_order(o);
    auto tc = c.oracle_count();
    WitnessRow rc(used.begin(), used.begin() + static_cast<std::ptrdiff_t>(tc));
    WitnessRow rd(used.begin() + static_cast<std::ptrdiff_t>(tc), used.end());
    return Solution{sol.y.slice(0, n), {rc, rd}};
  };
  return r;
}

// ---------------------------------------------------------------- padding

namespace {

struct PadPlan {
  std::size_t k = 1, width = 0;
  bool pass = false;
};

PadPlan plan_padding(std::size_t n, std::size_t f, std::size_t target) {
  auto d = n - f;
  for (std::size_t k = 1; k < 4096; ++k) {
    auto len = n + (k - 1) * d;
    if (len % 2 == 0 && len >= target && f <= len / 2) return PadPlan{k, len, false};
    if (len % 2 == 1 && len + 1 >= target && f + 1 <= (len + 1) / 2) return PadPlan{k, len + 1, true};
  }
  throw PreconditionError("pad_lossy: no padding found");
}

}  // namespace

Reduction pad_lossy(std::size_t target_width) {
  Reduction r;
  r.name = "pad_lossy";
  r.source = "lossy";
  r.target = "lossy";
  r.forward = [target_width](const Instance& in, ReductionContext&) {
    problem("lossy").validate(in);
    const auto& c = in.circuits.at(0);
    const auto& d = in.circuits.at(1);
    auto n = c.n(), f = c.m(), gap = n - f;
    auto plan = plan_padding(n, f, target_width);
    auto half = static_cast<std::uint32_t>(plan.width / 2);
    Instance out;
    out.problem = "lossy";
    {
      CircuitBuilder b(static_cast<std::uint32_t>(plan.width));
      auto x = b.input();
      auto cur = b.embed(c, CircuitBuilder::slice(x, 0, n));
      std::uint32_t pos = n;
      for (std::size_t j = 1; j < plan.k; ++j, pos += gap)
        cur = b.embed(c, b.concat({cur, CircuitBuilder::slice(x, pos, gap)}));
      std::vector<Wire> parts{cur};
      if (plan.pass) parts.push_back(CircuitBuilder::slice(x, pos, 1));
      auto used = f + (plan.pass ? 1 : 0);
      if (half > used) parts.push_back(b.constant(BitVec(half - used)));
      out.circuits.push_back(b.finish(b.concat(parts)));
    }
    {
      CircuitBuilder b(half);
      auto z = b.input();
      auto cur = CircuitBuilder::slice(z, 0, f);
      std::vector<Wire> tail;
      for (std::size_t j = 1; j < plan.k; ++j) {
        auto y = b.embed(d, cur);
        tail.insert(tail.begin(), CircuitBuilder::slice(y, f, gap));
        cur = CircuitBuilder::slice(y, 0, f);
      }
      std::vector<Wire> parts{b.embed(d, cur)};
      parts.insert(parts.end(), tail.begin(), tail.end());
      if (plan.pass) parts.push_back(CircuitBuilder::slice(z, f, 1));
      out.circuits.push_back(b.finish(b.concat(parts)));
    }
    return Image{std::move(out), plan.k, {}};
  };
  r.backward = [](const Instance& src, const Image& img, const Solution& sol, ReductionContext& ctx)
      -> std::optional<Solution> {
    auto k = std::any_cast<std::size_t>(img.state);
    const auto& c = src.circuits.at(0);
    auto n = c.n(), gap = n - c.m();
    auto in = sol.y.slice(0, n);
    std::size_t pos = n;
    for (std::size_t j = 0; j < k; ++j) {
      if (ctx.accepts(src, in)) return Solution{in, {}};
      if (j + 1 == k) break;
      auto cx = ctx.eval(src, 0, in);
      if (!cx) return std::nullopt;
      in = concat({*cx, sol.y.slice(pos, gap)});
      pos += gap;
    }
    return std::nullopt;
  };
  return r;
}

}  // namespace tfnp
