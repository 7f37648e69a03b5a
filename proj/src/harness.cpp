#include "tfnp/harness.hpp"

#include <chrono>
#include <sstream>

#include "tfnp/host_util.hpp"
#include "tfnp/json_io.hpp"
#include "tfnp/oracle_eval.hpp"

namespace tfnp {

namespace {

BitVec random_bits(std::size_t len, std::mt19937_64& rng) {
  BitVec b(len);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (i % 64 == 0) word = rng();
    b.set(i, (word >> (i % 64)) & 1);
  }
  return b;
}

std::string table_id(std::size_t in, std::size_t out, const BitVec& bits) {
  return "table:" + std::to_string(in) + ":" + std::to_string(out) + ":" + bits.to_hex();
}

// Lonely instances with C(0) != 0 (or Lonely+ with C(u) != u) are solved at 0;
// half of the draws are steered away from that.
void steer(const std::string& prob, std::size_t n, BitVec& bits, std::mt19937_64& rng) {
  if (rng() % 2) return;
  if (prob == "lonely") bits.overwrite(0, BitVec(n));
  if (prob == "lonely_plus") {
    auto u = bits.suffix(n);
    bits.overwrite(u.to_uint() * n, u);
  }
}

std::mt19937_64 member_rng(std::uint64_t seed, std::size_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  return std::mt19937_64(seq);
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool skipped(const RoundTrip& rt) { return rt.reason.rfind("cap exceeded", 0) == 0; }

bool counts_as_failure(const RoundTrip& rt) {
  return !rt.ok && !skipped(rt) && rt.reason.rfind("precondition", 0) != 0;
}

std::string failure_class(const std::string& reason) { return reason.substr(0, reason.find(" (")); }

RoundTrip guarded_round_trip(const Reduction& r, const Instance& inst, std::size_t i) {
  try {
    auto policy = i % 2 ? AnswerPolicy::RandomValid : AnswerPolicy::Canonical;
    return round_trip(r, inst, policy, i);
  } catch (const std::exception& e) {
    RoundTrip rt;
    rt.reason = std::string("exception: ") + e.what();
    return rt;
  }
}

}  // namespace

std::size_t default_oracle_param(const std::string& oracle) {
  if (oracle == "lossy") return 8;
  if (oracle == "lonely" || oracle == "lonely_plus" || oracle == "iter" || oracle == "iter2") return 3;
  return 2;
}

Instance random_instance(const std::string& prob, std::size_t n, std::mt19937_64& rng) {
  auto lay = problem(prob).instance_layout(n);
  auto bits = random_bits(lay.length(), rng);
  steer(prob, n, bits, rng);
  return instance_from_tables(prob, lay, bits);
}

Instance random_lifted(const FamilyParams& fam, std::mt19937_64& rng) {
  const auto& a = problem(fam.problem);
  const auto& b = problem(fam.oracle);
  auto lay = a.instance_layout(fam.n);
  auto k = fam.k ? fam.k : default_oracle_param(fam.oracle);
  if (lay.fns.empty()) throw PreconditionError(fam.problem + " has no circuits to carry oracle gates");

  std::vector<BitVec> pool;
  for (int i = 0; i < 2; ++i) pool.push_back(b.encode_query(random_instance(fam.oracle, k, rng)));
  auto z = pool[0].size();
  auto alen = b.answer_length(z);

  std::vector<std::size_t> gates(lay.fns.size(), 0);
  for (std::size_t i = 0; i < fam.t; ++i) ++gates[rng() % lay.fns.size()];

  bool steer_zero = fam.problem == "lonely" && rng() % 4 != 0;
  Instance inst;
  inst.problem = fam.problem;
  for (std::size_t ci = 0; ci < lay.fns.size(); ++ci) {
    auto [in, out] = lay.fns[ci];
    auto width = in + gates[ci] * alen;
    if (width > 16) throw PreconditionError("oracle family too wide for a table-backed output");
    CircuitBuilder cb(static_cast<std::uint32_t>(in));
    std::vector<Wire> parts{cb.input()};
    for (std::size_t g = 0; g < gates[ci]; ++g) {
      BitVec qt;
      for (std::size_t row = 0; row < (std::size_t{1} << in); ++row) qt.append(pool[rng() % pool.size()]);
      auto q = cb.host(table_id(in, z, qt), {cb.input()});
      parts.push_back(cb.oracle(fam.oracle, static_cast<std::uint32_t>(alen), {q}));
    }
    auto ot = random_bits((std::size_t{1} << width) * out, rng);
    if (steer_zero && ci == 0) ot.overwrite(0, BitVec((std::size_t{1} << (width - in)) * out));
    inst.circuits.push_back(cb.finish(cb.host(table_id(width, out, ot), parts)));
  }
  inst.aux = random_bits(lay.aux, rng);
  return inst;
}

std::size_t family_size(const FamilyParams& fam) {
  if (!fam.exhaustive) return fam.samples;
  if (!fam.oracle.empty()) throw PreconditionError("exhaustive mode covers oracle-free families only");
  auto len = problem(fam.problem).instance_layout(fam.n).length();
  if (len > kMaxExhaustiveBits)
    throw PreconditionError("family has 2^" + std::to_string(len) + " members; exhaustive mode allows at most 2^" +
                            std::to_string(kMaxExhaustiveBits));
  return std::size_t{1} << len;
}

Instance family_member(const FamilyParams& fam, std::size_t i) {
  if (fam.exhaustive) {
    auto lay = problem(fam.problem).instance_layout(fam.n);
    return instance_from_tables(fam.problem, lay, BitVec::from_uint(i, lay.length()));
  }
  auto rng = member_rng(fam.seed, i);
  return fam.oracle.empty() ? random_instance(fam.problem, fam.n, rng) : random_lifted(fam, rng);
}

std::vector<Instance> generate(const FamilyParams& fam) {
  std::vector<Instance> out;
  auto size = family_size(fam);
  for (std::size_t i = 0; i < size; ++i) out.push_back(family_member(fam, i));
  return out;
}

FamilyParams default_family(const Reduction& r) {
  FamilyParams f;
  f.samples = 200;
  if (r.name.rfind("lift(", 0) == 0) {
    f.problem = r.source;
    f.oracle = "iter";
    f.k = 2;
    return f;
  }
  if (r.name.rfind("swap(", 0) == 0) {
    f.problem = "lonely";
    f.oracle = r.source_oracle;
    f.k = 2;
    return f;
  }
  f.problem = r.source;
  if (!r.source_oracle.empty()) {
    f.oracle = r.source_oracle;
    f.n = r.source == "lossy" ? 4 : 3;
    f.k = default_oracle_param(f.oracle);
    return f;
  }
  f.exhaustive = problem(r.source).instance_layout(f.n).length() <= kMaxExhaustiveBits;
  return f;
}

// ---------------------------------------------------------------- shrinking

namespace {

Circuit with_node(const Circuit& c, std::size_t idx, Gate g) {
  auto nodes = c.nodes();
  nodes[idx] = std::move(g);
  return Circuit(std::move(nodes));
}

Gate table_gate(const Gate& old, std::size_t in, std::size_t out, const BitVec& bits) {
  Gate g = old;
  g.tag = table_id(in, out, bits);
  g.host = make_host(g.tag);
  return g;
}

}  // namespace

Instance shrink(const Instance& start, const FamilyParams& fam, const std::function<bool(const Instance&)>& still_fails,
                std::size_t budget) {
  auto cur = start;
  std::size_t spent = 0;
  auto attempt = [&](const Instance& cand) {
    if (spent >= budget) return false;
    ++spent;
    try {
      return still_fails(cand);
    } catch (const std::exception&) {
      return false;
    }
  };

  for (std::size_t n = 1; n < fam.n && spent < budget; ++n) {
    auto f2 = fam;
    f2.n = n;
    bool found = false;
    try {
      auto size = std::min<std::size_t>(family_size(f2), 32);
      for (std::size_t i = 0; i < size && !found && spent < budget; ++i) {
        auto cand = family_member(f2, i);
        if (attempt(cand)) {
          cur = cand;
          found = true;
        }
      }
    } catch (const std::exception&) {
    }
    if (found) break;
  }

  for (std::size_t ci = 0; ci < cur.circuits.size(); ++ci) {
    for (std::size_t idx = 0; idx < cur.circuits[ci].nodes().size(); ++idx) {
      const auto& g = cur.circuits[ci].nodes()[idx];
      if (g.kind != GateKind::Host || g.tag.rfind("table:", 0) != 0) continue;
      auto p = split_params(std::string_view(g.tag).substr(6), 3);
      auto in = param_size(p[0]), out = param_size(p[1]);
      auto bits = BitVec::from_hex(p[2], (std::size_t{1} << in) * out);
      auto rows = std::size_t{1} << in;
      for (std::size_t chunk = rows; chunk >= 1 && spent < budget; chunk /= 2) {
        for (std::size_t r0 = 0; r0 < rows && spent < budget; r0 += chunk) {
          auto span = bits.slice(r0 * out, chunk * out);
          if (span.is_zero()) continue;
          auto trial = bits;
          trial.overwrite(r0 * out, BitVec(chunk * out));
          auto cand = cur;
          cand.circuits[ci] = with_node(cur.circuits[ci], idx, table_gate(g, in, out, trial));
          if (attempt(cand)) {
            bits = trial;
            cur = cand;
          }
        }
      }
    }
  }

  for (std::size_t ci = 0; ci < cur.circuits.size(); ++ci) {
    for (std::size_t j = 0; j < cur.circuits[ci].oracle_nodes().size();) {
      auto idx = cur.circuits[ci].oracle_nodes()[j];
      Gate zero;
      zero.kind = GateKind::Const;
      zero.width = cur.circuits[ci].nodes()[idx].width;
      zero.value = BitVec(zero.width);
      auto cand = cur;
      cand.circuits[ci] = with_node(cur.circuits[ci], idx, zero);
      if (attempt(cand)) cur = cand;
      else ++j;
    }
  }
  return cur;
}

// ---------------------------------------------------------------- checks

CheckReport check_reduction(const std::string& name, const FamilyParams& fam) {
  return check_reduction(find_reduction(name), fam);
}

CheckReport check_reduction(const Reduction& r, const FamilyParams& fam) {
  auto t0 = std::chrono::steady_clock::now();
  CheckReport rep;
  rep.reduction = r.name;
  rep.family = fam;
  auto size = family_size(fam);
  for (std::size_t i = 0; i < size; ++i) {
    auto inst = family_member(fam, i);
    auto rt = guarded_round_trip(r, inst, i);
    if (rt.ok) {
      ++rep.pass;
      continue;
    }
    if (skipped(rt)) {
      ++rep.skipped;
      rep.partial = true;
      continue;
    }
    ++rep.fail;
    if (!rep.counterexample) {
      auto cls = failure_class(rt.reason);
      auto fails = [&](const Instance& x) {
        auto again = guarded_round_trip(r, x, i);
        return counts_as_failure(again) && failure_class(again.reason) == cls;
      };
      auto small = counts_as_failure(rt) ? shrink(inst, fam, fails) : inst;
      rep.counterexample = small;
      auto again = guarded_round_trip(r, small, i);
      rep.failure = again.ok ? rt.reason : again.reason;
    }
  }
  rep.seconds = since(t0);
  return rep;
}

TotalityReport totality_check(const std::string& prob, std::size_t n, std::size_t samples, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  TotalityReport rep;
  rep.problem = prob;
  rep.n = n;
  FamilyParams fam;
  fam.problem = prob;
  fam.n = n;
  fam.samples = samples;
  fam.seed = seed;
  fam.exhaustive = problem(prob).instance_layout(n).length() <= kMaxExhaustiveBits;
  auto size = family_size(fam);
  for (std::size_t i = 0; i < size; ++i) {
    auto inst = family_member(fam, i);
    ++rep.instances;
    bool ok = false;
    try {
      ok = verify(inst, brute_solve(inst)) == Verdict::Accept;
    } catch (const SolveError&) {
    }
    if (ok) ++rep.solved;
    else if (!rep.counterexample) rep.counterexample = inst;
  }
  rep.seconds = since(t0);
  return rep;
}

nlohmann::json report_json(const CheckReport& r) {
  nlohmann::json j;
  j["reduction"] = r.reduction;
  j["family"] = {{"problem", r.family.problem}, {"oracle", r.family.oracle},       {"n", r.family.n},
                 {"t", r.family.t},             {"k", r.family.k},                 {"samples", r.family.samples},
                 {"seed", r.family.seed},       {"mode", r.family.exhaustive ? "exhaustive" : "random"}};
  j["pass"] = r.pass;
  j["fail"] = r.fail;
  j["skipped"] = r.skipped;
  j["partial"] = r.partial;
  j["counterexample"] = r.counterexample ? instance_to_json(*r.counterexample) : nlohmann::json(nullptr);
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

std::string report_text(const CheckReport& r) {
  std::ostringstream o;
  o << "reduction " << r.reduction << "\n";
  o << "family problem=" << r.family.problem;
  if (!r.family.oracle.empty()) o << "^" << r.family.oracle << " t=" << r.family.t << " k=" << r.family.k;
  o << " n=" << r.family.n << " mode=" << (r.family.exhaustive ? "exhaustive" : "random");
  if (!r.family.exhaustive) o << " samples=" << r.family.samples << " seed=" << r.family.seed;
  o << "\n";
  o << "pass=" << r.pass << " fail=" << r.fail << " skipped=" << r.skipped << (r.partial ? " (partial)" : "") << "\n";
  if (r.counterexample) {
    o << "failure: " << r.failure << "\n";
    o << "counterexample: " << instance_to_json(*r.counterexample).dump() << "\n";
  }
  return o.str();
}

nlohmann::json report_json(const TotalityReport& r) {
  nlohmann::json j;
  j["problem"] = r.problem;
  j["n"] = r.n;
  j["instances"] = r.instances;
  j["solved"] = r.solved;
  j["counterexample"] = r.counterexample ? instance_to_json(*r.counterexample) : nlohmann::json(nullptr);
  return j;
}

std::string report_text(const TotalityReport& r) {
  std::ostringstream o;
  o << "totality " << r.problem << " n=" << r.n << " solved=" << r.solved << "/" << r.instances << "\n";
  if (r.counterexample) o << "unsolved: " << instance_to_json(*r.counterexample).dump() << "\n";
  return o.str();
}

}  // namespace tfnp
