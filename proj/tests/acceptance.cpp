#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "tfnp/examples.hpp"
#include "tfnp/harness.hpp"
#include "tfnp/oracle_eval.hpp"

using namespace tfnp;

namespace {

using Table = std::vector<std::uint64_t>;

BitVec u(std::uint64_t v, std::size_t w) { return BitVec::from_uint(v, w); }

Table table_of(const Circuit& c) {
  Table t;
  for (std::uint64_t x = 0; x < (1ULL << c.n()); ++x) t.push_back(eval_plain(c, u(x, c.n())).to_uint());
  return t;
}

BitVec random_bits(std::size_t w, std::mt19937_64& rng) {
  BitVec v(w);
  for (std::size_t i = 0; i < w; ++i) v.set(i, rng() & 1);
  return v;
}

// Reference predicates written straight from the problem definitions.
bool iter_ok(const Table& s, std::uint64_t x, bool two) {
  if (x == 0 && s[0] == 0) return true;
  if (two && s[x] < x) return true;
  return s[x] > x && s[s[x]] <= s[x];
}

bool lonely_ok(const Table& c, std::uint64_t w) {
  if (c[0] != 0) return true;
  return w != 0 && (c[w] == w || c[c[w]] != w);
}

bool reference_ok(const Instance& inst, const BitVec& y) {
  const auto& p = inst.problem;
  auto n = inst.circuits[0].n();
  auto c = table_of(inst.circuits[0]);
  if (p == "iter" || p == "iter2") return y.size() == n && iter_ok(c, y.to_uint(), p == "iter2");
  if (p == "lonely") return y.size() == n && lonely_ok(c, y.to_uint());
  if (p == "pigeon") {
    if (y.size() != 2 * n + 1) return false;
    auto a = y.slice(1, n).to_uint(), b = y.slice(1 + n, n).to_uint();
    return y[0] ? a != b && c[a] == c[b] : b == 0 && c[a] == 0;
  }
  if (p == "weak_pigeon") {
    if (y.size() != 2 * n) return false;
    auto a = y.slice(0, n).to_uint(), b = y.slice(n, n).to_uint();
    return a != b && c[a] == c[b];
  }
  if (p == "injective_pigeon") {
    if (y.size() != n) return false;
    auto d = table_of(inst.circuits[1]);
    auto top = (1ULL << n) - 1;
    auto x = y.to_uint();
    auto cx = c[x] == top ? top - 1 : c[x];
    return d[cx] != x;
  }
  return false;
}

struct Result {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double limit, const std::function<Result()>& body) {
  auto start = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  bool in_time = d.count() < limit;
  bool ok = r.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %d %s: %s [%.2fs / %.0fs]\n", ok ? "PASS" : "FAIL", id, name, r.detail.c_str(), d.count(),
              limit);
  std::fflush(stdout);
}

FamilyParams lifted(const std::string& a, const std::string& b, std::size_t n, std::size_t k, std::size_t samples,
                    std::uint64_t seed) {
  FamilyParams f;
  f.problem = a;
  f.oracle = b;
  f.n = n;
  f.t = 1;
  f.k = k;
  f.samples = samples;
  f.seed = seed;
  return f;
}

std::string counts(std::size_t ok, std::size_t total) { return std::to_string(ok) + "/" + std::to_string(total); }

Result fig1() {
  auto t = fig1_instance();
  const auto& c = t.circuits[0];
  Result r;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) {
      r.pass = false;
      r.detail += std::string(what) + " mismatch; ";
    }
  };
  auto a = eval_c_star(c, u(10, 6), {u(2, 5), u(17, 5)});
  expect(a.kind == OutcomeKind::Bottom, "C*(10,(2,17))");
  auto b = eval_c_star(c, u(10, 6), {u(2, 5), u(21, 5)});
  expect(b.kind == OutcomeKind::Result && b.output.to_uint() == 0, "C*(10,(2,21))");
  auto s = eval_c_sub_star(c, u(10, 6), {u(2, 5), u(21, 5)});
  expect(s.kind == OutcomeKind::Result && s.output.to_uint() == 2, "C_*(10,(2,21))");
  auto e = eval_c_sub_star(c, u(14, 6), {u(7, 5), u(9, 5)});
  expect(e.kind == OutcomeKind::Error && e.error_index == 2 && e.error_query.to_uint() == 46, "C_*(14,(7,9))");
  auto y = concat({u(0, 6), u(32, 6)});
  auto bad = verify_lifted(t, Solution{y, {{u(0, 5), u(2, 5)}, {u(8, 5), u(0, 5)}}});
  expect(bad.verdict == Verdict::Reject && bad.reason.find("inconsistent") != std::string::npos, "inconsistent reject");
  auto good = verify_lifted(t, Solution{y, {{u(0, 5), u(2, 5)}, {u(2, 5), u(0, 5)}}});
  expect(good.accepted(), "consistent accept");
  if (r.pass) r.detail = "6/6 golden values";
  return r;
}

Result totality() {
  Result r;
  for (const char* p : {"iter", "iter2", "lonely", "pigeon", "injective_pigeon", "weak_pigeon"}) {
    FamilyParams f;
    f.problem = p;
    f.n = 2;
    f.exhaustive = true;
    auto size = family_size(f);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < size; ++i) {
      auto inst = family_member(f, i);
      if (reference_ok(inst, brute_solve(inst))) ++ok;
    }
    r.pass = r.pass && ok == size;
    r.detail += std::string(p) + " " + counts(ok, size) + " ";
  }
  return r;
}

Result iter_plumbing() {
  Result r;
  for (auto [name, src, two] : {std::tuple{"iter2_to_iter", "iter2", true}, std::tuple{"iter_to_iter2", "iter", false}}) {
    auto red = find_reduction(name);
    FamilyParams f;
    f.problem = src;
    f.n = 2;
    f.exhaustive = true;
    std::size_t ok = 0, size = family_size(f);
    for (std::size_t i = 0; i < size; ++i) {
      auto inst = family_member(f, i);
      auto rt = round_trip(red, inst);
      if (rt.ok && iter_ok(table_of(inst.circuits[0]), rt.source_solution.y.to_uint(), two)) ++ok;
    }
    r.pass = r.pass && ok == size;
    r.detail += std::string(name) + " " + counts(ok, size) + " ";
  }
  return r;
}

Result lonely_selflow_check() {
  Result r;
  auto red = lonely_selflow();
  auto fam = lifted("lonely", "lonely", 3, 7, 1000, 41);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    auto rt = round_trip(red, inst);
    if (rt.ok && verify_lifted(inst, rt.source_solution).accepted()) ++ok;
  }
  r.pass = ok == fam.samples;
  r.detail = "accept " + counts(ok, fam.samples);

  std::mt19937_64 rng(17);
  std::size_t tuples = 0, held = 0;
  auto probe = lifted("lonely", "lonely", 3, 7, 1 << 20, 43);
  for (std::size_t i = 0; tuples < 10000 && i < probe.samples; ++i) {
    auto inst = family_member(probe, i);
    ReductionContext ctx;
    auto img = red.forward(inst, ctx);
    if (img.direct) continue;
    const auto& cp = img.target.circuits[0];
    for (int j = 0; j < 100 && tuples < 10000; ++j) {
      auto v = random_bits(cp.n(), rng);
      if (j % 2 == 0) v.overwrite(0, BitVec(3));  // x1 = 0 is always a bad event
      auto w = eval_plain(cp, v);
      bool flipped = w != v && w.prefix(v.size() - 1) == v.prefix(v.size() - 1);
      if (!flipped) continue;
      ++tuples;
      if (eval_plain(cp, w) == v) ++held;
    }
  }
  r.pass = r.pass && tuples == 10000 && held == tuples;
  r.detail += ", involution " + counts(held, tuples);
  return r;
}

Result iter_selflow_check() {
  Result r;
  auto red = iter_selflow();
  auto fam = lifted("iter", "iter2", 3, 3, 1000, 51);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    auto rt = round_trip(red, inst);
    if (rt.ok && verify_lifted(inst, rt.source_solution).accepted()) ++ok;
  }
  r.pass = ok == fam.samples;
  r.detail = "accept " + counts(ok, fam.samples);

  // Classify each sampled input from the source instance, then check that S'
  // behaves as exactly that case prescribes.
  std::mt19937_64 rng(23);
  std::size_t sampled = 0, held = 0, by_case[5] = {};
  auto probe = lifted("iter", "iter2", 3, 3, 1 << 20, 53);
  for (std::size_t i = 0; sampled < 10000 && i < probe.samples; ++i) {
    auto inst = family_member(probe, i);
    ReductionContext ctx;
    auto img = red.forward(inst, ctx);
    if (img.direct) continue;
    const auto& src = inst.circuits[0];
    const auto& sp = img.target.circuits[0];
    auto n = src.n();
    auto s = src.oracle_widths()[0];
    for (int j = 0; j < 100 && sampled < 10000; ++j) {
      auto v = random_bits(sp.n(), rng);
      if (v.is_zero()) continue;
      auto x = v.slice(0, n);
      auto w1 = v.slice(n, s), w2 = v.slice(n + s, s);
      AnswerLedger ledger;
      auto r1 = eval_c_star(src, x, {w1}, &ledger);
      int kind;
      BitVec y, repaired;
      if (r1.kind != OutcomeKind::Result || r1.inconsistent) {
        kind = 1;
      } else if (!(r1.output > x)) {
        kind = 2;
      } else {
        y = r1.output;
        auto r2 = eval_c_star(src, y, {w2}, &ledger);
        kind = (r2.kind != OutcomeKind::Result || r2.inconsistent) ? 3 : 4;
        if (kind == 3) {
          // One gate: its query on y comes from a C_* run with no witnesses.
          auto probe_y = eval_c_sub_star(src, y, {});
          auto q = probe_y.kind == OutcomeKind::Error ? probe_y.error_query : probe_y.trace.at(0).query;
          if (q == r1.trace.at(0).query && w2 != w1) {
            repaired = w1;
          } else {
            auto h = problem("iter2").decode_query(q).circuits.at(0);
            repaired = eval_plain(h, w2);
          }
        }
      }
      auto out = eval_plain(sp, v);
      bool good = false;
      switch (kind) {
        case 1:
        case 2:
          good = out == v;
          break;
        case 3:
          good = out == concat({x, w1, repaired});
          break;
        case 4:
          good = out == concat({y, w2, BitVec(s)}) && out > v;
          break;
      }
      ++sampled;
      ++by_case[kind];
      if (good) ++held;
    }
  }
  r.pass = r.pass && sampled == 10000 && held == sampled;
  r.detail += ", case invariants " + counts(held, sampled) + " (cases 1-4: " + std::to_string(by_case[1]) + "/" +
              std::to_string(by_case[2]) + "/" + std::to_string(by_case[3]) + "/" + std::to_string(by_case[4]) + ")";
  return r;
}

Result lossy_route() {
  Result r;
  auto route = find_reduction("chain(lossy_selflow,pad_lossy)");
  auto self = lossy_selflow();
  auto fam = lifted("lossy", "lossy", 4, 8, 1000, 61);
  std::size_t ok = 0, compress = 0;
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    auto rt = round_trip(route, inst);
    if (rt.ok && verify_lifted(inst, rt.source_solution).accepted()) ++ok;
    ReductionContext ctx;
    auto img = self.forward(inst, ctx);
    const auto& c = img.target.circuits[0];
    const auto& d = img.target.circuits[1];
    if (c.m() + 1 == c.n() && d.n() == c.m() && d.m() == c.n()) ++compress;
  }
  r.pass = ok == fam.samples && compress == fam.samples;
  r.detail = "accept " + counts(ok, fam.samples) + ", one-bit compression " + counts(compress, fam.samples);
  return r;
}

Result combinators() {
  Result r;
  std::size_t total = 0;
  for (const char* base : {"iter2_to_iter", "iter_to_iter2", "iter_to_sinkofdag", "sinkofdag_to_iter",
                           "bipartite_to_lonely", "lonely_to_bipartite", "lossy_to_injective_pigeon"}) {
    for (const char* comb : {"lift", "swap"}) {
      auto name = std::string(comb) + "(" + base + ")";
      auto red = find_reduction(name);
      auto fam = default_family(red);
      fam.samples = 500;
      fam.seed = 71;
      fam.exhaustive = false;
      auto rep = check_reduction(red, fam);
      total += rep.pass;
      bool hook = rep.failure.rfind("hook", 0) == 0;
      if (rep.fail || rep.skipped || hook || rep.pass < 500) {
        r.pass = false;
        r.detail += name + " pass=" + std::to_string(rep.pass) + " fail=" + std::to_string(rep.fail) +
                    " skipped=" + std::to_string(rep.skipped) + " " + rep.failure + "; ";
      }
    }
  }
  r.detail += "14 pairings, " + std::to_string(total) + " round trips accepted";
  return r;
}

Result replay() {
  Result r;
  std::mt19937_64 rng(81);
  std::size_t triples = 0, held = 0, attempts = 0;
  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"iter", "iter"}, {"lonely", "lonely"}, {"iter", "iter2"}, {"pigeon", "lonely"}, {"weak_pigeon", "iter"}};
  while (triples < 10000 && attempts < 200000) {
    ++attempts;
    const auto& [a, b] = kinds[rng() % kinds.size()];
    auto fam = lifted(a, b, 3, default_oracle_param(b), 1, 0);
    fam.t = 1 + rng() % 2;
    auto inst = random_lifted(fam, rng);
    const auto& c = inst.circuits[0];
    auto widths = c.oracle_widths();
    std::vector<BitVec> w;
    for (std::size_t i = 0, m = 1 + rng() % 4; i < m; ++i) w.push_back(random_bits(widths[rng() % widths.size()], rng));
    auto x = random_bits(c.n(), rng);
    auto sub = eval_c_sub_star(c, x, w);
    if (sub.kind != OutcomeKind::Result) continue;
    ++triples;
    auto star = eval_c_star(c, x, used_witnesses_in_order(sub));
    if (star.kind == OutcomeKind::Result && !star.inconsistent && star.output == sub.output) ++held;
  }
  r.pass = triples == 10000 && held == triples;
  r.detail = "replayed " + counts(held, triples) + " (" + std::to_string(attempts) + " draws)";
  return r;
}

Result mutations() {
  Result r;
  for (const char* name : {"lonely_selflow!drop-consistency", "iter_selflow!swap-cases", "lossy_selflow!no-tag"}) {
    auto red = find_reduction(name);
    auto fam = default_family(red);
    fam.samples = 300;
    auto rep = check_reduction(red, fam);
    bool caught = rep.fail > 0 && rep.counterexample;
    bool still = caught && !round_trip(red, *rep.counterexample).ok;
    r.pass = r.pass && caught && still;
    r.detail += std::string(name) + " fail=" + std::to_string(rep.fail) + (still ? " (minimized cex fails) " : " ");
  }
  return r;
}

}  // namespace

int main() {
  report(1, "fig1 golden values", 1, fig1);
  report(2, "totality n=2", 10, totality);
  report(3, "iter2<->iter exhaustive", 10, iter_plumbing);
  report(4, "lonely self-reduction", 60, lonely_selflow_check);
  report(5, "iter self-reduction", 60, iter_selflow_check);
  report(6, "lossy self-reduction with padding", 60, lossy_route);
  report(7, "lift and swap combinators", 120, combinators);
  report(8, "replay", 30, replay);
  report(9, "mutation sensitivity", 120, mutations);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures ? 1 : 0;
}
