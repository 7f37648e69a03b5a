#include <doctest.h>

#include <random>

#include "tfnp/harness.hpp"
#include "tfnp/json_io.hpp"
#include "tfnp/oracle_eval.hpp"

using namespace tfnp;

namespace {

// Independent checkers over truth tables.
std::vector<std::uint64_t> table_of(const Circuit& c) {
  std::vector<std::uint64_t> t;
  for (std::uint64_t x = 0; x < (1ULL << c.n()); ++x) t.push_back(eval_plain(c, BitVec::from_uint(x, c.n())).to_uint());
  return t;
}

bool iter_ok(const std::vector<std::uint64_t>& s, std::uint64_t x, bool two) {
  if (x == 0 && s[0] == 0) return true;
  if (two && s[x] < x) return true;
  return s[x] > x && s[s[x]] <= s[x];
}

bool lonely_ok(const std::vector<std::uint64_t>& c, std::uint64_t w) {
  if (c[0] != 0) return true;
  return w != 0 && (c[w] == w || c[c[w]] != w);
}

bool lossy_ok(const std::vector<std::uint64_t>& c, const std::vector<std::uint64_t>& d, std::uint64_t x) {
  return d[c[x]] != x;
}

Instance table_instance(const std::string& p, std::size_t n, std::uint64_t bits) {
  auto lay = problem(p).instance_layout(n);
  return instance_from_tables(p, lay, BitVec::from_uint(bits, lay.length()));
}

Solution solve_back(const Reduction& r, const Instance& src) {
  ReductionContext ctx;
  auto img = r.forward(src, ctx);
  if (img.direct) return *img.direct;
  auto target_sol = solve_any(img.target);
  auto back = r.backward(src, img, target_sol, ctx);
  REQUIRE(back);
  return *back;
}

FamilyParams lifted(const std::string& a, const std::string& b, std::size_t n, std::size_t k, std::size_t samples,
                    std::uint64_t seed) {
  FamilyParams f;
  f.problem = a;
  f.oracle = b;
  f.n = n;
  f.k = k;
  f.samples = samples;
  f.seed = seed;
  return f;
}

}  // namespace

TEST_CASE("iter2 and iter plumbing, exhaustive n=2, independent check") {
  for (auto [name, src, two] : {std::tuple{"iter2_to_iter", "iter2", true}, std::tuple{"iter_to_iter2", "iter", false}}) {
    auto r = find_reduction(name);
    for (std::uint64_t bits = 0; bits < 256; ++bits) {
      auto inst = table_instance(src, 2, bits);
      auto s = table_of(inst.circuits[0]);
      auto sol = solve_back(r, inst);
      CHECK(iter_ok(s, sol.y.to_uint(), two));
    }
  }
}

TEST_CASE("lonely_to_bipartite and sinkofdag_to_iter map back") {
  auto r = find_reduction("lonely_to_bipartite");
  for (std::uint64_t bits = 0; bits < 256; ++bits) {
    auto inst = table_instance("lonely", 2, bits);
    CHECK(lonely_ok(table_of(inst.circuits[0]), solve_back(r, inst).y.to_uint()));
  }
  auto s = find_reduction("sinkofdag_to_iter");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto inst = random_instance("sink_of_dag", 2, rng);
    auto sol = solve_back(s, inst);
    CHECK(verify(inst, sol.y) == Verdict::Accept);
  }
}

TEST_CASE("lossy_to_injective_pigeon keeps gates and answers") {
  auto r = find_reduction("lossy_to_injective_pigeon");
  for (std::uint64_t bits = 0; bits < 256; ++bits) {
    auto inst = table_instance("lossy", 2, bits);
    auto c = table_of(inst.circuits[0]), d = table_of(inst.circuits[1]);
    CHECK(lossy_ok(c, d, solve_back(r, inst).y.to_uint()));
  }
}

TEST_CASE("pad_lossy composes C and D level by level") {
  auto r = pad_lossy(10);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto inst = random_instance("lossy", 4, rng);
    ReductionContext ctx;
    auto img = r.forward(inst, ctx);
    const auto& ck = img.target.circuits[0];
    const auto& dk = img.target.circuits[1];
    REQUIRE(ck.n() == 10);
    CHECK(ck.m() == 5);
    CHECK(dk.n() == 5);
    auto c = table_of(inst.circuits[0]), d = table_of(inst.circuits[1]);
    for (std::uint64_t x = 0; x < 1024; x += 7) {
      auto xv = BitVec::from_uint(x, 10);
      auto cur = c[xv.slice(0, 4).to_uint()];
      for (std::size_t pos = 4; pos < 10; pos += 2) cur = c[(cur << 2) | xv.slice(pos, 2).to_uint()];
      auto out = eval_plain(ck, xv);
      CHECK(out.slice(0, 2).to_uint() == cur);
      CHECK(out.slice(2, 3).is_zero());
    }
    CHECK(lossy_ok(c, d, solve_back(r, inst).y.to_uint()));
  }
}

TEST_CASE("lonely_selflow: bad events form an involution") {
  auto fam = lifted("lonely", "lonely", 3, 3, 40, 3);
  auto r = lonely_selflow();
  std::mt19937_64 rng(1);
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    ReductionContext ctx;
    auto img = r.forward(inst, ctx);
    if (img.direct) {
      CHECK(verify_lifted(inst, *img.direct).accepted());
      continue;
    }
    const auto& cp = img.target.circuits[0];
    auto u = img.target.aux;
    CHECK(eval_plain(cp, u) == u);
    auto orphan = lonely_selflow_orphan(img);
    CHECK(eval_plain(cp, orphan) == u);
    for (int j = 0; j < 50; ++j) {
      BitVec v(cp.n());
      for (std::size_t b = 0; b < v.size(); ++b) v.set(b, rng() & 1);
      auto w = eval_plain(cp, v);
      bool flipped = w.slice(0, v.size() - 1) == v.slice(0, v.size() - 1) && w != v;
      if (v.slice(0, 3).is_zero() && v != u && v != orphan) CHECK(flipped);
      if (flipped && v != orphan) CHECK(eval_plain(cp, w) == v);
    }
  }
}

TEST_CASE("lonely_selflow: target solutions other than the orphan map back") {
  auto fam = lifted("lonely", "lonely", 3, 3, 30, 9);
  auto r = lonely_selflow();
  std::size_t checked = 0;
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    ReductionContext ctx;
    auto img = r.forward(inst, ctx);
    if (img.direct) continue;
    auto orphan = lonely_selflow_orphan(img);
    const auto& cp = img.target.circuits[0];
    for (std::uint64_t v = 0; v < (1ULL << cp.n()); ++v) {
      auto vb = BitVec::from_uint(v, cp.n());
      if (vb == orphan || verify(img.target, vb) != Verdict::Accept) continue;
      auto back = r.backward(inst, img, Solution{vb, {}}, ctx);
      REQUIRE(back);
      CHECK(verify_lifted(inst, *back).accepted());
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("iter_selflow: case 4 strictly increases and every target solution maps back") {
  auto fam = lifted("iter", "iter2", 3, 3, 30, 4);
  auto r = iter_selflow();
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    ReductionContext ctx;
    auto img = r.forward(inst, ctx);
    if (img.direct) {
      CHECK(verify_lifted(inst, *img.direct).accepted());
      continue;
    }
    auto s = table_of(img.target.circuits[0]);
    CHECK(s[0] != 0);
    for (std::uint64_t v = 0; v < s.size(); ++v) {
      if ((s[v] >> 6) != (v >> 6)) CHECK(s[v] > v);
      if (!iter_ok(s, v, false)) continue;
      auto back = r.backward(inst, img, Solution{BitVec::from_uint(v, 9), {}}, ctx);
      REQUIRE(back);
      CHECK(verify_lifted(inst, *back).accepted());
    }
  }
}

TEST_CASE("lossy_selflow compresses by one bit and D'C' fixes non-solutions") {
  auto fam = lifted("lossy", "lossy", 4, 8, 10, 2);
  auto r = lossy_selflow();
  std::mt19937_64 rng(3);
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    ReductionContext ctx;
    auto img = r.forward(inst, ctx);
    const auto& c = img.target.circuits[0];
    const auto& d = img.target.circuits[1];
    CHECK(c.m() + 1 == c.n());
    for (int j = 0; j < 200; ++j) {
      BitVec v(c.n());
      for (std::size_t b = 0; b < v.size(); ++b) v.set(b, rng() & 1);
      if (eval_plain(d, eval_plain(c, v)) == v) continue;
      auto back = r.backward(inst, img, Solution{v, {}}, ctx);
      REQUIRE(back);
      CHECK(verify_lifted(inst, *back).accepted());
    }
  }
  auto bad = fam;
  bad.k = 2;
  ReductionContext ctx;
  CHECK_THROWS_AS(r.forward(family_member(bad, 0), ctx), PreconditionError);
}

TEST_CASE("combinators: chain, lift and swap") {
  auto r = find_reduction("chain(iter2_to_iter,iter_to_sinkofdag)");
  CHECK(r.source == "iter2");
  CHECK(r.target == "sink_of_dag");
  for (std::uint64_t bits = 0; bits < 256; ++bits) {
    auto inst = table_instance("iter2", 2, bits);
    CHECK(iter_ok(table_of(inst.circuits[0]), solve_back(r, inst).y.to_uint(), true));
  }

  auto sw = find_reduction("swap(iter2_to_iter)");
  auto fam = lifted("lonely", "iter2", 2, 2, 40, 1);
  for (std::size_t i = 0; i < fam.samples; ++i) {
    auto inst = family_member(fam, i);
    ReductionContext ctx;
    auto img = sw.forward(inst, ctx);
    CHECK(img.target.oracle_problem() == "iter");
    auto rt = round_trip(sw, inst);
    CHECK_MESSAGE(rt.ok, rt.reason);
  }

  auto lf = find_reduction("lift(lonely_to_bipartite)");
  auto fam2 = lifted("lonely", "iter", 2, 2, 40, 2);
  for (std::size_t i = 0; i < fam2.samples; ++i) {
    auto rt = round_trip(lf, family_member(fam2, i), AnswerPolicy::RandomValid, i);
    CHECK_MESSAGE(rt.ok, rt.reason);
  }
  CHECK_THROWS_AS(find_reduction("lift(lonely_selflow)"), PreconditionError);
  CHECK_THROWS_AS(find_reduction("nope"), MalformedError);
}

TEST_CASE("check_reduction reports and shrinks mutations") {
  auto fam = lifted("iter", "iter2", 3, 3, 60, 0);
  auto good = check_reduction("iter_selflow", fam);
  CHECK(good.fail == 0);
  CHECK_FALSE(good.counterexample);
  auto bad = check_reduction("iter_selflow!swap-cases", fam);
  REQUIRE(bad.fail > 0);
  REQUIRE(bad.counterexample);
  CHECK_FALSE(round_trip(find_reduction("iter_selflow!swap-cases"), *bad.counterexample).ok);
  CHECK(report_json(good).dump() == report_json(check_reduction("iter_selflow", fam)).dump());
}

TEST_CASE("instance and solution JSON round trip") {
  auto fam = lifted("lonely", "lonely", 3, 3, 3, 0);
  auto inst = family_member(fam, 0);
  auto back = instance_from_json(instance_to_json(inst));
  CHECK(back.problem == inst.problem);
  CHECK(to_text(back.circuits[0]) == to_text(inst.circuits[0]));
  auto sol = solve_any(inst);
  auto sol2 = solution_from_json(inst, solution_to_json(inst, sol));
  CHECK(sol2 == sol);
  CHECK(parse_solution(table_instance("iter", 2, 0), "01").y == BitVec::from_bits("01"));
  CHECK_THROWS_AS(parse_instance("{\"problem\":\"iter\"}"), MalformedError);
  CHECK_THROWS_AS(parse_instance("not json"), MalformedError);
}

TEST_CASE("generators are deterministic and respect the exhaustive bound") {
  FamilyParams f;
  f.problem = "iter";
  f.n = 2;
  f.exhaustive = true;
  CHECK(generate(f).size() == 256);
  f.n = 3;
  CHECK_THROWS_AS(generate(f), PreconditionError);
  auto l = lifted("lonely", "lonely", 3, 3, 5, 7);
  auto a = generate(l), b = generate(l);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_text(a[i].circuits[0]) == to_text(b[i].circuits[0]));
  auto lossy = generate(lifted("lossy", "lossy", 4, 8, 3, 1));
  CHECK(lossy[0].circuits[0].n() == 4);
  CHECK(lossy[0].circuits[0].m() == 2);
  CHECK(lossy[0].oracle_count() == 1);
}
