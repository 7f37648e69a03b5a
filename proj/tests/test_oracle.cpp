#include <doctest.h>

#include "tfnp/examples.hpp"
#include "tfnp/oracle_eval.hpp"

using namespace tfnp;

namespace {

// Independent Factor oracle over small integers.
bool factor_ok(std::uint64_t x, std::uint64_t y) {
  bool prime = x >= 2;
  for (std::uint64_t d = 2; d * d <= x; ++d)
    if (x % d == 0) prime = false;
  if (x < 2 || prime) return y == 0;
  return y > 1 && y < x && x % y == 0;
}

BitVec u(std::uint64_t v, std::size_t w) { return BitVec::from_uint(v, w); }

}  // namespace

TEST_CASE("fig1 C-star and C-sub-star") {
  auto t = fig1_instance();
  const auto& c = t.circuits[0];
  validate_instance(t);

  auto r = eval_c_star(c, u(10, 6), {u(2, 5), u(17, 5)});
  CHECK(r.kind == OutcomeKind::Bottom);
  CHECK(r.bottom_gate == 2);
  CHECK_FALSE(factor_ok(42, 17));

  r = eval_c_star(c, u(10, 6), {u(2, 5), u(21, 5)});
  REQUIRE(r.kind == OutcomeKind::Result);
  CHECK(r.output.to_uint() == (2U & 21U));

  auto s = eval_c_sub_star(c, u(10, 6), {u(2, 5), u(21, 5)});
  REQUIRE(s.kind == OutcomeKind::Result);
  CHECK(s.output.to_uint() == 2);

  s = eval_c_sub_star(c, u(14, 6), {u(7, 5), u(9, 5)});
  REQUIRE(s.kind == OutcomeKind::Error);
  CHECK(s.error_index == 2);
  CHECK(s.error_query.to_uint() == 46);
  CHECK(factor_ok(14, 7));
  CHECK_FALSE(factor_ok(46, 7));
  CHECK_FALSE(factor_ok(46, 9));
}

TEST_CASE("fig1 C-star agrees with an independent evaluation on all small witnesses") {
  auto t = fig1_instance();
  for (std::uint64_t x : {0, 10, 14, 21, 32, 45, 63})
    for (std::uint64_t a = 0; a < 32; ++a)
      for (std::uint64_t b = 0; b < 32; b += 3) {
        std::uint64_t q2 = x ^ 32;
        auto r = eval_c_star(t.circuits[0], u(x, 6), {u(a, 5), u(b, 5)});
        bool ok = factor_ok(x, a) && factor_ok(q2, b);
        CHECK((r.kind == OutcomeKind::Result) == ok);
        if (ok) {
          CHECK(r.output.to_uint() == (a & b));
          CHECK(r.inconsistent == (x == q2 && a != b));
        }
      }
}

TEST_CASE("replay of C-sub-star through C-star") {
  auto t = fig1_instance();
  std::uint64_t state = 7;
  int results = 0;
  for (int i = 0; i < 2000; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    auto x = u(state >> 58, 6);
    std::vector<BitVec> pool{u((state >> 20) & 31, 5), u((state >> 30) & 31, 5)};
    auto s = eval_c_sub_star(t.circuits[0], x, pool);
    if (s.kind != OutcomeKind::Result) continue;
    ++results;
    auto replay = eval_c_star(t.circuits[0], x, used_witnesses_in_order(s));
    REQUIRE(replay.kind == OutcomeKind::Result);
    CHECK(replay.output == s.output);
    CHECK_FALSE(replay.inconsistent);
  }
  CHECK(results > 100);
}

TEST_CASE("ledger keeps the first answer") {
  AnswerLedger l;
  CHECK(l.record("factor", u(10, 6), u(2, 5)));
  CHECK(l.record("factor", u(10, 6), u(2, 5)));
  CHECK_FALSE(l.record("factor", u(10, 6), u(5, 5)));
  CHECK(l.find("factor", u(10, 6))->to_uint() == 2);
}

TEST_CASE("shared ledger detects inconsistency across evaluations") {
  auto t = fig1_instance();
  AnswerLedger l;
  auto a = eval_c_star(t.circuits[0], u(0, 6), {u(0, 5), u(2, 5)}, &l);
  CHECK_FALSE(a.inconsistent);
  auto b = eval_c_star(t.circuits[0], u(32, 6), {u(8, 5), u(0, 5)}, &l);
  CHECK(b.inconsistent);
  auto c = eval_c_star(t.circuits[0], u(32, 6), {u(2, 5), u(0, 5)}, &l);
  CHECK_FALSE(c.inconsistent);
}

TEST_CASE("factor brute force") {
  Instance f{"factor", {}, u(91, 7)};
  CHECK(brute_solve(f).to_uint() == 7);
  f.aux = u(32, 6);
  CHECK(brute_solve(f).to_uint() == 2);
  f.aux = u(13, 4);
  CHECK(brute_solve(f).to_uint() == 0);
  for (std::uint64_t x = 0; x < 64; ++x) {
    Instance g{"factor", {}, u(x, 6)};
    auto y = brute_solve(g).to_uint();
    CHECK(factor_ok(x, y));
    for (std::uint64_t z = 0; z < y; ++z) CHECK_FALSE(factor_ok(x, z));
  }
}

TEST_CASE("canonical instantiation") {
  auto t = fig1_instance();
  QueryTable q;
  auto r = canonical_instantiation(t.circuits[0], u(10, 6), q);
  CHECK(r.output.to_uint() == (2U & 2U));
  r = canonical_instantiation(t.circuits[0], u(0, 6), q);
  CHECK(r.output.to_uint() == 0);
}
