#include <doctest.h>

#include "tfnp/examples.hpp"
#include "tfnp/lifting.hpp"

using namespace tfnp;

namespace {
BitVec u(std::uint64_t v, std::size_t w) { return BitVec::from_uint(v, w); }
BitVec pair6(std::uint64_t a, std::uint64_t b) { return concat({u(a, 6), u(b, 6)}); }
}  // namespace

TEST_CASE("fig1 lifted solutions") {
  auto t = fig1_instance();
  Solution bad{pair6(0, 32), {{u(0, 5), u(2, 5)}, {u(8, 5), u(0, 5)}}};
  auto v = verify_lifted(t, bad);
  CHECK(v.verdict == Verdict::Reject);
  CHECK(v.reason.find("inconsistent") != std::string::npos);

  Solution good{pair6(0, 32), {{u(0, 5), u(2, 5)}, {u(2, 5), u(0, 5)}}};
  CHECK(verify_lifted(t, good).accepted());

  Solution extra = good;
  extra.rows.push_back({u(0, 5), u(0, 5)});
  CHECK(verify_lifted(t, extra).verdict == Verdict::Malformed);

  Solution short_rows = good;
  short_rows.rows.pop_back();
  CHECK(verify_lifted(t, short_rows).verdict == Verdict::Malformed);

  Solution wrong_width{pair6(0, 32), {{u(0, 4), u(2, 5)}, {u(2, 5), u(0, 5)}}};
  CHECK(verify_lifted(t, wrong_width).verdict == Verdict::Malformed);
}

TEST_CASE("lifted solver under both instantiations") {
  auto t = fig1_instance();
  for (auto policy : {AnswerPolicy::Canonical, AnswerPolicy::RandomValid}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Instantiation inst(policy, seed);
      auto r = lifted_solve(t, inst);
      CHECK(verify_lifted(t, r.solution).accepted());
    }
  }
  auto s = solve_any(t);
  CHECK(verify_solution(t, s).accepted());
}

TEST_CASE("package_rows reproduces the verifier's evaluations") {
  auto t = fig1_instance();
  Instantiation canon(AnswerPolicy::Canonical, 0);
  auto sol = package_rows(t, pair6(0, 32), canon.fn());
  REQUIRE(sol);
  CHECK(sol->rows.size() == 2);
  CHECK(verify_lifted(t, *sol).accepted());
  CHECK_FALSE(package_rows(t, pair6(10, 10), canon.fn()));
}
