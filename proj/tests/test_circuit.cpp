#include <doctest.h>

#include "tfnp/circuit.hpp"
#include "tfnp/oracle_eval.hpp"
#include "tfnp/problems.hpp"

using namespace tfnp;

namespace {

BitVec bits(const char* s) { return BitVec::from_bits(s); }

Circuit and_reduce2() {
  CircuitBuilder b(2);
  return b.finish(b.gate(GateKind::And, 1, {b.input()}));
}

}  // namespace

TEST_CASE("bitvec order and codecs") {
  auto a = BitVec::from_uint(10, 6);
  CHECK(a.to_bits() == "001010");
  CHECK(a.to_uint() == 10);
  CHECK(BitVec::from_uint(3, 6) < a);
  CHECK(a.to_hex() == "0a");
  CHECK(BitVec::from_hex("0a", 6) == a);
  CHECK_THROWS(BitVec::from_hex("ff", 6));
  CHECK(a.suffix(3) == bits("010"));
  CHECK(a.resized(8).to_bits() == "00001010");
  CHECK(a.resized(3).to_bits() == "010");
}

TEST_CASE("and-reduce") {
  auto c = and_reduce2();
  CHECK(eval_plain(c, bits("11")) == bits("1"));
  CHECK(eval_plain(c, bits("10")) == bits("0"));
}

TEST_CASE("text format round trip") {
  CircuitBuilder b(3);
  auto x = b.input();
  auto n = b.gate(GateKind::Not, 1, {CircuitBuilder::slice(x, 0, 1)});
  auto cat = b.concat({n, CircuitBuilder::slice(x, 1, 2)});
  auto k = b.constant(bits("101"));
  auto c = b.finish(b.gate(GateKind::Xor, 3, {cat, k}));
  auto text = to_text(c);
  auto back = from_text(text);
  CHECK(back == c);
  CHECK(to_text(back) == text);
  for (std::uint64_t v = 0; v < 8; ++v) {
    auto in = BitVec::from_uint(v, 3);
    auto flipped = in;
    flipped.set(0, !in[0]);
    CHECK(eval_plain(back, in) == (flipped ^ bits("101")));
  }
}

TEST_CASE("text format rejects malformed input") {
  CHECK_THROWS_AS(from_text(""), MalformedError);
  CHECK_THROWS_AS(from_text("circuit n=2 m=1\n0 INPUT 2\n1 AND 1 5\n"), MalformedError);
  CHECK_THROWS_AS(from_text("circuit n=2 m=1\n0 INPUT 2\n1 FROB 1 0\n"), MalformedError);
  CHECK_THROWS_AS(from_text("circuit n=2 m=2\n0 INPUT 2\n1 AND 1 0\n"), MalformedError);
  CHECK_THROWS_AS(from_text("circuit n=2 m=1\n0 INPUT 2\n1 HOST 1 0 nosuch:1\n"), MalformedError);
}

TEST_CASE("bit codec is total and idempotent") {
  auto c = and_reduce2();
  CHECK(decode_circuit(encode_circuit(c)) == c);
  auto e = decode_circuit(BitVec());
  CHECK(e.n() == 1);
  CHECK(e.m() == 1);
  CHECK(eval_plain(e, bits("1")) == bits("1"));
  std::uint64_t state = 12345;
  for (int i = 0; i < 300; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    auto junk = BitVec::from_uint(state, 20 + i % 40);
    auto d = decode_circuit(junk);
    CHECK(decode_circuit(encode_circuit(d)) == d);
  }
}

TEST_CASE("lowering an equality gate") {
  CircuitBuilder b(4);
  auto x = b.input();
  auto c = b.finish(b.host("eq:2", {x}));
  auto low = lower_host_gates(c);
  CHECK_FALSE(low.has_host_gates());
  for (std::uint64_t v = 0; v < 16; ++v) {
    auto in = BitVec::from_uint(v, 4);
    CHECK(eval_plain(low, in) == BitVec(1, (v >> 2) == (v & 3)));
  }
}

TEST_CASE("lowering mux, compare, table and slices") {
  CircuitBuilder b(5);
  auto x = b.input();
  auto m = b.host("mux:2", {x});
  auto lt = b.host("ult:2", {CircuitBuilder::slice(x, 1, 4)});
  auto t = b.host("table:3:2:" + BitVec::from_bits("0011011011000110").to_hex(), {CircuitBuilder::slice(x, 2, 3)});
  auto c = b.finish(b.concat({m, lt, t, CircuitBuilder::slice(x, 4, 1)}));
  auto low = lower_host_gates(c);
  CHECK_FALSE(low.has_host_gates());
  for (std::uint64_t v = 0; v < 32; ++v) {
    auto in = BitVec::from_uint(v, 5);
    CHECK(eval_plain(low, in) == eval_plain(c, in));
  }
}
