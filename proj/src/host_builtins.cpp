// Lowerable host predicates: concat, slice, eq, ult, mux, table.
#include <charconv>

#include "tfnp/circuit.hpp"
#include "tfnp/host_util.hpp"

namespace tfnp {

std::vector<std::string_view> split_params(std::string_view s, std::size_t expected) {
  std::vector<std::string_view> out;
  while (true) {
    if (out.size() + 1 == expected) {
      out.push_back(s);
      break;
    }
    auto c = s.find(':');
    out.push_back(s.substr(0, c));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  if (expected && out.size() != expected) throw MalformedError("wrong number of host parameters");
  return out;
}

std::size_t param_size(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw MalformedError("bad host parameter");
  return v;
}

namespace {

Wire not_gate(CircuitBuilder& b, Wire w) { return b.gate(GateKind::Not, w.width, {w}); }

Wire lower_mux(CircuitBuilder& b, Wire sel, Wire a, Wire c) {
  if (a.width == 0) return a;
  auto nsel = b.gate(GateKind::Not, a.width, std::vector<Wire>(a.width, sel));
  auto psel = not_gate(b, nsel);
  auto left = b.gate(GateKind::And, a.width, {a, nsel});
  auto right = b.gate(GateKind::And, a.width, {c, psel});
  return b.gate(GateKind::Or, a.width, {left, right});
}

class Concat final : public HostFn {
 public:
  explicit Concat(std::size_t w) : w_(w) {}
  std::size_t in_width() const override { return w_; }
  std::size_t out_width() const override { return w_; }
  BitVec apply(const BitVec& in) const override { return in; }
  bool lowerable() const override { return true; }
  Wire lower(CircuitBuilder&, Wire in) const override { return in; }

 private:
  std::size_t w_;
};

class Slice final : public HostFn {
 public:
  Slice(std::size_t in, std::size_t off, std::size_t len) : in_(in), off_(off), len_(len) {
    if (off + len > in) throw MalformedError("slice out of range");
  }
  std::size_t in_width() const override { return in_; }
  std::size_t out_width() const override { return len_; }
  BitVec apply(const BitVec& in) const override { return in.slice(off_, len_); }
  bool lowerable() const override { return true; }
  Wire lower(CircuitBuilder&, Wire in) const override {
    return CircuitBuilder::slice(in, static_cast<std::uint32_t>(off_), static_cast<std::uint32_t>(len_));
  }

 private:
  std::size_t in_, off_, len_;
};

class Eq final : public HostFn {
 public:
  explicit Eq(std::size_t w) : w_(w) {}
  std::size_t in_width() const override { return 2 * w_; }
  std::size_t out_width() const override { return 1; }
  BitVec apply(const BitVec& in) const override {
    return BitVec(1, in.slice(0, w_) == in.slice(w_, w_));
  }
  bool lowerable() const override { return true; }
  Wire lower(CircuitBuilder& b, Wire in) const override {
    if (w_ == 0) return b.constant(BitVec(1, true));
    auto w = static_cast<std::uint32_t>(w_);
    auto diff = b.gate(GateKind::Xor, w, {CircuitBuilder::slice(in, 0, w), CircuitBuilder::slice(in, w, w)});
    auto any = b.gate(GateKind::Or, 1, {diff});
    return not_gate(b, any);
  }

 private:
  std::size_t w_;
};

class Ult final : public HostFn {
 public:
  explicit Ult(std::size_t w) : w_(w) {}
  std::size_t in_width() const override { return 2 * w_; }
  std::size_t out_width() const override { return 1; }
  BitVec apply(const BitVec& in) const override { return BitVec(1, in.slice(0, w_) < in.slice(w_, w_)); }
  bool lowerable() const override { return true; }
  Wire lower(CircuitBuilder& b, Wire in) const override {
    auto w = static_cast<std::uint32_t>(w_);
    if (w == 0) return b.constant(BitVec(1, false));
    std::vector<Wire> terms;
    std::optional<Wire> prefix_eq;
    for (std::uint32_t i = 0; i < w; ++i) {
      auto a = CircuitBuilder::slice(in, i, 1);
      auto c = CircuitBuilder::slice(in, w + i, 1);
      std::vector<Wire> lt{not_gate(b, a), c};
      if (prefix_eq) lt.push_back(*prefix_eq);
      terms.push_back(b.gate(GateKind::And, 1, lt));
      if (i + 1 < w) {
        auto eq = not_gate(b, b.gate(GateKind::Xor, 1, {a, c}));
        prefix_eq = prefix_eq ? b.gate(GateKind::And, 1, {*prefix_eq, eq}) : eq;
      }
    }
    return terms.size() == 1 ? terms[0] : b.gate(GateKind::Or, 1, terms);
  }

 private:
  std::size_t w_;
};

class Mux final : public HostFn {
 public:
  explicit Mux(std::size_t w) : w_(w) {}
  std::size_t in_width() const override { return 1 + 2 * w_; }
  std::size_t out_width() const override { return w_; }
  BitVec apply(const BitVec& in) const override { return in.slice(in[0] ? 1 + w_ : 1, w_); }
  bool lowerable() const override { return true; }
  Wire lower(CircuitBuilder& b, Wire in) const override {
    auto w = static_cast<std::uint32_t>(w_);
    return lower_mux(b, CircuitBuilder::slice(in, 0, 1), CircuitBuilder::slice(in, 1, w),
                     CircuitBuilder::slice(in, 1 + w, w));
  }

 private:
  std::size_t w_;
};

class Table final : public HostFn {
 public:
  Table(std::size_t in, std::size_t out, std::string_view hex) : in_(in), out_(out) {
    if (in > 20) throw MalformedError("table input too wide");
    table_ = BitVec::from_hex(hex, (std::size_t{1} << in) * out);
  }
  std::size_t in_width() const override { return in_; }
  std::size_t out_width() const override { return out_; }
  BitVec apply(const BitVec& in) const override { return table_.slice(in.to_uint() * out_, out_); }
  bool lowerable() const override { return true; }
  Wire lower(CircuitBuilder& b, Wire in) const override {
    std::vector<Wire> level;
    for (std::size_t i = 0; i < (std::size_t{1} << in_); ++i) level.push_back(b.constant(table_.slice(i * out_, out_)));
    for (std::size_t bit = in_; bit-- > 0;) {
      auto sel = CircuitBuilder::slice(in, static_cast<std::uint32_t>(bit), 1);
      std::vector<Wire> next;
      for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(lower_mux(b, sel, level[i], level[i + 1]));
      level = std::move(next);
    }
    return level[0];
  }

 private:
  std::size_t in_, out_;
  BitVec table_;
};

const bool registered = [] {
  register_host("concat", [](std::string_view p) { return std::make_shared<Concat>(param_size(p)); });
  register_host("slice", [](std::string_view p) {
    auto v = split_params(p, 3);
    return std::make_shared<Slice>(param_size(v[0]), param_size(v[1]), param_size(v[2]));
  });
  register_host("eq", [](std::string_view p) { return std::make_shared<Eq>(param_size(p)); });
  register_host("ult", [](std::string_view p) { return std::make_shared<Ult>(param_size(p)); });
  register_host("mux", [](std::string_view p) { return std::make_shared<Mux>(param_size(p)); });
  register_host("table", [](std::string_view p) {
    auto v = split_params(p, 3);
    return std::make_shared<Table>(param_size(v[0]), param_size(v[1]), v[2]);
  });
  return true;
}();

}  // namespace

std::string slice_id(std::size_t in, std::size_t off, std::size_t len) {
  return "slice:" + std::to_string(in) + ":" + std::to_string(off) + ":" + std::to_string(len);
}

}  // namespace tfnp
