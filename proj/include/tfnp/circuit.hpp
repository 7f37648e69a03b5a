#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tfnp/bitvec.hpp"

namespace tfnp {

struct MalformedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GateKind : std::uint8_t { Input = 0, Const, And, Or, Not, Xor, Oracle, Host };

std::string_view kind_name(GateKind k);
std::optional<GateKind> kind_from_name(std::string_view s);

// A contiguous slice of an earlier node's value.
struct Wire {
  std::uint32_t node = 0;
  std::uint32_t offset = 0;
  std::uint32_t width = 0;
  friend bool operator==(const Wire&, const Wire&) = default;
};

class CircuitBuilder;

// Pure function used by HOST gates. Implementations are immutable and shared.
class HostFn {
 public:
  virtual ~HostFn() = default;
  virtual std::size_t in_width() const = 0;
  virtual std::size_t out_width() const = 0;
  virtual BitVec apply(const BitVec& in) const = 0;
  virtual bool lowerable() const { return false; }
  virtual Wire lower(CircuitBuilder& b, Wire in) const;
};

using HostFactory = std::function<std::shared_ptr<const HostFn>(std::string_view params)>;

// Registers a predicate family; ids have the shape "name:params".
void register_host(const std::string& name, HostFactory factory);
std::shared_ptr<const HostFn> make_host(std::string_view id);

struct Gate {
  GateKind kind = GateKind::Input;
  std::uint32_t width = 0;
  std::vector<Wire> fanin;
  std::string tag;  // problem id for ORACLE, predicate id for HOST
  BitVec value;     // CONST payload
  std::shared_ptr<const HostFn> host;
};

// Returns the answer for an oracle gate, or nullopt to abort the evaluation.
using OracleResolver =
    std::function<std::optional<BitVec>(std::size_t ordinal, const Gate& gate, const BitVec& query)>;

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::vector<Gate> nodes);  // validates, throws MalformedError

  std::uint32_t n() const { return nodes_.front().width; }
  std::uint32_t m() const { return nodes_.back().width; }
  const std::vector<Gate>& nodes() const { return nodes_; }
  const std::vector<std::size_t>& oracle_nodes() const { return oracle_nodes_; }
  std::size_t oracle_count() const { return oracle_nodes_.size(); }
  std::vector<std::size_t> oracle_widths() const;
  bool has_host_gates() const;

  std::optional<BitVec> evaluate(const BitVec& x, const OracleResolver& resolve) const;

  friend bool operator==(const Circuit& a, const Circuit& b);

 private:
  std::vector<Gate> nodes_;
  std::vector<std::size_t> oracle_nodes_;
};

// Evaluates a circuit without oracle gates; throws if one is reached.
BitVec eval_plain(const Circuit& c, const BitVec& x);

class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::uint32_t n);

  Wire input() const { return Wire{0, 0, n_}; }
  Wire constant(const BitVec& v);
  Wire gate(GateKind kind, std::uint32_t width, std::vector<Wire> fanin);
  Wire oracle(const std::string& problem, std::uint32_t width, std::vector<Wire> fanin);
  Wire host(const std::string& id, std::vector<Wire> fanin);
  Wire host(std::shared_ptr<const HostFn> fn, const std::string& id, std::vector<Wire> fanin);
  Wire concat(const std::vector<Wire>& parts);
  static Wire slice(Wire w, std::uint32_t offset, std::uint32_t len) {
    return Wire{w.node, w.offset + offset, len};
  }
  // Copies c into this builder with c's input bound to `in`; returns c's output.
  Wire embed(const Circuit& c, Wire in);
  // Like embed, but `on_oracle` builds the replacement for every oracle gate.
  Wire embed_rewriting(const Circuit& c, Wire in,
                       const std::function<Wire(CircuitBuilder&, const Gate&, Wire query)>& on_oracle);

  std::size_t size() const { return nodes_.size(); }
  Circuit finish(Wire out);

 private:
  Wire push(Gate g);
  std::uint32_t n_;
  std::vector<Gate> nodes_;
};

// Circuit computing d(c(x)); oracle gates of c precede those of d.
Circuit compose(const Circuit& c, const Circuit& d);
// Circuit x -> table[x] backed by a single HOST table gate.
Circuit table_circuit(std::uint32_t in, std::uint32_t out, const BitVec& table);
// Truth table of an oracle-free circuit (2^n entries of m bits).
BitVec tabulate(const Circuit& c);
Circuit identity_circuit(std::uint32_t width);
// Replaces every lowerable host gate by AND/OR/NOT/XOR/CONST gates.
Circuit lower_host_gates(const Circuit& c);

// Textual format: "circuit n=<in> m=<out>" then "idx KIND width [fanin..] [tag]".
std::string to_text(const Circuit& c);
Circuit from_text(std::string_view text);  // throws MalformedError

BitVec encode_circuit(const Circuit& c);
// Total: malformed strings decode to the identity of width 1 + (len mod 16).
Circuit decode_circuit(const BitVec& bits);

}  // namespace tfnp
