#include "tfnp/circuit.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace tfnp {

namespace {

constexpr std::string_view kKindNames[] = {"INPUT", "CONST", "AND", "OR", "NOT", "XOR", "ORACLE", "HOST"};

std::size_t fanin_width(const std::vector<Wire>& fanin) {
  std::size_t w = 0;
  for (const auto& f : fanin) w += f.width;
  return w;
}

bool is_bitwise(const Gate& g) {
  for (const auto& f : g.fanin)
    if (f.width != g.width) return false;
  return true;
}

struct HostRegistry {
  std::mutex mu;
  std::map<std::string, HostFactory, std::less<>> factories;
  std::map<std::string, std::shared_ptr<const HostFn>, std::less<>> cache;
};

HostRegistry& registry() {
  static HostRegistry r;
  return r;
}

}  // namespace

std::string_view kind_name(GateKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<GateKind> kind_from_name(std::string_view s) {
  for (int i = 0; i < 8; ++i)
    if (kKindNames[i] == s) return static_cast<GateKind>(i);
  return std::nullopt;
}

Wire HostFn::lower(CircuitBuilder&, Wire) const {
  throw std::logic_error("host predicate is not lowerable");
}

void register_host(const std::string& name, HostFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

std::shared_ptr<const HostFn> make_host(std::string_view id) {
  auto& r = registry();
  HostFactory factory;
  auto colon = id.find(':');
  auto name = id.substr(0, colon);
  auto params = colon == std::string_view::npos ? std::string_view{} : id.substr(colon + 1);
  {
    std::lock_guard lock(r.mu);
    if (auto it = r.cache.find(id); it != r.cache.end()) return it->second;
    auto f = r.factories.find(name);
    if (f == r.factories.end()) throw MalformedError("unknown host predicate: " + std::string(name));
    factory = f->second;
  }
  // Factories may build circuits of their own, so they run unlocked.
  std::shared_ptr<const HostFn> fn;
  try {
    fn = factory(params);
  } catch (const MalformedError&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedError("bad host parameters for " + std::string(name) + ": " + e.what());
  }
  std::lock_guard lock(r.mu);
  if (r.cache.size() > 4096) r.cache.clear();
  return r.cache.emplace(std::string(id), fn).first->second;
}

Circuit::Circuit(std::vector<Gate> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty() || nodes_[0].kind != GateKind::Input || !nodes_[0].fanin.empty())
    throw MalformedError("node 0 must be the INPUT gate");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& g = nodes_[i];
    for (const auto& f : g.fanin) {
      if (f.node >= i) throw MalformedError("fanin must reference an earlier node");
      if (std::size_t(f.offset) + f.width > nodes_[f.node].width)
        throw MalformedError("fanin slice out of range");
    }
    switch (g.kind) {
      case GateKind::Input:
        if (i != 0) throw MalformedError("only node 0 may be INPUT");
        break;
      case GateKind::Const:
        if (!g.fanin.empty() || g.value.size() != g.width) throw MalformedError("bad CONST gate");
        break;
      case GateKind::And:
      case GateKind::Or:
      case GateKind::Xor:
        if (g.fanin.empty() || (!is_bitwise(g) && g.width != 1))
          throw MalformedError("bad boolean gate arity or width");
        break;
      case GateKind::Not:
        if (fanin_width(g.fanin) != g.width) throw MalformedError("bad NOT width");
        break;
      case GateKind::Oracle:
        if (g.tag.empty()) throw MalformedError("ORACLE gate without problem id");
        oracle_nodes_.push_back(i);
        break;
      case GateKind::Host:
        if (!g.host) g.host = make_host(g.tag);
        if (g.host->in_width() != fanin_width(g.fanin) || g.host->out_width() != g.width)
          throw MalformedError("HOST gate widths do not match predicate " + g.tag.substr(0, 40));
        break;
    }
  }
}

std::vector<std::size_t> Circuit::oracle_widths() const {
  std::vector<std::size_t> w;
  for (auto i : oracle_nodes_) w.push_back(nodes_[i].width);
  return w;
}

bool Circuit::has_host_gates() const {
  for (const auto& g : nodes_)
    if (g.kind == GateKind::Host) return true;
  return false;
}

std::optional<BitVec> Circuit::evaluate(const BitVec& x, const OracleResolver& resolve) const {
  if (x.size() != n()) throw MalformedError("input width mismatch");
  std::vector<BitVec> vals(nodes_.size());
  auto gather = [&](const std::vector<Wire>& fanin) {
    BitVec r;
    for (const auto& f : fanin) {
      const auto& v = vals[f.node];
      r.append(f.offset == 0 && f.width == v.size() ? v : v.slice(f.offset, f.width));
    }
    return r;
  };
  auto operand = [&](const Wire& f) {
    const auto& v = vals[f.node];
    return f.offset == 0 && f.width == v.size() ? v : v.slice(f.offset, f.width);
  };
  std::size_t ordinal = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& g = nodes_[i];
    switch (g.kind) {
      case GateKind::Input:
        vals[i] = x;
        break;
      case GateKind::Const:
        vals[i] = g.value;
        break;
      case GateKind::Not:
        vals[i] = ~gather(g.fanin);
        break;
      case GateKind::And:
      case GateKind::Or:
      case GateKind::Xor: {
        if (is_bitwise(g)) {
          BitVec acc = operand(g.fanin[0]);
          for (std::size_t k = 1; k < g.fanin.size(); ++k) {
            auto o = operand(g.fanin[k]);
            acc = g.kind == GateKind::And ? (acc & o) : g.kind == GateKind::Or ? (acc | o) : (acc ^ o);
          }
          vals[i] = std::move(acc);
        } else {
          auto all = gather(g.fanin);
          bool acc = g.kind == GateKind::And;
          for (std::size_t k = 0; k < all.size(); ++k) {
            if (g.kind == GateKind::And) acc = acc && all[k];
            else if (g.kind == GateKind::Or) acc = acc || all[k];
            else acc = acc != all[k];
          }
          vals[i] = BitVec(1, acc);
        }
        break;
      }
      case GateKind::Oracle: {
        auto ans = resolve(ordinal++, g, gather(g.fanin));
        if (!ans) return std::nullopt;
        if (ans->size() != g.width) throw std::logic_error("oracle answer width mismatch");
        vals[i] = std::move(*ans);
        break;
      }
      case GateKind::Host:
        vals[i] = g.host->apply(gather(g.fanin));
        break;
    }
  }
  return std::move(vals.back());
}

bool operator==(const Circuit& a, const Circuit& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.kind != y.kind || x.width != y.width || x.fanin != y.fanin || x.tag != y.tag || x.value != y.value)
      return false;
  }
  return true;
}

BitVec eval_plain(const Circuit& c, const BitVec& x) {
  auto r = c.evaluate(x, [](std::size_t, const Gate&, const BitVec&) -> std::optional<BitVec> {
    throw std::logic_error("oracle gate reached in plain evaluation");
  });
  return std::move(*r);
}

// ---------------------------------------------------------------- builder

CircuitBuilder::CircuitBuilder(std::uint32_t n) : n_(n) {
  Gate in;
  in.kind = GateKind::Input;
  in.width = n;
  nodes_.push_back(std::move(in));
}

Wire CircuitBuilder::push(Gate g) {
  auto w = g.width;
  nodes_.push_back(std::move(g));
  return Wire{static_cast<std::uint32_t>(nodes_.size() - 1), 0, w};
}

Wire CircuitBuilder::constant(const BitVec& v) {
  Gate g;
  g.kind = GateKind::Const;
  g.width = static_cast<std::uint32_t>(v.size());
  g.value = v;
  return push(std::move(g));
}

Wire CircuitBuilder::gate(GateKind kind, std::uint32_t width, std::vector<Wire> fanin) {
  Gate g;
  g.kind = kind;
  g.width = width;
  g.fanin = std::move(fanin);
  return push(std::move(g));
}

Wire CircuitBuilder::oracle(const std::string& problem, std::uint32_t width, std::vector<Wire> fanin) {
  Gate g;
  g.kind = GateKind::Oracle;
  g.width = width;
  g.fanin = std::move(fanin);
  g.tag = problem;
  return push(std::move(g));
}

Wire CircuitBuilder::host(const std::string& id, std::vector<Wire> fanin) {
  return host(make_host(id), id, std::move(fanin));
}

Wire CircuitBuilder::host(std::shared_ptr<const HostFn> fn, const std::string& id, std::vector<Wire> fanin) {
  if (fn->in_width() != fanin_width(fanin)) throw std::logic_error("host fanin width mismatch: " + id.substr(0, 40));
  Gate g;
  g.kind = GateKind::Host;
  g.width = static_cast<std::uint32_t>(fn->out_width());
  g.fanin = std::move(fanin);
  g.tag = id;
  g.host = std::move(fn);
  return push(std::move(g));
}

Wire CircuitBuilder::concat(const std::vector<Wire>& parts) {
  if (parts.size() == 1) return parts[0];
  return host("concat:" + std::to_string(fanin_width(parts)), parts);
}

Wire CircuitBuilder::embed(const Circuit& c, Wire in) {
  return embed_rewriting(c, in, [](CircuitBuilder& b, const Gate& g, Wire q) {
    return b.oracle(g.tag, g.width, {q});
  });
}

Wire CircuitBuilder::embed_rewriting(
    const Circuit& c, Wire in, const std::function<Wire(CircuitBuilder&, const Gate&, Wire)>& on_oracle) {
  if (in.width != c.n()) throw std::logic_error("embed input width mismatch");
  std::vector<Wire> map(c.nodes().size());
  auto remap = [&](const std::vector<Wire>& fanin) {
    std::vector<Wire> r;
    for (const auto& f : fanin) {
      const auto& base = map[f.node];
      r.push_back(Wire{base.node, base.offset + f.offset, f.width});
    }
    return r;
  };
  for (std::size_t i = 0; i < c.nodes().size(); ++i) {
    const auto& g = c.nodes()[i];
    if (g.kind == GateKind::Input) {
      map[i] = in;
      continue;
    }
    if (g.kind == GateKind::Oracle) {
      auto fan = remap(g.fanin);
      map[i] = on_oracle(*this, g, concat(fan));
      continue;
    }
    Gate copy = g;
    copy.fanin = remap(g.fanin);
    map[i] = push(std::move(copy));
  }
  return map.back();
}

Circuit CircuitBuilder::finish(Wire out) {
  const auto& last = nodes_.back();
  if (!(out.node == nodes_.size() - 1 && out.offset == 0 && out.width == last.width) || nodes_.size() == 1)
    gate(GateKind::Or, out.width, {out});
  return Circuit(std::move(nodes_));
}

// ---------------------------------------------------------------- helpers

Circuit compose(const Circuit& c, const Circuit& d) {
  if (c.m() != d.n()) throw std::logic_error("compose width mismatch");
  CircuitBuilder b(c.n());
  auto mid = b.embed(c, b.input());
  return b.finish(b.embed(d, mid));
}

Circuit table_circuit(std::uint32_t in, std::uint32_t out, const BitVec& table) {
  CircuitBuilder b(in);
  auto id = "table:" + std::to_string(in) + ":" + std::to_string(out) + ":" + table.to_hex();
  return b.finish(b.host(id, {b.input()}));
}

BitVec tabulate(const Circuit& c) {
  if (c.n() > 20) throw std::invalid_argument("circuit too wide to tabulate");
  BitVec t;
  for (std::uint64_t x = 0; x < (1ULL << c.n()); ++x) t.append(eval_plain(c, BitVec::from_uint(x, c.n())));
  return t;
}

Circuit identity_circuit(std::uint32_t width) {
  CircuitBuilder b(width);
  return b.finish(b.input());
}

Circuit lower_host_gates(const Circuit& c) {
  CircuitBuilder b(c.n());
  std::vector<Wire> map(c.nodes().size());
  for (std::size_t i = 0; i < c.nodes().size(); ++i) {
    const auto& g = c.nodes()[i];
    std::vector<Wire> fan;
    for (const auto& f : g.fanin) {
      const auto& base = map[f.node];
      fan.push_back(Wire{base.node, base.offset + f.offset, f.width});
    }
    switch (g.kind) {
      case GateKind::Input:
        map[i] = b.input();
        break;
      case GateKind::Const:
        map[i] = b.constant(g.value);
        break;
      case GateKind::Oracle:
        map[i] = b.oracle(g.tag, g.width, fan);
        break;
      case GateKind::Host:
        if (g.host->lowerable()) {
          // NOT(NOT(.)) concatenates without a host gate.
          Wire in = fan.size() == 1 ? fan[0] : b.gate(GateKind::Not, static_cast<std::uint32_t>(fanin_width(fan)), fan);
          if (fan.size() != 1) in = b.gate(GateKind::Not, in.width, {in});
          map[i] = g.host->lower(b, in);
        } else {
          map[i] = b.host(g.host, g.tag, fan);
        }
        break;
      default:
        map[i] = b.gate(g.kind, g.width, fan);
    }
  }
  return b.finish(map.back());
}

// ---------------------------------------------------------------- text

std::string to_text(const Circuit& c) {
  std::ostringstream os;
  os << "circuit n=" << c.n() << " m=" << c.m() << "\n";
  const auto& nodes = c.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& g = nodes[i];
    os << i << ' ' << kind_name(g.kind) << ' ' << g.width;
    for (const auto& f : g.fanin) {
      os << ' ' << f.node;
      if (!(f.offset == 0 && f.width == nodes[f.node].width)) os << '[' << f.offset << ':' << f.width << ']';
    }
    if (g.kind == GateKind::Const) os << ' ' << (g.width ? g.value.to_bits() : "-");
    if (g.kind == GateKind::Oracle || g.kind == GateKind::Host) os << ' ' << g.tag;
    os << "\n";
  }
  return os.str();
}

namespace {

std::uint32_t parse_u32(std::string_view s) {
  if (s.empty() || s.size() > 9) throw MalformedError("bad number: " + std::string(s));
  std::uint32_t v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw MalformedError("bad number: " + std::string(s));
    v = v * 10 + static_cast<std::uint32_t>(ch - '0');
  }
  return v;
}

}  // namespace

Circuit from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) throw MalformedError("empty circuit text");
  std::istringstream hs(line);
  std::string word, nf, mf;
  hs >> word >> nf >> mf;
  if (word != "circuit" || nf.rfind("n=", 0) != 0 || mf.rfind("m=", 0) != 0)
    throw MalformedError("bad circuit header");
  auto n = parse_u32(std::string_view(nf).substr(2));
  auto m = parse_u32(std::string_view(mf).substr(2));
  std::vector<Gate> nodes;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 3) throw MalformedError("truncated gate line");
    if (parse_u32(tok[0]) != nodes.size()) throw MalformedError("gate indices must be consecutive");
    auto kind = kind_from_name(tok[1]);
    if (!kind) throw MalformedError("unknown gate kind " + tok[1]);
    Gate g;
    g.kind = *kind;
    g.width = parse_u32(tok[2]);
    std::size_t end = tok.size();
    if (g.kind == GateKind::Oracle || g.kind == GateKind::Host || g.kind == GateKind::Const) {
      if (end < 4) throw MalformedError("missing gate tag");
      --end;
      if (g.kind == GateKind::Const) {
        try {
          g.value = tok[end] == "-" ? BitVec() : BitVec::from_bits(tok[end]);
        } catch (const std::invalid_argument&) {
          throw MalformedError("bad CONST value");
        }
      } else {
        g.tag = tok[end];
      }
    }
    for (std::size_t k = 3; k < end; ++k) {
      std::string_view t = tok[k];
      Wire w;
      auto br = t.find('[');
      w.node = parse_u32(t.substr(0, br));
      if (w.node >= nodes.size()) throw MalformedError("fanin must reference an earlier node");
      if (br == std::string_view::npos) {
        w.width = nodes[w.node].width;
      } else {
        auto colon = t.find(':', br);
        if (colon == std::string_view::npos || t.back() != ']') throw MalformedError("bad fanin slice");
        w.offset = parse_u32(t.substr(br + 1, colon - br - 1));
        w.width = parse_u32(t.substr(colon + 1, t.size() - colon - 2));
      }
      g.fanin.push_back(w);
    }
    nodes.push_back(std::move(g));
  }
  if (nodes.empty()) throw MalformedError("circuit without gates");
  Circuit c(std::move(nodes));
  if (c.n() != n || c.m() != m) throw MalformedError("header widths disagree with gates");
  return c;
}

// ---------------------------------------------------------------- bit codec

namespace {

constexpr std::size_t kField = 16;

void put(BitVec& b, std::uint64_t v, std::size_t width = kField) {
  if (width < 64 && v >> width) throw std::invalid_argument("value does not fit the circuit codec");
  b.append_uint(v, width);
}

struct Reader {
  const BitVec& b;
  std::size_t pos = 0;
  std::uint64_t get(std::size_t width = kField) {
    if (pos + width > b.size()) throw MalformedError("truncated encoding");
    auto v = b.slice(pos, width).to_uint();
    pos += width;
    return v;
  }
  BitVec raw(std::size_t width) {
    if (pos + width > b.size()) throw MalformedError("truncated encoding");
    auto v = b.slice(pos, width);
    pos += width;
    return v;
  }
};

}  // namespace

BitVec encode_circuit(const Circuit& c) {
  BitVec b;
  const auto& nodes = c.nodes();
  put(b, nodes.size());
  for (const auto& g : nodes) {
    put(b, static_cast<std::uint64_t>(g.kind), 8);
    put(b, g.width);
    put(b, g.fanin.size(), 8);
    for (const auto& f : g.fanin) {
      put(b, f.node);
      put(b, f.offset);
      put(b, f.width);
    }
    if (g.kind == GateKind::Const) b.append(g.value);
    if (g.kind == GateKind::Oracle || g.kind == GateKind::Host) {
      if (g.tag.size() >= (1U << 20)) throw std::invalid_argument("tag too long for the circuit codec");
      put(b, g.tag.size(), 20);
      for (unsigned char ch : g.tag) put(b, ch, 8);
    }
  }
  return b;
}

Circuit decode_circuit(const BitVec& bits) {
  try {
    Reader r{bits};
    auto count = r.get();
    if (count == 0) throw MalformedError("no gates");
    std::vector<Gate> nodes;
    for (std::uint64_t i = 0; i < count; ++i) {
      Gate g;
      auto kind = r.get(8);
      if (kind > static_cast<std::uint64_t>(GateKind::Host)) throw MalformedError("bad kind");
      g.kind = static_cast<GateKind>(kind);
      g.width = static_cast<std::uint32_t>(r.get());
      auto fan = r.get(8);
      for (std::uint64_t k = 0; k < fan; ++k) {
        Wire w;
        w.node = static_cast<std::uint32_t>(r.get());
        w.offset = static_cast<std::uint32_t>(r.get());
        w.width = static_cast<std::uint32_t>(r.get());
        g.fanin.push_back(w);
      }
      if (g.kind == GateKind::Const) g.value = r.raw(g.width);
      if (g.kind == GateKind::Oracle || g.kind == GateKind::Host) {
        auto len = r.get(20);
        for (std::uint64_t k = 0; k < len; ++k) g.tag.push_back(static_cast<char>(r.get(8)));
      }
      nodes.push_back(std::move(g));
    }
    if (r.pos != bits.size()) throw MalformedError("trailing bits");
    return Circuit(std::move(nodes));
  } catch (const MalformedError&) {
    return identity_circuit(static_cast<std::uint32_t>(1 + bits.size() % 16));
  }
}

}  // namespace tfnp
