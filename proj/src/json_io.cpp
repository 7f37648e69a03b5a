#include "tfnp/json_io.hpp"

#include <sstream>

#include "tfnp/host_util.hpp"
#include "tfnp/oracle_eval.hpp"

namespace tfnp {

using nlohmann::json;

namespace {

BitVec hex(std::string_view s, std::size_t width) {
  try {
    return BitVec::from_hex(s, width);
  } catch (const std::invalid_argument& e) {
    throw MalformedError(std::string(e.what()) + ": " + std::string(s));
  }
}

Circuit circuit_from_string(const std::string& s) {
  if (s.rfind("tt:", 0) == 0) {
    auto p = split_params(std::string_view(s).substr(3), 3);
    auto in = param_size(p[0]), out = param_size(p[1]);
    if (in > 12) throw MalformedError("truth tables are limited to 12 inputs");
    return table_circuit(static_cast<std::uint32_t>(in), static_cast<std::uint32_t>(out),
                         hex(p[2], (std::size_t{1} << in) * out));
  }
  return from_text(s);
}

BitVec parse_bits(const std::string& s) {
  for (char ch : s)
    if (ch != '0' && ch != '1') throw MalformedError("expected a bit string: " + s);
  return BitVec::from_bits(s);
}

std::string entry(const BitVec& v, bool explicit_width) {
  return explicit_width ? std::to_string(v.size()) + "'" + v.to_hex() : v.to_hex();
}

BitVec parse_entry(const std::string& s, std::size_t default_width) {
  auto tick = s.find('\'');
  if (tick != std::string::npos) return hex(s.substr(tick + 1), param_size(s.substr(0, tick)));
  return hex(s, default_width);
}

// Common width of all oracle gates, or 0 when they differ.
std::size_t uniform_oracle_width(const Instance& inst) {
  std::size_t w = 0;
  for (const auto& c : inst.circuits)
    for (auto x : c.oracle_widths()) {
      if (w && w != x) return 0;
      w = x;
    }
  return w;
}

}  // namespace

json instance_to_json(const Instance& inst) {
  json j;
  j["problem"] = inst.problem;
  j["params"] = {{"n", problem(inst.problem).size_param(inst)}};
  if (inst.circuits.size() == 1) j["circuit"] = to_text(inst.circuits[0]);
  else if (!inst.circuits.empty()) {
    j["circuits"] = json::array();
    for (const auto& c : inst.circuits) j["circuits"].push_back(to_text(c));
  }
  if (!inst.aux.empty()) j["aux"] = inst.aux.to_bits();
  return j;
}

Instance instance_from_json(const json& j) {
  try {
    Instance inst;
    inst.problem = j.at("problem").get<std::string>();
    const auto& p = problem(inst.problem);
    if (j.contains("circuit")) inst.circuits.push_back(circuit_from_string(j["circuit"].get<std::string>()));
    if (j.contains("circuits"))
      for (const auto& c : j["circuits"]) inst.circuits.push_back(circuit_from_string(c.get<std::string>()));
    if (j.contains("aux")) {
      const auto& a = j["aux"];
      if (a.is_number_unsigned()) {
        std::size_t n = j.contains("params") && j["params"].contains("n") ? j["params"]["n"].get<std::size_t>() : 64;
        inst.aux = BitVec::from_uint(a.get<std::uint64_t>(), n);
      } else {
        inst.aux = parse_bits(a.get<std::string>());
      }
    }
    p.validate(inst);
    if (inst.has_oracle_gates()) validate_instance(inst);
    return inst;
  } catch (const json::exception& e) {
    throw MalformedError(std::string("bad instance JSON: ") + e.what());
  }
}

Instance parse_instance(const std::string& text) {
  auto all = parse_instances(text);
  if (all.empty()) throw MalformedError("no instance found");
  return all.front();
}

std::vector<Instance> parse_instances(const std::string& text) {
  std::vector<Instance> out;
  try {
    auto j = json::parse(text);
    if (j.is_array())
      for (const auto& e : j) out.push_back(instance_from_json(e));
    else
      out.push_back(instance_from_json(j));
    return out;
  } catch (const json::parse_error&) {
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(instance_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw MalformedError(std::string("bad instance JSON: ") + e.what());
    }
  }
  return out;
}

json solution_to_json(const Instance& inst, const Solution& sol) {
  bool explicit_width = uniform_oracle_width(inst) == 0;
  json j;
  j["y"] = sol.y.to_hex();
  j["rows"] = json::array();
  for (const auto& row : sol.rows) {
    json r = json::array();
    for (const auto& w : row) r.push_back(entry(w, explicit_width));
    j["rows"].push_back(r);
  }
  return j;
}

Solution solution_from_json(const Instance& inst, const json& j) {
  try {
    Solution sol;
    auto len = problem(inst.problem).solution_length(inst);
    auto y = j.at("y").get<std::string>();
    sol.y = parse_entry(y, len);
    auto w = uniform_oracle_width(inst);
    if (j.contains("rows"))
      for (const auto& r : j["rows"]) {
        WitnessRow row;
        for (const auto& e : r) {
          auto s = e.get<std::string>();
          row.push_back(parse_entry(s, w ? w : s.size() * 4));
        }
        sol.rows.push_back(std::move(row));
      }
    return sol;
  } catch (const json::exception& e) {
    throw MalformedError(std::string("bad solution JSON: ") + e.what());
  }
}

Solution parse_solution(const Instance& inst, const std::string& text) {
  auto t = text;
  while (!t.empty() && (t.back() == '\n' || t.back() == ' ')) t.pop_back();
  if (!t.empty() && t.front() == '{') {
    try {
      return solution_from_json(inst, json::parse(t));
    } catch (const json::parse_error& e) {
      throw MalformedError(std::string("bad solution JSON: ") + e.what());
    }
  }
  if (t.rfind("0x", 0) == 0)
    return Solution{hex(t.substr(2), problem(inst.problem).solution_length(inst)), {}};
  return Solution{parse_bits(t), {}};
}

}  // namespace tfnp
