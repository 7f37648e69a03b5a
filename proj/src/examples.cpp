#include "tfnp/examples.hpp"

namespace tfnp {

Instance fig1_instance() {
  CircuitBuilder b(6);
  auto x = b.input();
  auto left = b.oracle("factor", 5, {x});
  auto top = b.gate(GateKind::Not, 1, {CircuitBuilder::slice(x, 0, 1)});
  auto right = b.oracle("factor", 5, {top, CircuitBuilder::slice(x, 1, 5)});
  Instance inst;
  inst.problem = "weak_pigeon";
  inst.circuits.push_back(b.finish(b.gate(GateKind::And, 5, {left, right})));
  return inst;
}

}  // namespace tfnp
