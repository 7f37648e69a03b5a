#pragma once

#include "tfnp/problems.hpp"

namespace tfnp {

// Weak-Pigeon^Factor instance T on 6 input bits: two Factor gates on x and on
// x with its top bit flipped, outputs ANDed bitwise.
Instance fig1_instance();

}  // namespace tfnp
