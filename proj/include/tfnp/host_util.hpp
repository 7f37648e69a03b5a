#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tfnp {

// Splits "a:b:c"; with expected > 0 the last field keeps any further colons.
std::vector<std::string_view> split_params(std::string_view s, std::size_t expected);
std::size_t param_size(std::string_view s);
std::string slice_id(std::size_t in, std::size_t off, std::size_t len);

}  // namespace tfnp
