#pragma once

#include <functional>
#include <string>

#include "tfnp/circuit.hpp"
#include "tfnp/host_util.hpp"

namespace tfnp::detail {

class LambdaHost final : public HostFn {
 public:
  LambdaHost(std::size_t in, std::size_t out, std::function<BitVec(const BitVec&)> f)
      : in_(in), out_(out), f_(std::move(f)) {}
  std::size_t in_width() const override { return in_; }
  std::size_t out_width() const override { return out_; }
  BitVec apply(const BitVec& x) const override {
    auto r = f_(x);
    if (r.size() != out_) throw std::logic_error("host function produced the wrong width");
    return r;
  }

 private:
  std::size_t in_, out_;
  std::function<BitVec(const BitVec&)> f_;
};

inline std::string num(std::size_t v) { return std::to_string(v); }

}  // namespace tfnp::detail
