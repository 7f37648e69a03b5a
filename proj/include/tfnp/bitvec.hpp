#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tfnp {

// Fixed-width bit string. Index 0 is the leftmost (most significant) bit, so
// lexicographic order on equal widths coincides with unsigned integer order.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t width, bool value = false) : bits_(width, value ? 1 : 0) {}

  static BitVec from_uint(std::uint64_t value, std::size_t width);
  static BitVec from_bits(std::string_view bits);  // "0101"
  static BitVec from_hex(std::string_view hex, std::size_t width);
  static BitVec ones(std::size_t width) { return BitVec(width, true); }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

  // Requires size() <= 64.
  std::uint64_t to_uint() const;
  bool is_zero() const;

  BitVec slice(std::size_t offset, std::size_t len) const;
  BitVec prefix(std::size_t len) const { return slice(0, len); }
  BitVec suffix(std::size_t len) const { return slice(size() - len, len); }
  // Keeps the low `width` bits, or left-pads with zeros.
  BitVec resized(std::size_t width) const;

  BitVec& append(const BitVec& other);
  BitVec& append_uint(std::uint64_t value, std::size_t width);
  void overwrite(std::size_t offset, const BitVec& src);

  BitVec operator~() const;
  BitVec operator&(const BitVec& o) const;
  BitVec operator|(const BitVec& o) const;
  BitVec operator^(const BitVec& o) const;

  std::string to_bits() const;
  std::string to_hex() const;

  friend bool operator==(const BitVec&, const BitVec&) = default;
  friend std::strong_ordering operator<=>(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.bits_ <=> b.bits_;
  }

  std::size_t hash() const;

 private:
  std::vector<std::uint8_t> bits_;
};

BitVec concat(std::initializer_list<BitVec> parts);

}  // namespace tfnp

template <>
struct std::hash<tfnp::BitVec> {
  std::size_t operator()(const tfnp::BitVec& b) const { return b.hash(); }
};
