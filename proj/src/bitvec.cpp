#include "tfnp/bitvec.hpp"

#include <stdexcept>

namespace tfnp {

BitVec BitVec::from_uint(std::uint64_t value, std::size_t width) {
  BitVec b(width);
  for (std::size_t i = 0; i < width && i < 64; ++i)
    b.bits_[width - 1 - i] = (value >> i) & 1U;
  return b;
}

BitVec BitVec::from_bits(std::string_view bits) {
  BitVec b(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("bad bit string");
    b.bits_[i] = bits[i] == '1';
  }
  return b;
}

BitVec BitVec::from_hex(std::string_view hex, std::size_t width) {
  BitVec all;
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("bad hex string");
    all.append_uint(static_cast<std::uint64_t>(v), 4);
  }
  for (std::size_t i = 0; i + width < all.size(); ++i)
    if (all[i]) throw std::invalid_argument("hex value wider than declared width");
  return all.resized(width);
}

std::uint64_t BitVec::to_uint() const {
  if (size() > 64) throw std::out_of_range("bit string wider than 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits_) v = (v << 1) | b;
  return v;
}

bool BitVec::is_zero() const {
  for (auto b : bits_)
    if (b) return false;
  return true;
}

BitVec BitVec::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > size()) throw std::out_of_range("slice out of range");
  BitVec r;
  r.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                 bits_.begin() + static_cast<std::ptrdiff_t>(offset + len));
  return r;
}

BitVec BitVec::resized(std::size_t width) const {
  if (width <= size()) return suffix(width);
  BitVec r(width - size());
  r.append(*this);
  return r;
}

BitVec& BitVec::append(const BitVec& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  return *this;
}

BitVec& BitVec::append_uint(std::uint64_t value, std::size_t width) {
  return append(from_uint(value, width));
}

void BitVec::overwrite(std::size_t offset, const BitVec& src) {
  if (offset + src.size() > size()) throw std::out_of_range("overwrite out of range");
  for (std::size_t i = 0; i < src.size(); ++i) bits_[offset + i] = src.bits_[i];
}

BitVec BitVec::operator~() const {
  BitVec r(*this);
  for (auto& b : r.bits_) b ^= 1U;
  return r;
}

#define TFNP_BITWISE(op)                                                    \
  BitVec BitVec::operator op(const BitVec& o) const {                       \
    if (o.size() != size()) throw std::invalid_argument("width mismatch"); \
    BitVec r(*this);                                                        \
    for (std::size_t i = 0; i < size(); ++i) r.bits_[i] op## = o.bits_[i]; \
    return r;                                                               \
  }
TFNP_BITWISE(&)
TFNP_BITWISE(|)
TFNP_BITWISE(^)
#undef TFNP_BITWISE

std::string BitVec::to_bits() const {
  std::string s;
  s.reserve(size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string BitVec::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::size_t pad = (4 - size() % 4) % 4;
  BitVec padded = resized(size() + pad);
  std::string s;
  for (std::size_t i = 0; i < padded.size(); i += 4)
    s.push_back(digits[padded.slice(i, 4).to_uint()]);
  return s;
}

std::size_t BitVec::hash() const {
  std::size_t h = 1469598103934665603ULL ^ size();
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    acc = (acc << 1) | bits_[i];
    if (i % 64 == 63) {
      h = (h ^ acc) * 1099511628211ULL;
      acc = 0;
    }
  }
  return (h ^ acc) * 1099511628211ULL;
}

BitVec concat(std::initializer_list<BitVec> parts) {
  BitVec r;
  for (const auto& p : parts) r.append(p);
  return r;
}

}  // namespace tfnp
