#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symgap {

// Subset of the ground set [m] = {0, ..., m-1}, stored as a packed bit-vector.
// Binary operations require both operands to share the same ground size.
class ItemSet {
 public:
  ItemSet() = default;
  explicit ItemSet(std::size_t m) : m_(m), words_((m + 63) / 64, 0) {}

  static ItemSet full(std::size_t m);
  static ItemSet from_items(std::size_t m, std::span<const std::size_t> items);
  static ItemSet from_items(std::size_t m, std::initializer_list<std::size_t> items);
  // Bit j of mask is item j; requires m <= 64.
  static ItemSet from_mask(std::size_t m, std::uint64_t mask);
  // Inverse of to_hex().
  static ItemSet from_hex(std::size_t m, std::string_view hex);

  std::size_t ground_size() const { return m_; }

  bool contains(std::size_t j) const {
    return (words_[j >> 6] >> (j & 63)) & 1ULL;
  }
  void insert(std::size_t j);
  void erase(std::size_t j);
  ItemSet with(std::size_t j) const {
    ItemSet s = *this;
    s.insert(j);
    return s;
  }

  std::size_t count() const;
  bool empty() const;
  std::size_t intersection_count(const ItemSet& other) const;
  bool is_subset_of(const ItemSet& other) const;
  bool disjoint_from(const ItemSet& other) const {
    return intersection_count(other) == 0;
  }

  ItemSet operator&(const ItemSet& other) const;
  ItemSet operator|(const ItemSet& other) const;
  // Set difference.
  ItemSet operator-(const ItemSet& other) const;
  ItemSet complement() const;

  bool operator==(const ItemSet& other) const = default;

  // Members in increasing order.
  std::vector<std::size_t> items() const;
  std::uint64_t to_mask() const;
  // Bit-vector as a big-endian hexadecimal integer of ceil(m/4) digits
  // (item 0 is the least significant bit). Empty string when m == 0.
  std::string to_hex() const;

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  void check_same_ground(const ItemSet& other) const;
  void clear_tail();

  std::size_t m_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace symgap
