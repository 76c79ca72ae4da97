#include "symgap/item_set.hpp"

#include <algorithm>

#include "symgap/error.hpp"

namespace symgap {

ItemSet ItemSet::full(std::size_t m) {
  ItemSet s(m);
  std::fill(s.words_.begin(), s.words_.end(), ~0ULL);
  s.clear_tail();
  return s;
}

ItemSet ItemSet::from_items(std::size_t m, std::span<const std::size_t> items) {
  ItemSet s(m);
  for (std::size_t j : items) s.insert(j);
  return s;
}

ItemSet ItemSet::from_items(std::size_t m, std::initializer_list<std::size_t> items) {
  return from_items(m, std::span<const std::size_t>(items.begin(), items.size()));
}

ItemSet ItemSet::from_mask(std::size_t m, std::uint64_t mask) {
  if (m > 64) throw UsageError("ItemSet::from_mask requires m <= 64");
  ItemSet s(m);
  if (m > 0) s.words_[0] = mask;
  s.clear_tail();
  if (m < 64 && (mask >> m) != 0) throw UsageError("mask has bits outside [m]");
  return s;
}

ItemSet ItemSet::from_hex(std::size_t m, std::string_view hex) {
  if (hex.size() != (m + 3) / 4) throw UsageError("hex length does not match ground size");
  ItemSet s(m);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    char c = hex[hex.size() - 1 - d];
    std::uint64_t nibble;
    if (c >= '0' && c <= '9') nibble = static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') nibble = static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') nibble = static_cast<std::uint64_t>(c - 'A' + 10);
    else throw UsageError("invalid hex digit in ItemSet encoding");
    std::size_t bit = 4 * d;
    s.words_[bit >> 6] |= nibble << (bit & 63);
  }
  std::vector<std::uint64_t> before = s.words_;
  s.clear_tail();
  if (before != s.words_) throw UsageError("hex encoding has bits outside [m]");
  return s;
}

void ItemSet::insert(std::size_t j) {
  if (j >= m_) throw UsageError("item index out of range");
  words_[j >> 6] |= 1ULL << (j & 63);
}

void ItemSet::erase(std::size_t j) {
  if (j >= m_) throw UsageError("item index out of range");
  words_[j >> 6] &= ~(1ULL << (j & 63));
}

std::size_t ItemSet::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool ItemSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t ItemSet::intersection_count(const ItemSet& other) const {
  check_same_ground(other);
  std::size_t c = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
  }
  return c;
}

bool ItemSet::is_subset_of(const ItemSet& other) const {
  check_same_ground(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

ItemSet ItemSet::operator&(const ItemSet& other) const {
  check_same_ground(other);
  ItemSet r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= other.words_[i];
  return r;
}

ItemSet ItemSet::operator|(const ItemSet& other) const {
  check_same_ground(other);
  ItemSet r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= other.words_[i];
  return r;
}

ItemSet ItemSet::operator-(const ItemSet& other) const {
  check_same_ground(other);
  ItemSet r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~other.words_[i];
  return r;
}

ItemSet ItemSet::complement() const {
  ItemSet r = *this;
  for (auto& w : r.words_) w = ~w;
  r.clear_tail();
  return r;
}

std::vector<std::size_t> ItemSet::items() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w) {
      out.push_back(64 * i + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

std::uint64_t ItemSet::to_mask() const {
  if (m_ > 64) throw UsageError("ItemSet::to_mask requires m <= 64");
  return words_.empty() ? 0 : words_[0];
}

std::string ItemSet::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::size_t digits = (m_ + 3) / 4;
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    std::size_t bit = 4 * d;
    auto nibble = static_cast<std::size_t>((words_[bit >> 6] >> (bit & 63)) & 0xF);
    out[digits - 1 - d] = kDigits[nibble];
  }
  return out;
}

void ItemSet::check_same_ground(const ItemSet& other) const {
  if (m_ != other.m_) throw UsageError("ItemSet ground sizes differ");
}

void ItemSet::clear_tail() {
  if (m_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (1ULL << (m_ % 64)) - 1;
  }
}

}  // namespace symgap
