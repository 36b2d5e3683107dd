#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lgplan {

// Fixed-universe bitset over proposition ids; the STRIPS state type.
class PropSet {
 public:
  PropSet() = default;
  explicit PropSet(size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}
  PropSet(size_t universe, std::span<const int> members);

  size_t universe() const { return universe_; }
  bool test(int p) const { return (words_[static_cast<size_t>(p) >> 6] >> (p & 63)) & 1ULL; }
  void set(int p) { words_[static_cast<size_t>(p) >> 6] |= 1ULL << (p & 63); }
  void reset(int p) { words_[static_cast<size_t>(p) >> 6] &= ~(1ULL << (p & 63)); }

  bool contains_all(std::span<const int> props) const {
    for (int p : props) {
      if (!test(p)) return false;
    }
    return true;
  }
  bool is_subset_of(const PropSet& other) const;
  size_t count() const;
  std::vector<int> members() const;
  uint64_t hash() const;

  std::span<const uint64_t> words() const { return words_; }

  friend bool operator==(const PropSet& a, const PropSet& b) {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }

 private:
  size_t universe_ = 0;
  std::vector<uint64_t> words_;
};

struct PropSetHash {
  size_t operator()(const PropSet& s) const { return static_cast<size_t>(s.hash()); }
};

}  // namespace lgplan
