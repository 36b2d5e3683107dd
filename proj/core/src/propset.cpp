#include "lgplan/propset.hpp"

#include <bit>

#include "lgplan/random.hpp"

namespace lgplan {

PropSet::PropSet(size_t universe, std::span<const int> members) : PropSet(universe) {
  for (int p : members) set(p);
}

bool PropSet::is_subset_of(const PropSet& other) const {
  for (size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

size_t PropSet::count() const {
  size_t n = 0;
  for (uint64_t w : words_) n += static_cast<size_t>(std::popcount(w));
  return n;
}

std::vector<int> PropSet::members() const {
  std::vector<int> out;
  for (size_t i = 0; i < words_.size(); ++i) {
    uint64_t w = words_[i];
    while (w) {
      out.push_back(static_cast<int>(i * 64 + static_cast<size_t>(std::countr_zero(w))));
      w &= w - 1;
    }
  }
  return out;
}

uint64_t PropSet::hash() const {
  uint64_t h = mix64(universe_);
  for (uint64_t w : words_) h = hash_combine(h, w);
  return h;
}

}  // namespace lgplan
