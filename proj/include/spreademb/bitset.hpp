#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace spreademb {

// Fixed-width dynamic bitset used for adjacency rows and candidate sets.
// Codegree-style queries reduce to AND + popcount over words.
class Bitset {
 public:
  Bitset() : nbits_(0) {}
  explicit Bitset(int nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  int size() const { return nbits_; }

  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
  void set(int i) { words_[i >> 6] |= 1ULL << (i & 63); }
  void reset(int i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }

  void clear() { std::fill(words_.begin(), words_.end(), 0ULL); }

  void fill() {
    std::fill(words_.begin(), words_.end(), ~0ULL);
    trim();
  }

  int count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  Bitset& operator&=(const Bitset& o) {
    assert(nbits_ == o.nbits_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  Bitset& operator|=(const Bitset& o) {
    assert(nbits_ == o.nbits_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  // this & ~o
  Bitset& subtract(const Bitset& o) {
    assert(nbits_ == o.nbits_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  int and_count(const Bitset& o) const {
    assert(nbits_ == o.nbits_);
    int c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::popcount(words_[i] & o.words_[i]);
    return c;
  }

  int and_count(const Bitset& a, const Bitset& b) const {
    assert(nbits_ == a.nbits_ && nbits_ == b.nbits_);
    int c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::popcount(words_[i] & a.words_[i] & b.words_[i]);
    return c;
  }

  // |this & a & ~b|
  int and_minus_count(const Bitset& a, const Bitset& b) const {
    int c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::popcount(words_[i] & a.words_[i] & ~b.words_[i]);
    return c;
  }

  // |this & ~b|
  int minus_count(const Bitset& b) const {
    int c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::popcount(words_[i] & ~b.words_[i]);
    return c;
  }

  std::vector<int> to_indices() const {
    std::vector<int> out;
    out.reserve(count());
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        int b = std::countr_zero(w);
        out.push_back(static_cast<int>(wi * 64 + b));
        w &= w - 1;
      }
    }
    return out;
  }

  bool operator==(const Bitset& o) const {
    return nbits_ == o.nbits_ && words_ == o.words_;
  }

 private:
  void trim() {
    int rem = nbits_ & 63;
    if (rem && !words_.empty()) words_.back() &= (1ULL << rem) - 1;
  }

  int nbits_;
  std::vector<std::uint64_t> words_;
};

}  // namespace spreademb
