#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace lazysynth {

/*
 * class: CellSet
 *
 * Dense bit-per-cell set over the grid of one layer. Two sets may only be
 * combined if they live on the same layer and have the same size; this is
 * asserted by the binary operations.
 */
class CellSet {
public:
  CellSet() = default;
  CellSet(int layer, std::size_t num_cells);

  static CellSet full(int layer, std::size_t num_cells);

  int layer() const { return layer_; }
  std::size_t size() const { return size_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void clear();

  std::size_t count() const;
  bool empty() const;

  CellSet& operator|=(const CellSet& o);
  CellSet& operator&=(const CellSet& o);
  /* set difference */
  CellSet& operator-=(const CellSet& o);

  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  friend CellSet operator-(CellSet a, const CellSet& b) { return a -= b; }

  bool subset_of(const CellSet& o) const;
  bool operator==(const CellSet& o) const;

  std::vector<std::size_t> indices() const;

  /* calls f(index) for each member in increasing order */
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  const std::vector<std::uint64_t>& words() const { return words_; }
  /* replaces the storage; bits past size() must be zero */
  void assign_words(std::vector<std::uint64_t> words);

private:
  void check_compatible(const CellSet& o) const;

  int layer_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace lazysynth
