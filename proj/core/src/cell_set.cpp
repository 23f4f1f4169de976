#include "lazysynth/cell_set.hpp"

#include <stdexcept>

namespace lazysynth {

CellSet::CellSet(int layer, std::size_t num_cells)
    : layer_(layer), size_(num_cells), words_((num_cells + 63) / 64, 0) {}

CellSet CellSet::full(int layer, std::size_t num_cells) {
  CellSet s(layer, num_cells);
  for (auto& w : s.words_) w = ~std::uint64_t{0};
  if (const std::size_t tail = num_cells & 63; tail != 0) {
    s.words_.back() = (std::uint64_t{1} << tail) - 1;
  }
  return s;
}

void CellSet::assign_words(std::vector<std::uint64_t> words) {
  if (words.size() != words_.size()) throw std::invalid_argument("CellSet: word count mismatch");
  words_ = std::move(words);
}

void CellSet::clear() {
  for (auto& w : words_) w = 0;
}

std::size_t CellSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool CellSet::empty() const {
  for (auto w : words_) {
    if (w) return false;
  }
  return true;
}

void CellSet::check_compatible(const CellSet& o) const {
  if (layer_ != o.layer_ || size_ != o.size_) {
    throw std::invalid_argument("CellSet: operands live on different layers");
  }
}

CellSet& CellSet::operator|=(const CellSet& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

CellSet& CellSet::operator&=(const CellSet& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

CellSet& CellSet::operator-=(const CellSet& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
  return *this;
}

bool CellSet::subset_of(const CellSet& o) const {
  check_compatible(o);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~o.words_[i]) return false;
  }
  return true;
}

bool CellSet::operator==(const CellSet& o) const {
  return layer_ == o.layer_ && size_ == o.size_ && words_ == o.words_;
}

std::vector<std::size_t> CellSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t i) { out.push_back(i); });
  return out;
}

}  // namespace lazysynth
