#include "lazysynth/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lazysynth/errors.hpp"

namespace lazysynth {

namespace {

constexpr double kContactTolerance = 1e-10;  // in units of cell width

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

LayerStack::LayerStack(Vector alpha, Vector beta, Vector eta1, double tau1, int num_layers,
                       std::vector<bool> periodic)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), periodic_(std::move(periodic)) {
  const std::size_t n = alpha_.size();
  if (n == 0) throw ConfigError("grid: dimension must be positive");
  if (beta_.size() != n || eta1.size() != n) {
    throw ConfigError("grid: alpha, beta and eta1 must have the same dimension");
  }
  if (!periodic_.empty() && periodic_.size() != n) {
    throw ConfigError("grid: periodic flags have wrong dimension");
  }
  if (num_layers < 1) throw ConfigError("grid: number of layers must be >= 1");
  if (num_layers > 30) throw ConfigError("grid: number of layers must be <= 30");
  if (!(tau1 > 0.0) || !std::isfinite(tau1)) throw ConfigError("grid: tau1 must be positive");

  MultiIndex coarse_counts(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(beta_[i] > alpha_[i])) {
      throw ConfigError("grid: beta must exceed alpha in dimension " + std::to_string(i));
    }
    if (!(eta1[i] > 0.0) || !std::isfinite(eta1[i])) {
      throw ConfigError("grid: eta1 must be positive in dimension " + std::to_string(i));
    }
    const double eta_coarse = std::ldexp(eta1[i], num_layers - 1);
    const double ratio = (beta_[i] - alpha_[i]) / eta_coarse;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * std::max(1.0, ratio)) {
      throw ConfigError("grid: width of Y in dimension " + std::to_string(i) +
                        " is not an integer multiple of the coarsest cell width " +
                        std::to_string(eta_coarse) + " (ratio " + std::to_string(ratio) + ")");
    }
    coarse_counts[i] = static_cast<std::int64_t>(rounded);
  }

  std::size_t total_fine = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total_fine *= static_cast<std::size_t>(coarse_counts[i]) << (num_layers - 1);
  }
  if (total_fine > (std::size_t{1} << 32) - 1) {
    throw ConfigError("grid: finest layer has more than 2^32 cells");
  }

  layers_.resize(static_cast<std::size_t>(num_layers));
  for (int l = 1; l <= num_layers; ++l) {
    LayerGrid& g = layers_[static_cast<std::size_t>(l - 1)];
    g.tau = std::ldexp(tau1, l - 1);
    g.counts.resize(n);
    g.eta.resize(n);
    g.strides.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      g.counts[i] = coarse_counts[i] << (num_layers - l);
      // recomputed from the counts so that the cells tile Y exactly
      g.eta[i] = (beta_[i] - alpha_[i]) / static_cast<double>(g.counts[i]);
    }
    std::size_t stride = 1;
    for (std::size_t i = n; i-- > 0;) {
      g.strides[i] = stride;
      stride *= static_cast<std::size_t>(g.counts[i]);
    }
    g.num_cells = stride;
  }
}

std::size_t LayerStack::index_of(int l, std::span<const std::int64_t> k) const {
  const LayerGrid& g = layer(l);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < k.size(); ++i) idx += static_cast<std::size_t>(k[i]) * g.strides[i];
  return idx;
}

MultiIndex LayerStack::multi_index(int l, std::size_t index) const {
  const LayerGrid& g = layer(l);
  MultiIndex k(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    k[i] = static_cast<std::int64_t>(index / g.strides[i]);
    index %= g.strides[i];
  }
  return k;
}

Vector LayerStack::center(int l, std::size_t index) const {
  const LayerGrid& g = layer(l);
  const MultiIndex k = multi_index(l, index);
  Vector c(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    c[i] = alpha_[i] + (static_cast<double>(k[i]) + 0.5) * g.eta[i];
  }
  return c;
}

Vector LayerStack::half_width(int l) const {
  Vector h = layer(l).eta;
  for (double& v : h) v *= 0.5;
  return h;
}

double LayerStack::cell_volume(int l) const {
  double v = 1.0;
  for (double e : layer(l).eta) v *= e;
  return v;
}

std::optional<CellId> cell_of(const LayerStack& stack, std::span<const double> x, int l) {
  if (l < 1 || l > stack.num_layers() || x.size() != stack.dim()) return std::nullopt;
  const LayerGrid& fine = stack.layer(1);
  const LayerGrid& g = stack.layer(l);
  const int shift = l - 1;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < stack.dim(); ++i) {
    const double a = stack.alpha()[i];
    const double b = stack.beta()[i];
    double v = x[i];
    if (!std::isfinite(v)) return std::nullopt;
    if (stack.periodic(i)) {
      v = a + std::fmod(v - a, b - a);
      if (v < a) v += b - a;
    } else if (v < a || v >= b) {
      return std::nullopt;
    }
    auto k = static_cast<std::int64_t>(std::floor((v - a) / fine.eta[i]));
    if (k >= fine.counts[i]) k = stack.periodic(i) ? 0 : fine.counts[i] - 1;
    if (k < 0) k = 0;
    idx += static_cast<std::size_t>(k >> shift) * g.strides[i];
  }
  return CellId{l, idx};
}

bool append_cells_intersecting(const LayerStack& stack, std::span<const double> lower,
                               std::span<const double> upper, int l,
                               std::vector<std::uint32_t>& out) {
  const std::size_t n = stack.dim();
  const LayerGrid& g = stack.layer(l);
  bool escapes = false;
  bool empty = false;

  // per-dimension sorted index lists
  std::vector<std::vector<std::int64_t>> ranges(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = stack.alpha()[i];
    const double eta = g.eta[i];
    const double lo = (lower[i] - a) / eta;
    const double hi = (upper[i] - a) / eta;
    auto klo = static_cast<std::int64_t>(std::ceil(lo - 1.0 + kContactTolerance));
    auto khi = static_cast<std::int64_t>(std::floor(hi - kContactTolerance));
    if (klo > khi) khi = klo;  // degenerate box lying on a face
    const std::int64_t count = g.counts[i];
    auto& r = ranges[i];
    if (stack.periodic(i)) {
      if (khi - klo + 1 >= count) {
        for (std::int64_t k = 0; k < count; ++k) r.push_back(k);
      } else {
        for (std::int64_t k = klo; k <= khi; ++k) r.push_back(floor_mod(k, count));
        std::sort(r.begin(), r.end());
      }
    } else {
      if (lo < -kContactTolerance || hi > static_cast<double>(count) + kContactTolerance) {
        escapes = true;
      }
      klo = std::max<std::int64_t>(klo, 0);
      khi = std::min<std::int64_t>(khi, count - 1);
      for (std::int64_t k = klo; k <= khi; ++k) r.push_back(k);
    }
    if (r.empty()) empty = true;
  }
  if (empty) return escapes;

  // odometer over the product of the per-dimension lists, row-major order
  std::vector<std::size_t> pos(n, 0);
  while (true) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) idx += static_cast<std::size_t>(ranges[i][pos[i]]) * g.strides[i];
    out.push_back(static_cast<std::uint32_t>(idx));
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (++pos[d] < ranges[d].size()) break;
      pos[d] = 0;
      if (d == 0) return escapes;
    }
  }
}

Intersection cells_intersecting(const LayerStack& stack, std::span<const double> lower,
                                std::span<const double> upper, int l) {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw PreconditionError("cells_intersecting: lower > upper");
  }
  std::vector<std::uint32_t> idx;
  Intersection res{stack.empty_set(l), false};
  res.escapes = append_cells_intersecting(stack, lower, upper, l, idx);
  for (auto i : idx) res.cells.set(i);
  return res;
}

namespace {

std::uint64_t read_bits(const std::vector<std::uint64_t>& words, std::size_t pos, unsigned len) {
  const std::size_t w = pos >> 6;
  const unsigned b = pos & 63;
  std::uint64_t v = words[w] >> b;
  if (b != 0 && b + len > 64) v |= words[w + 1] << (64 - b);
  return len == 64 ? v : v & ((std::uint64_t{1} << len) - 1);
}

/* ORs the low `len` bits of v into position pos; v must be masked */
void or_bits(std::vector<std::uint64_t>& words, std::size_t pos, unsigned len, std::uint64_t v) {
  const std::size_t w = pos >> 6;
  const unsigned b = pos & 63;
  words[w] |= v << b;
  if (b != 0 && b + len > 64) words[w + 1] |= v >> (64 - b);
}

/* bit i of the result = bit 2i of x */
std::uint64_t compress_even(std::uint64_t x) {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0FULL;
  x = (x | (x >> 4)) & 0x00FF00FF00FF00FFULL;
  x = (x | (x >> 8)) & 0x0000FFFF0000FFFFULL;
  x = (x | (x >> 16)) & 0x00000000FFFFFFFFULL;
  return x;
}

/* bits 2i and 2i+1 of the result = bit i of x (x < 2^32) */
std::uint64_t spread_double(std::uint64_t x) {
  x = (x | (x << 16)) & 0x0000FFFF0000FFFFULL;
  x = (x | (x << 8)) & 0x00FF00FF00FF00FFULL;
  x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0FULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x | (x << 1);
}

/* Row-major rows: all dimensions but the last are fixed. Calls
 * f(row_number, row_multi_index) for every row of a layer. */
template <typename F>
void for_each_row(const LayerGrid& g, F&& f) {
  const std::size_t n = g.counts.size();
  std::vector<std::int64_t> k(n - 1, 0);
  const std::size_t rows = g.num_cells / static_cast<std::size_t>(g.counts[n - 1]);
  for (std::size_t r = 0; r < rows; ++r) {
    f(r, k);
    for (std::size_t d = n - 1; d-- > 0;) {
      if (++k[d] < g.counts[d]) break;
      k[d] = 0;
    }
  }
}

std::size_t row_number(const LayerGrid& g, const std::vector<std::int64_t>& k) {
  const std::size_t row_len = static_cast<std::size_t>(g.counts.back());
  std::size_t idx = 0;
  for (std::size_t d = 0; d < k.size(); ++d) idx += static_cast<std::size_t>(k[d]) * g.strides[d];
  return idx / row_len;
}

}  // namespace

CellSet refine_one(const LayerStack& stack, const CellSet& s) {
  const int l = s.layer();
  if (l < 2 || l > stack.num_layers()) throw PreconditionError("refine_one: no finer layer");
  const LayerGrid& coarse = stack.layer(l);
  const LayerGrid& fine = stack.layer(l - 1);
  CellSet out = stack.empty_set(l - 1);
  std::vector<std::uint64_t> words((out.size() + 63) / 64, 0);
  const std::size_t rc = static_cast<std::size_t>(coarse.counts.back());
  const std::size_t rf = 2 * rc;
  std::vector<std::int64_t> kc;
  for_each_row(fine, [&](std::size_t frow, const std::vector<std::int64_t>& kf) {
    kc.resize(kf.size());
    for (std::size_t d = 0; d < kf.size(); ++d) kc[d] = kf[d] >> 1;
    const std::size_t crow = row_number(coarse, kc);
    for (std::size_t j = 0; j < rc; j += 32) {
      const auto len = static_cast<unsigned>(std::min<std::size_t>(32, rc - j));
      const std::uint64_t v = read_bits(s.words(), crow * rc + j, len);
      if (v) or_bits(words, frow * rf + 2 * j, 2 * len, spread_double(v));
    }
  });
  out.assign_words(std::move(words));
  return out;
}

CellSet coarsen_one(const LayerStack& stack, const CellSet& s) {
  const int l = s.layer();
  if (l < 1 || l >= stack.num_layers()) throw PreconditionError("coarsen_one: no coarser layer");
  const LayerGrid& fine = stack.layer(l);
  const LayerGrid& coarse = stack.layer(l + 1);
  const std::size_t n = stack.dim();
  CellSet out = stack.empty_set(l + 1);
  std::vector<std::uint64_t> words((out.size() + 63) / 64, 0);
  const std::size_t rf = static_cast<std::size_t>(fine.counts.back());
  const std::size_t rc = rf / 2;
  const std::size_t sub_rows = std::size_t{1} << (n - 1);
  std::vector<std::size_t> frows(sub_rows);
  std::vector<std::int64_t> kf(n - 1);
  for_each_row(coarse, [&](std::size_t crow, const std::vector<std::int64_t>& kc) {
    for (std::size_t m = 0; m < sub_rows; ++m) {
      for (std::size_t d = 0; d + 1 < n; ++d) kf[d] = 2 * kc[d] + static_cast<std::int64_t>((m >> d) & 1);
      frows[m] = row_number(fine, kf);
    }
    for (std::size_t j = 0; j < rf; j += 64) {
      const auto len = static_cast<unsigned>(std::min<std::size_t>(64, rf - j));
      std::uint64_t acc = ~std::uint64_t{0};
      for (std::size_t m = 0; m < sub_rows && acc; ++m) acc &= read_bits(s.words(), frows[m] * rf + j, len);
      if (len < 64) acc &= (std::uint64_t{1} << len) - 1;
      const std::uint64_t pairs = compress_even(acc & (acc >> 1));
      if (pairs) or_bits(words, crow * rc + j / 2, len / 2, pairs);
    }
  });
  out.assign_words(std::move(words));
  return out;
}

CellSet gamma(const LayerStack& stack, const CellSet& s, int target_layer) {
  const int source = s.layer();
  if (source < 1 || source > stack.num_layers() || target_layer < 1 ||
      target_layer > stack.num_layers()) {
    throw PreconditionError("gamma: layer out of range");
  }
  if (s.size() != stack.num_cells(source)) throw PreconditionError("gamma: set size mismatch");
  CellSet cur = s;
  for (int l = source; l > target_layer; --l) cur = refine_one(stack, cur);
  for (int l = source; l < target_layer; ++l) cur = coarsen_one(stack, cur);
  return cur;
}

}  // namespace lazysynth
