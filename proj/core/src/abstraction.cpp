#include "lazysynth/abstraction.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <ostream>
#include <thread>

#include "lazysynth/errors.hpp"

namespace lazysynth {

bool ReachTransitionSource::compute(int layer, std::size_t cell, std::size_t input,
                                    std::vector<std::uint32_t>& successors) const {
  const Vector center = stack_.center(layer, cell);
  const Vector half = stack_.half_width(layer);
  ReachBox box;
  try {
    box = reach_box(sys_, center, half, input, stack_.tau(layer), substeps_);
  } catch (const NumericalError& e) {
    throw NumericalError("layer " + std::to_string(layer) + " cell " + std::to_string(cell) +
                         " input " + std::to_string(input) + ": " + e.what());
  }
  const Vector lo = box.lower();
  const Vector hi = box.upper();
  return append_cells_intersecting(stack_, lo, hi, layer, successors);
}

bool ExplicitTransitionSource::compute(int layer, std::size_t cell, std::size_t input,
                                       std::vector<std::uint32_t>& successors) const {
  const Entry& e = entry(layer, cell, input);
  successors.insert(successors.end(), e.successors.begin(), e.successors.end());
  return e.leaves_y;
}

TransitionCache::TransitionCache(const LayerStack& stack, std::size_t num_inputs)
    : stack_(&stack), num_inputs_(num_inputs) {
  if (num_inputs == 0) throw PreconditionError("transition cache needs at least one input");
  tables_.resize(static_cast<std::size_t>(stack.num_layers()));
  for (int l = 1; l <= stack.num_layers(); ++l) {
    LayerTable& t = table(l);
    const std::size_t entries = stack.num_cells(l) * num_inputs;
    t.tag.assign(entries, kUnexplored);
    t.offset.assign(entries, 0);
    t.length.assign(entries, 0);
    explored_.push_back(stack.empty_set(l));
  }
  stats_.layers.resize(static_cast<std::size_t>(stack.num_layers()));
}

std::optional<TransitionView> TransitionCache::view(int l, std::size_t cell,
                                                    std::size_t input) const {
  const LayerTable& t = table(l);
  const std::size_t e = cell * num_inputs_ + input;
  if (t.tag[e] == kUnexplored) return std::nullopt;
  return TransitionView{std::span<const std::uint32_t>(t.pool.data() + t.offset[e], t.length[e]),
                        t.tag[e] == kComputedLeaves};
}

std::optional<SuccessorSet> TransitionCache::successors(const CellId& cell,
                                                        std::size_t input) const {
  const auto v = view(cell.layer, cell.index, input);
  if (!v) return std::nullopt;
  SuccessorSet out{stack_->empty_set(cell.layer), v->leaves_y};
  for (auto s : v->successors) out.cells.set(s);
  return out;
}

namespace {

struct BatchResult {
  std::vector<std::uint32_t> pool;
  std::vector<std::uint32_t> length;
  std::vector<std::uint8_t> leaves;
  std::exception_ptr error;
};

}  // namespace

std::size_t TransitionCache::explore(const TransitionSource& source, const CellSet& cells) {
  const int l = cells.layer();
  if (l < 1 || l > stack_->num_layers() || cells.size() != stack_->num_cells(l)) {
    throw PreconditionError("explore: set does not belong to a layer of this stack");
  }
  if (source.num_inputs() != num_inputs_) {
    throw PreconditionError("explore: source has a different number of inputs");
  }
  const auto start = std::chrono::steady_clock::now();
  LayerTable& t = table(l);

  std::vector<std::size_t> pending;  // entry index = cell * inputs + input
  cells.for_each([&](std::size_t c) {
    for (std::size_t u = 0; u < num_inputs_; ++u) {
      const std::size_t e = c * num_inputs_ + u;
      if (t.tag[e] == kUnexplored) pending.push_back(e);
    }
  });
  if (pending.empty()) return 0;

  unsigned workers = threads_ == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads_;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, (pending.size() + 255) / 256));
  workers = std::max(1u, workers);

  std::vector<BatchResult> results(workers);
  const std::size_t chunk = (pending.size() + workers - 1) / workers;
  auto run = [&](unsigned w) {
    BatchResult& r = results[w];
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(pending.size(), begin + chunk);
    try {
      for (std::size_t p = begin; p < end; ++p) {
        const std::size_t e = pending[p];
        const std::size_t before = r.pool.size();
        const bool leaves = source.compute(l, e / num_inputs_, e % num_inputs_, r.pool);
        r.length.push_back(static_cast<std::uint32_t>(r.pool.size() - before));
        r.leaves.push_back(leaves ? 1 : 0);
      }
    } catch (...) {
      r.error = std::current_exception();
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }

  // merge in worker order, i.e. increasing entry index
  std::size_t added = 0;
  std::exception_ptr first_error;
  for (unsigned w = 0; w < workers && !first_error; ++w) {
    BatchResult& r = results[w];
    const std::size_t begin = w * chunk;
    std::size_t off = 0;
    for (std::size_t j = 0; j < r.length.size(); ++j) {
      const std::size_t e = pending[begin + j];
      t.offset[e] = t.pool.size();
      t.length[e] = r.length[j];
      t.pool.insert(t.pool.end(), r.pool.begin() + static_cast<std::ptrdiff_t>(off),
                    r.pool.begin() + static_cast<std::ptrdiff_t>(off + r.length[j]));
      t.tag[e] = r.leaves[j] ? kComputedLeaves : kComputed;
      explored_[static_cast<std::size_t>(l - 1)].set(e / num_inputs_);
      off += r.length[j];
      ++added;
    }
    first_error = r.error;
  }

  LayerExplorationStats& s = stats_.layers[static_cast<std::size_t>(l - 1)];
  s.computed_pairs += added;
  s.explore_seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (first_error) std::rethrow_exception(first_error);
  return added;
}

void TransitionCache::dump(std::ostream& os) const {
  for (int l = 1; l <= stack_->num_layers(); ++l) {
    const LayerTable& t = table(l);
    for (std::size_t e = 0; e < t.tag.size(); ++e) {
      if (t.tag[e] == kUnexplored) continue;
      os << l << ' ' << e / num_inputs_ << ' ' << e % num_inputs_ << ' ';
      if (t.length[e] == 0) os << '-';
      for (std::uint32_t j = 0; j < t.length[e]; ++j) {
        os << (j ? "," : "") << t.pool[t.offset[e] + j];
      }
      os << ' ' << (t.tag[e] == kComputedLeaves ? 1 : 0) << '\n';
    }
  }
}

}  // namespace lazysynth
