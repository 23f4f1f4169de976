#include "lazysynth/controller_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lazysynth/errors.hpp"

namespace lazysynth {

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kMagic = "lazysynth-controller";

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_numbers(std::ostream& os, const char* key, const Vector& v) {
  os << key;
  for (double x : v) os << ' ' << shortest(x);
  os << '\n';
}

class LineReader {
public:
  explicit LineReader(std::istream& is) : is_(is) {}

  std::istringstream next(const std::string& key) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) break;
    }
    if (!is_ && line.empty()) fail("unexpected end of file, expected '" + key + "'");
    std::istringstream in(line);
    if (key.empty()) return in;
    std::string k;
    in >> k;
    if (k != key) fail("expected '" + key + "', got '" + k + "'");
    return in;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("controller file line " + std::to_string(line_no_) + ": " + msg);
  }

private:
  std::istream& is_;
  int line_no_ = 0;
};

double read_double(LineReader& r, std::istringstream& in) {
  std::string tok;
  if (!(in >> tok)) r.fail("missing number");
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) r.fail("bad number '" + tok + "'");
  return v;
}

template <typename Int>
Int read_int(LineReader& r, std::istringstream& in) {
  std::string tok;
  if (!(in >> tok)) r.fail("missing integer");
  Int v{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) r.fail("bad integer '" + tok + "'");
  return v;
}

void expect_end(LineReader& r, std::istringstream& in) {
  std::string extra;
  if (in >> extra) r.fail("trailing data '" + extra + "'");
}

Vector read_vector(LineReader& r, const char* key, std::size_t n) {
  auto in = r.next(key);
  Vector v(n);
  for (auto& x : v) x = read_double(r, in);
  expect_end(r, in);
  return v;
}

}  // namespace

GridFingerprint GridFingerprint::of(const LayerStack& stack) {
  GridFingerprint f;
  f.dim = stack.dim();
  f.layers = stack.num_layers();
  f.alpha = stack.alpha();
  f.beta = stack.beta();
  f.eta1 = stack.eta1();
  f.tau1 = stack.tau1();
  f.periodic.resize(f.dim);
  for (std::size_t i = 0; i < f.dim; ++i) f.periodic[i] = stack.periodic(i);
  return f;
}

LayerStack GridFingerprint::make_stack() const {
  return LayerStack(alpha, beta, eta1, tau1, layers, periodic);
}

std::string GridFingerprint::describe() const {
  std::ostringstream os;
  auto vec = [&](const Vector& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << shortest(v[i]);
    os << ']';
  };
  os << "n=" << dim << " L=" << layers << " alpha=";
  vec(alpha);
  os << " beta=";
  vec(beta);
  os << " eta1=";
  vec(eta1);
  os << " tau1=" << shortest(tau1);
  return os.str();
}

void write_controller(std::ostream& os, const LayerStack& stack, const MultiController& ctrl) {
  if (ctrl.num_layers() != stack.num_layers()) {
    throw PreconditionError("write_controller: controller and grid have different layer counts");
  }
  const GridFingerprint f = GridFingerprint::of(stack);
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << "dim " << f.dim << '\n';
  os << "layers " << f.layers << '\n';
  write_numbers(os, "alpha", f.alpha);
  write_numbers(os, "beta", f.beta);
  write_numbers(os, "eta1", f.eta1);
  os << "tau1 " << shortest(f.tau1) << '\n';
  os << "periodic";
  for (bool p : f.periodic) os << ' ' << (p ? 1 : 0);
  os << '\n';
  os << "cells " << ctrl.total_cells() << '\n';
  for (int l = 1; l <= ctrl.num_layers(); ++l) {
    ctrl.domain(l).for_each([&](std::size_t c) {
      os << l << ' ' << c << ' ' << *ctrl.input(l, c) << '\n';
    });
  }
  os << "end\n";
}

void save_controller(const std::string& path, const LayerStack& stack, const MultiController& ctrl) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write controller file '" + path + "'");
  write_controller(out, stack, ctrl);
  if (!out) throw ConfigError("error while writing controller file '" + path + "'");
}

StoredController read_controller(std::istream& is) {
  LineReader r(is);
  {
    auto in = r.next(kMagic);
    const int version = read_int<int>(r, in);
    if (version != kFormatVersion) r.fail("unsupported format version " + std::to_string(version));
  }
  GridFingerprint f;
  {
    auto in = r.next("dim");
    f.dim = read_int<std::size_t>(r, in);
    if (f.dim == 0 || f.dim > 64) r.fail("bad dimension");
  }
  {
    auto in = r.next("layers");
    f.layers = read_int<int>(r, in);
  }
  f.alpha = read_vector(r, "alpha", f.dim);
  f.beta = read_vector(r, "beta", f.dim);
  f.eta1 = read_vector(r, "eta1", f.dim);
  {
    auto in = r.next("tau1");
    f.tau1 = read_double(r, in);
  }
  {
    auto in = r.next("periodic");
    f.periodic.resize(f.dim);
    for (std::size_t i = 0; i < f.dim; ++i) {
      const int p = read_int<int>(r, in);
      if (p != 0 && p != 1) r.fail("periodic flags must be 0 or 1");
      f.periodic[i] = p == 1;
    }
  }
  StoredController out{f, f.make_stack(), {}};
  if (!(GridFingerprint::of(out.stack) == f)) r.fail("grid parameters do not reproduce exactly");
  out.controller = MultiController(out.stack);

  std::size_t cells = 0;
  {
    auto in = r.next("cells");
    cells = read_int<std::size_t>(r, in);
  }
  for (std::size_t j = 0; j < cells; ++j) {
    auto in = r.next("");
    const int l = read_int<int>(r, in);
    const auto c = read_int<std::size_t>(r, in);
    const auto u = read_int<std::size_t>(r, in);
    expect_end(r, in);
    if (l < 1 || l > f.layers) r.fail("layer out of range");
    if (c >= out.stack.num_cells(l)) r.fail("cell index out of range");
    if (u > static_cast<std::size_t>(INT32_MAX)) r.fail("input index out of range");
    if (out.controller.input(l, c)) r.fail("duplicate cell");
    out.controller.assign(l, c, u);
  }
  r.next("end");
  return out;
}

StoredController load_controller(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open controller file '" + path + "'");
  return read_controller(in);
}

void write_domain_csv(std::ostream& os, const LayerStack& stack, const MultiController& ctrl) {
  os << "layer,index";
  for (std::size_t i = 0; i < stack.dim(); ++i) os << ",x" << i;
  os << ",input\n";
  for (int l = 1; l <= ctrl.num_layers(); ++l) {
    ctrl.domain(l).for_each([&](std::size_t c) {
      os << l << ',' << c;
      for (double x : stack.center(l, c)) os << ',' << shortest(x);
      os << ',' << *ctrl.input(l, c) << '\n';
    });
  }
}

}  // namespace lazysynth
