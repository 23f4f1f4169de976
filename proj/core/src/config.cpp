#include "lazysynth/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "lazysynth/errors.hpp"
#include "lazysynth/systems.hpp"

namespace lazysynth {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_plain(std::string_view t, double& out) {
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
  return r.ec == std::errc() && r.ptr == t.data() + t.size();
}

class Entries {
public:
  void add(std::string key, std::string value, int line) {
    if (values_.count(key)) {
      throw ConfigError(key + ": duplicate key (line " + std::to_string(line) + ")");
    }
    values_[key] = std::move(value);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& raw(const std::string& key) {
    used_.insert(key);
    return values_.at(key);
  }

  std::string text(const std::string& key) { return std::string(trim(raw(key))); }

  Vector numbers(const std::string& key) {
    std::string s = raw(key);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    Vector out;
    std::string tok;
    while (in >> tok) {
      try {
        out.push_back(parse_number(tok));
      } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
      }
    }
    if (out.empty()) throw ConfigError(key + ": expected at least one number");
    return out;
  }

  Vector numbers(const std::string& key, std::size_t n) {
    Vector v = numbers(key);
    if (v.size() != n) {
      throw ConfigError(key + ": expected " + std::to_string(n) + " values, got " +
                        std::to_string(v.size()));
    }
    return v;
  }

  double number(const std::string& key) { return numbers(key, 1)[0]; }

  long long integer(const std::string& key, long long lo, long long hi) {
    const std::string s = text(key);
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw ConfigError(key + ": expected an integer, got '" + s + "'");
    }
    if (v < lo || v > hi) {
      throw ConfigError(key + ": value " + s + " out of range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    return v;
  }

  /* keys of the form prefix.N.suffix, N sorted numerically */
  std::vector<long long> numbered(const std::string& prefix) const {
    std::vector<long long> ids;
    for (const auto& [k, v] : values_) {
      if (k.rfind(prefix, 0) != 0) continue;
      const std::string rest = k.substr(prefix.size());
      const auto dot = rest.find('.');
      long long id = 0;
      const bool ok = dot != std::string::npos && dot > 0 &&
                      std::from_chars(rest.data(), rest.data() + dot, id).ptr == rest.data() + dot;
      if (!ok) throw ConfigError(k + ": expected " + prefix + "<number>.<field>");
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  void check_all_used() const {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) throw ConfigError(k + ": unknown key (or not used by this system)");
    }
  }

private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

SquareMatrix matrix_key(Entries& e, const std::string& key, std::size_t n) {
  return SquareMatrix(n, e.numbers(key, n * n));
}

void builtin_defaults(ProblemConfig& c) {
  if (c.system_name == "dcdc") {
    const SafetyProblem p = dcdc_problem(0.0005, 6);
    c.alpha = p.stack.alpha();
    c.beta = p.stack.beta();
    c.eta1 = {0.0005, 0.0005};
    c.tau1 = 0.0625;
    c.layers = 6;
    c.safe = p.safe;
  } else if (c.system_name == "spiral") {
    const SafetyProblem p = spiral_problem(3);
    c.alpha = p.stack.alpha();
    c.beta = p.stack.beta();
    c.eta1 = {2.0 / 64.0, 2.0 * std::numbers::pi / 64.0};
    c.tau1 = p.stack.tau1();
    c.layers = 3;
    c.safe = p.safe;
  }
}

ControlSystem build_system(Entries& e, const std::string& name) {
  if (name == "dcdc") {
    ControlSystem sys = make_dcdc_system();
    if (e.has("system.disturbance")) sys.disturbance = e.numbers("system.disturbance", 2);
    return sys;
  }
  if (name == "spiral") {
    std::vector<double> inputs = {-0.2, -0.1, 0.0, 0.1, 0.2};
    Vector w = {0.0, 0.0};
    if (e.has("system.inputs")) inputs = e.numbers("system.inputs");
    if (e.has("system.disturbance")) w = e.numbers("system.disturbance", 2);
    return make_spiral_system(inputs, w);
  }
  if (name == "zero") {
    if (!e.has("system.dim")) throw ConfigError("system.dim: required for system 'zero'");
    const auto n = static_cast<std::size_t>(e.integer("system.dim", 1, 16));
    std::size_t m = 1;
    if (e.has("system.inputs")) m = static_cast<std::size_t>(e.integer("system.inputs", 1, 1 << 16));
    return make_zero_system(n, m);
  }
  if (name == "linear") {
    if (!e.has("system.dim")) throw ConfigError("system.dim: required for system 'linear'");
    if (!e.has("system.modes")) throw ConfigError("system.modes: required for system 'linear'");
    const auto n = static_cast<std::size_t>(e.integer("system.dim", 1, 16));
    const auto m = static_cast<std::size_t>(e.integer("system.modes", 1, 1 << 16));
    std::vector<AffineMode> modes;
    std::vector<std::optional<SquareMatrix>> growth(m);
    for (std::size_t k = 1; k <= m; ++k) {
      const std::string base = "system.mode." + std::to_string(k) + ".";
      if (!e.has(base + "a")) throw ConfigError(base + "a: missing");
      AffineMode mode{matrix_key(e, base + "a", n), Vector(n, 0.0)};
      if (e.has(base + "b")) mode.b = e.numbers(base + "b", n);
      if (e.has(base + "growth")) growth[k - 1] = matrix_key(e, base + "growth", n);
      modes.push_back(std::move(mode));
    }
    Vector w(n, 0.0);
    if (e.has("system.disturbance")) w = e.numbers("system.disturbance", n);
    Vector period;
    if (e.has("system.period")) period = e.numbers("system.period", n);
    ControlSystem sys = make_switched_affine(std::move(modes), std::move(w), std::move(period));
    for (std::size_t k = 0; k < m; ++k) {
      if (growth[k]) sys.growth[k] = *growth[k];
    }
    return sys;
  }
  throw ConfigError("system: unknown system '" + name + "' (expected dcdc, spiral, zero or linear)");
}

}  // namespace

double parse_number(std::string_view token) {
  const std::string_view t = trim(token);
  double v = 0.0;
  if (parse_plain(t, v)) return v;
  const auto p = t.find("pi");
  if (p != std::string_view::npos) {
    std::string_view pre = t.substr(0, p), post = t.substr(p + 2);
    double factor = 1.0;
    if (pre == "-") {
      factor = -1.0;
    } else if (!pre.empty() && pre != "+") {
      if (pre.back() != '*' || !parse_plain(pre.substr(0, pre.size() - 1), factor)) {
        throw ConfigError("malformed number '" + std::string(t) + "'");
      }
    }
    double divisor = 1.0;
    if (!post.empty()) {
      if (post.front() != '/' || !parse_plain(post.substr(1), divisor) || divisor == 0.0) {
        throw ConfigError("malformed number '" + std::string(t) + "'");
      }
    }
    return factor * std::numbers::pi / divisor;
  }
  throw ConfigError("malformed number '" + std::string(t) + "'");
}

SafetyProblem ProblemConfig::problem(int layers_override) const {
  std::vector<bool> periodic(system.dim, false);
  for (std::size_t i = 0; i < system.dim; ++i) periodic[i] = system.is_periodic(i);
  SafetyProblem p{system,
                  LayerStack(alpha, beta, eta1, tau1, layers_override > 0 ? layers_override : layers,
                             periodic),
                  safe, substeps};
  p.validate();
  return p;
}

ProblemConfig parse_config(std::string_view text) {
  Entries e;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    e.add(key, std::string(trim(line.substr(eq + 1))), line_no);
  }

  ProblemConfig c;
  if (!e.has("system")) throw ConfigError("system: missing");
  c.system_name = e.text("system");
  c.system = build_system(e, c.system_name);
  builtin_defaults(c);
  const std::size_t n = c.system.dim;

  auto required = [&](const std::string& key) {
    if (!e.has(key) && c.alpha.empty()) {
      throw ConfigError(key + ": required for system '" + c.system_name + "'");
    }
    return e.has(key);
  };
  if (required("grid.alpha")) c.alpha = e.numbers("grid.alpha", n);
  if (required("grid.beta")) c.beta = e.numbers("grid.beta", n);
  if (required("grid.eta1")) c.eta1 = e.numbers("grid.eta1", n);
  if (required("grid.tau1")) c.tau1 = e.number("grid.tau1");
  if (e.has("grid.layers")) c.layers = static_cast<int>(e.integer("grid.layers", 1, 30));

  if (c.safe.box.lower.empty()) c.safe.box = Box{c.alpha, c.beta};
  if (e.has("safe.lower")) c.safe.box.lower = e.numbers("safe.lower", n);
  if (e.has("safe.upper")) c.safe.box.upper = e.numbers("safe.upper", n);

  if (e.has("obstacles")) {
    if (e.text("obstacles") != "none") throw ConfigError("obstacles: only 'none' is accepted");
    c.safe.obstacles.clear();
  }
  const auto ids = e.numbered("obstacle.");
  if (!ids.empty()) c.safe.obstacles.clear();
  for (long long id : ids) {
    const std::string base = "obstacle." + std::to_string(id) + ".";
    if (!e.has(base + "lower") || !e.has(base + "upper")) {
      throw ConfigError(base + "lower/upper: both bounds are required");
    }
    c.safe.obstacles.push_back(Box{e.numbers(base + "lower", n), e.numbers(base + "upper", n)});
  }

  if (e.has("integrator.substeps")) {
    c.substeps = static_cast<int>(e.integer("integrator.substeps", 1, 1000000));
  }
  if (e.has("synthesis.mode")) {
    c.mode = e.text("synthesis.mode");
    if (c.mode != "lazy" && c.mode != "eager" && c.mode.rfind("single:", 0) != 0) {
      throw ConfigError("synthesis.mode: expected lazy, eager or single:<layer>");
    }
  }
  if (e.has("seed")) c.seed = static_cast<std::uint64_t>(e.integer("seed", 0, INT64_MAX));
  if (e.has("threads")) c.threads = static_cast<unsigned>(e.integer("threads", 0, 4096));
  e.check_all_used();

  // grid and safe-set invariants, reported before any computation
  c.problem();
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace lazysynth
