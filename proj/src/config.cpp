#include "fracwell/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fracwell {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"minimize", "extremal", "scaling", "fn",
                                                 "variance", "ergodic",  "gap",     "diagnostics"};
  return names;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "d",       "s",        "s_list",     "theta",       "C0",       "delta0",  "K",
      "n",          "m",       "pad",      "M",          "R",           "seed",     "jobs",    "dist",
      "bins",       "v0",      "method",   "tolerance",  "max_iter",    "multistart", "initial", "armijo",
      "switch",     "memory",  "backend",  "h_list",     "sites",       "window",   "sides",   "alpha",
      "sensitivity", "out",    "overwrite"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(x))
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& x : split_list(v)) out.push_back(to_double(key, x));
  if (out.empty()) throw ConfigError(key, "list is empty");
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& x : split_list(v)) out.push_back(to_int(key, x));
  if (out.empty()) throw ConfigError(key, "list is empty");
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

KernelBackend backend_from_name(const std::string& name) {
  if (name == "automatic") return KernelBackend::automatic;
  if (name == "dense") return KernelBackend::dense;
  if (name == "fft") return KernelBackend::fft;
  throw ConfigError("backend", "expected automatic, dense or fft");
}

}  // namespace

std::map<std::string, std::string> read_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return read_config_text(ss.str());
}

void apply(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "experiment") c.experiment = trim(v);
    else if (key == "d") c.d = to_int(key, v);
    else if (key == "s") c.s = to_double(key, v);
    else if (key == "s_list") c.s_list = to_doubles(key, v);
    else if (key == "theta") c.theta = to_double(key, v);
    else if (key == "C0") c.c0 = to_double(key, v);
    else if (key == "delta0") c.delta0 = to_double(key, v);
    else if (key == "K") c.k = to_double(key, v);
    else if (key == "n") c.n_list = to_ints(key, v);
    else if (key == "m") c.m = to_int(key, v);
    else if (key == "pad") c.pad = to_int(key, v);
    else if (key == "M") c.resamples = to_int(key, v);
    else if (key == "R") c.realizations = to_int(key, v);
    else if (key == "seed") c.seed = to_u64(key, v);
    else if (key == "jobs") c.jobs = to_int(key, v);
    else if (key == "dist") c.dist = trim(v);
    else if (key == "bins") c.bins = to_int(key, v);
    else if (key == "v0") c.v0 = to_double(key, v);
    else if (key == "method") {
      try {
        c.solver.method = solver_method_from_name(trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "tolerance") c.solver.tolerance = to_double(key, v);
    else if (key == "max_iter") c.solver.max_iter = to_int(key, v);
    else if (key == "multistart") c.solver.multistart = to_int(key, v);
    else if (key == "initial") {
      try {
        c.solver.initial = initial_policy_from_name(trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "armijo") c.solver.armijo = to_double(key, v);
    else if (key == "switch") c.solver.switch_residual = to_double(key, v);
    else if (key == "memory") c.solver.memory = to_int(key, v);
    else if (key == "backend") c.backend = trim(v);
    else if (key == "h_list") c.h_list = to_doubles(key, v);
    else if (key == "sites") c.sites = to_int(key, v);
    else if (key == "window") c.window = to_int(key, v);
    else if (key == "sides") c.sides = to_ints(key, v);
    else if (key == "alpha") c.alpha = to_double(key, v);
    else if (key == "sensitivity") c.sensitivity = to_bool(key, v);
    else if (key == "out") c.out = trim(v);
    else if (key == "overwrite") c.overwrite = to_bool(key, v);
    else throw ConfigError(key, "unknown key");
  }
}

void RunConfig::validate() const {
  if (experiment.empty()) throw ConfigError("experiment", "missing");
  if (std::find(experiment_names().begin(), experiment_names().end(), experiment) == experiment_names().end())
    throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
  if (d != 1 && d != 2) throw ConfigError("d", "must be 1 or 2");
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("s", "must lie in (0, 1)");
  for (double x : s_list)
    if (!(x > 0.0 && x < 1.0)) throw ConfigError("s_list", "entries must lie in (0, 1)");
  if (!(theta >= 0.0)) throw ConfigError("theta", "must be non-negative");
  if (!(c0 > 0.0)) throw ConfigError("C0", "must be positive");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw ConfigError("delta0", "must lie in (0, 1)");
  try {
    (void)Potential::build(c0, delta0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("delta0", e.what());
  }
  if (k < 0.0) throw ConfigError("K", "must be non-negative");
  if (n_list.empty()) throw ConfigError("n", "list is empty");
  for (int n : n_list)
    if (n < 2 || n % 2 != 0) throw ConfigError("n", "entries must be even and at least 2");
  if (m < 1) throw ConfigError("m", "must be at least 1");
  if (pad < 0) throw ConfigError("pad", "must be non-negative");
  if (resamples < 2) throw ConfigError("M", "must be at least 2");
  if (realizations < 1) throw ConfigError("R", "must be at least 1");
  if (jobs < 1) throw ConfigError("jobs", "must be at least 1");
  try {
    (void)DisorderDistribution::from_name(dist);
  } catch (const std::exception&) {
    throw ConfigError("dist", "expected uniform or triangular");
  }
  if (bins < 2) throw ConfigError("bins", "must be at least 2");
  if (!(solver.tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  if (solver.max_iter < 1) throw ConfigError("max_iter", "must be at least 1");
  if (solver.multistart < 1) throw ConfigError("multistart", "must be at least 1");
  if (!(solver.armijo > 0.0 && solver.armijo < 0.5)) throw ConfigError("armijo", "must lie in (0, 1/2)");
  if (!(solver.switch_residual > 0.0)) throw ConfigError("switch", "must be positive");
  if (solver.memory < 1) throw ConfigError("memory", "must be at least 1");
  if (solver.initial == InitialPolicy::given) throw ConfigError("initial", "given starts are not available from a config");
  (void)backend_from_name(backend);
  if (h_list.empty()) throw ConfigError("h_list", "list is empty");
  for (double h : h_list)
    if (!(h > 0.0)) throw ConfigError("h_list", "entries must be positive");
  if (sites < 1) throw ConfigError("sites", "must be at least 1");
  if (window < 2 || window % 2 != 0) throw ConfigError("window", "must be even and at least 2");
  for (int x : sides)
    if (x < 2 || x % 2 != 0 || x > window) throw ConfigError("sides", "entries must be even and fit in the window");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "must lie in (0, 1]");
  if (out.empty()) throw ConfigError("out", "must not be empty");
  const DisorderDistribution law = DisorderDistribution::from_name(dist);
  if (k > 0.0 && k < 1.0 + c0 * theta * law.bound()) throw ConfigError("K", "must be at least 1 + C0 theta A");
  if (std::isfinite(v0) && experiment != "minimize") throw ConfigError("v0", "only used by the minimize experiment");
}

ExperimentSetup RunConfig::setup() const {
  ExperimentSetup e;
  e.dim = d;
  e.s = s;
  e.theta = theta;
  e.c0 = c0;
  e.delta0 = delta0;
  e.refine = m;
  e.dist = DisorderDistribution::from_name(dist);
  e.k = k;
  e.solver = solver;
  e.seed = seed;
  e.jobs = jobs;
  e.backend = backend_from_name(backend);
  return e;
}

std::map<std::string, std::string> RunConfig::entries() const {
  return {{"experiment", experiment},
          {"d", std::to_string(d)},
          {"s", format_double(s)},
          {"s_list", join(s_list)},
          {"theta", format_double(theta)},
          {"C0", format_double(c0)},
          {"delta0", format_double(delta0)},
          {"K", format_double(k)},
          {"n", join(n_list)},
          {"m", std::to_string(m)},
          {"pad", std::to_string(pad)},
          {"M", std::to_string(resamples)},
          {"R", std::to_string(realizations)},
          {"seed", std::to_string(seed)},
          {"jobs", std::to_string(jobs)},
          {"dist", dist},
          {"bins", std::to_string(bins)},
          {"v0", std::isfinite(v0) ? format_double(v0) : ""},
          {"method", to_string(solver.method)},
          {"tolerance", format_double(solver.tolerance)},
          {"max_iter", std::to_string(solver.max_iter)},
          {"multistart", std::to_string(solver.multistart)},
          {"initial", to_string(solver.initial)},
          {"armijo", format_double(solver.armijo)},
          {"switch", format_double(solver.switch_residual)},
          {"memory", std::to_string(solver.memory)},
          {"backend", backend},
          {"h_list", join(h_list)},
          {"sites", std::to_string(sites)},
          {"window", std::to_string(window)},
          {"sides", join(sides)},
          {"alpha", format_double(alpha)},
          {"sensitivity", sensitivity ? "true" : "false"},
          {"out", out},
          {"overwrite", overwrite ? "true" : "false"}};
}

RunConfig parse_config(const std::map<std::string, std::string>& file, const std::map<std::string, std::string>& flags) {
  RunConfig c;
  apply(c, file);
  apply(c, flags);
  c.validate();
  return c;
}

std::string output_stem(const RunConfig& c) {
  std::string s_part;
  if (c.experiment == "scaling" && !c.s_list.empty()) {
    for (std::size_t i = 0; i < c.s_list.size(); ++i) s_part += (i ? "-" : "") + format_double(c.s_list[i]);
  } else {
    s_part = format_double(c.s);
  }
  std::string n_part;
  for (std::size_t i = 0; i < c.n_list.size(); ++i) n_part += (i ? "-" : "") + std::to_string(c.n_list[i]);
  return c.experiment + "_" + std::to_string(c.d) + "d_s" + s_part + "_theta" + format_double(c.theta) + "_n" + n_part;
}

SweepRecord run_experiment(const RunConfig& c) {
  c.validate();
  const ExperimentSetup setup = c.setup();
  const auto& e = c.experiment;
  if (e == "minimize") return minimize_sweep(setup, c.n_list, c.v0);
  if (e == "extremal") return extremal_sweep(setup, c.n_list, c.realizations, c.sensitivity);
  if (e == "scaling") {
    if (c.n_list.size() < 3) throw ConfigError("n", "scaling needs at least three sizes");
    return boundary_scaling_sweep(setup, c.s_list.empty() ? std::vector<double>{c.s} : c.s_list, c.n_list,
                                  c.realizations);
  }
  if (e == "fn") {
    if (c.realizations < 2) throw ConfigError("R", "fn needs at least two realizations");
    return fn_sweep(setup, c.n_list, c.realizations, c.resamples, c.pad);
  }
  if (e == "variance") {
    if (c.realizations < 30) throw ConfigError("R", "variance needs at least 30 realizations");
    if (c.realizations < 2 * c.bins) throw ConfigError("bins", "needs at least two realizations per bin");
    return variance_sweep(setup, c.n_list, c.realizations, c.resamples, c.pad, c.bins);
  }
  if (e == "ergodic") {
    if (c.realizations < 2) throw ConfigError("R", "ergodic needs at least two realizations");
    return ergodic_sweep(setup, c.n_list, c.realizations, c.pad);
  }
  if (e == "gap") return uniqueness_gap_sweep(setup, c.n_list, c.realizations);
  DiagnosticsOptions opt;
  opt.n = c.n_list.front();
  opt.realizations = c.realizations;
  opt.sites = c.sites;
  opt.h_list = c.h_list;
  opt.window = c.window;
  opt.sides = c.sides;
  return diagnostics_sweep(setup, opt);
}

}  // namespace fracwell
