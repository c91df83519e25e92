#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevrey_flow/dynamics.hpp"
#include "gevrey_flow/model.hpp"
#include "gevrey_flow/norms.hpp"

namespace gevrey_flow {

/// Bad or unknown configuration entry; key() names it.
class config_error : public std::runtime_error {
 public:
  config_error(std::string key, const std::string& what)
      : std::runtime_error("config error [" + key + "]: " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct InitialDataSpec {
  enum class Kind { zero, cosine, random_analytic };
  Kind kind = Kind::random_analytic;
  double amplitude = 1.0;
  std::optional<double> norm;  // rescale to this value of the first norm schedule
  double decay = 1.0;
  std::uint64_t seed = 7;
  Mode mode{1, 0};
};

struct StochasticSpec {
  std::uint64_t seed = 1;
  std::size_t n_paths = 20000;
  double mc_dt = 1e-3;
  double horizon = 1.0;
  bool brownian = true;  // false: W = 0
  std::optional<double> path_dt;  // default: integrator dt
  bool require_omega = false;
  std::size_t max_rejections = 100000;
  std::size_t n_runs = 1;
};

struct CheckSpec {
  double zeta_tol = 1e-9;
  double smallness_constant = 1.0;
  double sigma = 0.9;
  Summability r = Summability::finite(1.0);
  std::optional<double> fit_t_lo;
  std::optional<double> fit_t_hi;
  double decay_tolerance = 0.05;
  std::size_t n_fields = 1000;
  std::size_t n_bilinear_samples = 1000;
  double picard_T = 0.1;
  int picard_iters = 8;
  double picard_quad_dt = 1e-5;
  std::vector<double> picard_dts{1e-4, 2e-4, 4e-4, 8e-4};
  double picard_tolerance = 1e-6;
  double rescale_m = 4.0;
  double integrator_tolerance = 1e-6;
  int oracle_K = 16;
  std::size_t oracle_fields = 100;
  std::vector<double> oracle_taus{-0.5, 0.0, 0.5};
};

struct OutputSpec {
  std::string csv = "series.csv";
  std::string json;  // default: <subcommand>.json
  std::string field_dump;
  std::size_t field_dump_stride = 1;
};

/// Every input of a CLI run.
struct RunConfig {
  ModelConfig model;
  Lattice lattice{1, 32};
  IntegratorConfig integrator;
  double T = 1.0;
  std::vector<NormSchedule> norms;
  InitialDataSpec init;
  StochasticSpec stochastic;
  CheckSpec checks;
  OutputSpec outputs;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw config_error(key, "expected a number, got '" + v + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw config_error(key, "expected an integer, got '" + v + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw config_error(key, "expected an unsigned integer, got '" + v + "'");
  }
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < 0) throw config_error(key, "must be >= 0");
  return static_cast<std::size_t>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error(key, "expected true/false, got '" + v + "'");
}

inline Summability parse_summability(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return Summability::infinity();
  try {
    return Summability::finite(parse_double(key, v));
  } catch (const std::invalid_argument& e) {
    throw config_error(key, e.what());
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
  return out;
}

// rule:kappa:r with rule one of phi, phi+eps, or a number (constant radius).
inline NormSchedule parse_schedule(const std::string& key, const std::string& item) {
  const auto parts = split(item, ':');
  if (parts.size() != 3) throw config_error(key, "schedule '" + item + "' must be rule:kappa:r");
  NormSchedule s;
  if (parts[0] == "phi") {
    s.rule = NormSchedule::Radius::phi;
  } else if (parts[0] == "phi+eps") {
    s.rule = NormSchedule::Radius::phi_plus_epsilon;
  } else {
    s.rule = NormSchedule::Radius::constant;
    s.a = parse_double(key, parts[0]);
    if (!(s.a >= 0.0)) throw config_error(key, "constant radius must be >= 0");
  }
  s.kappa = parse_double(key, parts[1]);
  s.r = parse_summability(key, parts[2]);
  return s;
}

}  // namespace detail

/// Parses the flat `key = value` format ('#' starts a comment). Unknown and
/// repeated keys are rejected; the resulting configuration is validated.
inline RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(lineno), "expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("line " + std::to_string(lineno), "empty key");
    if (!kv.emplace(key, value).second) throw config_error(key, "duplicate key");
  }

  RunConfig rc;
  const auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    if (v.empty()) throw config_error(key, "empty value");
    return v;
  };
  using namespace detail;

  // model
  ModelConfig& m = rc.model;
  if (auto v = take("d")) m.d = static_cast<int>(parse_int("d", *v));
  int K = 32;
  if (auto v = take("K")) K = static_cast<int>(parse_int("K", *v));
  if (auto v = take("s")) m.s = parse_double("s", *v);
  if (auto v = take("nu")) m.nu = parse_double("nu", *v);
  if (auto v = take("alpha")) m.alpha = parse_double("alpha", *v);
  if (auto v = take("beta")) m.beta = parse_double("beta", *v);
  if (auto v = take("epsilon")) m.epsilon = parse_double("epsilon", *v);
  if (auto v = take("mass")) m.mass = parse_double("mass", *v);
  try {
    rc.lattice = Lattice(m.d, K);
  } catch (const std::invalid_argument& e) {
    throw config_error(m.d == 1 || m.d == 2 ? "K" : "d", e.what());
  }
  if (auto v = take("matrix")) {
    try {
      m.matrix = InteractionMatrix(m.d, parse_list("matrix", *v));
    } catch (const std::invalid_argument& e) {
      throw config_error("matrix", e.what());
    }
  } else {
    m.matrix = InteractionMatrix::scalar(m.d, -1.0);
  }
  double gamma = 2.0;
  if (auto v = take("gamma")) gamma = parse_double("gamma", *v);
  double kernel_amplitude = 1.0;
  if (auto v = take("kernel_amplitude")) kernel_amplitude = parse_double("kernel_amplitude", *v);
  std::string kernel = "power_law";
  if (auto v = take("kernel")) kernel = *v;
  const auto table_text = take("kernel_table");
  try {
    if (kernel == "power_law") {
      if (table_text) throw config_error("kernel_table", "only valid with kernel = tabulated");
      m.kernel = InteractionKernel::power_law(gamma, kernel_amplitude);
    } else if (kernel == "tabulated") {
      if (!table_text) throw config_error("kernel_table", "required for kernel = tabulated");
      std::map<Mode, cplx> table;
      for (const auto& entry : split(*table_text, ';')) {
        if (entry.empty()) continue;
        std::istringstream es(entry);
        std::vector<double> nums;
        for (std::string tok; es >> tok;) nums.push_back(parse_double("kernel_table", tok));
        const std::size_t want = m.d == 1 ? 3 : 4;
        if (nums.size() != want) {
          throw config_error("kernel_table", "entry '" + entry + "' needs " + std::to_string(want) +
                                                 " numbers (mode components, re, im)");
        }
        const Mode k = m.d == 1 ? Mode{static_cast<int>(nums[0]), 0}
                                : Mode{static_cast<int>(nums[0]), static_cast<int>(nums[1])};
        table[k] = cplx{nums[want - 2], nums[want - 1]};
      }
      m.kernel = InteractionKernel::tabulated(gamma, std::move(table));
    } else {
      throw config_error("kernel", "expected power_law or tabulated, got '" + kernel + "'");
    }
  } catch (const config_error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw config_error(kernel == "tabulated" ? "kernel_table" : "gamma", e.what());
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const char* key : {"nu", "alpha", "beta", "epsilon", "mass"}) {
      if (msg.find(std::string(key) + " must") != std::string::npos) throw config_error(key, msg);
    }
    throw config_error(msg.find("s must") != std::string::npos ? "s" : "d", msg);
  }

  // integrator
  IntegratorConfig& ic = rc.integrator;
  if (auto v = take("dt")) ic.dt = parse_double("dt", *v);
  if (auto v = take("scheme")) {
    if (*v == "exp_euler") {
      ic.scheme = Scheme::exp_euler;
    } else if (*v == "exp_heun") {
      ic.scheme = Scheme::exp_heun;
    } else {
      throw config_error("scheme", "expected exp_euler or exp_heun, got '" + *v + "'");
    }
  }
  if (auto v = take("dealias")) ic.dealias = parse_bool("dealias", *v);
  if (auto v = take("overflow_cap")) ic.overflow_cap = parse_double("overflow_cap", *v);
  if (auto v = take("blowup_factor")) ic.blowup_factor = parse_double("blowup_factor", *v);
  if (auto v = take("snapshot_stride")) ic.snapshot_stride = parse_count("snapshot_stride", *v);
  if (auto v = take("enforce_zero_mode")) ic.enforce_zero_mode = parse_bool("enforce_zero_mode", *v);
  if (auto v = take("T")) rc.T = parse_double("T", *v);
  if (!(ic.dt > 0.0)) throw config_error("dt", "must be > 0");
  if (!(ic.overflow_cap > 0.0)) throw config_error("overflow_cap", "must be > 0");
  if (!(ic.blowup_factor > 1.0)) throw config_error("blowup_factor", "must be > 1");
  if (ic.snapshot_stride == 0) throw config_error("snapshot_stride", "must be >= 1");
  if (!(rc.T > 0.0)) throw config_error("T", "must be > 0");

  // norms
  if (auto v = take("norms")) {
    for (const auto& item : split(*v, ',')) rc.norms.push_back(parse_schedule("norms", item));
  } else {
    rc.norms.push_back(parse_schedule("norms", "phi+eps:0:1"));
  }

  // initial data
  InitialDataSpec& id = rc.init;
  if (auto v = take("init")) {
    if (*v == "zero") {
      id.kind = InitialDataSpec::Kind::zero;
    } else if (*v == "cosine") {
      id.kind = InitialDataSpec::Kind::cosine;
    } else if (*v == "random_analytic") {
      id.kind = InitialDataSpec::Kind::random_analytic;
    } else {
      throw config_error("init", "expected zero, cosine or random_analytic, got '" + *v + "'");
    }
  }
  if (auto v = take("init_amplitude")) id.amplitude = parse_double("init_amplitude", *v);
  if (auto v = take("init_norm")) {
    id.norm = parse_double("init_norm", *v);
    if (!(*id.norm > 0.0)) throw config_error("init_norm", "must be > 0");
  }
  if (auto v = take("init_decay")) id.decay = parse_double("init_decay", *v);
  if (!(id.decay >= 0.0)) throw config_error("init_decay", "must be >= 0");
  if (auto v = take("init_seed")) id.seed = parse_u64("init_seed", *v);
  if (auto v = take("init_mode")) {
    const auto c = parse_list("init_mode", *v);
    if (c.size() != static_cast<std::size_t>(m.d)) throw config_error("init_mode", "needs d components");
    id.mode = {static_cast<int>(c[0]), m.d == 2 ? static_cast<int>(c[1]) : 0};
    if (id.mode.is_zero() || !rc.lattice.contains(id.mode)) {
      throw config_error("init_mode", "must be a nonzero lattice mode");
    }
  }

  // stochastic
  StochasticSpec& st = rc.stochastic;
  if (auto v = take("seed")) st.seed = parse_u64("seed", *v);
  if (auto v = take("n_paths")) st.n_paths = parse_count("n_paths", *v);
  if (auto v = take("mc_dt")) st.mc_dt = parse_double("mc_dt", *v);
  if (auto v = take("horizon")) st.horizon = parse_double("horizon", *v);
  if (auto v = take("path")) {
    if (*v == "brownian") {
      st.brownian = true;
    } else if (*v == "zero") {
      st.brownian = false;
    } else {
      throw config_error("path", "expected brownian or zero, got '" + *v + "'");
    }
  }
  if (auto v = take("path_dt")) st.path_dt = parse_double("path_dt", *v);
  if (auto v = take("require_omega")) st.require_omega = parse_bool("require_omega", *v);
  if (auto v = take("max_rejections")) st.max_rejections = parse_count("max_rejections", *v);
  if (auto v = take("n_runs")) st.n_runs = parse_count("n_runs", *v);
  if (st.n_paths < 2) throw config_error("n_paths", "must be >= 2");
  if (!(st.mc_dt > 0.0)) throw config_error("mc_dt", "must be > 0");
  if (!(st.horizon > 0.0)) throw config_error("horizon", "must be > 0");
  if (st.path_dt && !(*st.path_dt > 0.0)) throw config_error("path_dt", "must be > 0");
  if (st.n_runs == 0) throw config_error("n_runs", "must be >= 1");

  // checks
  CheckSpec& ck = rc.checks;
  if (auto v = take("zeta_tol")) ck.zeta_tol = parse_double("zeta_tol", *v);
  if (auto v = take("smallness_constant")) ck.smallness_constant = parse_double("smallness_constant", *v);
  if (auto v = take("sigma")) ck.sigma = parse_double("sigma", *v);
  if (auto v = take("r")) ck.r = parse_summability("r", *v);
  if (auto v = take("fit_t_lo")) ck.fit_t_lo = parse_double("fit_t_lo", *v);
  if (auto v = take("fit_t_hi")) ck.fit_t_hi = parse_double("fit_t_hi", *v);
  if (auto v = take("decay_tolerance")) ck.decay_tolerance = parse_double("decay_tolerance", *v);
  if (auto v = take("n_fields")) ck.n_fields = parse_count("n_fields", *v);
  if (auto v = take("n_bilinear_samples")) ck.n_bilinear_samples = parse_count("n_bilinear_samples", *v);
  if (auto v = take("picard_T")) ck.picard_T = parse_double("picard_T", *v);
  if (auto v = take("picard_iters")) ck.picard_iters = static_cast<int>(parse_int("picard_iters", *v));
  if (auto v = take("picard_quad_dt")) ck.picard_quad_dt = parse_double("picard_quad_dt", *v);
  if (auto v = take("picard_dts")) ck.picard_dts = parse_list("picard_dts", *v);
  if (auto v = take("picard_tolerance")) ck.picard_tolerance = parse_double("picard_tolerance", *v);
  if (auto v = take("rescale_m")) ck.rescale_m = parse_double("rescale_m", *v);
  if (auto v = take("integrator_tolerance")) {
    ck.integrator_tolerance = parse_double("integrator_tolerance", *v);
  }
  if (auto v = take("oracle_K")) ck.oracle_K = static_cast<int>(parse_int("oracle_K", *v));
  if (auto v = take("oracle_fields")) ck.oracle_fields = parse_count("oracle_fields", *v);
  if (auto v = take("oracle_taus")) ck.oracle_taus = parse_list("oracle_taus", *v);
  if (!(ck.zeta_tol > 0.0)) throw config_error("zeta_tol", "must be > 0");
  if (!(ck.smallness_constant > 0.0)) throw config_error("smallness_constant", "must be > 0");
  if (!(ck.decay_tolerance >= 0.0)) throw config_error("decay_tolerance", "must be >= 0");
  if (!(ck.picard_T > 0.0)) throw config_error("picard_T", "must be > 0");
  if (ck.picard_iters < 1) throw config_error("picard_iters", "must be >= 1");
  if (!(ck.picard_quad_dt > 0.0)) throw config_error("picard_quad_dt", "must be > 0");
  if (ck.picard_dts.size() < 2) throw config_error("picard_dts", "needs at least two step sizes");
  if (!(ck.rescale_m > 0.0)) throw config_error("rescale_m", "must be > 0");
  if (ck.oracle_K < 1) throw config_error("oracle_K", "must be >= 1");

  // outputs
  OutputSpec& out = rc.outputs;
  if (auto v = take("csv")) out.csv = *v;
  if (auto v = take("json")) out.json = *v;
  if (auto v = take("field_dump")) out.field_dump = *v;
  if (auto v = take("field_dump_stride")) out.field_dump_stride = parse_count("field_dump_stride", *v);
  if (out.field_dump_stride == 0) throw config_error("field_dump_stride", "must be >= 1");

  if (!kv.empty()) throw config_error(kv.begin()->first, "unknown key");
  return rc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("--config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace gevrey_flow
