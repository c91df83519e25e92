#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gevrey_flow/diagnostics.hpp"
#include "gevrey_flow/dynamics.hpp"
#include "gevrey_flow/model.hpp"
#include "gevrey_flow/stochastic.hpp"

namespace gevrey_flow {

using json = nlohmann::ordered_json;

/// Finite doubles as numbers; inf/nan as strings (JSON has no literal for them).
inline json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json to_json(const ZetaResult& z) {
  json j;
  j["value"] = json_number(z.value);
  j["bracket"] = {json_number(z.bracket.lower), json_number(z.bracket.upper)};
  j["search_radius"] = z.search_radius;
  j["tolerance_met"] = z.tolerance_met;
  if (z.minimizer) {
    j["minimizer"] = {z.minimizer->k1, z.minimizer->k2};
  } else {
    j["minimizer"] = nullptr;
  }
  return j;
}

inline json to_json(const AdmissibilityReport& rep) {
  json arr = json::array();
  for (const auto& c : rep.conditions) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return arr;
}

/// Keys: zeta, zeta_bracket, lambda, k0, omega_prob, conditions, plus detail.
inline json to_json(const DerivedParams& p, const ModelConfig& cfg) {
  json j;
  j["zeta"] = json_number(p.zeta.value);
  j["zeta_bracket"] = {json_number(p.zeta.bracket.lower), json_number(p.zeta.bracket.upper)};
  j["zeta_search_radius"] = p.zeta.search_radius;
  j["zeta_tolerance_met"] = p.zeta.tolerance_met;
  j["zeta_sign_convention"] =
      "kernel term enters with a minus sign: zeta = inf_k (nu^2/2 - beta|k|^-s - "
      "mass Re(g(k)|k|^-2s k.Mk)); the opposite-sign value is reported alongside";
  if (p.zeta_opposite_sign) j["zeta_opposite_sign"] = to_json(*p.zeta_opposite_sign);
  if (p.lambda_k0) {
    j["lambda"] = p.lambda_k0->lambda;
    j["k0"] = p.lambda_k0->k0;
    j["lambda_search_radius"] = p.lambda_k0->search_radius;
  } else {
    j["lambda"] = nullptr;
    j["k0"] = nullptr;
    j["lambda_error"] = p.lambda_error;
  }
  j["omega_prob"] = p.omega_prob ? json(*p.omega_prob) : json(nullptr);
  j["conditions"] = to_json(p.admissibility);
  j["admissible"] = p.admissibility.all_passed();
  json w = json::array();
  for (const auto& s : cfg.warnings()) w.push_back(s);
  j["warnings"] = w;
  j["matrix_norm"] = cfg.matrix.operator_norm();
  j["matrix_antisymmetric"] = cfg.matrix.is_antisymmetric();
  j["matrix_symmetric"] = cfg.matrix.is_symmetric();
  j["kernel_bound_constant"] = cfg.kernel.bound_constant();
  return j;
}

inline json to_json(const OmegaMcResult& r) {
  return {{"estimate", r.estimate},     {"se", r.standard_error},
          {"n", r.n_paths},             {"dt", r.dt},
          {"horizon", r.horizon},       {"seed", r.seed},
          {"discrete_estimate", r.discrete_estimate},
          {"tail_bound", r.tail_bound}, {"horizon_extensions", r.horizon_extensions}};
}

inline json to_json(const DecayFit& f) {
  return {{"rate", f.rate},       {"se", f.standard_error}, {"ci", {f.ci_lower, f.ci_upper}},
          {"window", {f.t_lo, f.t_hi}}, {"samples", f.samples}};
}

inline json to_json(const InequalityCheck& c) {
  return {{"name", c.name},
          {"checks", c.checks},
          {"violations", c.violations},
          {"max_violation", json_number(c.max_violation)},
          {"empirical_constant", json_number(c.empirical_constant)},
          {"stated_constant", json_number(c.stated_constant)},
          {"passed", c.passed()}};
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header `t,W,<norm names>`, one row per snapshot.
inline void write_series_csv(const std::string& path, const SimulationResult& res) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "t,W";
  for (const auto& s : res.norms) out << ',' << s.name;
  out << '\n';
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    out << format_double(res.snapshots[i].t) << ',' << format_double(res.snapshots[i].w);
    for (const auto& s : res.norms) out << ',' << (i < s.values.size() ? format_double(s.values[i]) : "");
    out << '\n';
  }
}

namespace detail {

template <class T>
void put_le(std::ofstream& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

}  // namespace detail

/// Little-endian records, one per stored snapshot:
/// uint32 d, uint32 K, float64 t, float64 W, then (re, im) float64 pairs in
/// row-major mode order.
inline void write_field_dump(const std::string& path, const std::vector<SimState>& snapshots,
                             std::size_t stride = 1) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < snapshots.size(); i += stride) {
    const SimState& st = snapshots[i];
    const Lattice& lat = st.rho.lattice();
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(lat.dim()));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(lat.cutoff()));
    detail::put_le<double>(out, st.t);
    detail::put_le<double>(out, st.w);
    for (std::size_t k = 0; k < st.rho.size(); ++k) {
      detail::put_le<double>(out, st.rho[k].real());
      detail::put_le<double>(out, st.rho[k].imag());
    }
  }
}

struct DumpRecord {
  int d = 0;
  int K = 0;
  double t = 0.0;
  double w = 0.0;
  std::vector<cplx> coeffs;
};

inline std::vector<DumpRecord> read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  const auto get = [&](auto& v) {
    unsigned char bytes[sizeof(v)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(v));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(v));
    std::memcpy(&v, bytes, sizeof(v));
    return static_cast<bool>(in);
  };
  std::vector<DumpRecord> out;
  for (;;) {
    std::uint32_t d = 0, K = 0;
    if (!get(d)) break;
    if (!get(K)) throw std::runtime_error("truncated field dump");
    DumpRecord r;
    r.d = static_cast<int>(d);
    r.K = static_cast<int>(K);
    const Lattice lat(r.d, r.K);
    if (!get(r.t) || !get(r.w)) throw std::runtime_error("truncated field dump");
    r.coeffs.resize(lat.size());
    for (auto& c : r.coeffs) {
      double re = 0.0, im = 0.0;
      if (!get(re) || !get(im)) throw std::runtime_error("truncated field dump");
      c = {re, im};
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace gevrey_flow
