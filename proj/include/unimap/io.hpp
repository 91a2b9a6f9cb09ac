#pragma once

// Persistence: waveform CSV, JSON inputs (states, matrices, subspace specs,
// configs) and report/CSV emitters. Every file write goes through
// atomic_write.

#include "unimap/cesium.hpp"
#include "unimap/eigen_synthesis.hpp"
#include "unimap/error_correction.hpp"
#include "unimap/qudit_gates.hpp"
#include "unimap/subspace.hpp"
#include "unimap/wigner.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace unimap {

using json = nlohmann::json;

/// Shortest-safe round-trip text for a double (17 significant digits).
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temp file, then renames over the destination.
inline void atomic_write(const std::filesystem::path &path, const std::string &content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path() && !path.parent_path().empty())
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out)
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------- waveform CSV

inline std::string waveform_to_csv(const Waveform &w) {
  const std::size_t k = w.empty() ? 0 : w.segments.front().amplitudes.size();
  std::string out = "segment,duration_s";
  for (std::size_t c = 1; c <= k; ++c)
    out += ",u" + std::to_string(c);
  out += '\n';
  for (std::size_t s = 0; s < w.size(); ++s) {
    const auto &seg = w.segments[s];
    out += std::to_string(s) + ',' + format_double(seg.duration);
    for (Eigen::Index c = 0; c < seg.amplitudes.size(); ++c)
      out += ',' + format_double(seg.amplitudes(c));
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_number(const std::string &text, const std::string &where) {
  if (text.empty())
    throw ValidationError(where + ": empty field");
  char *end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(v))
    throw ValidationError(where + ": not a finite number '" + text + "'");
  return v;
}

} // namespace detail

/// Rows are numbered from 1 with the header as row 1.
inline Waveform parse_waveform_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line == "\r")
    throw ValidationError("waveform csv row 1: missing header");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "segment" || header[1] != "duration_s")
    throw ValidationError(
        "waveform csv row 1: header must be segment,duration_s,u1,...,uK");
  for (std::size_t c = 2; c < header.size(); ++c)
    if (header[c] != "u" + std::to_string(c - 1))
      throw ValidationError("waveform csv row 1: column " + std::to_string(c + 1) +
                            " must be named u" + std::to_string(c - 1));
  const std::size_t k = header.size() - 2;

  Waveform w;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r")
      continue;
    const std::string where = "waveform csv row " + std::to_string(row);
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != k + 2)
      throw ValidationError(where + ": expected " + std::to_string(k + 2) +
                            " fields, got " + std::to_string(fields.size()));
    const double idx = detail::parse_number(fields[0], where);
    if (idx != static_cast<double>(w.size()))
      throw ValidationError(where + ": segment index " + fields[0] + ", expected " +
                            std::to_string(w.size()));
    Segment seg;
    seg.duration = detail::parse_number(fields[1], where);
    if (!(seg.duration > 0.0))
      throw ValidationError(where + ": duration must be > 0");
    seg.amplitudes.resize(static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c)
      seg.amplitudes(static_cast<Eigen::Index>(c)) =
          detail::parse_number(fields[c + 2], where);
    w.segments.push_back(std::move(seg));
  }
  if (w.empty())
    throw ValidationError("waveform csv row 2: no segments");
  return w;
}

inline void persist_waveform(const std::filesystem::path &path, const Waveform &w) {
  atomic_write(path, waveform_to_csv(w));
}

inline Waveform load_waveform(const std::filesystem::path &path) {
  return parse_waveform_csv(read_file(path));
}

// ---------------------------------------------------------------- JSON inputs

namespace detail {

inline const json &require(const json &j, const std::string &key, const std::string &ctx) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError("missing field '" + ctx + key + "'");
  return j.at(key);
}

inline void reject_unknown(const json &j, std::initializer_list<const char *> known,
                           const std::string &ctx) {
  if (!j.is_object())
    throw ValidationError("'" + (ctx.empty() ? std::string("<root>") : ctx) +
                          "' must be an object");
  std::set<std::string> k(known.begin(), known.end());
  for (const auto &item : j.items())
    if (!k.count(item.key()))
      throw ValidationError("unknown field '" + ctx + item.key() + "'");
}

inline double as_number(const json &j, const std::string &field) {
  if (!j.is_number())
    throw ValidationError("field '" + field + "' must be a number");
  return j.get<double>();
}

inline long long as_integer(const json &j, const std::string &field) {
  if (!j.is_number_integer())
    throw ValidationError("field '" + field + "' must be an integer");
  return j.get<long long>();
}

inline bool as_bool(const json &j, const std::string &field) {
  if (!j.is_boolean())
    throw ValidationError("field '" + field + "' must be a boolean");
  return j.get<bool>();
}

inline cplx as_complex(const json &j, const std::string &field) {
  if (j.is_number())
    return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("field '" + field + "' must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace detail

/// A vector is an array of [re, im] pairs, or {"ket": k} (needs `dim`).
inline CVector vector_from_json(const json &j, const std::string &field,
                                Eigen::Index dim = 0) {
  if (j.is_object()) {
    detail::reject_unknown(j, {"ket", "dim"}, field + ".");
    Eigen::Index d = dim;
    if (j.contains("dim"))
      d = detail::as_integer(j["dim"], field + ".dim");
    if (d < 2)
      throw ValidationError("field '" + field + "': ket shorthand needs dim >= 2");
    const long long k = detail::as_integer(detail::require(j, "ket", field + "."),
                                           field + ".ket");
    if (k < 0 || k >= d)
      throw ValidationError("field '" + field + ".ket' out of range");
    CVector v = CVector::Zero(d);
    v(static_cast<Eigen::Index>(k)) = 1.0;
    return v;
  }
  if (!j.is_array() || j.empty())
    throw ValidationError("field '" + field + "' must be a non-empty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        detail::as_complex(j[i], field + "[" + std::to_string(i) + "]");
  if (dim > 0 && v.size() != dim)
    throw ValidationError("field '" + field + "' has length " +
                          std::to_string(v.size()) + ", expected " +
                          std::to_string(dim));
  return v;
}

inline StateVector state_from_json(const json &j, const std::string &field,
                                   Eigen::Index dim = 0, bool normalize = false) {
  CVector v = vector_from_json(j, field, dim);
  try {
    return normalize ? StateVector::normalized(std::move(v)) : StateVector(std::move(v));
  } catch (const ValidationError &e) {
    throw ValidationError("field '" + field + "': " + e.what());
  }
}

/// State file: {"amplitudes": <vector>, "normalize": bool}.
inline StateVector state_file_from_json(const json &j, Eigen::Index dim = 0) {
  detail::reject_unknown(j, {"amplitudes", "normalize"}, "");
  const bool norm = j.contains("normalize") && detail::as_bool(j["normalize"], "normalize");
  return state_from_json(detail::require(j, "amplitudes", ""), "amplitudes", dim, norm);
}

/// Matrix file: {"matrix": [[<complex>, ...], ...]} (row-major).
inline UnitaryMatrix unitary_from_json(const json &j) {
  detail::reject_unknown(j, {"matrix", "name"}, "");
  const json &m = detail::require(j, "matrix", "");
  if (!m.is_array() || m.empty())
    throw ValidationError("field 'matrix' must be a non-empty array of rows");
  const auto d = static_cast<Eigen::Index>(m.size());
  CMatrix out(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const std::string row = "matrix[" + std::to_string(r) + "]";
    const json &jr = m[static_cast<std::size_t>(r)];
    if (!jr.is_array() || static_cast<Eigen::Index>(jr.size()) != d)
      throw ValidationError("field '" + row + "' must have " + std::to_string(d) +
                            " entries");
    for (Eigen::Index c = 0; c < d; ++c)
      out(r, c) = detail::as_complex(jr[static_cast<std::size_t>(c)],
                                     row + "[" + std::to_string(c) + "]");
  }
  try {
    return UnitaryMatrix(std::move(out));
  } catch (const ValidationError &e) {
    throw ValidationError(std::string("field 'matrix': ") + e.what());
  }
}

/// Subspace spec file:
/// {"dim": d, "phase_correction": bool,
///  "pairs": [{"name": str, "source": <vector>, "target": <vector>}, ...]}
struct NamedSubspaceSpec {
  SubspaceMapSpec spec;
  std::vector<std::string> names;
};

inline NamedSubspaceSpec subspace_spec_from_json(const json &j) {
  detail::reject_unknown(j, {"dim", "phase_correction", "pairs"}, "");
  const long long d = detail::as_integer(detail::require(j, "dim", ""), "dim");
  if (d < 2)
    throw ValidationError("field 'dim' must be >= 2");
  NamedSubspaceSpec out;
  if (j.contains("phase_correction"))
    out.spec.phase_correction = detail::as_bool(j["phase_correction"], "phase_correction");
  const json &pairs = detail::require(j, "pairs", "");
  if (!pairs.is_array() || pairs.empty())
    throw ValidationError("field 'pairs' must be a non-empty array");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string ctx = "pairs[" + std::to_string(i) + "]";
    detail::reject_unknown(pairs[i], {"name", "source", "target"}, ctx + ".");
    std::string name = "pair" + std::to_string(i);
    if (pairs[i].contains("name")) {
      if (!pairs[i]["name"].is_string())
        throw ValidationError("field '" + ctx + ".name' must be a string");
      name = pairs[i]["name"].get<std::string>();
    }
    out.names.push_back(name);
    out.spec.source.push_back(
        state_from_json(detail::require(pairs[i], "source", ctx + "."), ctx + ".source", d));
    out.spec.target.push_back(
        state_from_json(detail::require(pairs[i], "target", ctx + "."), ctx + ".target", d));
  }
  out.spec.validate();
  return out;
}

/// Overrides SearchConfig fields present in `j`; unknown keys are rejected.
inline void apply_search_config(const json &j, SearchConfig &cfg) {
  detail::reject_unknown(j,
                         {"segment_count", "segment_duration", "step_size",
                          "fidelity_goal", "max_iterations", "seed", "restarts",
                          "line_search", "zero_seed"},
                         "search.");
  auto count = [&](const char *key) {
    const long long v = detail::as_integer(j[key], std::string("search.") + key);
    if (v < 0)
      throw ValidationError(std::string("field 'search.") + key + "' must be >= 0");
    return v;
  };
  if (j.contains("segment_count"))
    cfg.segment_count = static_cast<std::size_t>(count("segment_count"));
  if (j.contains("segment_duration"))
    cfg.segment_duration = detail::as_number(j["segment_duration"], "search.segment_duration");
  if (j.contains("step_size"))
    cfg.step_size = detail::as_number(j["step_size"], "search.step_size");
  if (j.contains("fidelity_goal"))
    cfg.fidelity_goal = detail::as_number(j["fidelity_goal"], "search.fidelity_goal");
  if (j.contains("max_iterations"))
    cfg.max_iterations = static_cast<int>(count("max_iterations"));
  if (j.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(count("seed"));
  if (j.contains("restarts"))
    cfg.restarts = static_cast<int>(count("restarts"));
  if (j.contains("line_search"))
    cfg.line_search = detail::as_bool(j["line_search"], "search.line_search");
  if (j.contains("zero_seed"))
    cfg.zero_seed = detail::as_bool(j["zero_seed"], "search.zero_seed");
}

inline void apply_cesium_params(const json &j, CesiumParams &p) {
  detail::reject_unknown(j,
                         {"rf_rabi_max", "uw_rabi_max", "lightshift_max",
                          "rf_detuning", "segment_duration"},
                         "params.");
  auto num = [&](const char *key, double &dst) {
    if (j.contains(key))
      dst = detail::as_number(j[key], std::string("params.") + key);
  };
  num("rf_rabi_max", p.rf_rabi_max);
  num("uw_rabi_max", p.uw_rabi_max);
  num("lightshift_max", p.lightshift_max);
  num("rf_detuning", p.rf_detuning);
  num("segment_duration", p.segment_duration);
  p.validate();
}

inline json cesium_params_to_json(const CesiumParams &p) {
  return {{"rf_rabi_max", p.rf_rabi_max},
          {"uw_rabi_max", p.uw_rabi_max},
          {"lightshift_max", p.lightshift_max},
          {"rf_detuning", p.rf_detuning},
          {"segment_duration", p.segment_duration}};
}

// ---------------------------------------------------------------- reports

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json vector_to_json(const CVector &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(complex_to_json(v(i)));
  return out;
}

inline json matrix_to_json(const CMatrix &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json search_config_to_json(const SearchConfig &c) {
  return {{"segment_count", c.segment_count}, {"segment_duration", c.segment_duration},
          {"step_size", c.step_size},         {"fidelity_goal", c.fidelity_goal},
          {"max_iterations", c.max_iterations}, {"seed", c.seed},
          {"restarts", c.restarts},           {"line_search", c.line_search},
          {"zero_seed", c.zero_seed}};
}

inline json search_result_to_json(const SearchResult &r, const std::string &waveform_file) {
  return {{"fidelity", r.fidelity},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"seed", r.seed},
          {"segments", r.waveform.size()},
          {"total_duration_s", r.waveform.total_duration()},
          {"waveform_file", waveform_file}};
}

/// `waveform_files[j]` is the CSV of step j, empty when the step has none.
inline json synthesis_report_to_json(const SynthesisReport &r, const std::string &name,
                                     const std::vector<std::string> &waveform_files) {
  json steps = json::array();
  for (std::size_t j = 0; j < r.step_fidelities.size(); ++j) {
    json s = {{"index", j},
              {"fidelity", r.step_fidelities[j]},
              {"converged", j < r.step_converged.size() ? bool(r.step_converged[j]) : true},
              {"skipped", std::find(r.skipped.begin(), r.skipped.end(), j) != r.skipped.end()}};
    if (j < r.step_phases.size())
      s["phase"] = r.step_phases[j];
    s["waveform_file"] = (j < waveform_files.size() && !waveform_files[j].empty())
                             ? json(waveform_files[j])
                             : json(nullptr);
    steps.push_back(std::move(s));
  }
  return {{"target", name},
          {"dimension", r.target.dim()},
          {"fidelity", r.fidelity},
          {"searches", r.searches},
          {"all_converged", r.all_converged()},
          {"total_waveform_time_s", r.total_waveform_time()},
          {"steps", std::move(steps)}};
}

inline json clifford_report_to_json(const CliffordReport &r, double tolerance) {
  json checks = json::array();
  for (const auto &c : r.checks)
    checks.push_back({{"relation", c.relation},
                      {"deviation", c.deviation},
                      {"holds", c.deviation <= tolerance}});
  return {{"d", r.d},
          {"tolerance", tolerance},
          {"max_deviation", r.max_deviation()},
          {"holds", r.holds(tolerance)},
          {"checks", std::move(checks)}};
}

inline std::string ec_result_to_csv(const ECResult &r) {
  std::string out = "epsilon,corrected,uncorrected,trigger_rate\n";
  for (const auto &p : r.points)
    out += format_double(p.epsilon) + ',' + format_double(p.corrected) + ',' +
           format_double(p.uncorrected) + ',' + format_double(p.trigger_rate) + '\n';
  return out;
}

inline json ec_metadata_to_json(const ECConfig &cfg, const std::string &mode) {
  return {{"seed", cfg.seed},
          {"samples", cfg.samples},
          {"map_mode", mode},
          {"averaging",
           cfg.averaging == Averaging::MonteCarlo ? "monte-carlo" : "axis-states"},
          {"lande_sign", cfg.lande == LandeSign::Same ? "same" : "opposite"},
          {"epsilon_grid", cfg.epsilon_grid}};
}

inline std::string wigner_to_csv(const WignerGrid &g) {
  std::string out = "theta,phi,w\n";
  for (int i = 0; i < g.n_theta; ++i)
    for (int j = 0; j < g.n_phi; ++j)
      out += format_double(g.theta[static_cast<std::size_t>(i)]) + ',' +
             format_double(g.phi[static_cast<std::size_t>(j)]) + ',' +
             format_double(g.values(i, j)) + '\n';
  return out;
}

/// Pretty-printed JSON with a trailing newline.
inline std::string dump_json(const json &j) { return j.dump(2) + '\n'; }

} // namespace unimap
