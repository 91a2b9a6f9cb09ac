// unimap command-line tool. Exit codes: 0 success, 2 validation error,
// 1 internal error or a violated Clifford relation.

#include "unimap/io.hpp"
#include "unimap/unimap.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef UNIMAP_VERSION
#define UNIMAP_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace unimap;

namespace {

/// Thrown after the report is written when verify-clifford finds a violation.
struct RelationViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json(const std::string &path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(path + ": invalid JSON (" + e.what() + ")");
  }
}

// ------------------------------------------------------------------ systems

struct SystemChoice {
  std::string name;
  ControlSystem system;
  std::optional<CesiumParams> params; // cesium only
  double default_segment_duration = 0.0;
};

/// "cs133-f3-aux4", "cs133-f3-aux-4" or "spin:<2F>".
SystemChoice make_system(const std::string &name, const CesiumParams &params) {
  if (name.rfind("spin:", 0) == 0) {
    int two_f = 0;
    try {
      std::size_t used = 0;
      two_f = std::stoi(name.substr(5), &used);
      if (used != name.size() - 5)
        throw std::invalid_argument("trailing");
    } catch (const std::logic_error &) {
      throw ValidationError("system '" + name + "': expected spin:<2F>");
    }
    return {name, spin_qudit_system(two_f), std::nullopt, 0.5};
  }
  auto preset = cesium_preset(name);
  preset.params = params;
  return {name, build_restricted_system(params, preset.aux), params, params.segment_duration};
}

/// Shared configuration: optional JSON file {"params": {...}, "search": {...}}
/// overridden by explicit flags.
struct Settings {
  std::string system = "cs133-f3-aux4";
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<double> goal;
  std::optional<int> max_iterations;
  std::optional<std::size_t> segments;
  std::optional<double> segment_duration;
  CesiumParams params;
  json search_overrides = json::object();

  void add_search_flags(CLI::App *app, bool with_system = true, bool with_seed = true) {
    if (with_system)
      app->add_option("--system", system,
                      "cs133-f3-aux4, cs133-f3-aux-4 or spin:<2F>")
          ->capture_default_str();
    app->add_option("--config", config_file, "JSON with optional 'params' and 'search'");
    if (with_seed)
      app->add_option("--seed", seed, "search seed");
    app->add_option("--restarts", restarts, "multi-start restarts");
    app->add_option("--goal", goal, "fidelity goal per state map");
    app->add_option("--max-iterations", max_iterations);
    app->add_option("--segments", segments, "segments per waveform");
    app->add_option("--segment-duration", segment_duration, "seconds");
  }

  void load() {
    if (config_file.empty())
      return;
    const json j = load_json(config_file);
    detail::reject_unknown(j, {"params", "search"}, "");
    if (j.contains("params"))
      apply_cesium_params(j["params"], params);
    if (j.contains("search"))
      search_overrides = j["search"];
  }

  SearchConfig search_config(const SystemChoice &sys) const {
    SearchConfig cfg = SearchConfig::for_system(sys.system, sys.default_segment_duration);
    apply_search_config(search_overrides, cfg);
    if (seed)
      cfg.seed = *seed;
    if (restarts)
      cfg.restarts = *restarts;
    if (goal)
      cfg.fidelity_goal = *goal;
    if (max_iterations)
      cfg.max_iterations = *max_iterations;
    if (segments)
      cfg.segment_count = *segments;
    if (segment_duration)
      cfg.segment_duration = *segment_duration;
    cfg.validate();
    return cfg;
  }
};

json system_summary(const SystemChoice &s) {
  json controls = json::array();
  for (std::size_t c = 0; c < s.system.control_count(); ++c)
    controls.push_back({{"name", s.system.control_names()[c]},
                        {"min", s.system.bounds()[c].min},
                        {"max", s.system.bounds()[c].max}});
  json out = {{"name", s.name},
              {"dimension", s.system.dimension()},
              {"fiducial_index", s.system.fiducial_index()},
              {"controls", std::move(controls)}};
  out["params"] = s.params ? cesium_params_to_json(*s.params) : json(nullptr);
  return out;
}

// ----------------------------------------------------------------- outputs

/// Tracks written artifacts for the optional manifest.
class Outputs {
public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {}

  void write(const std::string &relative, const std::string &content) {
    atomic_write(fs::path(dir_) / relative, content);
    files_.push_back(relative);
  }
  const std::vector<std::string> &files() const { return files_; }
  const std::string &dir() const { return dir_; }

private:
  std::string dir_;
  std::vector<std::string> files_;
};

struct Manifest {
  bool enabled = false;
  std::string command;
  json config = json::object();
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  /// Wall-clock time makes this file differ between runs.
  void write(Outputs &out) const {
    if (!enabled)
      return;
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m = {{"command", command},
              {"tool_version", UNIMAP_VERSION},
              {"config", config},
              {"inputs", inputs},
              {"outputs", out.files()},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"wall_clock_s", seconds}};
    atomic_write(fs::path(out.dir()) / "manifest.json", dump_json(m));
  }
};

void add_out_dir(CLI::App *app, std::string &dir, Manifest &manifest) {
  app->add_option("--out-dir", dir, "output directory")->required();
  app->add_flag("--manifest", manifest.enabled, "also write manifest.json");
}

StateVector read_state(const std::string &file, std::optional<int> ket, Eigen::Index dim,
                       const std::string &what) {
  if (file.empty() == !ket.has_value())
    throw ValidationError("give exactly one of --" + what + " or --" + what + "-ket");
  if (ket) {
    if (*ket < 0 || *ket >= dim)
      throw ValidationError("--" + what + "-ket out of range");
    return StateVector::basis(dim, *ket);
  }
  return state_file_from_json(load_json(file), dim);
}

std::vector<std::string> waveform_files(const SynthesisReport &r, const std::string &stem,
                                        Outputs &out) {
  std::vector<std::string> names(r.waveforms.size());
  for (std::size_t j = 0; j < r.waveforms.size(); ++j)
    if (r.waveforms[j]) {
      names[j] = stem + std::to_string(j) + ".csv";
      out.write(names[j], waveform_to_csv(*r.waveforms[j]));
    }
  return names;
}

// ---------------------------------------------------------------- commands

void cmd_model_info(const std::string &preset, const std::string &config_file,
                    const std::string &out_file) {
  Settings settings;
  settings.config_file = config_file;
  settings.load();
  const auto sys = make_system(preset, settings.params);
  json info = system_summary(sys);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sys.system.drift().matrix());
  info["drift_eigenvalues"] = std::vector<double>(es.eigenvalues().data(),
                                                  es.eigenvalues().data() +
                                                      es.eigenvalues().size());
  info["lie_algebra_dimension"] = lie_algebra_dimension(sys.system);
  const auto cfg = SearchConfig::for_system(sys.system, sys.default_segment_duration);
  info["default_segments"] = cfg.segment_count;
  info["default_segment_duration"] = cfg.segment_duration;
  const std::string text = dump_json(info);
  if (out_file.empty())
    std::cout << text;
  else
    atomic_write(out_file, text);
}

struct OptimizeArgs {
  Settings settings;
  std::string initial_file, target_file, out_dir;
  std::optional<int> initial_ket, target_ket;
  Manifest manifest;
};

void cmd_optimize_state(OptimizeArgs &a) {
  a.settings.load();
  const auto sys = make_system(a.settings.system, a.settings.params);
  const auto cfg = a.settings.search_config(sys);
  const Eigen::Index d = sys.system.dimension();
  const auto psi_i = read_state(a.initial_file, a.initial_ket, d, "initial");
  const auto psi_f = read_state(a.target_file, a.target_ket, d, "target");
  const auto result = multi_start(sys.system, psi_i, psi_f, cfg);

  Outputs out(a.out_dir);
  out.write("waveform.csv", waveform_to_csv(result.waveform));
  json report = {{"command", "optimize-state"},
                 {"system", system_summary(sys)},
                 {"search", search_config_to_json(cfg)},
                 {"initial", vector_to_json(psi_i.amplitudes())},
                 {"target", vector_to_json(psi_f.amplitudes())},
                 {"result", search_result_to_json(result, "waveform.csv")}};
  out.write("report.json", dump_json(report));
  a.manifest.command = "optimize-state";
  a.manifest.config = report["search"];
  a.manifest.seed = cfg.seed;
  for (const auto &f : {a.initial_file, a.target_file})
    if (!f.empty())
      a.manifest.inputs.push_back(f);
  a.manifest.write(out);
  std::printf("fidelity %.6f after %d iterations%s\n", result.fidelity, result.iterations,
              result.converged ? "" : " (goal not reached)");
}

struct UnitaryArgs {
  Settings settings;
  std::string gate, matrix_file, out_dir;
  int d = 0;
  bool exact = false;
  int fiducial = 0;
  Manifest manifest;
};

void cmd_build_unitary(UnitaryArgs &a) {
  a.settings.load();
  if (a.gate.empty() == a.matrix_file.empty())
    throw ValidationError("give exactly one of --gate or --matrix");
  UnitaryMatrix target = UnitaryMatrix::identity(2);
  std::string name;
  if (!a.gate.empty()) {
    if (a.d < 2)
      throw ValidationError("--gate needs --d >= 2");
    const auto spec = parse_gate(a.gate, a.d);
    target = gate_matrix(spec);
    name = gate_name(spec);
  } else {
    const json j = load_json(a.matrix_file);
    target = unitary_from_json(j);
    name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>()
                                                       : fs::path(a.matrix_file).stem().string();
    a.manifest.inputs.push_back(a.matrix_file);
  }

  Outputs out(a.out_dir);
  json report;
  if (a.exact) {
    const auto r = synthesize_unitary_exact(target, a.fiducial);
    report = synthesis_report_to_json(r, name, {});
    report["mode"] = "exact";
    report["fiducial_index"] = a.fiducial;
  } else {
    const auto sys = make_system(a.settings.system, a.settings.params);
    const auto cfg = a.settings.search_config(sys);
    const UnitaryMatrix embedded = embed_unitary(target, sys.system.dimension());
    const auto r = synthesize_unitary(sys.system, embedded, cfg);
    report = synthesis_report_to_json(r, name, waveform_files(r, "step_", out));
    report["mode"] = "waveform";
    report["system"] = system_summary(sys);
    report["search"] = search_config_to_json(cfg);
    report["block_dimension"] = target.dim();
    report["block_fidelity"] = block_trace_fidelity(target, r.assembled);
    a.manifest.seed = cfg.seed;
    a.manifest.config = report["search"];
  }
  out.write("report.json", dump_json(report));
  a.manifest.command = "build-unitary";
  a.manifest.write(out);
  std::printf("%s: trace fidelity %.12f, %zu searches\n", name.c_str(),
              report["fidelity"].get<double>(), report["searches"].get<std::size_t>());
}

struct SubspaceArgs {
  Settings settings;
  std::string spec_file, out_dir;
  bool exact = false;
  Manifest manifest;
};

void cmd_build_subspace(SubspaceArgs &a) {
  a.settings.load();
  const auto named = subspace_spec_from_json(load_json(a.spec_file));
  a.manifest.inputs.push_back(a.spec_file);
  Outputs out(a.out_dir);
  SynthesisReport r;
  json report;
  if (a.exact) {
    r = synthesize_subspace_map_exact(named.spec);
    report = synthesis_report_to_json(r, fs::path(a.spec_file).stem().string(), {});
    report["mode"] = "exact";
  } else {
    const auto sys = make_system(a.settings.system, a.settings.params);
    if (sys.system.dimension() != named.spec.dim())
      throw ValidationError("field 'dim' is " + std::to_string(named.spec.dim()) +
                            " but the system has dimension " +
                            std::to_string(sys.system.dimension()));
    const auto cfg = a.settings.search_config(sys);
    r = synthesize_subspace_map(sys.system, named.spec, cfg);
    report = synthesis_report_to_json(r, fs::path(a.spec_file).stem().string(),
                                      waveform_files(r, "rotation_", out));
    report["mode"] = "waveform";
    report["system"] = system_summary(sys);
    report["search"] = search_config_to_json(cfg);
    a.manifest.seed = cfg.seed;
    a.manifest.config = report["search"];
  }
  report["pairs"] = named.names;
  out.write("report.json", dump_json(report));
  a.manifest.command = "build-subspace-map";
  a.manifest.write(out);
  std::printf("subspace fidelity %.12f, %zu searches\n", r.fidelity, r.searches);
}

struct EcArgs {
  Settings settings;
  std::string preset = "ideal", averaging = "monte-carlo", lande = "same";
  std::string eps_list, waveform_dir, out_dir;
  double eps_min = 0.0, eps_max = 0.3;
  int eps_count = 16;
  int samples = 200;
  std::uint64_t seed = 1;
  Manifest manifest;
};

std::vector<double> epsilon_grid(const EcArgs &a) {
  std::vector<double> grid;
  if (!a.eps_list.empty()) {
    std::stringstream ss(a.eps_list);
    std::string item;
    while (std::getline(ss, item, ','))
      grid.push_back(detail::parse_number(item, "--eps"));
    return grid;
  }
  if (a.eps_count < 1)
    throw ValidationError("--eps-count must be >= 1");
  if (!(a.eps_min <= a.eps_max))
    throw ValidationError("--eps-min must not exceed --eps-max");
  // Rounded to 1e-12 so that 0.06 prints as 0.06.
  for (int i = 0; i < a.eps_count; ++i) {
    const double e = a.eps_count == 1 ? a.eps_min
                                      : a.eps_min + (a.eps_max - a.eps_min) * i /
                                                        (a.eps_count - 1);
    grid.push_back(std::round(e * 1e12) / 1e12);
  }
  return grid;
}

const char *kMapNames[3] = {"encode", "syndrome", "recover"};

ECMaps load_ec_maps(const std::string &dir, const CesiumParams &params,
                    std::vector<std::string> &inputs) {
  const auto specs = ec_map_specs();
  ECWaveforms waveforms;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto steps = plan_subspace_map(specs[i]);
    waveforms[i].resize(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const fs::path p = fs::path(dir) / (std::string(kMapNames[i]) + "_rotation_" +
                                          std::to_string(k) + ".csv");
      if (fs::exists(p)) {
        waveforms[i][k] = load_waveform(p);
        inputs.push_back(p.string());
      }
    }
  }
  return ec_maps_from_waveforms(params, waveforms);
}

void cmd_ec_sweep(EcArgs &a) {
  a.settings.load();
  ECConfig cfg;
  cfg.epsilon_grid = epsilon_grid(a);
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  if (a.averaging == "monte-carlo")
    cfg.averaging = Averaging::MonteCarlo;
  else if (a.averaging == "axis-states")
    cfg.averaging = Averaging::AxisStates;
  else
    throw ValidationError("--averaging must be monte-carlo or axis-states");
  if (a.lande == "same")
    cfg.lande = LandeSign::Same;
  else if (a.lande == "opposite")
    cfg.lande = LandeSign::Opposite;
  else
    throw ValidationError("--lande must be same or opposite");
  cfg.validate();

  Outputs out(a.out_dir);
  ECMaps maps;
  json meta;
  if (a.preset == "ideal") {
    if (!a.waveform_dir.empty())
      throw ValidationError("--waveform-dir only applies to --preset synthesized");
    maps = ec_maps_ideal();
  } else if (a.preset == "synthesized") {
    json map_reports = json::array();
    if (!a.waveform_dir.empty()) {
      maps = load_ec_maps(a.waveform_dir, a.settings.params, a.manifest.inputs);
    } else {
      const auto sys = build_restricted_system(a.settings.params, AuxState::Plus4);
      SystemChoice choice{"cs133-f3-aux4", sys, a.settings.params,
                          a.settings.params.segment_duration};
      // State maps above 0.99, not just at it, unless configured otherwise.
      Settings s = a.settings;
      if (!s.goal && !s.search_overrides.contains("fidelity_goal"))
        s.goal = kEcMapGoal;
      auto scfg = s.search_config(choice);
      if (!a.settings.search_overrides.contains("seed"))
        scfg.seed = a.seed;
      maps = ec_maps_synthesized(a.settings.params, scfg);
      meta["search"] = search_config_to_json(scfg);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const auto &r = maps.reports[i];
      map_reports.push_back(synthesis_report_to_json(
          r, kMapNames[i],
          a.waveform_dir.empty() ? waveform_files(r, std::string("maps/") + kMapNames[i] +
                                                         "_rotation_",
                                                  out)
                                 : std::vector<std::string>{}));
    }
    meta["maps"] = std::move(map_reports);
    meta["params"] = cesium_params_to_json(a.settings.params);
  } else {
    throw ValidationError("--preset must be ideal or synthesized");
  }

  const auto result = ec_sweep(cfg, maps);
  out.write("ec.csv", ec_result_to_csv(result));
  json full = ec_metadata_to_json(cfg, a.preset);
  for (auto &item : meta.items())
    full[item.key()] = item.value();
  out.write("ec_meta.json", dump_json(full));
  a.manifest.command = "ec-sweep";
  a.manifest.config = full;
  a.manifest.seed = cfg.seed;
  a.manifest.write(out);
  std::printf("%zu points written\n", result.points.size());
}

struct WignerArgs {
  std::string state_file, out_file;
  int two_f = -1, offset = 0, n_theta = 37, n_phi = 72;
};

void cmd_wigner(const WignerArgs &a) {
  const auto state = state_file_from_json(load_json(a.state_file));
  const int two_f = a.two_f >= 0 ? a.two_f : static_cast<int>(state.dim()) - 1;
  const auto grid = wigner_grid(state, two_f, a.offset, a.n_theta, a.n_phi);
  const std::string csv = wigner_to_csv(grid);
  if (a.out_file.empty())
    std::cout << csv;
  else
    atomic_write(a.out_file, csv);
}

void cmd_verify_clifford(int d, const std::string &convention, double tolerance,
                         const std::string &out_file) {
  PhaseConvention c = PhaseConvention::IndexParity;
  if (convention == "dimension-parity")
    c = PhaseConvention::DimensionParity;
  else if (convention != "index-parity")
    throw ValidationError("--convention must be index-parity or dimension-parity");
  const auto report = verify_clifford_relations(d, c);
  json j = clifford_report_to_json(report, tolerance);
  j["convention"] = convention;
  const std::string text = dump_json(j);
  if (out_file.empty())
    std::cout << text;
  else
    atomic_write(out_file, text);
  std::string failed;
  for (const auto &check : report.checks)
    if (check.deviation > tolerance) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s%s (deviation %.3g)", failed.empty() ? "" : "; ",
                    check.relation.c_str(), check.deviation);
      failed += buf;
    }
  if (!failed.empty())
    throw RelationViolated("relation violated at d = " + std::to_string(d) + ": " + failed);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Unitary and subspace map synthesis from state-to-state searches"};
  app.set_version_flag("--version", std::string(UNIMAP_VERSION));
  app.require_subcommand(1);

  // model info
  auto *model = app.add_subcommand("model", "control model queries");
  model->require_subcommand(1);
  auto *info = model->add_subcommand("info", "describe a preset system");
  std::string info_preset, info_config, info_out;
  info->add_option("preset", info_preset, "cs133-f3-aux4, cs133-f3-aux-4 or spin:<2F>")
      ->required();
  info->add_option("--config", info_config, "JSON with optional 'params'");
  info->add_option("--out", info_out, "write JSON here instead of stdout");

  // optimize-state
  OptimizeArgs opt;
  auto *optimize = app.add_subcommand("optimize-state", "search one state-to-state map");
  opt.settings.add_search_flags(optimize);
  optimize->add_option("--initial", opt.initial_file, "state JSON file");
  optimize->add_option("--initial-ket", opt.initial_ket, "basis index");
  optimize->add_option("--target", opt.target_file, "state JSON file");
  optimize->add_option("--target-ket", opt.target_ket, "basis index");
  add_out_dir(optimize, opt.out_dir, opt.manifest);

  // build-unitary
  UnitaryArgs un;
  auto *unitary = app.add_subcommand("build-unitary", "eigen-decomposition synthesis");
  un.settings.add_search_flags(unitary);
  unitary->add_option("--gate", un.gate, "X, Z, H, S or G:<a>");
  unitary->add_option("--d", un.d, "qudit dimension for --gate");
  unitary->add_option("--matrix", un.matrix_file, "JSON with 'matrix' rows");
  unitary->add_flag("--exact-mappers", un.exact, "exact mappers, no searches");
  unitary->add_option("--fiducial", un.fiducial, "fiducial index for --exact-mappers");
  add_out_dir(unitary, un.out_dir, un.manifest);

  // build-subspace-map
  SubspaceArgs sub;
  auto *subspace = app.add_subcommand("build-subspace-map", "pi-rotation subspace map");
  sub.settings.add_search_flags(subspace);
  subspace->add_option("--spec", sub.spec_file, "subspace spec JSON")->required();
  subspace->add_flag("--exact", sub.exact, "exact rotations, no searches");
  add_out_dir(subspace, sub.out_dir, sub.manifest);

  // ec-sweep
  EcArgs ec;
  auto *sweep = app.add_subcommand("ec-sweep", "error-correction fidelity sweep");
  ec.settings.add_search_flags(sweep, false, false);
  sweep->add_option("--preset", ec.preset, "ideal or synthesized")->capture_default_str();
  sweep->add_option("--samples", ec.samples)->capture_default_str();
  sweep->add_option("--seed", ec.seed, "trial seed (also the search seed)")
      ->capture_default_str();
  sweep->add_option("--eps", ec.eps_list, "comma-separated epsilon values");
  sweep->add_option("--eps-min", ec.eps_min)->capture_default_str();
  sweep->add_option("--eps-max", ec.eps_max)->capture_default_str();
  sweep->add_option("--eps-count", ec.eps_count)->capture_default_str();
  sweep->add_option("--averaging", ec.averaging, "monte-carlo or axis-states")
      ->capture_default_str();
  sweep->add_option("--lande", ec.lande, "same or opposite")->capture_default_str();
  sweep->add_option("--waveform-dir", ec.waveform_dir, "stored synthesized maps");
  add_out_dir(sweep, ec.out_dir, ec.manifest);

  // wigner
  WignerArgs wg;
  auto *wigner = app.add_subcommand("wigner", "Wigner grid of a state on a spin block");
  wigner->add_option("--state", wg.state_file, "state JSON file")->required();
  wigner->add_option("--two-f", wg.two_f, "2F of the block (default dim - 1)");
  wigner->add_option("--offset", wg.offset, "first level of the block")->capture_default_str();
  wigner->add_option("--n-theta", wg.n_theta)->capture_default_str();
  wigner->add_option("--n-phi", wg.n_phi)->capture_default_str();
  wigner->add_option("--out", wg.out_file, "CSV path (default stdout)");

  // verify-clifford
  int cl_d = 0;
  double cl_tol = 1e-12;
  std::string cl_conv = "index-parity", cl_out;
  auto *clifford = app.add_subcommand("verify-clifford", "check Clifford relations");
  clifford->add_option("--d", cl_d, "dimension")->required();
  clifford->add_option("--tolerance", cl_tol)->capture_default_str();
  clifford->add_option("--convention", cl_conv, "index-parity or dimension-parity")
      ->capture_default_str();
  clifford->add_option("--out", cl_out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (info->parsed())
      cmd_model_info(info_preset, info_config, info_out);
    else if (optimize->parsed())
      cmd_optimize_state(opt);
    else if (unitary->parsed())
      cmd_build_unitary(un);
    else if (subspace->parsed())
      cmd_build_subspace(sub);
    else if (sweep->parsed())
      cmd_ec_sweep(ec);
    else if (wigner->parsed())
      cmd_wigner(wg);
    else if (clifford->parsed())
      cmd_verify_clifford(cl_d, cl_conv, cl_tol, cl_out);
  } catch (const ValidationError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const RelationViolated &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
