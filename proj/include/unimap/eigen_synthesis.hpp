#pragma once

// Arbitrary unitaries from d state maps: each eigenvector is mapped onto the
// fiducial state, its eigenphase is imprinted there, and the map is undone.
//   W = prod_j V_j^dagger exp(-i lambda_j |0><0|) V_j

#include "unimap/search.hpp"

#include <optional>
#include <string>
#include <vector>

namespace unimap {

inline constexpr double kSkipPhase = 1e-12;

/// A unitary V with |<0|V|phi>|^2 close to 1, optionally backed by a waveform.
struct Mapper {
  UnitaryMatrix v;
  double fidelity = 0.0;
  std::optional<Waveform> waveform;
};

struct EigenPlanStep {
  double phase = 0.0;
  StateVector eigenvector;
  bool skippable = false;
  std::optional<Mapper> mapper;
};

/// Shared by unitary and subspace synthesis. `fidelity` is the trace
/// fidelity |Tr(W^dagger U)|/d for full maps and |sum_i <b_i|T|a_i>|/n for
/// subspace maps.
struct SynthesisReport {
  UnitaryMatrix target = UnitaryMatrix::identity(2);
  UnitaryMatrix assembled = UnitaryMatrix::identity(2);
  double fidelity = 0.0;
  std::vector<double> step_fidelities;
  std::vector<bool> step_converged;
  std::vector<std::size_t> skipped;
  std::vector<double> step_phases;
  std::vector<std::optional<Waveform>> waveforms;
  std::size_t searches = 0;

  bool all_converged() const {
    for (bool c : step_converged)
      if (!c)
        return false;
    return true;
  }

  /// Waveform time of all map/unmap pairs (phase imprints excluded).
  double total_waveform_time() const {
    double t = 0.0;
    for (const auto &w : waveforms)
      if (w)
        t += 2.0 * w->total_duration();
    return t;
  }
};

inline bool is_trivial_phase(double lambda) {
  return std::abs(lambda) <= kSkipPhase || std::abs(lambda - kTwoPi) <= kSkipPhase;
}

/// One step per eigenpair of W; zero phases are marked skippable.
inline std::vector<EigenPlanStep> plan_unitary(const UnitaryMatrix &w) {
  const auto spec = eig_unitary(w);
  std::vector<EigenPlanStep> steps;
  steps.reserve(spec.phases.size());
  for (std::size_t j = 0; j < spec.phases.size(); ++j)
    steps.push_back({spec.phases[j], spec.vectors[j],
                     is_trivial_phase(spec.phases[j]), std::nullopt});
  return steps;
}

/// Householder reflection V with V|phi> = e^{i theta}|fiducial>.
inline UnitaryMatrix exact_mapper(const StateVector &phi, int fiducial_index) {
  const Eigen::Index d = phi.dim();
  if (fiducial_index < 0 || fiducial_index >= d)
    throw ValidationError("exact_mapper: fiducial index out of range");
  const CVector &x = phi.amplitudes();
  const cplx xf = x(fiducial_index);
  const cplx sign = std::abs(xf) > 0.0 ? xf / std::abs(xf) : cplx(1.0);
  CVector u = x;
  u(fiducial_index) += sign; // x - alpha e_f with alpha = -sign * |x|
  const double un = u.squaredNorm();
  CMatrix v = CMatrix::Identity(d, d);
  if (un > 0.0)
    v -= (2.0 / un) * (u * u.adjoint());
  return UnitaryMatrix::unchecked(std::move(v));
}

inline Mapper make_exact_mapper(const StateVector &phi, int fiducial_index) {
  UnitaryMatrix v = exact_mapper(phi, fiducial_index);
  const double f =
      std::norm((v.matrix().row(fiducial_index) * phi.amplitudes()).value());
  return {std::move(v), std::min(1.0, f), std::nullopt};
}

/// prod_j V_j^dagger exp(-i lambda_j |0><0|) V_j, step 0 applied first.
inline UnitaryMatrix assemble_unitary(const std::vector<EigenPlanStep> &steps,
                                      Eigen::Index d, int fiducial_index) {
  CMatrix u = CMatrix::Identity(d, d);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const auto &step = steps[j];
    if (step.skippable)
      continue;
    if (!step.mapper)
      throw ValidationError("assemble_unitary: step " + std::to_string(j) +
                            " has no mapper");
    const CMatrix &v = step.mapper->v.matrix();
    if (v.rows() != d)
      throw ValidationError("assemble_unitary: mapper of step " +
                            std::to_string(j) + " has the wrong dimension");
    const CMatrix p =
        phase_imprint_unitary(d, {step.phase, fiducial_index}).matrix();
    u = v.adjoint() * p * v * u;
  }
  return UnitaryMatrix::unchecked(std::move(u));
}

namespace detail {

inline SynthesisReport report_from_steps(const UnitaryMatrix &w,
                                         const std::vector<EigenPlanStep> &steps,
                                         int fiducial_index) {
  SynthesisReport r;
  r.target = w;
  r.assembled = assemble_unitary(steps, w.dim(), fiducial_index);
  r.fidelity = trace_fidelity(w, r.assembled);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    r.step_phases.push_back(steps[j].phase);
    if (steps[j].skippable) {
      r.skipped.push_back(j);
      r.step_fidelities.push_back(1.0);
      r.waveforms.emplace_back();
    } else {
      r.step_fidelities.push_back(steps[j].mapper->fidelity);
      r.waveforms.push_back(steps[j].mapper->waveform);
    }
  }
  return r;
}

} // namespace detail

/// Algebraic pipeline: Householder mappers, no searches.
inline SynthesisReport synthesize_unitary_exact(const UnitaryMatrix &w,
                                                int fiducial_index) {
  auto steps = plan_unitary(w);
  for (auto &s : steps)
    if (!s.skippable)
      s.mapper = make_exact_mapper(s.eigenvector, fiducial_index);
  auto r = detail::report_from_steps(w, steps, fiducial_index);
  r.step_converged.assign(steps.size(), true);
  return r;
}

/// One multi-start search (phi_j -> fiducial) per nontrivial eigenphase; the
/// inverse maps are exact adjoints of the found propagators.
inline SynthesisReport synthesize_unitary(const ControlSystem &sys,
                                          const UnitaryMatrix &w,
                                          const SearchConfig &cfg) {
  cfg.validate();
  if (w.dim() != sys.dimension())
    throw ValidationError("synthesize_unitary: target dimension " +
                          std::to_string(w.dim()) + " != system dimension " +
                          std::to_string(sys.dimension()));
  if (!satisfies_control_count_bound(sys, cfg))
    throw ValidationError(
        "synthesize_unitary: segment_count * controls must be >= d^2 - 1");
  const int fid = sys.fiducial_index();
  const auto fiducial = StateVector::basis(sys.dimension(), fid);
  auto steps = plan_unitary(w);

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < steps.size(); ++j)
    if (!steps[j].skippable)
      active.push_back(j);

  std::vector<SearchResult> results(active.size());
  parallel_for(active.size(), [&](std::size_t i) {
    SearchConfig local = cfg;
    local.seed = derive_seed(cfg.seed, active[i]);
    results[i] = multi_start(sys, steps[active[i]].eigenvector, fiducial, local);
  });

  std::vector<bool> converged(steps.size(), true);
  for (std::size_t i = 0; i < active.size(); ++i) {
    auto &step = steps[active[i]];
    UnitaryMatrix v = propagate(sys, results[i].waveform);
    step.mapper = Mapper{std::move(v), results[i].fidelity, results[i].waveform};
    converged[active[i]] = results[i].converged;
  }
  auto r = detail::report_from_steps(w, steps, fid);
  r.step_converged = std::move(converged);
  r.searches = active.size();
  return r;
}

/// |Tr(W^dagger U_block)| / n on the leading n x n block of U.
inline double block_trace_fidelity(const UnitaryMatrix &w_block,
                                   const UnitaryMatrix &u) {
  const Eigen::Index n = w_block.dim();
  if (u.dim() < n)
    throw ValidationError("block_trace_fidelity: block larger than matrix");
  const cplx tr =
      (w_block.matrix().adjoint() * u.matrix().topLeftCorner(n, n)).trace();
  return std::min(1.0, std::abs(tr) / static_cast<double>(n));
}

} // namespace unimap
