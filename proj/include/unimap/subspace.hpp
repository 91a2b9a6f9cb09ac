#pragma once

// Unitary maps between n-dimensional subspaces built from pi-rotations
// S(a, b) = I - 2|phi><phi|, phi ~ a - b, which fix the orthogonal
// complement of span{a, b}. Step k rotates the image of a_k (after all
// earlier rotations) onto b_k; earlier b's are left untouched.

#include "unimap/eigen_synthesis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace unimap {

inline constexpr double kRotationSkip = 1e-9;
inline constexpr double kZeroOverlap = 1e-12;

struct SubspaceMapSpec {
  std::vector<StateVector> source;
  std::vector<StateVector> target;
  bool phase_correction = true;

  std::size_t n() const { return source.size(); }
  Eigen::Index dim() const { return source.empty() ? 0 : source.front().dim(); }

  /// Sizes, dimensions and orthonormality (1e-10) of both bases.
  void validate() const {
    if (source.empty())
      throw ValidationError("subspace map: basis must be non-empty");
    if (source.size() != target.size())
      throw ValidationError("subspace map: source and target sizes differ");
    const Eigen::Index d = dim();
    if (static_cast<Eigen::Index>(source.size()) > d)
      throw ValidationError("subspace map: n exceeds the dimension");
    auto check = [&](const std::vector<StateVector> &basis, const char *name) {
      for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].dim() != d)
          throw ValidationError(std::string("subspace map: ") + name + "[" +
                                std::to_string(i) + "] has the wrong dimension");
        for (std::size_t j = 0; j < i; ++j)
          if (std::abs(basis[j].inner(basis[i])) > 1e-10)
            throw ValidationError(std::string("subspace map: ") + name + "[" +
                                  std::to_string(j) + "] and " + name + "[" +
                                  std::to_string(i) + "] are not orthogonal");
      }
    };
    check(source, "source");
    check(target, "target");
  }
};

struct PairRotation {
  UnitaryMatrix s;
  double theta = 0.0;
  bool skipped = false;
  std::optional<StateVector> axis;
};

/// S with S a = e^{i theta} b, theta = arg<b|a> (0 for vanishing overlap).
inline PairRotation pair_rotation(const StateVector &a, const StateVector &b) {
  if (a.dim() != b.dim())
    throw ValidationError("pair_rotation: dimension mismatch");
  const Eigen::Index d = a.dim();
  const cplx overlap = b.inner(a);
  const double theta = std::abs(overlap) <= kZeroOverlap ? 0.0 : std::arg(overlap);
  const CVector b_rephased = std::polar(1.0, theta) * b.amplitudes();
  const CVector diff = a.amplitudes() - b_rephased;
  const double norm = diff.norm();
  if (norm <= kRotationSkip)
    return {UnitaryMatrix::identity(d), theta, true, std::nullopt};
  const CVector phi = diff / norm;
  CMatrix s = CMatrix::Identity(d, d) - 2.0 * (phi * phi.adjoint());
  return {UnitaryMatrix::unchecked(std::move(s)), theta, false,
          StateVector::normalized(phi)};
}

struct RotationStep {
  StateVector rotated_source;
  StateVector target; // e^{i theta} b_k
  std::optional<StateVector> axis;
  double theta = 0.0;
  UnitaryMatrix s = UnitaryMatrix::identity(2);

  bool skipped() const { return !axis.has_value(); }
};

inline std::vector<RotationStep> plan_subspace_map(const SubspaceMapSpec &spec) {
  spec.validate();
  std::vector<RotationStep> steps;
  steps.reserve(spec.n());
  for (std::size_t k = 0; k < spec.n(); ++k) {
    StateVector a = spec.source[k];
    for (const auto &prev : steps)
      if (!prev.skipped())
        a = prev.s.apply(a);
    auto rot = pair_rotation(a, spec.target[k]);
    StateVector b_rephased = StateVector::normalized(
        std::polar(1.0, rot.theta) * spec.target[k].amplitudes());
    steps.push_back({std::move(a), std::move(b_rephased), std::move(rot.axis),
                     rot.theta, std::move(rot.s)});
  }
  return steps;
}

/// max |<a~_j|b_k>| over j > k; zero in exact arithmetic.
inline double induction_residual(const std::vector<RotationStep> &steps,
                                 const SubspaceMapSpec &spec) {
  double worst = 0.0;
  for (std::size_t j = 0; j < steps.size(); ++j)
    for (std::size_t k = 0; k < j; ++k)
      worst = std::max(worst,
                       std::abs(steps[j].rotated_source.inner(spec.target[k])));
  return worst;
}

namespace detail {

/// prod_i exp(-i theta_i |b_i><b_i|) undoing the recorded target phases.
inline CMatrix phase_correction(const std::vector<RotationStep> &steps,
                                const SubspaceMapSpec &spec) {
  const Eigen::Index d = spec.dim();
  CMatrix c = CMatrix::Identity(d, d);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].theta == 0.0)
      continue;
    const CVector &b = spec.target[i].amplitudes();
    c += (std::polar(1.0, -steps[i].theta) - 1.0) * (b * b.adjoint());
  }
  return c;
}

} // namespace detail

/// T = (phase corrections) s_n ... s_1.
inline UnitaryMatrix assemble_subspace_map(const std::vector<RotationStep> &steps,
                                           const SubspaceMapSpec &spec) {
  const Eigen::Index d = spec.dim();
  CMatrix t = CMatrix::Identity(d, d);
  for (const auto &step : steps)
    if (!step.skipped())
      t = step.s.matrix() * t;
  if (spec.phase_correction)
    t = detail::phase_correction(steps, spec) * t;
  return UnitaryMatrix::unchecked(std::move(t));
}

/// |sum_i <b_i|T|a_i>| / n
inline double subspace_fidelity(const UnitaryMatrix &t,
                                const SubspaceMapSpec &spec) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < spec.n(); ++i)
    acc += spec.target[i].amplitudes().dot(t.matrix() * spec.source[i].amplitudes());
  return std::min(1.0, std::abs(acc) / static_cast<double>(spec.n()));
}

/// A control system acting on a subset of host levels; host level of system
/// level i is levels[i]. Unlisted host levels are untouched.
struct EmbeddedSystem {
  ControlSystem system;
  std::vector<int> levels;

  static EmbeddedSystem identity(ControlSystem sys) {
    std::vector<int> lv(static_cast<std::size_t>(sys.dimension()));
    for (std::size_t i = 0; i < lv.size(); ++i)
      lv[i] = static_cast<int>(i);
    return {std::move(sys), std::move(lv)};
  }

  bool supports(const CVector &v, double tolerance = 1e-12) const {
    std::vector<bool> inside(static_cast<std::size_t>(v.size()), false);
    for (int l : levels)
      inside[static_cast<std::size_t>(l)] = true;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!inside[static_cast<std::size_t>(i)] && std::abs(v(i)) > tolerance)
        return false;
    return true;
  }

  CVector restrict(const CVector &host) const {
    CVector out(static_cast<Eigen::Index>(levels.size()));
    for (std::size_t i = 0; i < levels.size(); ++i)
      out(static_cast<Eigen::Index>(i)) = host(levels[i]);
    return out;
  }

  CMatrix embed(const CMatrix &m, Eigen::Index host_dim) const {
    CMatrix out = CMatrix::Identity(host_dim, host_dim);
    for (std::size_t r = 0; r < levels.size(); ++r)
      for (std::size_t c = 0; c < levels.size(); ++c)
        out(levels[r], levels[c]) =
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return out;
  }

  void validate(Eigen::Index host_dim) const {
    if (static_cast<Eigen::Index>(levels.size()) != system.dimension())
      throw ValidationError("embedded system: one host level per system level");
    std::vector<bool> seen(static_cast<std::size_t>(host_dim), false);
    for (int l : levels) {
      if (l < 0 || l >= host_dim || seen[static_cast<std::size_t>(l)])
        throw ValidationError("embedded system: invalid or repeated host level");
      seen[static_cast<std::size_t>(l)] = true;
    }
  }
};

/// Index of the first system whose levels cover `axis`.
inline std::size_t choose_system(const std::vector<EmbeddedSystem> &systems,
                                 const CVector &axis, std::size_t step) {
  for (std::size_t i = 0; i < systems.size(); ++i)
    if (systems[i].supports(axis))
      return i;
  throw ValidationError("subspace map: rotation " + std::to_string(step) +
                        " is not supported by any control system");
}

/// Builds T from one waveform per non-skipped rotation: each rotation is
/// V^dagger exp(-i pi |0><0|) V with V = propagate(waveform) on the chosen
/// system. Step fidelities are |<0|V|axis>|^2. Phase corrections, when
/// requested, are applied as exact rotations.
inline SynthesisReport
realize_subspace_map(const std::vector<EmbeddedSystem> &systems,
                     const SubspaceMapSpec &spec,
                     const std::vector<std::optional<Waveform>> &waveforms) {
  if (systems.empty())
    throw ValidationError("subspace map: no control system given");
  const Eigen::Index d = spec.dim();
  for (const auto &s : systems)
    s.validate(d);
  const auto steps = plan_subspace_map(spec);
  if (waveforms.size() != steps.size())
    throw ValidationError("subspace map: expected " +
                          std::to_string(steps.size()) + " waveform slots, got " +
                          std::to_string(waveforms.size()));

  SynthesisReport r;
  r.target = assemble_subspace_map(steps, spec);
  r.step_fidelities.assign(steps.size(), 1.0);
  r.step_converged.assign(steps.size(), true);
  r.step_phases.assign(steps.size(), std::numbers::pi);
  r.waveforms.resize(steps.size());

  CMatrix t = CMatrix::Identity(d, d);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].skipped()) {
      r.skipped.push_back(k);
      continue;
    }
    if (!waveforms[k])
      throw ValidationError("subspace map: missing waveform for rotation " +
                            std::to_string(k));
    const CVector &axis = steps[k].axis->amplitudes();
    const auto &es = systems[choose_system(systems, axis, k)];
    const CMatrix v = propagate(es.system, *waveforms[k]).matrix();
    const CMatrix p =
        phase_imprint_unitary(es.system.dimension(),
                              {std::numbers::pi, es.system.fiducial_index()})
            .matrix();
    t = es.embed(v.adjoint() * p * v, d) * t;
    r.step_fidelities[k] = std::min(
        1.0, std::norm((v.row(es.system.fiducial_index()) * es.restrict(axis)).value()));
    r.waveforms[k] = waveforms[k];
  }
  if (spec.phase_correction)
    t = detail::phase_correction(steps, spec) * t;
  r.assembled = UnitaryMatrix::unchecked(std::move(t));
  r.fidelity = subspace_fidelity(r.assembled, spec);
  return r;
}

/// One multi-start search (axis -> fiducial) per non-skipped rotation, on the
/// first system whose levels cover the rotation axis; then realize_subspace_map.
inline SynthesisReport
synthesize_subspace_map(const std::vector<EmbeddedSystem> &systems,
                        const SubspaceMapSpec &spec, const SearchConfig &cfg) {
  cfg.validate();
  if (systems.empty())
    throw ValidationError("subspace map: no control system given");
  for (const auto &s : systems)
    s.validate(spec.dim());
  const auto steps = plan_subspace_map(spec);

  std::vector<std::size_t> active;
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].skipped())
      continue;
    active.push_back(k);
    chosen.push_back(choose_system(systems, steps[k].axis->amplitudes(), k));
  }

  std::vector<SearchResult> results(active.size());
  parallel_for(active.size(), [&](std::size_t j) {
    const auto &es = systems[chosen[j]];
    const auto &sys = es.system;
    const auto phi = StateVector::normalized(
        es.restrict(steps[active[j]].axis->amplitudes()));
    SearchConfig local = cfg;
    local.seed = derive_seed(cfg.seed, active[j]);
    results[j] = multi_start(
        sys, phi, StateVector::basis(sys.dimension(), sys.fiducial_index()),
        local);
  });

  std::vector<std::optional<Waveform>> waveforms(steps.size());
  for (std::size_t j = 0; j < active.size(); ++j)
    waveforms[active[j]] = results[j].waveform;
  auto r = realize_subspace_map(systems, spec, waveforms);
  r.searches = active.size();
  for (std::size_t j = 0; j < active.size(); ++j)
    r.step_converged[active[j]] = results[j].converged;
  return r;
}

inline SynthesisReport synthesize_subspace_map(const ControlSystem &sys,
                                               const SubspaceMapSpec &spec,
                                               const SearchConfig &cfg) {
  return synthesize_subspace_map({EmbeddedSystem::identity(sys)}, spec, cfg);
}

/// Exact rotations; no searches.
inline SynthesisReport synthesize_subspace_map_exact(const SubspaceMapSpec &spec) {
  const auto steps = plan_subspace_map(spec);
  SynthesisReport r;
  r.target = assemble_subspace_map(steps, spec);
  r.assembled = r.target;
  r.fidelity = subspace_fidelity(r.assembled, spec);
  r.step_fidelities.assign(steps.size(), 1.0);
  r.step_converged.assign(steps.size(), true);
  r.step_phases.assign(steps.size(), std::numbers::pi);
  r.waveforms.resize(steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k)
    if (steps[k].skipped())
      r.skipped.push_back(k);
  return r;
}

} // namespace unimap
