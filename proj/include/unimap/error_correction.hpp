#pragma once

// Embedded-qubit dephasing correction on a 9-level space: the seven F = 3
// sublevels (indices 0..6, m_z = 3..-3), |4, 4_z> (7) and |4, -4_z> (8).
//
// Protocol: encode {|4,4_z>, |3,3_z>} -> {|3,3_x>, |3,-3_x>}; dephase with
// exp(-2 i eps F_z); map the error states {|3,2_x>, |3,-2_x>} onto
// {|4,4_z>, |4,-4_z>}; measure F; on F = 4 map {|4,4_z>, |4,-4_z>} back to
// {|3,3_x>, |3,-3_x>}; decode.

#include "unimap/cesium.hpp"
#include "unimap/subspace.hpp"

#include <array>
#include <string>
#include <vector>

namespace unimap {

inline constexpr int kEcDim = 9;
inline constexpr int kEcPlus4 = 7;
inline constexpr int kEcMinus4 = 8;

/// F_z on the EC space, F = 4 levels at m_z = +4 and -4.
inline CMatrix ec_fz() {
  CMatrix fz = CMatrix::Zero(kEcDim, kEcDim);
  for (int i = 0; i < kF3Levels; ++i)
    fz(i, i) = 3.0 - i;
  fz(kEcPlus4, kEcPlus4) = 4.0;
  fz(kEcMinus4, kEcMinus4) = -4.0;
  return fz;
}

/// |3, m_x> embedded in the EC space.
inline StateVector ec_f3_x(int m) {
  const auto v = x_basis_state(6, 2 * m);
  CVector out = CVector::Zero(kEcDim);
  out.head(kF3Levels) = v.amplitudes();
  return StateVector(std::move(out));
}

inline StateVector ec_f3_z(int m) { return StateVector::basis(kEcDim, f3_index(m)); }

inline StateVector ec_f4_z(int m) {
  if (m != 4 && m != -4)
    throw ValidationError("only the F = 4 stretched states are simulated");
  return StateVector::basis(kEcDim, m == 4 ? kEcPlus4 : kEcMinus4);
}

/// Encode, syndrome extraction and recovery maps, in that order.
inline std::array<SubspaceMapSpec, 3> ec_map_specs() {
  return {SubspaceMapSpec{{ec_f4_z(4), ec_f3_z(3)}, {ec_f3_x(3), ec_f3_x(-3)}, true},
          SubspaceMapSpec{{ec_f3_x(2), ec_f3_x(-2)}, {ec_f4_z(4), ec_f4_z(-4)}, true},
          SubspaceMapSpec{{ec_f4_z(4), ec_f4_z(-4)}, {ec_f3_x(3), ec_f3_x(-3)}, true}};
}

struct ECMaps {
  UnitaryMatrix encode = UnitaryMatrix::identity(kEcDim);
  UnitaryMatrix syndrome = UnitaryMatrix::identity(kEcDim);
  UnitaryMatrix recover = UnitaryMatrix::identity(kEcDim);
  bool synthesized = false;
  /// Per-map synthesis reports (synthesized mode only).
  std::vector<SynthesisReport> reports;
};

inline ECMaps ec_maps_ideal() {
  const auto specs = ec_map_specs();
  ECMaps maps;
  maps.encode = assemble_subspace_map(plan_subspace_map(specs[0]), specs[0]);
  maps.syndrome = assemble_subspace_map(plan_subspace_map(specs[1]), specs[1]);
  maps.recover = assemble_subspace_map(plan_subspace_map(specs[2]), specs[2]);
  return maps;
}

/// The two restricted cesium systems (fiducial |4,4_z> and |4,-4_z>)
/// embedded in the EC space. Rotations touching |4,4_z> run on the first,
/// those touching |4,-4_z> on the second.
inline std::vector<EmbeddedSystem> ec_control_systems(const CesiumParams &params) {
  std::vector<int> plus{0, 1, 2, 3, 4, 5, 6, kEcPlus4};
  std::vector<int> minus{0, 1, 2, 3, 4, 5, 6, kEcMinus4};
  return {EmbeddedSystem{build_restricted_system(params, AuxState::Plus4), plus},
          EmbeddedSystem{build_restricted_system(params, AuxState::Minus4), minus}};
}

using ECWaveforms = std::array<std::vector<std::optional<Waveform>>, 3>;

/// Maps rebuilt from stored waveforms, one slot per rotation of each map.
inline ECMaps ec_maps_from_waveforms(const CesiumParams &params,
                                     const ECWaveforms &waveforms) {
  const auto specs = ec_map_specs();
  const auto systems = ec_control_systems(params);
  ECMaps maps;
  maps.synthesized = true;
  for (std::size_t i = 0; i < 3; ++i)
    maps.reports.push_back(realize_subspace_map(systems, specs[i], waveforms[i]));
  maps.encode = maps.reports[0].assembled;
  maps.syndrome = maps.reports[1].assembled;
  maps.recover = maps.reports[2].assembled;
  return maps;
}

/// Default per-rotation search goal for synthesized maps. Searches stop as
/// soon as they reach the goal, so 0.99 would leave every rotation right at
/// the threshold; 0.995 keeps the 2-dim map fidelities near 0.99.
inline constexpr double kEcMapGoal = 0.995;

/// Searches waveforms for all three maps (two rotations each).
inline ECMaps ec_maps_synthesized(const CesiumParams &params,
                                  const SearchConfig &cfg) {
  const auto specs = ec_map_specs();
  const auto systems = ec_control_systems(params);
  ECMaps maps;
  maps.synthesized = true;
  for (std::size_t i = 0; i < 3; ++i) {
    SearchConfig local = cfg;
    local.seed = derive_seed(cfg.seed, 100 + i);
    maps.reports.push_back(synthesize_subspace_map(systems, specs[i], local));
  }
  maps.encode = maps.reports[0].assembled;
  maps.syndrome = maps.reports[1].assembled;
  maps.recover = maps.reports[2].assembled;
  return maps;
}

inline bool in_f4(Eigen::Index level) {
  return level == kEcPlus4 || level == kEcMinus4;
}

/// Relative sign of the field coupling in F = 4 versus F = 3. Same uses the
/// m values as they are; Opposite flips the F = 4 levels, as for cesium's
/// g-factors of opposite sign. Opposite only changes the unencoded qubit.
enum class LandeSign { Same, Opposite };

/// exp(-2 i eps F_z) on the EC space.
inline UnitaryMatrix error_channel(double eps, LandeSign sign = LandeSign::Same) {
  if (!std::isfinite(eps))
    throw ValidationError("error_channel: eps must be finite");
  CMatrix u = CMatrix::Zero(kEcDim, kEcDim);
  const CMatrix fz = ec_fz();
  for (int i = 0; i < kEcDim; ++i) {
    const double g = sign == LandeSign::Opposite && in_f4(i) ? -1.0 : 1.0;
    u(i, i) = std::polar(1.0, -2.0 * eps * g * fz(i, i).real());
  }
  return UnitaryMatrix::unchecked(std::move(u));
}

/// Probability of finding F = 4.
inline double f4_probability(const CVector &state) {
  return std::norm(state(kEcPlus4)) + std::norm(state(kEcMinus4));
}

struct Measurement {
  int outcome = 3;
  CVector collapsed;
  double probability = 0.0;
};

/// Projects onto the F = 3 block or the F = 4 levels and renormalizes.
inline Measurement project_F(const CVector &state, int outcome) {
  if (outcome != 3 && outcome != 4)
    throw ValidationError("project_F: outcome must be 3 or 4");
  const double p4 = f4_probability(state);
  const double total = state.squaredNorm();
  const double p = (outcome == 4 ? p4 : total - p4) / total;
  if (!(p > 0.0))
    throw ValidationError("project_F: outcome F = " + std::to_string(outcome) +
                          " has zero probability");
  CVector out = state;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (in_f4(i) != (outcome == 4))
      out(i) = 0.0;
  out /= out.norm();
  return {outcome, std::move(out), p};
}

/// Non-demolition measurement of F with the outcome drawn from `rng`.
inline Measurement qnd_measure_F(const StateVector &state, Rng &rng) {
  if (state.dim() != kEcDim)
    throw ValidationError("qnd_measure_F: state must live on the EC space");
  const double p4 = f4_probability(state.amplitudes());
  return project_F(state.amplitudes(), rng.uniform() < p4 ? 4 : 3);
}

/// Physical qubit alpha |3,3_z> + beta |4,4_z>.
inline StateVector physical_qubit(cplx alpha, cplx beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
    throw ValidationError("qubit amplitudes must satisfy |a|^2 + |b|^2 = 1");
  CVector v = CVector::Zero(kEcDim);
  v(f3_index(3)) = alpha;
  v(kEcPlus4) = beta;
  return StateVector(std::move(v));
}

struct ECTrial {
  double fidelity = 0.0;
  bool triggered = false;
  /// Probability of the F = 4 syndrome before measurement.
  double trigger_probability = 0.0;
};

namespace detail {

inline double branch_fidelity(const StateVector &initial, const CVector &collapsed,
                              int outcome, const ECMaps &maps) {
  CVector s = collapsed;
  if (outcome == 4)
    s = maps.recover.matrix() * s;
  s = maps.encode.matrix().adjoint() * s;
  return std::min(1.0, std::norm(initial.amplitudes().dot(s)) / s.squaredNorm());
}

inline CVector pre_measurement_state(const StateVector &initial, double eps,
                                     const ECMaps &maps, LandeSign sign) {
  return maps.syndrome.matrix() *
         (error_channel(eps, sign).matrix() * (maps.encode.matrix() * initial.amplitudes()));
}

} // namespace detail

/// One protocol run. With correct = false the unencoded physical qubit is
/// dephased and compared directly.
inline ECTrial run_ec_trial(const std::array<cplx, 2> &qubit, double eps,
                            const ECMaps &maps, Rng &rng, bool correct,
                            LandeSign sign = LandeSign::Same) {
  const auto initial = physical_qubit(qubit[0], qubit[1]);
  if (!correct) {
    const CVector after = error_channel(eps, sign).matrix() * initial.amplitudes();
    return {std::min(1.0, std::norm(initial.amplitudes().dot(after))), false, 0.0};
  }
  const CVector s = detail::pre_measurement_state(initial, eps, maps, sign);
  const double p4 = f4_probability(s) / s.squaredNorm();
  const auto m = project_F(s, rng.uniform() < p4 ? 4 : 3);
  return {detail::branch_fidelity(initial, m.collapsed, m.outcome, maps),
          m.outcome == 4, p4};
}

/// Corrected fidelity averaged over both measurement outcomes.
inline ECTrial expected_ec_trial(const std::array<cplx, 2> &qubit, double eps,
                                 const ECMaps &maps, LandeSign sign = LandeSign::Same) {
  const auto initial = physical_qubit(qubit[0], qubit[1]);
  const CVector s = detail::pre_measurement_state(initial, eps, maps, sign);
  const double p4 = f4_probability(s) / s.squaredNorm();
  double f = 0.0;
  if (p4 > 0.0)
    f += p4 * detail::branch_fidelity(initial, project_F(s, 4).collapsed, 4, maps);
  if (p4 < 1.0)
    f += (1.0 - p4) * detail::branch_fidelity(initial, project_F(s, 3).collapsed, 3, maps);
  return {f, false, p4};
}

enum class Averaging {
  MonteCarlo, ///< Haar qubit states, sampled measurement outcomes.
  AxisStates, ///< the six Bloch axis states, outcome-averaged (a 2-design).
};

struct ECConfig {
  std::vector<double> epsilon_grid;
  int samples = 200;
  std::uint64_t seed = 1;
  Averaging averaging = Averaging::MonteCarlo;
  LandeSign lande = LandeSign::Same;

  void validate() const {
    if (samples < 1)
      throw ValidationError("ec config: samples must be >= 1");
    if (epsilon_grid.empty())
      throw ValidationError("ec config: epsilon_grid is empty");
    for (double e : epsilon_grid)
      if (!std::isfinite(e))
        throw ValidationError("ec config: epsilon values must be finite");
  }
};

struct ECPoint {
  double epsilon = 0.0;
  double corrected = 0.0;
  double uncorrected = 0.0;
  double trigger_rate = 0.0;
};

struct ECResult {
  std::vector<ECPoint> points;
};

inline std::array<cplx, 2> haar_qubit(Rng &rng) {
  const auto s = haar_random_state(2, rng);
  return {s[0], s[1]};
}

inline std::vector<std::array<cplx, 2>> bloch_axis_states() {
  const double r = (1.0 / std::numbers::sqrt2);
  return {{cplx(1), cplx(0)},    {cplx(0), cplx(1)},
          {cplx(r), cplx(r)},    {cplx(r), cplx(-r)},
          {cplx(r), cplx(0, r)}, {cplx(r), cplx(0, -r)}};
}

/// Per point: mean corrected and uncorrected fidelity and the fraction of
/// trials with an F = 4 syndrome (mean syndrome probability for axis
/// averaging). Trial k at grid index e draws from seed (seed, e, k).
inline ECResult ec_sweep(const ECConfig &cfg, const ECMaps &maps) {
  cfg.validate();
  ECResult result;
  result.points.resize(cfg.epsilon_grid.size());
  parallel_for(cfg.epsilon_grid.size(), [&](std::size_t e) {
    const double eps = cfg.epsilon_grid[e];
    ECPoint pt;
    pt.epsilon = eps;
    if (cfg.averaging == Averaging::AxisStates) {
      const auto states = bloch_axis_states();
      for (const auto &q : states) {
        Rng unused(0);
        const auto corr = expected_ec_trial(q, eps, maps, cfg.lande);
        pt.corrected += corr.fidelity;
        pt.trigger_rate += corr.trigger_probability;
        pt.uncorrected += run_ec_trial(q, eps, maps, unused, false, cfg.lande).fidelity;
      }
      const double n = static_cast<double>(states.size());
      pt.corrected /= n;
      pt.uncorrected /= n;
      pt.trigger_rate /= n;
    } else {
      int triggered = 0;
      for (int k = 0; k < cfg.samples; ++k) {
        Rng rng(derive_seed(cfg.seed, e, static_cast<std::uint64_t>(k)));
        const auto q = haar_qubit(rng);
        const auto corr = run_ec_trial(q, eps, maps, rng, true, cfg.lande);
        pt.corrected += corr.fidelity;
        triggered += corr.triggered ? 1 : 0;
        pt.uncorrected += run_ec_trial(q, eps, maps, rng, false, cfg.lande).fidelity;
      }
      pt.corrected /= cfg.samples;
      pt.uncorrected /= cfg.samples;
      pt.trigger_rate = static_cast<double>(triggered) / cfg.samples;
    }
    result.points[e] = pt;
  });
  return result;
}

} // namespace unimap
