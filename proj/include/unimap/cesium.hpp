#pragma once

// Spin operators and the restricted 8-level 133Cs control system: the seven
// F = 3 sublevels plus one F = 4 stretched state used as the fiducial.

#include "unimap/control.hpp"

#include <string>

namespace unimap {

/// Angular momentum matrices for spin F = two_f / 2, basis ordered
/// m = F, F-1, ..., -F.
struct SpinOperators {
  int two_f = 0;
  CMatrix fx, fy, fz;

  Eigen::Index dim() const { return two_f + 1; }
  double f() const { return 0.5 * two_f; }
};

inline SpinOperators spin_operators(int two_f) {
  if (two_f < 1)
    throw ValidationError("spin_operators: 2F + 1 must be >= 2");
  const Eigen::Index d = two_f + 1;
  const double f = 0.5 * two_f;
  CMatrix fplus = CMatrix::Zero(d, d);
  CMatrix fz = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double m = f - static_cast<double>(i);
    fz(i, i) = m;
    // F+ |m> = sqrt(F(F+1) - m(m+1)) |m+1>, and |m+1> sits at index i-1.
    if (i > 0)
      fplus(i - 1, i) = std::sqrt(f * (f + 1.0) - m * (m + 1.0));
  }
  const CMatrix fminus = fplus.adjoint();
  SpinOperators ops;
  ops.two_f = two_f;
  ops.fx = 0.5 * (fplus + fminus);
  ops.fy = cplx(0, -0.5) * (fplus - fminus);
  ops.fz = fz;
  return ops;
}

/// exp(-i (pi/2) F_y) |F, m_z = m_x>, the F_x eigenvector with eigenvalue m_x.
inline StateVector x_basis_state(int two_f, int two_m) {
  if (two_f < 1 || std::abs(two_m) > two_f || (two_f - two_m) % 2 != 0)
    throw ValidationError("x_basis_state: invalid m_x for this F");
  const auto ops = spin_operators(two_f);
  const Eigen::Index index = (two_f - two_m) / 2;
  const CMatrix rot = detail::expm_hermitian(ops.fy, std::numbers::pi / 2);
  return StateVector::normalized(rot.col(index));
}

enum class AuxState { Plus4, Minus4 };

struct CesiumParams {
  /// Bounds on the rf and microwave Rabi rates and the light shift (rad/s).
  double rf_rabi_max = kTwoPi * 25e3;
  double uw_rabi_max = kTwoPi * 25e3;
  double lightshift_max = kTwoPi * 25e3;
  double rf_detuning = kTwoPi * 2e3;
  double segment_duration = 10e-6;

  void validate() const {
    if (!(rf_rabi_max > 0 && uw_rabi_max > 0 && lightshift_max > 0))
      throw ValidationError("cesium params: all rate bounds must be > 0");
    if (!std::isfinite(rf_detuning))
      throw ValidationError("cesium params: rf_detuning must be finite");
    if (!(segment_duration > 0))
      throw ValidationError("cesium params: segment_duration must be > 0");
  }
};

inline constexpr int kCesiumDim = 8;
inline constexpr int kCesiumFiducial = 7;
inline constexpr int kF3Levels = 7;

/// Index of |3, m_z> in the restricted basis.
inline int f3_index(int m) {
  if (m < -3 || m > 3)
    throw ValidationError("F = 3 sublevel m must be in [-3, 3]");
  return 3 - m;
}

/// Eight-level rotating-frame model. Controls (all with bounds [-1, 1]):
/// rf-x, rf-y (F_x, F_y on the F = 3 block), two microwave quadratures
/// coupling the fiducial |4, +-4> to |3, +-3>, and the fiducial light shift.
/// Drift: rf_detuning * F_z on the F = 3 block.
inline ControlSystem build_restricted_system(const CesiumParams &params,
                                             AuxState aux) {
  params.validate();
  const auto f3 = spin_operators(6);
  const Eigen::Index d = kCesiumDim;
  auto embed_f3 = [&](const CMatrix &op) {
    CMatrix m = CMatrix::Zero(d, d);
    m.topLeftCorner(kF3Levels, kF3Levels) = op;
    return m;
  };
  const int e = kCesiumFiducial;
  const int g = aux == AuxState::Plus4 ? f3_index(3) : f3_index(-3);

  CMatrix uw_x = CMatrix::Zero(d, d), uw_y = CMatrix::Zero(d, d);
  uw_x(e, g) = uw_x(g, e) = 0.5;
  uw_y(e, g) = cplx(0, 0.5);
  uw_y(g, e) = cplx(0, -0.5);
  CMatrix light = CMatrix::Zero(d, d);
  light(e, e) = 1.0;

  std::vector<HermitianMatrix> controls{
      HermitianMatrix(params.rf_rabi_max * embed_f3(f3.fx)),
      HermitianMatrix(params.rf_rabi_max * embed_f3(f3.fy)),
      HermitianMatrix(params.uw_rabi_max * uw_x),
      HermitianMatrix(params.uw_rabi_max * uw_y),
      HermitianMatrix(params.lightshift_max * light)};
  std::vector<AmplitudeBounds> bounds(controls.size(), AmplitudeBounds{-1, 1});
  return ControlSystem(HermitianMatrix(params.rf_detuning * embed_f3(f3.fz)),
                       std::move(controls), std::move(bounds), e,
                       /*reversible_drift=*/true,
                       {"rf_x", "rf_y", "uw_x", "uw_y", "light_shift"});
}

/// F_z on the 8-level space with the fiducial at m_z = +-4.
inline CMatrix restricted_fz(AuxState aux) {
  CMatrix fz = CMatrix::Zero(kCesiumDim, kCesiumDim);
  fz.topLeftCorner(kF3Levels, kF3Levels) = spin_operators(6).fz;
  fz(kCesiumFiducial, kCesiumFiducial) = aux == AuxState::Plus4 ? 4.0 : -4.0;
  return fz;
}

/// Physical phase imprint: one light-shift segment at full amplitude lasting
/// angle / lightshift_max. The drift keeps running during it, so the
/// propagator is exp(-i H0 t) times the ideal imprint (they commute).
inline Waveform light_shift_segment(const CesiumParams &params, double angle) {
  params.validate();
  if (!std::isfinite(angle) || angle < 0.0)
    throw ValidationError("light shift angle must be finite and >= 0");
  Waveform w;
  if (angle == 0.0)
    return w;
  RVector amps = RVector::Zero(5);
  amps(4) = 1.0;
  w.segments.push_back({angle / params.lightshift_max, std::move(amps)});
  return w;
}

/// Named presets accepted by the CLI.
struct CesiumPreset {
  std::string name;
  CesiumParams params;
  AuxState aux;
};

inline CesiumPreset cesium_preset(const std::string &name) {
  if (name == "cs133-f3-aux4")
    return {name, CesiumParams{}, AuxState::Plus4};
  if (name == "cs133-f3-aux-4")
    return {name, CesiumParams{}, AuxState::Minus4};
  throw ValidationError("unknown preset '" + name + "'");
}

/// Generic spin-F qudit: drift beta * F_z^2, controls rate * F_x and
/// rate * F_y with bounds [-1, 1], fiducial |F, F>. Controllable for F >= 1.
inline ControlSystem spin_qudit_system(int two_f, double rate = 1.0,
                                       double beta = 1.0) {
  const auto ops = spin_operators(two_f);
  std::vector<HermitianMatrix> controls{HermitianMatrix(rate * ops.fx),
                                        HermitianMatrix(rate * ops.fy)};
  return ControlSystem(HermitianMatrix(beta * ops.fz * ops.fz),
                       std::move(controls), {{-1, 1}, {-1, 1}}, 0,
                       /*reversible_drift=*/true, {"x", "y"});
}

} // namespace unimap
