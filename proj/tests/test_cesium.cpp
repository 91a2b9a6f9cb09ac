#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace unimap;

namespace {

CMatrix commutator(const CMatrix &a, const CMatrix &b) { return a * b - b * a; }

} // namespace

TEST(SpinOperators, SpinHalfIsPauliOverTwo) {
  const auto s = spin_operators(1);
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 0.5, 0.5, 0;
  y << 0, cplx(0, -0.5), cplx(0, 0.5), 0;
  z << 0.5, 0, 0, -0.5;
  EXPECT_LE(max_abs(s.fx - x), 1e-15);
  EXPECT_LE(max_abs(s.fy - y), 1e-15);
  EXPECT_LE(max_abs(s.fz - z), 1e-15);
}

TEST(SpinOperators, CommutatorsAndCasimir) {
  for (int two_f = 1; two_f <= 9; ++two_f) {
    const auto s = spin_operators(two_f);
    const cplx i(0, 1);
    EXPECT_LE(max_abs(commutator(s.fx, s.fy) - i * s.fz), 1e-12);
    EXPECT_LE(max_abs(commutator(s.fy, s.fz) - i * s.fx), 1e-12);
    EXPECT_LE(max_abs(commutator(s.fz, s.fx) - i * s.fy), 1e-12);
    const double f = two_f / 2.0;
    const CMatrix cas = s.fx * s.fx + s.fy * s.fy + s.fz * s.fz;
    EXPECT_LE(max_abs(cas - f * (f + 1) * CMatrix::Identity(two_f + 1, two_f + 1)), 1e-12);
    for (int k = 0; k <= two_f; ++k)
      EXPECT_NEAR(s.fz(k, k).real(), f - k, 1e-15);
  }
  EXPECT_THROW(spin_operators(0), ValidationError);
}

TEST(XBasis, EigenvectorsOfFx) {
  const auto half = x_basis_state(1, 1);
  EXPECT_NEAR(std::abs(half[0]), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(std::abs(half[0] - half[1]), 0.0, 1e-12);
  const auto s = spin_operators(6);
  for (int m = -3; m <= 3; ++m) {
    const auto v = x_basis_state(6, 2 * m);
    EXPECT_LE((s.fx * v.amplitudes() - double(m) * v.amplitudes()).norm(), 1e-10);
  }
  const auto top = x_basis_state(6, 6);
  EXPECT_NEAR(std::abs(top.amplitudes().dot(s.fz * top.amplitudes())), 0.0, 1e-12);
  EXPECT_THROW(x_basis_state(6, 8), ValidationError);
  EXPECT_THROW(x_basis_state(6, 1), ValidationError);
}

TEST(RestrictedSystem, ShapeAndControls) {
  for (auto aux : {AuxState::Plus4, AuxState::Minus4}) {
    const auto sys = build_restricted_system(CesiumParams{}, aux);
    EXPECT_EQ(sys.dimension(), 8);
    EXPECT_EQ(sys.control_count(), 5u);
    EXPECT_EQ(sys.fiducial_index(), 7);
    for (const auto &h : sys.controls())
      EXPECT_LE(hermiticity_error(h.matrix()), 0.0);
    // microwaves couple the fiducial to the matching stretched state only
    const int g = aux == AuxState::Plus4 ? 0 : 6;
    const CMatrix &uw = sys.controls()[2].matrix();
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        const bool coupled = (r == 7 && c == g) || (r == g && c == 7);
        EXPECT_EQ(std::abs(uw(r, c)) > 0, coupled);
      }
  }
}

TEST(RestrictedSystem, FullyControllable) {
  const auto sys = build_restricted_system(CesiumParams{}, AuxState::Plus4);
  EXPECT_GE(lie_algebra_dimension(sys), 63);
}

TEST(RestrictedSystem, RfNeverPopulatesFiducial) {
  Rng rng(61);
  const auto sys = build_restricted_system(CesiumParams{}, AuxState::Plus4);
  auto w = oracle::random_waveform(20, 5, 1e-5, 1.0, rng);
  for (auto &s : w.segments)
    s.amplitudes(2) = s.amplitudes(3) = 0.0;
  const CMatrix u = propagate(sys, w).matrix();
  for (int k = 0; k < 7; ++k)
    EXPECT_LE(std::abs(u(7, k)), 1e-12);
}

TEST(RestrictedSystem, MicrowavesIgnoreUncoupledLevels) {
  const auto sys = build_restricted_system(CesiumParams{}, AuxState::Plus4);
  Waveform w;
  RVector amps = RVector::Zero(5);
  amps(2) = 0.7;
  amps(3) = -0.4;
  w.segments.push_back({3e-5, amps});
  CesiumParams quiet;
  quiet.rf_detuning = 0.0;
  const CMatrix u = propagate(build_restricted_system(quiet, AuxState::Plus4), w).matrix();
  for (int k = 1; k < 7; ++k) {
    EXPECT_NEAR(std::abs(u(k, k) - 1.0), 0.0, 1e-12);
    EXPECT_LE(u.row(k).norm() - std::abs(u(k, k)), 1e-12);
  }
}

TEST(RestrictedSystem, LightShiftSegmentImprintsPhase) {
  CesiumParams p;
  const double lambda = 2.2;
  const auto w = light_shift_segment(p, lambda);
  ASSERT_EQ(w.size(), 1u);
  const auto imprint = phase_imprint_unitary(8, {lambda, 7}).matrix();
  // Without detuning the segment is exactly the imprint.
  CesiumParams quiet = p;
  quiet.rf_detuning = 0.0;
  EXPECT_LE(max_abs(propagate(build_restricted_system(quiet, AuxState::Plus4), w).matrix() -
                    imprint),
            1e-10);
  // With detuning the drift factor rides along and commutes with it.
  const auto sys = build_restricted_system(p, AuxState::Plus4);
  const CMatrix drift = oracle::expm_iht(sys.drift().matrix(), w.segments[0].duration);
  EXPECT_LE(max_abs(propagate(sys, w).matrix() - drift * imprint), 1e-10);
  EXPECT_TRUE(light_shift_segment(p, 0.0).empty());
}

TEST(RestrictedSystem, ParamsAndPresets) {
  CesiumParams bad;
  bad.uw_rabi_max = 0.0;
  EXPECT_THROW(build_restricted_system(bad, AuxState::Plus4), ValidationError);
  EXPECT_EQ(cesium_preset("cs133-f3-aux4").aux, AuxState::Plus4);
  EXPECT_EQ(cesium_preset("cs133-f3-aux-4").aux, AuxState::Minus4);
  EXPECT_THROW(cesium_preset("rubidium"), ValidationError);
  const auto fz = restricted_fz(AuxState::Minus4);
  EXPECT_EQ(fz(7, 7).real(), -4.0);
  EXPECT_EQ(fz(0, 0).real(), 3.0);
}

TEST(SpinQudit, ControllableForSmallSpins) {
  for (int two_f : {2, 3, 7})
    EXPECT_GE(lie_algebra_dimension(spin_qudit_system(two_f)),
              (two_f + 1) * (two_f + 1) - 1);
}
