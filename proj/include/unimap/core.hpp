#pragma once

// Dense complex linear algebra for small (d <= 64) quantum systems: states,
// unitaries, Hermitian generators, matrix exponentials, spectral
// decompositions of unitaries, fidelities and seeded random states.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace unimap {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown for inputs that violate a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace tol {
inline constexpr double kStateNorm = 1e-12;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kDegeneratePhase = 1e-9;
} // namespace tol

/// Largest |entry| of M.
inline double max_abs(const CMatrix &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_error(const CMatrix &u) {
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols()));
}

inline double hermiticity_error(const CMatrix &h) {
  return max_abs(h - h.adjoint());
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Unit-norm pure state of dimension d >= 2.
class StateVector {
public:
  explicit StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2)
      throw ValidationError("state dimension must be >= 2, got " +
                            std::to_string(amps_.size()));
    const double n = amps_.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > tol::kStateNorm)
      throw ValidationError("state is not normalized (norm = " +
                            std::to_string(n) + ")");
  }

  /// Normalizes `v`; rejects the zero vector.
  static StateVector normalized(const CVector &v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw ValidationError("cannot normalize a zero or non-finite vector");
    return StateVector(v / n);
  }

  static StateVector basis(Eigen::Index d, Eigen::Index k) {
    if (k < 0 || k >= d)
      throw ValidationError("basis index " + std::to_string(k) +
                            " out of range for d = " + std::to_string(d));
    CVector v = CVector::Zero(d);
    v(k) = 1.0;
    return StateVector(std::move(v));
  }

  const CVector &amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }
  cplx operator[](Eigen::Index i) const { return amps_(i); }

  /// <this|other>
  cplx inner(const StateVector &other) const {
    return amps_.dot(other.amps_);
  }

private:
  CVector amps_;
};

/// d x d matrix with U^dagger U = I.
class UnitaryMatrix {
public:
  explicit UnitaryMatrix(CMatrix m, double tolerance = tol::kUnitary)
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw ValidationError("unitary must be square and non-empty");
    const double err = unitarity_error(m_);
    if (!(err <= tolerance))
      throw ValidationError("matrix is not unitary (max |U'U - I| = " +
                            std::to_string(err) + ")");
  }

  /// Wraps `m` without the O(d^3) check; the caller guarantees unitarity
  /// (products and adjoints of unitaries).
  static UnitaryMatrix unchecked(CMatrix m) {
    UnitaryMatrix u;
    u.m_ = std::move(m);
    return u;
  }

  static UnitaryMatrix identity(Eigen::Index d) {
    return unchecked(CMatrix::Identity(d, d));
  }

  const CMatrix &matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  UnitaryMatrix adjoint() const { return unchecked(m_.adjoint()); }

  friend UnitaryMatrix operator*(const UnitaryMatrix &a,
                                 const UnitaryMatrix &b) {
    if (a.dim() != b.dim())
      throw ValidationError("unitary dimension mismatch in product");
    return unchecked(a.m_ * b.m_);
  }

  StateVector apply(const StateVector &psi) const {
    if (psi.dim() != dim())
      throw ValidationError("state/unitary dimension mismatch");
    // Renormalize away rounding so chained applications stay valid states.
    return StateVector::normalized(m_ * psi.amplitudes());
  }

private:
  UnitaryMatrix() = default;
  CMatrix m_;
};

/// Hermitian generator (angular frequency units).
class HermitianMatrix {
public:
  explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw ValidationError("Hermitian matrix must be square and non-empty");
    const double scale = std::max(1.0, max_abs(m_));
    const double err = hermiticity_error(m_);
    if (!(err <= tol::kHermitian * scale))
      throw ValidationError("matrix is not Hermitian (max |H - H'| = " +
                            std::to_string(err) + ")");
  }

  static HermitianMatrix zero(Eigen::Index d) {
    return HermitianMatrix(CMatrix::Zero(d, d));
  }

  const CMatrix &matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  HermitianMatrix operator-() const { return HermitianMatrix(-m_); }

private:
  CMatrix m_;
};

/// Eigenphases lambda_j in [0, 2pi) and orthonormal eigenvectors with
/// U = sum_j exp(-i lambda_j) |phi_j><phi_j|.
struct SpectralDecomposition {
  std::vector<double> phases;
  std::vector<StateVector> vectors;

  UnitaryMatrix reassemble() const {
    const Eigen::Index d = vectors.front().dim();
    CMatrix u = CMatrix::Zero(d, d);
    for (std::size_t j = 0; j < phases.size(); ++j) {
      const CVector &v = vectors[j].amplitudes();
      u += std::polar(1.0, -phases[j]) * (v * v.adjoint());
    }
    return UnitaryMatrix::unchecked(std::move(u));
  }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

namespace detail {

/// exp(-i H t) for a matrix the caller knows to be Hermitian.
inline CMatrix expm_hermitian(const CMatrix &h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CMatrix &v = es.eigenvectors();
  CVector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    phases(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
  return v * phases.asDiagonal() * v.adjoint();
}

/// Maps an angle into [0, 2pi).
inline double wrap_phase(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0)
    r += kTwoPi;
  if (r >= kTwoPi)
    r -= kTwoPi;
  return r;
}

inline double circular_distance(double a, double b) {
  const double diff = std::abs(wrap_phase(a) - wrap_phase(b));
  return std::min(diff, kTwoPi - diff);
}

/// Modified Gram-Schmidt (two passes) on the columns of `block`.
inline void orthonormalize_columns(CMatrix &block) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      for (Eigen::Index p = 0; p < c; ++p)
        block.col(c) -= block.col(p).dot(block.col(c)) * block.col(p);
      block.col(c).normalize();
    }
  }
}

} // namespace detail

/// exp(-i H t).
inline UnitaryMatrix mat_exp(const HermitianMatrix &h, double t) {
  if (!std::isfinite(t))
    throw ValidationError("mat_exp: time must be finite");
  return UnitaryMatrix::unchecked(detail::expm_hermitian(h.matrix(), t));
}

/// Spectral decomposition of a unitary, phases sorted ascending. Vectors
/// belonging to phases closer than 1e-9 are re-orthonormalized together.
inline SpectralDecomposition eig_unitary(const UnitaryMatrix &u) {
  if (unitarity_error(u.matrix()) > tol::kUnitary)
    throw ValidationError("eig_unitary: input is not unitary");
  const Eigen::Index d = u.dim();

  // A normal matrix has a diagonal Schur form, and the Schur vectors are
  // orthonormal even inside degenerate eigenspaces.
  Eigen::ComplexSchur<CMatrix> schur(u.matrix());
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("eig_unitary: Schur decomposition failed");
  const CMatrix &t = schur.matrixT();
  CMatrix q = schur.matrixU();

  std::vector<double> phase(d);
  for (Eigen::Index j = 0; j < d; ++j)
    phase[j] = detail::wrap_phase(-std::arg(t(j, j)));

  std::vector<Eigen::Index> order(d);
  for (Eigen::Index j = 0; j < d; ++j)
    order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return phase[a] < phase[b]; });

  CMatrix sorted(d, d);
  std::vector<double> sorted_phase(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    sorted.col(j) = q.col(order[j]);
    sorted_phase[j] = phase[order[j]];
  }

  // Cluster on the circle; the wrap-around cluster (phases near 0 and 2pi)
  // is merged into the first one.
  std::vector<int> cluster(d, 0);
  int next = 0;
  for (Eigen::Index j = 1; j < d; ++j) {
    if (sorted_phase[j] - sorted_phase[j - 1] >= tol::kDegeneratePhase)
      ++next;
    cluster[j] = next;
  }
  if (d > 1 && next > 0 &&
      detail::circular_distance(sorted_phase.front(), sorted_phase.back()) <
          tol::kDegeneratePhase) {
    const int last = cluster.back();
    for (auto &c : cluster)
      if (c == last)
        c = 0;
  }
  for (int c = 0; c <= next; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index j = 0; j < d; ++j)
      if (cluster[j] == c)
        members.push_back(j);
    if (members.size() < 2)
      continue;
    CMatrix block(d, static_cast<Eigen::Index>(members.size()));
    for (std::size_t m = 0; m < members.size(); ++m)
      block.col(m) = sorted.col(members[m]);
    detail::orthonormalize_columns(block);
    for (std::size_t m = 0; m < members.size(); ++m)
      sorted.col(members[m]) = block.col(m);
  }

  SpectralDecomposition out;
  out.phases = std::move(sorted_phase);
  out.vectors.reserve(d);
  for (Eigen::Index j = 0; j < d; ++j)
    out.vectors.push_back(StateVector::normalized(sorted.col(j)));
  return out;
}

/// |Tr(W^dagger U)| / d; insensitive to global phase.
inline double trace_fidelity(const UnitaryMatrix &w, const UnitaryMatrix &u) {
  if (w.dim() != u.dim())
    throw ValidationError("trace_fidelity: dimension mismatch");
  const cplx tr = (w.matrix().adjoint() * u.matrix()).trace();
  return std::min(1.0, std::abs(tr) / static_cast<double>(w.dim()));
}

/// |<chi|psi>|^2
inline double state_fidelity(const StateVector &psi, const StateVector &chi) {
  if (psi.dim() != chi.dim())
    throw ValidationError("state_fidelity: dimension mismatch");
  return std::min(1.0, std::norm(chi.inner(psi)));
}

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// Seeded mt19937_64 with hand-rolled uniform and Gaussian conversions.
/// The standard distributions are implementation-defined, so they are not
/// used; the same seed gives the same stream on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
      u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  /// Complex Gaussian with E|z|^2 = 1.
  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * (1.0 / std::numbers::sqrt2), im * (1.0 / std::numbers::sqrt2)};
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-distributed pure state: normalized vector of complex Gaussians.
inline StateVector haar_random_state(Eigen::Index d, Rng &rng) {
  if (d < 2)
    throw ValidationError("haar_random_state: d must be >= 2");
  CVector v(d);
  for (Eigen::Index k = 0; k < d; ++k)
    v(k) = rng.complex_normal();
  return StateVector::normalized(v);
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
inline UnitaryMatrix haar_random_unitary(Eigen::Index d, Rng &rng) {
  CMatrix g(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      g(r, c) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < d; ++c) {
    const cplx diag = rmat(c, c);
    const double a = std::abs(diag);
    if (a > 0.0)
      q.col(c) *= diag / a;
  }
  return UnitaryMatrix(std::move(q));
}

/// Random Hermitian matrix with Gaussian entries (GUE-like), scaled by `scale`.
inline HermitianMatrix random_hermitian(Eigen::Index d, Rng &rng,
                                        double scale = 1.0) {
  CMatrix a(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      a(r, c) = rng.complex_normal();
  CMatrix h = 0.5 * scale * (a + a.adjoint());
  // Exact symmetry so the strict check never trips on rounding.
  for (Eigen::Index r = 0; r < d; ++r) {
    h(r, r) = h(r, r).real();
    for (Eigen::Index c = r + 1; c < d; ++c)
      h(c, r) = std::conj(h(r, c));
  }
  return HermitianMatrix(std::move(h));
}

} // namespace unimap
