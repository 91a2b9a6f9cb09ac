#pragma once

// Spin Wigner function on the sphere from the multipole expansion
//   W(theta, phi) = sum_{k, q} rho_kq Y_kq(theta, phi),  rho_kq = Tr(rho T_kq^dagger)
// with orthonormal spherical tensor operators T_kq.

#include "unimap/core.hpp"

#include <cmath>
#include <vector>

namespace unimap {

namespace detail {

inline double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

} // namespace detail

/// <j1 m1; j2 m2 | J M>, all arguments doubled (2j, 2m). Condon-Shortley
/// phase convention (Racah formula).
inline double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
  if (m1 + m2 != M)
    return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(M) > J)
    return 0.0;
  if (J < std::abs(j1 - j2) || J > j1 + j2)
    return 0.0;
  if ((j1 + m1) % 2 || (j2 + m2) % 2 || (J + M) % 2 || (j1 + j2 + J) % 2)
    return 0.0;
  using detail::factorial;
  // Undoubled integer combinations.
  const int a = (J + j1 - j2) / 2, b = (J - j1 + j2) / 2, c = (j1 + j2 - J) / 2;
  const int s = (j1 + j2 + J) / 2 + 1;
  const double pre =
      std::sqrt((J + 1.0) * factorial(a) * factorial(b) * factorial(c) / factorial(s)) *
      std::sqrt(factorial((J + M) / 2) * factorial((J - M) / 2) *
                factorial((j1 - m1) / 2) * factorial((j1 + m1) / 2) *
                factorial((j2 - m2) / 2) * factorial((j2 + m2) / 2));
  double sum = 0.0;
  for (int k = 0; k <= c; ++k) {
    const int d1 = c - k;
    const int d2 = (j1 - m1) / 2 - k;
    const int d3 = (j2 + m2) / 2 - k;
    const int d4 = (J - j2 + m1) / 2 + k;
    const int d5 = (J - j1 - m2) / 2 + k;
    if (d1 < 0 || d2 < 0 || d3 < 0 || d4 < 0 || d5 < 0)
      continue;
    const double term = 1.0 / (factorial(k) * factorial(d1) * factorial(d2) *
                               factorial(d3) * factorial(d4) * factorial(d5));
    sum += (k % 2 ? -term : term);
  }
  return pre * sum;
}

/// Orthonormal spherical tensor T_kq for spin F = two_f / 2 (basis m = F..-F):
/// T_kq = sqrt((2k+1)/(2F+1)) sum_m' <F m'; k q | F m' + q> |m' + q><m'|.
inline CMatrix spherical_tensor(int two_f, int k, int q) {
  const Eigen::Index d = two_f + 1;
  CMatrix t = CMatrix::Zero(d, d);
  if (k < 0 || k > two_f || std::abs(q) > k)
    return t;
  const double norm = std::sqrt((2.0 * k + 1.0) / (two_f + 1.0));
  for (Eigen::Index col = 0; col < d; ++col) {
    const int two_mp = two_f - 2 * static_cast<int>(col);
    const int two_m = two_mp + 2 * q;
    if (std::abs(two_m) > two_f)
      continue;
    const Eigen::Index row = (two_f - two_m) / 2;
    t(row, col) = norm * clebsch_gordan(two_f, two_mp, 2 * k, 2 * q, two_f, two_m);
  }
  return t;
}

/// Y_kq(theta, phi) with the Condon-Shortley phase.
inline cplx spherical_harmonic(int k, int q, double theta, double phi) {
  const int aq = std::abs(q);
  const cplx y = std::sph_legendre(static_cast<unsigned>(k),
                                   static_cast<unsigned>(aq), theta) *
                 std::polar(1.0, aq * phi);
  if (q >= 0)
    return y;
  return (aq % 2 ? -1.0 : 1.0) * std::conj(y);
}

struct WignerGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta; // pi i / (n_theta - 1), poles included
  std::vector<double> phi;   // 2 pi j / n_phi
  Eigen::MatrixXd values;    // n_theta x n_phi
};

/// Wigner function of a density matrix on one spin-F block.
inline WignerGrid wigner_grid(const CMatrix &rho, int n_theta, int n_phi) {
  if (rho.rows() != rho.cols() || rho.rows() < 2)
    throw ValidationError("wigner_grid: density matrix must be square, d >= 2");
  if (n_theta < 2 || n_phi < 1)
    throw ValidationError("wigner_grid: need n_theta >= 2 and n_phi >= 1");
  const int two_f = static_cast<int>(rho.rows()) - 1;

  struct Moment {
    int k, q;
    cplx value;
  };
  std::vector<Moment> moments;
  for (int k = 0; k <= two_f; ++k)
    for (int q = -k; q <= k; ++q) {
      const cplx r = (rho * spherical_tensor(two_f, k, q).adjoint()).trace();
      if (std::abs(r) > 1e-15)
        moments.push_back({k, q, r});
    }

  WignerGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.values.resize(n_theta, n_phi);
  for (int i = 0; i < n_theta; ++i)
    g.theta.push_back(std::numbers::pi * i / (n_theta - 1));
  for (int j = 0; j < n_phi; ++j)
    g.phi.push_back(kTwoPi * j / n_phi);

  double max_imag = 0.0;
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) {
      cplx w = 0.0;
      for (const auto &m : moments)
        w += m.value * spherical_harmonic(m.k, m.q, g.theta[i], g.phi[j]);
      g.values(i, j) = w.real();
      max_imag = std::max(max_imag, std::abs(w.imag()));
    }
  if (max_imag > 1e-10)
    throw ValidationError("wigner_grid: input is not Hermitian (imaginary part " +
                          std::to_string(max_imag) + ")");
  return g;
}

/// Wigner function of a pure state whose support lies in the spin-F block
/// starting at `block_offset`.
inline WignerGrid wigner_grid(const StateVector &state, int two_f, int block_offset,
                              int n_theta, int n_phi) {
  const Eigen::Index d = two_f + 1;
  if (block_offset < 0 || block_offset + d > state.dim())
    throw ValidationError("wigner_grid: block does not fit in the state");
  const CVector &v = state.amplitudes();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const bool inside = i >= block_offset && i < block_offset + d;
    if (!inside && std::abs(v(i)) > 1e-10)
      throw ValidationError("wigner_grid: state has support outside the spin block");
  }
  const CVector block = v.segment(block_offset, d);
  return wigner_grid(CMatrix(block * block.adjoint()), n_theta, n_phi);
}

} // namespace unimap
