#pragma once

// Generalized Pauli operators and single-qudit Clifford generators.

#include "unimap/core.hpp"

#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace unimap {

namespace detail {

inline void require_dim(int d) {
  if (d < 2)
    throw ValidationError("gate dimension must be >= 2");
}

/// omega^k with omega = exp(2 pi i / d); k reduced mod d first.
inline cplx omega_pow(long long k, int d) {
  const long long r = ((k % d) + d) % d;
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / d);
}

inline CMatrix matrix_power(const CMatrix &m, int p) {
  CMatrix out = CMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i)
    out = m * out;
  return out;
}

} // namespace detail

/// X|j> = |j+1 mod d>
inline UnitaryMatrix pauli_X(int d) {
  detail::require_dim(d);
  CMatrix m = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    m((j + 1) % d, j) = 1.0;
  return UnitaryMatrix::unchecked(std::move(m));
}

/// Z|j> = omega^j |j>
inline UnitaryMatrix pauli_Z(int d) {
  detail::require_dim(d);
  CMatrix m = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    m(j, j) = detail::omega_pow(j, d);
  return UnitaryMatrix::unchecked(std::move(m));
}

/// Discrete Fourier transform, entries omega^{jk} / sqrt(d).
inline UnitaryMatrix dft_H(int d) {
  detail::require_dim(d);
  CMatrix m(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      m(k, j) = norm * detail::omega_pow(static_cast<long long>(j) * k, d);
  return UnitaryMatrix::unchecked(std::move(m));
}

enum class PhaseConvention {
  /// omega^{j(j-1)/2} for odd j, omega^{j^2/2} for even j (integer exponents).
  IndexParity,
  /// omega^{j(j-1)/2} for odd d, exp(i pi j^2 / d) for even d. Provided for
  /// comparison only.
  DimensionParity,
};

/// Nonlinear phase gate S.
inline UnitaryMatrix phase_S(int d,
                             PhaseConvention convention = PhaseConvention::IndexParity) {
  detail::require_dim(d);
  CMatrix m = CMatrix::Zero(d, d);
  for (long long j = 0; j < d; ++j) {
    if (convention == PhaseConvention::IndexParity) {
      const long long e = (j % 2 == 1) ? j * (j - 1) / 2 : j * j / 2;
      m(j, j) = detail::omega_pow(e, d);
    } else if (d % 2 == 1) {
      m(j, j) = detail::omega_pow(j * (j - 1) / 2, d);
    } else {
      m(j, j) = std::polar(1.0, std::numbers::pi *
                                    static_cast<double>((j * j) % (2 * d)) / d);
    }
  }
  return UnitaryMatrix::unchecked(std::move(m));
}

/// a^{-1} mod d, or nullopt when gcd(a, d) != 1.
inline std::optional<int> modular_inverse(int a, int d) {
  const int r = ((a % d) + d) % d;
  for (int x = 1; x < d; ++x)
    if ((static_cast<long long>(r) * x) % d == 1)
      return x;
  return std::nullopt;
}

/// G_a|j> = |a j mod d>, requires gcd(a, d) = 1.
inline UnitaryMatrix mult_G(int a, int d) {
  detail::require_dim(d);
  if (std::gcd(a, d) != 1)
    throw ValidationError("mult_G: gcd(" + std::to_string(a) + ", " +
                          std::to_string(d) + ") != 1");
  CMatrix m = CMatrix::Zero(d, d);
  const long long r = ((a % d) + d) % d;
  for (long long j = 0; j < d; ++j)
    m((r * j) % d, j) = 1.0;
  return UnitaryMatrix::unchecked(std::move(m));
}

enum class GateKind { X, Z, H, S, G };

struct GateSpec {
  GateKind kind = GateKind::X;
  int d = 2;
  int a = 1;
};

/// Parses the CLI gate names X, Z, H, S and G:<a>.
inline GateSpec parse_gate(const std::string &name, int d) {
  GateSpec g;
  g.d = d;
  if (name == "X")
    g.kind = GateKind::X;
  else if (name == "Z")
    g.kind = GateKind::Z;
  else if (name == "H")
    g.kind = GateKind::H;
  else if (name == "S")
    g.kind = GateKind::S;
  else if (name.rfind("G:", 0) == 0) {
    g.kind = GateKind::G;
    try {
      std::size_t used = 0;
      g.a = std::stoi(name.substr(2), &used);
      if (used != name.size() - 2)
        throw std::invalid_argument("trailing characters");
    } catch (const std::exception &) {
      throw ValidationError("gate: malformed multiplier in '" + name + "'");
    }
    if (std::gcd(g.a, d) != 1)
      throw ValidationError("gate: gcd(a, d) must be 1 for '" + name + "'");
  } else {
    throw ValidationError("gate: unknown gate name '" + name + "'");
  }
  return g;
}

inline std::string gate_name(const GateSpec &g) {
  switch (g.kind) {
  case GateKind::X: return "X";
  case GateKind::Z: return "Z";
  case GateKind::H: return "H";
  case GateKind::S: return "S";
  case GateKind::G: return "G:" + std::to_string(g.a);
  }
  return "?";
}

inline UnitaryMatrix gate_matrix(const GateSpec &g) {
  switch (g.kind) {
  case GateKind::X: return pauli_X(g.d);
  case GateKind::Z: return pauli_Z(g.d);
  case GateKind::H: return dft_H(g.d);
  case GateKind::S: return phase_S(g.d);
  case GateKind::G: return mult_G(g.a, g.d);
  }
  throw ValidationError("unknown gate kind");
}

/// W on the leading block of a `total`-dimensional space, identity elsewhere.
inline UnitaryMatrix embed_unitary(const UnitaryMatrix &w, Eigen::Index total) {
  if (total < w.dim())
    throw ValidationError("embed_unitary: target space is too small");
  CMatrix m = CMatrix::Identity(total, total);
  m.topLeftCorner(w.dim(), w.dim()) = w.matrix();
  return UnitaryMatrix::unchecked(std::move(m));
}

struct RelationCheck {
  std::string relation;
  double deviation = 0.0;
};

struct CliffordReport {
  int d = 0;
  std::vector<RelationCheck> checks;

  double max_deviation() const {
    double m = 0.0;
    for (const auto &c : checks)
      m = std::max(m, c.deviation);
    return m;
  }
  bool holds(double tolerance = 1e-12) const {
    return max_deviation() <= tolerance;
  }
};

/// Max-entry deviations of the Clifford conjugation relations; the G_a
/// relations are checked for every a coprime to d.
inline CliffordReport
verify_clifford_relations(int d,
                          PhaseConvention convention = PhaseConvention::IndexParity) {
  detail::require_dim(d);
  const CMatrix x = pauli_X(d).matrix();
  const CMatrix z = pauli_Z(d).matrix();
  const CMatrix h = dft_H(d).matrix();
  const CMatrix s = phase_S(d, convention).matrix();
  const CMatrix x_inv = x.adjoint();

  CliffordReport report;
  report.d = d;
  auto add = [&](std::string name, const CMatrix &lhs, const CMatrix &rhs) {
    report.checks.push_back({std::move(name), max_abs(lhs - rhs)});
  };
  add("H X H^dagger = Z", h * x * h.adjoint(), z);
  add("H Z H^dagger = X^-1", h * z * h.adjoint(), x_inv);
  add("S X S^dagger = X Z", s * x * s.adjoint(), x * z);
  add("S Z S^dagger = Z", s * z * s.adjoint(), z);
  double gx = 0.0, gz = 0.0;
  for (int a = 1; a < d; ++a) {
    if (std::gcd(a, d) != 1)
      continue;
    const CMatrix g = mult_G(a, d).matrix();
    const int a_inv = *modular_inverse(a, d);
    gx = std::max(gx, max_abs(g * x * g.adjoint() - detail::matrix_power(x, a)));
    gz = std::max(gz, max_abs(g * z * g.adjoint() - detail::matrix_power(z, a_inv)));
  }
  report.checks.push_back({"G_a X G_a^dagger = X^a", gx});
  report.checks.push_back({"G_a Z G_a^dagger = Z^(a^-1)", gz});
  return report;
}

} // namespace unimap
