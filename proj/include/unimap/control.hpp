#pragma once

// Bilinear control systems H(u) = H0 + sum_k u_k H_k driven by piecewise
// constant waveforms.

#include "unimap/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace unimap {

struct AmplitudeBounds {
  double min = -1.0;
  double max = 1.0;

  bool contains(double u) const { return u >= min && u <= max; }
  double clamp(double u) const { return std::clamp(u, min, max); }
  /// Largest magnitude reachable; used to scale optimization variables.
  double scale() const { return std::max(std::abs(min), std::abs(max)); }
};

class ControlSystem {
public:
  ControlSystem(HermitianMatrix drift, std::vector<HermitianMatrix> controls,
                std::vector<AmplitudeBounds> bounds, int fiducial_index,
                bool reversible_drift, std::vector<std::string> names = {})
      : drift_(std::move(drift)), controls_(std::move(controls)),
        bounds_(std::move(bounds)), names_(std::move(names)),
        fiducial_(fiducial_index), reversible_drift_(reversible_drift) {
    const Eigen::Index d = drift_.dim();
    if (d < 2)
      throw ValidationError("control system dimension must be >= 2");
    if (controls_.size() != bounds_.size())
      throw ValidationError("one amplitude bound per control is required");
    for (std::size_t k = 0; k < controls_.size(); ++k) {
      if (controls_[k].dim() != d)
        throw ValidationError("control " + std::to_string(k + 1) +
                              " has the wrong dimension");
      if (!(bounds_[k].min <= bounds_[k].max))
        throw ValidationError("control " + std::to_string(k + 1) +
                              " has empty amplitude bounds");
    }
    if (fiducial_ < 0 || fiducial_ >= d)
      throw ValidationError("fiducial index " + std::to_string(fiducial_) +
                            " out of range");
    if (names_.empty())
      for (std::size_t k = 0; k < controls_.size(); ++k)
        names_.push_back("u" + std::to_string(k + 1));
    if (names_.size() != controls_.size())
      throw ValidationError("one name per control is required");
  }

  Eigen::Index dimension() const { return drift_.dim(); }
  std::size_t control_count() const { return controls_.size(); }
  const HermitianMatrix &drift() const { return drift_; }
  const std::vector<HermitianMatrix> &controls() const { return controls_; }
  const std::vector<AmplitudeBounds> &bounds() const { return bounds_; }
  const std::vector<std::string> &control_names() const { return names_; }
  int fiducial_index() const { return fiducial_; }
  bool reversible_drift() const { return reversible_drift_; }
  bool drift_is_zero() const { return max_abs(drift_.matrix()) == 0.0; }

  /// Same system with H0 -> -H0 (what reversed waveforms run on).
  ControlSystem with_negated_drift() const {
    ControlSystem out = *this;
    out.drift_ = -drift_;
    return out;
  }

  /// H0 + sum_k u_k H_k, exactly Hermitian by construction.
  CMatrix generator(const RVector &amplitudes) const {
    CMatrix h = drift_.matrix();
    for (std::size_t k = 0; k < controls_.size(); ++k)
      if (amplitudes(k) != 0.0)
        h += amplitudes(k) * controls_[k].matrix();
    return h;
  }

private:
  HermitianMatrix drift_;
  std::vector<HermitianMatrix> controls_;
  std::vector<AmplitudeBounds> bounds_;
  std::vector<std::string> names_;
  int fiducial_;
  bool reversible_drift_;
};

struct Segment {
  double duration = 0.0;
  RVector amplitudes;
};

/// Ordered piecewise-constant control sequence; segment 0 runs first.
struct Waveform {
  std::vector<Segment> segments;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }

  double total_duration() const {
    double t = 0.0;
    for (const auto &s : segments)
      t += s.duration;
    return t;
  }

  /// Number of scalar control variables N_c.
  std::size_t control_variables() const {
    return segments.empty() ? 0
                            : segments.size() * segments.front().amplitudes.size();
  }

  /// Amplitudes flattened segment-major: index = segment * K + control.
  RVector flatten() const {
    const std::size_t k = segments.empty() ? 0 : segments.front().amplitudes.size();
    RVector x(static_cast<Eigen::Index>(segments.size() * k));
    for (std::size_t s = 0; s < segments.size(); ++s)
      x.segment(static_cast<Eigen::Index>(s * k), static_cast<Eigen::Index>(k)) =
          segments[s].amplitudes;
    return x;
  }

  static Waveform uniform(std::size_t segment_count, double duration,
                          const RVector &flat, std::size_t k) {
    Waveform w;
    w.segments.reserve(segment_count);
    for (std::size_t s = 0; s < segment_count; ++s)
      w.segments.push_back(
          {duration, flat.segment(static_cast<Eigen::Index>(s * k),
                                  static_cast<Eigen::Index>(k))});
    return w;
  }

  bool operator==(const Waveform &other) const {
    if (segments.size() != other.segments.size())
      return false;
    for (std::size_t s = 0; s < segments.size(); ++s)
      if (segments[s].duration != other.segments[s].duration ||
          segments[s].amplitudes != other.segments[s].amplitudes)
        return false;
    return true;
  }
};

/// Checks durations, amplitude counts and bounds; names the first offender.
inline void validate_waveform(const ControlSystem &sys, const Waveform &w) {
  for (std::size_t s = 0; s < w.segments.size(); ++s) {
    const auto &seg = w.segments[s];
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration))
      throw ValidationError("segment " + std::to_string(s) +
                            ": duration must be positive and finite");
    if (static_cast<std::size_t>(seg.amplitudes.size()) != sys.control_count())
      throw ValidationError("segment " + std::to_string(s) + ": expected " +
                            std::to_string(sys.control_count()) +
                            " amplitudes");
    for (std::size_t k = 0; k < sys.control_count(); ++k) {
      const double u = seg.amplitudes(static_cast<Eigen::Index>(k));
      if (!std::isfinite(u) || !sys.bounds()[k].contains(u))
        throw ValidationError("segment " + std::to_string(s) + ": amplitude " +
                              std::to_string(k + 1) + " = " +
                              std::to_string(u) + " is out of bounds");
    }
  }
}

/// Phase exp(-i angle) on one fiducial basis state.
struct PhaseImprint {
  double angle = 0.0;
  int fiducial_index = 0;
};

namespace detail {

inline CMatrix propagate_unchecked(const ControlSystem &sys, const Waveform &w) {
  const Eigen::Index d = sys.dimension();
  CMatrix u = CMatrix::Identity(d, d);
  for (const auto &seg : w.segments)
    u = expm_hermitian(sys.generator(seg.amplitudes), seg.duration) * u;
  return u;
}

} // namespace detail

/// Time-ordered product of segment propagators; the last segment is
/// leftmost. An empty waveform gives the identity.
inline UnitaryMatrix propagate(const ControlSystem &sys, const Waveform &w) {
  validate_waveform(sys, w);
  return UnitaryMatrix::unchecked(detail::propagate_unchecked(sys, w));
}

/// propagate(sys, w)^dagger computed as a matrix adjoint.
inline UnitaryMatrix apply_adjoint(const ControlSystem &sys, const Waveform &w) {
  return propagate(sys, w).adjoint();
}

/// Time reversal: segments in reverse order with negated amplitudes. The
/// result, run on sys.with_negated_drift(), generates propagate(sys, w)^dagger.
inline Waveform reverse_waveform(const ControlSystem &sys, const Waveform &w) {
  if (!sys.reversible_drift() && !sys.drift_is_zero())
    throw ValidationError(
        "reverse_waveform: drift is not flagged reversible");
  validate_waveform(sys, w);
  Waveform out;
  out.segments.reserve(w.segments.size());
  for (std::size_t i = w.segments.size(); i-- > 0;) {
    const auto &seg = w.segments[i];
    RVector neg = -seg.amplitudes;
    for (std::size_t k = 0; k < sys.control_count(); ++k)
      if (!sys.bounds()[k].contains(neg(static_cast<Eigen::Index>(k))))
        throw ValidationError("reverse_waveform: negated amplitude " +
                              std::to_string(k + 1) + " of segment " +
                              std::to_string(i) + " violates its bounds");
    out.segments.push_back({seg.duration, std::move(neg)});
  }
  return out;
}

/// Diagonal unitary with exp(-i angle) at the fiducial position.
inline UnitaryMatrix phase_imprint_unitary(Eigen::Index d, const PhaseImprint &p) {
  if (!std::isfinite(p.angle))
    throw ValidationError("phase imprint angle must be finite");
  if (p.fiducial_index < 0 || p.fiducial_index >= d)
    throw ValidationError("phase imprint index " +
                          std::to_string(p.fiducial_index) + " out of range");
  CMatrix m = CMatrix::Identity(d, d);
  m(p.fiducial_index, p.fiducial_index) = std::polar(1.0, -p.angle);
  return UnitaryMatrix::unchecked(std::move(m));
}

/// Dimension of the real Lie algebra generated by {-iH0, -iH_k} under
/// nested commutators (controllability witness; d^2 - 1 or d^2 means full).
inline int lie_algebra_dimension(const std::vector<CMatrix> &generators,
                                 double tolerance = 1e-9) {
  if (generators.empty())
    return 0;
  const Eigen::Index d = generators.front().rows();
  const Eigen::Index n = 2 * d * d;
  auto to_real = [&](const CMatrix &m) {
    RVector v(n);
    for (Eigen::Index i = 0; i < d * d; ++i) {
      v(2 * i) = m.data()[i].real();
      v(2 * i + 1) = m.data()[i].imag();
    }
    return v;
  };
  std::vector<RVector> basis;
  std::vector<CMatrix> elements;
  auto try_add = [&](const CMatrix &m) {
    RVector v = to_real(m);
    const double scale = v.norm();
    if (scale == 0.0)
      return false;
    v /= scale;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto &b : basis)
        v -= b.dot(v) * b;
    const double residual = v.norm();
    if (residual < tolerance)
      return false;
    basis.push_back(v / residual);
    elements.push_back(m / scale);
    return true;
  };
  for (const auto &g : generators)
    try_add(cplx(0, -1) * g);
  // Commutators of all pairs until no new direction appears.
  std::size_t checked = 0;
  while (checked < elements.size()) {
    const std::size_t limit = elements.size();
    for (std::size_t i = checked; i < limit; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const CMatrix c = elements[i] * elements[j] - elements[j] * elements[i];
        try_add(c);
        if (static_cast<Eigen::Index>(basis.size()) == d * d)
          return static_cast<int>(basis.size());
      }
    checked = limit;
  }
  return static_cast<int>(basis.size());
}

inline int lie_algebra_dimension(const ControlSystem &sys) {
  std::vector<CMatrix> gens;
  gens.push_back(sys.drift().matrix());
  for (const auto &h : sys.controls())
    gens.push_back(h.matrix());
  return lie_algebra_dimension(gens);
}

} // namespace unimap
