#pragma once

// Gradient-ascent search for piecewise-constant waveforms realizing a
// state-to-state map |psi_i> -> |psi_f>.

#include "unimap/control.hpp"
#include "unimap/parallel.hpp"

#include <cstdint>
#include <vector>

namespace unimap {

struct SearchConfig {
  std::size_t segment_count = 0;
  double segment_duration = 0.0;
  /// Initial ascent step in scaled amplitude units (u_k / max|bound_k|).
  double step_size = 1.0;
  double fidelity_goal = 0.99;
  int max_iterations = 5000;
  std::uint64_t seed = 1;
  int restarts = 1;
  bool line_search = true;
  /// Start from all-zero amplitudes (clamped into bounds) instead of a
  /// random seed.
  bool zero_seed = false;

  /// N_c = 2 d^2 control variables, durations given by the caller.
  static SearchConfig for_system(const ControlSystem &sys,
                                 double segment_duration) {
    SearchConfig cfg;
    const std::size_t d = static_cast<std::size_t>(sys.dimension());
    const std::size_t k = std::max<std::size_t>(1, sys.control_count());
    cfg.segment_count = (2 * d * d + k - 1) / k;
    cfg.segment_duration = segment_duration;
    return cfg;
  }

  void validate() const {
    if (segment_count == 0)
      throw ValidationError("search config: segment_count must be >= 1");
    if (!(segment_duration > 0.0) || !std::isfinite(segment_duration))
      throw ValidationError("search config: segment_duration must be > 0");
    if (!(step_size > 0.0) || !std::isfinite(step_size))
      throw ValidationError("search config: step_size must be > 0");
    if (!(fidelity_goal > 0.0 && fidelity_goal <= 1.0))
      throw ValidationError("search config: fidelity_goal must be in (0, 1]");
    if (max_iterations < 0)
      throw ValidationError("search config: max_iterations must be >= 0");
    if (restarts < 1)
      throw ValidationError("search config: restarts must be >= 1");
  }
};

/// True when N_c = K * segments >= d^2 - 1.
inline bool satisfies_control_count_bound(const ControlSystem &sys,
                                          const SearchConfig &cfg) {
  const std::size_t d = static_cast<std::size_t>(sys.dimension());
  return sys.control_count() * cfg.segment_count + 1 >= d * d;
}

struct SearchResult {
  Waveform waveform;
  double fidelity = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;
  /// Seed the winning run was started from.
  std::uint64_t seed = 0;
};

namespace detail {

/// Cached per-segment spectral data for one evaluation of the objective.
struct SegmentSpectrum {
  CMatrix vectors;
  RVector values;
  CVector phases; // exp(-i lambda tau)
};

class StatePrepProblem {
public:
  StatePrepProblem(const ControlSystem &sys, const StateVector &psi_i,
                   const StateVector &psi_f)
      : sys_(sys), psi_i_(psi_i.amplitudes()), psi_f_(psi_f.amplitudes()) {
    if (psi_i.dim() != sys.dimension() || psi_f.dim() != sys.dimension())
      throw ValidationError("state dimension does not match the system");
  }

  struct Evaluation {
    double fidelity = 0.0;
    cplx overlap;
    std::vector<SegmentSpectrum> spectra;
    std::vector<CVector> forward; // forward[s] = state before segment s
  };

  Evaluation evaluate(const Waveform &w) const {
    Evaluation ev;
    ev.spectra.reserve(w.size());
    ev.forward.reserve(w.size() + 1);
    CVector psi = psi_i_;
    for (const auto &seg : w.segments) {
      ev.forward.push_back(psi);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(sys_.generator(seg.amplitudes));
      SegmentSpectrum sp{es.eigenvectors(), es.eigenvalues(),
                         CVector(sys_.dimension())};
      for (Eigen::Index a = 0; a < sp.values.size(); ++a)
        sp.phases(a) = std::polar(1.0, -sp.values(a) * seg.duration);
      psi = sp.vectors * (sp.phases.asDiagonal() * (sp.vectors.adjoint() * psi));
      ev.spectra.push_back(std::move(sp));
    }
    ev.forward.push_back(psi);
    ev.overlap = psi_f_.dot(psi);
    ev.fidelity = std::min(1.0, std::norm(ev.overlap));
    return ev;
  }

  /// dJ/du for every segment amplitude, segment-major.
  RVector gradient(const Waveform &w, const Evaluation &ev) const {
    const std::size_t m = w.size();
    const std::size_t k = sys_.control_count();
    const Eigen::Index d = sys_.dimension();
    RVector grad(static_cast<Eigen::Index>(m * k));
    CVector chi = psi_f_;
    CMatrix kernel(d, d);
    for (std::size_t s = m; s-- > 0;) {
      const auto &sp = ev.spectra[s];
      const double tau = w.segments[s].duration;
      // Divided difference of f(x) = exp(-i x tau) in the segment eigenbasis:
      // -i tau exp(-i (a+b) tau / 2) sinc((a-b) tau / 2), stable for a ~ b.
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
          const double la = sp.values(a), lb = sp.values(b);
          const double half = 0.5 * (la - lb) * tau;
          const double sinc = std::abs(half) < 1e-8
                                  ? 1.0 - half * half / 6.0
                                  : std::sin(half) / half;
          kernel(a, b) = cplx(0, -tau) * std::polar(1.0, -0.5 * (la + lb) * tau) *
                         sinc;
        }
      const CVector x = sp.vectors.adjoint() * chi;
      const CVector y = sp.vectors.adjoint() * ev.forward[s];
      for (std::size_t c = 0; c < k; ++c) {
        const CMatrix hk =
            sp.vectors.adjoint() * sys_.controls()[c].matrix() * sp.vectors;
        const cplx d_overlap = x.dot(kernel.cwiseProduct(hk) * y);
        grad(static_cast<Eigen::Index>(s * k + c)) =
            2.0 * (std::conj(ev.overlap) * d_overlap).real();
      }
      // chi_{s-1} = U_s^dagger chi_s
      chi = sp.vectors * (sp.phases.conjugate().asDiagonal() * x);
    }
    return grad;
  }

private:
  const ControlSystem &sys_;
  CVector psi_i_;
  CVector psi_f_;
};

} // namespace detail

/// J = |<psi_f| U(T) |psi_i>|^2.
inline double objective_state_prep(const ControlSystem &sys, const Waveform &w,
                                   const StateVector &psi_i,
                                   const StateVector &psi_f) {
  validate_waveform(sys, w);
  return detail::StatePrepProblem(sys, psi_i, psi_f).evaluate(w).fidelity;
}

/// Exact dJ/du_{s,k}, flattened segment-major (index s * K + k).
inline RVector gradient_state_prep(const ControlSystem &sys, const Waveform &w,
                                   const StateVector &psi_i,
                                   const StateVector &psi_f) {
  validate_waveform(sys, w);
  detail::StatePrepProblem problem(sys, psi_i, psi_f);
  return problem.gradient(w, problem.evaluate(w));
}

/// Projected gradient ascent with Armijo backtracking from one seed.
inline SearchResult search_state_map(const ControlSystem &sys,
                                     const StateVector &psi_i,
                                     const StateVector &psi_f,
                                     const SearchConfig &cfg) {
  cfg.validate();
  const std::size_t k = sys.control_count();
  const std::size_t m = cfg.segment_count;
  const Eigen::Index n = static_cast<Eigen::Index>(m * k);
  detail::StatePrepProblem problem(sys, psi_i, psi_f);

  RVector scale(n), lo(n), hi(n);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t c = 0; c < k; ++c) {
      const auto &b = sys.bounds()[c];
      const Eigen::Index i = static_cast<Eigen::Index>(s * k + c);
      scale(i) = b.scale() > 0.0 ? b.scale() : 1.0;
      lo(i) = b.min;
      hi(i) = b.max;
    }

  RVector u(n);
  Rng rng(mix_seed(cfg.seed));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cfg.zero_seed) {
      u(i) = std::clamp(0.0, lo(i), hi(i));
    } else {
      const double mid = 0.5 * (lo(i) + hi(i));
      const double quarter = 0.25 * (hi(i) - lo(i));
      u(i) = rng.uniform(mid - quarter, mid + quarter);
    }
  }

  auto to_waveform = [&](const RVector &amps) {
    return Waveform::uniform(m, cfg.segment_duration, amps, k);
  };

  SearchResult result;
  result.seed = cfg.seed;
  Waveform w = to_waveform(u);
  auto ev = problem.evaluate(w);
  double fidelity = ev.fidelity;
  result.objective_history.push_back(fidelity);

  double step = cfg.step_size;
  int it = 0;
  while (fidelity < cfg.fidelity_goal && it < cfg.max_iterations) {
    // Ascent direction in scaled coordinates x = u / scale.
    const RVector gx = problem.gradient(w, ev).cwiseProduct(scale);
    if (gx.norm() < 1e-9)
      break;
    const RVector x = u.cwiseQuotient(scale);

    auto project = [&](double alpha) {
      RVector cand = (x + alpha * gx).cwiseProduct(scale);
      return cand.cwiseMax(lo).cwiseMin(hi).eval();
    };

    RVector u_new;
    Waveform w_new;
    detail::StatePrepProblem::Evaluation ev_new;
    if (cfg.line_search) {
      double alpha = step;
      bool accepted = false;
      while (alpha > 1e-14) {
        u_new = project(alpha);
        w_new = to_waveform(u_new);
        ev_new = problem.evaluate(w_new);
        const double predicted = gx.dot(u_new.cwiseQuotient(scale) - x);
        if (ev_new.fidelity >= fidelity + 1e-4 * predicted &&
            ev_new.fidelity >= fidelity) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted)
        break;
      // Keep halving while it still helps; plain Armijo acceptance can
      // overshoot a maximum by nearly 2x forever.
      while (alpha > 1e-14) {
        RVector u_half = project(0.5 * alpha);
        Waveform w_half = to_waveform(u_half);
        auto ev_half = problem.evaluate(w_half);
        if (ev_half.fidelity <= ev_new.fidelity)
          break;
        alpha *= 0.5;
        u_new = std::move(u_half);
        w_new = std::move(w_half);
        ev_new = std::move(ev_half);
      }
      step = 2.0 * alpha;
    } else {
      u_new = project(step);
      w_new = to_waveform(u_new);
      ev_new = problem.evaluate(w_new);
    }
    u = std::move(u_new);
    w = std::move(w_new);
    ev = std::move(ev_new);
    fidelity = ev.fidelity;
    result.objective_history.push_back(fidelity);
    ++it;
  }

  result.waveform = std::move(w);
  result.fidelity = fidelity;
  result.iterations = it;
  result.converged = fidelity >= cfg.fidelity_goal;
  return result;
}

/// Seed of restart r: restart 0 reuses cfg.seed.
inline std::uint64_t restart_seed(std::uint64_t base, int restart) {
  return restart == 0 ? base : derive_seed(base, static_cast<std::uint64_t>(restart));
}

/// Best of cfg.restarts independent searches; the first restart reaching the
/// maximum fidelity wins ties.
inline SearchResult multi_start(const ControlSystem &sys,
                                const StateVector &psi_i,
                                const StateVector &psi_f,
                                const SearchConfig &cfg) {
  cfg.validate();
  std::vector<SearchResult> runs(static_cast<std::size_t>(cfg.restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    SearchConfig local = cfg;
    local.seed = restart_seed(cfg.seed, static_cast<int>(r));
    runs[r] = search_state_map(sys, psi_i, psi_f, local);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].fidelity > runs[best].fidelity)
      best = r;
  return std::move(runs[best]);
}

} // namespace unimap
