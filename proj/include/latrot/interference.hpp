#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "latrot/beams.hpp"
#include "latrot/core.hpp"

// Simultaneous-beam scheme: all N+1 sub-beams interfere classically, the
// per-site sum of their Rabi frequencies drives one effective pulse.

namespace latrot {

/// The N+1 sub-beams addressing one 1D lattice patch.
struct BeamSet {
  LatticeSpec lattice;
  std::vector<BeamSpec> beams;

  BeamSet(const LatticeSpec& lattice_, std::vector<BeamSpec> beams_)
      : lattice(lattice_), beams(std::move(beams_)) {
    if (static_cast<int>(beams.size()) != lattice.beam_count())
      throw std::invalid_argument("a beam set needs exactly N+1 beams");
    for (std::size_t i = 0; i < beams.size(); ++i)
      if (beams[i].index != static_cast<int>(i) + 1)
        throw std::invalid_argument("beam indices must be 1..N+1 in order");
  }

  /// Ideal set: uniform amplitudes, phases from the root-of-unity layout.
  static BeamSet ideal(const LatticeSpec& lattice, double omega0 = 1.0,
                       double base_phase = 0.0) {
    return BeamSet(lattice, make_beams(lattice, Uniform{omega0}, base_phase));
  }

  const BeamSpec& beam(int j) const {  // 1-based
    if (j < 1 || j > static_cast<int>(beams.size()))
      throw std::out_of_range("beam index out of range");
    return beams[static_cast<std::size_t>(j - 1)];
  }

  double phase_at(int j, int m) const {
    lattice.require_site(m);
    return latrot::phase_at(beam(j), m);
  }

  double amplitude_at(int j, int m) const {
    lattice.require_site(m);
    return latrot::amplitude_at(beam(j), m);
  }
};

/// Total Rabi frequency seen by site m: sum_j e^{i phi_j(m)} Omega_j(m).
inline complexd total_rabi(const BeamSet& set, int m) {
  set.lattice.require_site(m);
  complexd sum = 0.0;
  for (const BeamSpec& b : set.beams) sum += std::polar(amplitude_at(b, m), phase_at(b, m));
  return sum;
}

/// The complex drive at one site.
struct SiteField {
  int m;
  complexd total_rabi;
};

/// The drive profile across the whole addressed patch.
inline std::vector<SiteField> field_profile(const BeamSet& set) {
  std::vector<SiteField> out;
  out.reserve(static_cast<std::size_t>(set.lattice.site_count()));
  for (int m = -set.lattice.half_width; m <= set.lattice.half_width; ++m)
    out.push_back(SiteField{m, total_rabi(set, m)});
  return out;
}

/// Residual of the cancellation identity: max over 1 <= |m| <= N of
/// |sum_j e^{i m vartheta_j}| with unit amplitudes. Each term is reduced to
/// an exact (N+1)-th root of unity first, so the report measures the identity
/// itself rather than the rounding of large phase arguments.
inline double cancellation_report(int half_width) {
  if (half_width < 1) throw std::invalid_argument("cancellation needs N >= 1");
  const int n_beams = half_width + 1;
  double worst = 0.0;
  for (int m = 1; m <= half_width; ++m) {
    complexd sum = 0.0;
    for (int j = 0; j < n_beams; ++j) {
      const int k = (m * j) % n_beams;  // e^{i m vartheta_{j+1}} = e^{2 pi i k/(N+1)}
      sum += std::polar(1.0, two_pi * k / n_beams);
    }
    worst = std::max(worst, std::abs(sum));  // m and -m give conjugate sums
  }
  return worst;
}

/// Per-site outcome of one addressing operation.
struct SiteEvolution {
  int m;
  Unitary2 unitary;
  PureState2 state;
};

/// One interfering pulse, calibrated so the target site m=0 accumulates the
/// requested rotation: per-site half-angle xi * |Omega(m)|/|Omega(0)|, per-site
/// phase arg(Omega(m)) shifted so the target phase equals phi. Sites with zero
/// drive see the identity (no drive, no evolution).
inline std::vector<SiteEvolution> simulate_interference(const BeamSet& set,
                                                        const RotationSpec& rotation,
                                                        std::span<const PureState2> initial) {
  const int n_sites = set.lattice.site_count();
  if (static_cast<int>(initial.size()) != n_sites)
    throw std::invalid_argument("need one initial state per addressed site");

  const complexd target_rabi = total_rabi(set, 0);
  if (std::abs(target_rabi) == 0.0)
    throw degenerate_target("target site sees zero total Rabi frequency");
  const double target_abs = std::abs(target_rabi);
  const double phase_shift = rotation.phi - std::arg(target_rabi);

  std::vector<SiteEvolution> out;
  out.reserve(static_cast<std::size_t>(n_sites));
  for (int m = -set.lattice.half_width; m <= set.lattice.half_width; ++m) {
    const complexd rabi = total_rabi(set, m);
    Unitary2 u = Unitary2::identity();
    if (std::abs(rabi) > 0.0) {
      const double area = rotation.xi * std::abs(rabi) / target_abs;
      u = evolve_pulse(PulseParams(area, std::arg(rabi) + phase_shift));
    }
    const std::size_t idx = static_cast<std::size_t>(m + set.lattice.half_width);
    out.push_back(SiteEvolution{m, u, initial[idx].apply(u)});
  }
  return out;
}

}  // namespace latrot
