#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "latrot/beams.hpp"
#include "latrot/core.hpp"
#include "latrot/interference.hpp"
#include "latrot/sequence.hpp"

// Neighbor-state disturbance under beam-amplitude mismatch at N = 1: the
// tilted second beam is slightly weaker at the outer sites, so the two drives
// no longer cancel there. Both addressing schemes leave exactly the same
// residual rotation.

namespace latrot {

/// Amplitude mismatch at the outer sites: ratio = Omega_2(+-1)/Omega_1(+-1).
/// worst_case pins Omega_1(+-1) = Omega_1(0), the largest possible residual;
/// otherwise neighbor_scale sets Omega_1(+-1)/Omega_1(0) < 1 explicitly (the
/// paper leaves that magnitude open).
struct MismatchSpec {
  double ratio;
  bool worst_case = true;
  double neighbor_scale = 1.0;

  MismatchSpec(double ratio_, bool worst_case_ = true, double neighbor_scale_ = 1.0)
      : ratio(ratio_), worst_case(worst_case_), neighbor_scale(neighbor_scale_) {
    if (!(ratio > 0.0)) throw std::invalid_argument("mismatch ratio must be > 0");
    if (!(neighbor_scale > 0.0) || neighbor_scale > 1.0)
      throw std::invalid_argument("neighbor scale must be in (0, 1]");
    if (worst_case) neighbor_scale = 1.0;
  }
};

/// The perturbed N=1 beam pair: beam 1 at full strength, beam 2 weaker by
/// `ratio` at the outer sites. Both keep amplitude 1 at the target.
inline BeamSet mismatched_beamset(const MismatchSpec& mismatch, double base_phase = 0.0) {
  const LatticeSpec lattice(1);
  const double s = mismatch.neighbor_scale;
  const Explicit beam1{1.0, {{-1, s}, {0, 1.0}, {1, s}}};
  const Explicit beam2{1.0, {{-1, s * mismatch.ratio}, {0, 1.0}, {1, s * mismatch.ratio}}};
  return BeamSet(lattice, make_beams(lattice, {beam1, beam2}, base_phase));
}

/// Worst-case probability that an outer atom keeps its initial state when the
/// target receives a rotation by xi: cos^2((1-r) * xi / 2). The residual drive
/// at m = +-1 is (1-r) Omega_0, so it accumulates half-angle (1-r) xi/2 while
/// the target accumulates xi.
inline double neighbor_fidelity_bound(double ratio, double target_xi) {
  if (!(ratio > 0.0)) throw std::invalid_argument("mismatch ratio must be > 0");
  const double residual = (1.0 - ratio) * target_xi / 2.0;
  const double c = std::cos(residual);
  return c * c;
}

/// The two outer-site unitaries (m = -1, +1) of the perturbed N=1 scenario
/// under the chosen scheme.
inline std::array<Unitary2, 2> neighbor_unitaries(const MismatchSpec& mismatch,
                                                  const RotationSpec& rotation,
                                                  Scheme scheme) {
  const BeamSet set = mismatched_beamset(mismatch);
  const std::array<PureState2, 3> initial{PureState2::basis(0), PureState2::basis(0),
                                          PureState2::basis(0)};
  const std::vector<SiteEvolution> sites =
      scheme == Scheme::interference
          ? simulate_interference(set, rotation, initial)
          : simulate_sequence(synthesize(1, rotation.xi / 2.0), set, rotation, initial);
  return {sites[0].unitary, sites[2].unitary};
}

/// Minimum over the outer sites of the worst-case survival probability,
/// computed by full simulation.
inline double simulated_neighbor_fidelity(const MismatchSpec& mismatch,
                                          const RotationSpec& rotation, Scheme scheme) {
  const std::array<Unitary2, 2> outer = neighbor_unitaries(mismatch, rotation, scheme);
  return std::min(worst_case_fidelity(outer[0]), worst_case_fidelity(outer[1]));
}

struct FidelitySample {
  double ratio;
  double fidelity;
};

struct FidelityCurve {
  std::vector<FidelitySample> samples;
};

/// Sweep the mismatch ratio for the paper's pi-rotation (xi = pi/2) and
/// report the simulated worst-case neighbor fidelity at each point.
inline FidelityCurve fidelity_sweep(double r_min, double r_max, int steps, Scheme scheme) {
  if (!(r_min > 0.0) || r_min > r_max) throw std::invalid_argument("need 0 < r_min <= r_max");
  if (steps < 2 && r_min != r_max) throw std::invalid_argument("need at least 2 sweep steps");
  const RotationSpec pi_rotation(pi / 2.0, 0.0);
  FidelityCurve curve;
  const int n = (r_min == r_max) ? 1 : steps;
  curve.samples.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = (n == 1) ? r_min : r_min + (r_max - r_min) * i / (n - 1);
    curve.samples.push_back(
        {r, simulated_neighbor_fidelity(MismatchSpec(r), pi_rotation, scheme)});
  }
  return curve;
}

/// Both schemes simulated side by side at one mismatch ratio.
struct SchemeComparison {
  double interference;
  double sequential;
  double max_abs_diff;
};

inline SchemeComparison compare_schemes(double ratio) {
  const RotationSpec pi_rotation(pi / 2.0, 0.0);
  const MismatchSpec mismatch(ratio);
  const double fi = simulated_neighbor_fidelity(mismatch, pi_rotation, Scheme::interference);
  const double fs = simulated_neighbor_fidelity(mismatch, pi_rotation, Scheme::sequential);
  return {fi, fs, std::abs(fi - fs)};
}

}  // namespace latrot
