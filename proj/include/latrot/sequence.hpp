#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "latrot/beams.hpp"
#include "latrot/core.hpp"
#include "latrot/interference.hpp"

// Sequential scheme: the same N+1 = 2^L beams applied one after another in an
// order chosen so every non-target rotation cancels pairwise and
// hierarchically, despite the steps not commuting.

namespace latrot {

/// Ordered application of the 2^L beams: sigma[k-1] is the 1-based beam index
/// used in step k, every pulse carrying the same area.
struct PulseSchedule {
  int level;               // L
  std::vector<int> sigma;  // permutation of 1..2^L
  double per_pulse_area;

  PulseSchedule(int level_, std::vector<int> sigma_, double per_pulse_area_)
      : level(level_), sigma(std::move(sigma_)), per_pulse_area(per_pulse_area_) {
    if (level < 1) throw std::invalid_argument("schedule level L must be >= 1");
    if (per_pulse_area < 0.0) throw std::invalid_argument("per-pulse area must be >= 0");
    const std::size_t n = std::size_t{1} << level;
    if (sigma.size() != n)
      throw std::invalid_argument("schedule needs exactly 2^L pulses");
    std::vector<bool> seen(n, false);
    for (int j : sigma) {
      if (j < 1 || j > static_cast<int>(n) || seen[static_cast<std::size_t>(j - 1)])
        throw std::invalid_argument("sigma must be a permutation of 1..2^L");
      seen[static_cast<std::size_t>(j - 1)] = true;
    }
  }

  /// Deduce L from the permutation size; sizes that are not a power of two
  /// are rejected (the scheme only exists for N+1 = 2^L).
  static PulseSchedule from_permutation(std::vector<int> sigma, double per_pulse_area) {
    const std::size_t n = sigma.size();
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("pulse count must be a power of two (N+1 = 2^L)");
    int level = 0;
    while ((std::size_t{1} << level) < n) ++level;
    return PulseSchedule(level, std::move(sigma), per_pulse_area);
  }

  int pulse_count() const { return static_cast<int>(sigma.size()); }

  PulseSchedule with_area(double area) const { return PulseSchedule(level, sigma, area); }
};

/// Reverse the lowest `bits` bits of x.
inline unsigned bit_reverse(unsigned x, int bits) {
  unsigned r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1u);
    x >>= 1;
  }
  return r;
}

/// Canonical ordering: sigma(k) - 1 = bit-reversal of (k-1) in L bits. This
/// groups the beams so that at every hierarchy level s the 2^s consecutive
/// groups have constant phase at |m| = 2^{L-s} and adjacent groups differ by
/// pi, which is exactly the condition validate_groups checks.
inline PulseSchedule synthesize(int level, double per_pulse_area = pi / 4.0) {
  if (level < 1) throw std::invalid_argument("synthesize needs L >= 1");
  const unsigned n = 1u << level;
  std::vector<int> sigma(n);
  for (unsigned k = 0; k < n; ++k)
    sigma[k] = static_cast<int>(bit_reverse(k, level)) + 1;
  return PulseSchedule(level, std::move(sigma), per_pulse_area);
}

/// Canonical schedule for a beam count N+1, splitting `total_area` evenly so
/// the target accumulates exactly that area. Rejects counts that are not a
/// power of two.
inline PulseSchedule synthesize_for_beam_count(int beam_count, double total_area) {
  if (beam_count < 2 || (beam_count & (beam_count - 1)) != 0)
    throw std::invalid_argument("sequential addressing needs N+1 = 2^L beams");
  int level = 0;
  while ((1 << level) < beam_count) ++level;
  return synthesize(level, total_area / beam_count);
}

/// Validation outcome. group_ok has one entry per hierarchy level s = 1..L;
/// the brute-force part reports the largest deviation of any site product
/// from its expected value.
struct ValidationReport {
  std::vector<bool> group_ok;
  bool bruteforce_ok = false;
  double max_residual = 0.0;

  bool groups_ok() const {
    return !group_ok.empty() &&
           std::all_of(group_ok.begin(), group_ok.end(), [](bool b) { return b; });
  }
};

namespace detail {

inline bool phases_equal_mod_two_pi(double a, double b, double tol = 1e-9) {
  return std::abs(std::remainder(a - b, two_pi)) <= tol;
}

}  // namespace detail

/// Hierarchical group check. For each level s = 1..L, at m = 2^{L-s}, the 2^L
/// steps split into 2^s consecutive groups of 2^{L-s} pulses; within a group
/// all phases m*vartheta_sigma(k) must agree mod 2*pi, and each odd-indexed
/// group must be followed by one shifted by exactly pi. Cancellation at these
/// m values carries to every odd multiple automatically.
inline ValidationReport validate_groups(const PulseSchedule& schedule) {
  const int n = schedule.pulse_count();
  ValidationReport report;
  report.group_ok.reserve(static_cast<std::size_t>(schedule.level));

  for (int s = 1; s <= schedule.level; ++s) {
    const int m = 1 << (schedule.level - s);
    const int group_size = 1 << (schedule.level - s);
    const int n_groups = 1 << s;
    bool ok = true;

    std::vector<double> group_phase(static_cast<std::size_t>(n_groups), 0.0);
    for (int g = 0; g < n_groups && ok; ++g) {
      const int first = g * group_size;
      const double ref = m * two_pi * (schedule.sigma[static_cast<std::size_t>(first)] - 1) / n;
      group_phase[static_cast<std::size_t>(g)] = ref;
      for (int k = first + 1; k < first + group_size; ++k) {
        const double ph = m * two_pi * (schedule.sigma[static_cast<std::size_t>(k)] - 1) / n;
        if (!detail::phases_equal_mod_two_pi(ph, ref)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      for (int g = 0; g < n_groups; g += 2) {
        const double diff =
            group_phase[static_cast<std::size_t>(g + 1)] - group_phase[static_cast<std::size_t>(g)];
        if (!detail::phases_equal_mod_two_pi(diff, pi)) {
          ok = false;
          break;
        }
      }
    }
    report.group_ok.push_back(ok);
  }
  return report;
}

/// Product oracle: multiply the actual 2x2 pulse unitaries in step order for
/// every site and compare against identity (m != 0) and against the
/// 2^L-fold single pulse (m = 0). Assumes uniform amplitudes.
inline ValidationReport verify_bruteforce(const PulseSchedule& schedule,
                                          const LatticeSpec& lattice,
                                          double base_phase = 0.0,
                                          double tolerance = simulation_tol) {
  if (lattice.half_width + 1 != schedule.pulse_count())
    throw std::invalid_argument("schedule size must equal N+1");
  const int n = schedule.pulse_count();
  const std::vector<double> thetas = site_phases(lattice.half_width);

  ValidationReport report;
  report.max_residual = 0.0;
  for (int m = -lattice.half_width; m <= lattice.half_width; ++m) {
    Matrix2 acc = Matrix2::identity();
    for (int k = 0; k < n; ++k) {
      const int j = schedule.sigma[static_cast<std::size_t>(k)];
      const double phase = m * thetas[static_cast<std::size_t>(j - 1)] + base_phase;
      acc = evolve_pulse(PulseParams(schedule.per_pulse_area, phase)).matrix() * acc;
    }
    const Matrix2 expected =
        (m == 0) ? evolve_pulse(PulseParams(schedule.per_pulse_area * n, base_phase)).matrix()
                 : Matrix2::identity();
    report.max_residual = std::max(report.max_residual, max_abs_diff(acc, expected));
  }
  report.bruteforce_ok = report.max_residual <= tolerance;
  return report;
}

/// Both validators in one report.
inline ValidationReport validate_schedule(const PulseSchedule& schedule,
                                          const LatticeSpec& lattice,
                                          double base_phase = 0.0,
                                          double tolerance = simulation_tol) {
  ValidationReport report = validate_groups(schedule);
  const ValidationReport bf = verify_bruteforce(schedule, lattice, base_phase, tolerance);
  report.bruteforce_ok = bf.bruteforce_ok;
  report.max_residual = bf.max_residual;
  return report;
}

/// Sequential evolution with the set's (possibly perturbed) amplitudes. Each
/// step k applies beam sigma(k); the pulse clock is set by the target, so the
/// step area at site m scales by Omega_j(m)/Omega_j(0). The schedule's
/// per-pulse area must equal xi / 2^L so the target accumulates xi.
inline std::vector<SiteEvolution> simulate_sequence(const PulseSchedule& schedule,
                                                    const BeamSet& set,
                                                    const RotationSpec& rotation,
                                                    std::span<const PureState2> initial) {
  if (set.lattice.half_width + 1 != schedule.pulse_count())
    throw std::invalid_argument("schedule size must equal the lattice's N+1");
  if (static_cast<int>(initial.size()) != set.lattice.site_count())
    throw std::invalid_argument("need one initial state per addressed site");
  const double expected_area = rotation.xi / schedule.pulse_count();
  if (std::abs(schedule.per_pulse_area - expected_area) > 1e-12)
    throw std::invalid_argument("per-pulse area must be xi / 2^L");

  std::vector<SiteEvolution> out;
  out.reserve(static_cast<std::size_t>(set.lattice.site_count()));
  for (int m = -set.lattice.half_width; m <= set.lattice.half_width; ++m) {
    Matrix2 acc = Matrix2::identity();
    for (int k = 1; k <= schedule.pulse_count(); ++k) {
      const BeamSpec& beam = set.beam(schedule.sigma[static_cast<std::size_t>(k - 1)]);
      const double omega_target = amplitude_at(beam, 0);
      if (omega_target == 0.0)
        throw degenerate_target("a step drives the target with zero amplitude");
      const double area = schedule.per_pulse_area * amplitude_at(beam, m) / omega_target;
      const double phase = phase_at(beam, m) + rotation.phi - beam.base_phase;
      acc = evolve_pulse(PulseParams(area, phase)).matrix() * acc;
    }
    const Unitary2 u(acc);
    const std::size_t idx = static_cast<std::size_t>(m + set.lattice.half_width);
    out.push_back(SiteEvolution{m, u, initial[idx].apply(u)});
  }
  return out;
}

/// Export record for one step of a schedule: which beam, its geometry, the
/// pulse area and the phase seen by every addressed site.
struct ScheduleRow {
  int step;               // k
  int beam;               // sigma(k)
  double vartheta;        // site phase of that beam
  double tilt;            // physical tilt angle
  double area;            // pulse area
  std::vector<double> site_phases;  // phase at m = -N..N, wrapped to [0, 2*pi)
};

inline std::vector<ScheduleRow> schedule_rows(const PulseSchedule& schedule,
                                              const LatticeSpec& lattice,
                                              double base_phase = 0.0) {
  if (lattice.half_width + 1 != schedule.pulse_count())
    throw std::invalid_argument("schedule size must equal N+1");
  const std::vector<BeamSpec> beams = make_beams(lattice, Uniform{}, base_phase);
  std::vector<ScheduleRow> rows;
  rows.reserve(static_cast<std::size_t>(schedule.pulse_count()));
  for (int k = 1; k <= schedule.pulse_count(); ++k) {
    const BeamSpec& b = beams[static_cast<std::size_t>(schedule.sigma[static_cast<std::size_t>(k - 1)] - 1)];
    ScheduleRow row{k, b.index, b.site_phase, b.tilt, schedule.per_pulse_area, {}};
    row.site_phases.reserve(static_cast<std::size_t>(lattice.site_count()));
    for (int m = -lattice.half_width; m <= lattice.half_width; ++m)
      row.site_phases.push_back(phase_at(b, m));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace latrot
