#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "latrot/core.hpp"

// Beam-set geometry: per-beam site phases, physical tilt angles, and per-site
// phases/amplitudes under ideal and perturbed amplitude profiles.

namespace latrot {

/// Addressed-site geometry: sites m = -N..N, trap spacing lambda_T/2,
/// addressing wavelength lambda_L.
struct LatticeSpec {
  int half_width;          // N
  double wavelength_ratio; // lambda_L / lambda_T
  int dims;

  LatticeSpec(int half_width_, double wavelength_ratio_ = 1.0, int dims_ = 1)
      : half_width(half_width_), wavelength_ratio(wavelength_ratio_), dims(dims_) {
    if (half_width < 0) throw std::invalid_argument("lattice half width must be >= 0");
    if (!(wavelength_ratio > 0.0)) throw std::invalid_argument("wavelength ratio must be > 0");
    if (dims != 1 && dims != 2) throw std::invalid_argument("lattice dims must be 1 or 2");
  }

  int site_count() const { return 2 * half_width + 1; }
  int beam_count() const { return half_width + 1; }

  bool contains(int m) const { return m >= -half_width && m <= half_width; }

  void require_site(int m) const {
    if (!contains(m))
      throw std::out_of_range("site index " + std::to_string(m) + " outside [-N, N], N = " +
                              std::to_string(half_width));
  }
};

/// Per-beam phase advance between adjacent sites, 2*pi*(j-1)/(N+1) for
/// j = 1..N+1, wrapped into (-pi, pi]. The wrap matters: raw angles up to
/// 2*pi*N/(N+1) would make sin(theta) > 1 spuriously in tilt_angle.
inline std::vector<double> site_phases(int half_width) {
  if (half_width < 0) throw std::invalid_argument("half width must be >= 0");
  const int n_beams = half_width + 1;
  std::vector<double> out(static_cast<std::size_t>(n_beams));
  for (int j = 1; j <= n_beams; ++j)
    out[static_cast<std::size_t>(j - 1)] = wrap_pm_pi(two_pi * (j - 1) / n_beams);
  return out;
}

/// Physical beam inclination realizing a site phase: sin(theta) = (vartheta/pi) * ratio.
inline double tilt_angle(double vartheta, double wavelength_ratio) {
  const double s = vartheta / pi * wavelength_ratio;
  if (std::abs(s) > 1.0)
    throw infeasible_geometry("site phase " + std::to_string(vartheta) +
                              " needs sin(theta) = " + std::to_string(s) +
                              ", outside [-1, 1]");
  return std::asin(s);
}

// Amplitude profiles. Uniform houses the broad-beam assumption; Explicit
// injects measured per-site ratios and is the canonical error-analysis path;
// Gaussian is illustrative only (distance from the beam axis through the
// target, m*cos(theta), in units of the waist).
struct Uniform {
  double omega0 = 1.0;
};

struct Gaussian {
  double omega0 = 1.0;
  double waist = 1.0;  // in units of the site spacing
};

struct Explicit {
  double omega0 = 1.0;
  std::map<int, double> ratio;  // m -> Omega(m)/omega0
};

using AmplitudeProfile = std::variant<Uniform, Gaussian, Explicit>;

/// One sub-beam: 1-based index, site phase, physical tilt, amplitude profile
/// and the common phase offset phi_1(0) shared by all beams at the target.
struct BeamSpec {
  int index;
  double site_phase;  // vartheta_j, in (-pi, pi]
  double tilt;        // theta_j
  AmplitudeProfile profile;
  double base_phase;  // phi_1(0)
};

/// phi_j(m) = m * vartheta_j + phi_1(0), wrapped into [0, 2*pi).
inline double phase_at(const BeamSpec& beam, int m) {
  return wrap_two_pi(m * beam.site_phase + beam.base_phase);
}

/// Omega_j(m) under the beam's profile.
inline double amplitude_at(const BeamSpec& beam, int m) {
  struct Visitor {
    const BeamSpec& beam;
    int m;
    double operator()(const Uniform& u) const { return u.omega0; }
    double operator()(const Gaussian& g) const {
      const double d = m * std::cos(beam.tilt) / g.waist;
      return g.omega0 * std::exp(-d * d);
    }
    double operator()(const Explicit& e) const {
      const auto it = e.ratio.find(m);
      if (it == e.ratio.end())
        throw std::out_of_range("explicit amplitude table has no entry for site " +
                                std::to_string(m));
      return e.omega0 * it->second;
    }
  };
  const double a = std::visit(Visitor{beam, m}, beam.profile);
  if (a < 0.0) throw std::invalid_argument("amplitudes must be >= 0");
  return a;
}

/// Build the N+1 beams for a lattice, all sharing one profile.
inline std::vector<BeamSpec> make_beams(const LatticeSpec& lattice,
                                        const AmplitudeProfile& profile = Uniform{},
                                        double base_phase = 0.0) {
  const std::vector<double> thetas = site_phases(lattice.half_width);
  std::vector<BeamSpec> beams;
  beams.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i)
    beams.push_back(BeamSpec{static_cast<int>(i) + 1, thetas[i],
                             tilt_angle(thetas[i], lattice.wavelength_ratio), profile,
                             base_phase});
  return beams;
}

/// Same, with one profile per beam (perturbation studies).
inline std::vector<BeamSpec> make_beams(const LatticeSpec& lattice,
                                        const std::vector<AmplitudeProfile>& profiles,
                                        double base_phase = 0.0) {
  if (static_cast<int>(profiles.size()) != lattice.beam_count())
    throw std::invalid_argument("need exactly N+1 per-beam profiles");
  const std::vector<double> thetas = site_phases(lattice.half_width);
  std::vector<BeamSpec> beams;
  beams.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i)
    beams.push_back(BeamSpec{static_cast<int>(i) + 1, thetas[i],
                             tilt_angle(thetas[i], lattice.wavelength_ratio), profiles[i],
                             base_phase});
  return beams;
}

}  // namespace latrot
