#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "latrot/beams.hpp"
#include "latrot/core.hpp"
#include "latrot/interference.hpp"
#include "latrot/sequence.hpp"

// 2D addressing: a laser that would touch 2N+1 atoms in a chain touches a
// (2N+1)^2 patch in a plane. One row is moved into auxiliary levels
// (|0'>, |1'>), rotated there as a 1D problem, and moved back.

namespace latrot {

// 4-level basis order: |0>, |1>, |0'>, |1'>.
inline constexpr LevelPair hide_transition_0{0, 2};
inline constexpr LevelPair hide_transition_1{1, 3};
inline constexpr LevelPair primed_transition{2, 3};

enum class Axis2D { x, y };
enum class DriveTransition { hide, rotate_primed };

/// A (2N+1)^2 patch of 4-level atoms.
struct Lattice2D {
  int half_width;
  double wavelength_ratio;
  std::vector<PureState4> states;  // row-major over (m_y, m_x), each -N..N

  Lattice2D(int half_width_, std::vector<PureState4> states_, double wavelength_ratio_ = 1.0)
      : half_width(half_width_), wavelength_ratio(wavelength_ratio_),
        states(std::move(states_)) {
    if (half_width < 0) throw std::invalid_argument("lattice half width must be >= 0");
    const std::size_t expected = static_cast<std::size_t>(side()) * static_cast<std::size_t>(side());
    if (states.size() != expected)
      throw std::invalid_argument("a 2D patch needs (2N+1)^2 site states");
  }

  int side() const { return 2 * half_width + 1; }

  std::size_t site_index(int mx, int my) const {
    if (mx < -half_width || mx > half_width || my < -half_width || my > half_width)
      throw std::out_of_range("2D site index outside the addressed patch");
    return static_cast<std::size_t>(my + half_width) * static_cast<std::size_t>(side()) +
           static_cast<std::size_t>(mx + half_width);
  }

  const PureState4& at(int mx, int my) const { return states[site_index(mx, my)]; }

  /// All atoms in |0>.
  static Lattice2D ground(int half_width, double wavelength_ratio = 1.0) {
    const int side = 2 * half_width + 1;
    return Lattice2D(half_width,
                     std::vector<PureState4>(static_cast<std::size_t>(side * side),
                                             PureState4::basis(0)),
                     wavelength_ratio);
  }
};

/// The beams of one protocol step: interference phases vary along `axis`
/// only, the orthogonal direction sees a uniform field across the patch.
struct BeamSet2D {
  Axis2D axis;
  DriveTransition transition;
  std::vector<BeamSpec> beams;

  BeamSet2D(Axis2D axis_, DriveTransition transition_, std::vector<BeamSpec> beams_)
      : axis(axis_), transition(transition_), beams(std::move(beams_)) {}

  static BeamSet2D ideal(const Lattice2D& lattice, Axis2D axis, DriveTransition transition,
                         double base_phase) {
    const LatticeSpec line(lattice.half_width, lattice.wavelength_ratio);
    return BeamSet2D(axis, transition, make_beams(line, Uniform{}, base_phase));
  }
};

/// Simultaneous transfer pulse on both hide transitions:
/// cos(area) on the coupled levels, -i sin(area) e^{+-i phase} between each
/// unprimed level and its primed partner. At area = pi/2 it swaps
/// |0> <-> |0'| and |1> <-> |1'> up to the usual -i.
inline Unitary4 hide_pulse_unitary(double area, double phase) {
  const PulseParams p(area, phase);
  Matrix4 m = Matrix4::identity();
  const double c = std::cos(p.area);
  const complexd off = complexd(0.0, -1.0) * std::sin(p.area) * std::polar(1.0, p.phase);
  const complexd off_conj = complexd(0.0, -1.0) * std::sin(p.area) * std::polar(1.0, -p.phase);
  for (const LevelPair& t : {hide_transition_0, hide_transition_1}) {
    m(t.a, t.a) = c;
    m(t.b, t.b) = c;
    m(t.a, t.b) = off;
    m(t.b, t.a) = off_conj;
  }
  return Unitary4(m);
}

namespace detail {

inline Unitary4 step_pulse(DriveTransition transition, double area, double phase) {
  if (transition == DriveTransition::hide) return hide_pulse_unitary(area, phase);
  return evolve_pulse<4>(PulseParams(area, phase), primed_transition);
}

}  // namespace detail

/// Per-site unitaries of one addressing step. The relevant coordinate is the
/// one along set.axis; the calibration makes the axis origin accumulate
/// exactly `pulse_area` at the set's base phase.
inline std::vector<Unitary4> apply_beamset_2d(const Lattice2D& lattice, const BeamSet2D& set,
                                              Scheme scheme, double pulse_area) {
  const LatticeSpec line(lattice.half_width, lattice.wavelength_ratio);
  if (static_cast<int>(set.beams.size()) != line.beam_count())
    throw std::invalid_argument("a 2D beam set needs exactly N+1 beams");
  const BeamSet line_set(line, set.beams);

  // One unitary per coordinate value along the interference axis.
  std::vector<Unitary4> per_coordinate;
  per_coordinate.reserve(static_cast<std::size_t>(line.site_count()));

  if (scheme == Scheme::interference) {
    const complexd target_rabi = total_rabi(line_set, 0);
    if (std::abs(target_rabi) == 0.0)
      throw degenerate_target("target line sees zero total Rabi frequency");
    for (int c = -lattice.half_width; c <= lattice.half_width; ++c) {
      const complexd rabi = total_rabi(line_set, c);
      if (std::abs(rabi) == 0.0) {
        per_coordinate.push_back(Unitary4::identity());
      } else {
        const double area = pulse_area * std::abs(rabi) / std::abs(target_rabi);
        per_coordinate.push_back(detail::step_pulse(set.transition, area, std::arg(rabi)));
      }
    }
  } else {
    const PulseSchedule schedule =
        synthesize_for_beam_count(line.beam_count(), pulse_area);
    for (int c = -lattice.half_width; c <= lattice.half_width; ++c) {
      Matrix4 acc = Matrix4::identity();
      for (int k = 1; k <= schedule.pulse_count(); ++k) {
        const BeamSpec& beam = line_set.beam(schedule.sigma[static_cast<std::size_t>(k - 1)]);
        const double omega_target = amplitude_at(beam, 0);
        if (omega_target == 0.0)
          throw degenerate_target("a step drives the target line with zero amplitude");
        const double area = schedule.per_pulse_area * amplitude_at(beam, c) / omega_target;
        acc = detail::step_pulse(set.transition, area, phase_at(beam, c)).matrix() * acc;
      }
      per_coordinate.push_back(Unitary4(acc));
    }
  }

  std::vector<Unitary4> out;
  out.reserve(lattice.states.size());
  for (int my = -lattice.half_width; my <= lattice.half_width; ++my)
    for (int mx = -lattice.half_width; mx <= lattice.half_width; ++mx) {
      const int c = (set.axis == Axis2D::x) ? mx : my;
      out.push_back(per_coordinate[static_cast<std::size_t>(c + lattice.half_width)]);
    }
  return out;
}

/// Embed a qubit unitary on the (|0>, |1>) block of a 4-level atom.
inline Unitary4 embed_qubit(const Unitary2& u) {
  Matrix4 m = Matrix4::identity();
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) m(r, c) = u(r, c);
  return Unitary4(m);
}

inline double primed_population(const PureState4& psi) {
  return std::norm(psi.amplitude(2)) + std::norm(psi.amplitude(3));
}

struct SiteRecord {
  int mx;
  int my;
  double fidelity;  // |<expected|final>|^2
  double leaked;    // population left in the primed levels
};

struct ProtocolResult {
  std::vector<SiteRecord> sites;       // row-major over (m_y, m_x)
  std::vector<PureState4> final_states;
  Matrix2 target_block;                // qubit block of the net target map
  double target_block_deviation;       // vs the requested rotation
  double max_restore_deviation;        // non-target states vs initial, entrywise
  double max_leakage;
};

/// Three steps: hide the m_y = 0 row (phases vary along y), rotate the primed
/// target (phases vary along x), then undo the hide with the phase-shifted
/// inverse pulse so the round trip is exactly the identity.
inline ProtocolResult run_protocol(const Lattice2D& lattice, const RotationSpec& rotation,
                                   Scheme scheme) {
  for (const PureState4& psi : lattice.states)
    if (primed_population(psi) > unitary_tol)
      throw std::invalid_argument("atoms must start in the unprimed qubit subspace");

  const BeamSet2D hide =
      BeamSet2D::ideal(lattice, Axis2D::y, DriveTransition::hide, 0.0);
  const BeamSet2D rotate =
      BeamSet2D::ideal(lattice, Axis2D::x, DriveTransition::rotate_primed, rotation.phi);
  const BeamSet2D unhide =
      BeamSet2D::ideal(lattice, Axis2D::y, DriveTransition::hide, pi);

  const std::vector<Unitary4> u_hide = apply_beamset_2d(lattice, hide, scheme, pi / 2.0);
  const std::vector<Unitary4> u_rotate = apply_beamset_2d(lattice, rotate, scheme, rotation.xi);
  const std::vector<Unitary4> u_unhide = apply_beamset_2d(lattice, unhide, scheme, pi / 2.0);

  const Unitary2 wanted = make_rotation(rotation);
  const Unitary4 wanted_embedded = embed_qubit(wanted);

  ProtocolResult result;
  result.sites.reserve(lattice.states.size());
  result.final_states.reserve(lattice.states.size());
  result.target_block_deviation = 0.0;
  result.max_restore_deviation = 0.0;
  result.max_leakage = 0.0;

  std::size_t idx = 0;
  for (int my = -lattice.half_width; my <= lattice.half_width; ++my)
    for (int mx = -lattice.half_width; mx <= lattice.half_width; ++mx, ++idx) {
      const Unitary4 net = u_unhide[idx] * u_rotate[idx] * u_hide[idx];
      const PureState4& initial = lattice.states[idx];
      const PureState4 final_state = initial.apply(net);
      const bool is_target = (mx == 0 && my == 0);
      const PureState4 expected = is_target ? initial.apply(wanted_embedded) : initial;

      const double fid = std::norm(expected.inner(final_state));
      const double leak = primed_population(final_state);
      result.sites.push_back(SiteRecord{mx, my, fid, leak});
      result.final_states.push_back(final_state);
      result.max_leakage = std::max(result.max_leakage, leak);

      if (is_target) {
        Matrix2 block;
        for (std::size_t r = 0; r < 2; ++r)
          for (std::size_t c = 0; c < 2; ++c) block(r, c) = net(r, c);
        result.target_block = block;
        result.target_block_deviation = max_abs_diff(block, wanted.matrix());
      } else {
        result.max_restore_deviation =
            std::max(result.max_restore_deviation, final_state.max_abs_diff(initial));
      }
    }
  return result;
}

}  // namespace latrot
