#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "latrot/error_model.hpp"
#include "latrot/interference.hpp"
#include "latrot/protocol_2d.hpp"
#include "latrot/scenario.hpp"
#include "latrot/sequence.hpp"

// Command implementations behind the CLI. Each takes a parsed scenario and
// returns a Report; exit-code mapping happens in the executable.

namespace latrot::cli {

namespace detail {

inline double deg(double rad) { return rad * 180.0 / pi; }

inline std::string iso8601_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline void stamp(Report& report, const Scenario& scenario) {
  report.scenario_echo = scenario.raw;
  if (scenario.with_timestamp) report.generated_at = iso8601_now();
}

inline const LatticeSpec& require_lattice(const Scenario& s) {
  if (!s.lattice) throw scenario_error("this mode needs a lattice");
  return *s.lattice;
}

inline RotationSpec rotation_or_default(const Scenario& s) {
  return s.rotation ? *s.rotation : RotationSpec(pi / 2.0, 0.0);
}

inline int level_for(const LatticeSpec& lattice) {
  const int n = lattice.beam_count();
  if (n < 2 || (n & (n - 1)) != 0)
    throw scenario_error("sequential addressing needs N+1 = 2^L beams, got N+1 = " +
                         std::to_string(n));
  int level = 0;
  while ((1 << level) < n) ++level;
  return level;
}

inline PureState2 random_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::array<complexd, 2> a{complexd(gauss(rng), gauss(rng)), complexd(gauss(rng), gauss(rng))};
  double n = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
  while (n < 1e-6) {  // essentially never; keep the state well defined
    a = {complexd(gauss(rng), gauss(rng)), complexd(gauss(rng), gauss(rng))};
    n = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
  }
  return PureState2({a[0] / n, a[1] / n});
}

inline PureState4 random_qubit4(std::mt19937_64& rng) {
  const PureState2 q = random_qubit(rng);
  return PureState4({q.amplitude(0), q.amplitude(1), 0.0, 0.0});
}

/// The beams a 1D simulation runs with: the mismatch model when requested
/// (defined for N = 1), otherwise the scenario profile on every beam.
inline BeamSet beams_for(const Scenario& s, const LatticeSpec& lattice) {
  if (s.mismatch) {
    if (lattice.half_width != 1)
      throw scenario_error("the mismatch model is defined for N = 1 (3-qubit addressing)");
    return mismatched_beamset(*s.mismatch);
  }
  return BeamSet(lattice, make_beams(lattice, s.profile));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// plan: beam geometry table.
// ---------------------------------------------------------------------------

inline Report run_plan(const Scenario& scenario) {
  const LatticeSpec& lattice = detail::require_lattice(scenario);
  const std::vector<double> thetas = site_phases(lattice.half_width);

  std::string offenders;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double s = thetas[i] / pi * lattice.wavelength_ratio;
    if (std::abs(s) > 1.0)
      offenders += (offenders.empty() ? "" : ", ") + std::string("beam ") +
                   std::to_string(i + 1) + " (sin theta = " + format_double(s) + ")";
  }
  if (!offenders.empty())
    throw infeasible_geometry("unrealizable tilt for " + offenders);

  Report report;
  detail::stamp(report, scenario);
  report.columns = {"j", "vartheta_rad", "vartheta_deg", "tilt_rad", "tilt_deg"};
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double tilt = tilt_angle(thetas[i], lattice.wavelength_ratio);
    report.add_row({static_cast<int>(i) + 1, thetas[i], detail::deg(thetas[i]), tilt,
                    detail::deg(tilt)});
  }
  report.pass = true;
  return report;
}

// ---------------------------------------------------------------------------
// synthesize: ordered schedule plus validation summary.
// ---------------------------------------------------------------------------

inline Report run_synthesize(const Scenario& scenario) {
  const LatticeSpec& lattice = detail::require_lattice(scenario);
  const RotationSpec rotation = detail::rotation_or_default(scenario);
  const int level = detail::level_for(lattice);
  const double area = rotation.xi / (1 << level);

  const PulseSchedule schedule = scenario.schedule_sigma
                                     ? PulseSchedule::from_permutation(*scenario.schedule_sigma, area)
                                     : synthesize(level, area);
  const ValidationReport validation = validate_schedule(schedule, lattice, rotation.phi,
                                                        scenario.tolerance);

  Report report;
  detail::stamp(report, scenario);
  report.columns = {"k", "beam", "vartheta_rad", "tilt_rad", "area_rad"};
  for (int m = -lattice.half_width; m <= lattice.half_width; ++m)
    report.columns.push_back("phi_m" + std::to_string(m));

  for (const ScheduleRow& row : schedule_rows(schedule, lattice, rotation.phi)) {
    std::vector<json> cells{row.step, row.beam, row.vartheta, row.tilt, row.area};
    for (double p : row.site_phases) cells.push_back(p);
    report.add_row(std::move(cells));
  }

  json sched;
  sched["L"] = schedule.level;
  sched["sigma"] = schedule.sigma;
  sched["per_pulse_area"] = schedule.per_pulse_area;
  report.schedule = sched;

  report.max_residual = validation.max_residual;
  report.pass = validation.groups_ok() && validation.bruteforce_ok;
  if (!validation.groups_ok()) report.failures.push_back("sequence-groups");
  if (!validation.bruteforce_ok) report.failures.push_back("sequence-bruteforce");
  return report;
}

// ---------------------------------------------------------------------------
// simulate: per-site evolution, 1D schemes or the 2D protocol.
// ---------------------------------------------------------------------------

namespace detail {

inline Report simulate_1d(const Scenario& scenario) {
  const LatticeSpec& lattice = require_lattice(scenario);
  if (!scenario.rotation) throw scenario_error("simulate needs a rotation");
  if (!scenario.scheme) throw scenario_error("simulate needs a scheme");
  const RotationSpec rotation = *scenario.rotation;
  const BeamSet set = beams_for(scenario, lattice);

  const std::vector<PureState2> initial(static_cast<std::size_t>(lattice.site_count()),
                                        PureState2::basis(0));
  std::vector<SiteEvolution> sites;
  if (*scenario.scheme == Scheme::interference) {
    sites = simulate_interference(set, rotation, initial);
  } else {
    const int level = level_for(lattice);
    const double area = rotation.xi / (1 << level);
    const PulseSchedule schedule =
        scenario.schedule_sigma ? PulseSchedule::from_permutation(*scenario.schedule_sigma, area)
                                : synthesize(level, area);
    sites = simulate_sequence(schedule, set, rotation, initial);
  }

  Report report;
  stamp(report, scenario);
  const bool interference = *scenario.scheme == Scheme::interference;
  report.columns = interference
                       ? std::vector<std::string>{"m", "rabi_abs", "rabi_arg", "fidelity",
                                                  "deviation"}
                       : std::vector<std::string>{"m", "area_total", "fidelity", "deviation"};

  const Unitary2 wanted = make_rotation(rotation);
  for (const SiteEvolution& site : sites) {
    const Unitary2 expected = (site.m == 0) ? wanted : Unitary2::identity();
    const double deviation = site.unitary.deviation_from(expected);
    const double fidelity = worst_case_fidelity(expected.adjoint() * site.unitary);
    if (interference) {
      const complexd rabi = total_rabi(set, site.m);
      report.add_row({site.m, std::abs(rabi), std::arg(rabi), fidelity, deviation});
    } else {
      double area_total = 0.0;
      for (const BeamSpec& b : set.beams)
        area_total += rotation.xi / set.beams.size() * amplitude_at(b, site.m) /
                      amplitude_at(b, 0);
      report.add_row({site.m, area_total, fidelity, deviation});
    }
    report.max_residual = std::max(report.max_residual, deviation);
    report.min_fidelity = std::min(report.min_fidelity, fidelity);
  }
  report.pass = report.max_residual <= scenario.tolerance;
  return report;
}

inline Report simulate_2d(const Scenario& scenario) {
  const LatticeSpec& lattice = require_lattice(scenario);
  if (!scenario.rotation) throw scenario_error("simulate needs a rotation");
  if (!scenario.scheme) throw scenario_error("simulate needs a scheme");
  if (scenario.mismatch) throw scenario_error("the mismatch model is 1D only");
  if (!std::holds_alternative<Uniform>(scenario.profile))
    throw scenario_error("the 2D protocol runs with uniform beams");
  if (*scenario.scheme == Scheme::sequential) level_for(lattice);

  std::mt19937_64 rng(scenario.seed);
  std::vector<PureState4> states;
  const int side = lattice.site_count();
  states.reserve(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (int i = 0; i < side * side; ++i) states.push_back(random_qubit4(rng));
  const Lattice2D patch(lattice.half_width, std::move(states), lattice.wavelength_ratio);

  const ProtocolResult result = run_protocol(patch, *scenario.rotation, *scenario.scheme);

  Report report;
  stamp(report, scenario);
  report.columns = {"m_x", "m_y", "fidelity", "leaked"};
  for (const SiteRecord& site : result.sites) {
    report.add_row({site.mx, site.my, site.fidelity, site.leaked});
    report.min_fidelity = std::min(report.min_fidelity, site.fidelity);
  }
  report.max_residual = std::max(result.target_block_deviation, result.max_restore_deviation);
  report.pass = report.max_residual <= scenario.tolerance &&
                result.max_leakage <= 1e-20;
  return report;
}

}  // namespace detail

inline Report run_simulate(const Scenario& scenario) {
  const LatticeSpec& lattice = detail::require_lattice(scenario);
  return lattice.dims == 2 ? detail::simulate_2d(scenario) : detail::simulate_1d(scenario);
}

// ---------------------------------------------------------------------------
// sweep: mismatch fidelity curve with both schemes and the closed form.
// ---------------------------------------------------------------------------

inline Report run_sweep(const Scenario& scenario) {
  if (!scenario.sweep) throw scenario_error("sweep needs a mismatch range (r_min, r_max, steps)");
  const SweepRange& range = *scenario.sweep;
  const RotationSpec rotation = detail::rotation_or_default(scenario);

  std::set<double> points;
  const int n = (range.r_min == range.r_max) ? 1 : std::max(range.steps, 2);
  for (int i = 0; i < n; ++i)
    points.insert(n == 1 ? range.r_min
                         : range.r_min + (range.r_max - range.r_min) * i / (n - 1));
  for (double anchor : {0.9, 0.96})  // always-reported operating points
    if (anchor >= range.r_min && anchor <= range.r_max) points.insert(anchor);

  Report report;
  detail::stamp(report, scenario);
  report.columns = {"r", "F_interference", "F_sequential", "closed_form"};

  double max_scheme_diff = 0.0;
  double max_closed_diff = 0.0;
  for (double r : points) {
    const MismatchSpec mismatch(r, range.worst_case);
    const double fi = simulated_neighbor_fidelity(mismatch, rotation, Scheme::interference);
    const double fs = simulated_neighbor_fidelity(mismatch, rotation, Scheme::sequential);
    const double closed = neighbor_fidelity_bound(r, rotation.xi);
    report.add_row({r, fi, fs, closed});
    report.min_fidelity = std::min(report.min_fidelity, std::min(fi, fs));
    max_scheme_diff = std::max(max_scheme_diff, std::abs(fi - fs));
    max_closed_diff = std::max(max_closed_diff, std::abs(fi - closed));
  }
  report.max_residual = std::max(max_scheme_diff, max_closed_diff);
  // Spec-pinned agreement bounds: schemes to 1e-12, closed form to 1e-9.
  report.pass = max_scheme_diff <= 1e-12 && max_closed_diff <= 1e-9;
  return report;
}

// ---------------------------------------------------------------------------
// verify: the invariant suites, optionally against an injected schedule.
// ---------------------------------------------------------------------------

namespace detail {

struct Check {
  std::string name;
  bool ok;
  double residual;
  double millis;
};

template <typename F>
inline Check timed_check(const std::string& name, double tolerance, F&& residual_fn) {
  const auto start = std::chrono::steady_clock::now();
  double residual = 0.0;
  bool ok = true;
  try {
    residual = residual_fn();
    ok = residual <= tolerance;
  } catch (const std::exception&) {
    ok = false;
    residual = std::numeric_limits<double>::infinity();
  }
  const auto stop = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return Check{name, ok, residual, ms};
}

inline double check_cancellation() {
  double worst = 0.0;
  for (int n = 1; n <= 32; ++n) {
    worst = std::max(worst, cancellation_report(n));
    const BeamSet set = BeamSet::ideal(LatticeSpec(n));
    worst = std::max(worst, std::abs(total_rabi(set, 0) - complexd(n + 1, 0.0)));
  }
  return worst;
}

inline double check_interference_ideal(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xi_dist(0.0, pi);
  std::uniform_real_distribution<double> phi_dist(0.0, two_pi);
  double worst = 0.0;
  for (int half_width : {0, 1, 3, 7, 15}) {  // N = 0 is the single-beam edge
    const BeamSet set = BeamSet::ideal(LatticeSpec(half_width));
    const std::vector<PureState2> initial(static_cast<std::size_t>(set.lattice.site_count()),
                                          PureState2::basis(0));
    for (int rep = 0; rep < 5; ++rep) {
      const RotationSpec rotation(xi_dist(rng), phi_dist(rng));
      const Unitary2 wanted = make_rotation(rotation);
      for (const SiteEvolution& site : simulate_interference(set, rotation, initial)) {
        const Unitary2 expected = site.m == 0 ? wanted : Unitary2::identity();
        worst = std::max(worst, site.unitary.deviation_from(expected));
      }
    }
  }
  return worst;
}

inline double check_sequence_groups(const Scenario& scenario) {
  if (scenario.schedule_sigma) {
    const PulseSchedule schedule =
        PulseSchedule::from_permutation(*scenario.schedule_sigma, pi / 8.0);
    return validate_groups(schedule).groups_ok() ? 0.0 : 1.0;
  }
  for (int level = 1; level <= 5; ++level)
    if (!validate_groups(synthesize(level)).groups_ok()) return 1.0;
  return 0.0;
}

inline double check_sequence_bruteforce(const Scenario& scenario) {
  if (scenario.schedule_sigma) {
    const PulseSchedule schedule =
        PulseSchedule::from_permutation(*scenario.schedule_sigma, pi / 8.0);
    const LatticeSpec lattice(schedule.pulse_count() - 1);
    return verify_bruteforce(schedule, lattice).max_residual;
  }
  double worst = 0.0;
  for (int level = 1; level <= 5; ++level) {
    const LatticeSpec lattice((1 << level) - 1);
    for (double area : {0.1, pi / 4.0, 1.9}) {
      const PulseSchedule schedule = synthesize(level, area);
      worst = std::max(worst, verify_bruteforce(schedule, lattice).max_residual);
    }
  }
  return worst;
}

inline double check_scheme_equivalence() {
  const RotationSpec rotation(pi / 2.0, 0.0);
  double worst = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double r = 0.5 + 0.5 * i / 50.0;
    const auto a = neighbor_unitaries(MismatchSpec(r), rotation, Scheme::interference);
    const auto b = neighbor_unitaries(MismatchSpec(r), rotation, Scheme::sequential);
    worst = std::max({worst, a[0].deviation_from(b[0]), a[1].deviation_from(b[1])});
  }
  return worst;
}

inline double check_commutator(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> area_dist(0.0, pi);
  std::uniform_real_distribution<double> phase_dist(0.0, two_pi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double area = area_dist(rng);
    const PulseParams p1(area, phase_dist(rng));
    const PulseParams p2(area, phase_dist(rng));
    const CommutatorResult c = commutator_check(p1, p2);
    worst = std::max(worst, max_abs_diff(*c.closed_form, c.direct));
  }
  return worst;
}

inline double check_pulse_additivity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> area_dist(0.0, pi);
  std::uniform_real_distribution<double> phase_dist(0.0, two_pi);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double area = area_dist(rng);
    const double phase = phase_dist(rng);
    const Unitary2 whole = evolve_pulse(PulseParams(area, phase));
    Matrix2 split = Matrix2::identity();
    for (int k = 0; k < 10; ++k)
      split = evolve_pulse(PulseParams(area / 10.0, phase)).matrix() * split;
    worst = std::max(worst, max_abs_diff(whole.matrix(), split));
  }
  return worst;
}

inline double check_protocol_2d(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int half_width : {1, 3}) {
    const int side = 2 * half_width + 1;
    std::vector<PureState4> states;
    states.reserve(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
    for (int i = 0; i < side * side; ++i) states.push_back(random_qubit4(rng));
    const Lattice2D patch(half_width, std::move(states));
    const RotationSpec rotation(pi / 3.0, pi / 5.0);
    for (Scheme scheme : {Scheme::interference, Scheme::sequential}) {
      const ProtocolResult result = run_protocol(patch, rotation, scheme);
      worst = std::max({worst, result.target_block_deviation, result.max_restore_deviation});
      if (result.max_leakage > 1e-20) worst = std::max(worst, 1.0);
    }
  }
  return worst;
}

}  // namespace detail

inline Report run_verify(const Scenario& scenario) {
  using detail::timed_check;
  std::vector<detail::Check> checks;
  checks.push_back(timed_check("cancellation", 1e-12, [] { return detail::check_cancellation(); }));
  checks.push_back(timed_check("interference-ideal", simulation_tol,
                               [&] { return detail::check_interference_ideal(scenario.seed); }));
  checks.push_back(timed_check("sequence-groups", 0.5,
                               [&] { return detail::check_sequence_groups(scenario); }));
  checks.push_back(timed_check("sequence-bruteforce", simulation_tol,
                               [&] { return detail::check_sequence_bruteforce(scenario); }));
  checks.push_back(timed_check("scheme-equivalence", 1e-12,
                               [] { return detail::check_scheme_equivalence(); }));
  checks.push_back(timed_check("commutator", 1e-12,
                               [&] { return detail::check_commutator(scenario.seed); }));
  checks.push_back(timed_check("pulse-area-additivity", 1e-12,
                               [&] { return detail::check_pulse_additivity(scenario.seed); }));
  checks.push_back(timed_check("protocol-2d-roundtrip", simulation_tol,
                               [&] { return detail::check_protocol_2d(scenario.seed); }));

  Report report;
  detail::stamp(report, scenario);
  report.columns = {"check", "status", "residual", "millis"};
  for (const detail::Check& c : checks) {
    report.add_row({c.name, c.ok ? "pass" : "fail", c.residual, c.millis});
    report.max_residual = std::max(report.max_residual, c.residual);
    if (!c.ok) {
      report.pass = false;
      report.failures.push_back(c.name);
    }
  }
  return report;
}

inline Report run_scenario(const Scenario& scenario) {
  switch (scenario.mode) {
    case Mode::plan: return run_plan(scenario);
    case Mode::synthesize: return run_synthesize(scenario);
    case Mode::simulate: return run_simulate(scenario);
    case Mode::sweep: return run_sweep(scenario);
    case Mode::verify: return run_verify(scenario);
  }
  throw scenario_error("unhandled mode");
}

}  // namespace latrot::cli
