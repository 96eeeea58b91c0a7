#include <catch2/catch.hpp>

#include "latrot/error_model.hpp"
#include "test_helpers.hpp"

using namespace latrot;

TEST_CASE("closed-form neighbour fidelity bound", "[error-model]") {
  SECTION("perfect match leaves no residual") {
    REQUIRE(neighbor_fidelity_bound(1.0, pi / 2.0) == 1.0);
  }
  SECTION("10% mismatch on a pi-rotation stays above 0.99") {
    const double f = neighbor_fidelity_bound(0.9, pi / 2.0);
    REQUIRE(f == Approx(0.99384417029756886).epsilon(1e-12));
    REQUIRE(f > 0.99);
  }
  SECTION("4% mismatch keeps the error below 0.1%") {
    const double f = neighbor_fidelity_bound(0.96, pi / 2.0);
    REQUIRE(1.0 - f <= 1e-3);
    REQUIRE(f >= 0.999);
    REQUIRE(f == Approx(0.99901336421413578).epsilon(1e-12));
  }
  SECTION("rejects non-positive ratios") {
    REQUIRE_THROWS_AS(neighbor_fidelity_bound(0.0, pi / 2.0), std::invalid_argument);
  }
}

TEST_CASE("mismatch scenario construction", "[error-model]") {
  SECTION("worst case pins the first beam to the target amplitude") {
    const BeamSet set = mismatched_beamset(MismatchSpec(0.9));
    REQUIRE(amplitude_at(set.beam(1), 1) == 1.0);
    REQUIRE(amplitude_at(set.beam(1), 0) == 1.0);
    REQUIRE(amplitude_at(set.beam(2), 1) == Approx(0.9));
    REQUIRE(amplitude_at(set.beam(2), 0) == 1.0);
  }
  SECTION("a softer neighbour scale shrinks both outer amplitudes") {
    const BeamSet set = mismatched_beamset(MismatchSpec(0.9, false, 0.8));
    REQUIRE(amplitude_at(set.beam(1), 1) == Approx(0.8));
    REQUIRE(amplitude_at(set.beam(2), 1) == Approx(0.72));
  }
  SECTION("invalid parameters are rejected") {
    REQUIRE_THROWS_AS(MismatchSpec(-0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(MismatchSpec(0.9, false, 1.5), std::invalid_argument);
  }
}

TEST_CASE("simulated neighbour fidelity matches the closed form", "[error-model]") {
  auto gen = oracle::rng(49);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = oracle::uniform(gen, 0.5, 1.2);
    const double xi = oracle::uniform(gen, 0.0, pi);
    const RotationSpec rotation(xi, oracle::uniform(gen, 0.0, two_pi));
    for (Scheme scheme : {Scheme::interference, Scheme::sequential}) {
      const double simulated =
          simulated_neighbor_fidelity(MismatchSpec(r), rotation, scheme);
      worst = std::max(worst, std::abs(simulated - neighbor_fidelity_bound(r, xi)));
    }
  }
  REQUIRE(worst <= 1e-9);
}

TEST_CASE("the two schemes leave identical residual unitaries", "[error-model]") {
  auto gen = oracle::rng(50);
  SECTION("pi-rotation across the sampled mismatch range") {
    for (int i = 0; i <= 50; ++i) {
      const double r = 0.5 + 0.5 * i / 50.0;
      const RotationSpec rotation(pi / 2.0, 0.0);
      const auto a = neighbor_unitaries(MismatchSpec(r), rotation, Scheme::interference);
      const auto b = neighbor_unitaries(MismatchSpec(r), rotation, Scheme::sequential);
      REQUIRE(a[0].deviation_from(b[0]) <= 1e-12);
      REQUIRE(a[1].deviation_from(b[1]) <= 1e-12);
    }
  }
  SECTION("also for random rotations and phases") {
    for (int i = 0; i < 20; ++i) {
      const double r = oracle::uniform(gen, 0.5, 1.2);
      const RotationSpec rotation(oracle::uniform(gen, 0.0, pi),
                                  oracle::uniform(gen, 0.0, two_pi));
      const auto a = neighbor_unitaries(MismatchSpec(r), rotation, Scheme::interference);
      const auto b = neighbor_unitaries(MismatchSpec(r), rotation, Scheme::sequential);
      REQUIRE(a[0].deviation_from(b[0]) <= 1e-12);
      REQUIRE(a[1].deviation_from(b[1]) <= 1e-12);
    }
  }
  SECTION("the sequential pair is the interference residual rotation") {
    const double r = 0.85;
    const auto seq = neighbor_unitaries(MismatchSpec(r), RotationSpec(pi / 2.0, 0.0),
                                        Scheme::sequential);
    const Unitary2 residual = evolve_pulse(PulseParams((1.0 - r) * pi / 4.0, 0.0));
    REQUIRE(seq[0].deviation_from(residual) <= 1e-12);
    REQUIRE(seq[1].deviation_from(residual) <= 1e-12);
  }
}

TEST_CASE("fidelity sweeps", "[error-model]") {
  SECTION("a degenerate range produces the single perfect point") {
    const FidelityCurve curve = fidelity_sweep(1.0, 1.0, 11, Scheme::interference);
    REQUIRE(curve.samples.size() == 1);
    REQUIRE(curve.samples[0].fidelity == Approx(1.0).margin(1e-12));
  }
  SECTION("the 0.9..1.0 window is monotone and hits the known operating point") {
    const FidelityCurve curve = fidelity_sweep(0.9, 1.0, 11, Scheme::interference);
    REQUIRE(curve.samples.size() == 11);
    REQUIRE(curve.samples.front().ratio == Approx(0.9));
    REQUIRE(curve.samples.front().fidelity == Approx(0.99384417029756886).margin(1e-10));
    for (std::size_t i = 1; i < curve.samples.size(); ++i)
      REQUIRE(curve.samples[i].fidelity >= curve.samples[i - 1].fidelity - 1e-12);
    for (const FidelitySample& s : curve.samples) {
      REQUIRE(s.fidelity >= 0.0);
      REQUIRE(s.fidelity <= 1.0 + 1e-12);
    }
  }
  SECTION("interference and sequential sweeps coincide pointwise") {
    const FidelityCurve a = fidelity_sweep(0.9, 1.0, 11, Scheme::interference);
    const FidelityCurve b = fidelity_sweep(0.9, 1.0, 11, Scheme::sequential);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      REQUIRE(std::abs(a.samples[i].fidelity - b.samples[i].fidelity) <= 1e-12);
  }
  SECTION("every sweep point agrees with the closed form") {
    const FidelityCurve curve = fidelity_sweep(0.5, 1.0, 51, Scheme::interference);
    for (const FidelitySample& s : curve.samples)
      REQUIRE(std::abs(s.fidelity - neighbor_fidelity_bound(s.ratio, pi / 2.0)) <= 1e-9);
  }
}

TEST_CASE("scheme comparison", "[error-model]") {
  SECTION("perfect match") {
    const SchemeComparison c = compare_schemes(1.0);
    REQUIRE(c.interference == Approx(1.0).margin(1e-12));
    REQUIRE(c.sequential == Approx(1.0).margin(1e-12));
    REQUIRE(c.max_abs_diff <= 1e-12);
  }
  SECTION("10% mismatch") {
    const SchemeComparison c = compare_schemes(0.9);
    REQUIRE(c.interference == Approx(0.99384417029756886).margin(1e-10));
    REQUIRE(c.max_abs_diff <= 1e-12);
  }
  SECTION("heavy mismatch reaches cos^2(pi/8)") {
    const SchemeComparison c = compare_schemes(0.5);
    REQUIRE(c.interference == Approx(0.85355339059327376).margin(1e-10));
    REQUIRE(c.sequential == Approx(0.85355339059327376).margin(1e-10));
    REQUIRE(c.max_abs_diff <= 1e-12);
  }
}

TEST_CASE("pulse-area additivity under fluctuation averaging", "[error-model]") {
  auto gen = oracle::rng(51);
  for (int rep = 0; rep < 30; ++rep) {
    const double area = oracle::uniform(gen, 0.0, pi);
    const double phase = oracle::uniform(gen, 0.0, two_pi);
    // ten random positive slices summing to the full area
    std::array<double, 10> slices{};
    double total = 0.0;
    for (double& s : slices) {
      s = oracle::uniform(gen, 0.01, 1.0);
      total += s;
    }
    Matrix2 split = Matrix2::identity();
    for (double s : slices)
      split = evolve_pulse(PulseParams(area * s / total, phase)).matrix() * split;
    const Unitary2 whole = evolve_pulse(PulseParams(area, phase));
    REQUIRE(max_abs_diff(split, whole.matrix()) <= 1e-12);
  }
}
