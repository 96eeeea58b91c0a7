#include <catch2/catch.hpp>

#include "latrot/commands.hpp"
#include "latrot/scenario.hpp"
#include "test_helpers.hpp"

using namespace latrot;
using namespace latrot::cli;

namespace {

Scenario scenario_from(const char* text) { return Scenario::from_json(json::parse(text)); }

double cell(const Report& report, std::size_t row, const char* column) {
  for (std::size_t c = 0; c < report.columns.size(); ++c)
    if (report.columns[c] == column) return report.rows[row][c].get<double>();
  throw std::runtime_error(std::string("no column ") + column);
}

}  // namespace

TEST_CASE("scenario parsing", "[cli]") {
  SECTION("a minimal simulate scenario") {
    const Scenario s = scenario_from(R"({
      "name": "demo", "mode": "simulate",
      "lattice": {"N": 3}, "rotation": {"xi": 1.0, "phi": 0.5},
      "scheme": "interference"
    })");
    REQUIRE(s.name == "demo");
    REQUIRE(s.mode == Mode::simulate);
    REQUIRE(s.lattice->half_width == 3);
    REQUIRE(s.lattice->wavelength_ratio == 1.0);
    REQUIRE(s.rotation->xi == Approx(1.0));
    REQUIRE(*s.scheme == Scheme::interference);
  }
  SECTION("unknown fields are rejected everywhere") {
    REQUIRE_THROWS_AS(scenario_from(R"({"name":"x","mode":"plan","bogus":1})"),
                      scenario_error);
    REQUIRE_THROWS_AS(
        scenario_from(R"({"name":"x","mode":"plan","lattice":{"N":1,"waist":2}})"),
        scenario_error);
    REQUIRE_THROWS_AS(
        scenario_from(R"({"name":"x","mode":"plan","lattice":{"N":1},"rotation":{"xi":1,"amp":2}})"),
        scenario_error);
  }
  SECTION("mode and scheme vocabulary is closed") {
    REQUIRE_THROWS_AS(scenario_from(R"({"name":"x","mode":"walk"})"), scenario_error);
    REQUIRE_THROWS_AS(
        scenario_from(R"({"name":"x","mode":"plan","scheme":"psychic"})"), scenario_error);
  }
  SECTION("L and N must agree when both are given") {
    REQUIRE_THROWS_AS(
        scenario_from(R"({"name":"x","mode":"plan","lattice":{"N":4,"L":2}})"),
        scenario_error);
    const Scenario ok = scenario_from(R"({"name":"x","mode":"plan","lattice":{"L":2}})");
    REQUIRE(ok.lattice->half_width == 3);
  }
  SECTION("profiles parse into the right variants") {
    const Scenario g = scenario_from(
        R"({"name":"x","mode":"plan","lattice":{"N":1},"profile":{"kind":"gaussian","waist":2.0}})");
    REQUIRE(std::holds_alternative<Gaussian>(g.profile));
    const Scenario e = scenario_from(
        R"({"name":"x","mode":"plan","lattice":{"N":1},"profile":{"kind":"explicit","table":{"0":1.0,"1":0.9,"-1":0.9}}})");
    REQUIRE(std::holds_alternative<Explicit>(e.profile));
    REQUIRE(std::get<Explicit>(e.profile).ratio.at(-1) == Approx(0.9));
    REQUIRE_THROWS_AS(
        scenario_from(
            R"({"name":"x","mode":"plan","lattice":{"N":1},"profile":{"kind":"uniform","waist":1}})"),
        scenario_error);
  }
  SECTION("inline schedules parse and validate") {
    const Scenario s = scenario_from(
        R"({"name":"x","mode":"verify","schedule":{"sigma":[1,2,3,4]}})");
    REQUIRE(s.schedule_sigma == std::vector<int>{1, 2, 3, 4});
    REQUIRE_THROWS_AS(
        scenario_from(R"({"name":"x","mode":"verify","schedule":{"sigma":"abc"}})"),
        scenario_error);
  }
}

TEST_CASE("plan command", "[cli]") {
  SECTION("the two-beam plan at ratio 1") {
    const Report report = run_plan(scenario_from(
        R"({"name":"p","mode":"plan","lattice":{"N":1,"wavelength_ratio":1.0}})"));
    REQUIRE(report.rows.size() == 2);
    REQUIRE(cell(report, 0, "vartheta_rad") == 0.0);
    REQUIRE(cell(report, 0, "tilt_rad") == 0.0);
    REQUIRE(cell(report, 1, "vartheta_rad") == Approx(pi));
    REQUIRE(cell(report, 1, "tilt_rad") == Approx(pi / 2.0));
    REQUIRE(cell(report, 1, "tilt_deg") == Approx(90.0));
    REQUIRE(report.pass);
  }
  SECTION("four feasible beams at ratio 0.5") {
    const Report report = run_plan(scenario_from(
        R"({"name":"p","mode":"plan","lattice":{"N":3,"wavelength_ratio":0.5}})"));
    REQUIRE(report.rows.size() == 4);
    REQUIRE(report.pass);
  }
  SECTION("an infeasible ratio names the offending beams") {
    try {
      run_plan(scenario_from(
          R"({"name":"p","mode":"plan","lattice":{"N":3,"wavelength_ratio":2.5}})"));
      FAIL("expected infeasible_geometry");
    } catch (const infeasible_geometry& e) {
      REQUIRE(std::string(e.what()).find("beam 3") != std::string::npos);
    }
  }
}

TEST_CASE("synthesize command", "[cli]") {
  SECTION("L = 2 emits the validated reference order") {
    const Report report = run_synthesize(scenario_from(
        R"({"name":"s","mode":"synthesize","lattice":{"L":2},"rotation":{"xi":1.5707963267948966,"phi":0}})"));
    REQUIRE(report.rows.size() == 4);
    REQUIRE(report.pass);
    REQUIRE(report.schedule.has_value());
    REQUIRE((*report.schedule)["sigma"] == json::array({1, 3, 2, 4}));
    REQUIRE(cell(report, 0, "area_rad") == Approx(pi / 8.0));
    // per-site phase columns cover m = -3..3
    REQUIRE(std::find(report.columns.begin(), report.columns.end(), "phi_m-3") !=
            report.columns.end());
  }
  SECTION("L = 3 validates too") {
    const Report report = run_synthesize(
        scenario_from(R"({"name":"s","mode":"synthesize","lattice":{"L":3}})"));
    REQUIRE(report.rows.size() == 8);
    REQUIRE(report.pass);
  }
  SECTION("N + 1 must be a power of two") {
    REQUIRE_THROWS_AS(run_synthesize(scenario_from(
                          R"({"name":"s","mode":"synthesize","lattice":{"N":2}})")),
                      scenario_error);
  }
}

TEST_CASE("simulate command", "[cli]") {
  SECTION("ideal 1D interference run passes") {
    const Report report = run_simulate(scenario_from(R"({
      "name":"sim","mode":"simulate","lattice":{"N":3},
      "rotation":{"xi":0.7,"phi":0.2},"scheme":"interference"})"));
    REQUIRE(report.rows.size() == 7);
    REQUIRE(report.pass);
    REQUIRE(report.min_fidelity >= 1.0 - 1e-10);
  }
  SECTION("the mismatch run reports the expected neighbour fidelity") {
    const Report report = run_simulate(scenario_from(R"({
      "name":"sim","mode":"simulate","lattice":{"N":1},
      "rotation":{"xi":1.5707963267948966,"phi":0},"scheme":"interference",
      "mismatch":{"r":0.9}})"));
    REQUIRE(report.min_fidelity == Approx(0.99384417029756886).margin(1e-10));
    REQUIRE_FALSE(report.pass);  // residual above the default tolerance
  }
  SECTION("sequential and interference agree site by site") {
    const char* base = R"({
      "name":"sim","mode":"simulate","lattice":{"N":3},
      "rotation":{"xi":0.9,"phi":0.4},"scheme":"%s"})";
    char buf[256];
    std::snprintf(buf, sizeof(buf), base, "interference");
    const Report a = run_simulate(scenario_from(buf));
    std::snprintf(buf, sizeof(buf), base, "sequential");
    const Report b = run_simulate(scenario_from(buf));
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
      REQUIRE(std::abs(cell(a, i, "fidelity") - cell(b, i, "fidelity")) <= 1e-10);
  }
  SECTION("2D protocol over the nine-qubit patch") {
    const Report report = run_simulate(scenario_from(R"({
      "name":"sim2d","mode":"simulate","lattice":{"N":1,"dims":2},
      "rotation":{"xi":1.5707963267948966,"phi":0},"scheme":"interference"})"));
    REQUIRE(report.rows.size() == 9);
    REQUIRE(report.pass);
    REQUIRE(report.min_fidelity >= 1.0 - 1e-10);
  }
  SECTION("sequential addressing rejects widths that are not 2^L - 1") {
    REQUIRE_THROWS_AS(run_simulate(scenario_from(R"({
      "name":"sim","mode":"simulate","lattice":{"N":2},
      "rotation":{"xi":0.5,"phi":0},"scheme":"sequential"})")),
                      scenario_error);
  }
  SECTION("the single-beam single-atom edge runs clean") {
    const Report report = run_simulate(scenario_from(R"({
      "name":"sim","mode":"simulate","lattice":{"N":0},
      "rotation":{"xi":1.1,"phi":0.3},"scheme":"interference"})"));
    REQUIRE(report.rows.size() == 1);
    REQUIRE(report.pass);
  }
  SECTION("a gaussian envelope breaks the cancellation and says so") {
    // tilted beams see different perpendicular distances, so their outer
    // amplitudes no longer match and the neighbours pick up residuals
    const Report report = run_simulate(scenario_from(R"({
      "name":"sim","mode":"simulate","lattice":{"N":1},
      "rotation":{"xi":1.5707963267948966,"phi":0},"scheme":"interference",
      "profile":{"kind":"gaussian","waist":2.0}})"));
    REQUIRE_FALSE(report.pass);
    REQUIRE(report.min_fidelity < 1.0);
    REQUIRE(report.min_fidelity > 0.5);
  }
}

TEST_CASE("sweep command", "[cli]") {
  SECTION("the anchor operating points are always included") {
    const Report report = run_sweep(scenario_from(R"({
      "name":"sweep","mode":"sweep",
      "mismatch":{"r_min":0.9,"r_max":1.0,"steps":11}})"));
    REQUIRE(report.pass);
    bool saw_anchor_90 = false;
    bool saw_anchor_96 = false;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const double r = cell(report, i, "r");
      if (r == 0.9) {
        saw_anchor_90 = true;
        REQUIRE(cell(report, i, "F_interference") ==
                Approx(0.99384417029756886).margin(1e-10));
      }
      if (r == 0.96) saw_anchor_96 = true;
      REQUIRE(std::abs(cell(report, i, "F_interference") -
                       cell(report, i, "F_sequential")) <= 1e-12);
      REQUIRE(std::abs(cell(report, i, "F_interference") -
                       cell(report, i, "closed_form")) <= 1e-9);
    }
    REQUIRE(saw_anchor_90);
    REQUIRE(saw_anchor_96);
  }
  SECTION("a single-point sweep of the perfect ratio") {
    const Report report = run_sweep(scenario_from(R"({
      "name":"sweep","mode":"sweep","mismatch":{"r_min":1.0,"r_max":1.0,"steps":1}})"));
    REQUIRE(report.rows.size() == 1);
    REQUIRE(cell(report, 0, "F_interference") == Approx(1.0).margin(1e-12));
  }
  SECTION("sweeps need a range") {
    REQUIRE_THROWS_AS(
        run_sweep(scenario_from(R"({"name":"sweep","mode":"sweep"})")), scenario_error);
  }
}

TEST_CASE("verify command", "[cli]") {
  SECTION("the default suite passes") {
    Scenario s;
    s.name = "verify";
    s.mode = Mode::verify;
    s.raw = {{"name", "verify"}, {"mode", "verify"}};
    const Report report = run_verify(s);
    REQUIRE(report.pass);
    REQUIRE(report.failures.empty());
    REQUIRE(report.rows.size() >= 8);
  }
  SECTION("an injected bad permutation is caught by name") {
    const Report report = run_verify(scenario_from(
        R"({"name":"verify","mode":"verify","schedule":{"sigma":[1,2,3,4]}})"));
    REQUIRE_FALSE(report.pass);
    REQUIRE(std::find(report.failures.begin(), report.failures.end(),
                      "sequence-bruteforce") != report.failures.end());
  }
}

TEST_CASE("report rendering", "[cli]") {
  const Scenario s = scenario_from(R"({
    "name":"sim","mode":"simulate","lattice":{"N":1},
    "rotation":{"xi":0.7,"phi":0.2},"scheme":"interference"})");
  SECTION("identical runs render identically without a timestamp") {
    Scenario quiet = s;
    quiet.with_timestamp = false;
    REQUIRE(run_simulate(quiet).render(ReportFormat::csv) ==
            run_simulate(quiet).render(ReportFormat::csv));
    REQUIRE(run_simulate(quiet).render(ReportFormat::structured) ==
            run_simulate(quiet).render(ReportFormat::structured));
  }
  SECTION("csv doubles carry 17 significant digits") {
    REQUIRE(format_double(1.0 / 3.0) == "0.33333333333333331");
    REQUIRE(format_double(0.1) == "0.10000000000000001");
  }
  SECTION("the structured report embeds the scenario echo and summary") {
    Scenario quiet = s;
    quiet.with_timestamp = false;
    const json doc = run_simulate(quiet).to_json();
    REQUIRE(doc["scenario"]["name"] == "sim");
    REQUIRE(doc["summary"]["pass"] == true);
    REQUIRE(doc.contains("columns"));
    REQUIRE_FALSE(doc.contains("generated_at"));
  }
}
