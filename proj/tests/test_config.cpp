#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "microtrap/config.hpp"
#include "microtrap/constants.hpp"

using namespace microtrap;

namespace {

const char* kFullConfig = R"(# full scenario
[species]
name = Rb85

[trap]
power_mW = 50
waist_um = 15
detuning_nm = 2

[beam]
power_mW = 200
waist_um = 300
center_x_um = 10

[lens_array]
pitch_um = 125
lens_diameter_um = 100
focal_length_um = 625
rows = 2
cols = 3
kind = diffractive

[relay]
focal_length_1_mm = 80
focal_length_2_mm = 20

[array]
detuning_nm = 2
min_depth_uK = 50
quad_order = 24
source = dual
dual_angle_mrad = 8

[addressing]
target_site = 1
rabi_1_MHz = 10
rabi_2_MHz = 10
single_photon_detuning_GHz = 10
duration_us = 100

[pulse.2]
target_site = 3
rabi_1_MHz = 5
rabi_2_MHz = 5
single_photon_detuning_GHz = 10
duration_us = 50
phase_rad = 1.5

[pulse.1]
target_site = 0
rabi_1_MHz = 10
rabi_2_MHz = 10
single_photon_detuning_GHz = 10
duration_us = 100

[schedule]
samples = 0:20, 5:2, 15:2, 20:20
hold_separation_um = 2
hold_duration_ms = 10

[montecarlo]
seed = 42
atom_count = 1000
cloud_temperature_mK = 0.14
cloud_radius_um = 20
background_lifetime_ms = 166
duration_ms = 500
sample_count = 11

[readout]
na = 0.5
scatter_count = 10000

[output]
directory = /tmp/microtrap-out
)";

}  // namespace

TEST_CASE("full scenario parses with unit conversion at the boundary") {
    const Scenario s = parse_scenario_text(kFullConfig);

    CHECK(s.species.name == "Rb85");
    REQUIRE(s.trap.has_value());
    CHECK(s.trap->power == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(s.trap->waist == doctest::Approx(15e-6).epsilon(1e-15));
    CHECK(s.trap->wavelength_offset == doctest::Approx(2e-9).epsilon(1e-15));

    REQUIRE(s.beam.has_value());
    CHECK(s.beam->power == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(s.beam->center_x == doctest::Approx(10e-6).epsilon(1e-15));
    CHECK(s.beam->center_y == 0.0);

    REQUIRE(s.lens_array.has_value());
    CHECK(s.lens_array->pitch == doctest::Approx(125e-6).epsilon(1e-15));
    CHECK(s.lens_array->rows == 2);
    CHECK(s.lens_array->cols == 3);
    CHECK(s.lens_array->kind == LensKind::diffractive);

    REQUIRE(s.relay.has_value());
    CHECK(s.relay->focal_length_1 == doctest::Approx(80e-3).epsilon(1e-15));

    REQUIRE(s.array.has_value());
    CHECK(s.array->min_depth ==
          doctest::Approx(50e-6 * constants::boltzmann).epsilon(1e-12));
    CHECK(s.array->quad_order == 24);
    CHECK(s.array->source == SourceChoice::dual_beam);
    CHECK(s.array->dual_angle == doctest::Approx(8e-3).epsilon(1e-15));
    CHECK(s.array->illumination == Illumination::gaussian);

    REQUIRE(s.addressing.has_value());
    CHECK(s.addressing->target_site == 1);
    CHECK(s.addressing->rabi_1 == doctest::Approx(constants::two_pi * 1e7).epsilon(1e-15));
    CHECK(s.addressing->single_photon_detuning ==
          doctest::Approx(constants::two_pi * 1e10).epsilon(1e-15));
    CHECK(s.addressing->duration == doctest::Approx(100e-6).epsilon(1e-15));
    CHECK(s.addressing->beam_waist_at_plane == doctest::Approx(5e-6).epsilon(1e-15));
    CHECK(s.addressing->phase == 0.0);

    // [pulse.N] sections apply in index order, not file order.
    REQUIRE(s.pulses.size() == 2);
    CHECK(s.pulses[0].target_site == 0);
    CHECK(s.pulses[1].target_site == 3);
    CHECK(s.pulses[1].phase == doctest::Approx(1.5).epsilon(1e-15));

    REQUIRE(s.schedule.has_value());
    REQUIRE(s.schedule->samples.size() == 4);
    CHECK(s.schedule->samples[1].first == doctest::Approx(5e-3).epsilon(1e-15));
    CHECK(s.schedule->samples[1].second == doctest::Approx(2e-3).epsilon(1e-15));
    CHECK(s.schedule->hold_separation == doctest::Approx(2e-6).epsilon(1e-15));

    REQUIRE(s.montecarlo.has_value());
    CHECK(s.montecarlo->seed == 42);
    CHECK(s.montecarlo->background_loss_rate == doctest::Approx(1.0 / 0.166).epsilon(1e-12));
    CHECK(s.montecarlo->duration == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(s.montecarlo->sample_times.size() == 11);
    CHECK(s.montecarlo->sample_times.front() == 0.0);
    CHECK(s.montecarlo->sample_times.back() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.montecarlo->time_step == doctest::Approx(1e-3).epsilon(1e-15));

    REQUIRE(s.readout.has_value());
    CHECK(s.readout->na == 0.5);
    CHECK(s.readout->scatter_count == 10000);
    CHECK(s.output.directory == "/tmp/microtrap-out");
}

TEST_CASE("defaults for an omitted species section") {
    const Scenario s = parse_scenario_text("[trap]\npower_mW = 1\nwaist_um = 2\ndetuning_nm = 1\n");
    CHECK(s.species.name == "Rb85");
    CHECK_FALSE(s.beam.has_value());
    CHECK(s.pulses.empty());
    CHECK(s.output.directory == ".");
}

TEST_CASE("species record overrides") {
    const Scenario s = parse_scenario_text(
        "[species]\nname = Rb85\nlinewidth_MHz = 6.07\n");
    CHECK(s.species.natural_linewidth ==
          doctest::Approx(constants::two_pi * 6.07e6).epsilon(1e-15));
    // Saturation intensity follows the overridden linewidth unless pinned.
    CHECK(s.species.saturation_intensity ==
          doctest::Approx(two_level_saturation_intensity(
              780e-9, constants::two_pi * 6.07e6)).epsilon(1e-12));
    const Scenario pinned = parse_scenario_text(
        "[species]\nlinewidth_MHz = 6.07\nsaturation_intensity_W_m2 = 16.4\n");
    CHECK(pinned.species.saturation_intensity == 16.4);
    const Scenario custom = parse_scenario_text(
        "[species]\nmass_amu = 132.905\nwavelength_nm = 852\nlinewidth_MHz = 5.22\n");
    CHECK(custom.species.mass ==
          doctest::Approx(132.905 * constants::atomic_mass_unit).epsilon(1e-12));
}

TEST_CASE("unknown sections and keys are named") {
    CHECK_THROWS_WITH_AS((void)parse_scenario_text("[beams]\npower_mW = 1\n"),
                         doctest::Contains("[beams]"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("[trap]\npower_mW = 1\nwaist_um = 2\ndetuning_nm = 1\nwaist = 2\n"),
        doctest::Contains("trap.waist"), ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_scenario_text("[trap]\nwaist_um = 2\ndetuning_nm = 1\n"),
                         doctest::Contains("power_mW"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("[trap]\npower_mW = abc\nwaist_um = 2\ndetuning_nm = 1\n"),
        doctest::Contains("power_mW"), ConfigError);
}

TEST_CASE("malformed text is rejected") {
    CHECK_THROWS_AS((void)parse_scenario_text("power_mW = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("[trap\npower_mW = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("[trap]\npower_mW\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text("[trap]\n[trap]\n"), ConfigError);
    CHECK_THROWS_AS(
        (void)parse_scenario_text("[trap]\npower_mW = 1\npower_mW = 2\n"), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
    const Scenario s = parse_scenario_text(
        "# leading comment\n\n[trap]\n  power_mW = 1  # trailing\n\nwaist_um = 2\ndetuning_nm = 1\n");
    CHECK(s.trap->power == doctest::Approx(1e-3).epsilon(1e-15));
}

TEST_CASE("overrides behave exactly like editing the file") {
    const std::string text = "[trap]\npower_mW = 50\nwaist_um = 15\ndetuning_nm = 2\n";
    const Scenario overridden =
        parse_scenario_text(text, {"trap.power_mW=100", "output.directory=/tmp/x"});
    CHECK(overridden.trap->power == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(overridden.output.directory == "/tmp/x");
    const Scenario edited = parse_scenario_text(
        "[trap]\npower_mW = 100\nwaist_um = 15\ndetuning_nm = 2\n[output]\ndirectory = /tmp/x\n");
    CHECK(overridden.trap->power == edited.trap->power);
    // Bad override shapes and unknown keys fail like their file analogues.
    CHECK_THROWS_AS((void)parse_scenario_text(text, {"trap.power_mW"}), ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_scenario_text(text, {"trap.wattage=1"}),
                         doctest::Contains("trap.wattage"), ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_scenario_text(text, {"laser.power_mW=1"}),
                         doctest::Contains("[laser]"), ConfigError);
}

TEST_CASE("pulse section overrides address the numbered section") {
    const std::string text =
        "[pulse.1]\ntarget_site = 0\nrabi_1_MHz = 10\nrabi_2_MHz = 10\n"
        "single_photon_detuning_GHz = 10\nduration_us = 100\n";
    const Scenario s = parse_scenario_text(text, {"pulse.1.duration_us=200"});
    REQUIRE(s.pulses.size() == 1);
    CHECK(s.pulses[0].duration == doctest::Approx(200e-6).epsilon(1e-15));
}

TEST_CASE("montecarlo sampling spellings") {
    const std::string base =
        "[montecarlo]\ncloud_temperature_mK = 0.14\ncloud_radius_um = 20\nduration_ms = 100\n";
    const Scenario timed =
        parse_scenario_text(base + "sample_times_ms = 0, 25, 50, 100\n");
    REQUIRE(timed.montecarlo->sample_times.size() == 4);
    CHECK(timed.montecarlo->sample_times[1] == doctest::Approx(0.025).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text(base + "sample_times_ms = 0, 50\nsample_count = 5\n"),
        doctest::Contains("sample_count"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario_text(base + "sample_count = 1\n"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text(
            base + "background_lifetime_ms = 166\nbackground_loss_rate_per_s = 6\n"),
        doctest::Contains("background"), ConfigError);
    // Default when neither loss spelling appears: no background loss.
    const Scenario lossless = parse_scenario_text(base + "sample_count = 3\n");
    CHECK(lossless.montecarlo->background_loss_rate == 0.0);
}

TEST_CASE("vcsel per-site keys") {
    const Scenario s = parse_scenario_text(
        "[vcsel]\npower_mW = 1\ndisabled_sites = 2, 5\npower_3_mW = 2.5\n"
        "wavelength_offset_1_nm = 0.4\n");
    REQUIRE(s.vcsel.has_value());
    CHECK(s.vcsel->default_power == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(s.vcsel->disabled_sites.count(2) == 1);
    CHECK(s.vcsel->disabled_sites.count(5) == 1);
    CHECK(s.vcsel->power_overrides.at(3) == doctest::Approx(2.5e-3).epsilon(1e-15));
    CHECK(s.vcsel->wavelength_offsets.at(1) == doctest::Approx(0.4e-9).epsilon(1e-15));
}

TEST_CASE("readout needs exactly one aperture spelling") {
    CHECK_THROWS_AS((void)parse_scenario_text("[readout]\nscatter_count = 100\n"), ConfigError);
    CHECK_THROWS_AS(
        (void)parse_scenario_text(
            "[readout]\nna = 0.5\nuse_lens_array_na = true\nscatter_count = 100\n"),
        ConfigError);
    const Scenario s = parse_scenario_text(
        "[readout]\nuse_lens_array_na = true\nscatter_count = 100\n");
    CHECK(s.readout->use_lens_array_na);
}

TEST_CASE("config text round-trips to an equivalent scenario") {
    const Scenario s = parse_scenario_text(kFullConfig, {"trap.power_mW=75"});
    const Scenario back = parse_scenario_text(to_config_text(s));
    REQUIRE(back.raw.sections.size() == s.raw.sections.size());
    for (std::size_t i = 0; i < s.raw.sections.size(); ++i) {
        CHECK(back.raw.sections[i].first == s.raw.sections[i].first);
        CHECK(back.raw.sections[i].second == s.raw.sections[i].second);
    }
    CHECK(back.trap->power == s.trap->power);
    CHECK(back.montecarlo->sample_times == s.montecarlo->sample_times);
}

TEST_CASE("config json echo round-trips") {
    const Scenario s = parse_scenario_text(kFullConfig);
    const Scenario back = scenario_from_config_json(config_json(s));
    CHECK(back.trap->power == s.trap->power);
    CHECK(back.lens_array->pitch == s.lens_array->pitch);
    REQUIRE(back.pulses.size() == s.pulses.size());
    CHECK(back.pulses[1].phase == s.pulses[1].phase);
    CHECK(back.schedule->samples == s.schedule->samples);
    CHECK(back.output.directory == s.output.directory);
}
