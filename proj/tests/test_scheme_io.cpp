#include <doctest.h>

#include <fwm/hyperfine.hpp>
#include <fwm/scheme_io.hpp>

using namespace fwm;
using namespace fwm::liouville;

TEST_SUITE("scheme_io")
{
    TEST_CASE("level schemes and drives round-trip through JSON")
    {
        hyperfine::K40MixingOptions o;
        o.lines = hyperfine::LineSet::D1_D2;
        o.control1_rabi = units::mhz(6.0);
        o.control2_rabi = units::mhz(7.0);
        o.density = 1e14;
        o.optical_dephasing = units::mhz(1.0);
        o.ground_dephasing = units::mhz(0.006);
        const auto d = hyperfine::k40_mixing_scheme(o);

        const std::string text = dump_level_scheme(d.scheme);
        const LevelScheme back = parse_level_scheme(text);
        CHECK(back == d.scheme);
        CHECK(dump_level_scheme(back) == text);

        const std::string drives = dump_drive_assignment(d.drives);
        const DriveAssignment dback = parse_drive_assignment(drives);
        CHECK(dback == d.drives);
        CHECK(dump_drive_assignment(dback) == drives);
    }

    TEST_CASE("malformed scheme documents are configuration errors")
    {
        CHECK_THROWS_AS(parse_level_scheme("not json"), ConfigurationError);
        CHECK_THROWS_AS(parse_level_scheme("{}"), ConfigurationError);
        CHECK_THROWS_AS(parse_drive_assignment("[1, 2]"), ConfigurationError);

        const auto d = hyperfine::idealized_four_level(
            FourLevelParams::from_relative(units::mhz(6.035), 0.1, 0.5, 1e-3, 1e14, units::nm(770.1)));
        LevelScheme broken = d.scheme;
        broken.couplings.push_back({0, 17, 1.0});
        CHECK_THROWS_AS(parse_level_scheme(dump_level_scheme(broken)), ConfigurationError);
        broken = d.scheme;
        broken.decays.push_back({2, 0, -1.0});
        CHECK_THROWS_AS(parse_level_scheme(dump_level_scheme(broken)), ConfigurationError);
    }
}
