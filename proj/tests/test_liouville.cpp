#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <fwm/analytic.hpp>
#include <fwm/hyperfine.hpp>
#include <fwm/liouville.hpp>

using namespace fwm;
using namespace fwm::liouville;

namespace {

const double gamma_r = units::mhz(6.035);
const double lambda_d1 = units::nm(770.1);

double rel(complex a, complex b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

double max_rel(const SusceptibilityMatrix &a, const SusceptibilityMatrix &b)
{
    const double scale = std::max({std::abs(a.chi11), std::abs(a.chi12), std::abs(a.chi21),
                                   std::abs(a.chi22)});
    return std::max({std::abs(a.chi11 - b.chi11), std::abs(a.chi12 - b.chi12),
                     std::abs(a.chi21 - b.chi21), std::abs(a.chi22 - b.chi22)}) /
           scale;
}

/// Four-level system with random rates, branching and control detunings.
hyperfine::DrivenScheme random_four_level(std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) {
        return std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
    };
    const FourLevelParams p = FourLevelParams::from_relative(
        gamma_r, log_uniform(0.01, 5.0), 0.5 + log_uniform(1e-3, 2.0), log_uniform(1e-4, 0.1),
        log_uniform(1e12, 1e16), lambda_d1);
    hyperfine::DrivenScheme d = hyperfine::idealized_four_level(p, false);
    const double b3 = u(rng);
    const double b4 = u(rng);
    d.scheme.decays = {{2, 0, b3 * gamma_r},
                       {2, 1, (1.0 - b3) * gamma_r},
                       {3, 0, b4 * gamma_r},
                       {3, 1, (1.0 - b4) * gamma_r}};
    d.drives.fields[0].frequency += (u(rng) - 0.5) * 4.0 * gamma_r;
    d.drives.fields[1].frequency += (u(rng) - 0.5) * 4.0 * gamma_r;
    d.drives.fields[1].rabi *= log_uniform(0.3, 3.0);
    d.drives.fields[3].frequency =
        d.drives.fields[0].frequency + d.drives.fields[1].frequency - d.drives.fields[2].frequency;
    return d;
}

hyperfine::DrivenScheme k40(double rabi_rel, double density, hyperfine::LineSet lines)
{
    hyperfine::K40MixingOptions o;
    o.lines = lines;
    o.control1_rabi = rabi_rel * gamma_r;
    o.control2_rabi = rabi_rel * gamma_r;
    o.density = density;
    o.optical_dephasing = units::mhz(0.35e-13) * density;
    o.ground_dephasing = 1e-3 * gamma_r;
    return hyperfine::k40_mixing_scheme(o);
}

void check_physical(const SteadyState &s)
{
    CHECK(std::abs(s.trace() - complex(1.0)) < 1e-12);
    CHECK(s.hermiticity_error() < 1e-12);
    CHECK(s.min_eigenvalue() > -1e-12);
    CHECK(s.residual < 1e-10 * s.generator_norm);
}

} // namespace

TEST_SUITE("liouville")
{
    TEST_CASE("idealized linear response reproduces the closed-form susceptibilities")
    {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            const FourLevelParams p = FourLevelParams::from_relative(
                gamma_r, 0.05 * std::pow(60.0, u(rng)), 0.5, 1e-4 * std::pow(1e3, u(rng)),
                1e13 * std::pow(1e3, u(rng)), lambda_d1);
            const auto d = hyperfine::idealized_four_level(p);
            std::vector<double> deltas;
            for (int k = -10; k <= 10; ++k) {
                deltas.push_back(0.3 * k * gamma_r);
            }
            const auto points = linear_response_susceptibilities(d.scheme, d.drives, d.probe, deltas);
            for (const auto &pt : points) {
                REQUIRE(pt.ok);
                CHECK(max_rel(pt.chi, analytic::fwm_susceptibilities(p, pt.delta)) < 1e-8);
            }
        }
    }

    TEST_CASE("steady state is a density matrix for random schemes")
    {
        std::mt19937_64 rng(22);
        for (int i = 0; i < 200; ++i) {
            const auto d = random_four_level(rng);
            const Generator g(d.scheme, d.drives, 0.0);
            check_physical(steady_state(g));
        }
        for (double om : {0.1, 1.0, 5.0}) {
            for (double n : {1e14, 5e15}) {
                const auto d = k40(om, n, hyperfine::LineSet::D1);
                check_physical(steady_state(Generator(d.scheme, d.drives, 0.0)));
            }
        }
    }

    TEST_CASE("sector decomposition equals the full-matrix solve")
    {
        std::mt19937_64 rng(23);
        for (int i = 0; i < 20; ++i) {
            const auto d = random_four_level(rng);
            const double delta = (std::uniform_real_distribution<double>(-3.0, 3.0)(rng)) * gamma_r;
            const Generator g(d.scheme, d.drives, delta);
            const SteadyState s_sector = steady_state(g, Decomposition::sector);
            const SteadyState s_full = steady_state(g, Decomposition::full);
            CHECK((s_sector.rho - s_full.rho).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(max_rel(linear_response(g, s_sector, d.probe, Decomposition::sector),
                          linear_response(g, s_full, d.probe, Decomposition::full)) < 1e-10);
        }
        const auto d = k40(1.3, 1e15, hyperfine::LineSet::D1);
        for (double delta : {-1.0, 0.0, 0.7}) {
            const Generator g(d.scheme, d.drives, delta * gamma_r);
            const SteadyState s = steady_state(g, Decomposition::sector);
            CHECK((s.rho - steady_state(g, Decomposition::full).rho).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(max_rel(linear_response(g, s, d.probe, Decomposition::sector),
                          linear_response(g, s, d.probe, Decomposition::full)) < 1e-10);
        }
    }

    TEST_CASE("grid evaluation equals per-detuning generator rebuilds")
    {
        for (auto lines : {hyperfine::LineSet::D1, hyperfine::LineSet::D1_D2}) {
            const auto d = k40(2.0, 5e14, lines);
            std::vector<double> deltas;
            for (int k = -8; k <= 8; ++k) {
                deltas.push_back(0.37 * k * gamma_r);
            }
            for (double shift : {0.0, 40.0 * gamma_r}) {
                const auto points =
                    linear_response_susceptibilities(d.scheme, d.drives, d.probe, deltas, shift);
                for (const auto &pt : points) {
                    REQUIRE(pt.ok);
                    const Generator g(d.scheme, d.drives, pt.delta, shift);
                    const SusceptibilityMatrix direct = linear_response(g, steady_state(g), d.probe);
                    CHECK(max_rel(pt.chi, direct) < 1e-9);
                }
            }
        }
    }

    TEST_CASE("steady state does not depend on the probe detuning")
    {
        const auto d = k40(1.0, 1e14, hyperfine::LineSet::D1);
        const SteadyState a = steady_state(Generator(d.scheme, d.drives, -2.0 * gamma_r));
        const SteadyState b = steady_state(Generator(d.scheme, d.drives, 1.5 * gamma_r));
        CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("dark ground state gives a non-unique steady state")
    {
        LevelScheme s;
        s.states = {{"g1", "g1", 0.0, 0.0, 0.0, false},
                    {"g2", "g2", 3.0 * gamma_r, 0.0, 0.0, false},
                    {"e", "e", 100.0 * gamma_r, 0.0, 0.0, true}};
        s.couplings = {{0, 2, 1.0}};
        s.decays = {{2, 0, gamma_r}};
        DriveAssignment drives;
        drives.fwm_closure = false;
        drives.fields = {{"control", FieldRole::control, 100.0 * gamma_r, gamma_r, 1, {0}}};
        const Generator g(s, drives, 0.0);
        try {
            steady_state(g);
            FAIL("expected NonUniqueSteadyState");
        } catch (const NonUniqueSteadyState &e) {
            CHECK(e.kernel_dimension() == 2);
        }

        // a weak population exchange restores uniqueness
        s.decays.push_back({1, 0, 1e-6 * gamma_r});
        check_physical(steady_state(Generator(s, drives, 0.0)));
    }

    TEST_CASE("weak off-resonant pumping is not mistaken for a dark state")
    {
        // 300 K Doppler class far in the wing: pumping rates ~1e-8 Gamma_r
        const auto d = k40(0.05, 1e9, hyperfine::LineSet::D1_D2);
        check_physical(steady_state(Generator(d.scheme, d.drives, 0.0, 300.0 * gamma_r)));
    }

    TEST_CASE("scheme and drive validation")
    {
        auto d = k40(1.0, 1e14, hyperfine::LineSet::D1);
        DriveAssignment twice = d.drives;
        twice.fields[1].couplings.push_back(twice.fields[0].couplings.front());
        CHECK_THROWS_AS(Generator(d.scheme, twice, 0.0), ConfigurationError);

        DriveAssignment no_probe = d.drives;
        no_probe.fields.pop_back();
        CHECK_THROWS_AS(Generator(d.scheme, no_probe, 0.0), ConfigurationError);

        LevelScheme bad = d.scheme;
        bad.decays.push_back({0, 0, 1.0});
        CHECK_THROWS_AS(Generator(bad, d.drives, 0.0), ConfigurationError);

        bad = d.scheme;
        bad.dephasing.push_back({0, 1, -1.0});
        CHECK_THROWS_AS(Generator(bad, d.drives, 0.0), ConfigurationError);

        CHECK(field_role_from_string(to_string(FieldRole::probe2)) == FieldRole::probe2);
        CHECK_THROWS_AS(field_role_from_string("probe3"), ConfigurationError);
    }

    TEST_CASE("40K sublevel bookkeeping")
    {
        const auto d1 = hyperfine::build_hyperfine_scheme(hyperfine::Species::K40, hyperfine::LineSet::D1,
                                                          hyperfine::Polarization::pi);
        CHECK(d1.size() == 36);
        // every excited sublevel decays at the line's radiative rate
        for (std::size_t i = 0; i < d1.size(); ++i) {
            if (d1.states[i].excited) {
                CHECK(d1.total_decay(i) == doctest::Approx(gamma_r).epsilon(1e-12));
            }
        }
        const double split = hyperfine::manifold_energy(d1, hyperfine::manifold_name("4S1/2", 3.5)) -
                             hyperfine::manifold_energy(d1, hyperfine::manifold_name("4S1/2", 4.5));
        CHECK(split == doctest::Approx(units::ghz(1.286)));
        const double esplit = hyperfine::manifold_energy(d1, hyperfine::manifold_name("4P1/2", 3.5)) -
                              hyperfine::manifold_energy(d1, hyperfine::manifold_name("4P1/2", 4.5));
        CHECK(esplit == doctest::Approx(units::ghz(0.155)));

        const auto k39 = hyperfine::build_hyperfine_scheme(hyperfine::Species::K39, hyperfine::LineSet::D1,
                                                           hyperfine::Polarization::pi);
        CHECK(k39.size() == 16);
        CHECK_THROWS_AS(hyperfine::build_hyperfine_scheme(hyperfine::Species::K39,
                                                          hyperfine::LineSet::D1_D2,
                                                          hyperfine::Polarization::pi),
                        ConfigurationError);
    }
}
