#include <doctest.h>

#include <cmath>
#include <random>

#include <fwm/analytic.hpp>
#include <fwm/core.hpp>

using namespace fwm;

namespace {

const double gamma_r = units::mhz(6.035);
const double lambda_d1 = units::nm(770.1);

double rel(complex a, complex b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

/// Four-level susceptibilities transcribed term by term, for comparison.
SusceptibilityMatrix transcribed_chi(const FourLevelParams &p, double d)
{
    const complex i(0.0, 1.0);
    const double g = p.optical_coherence_decay;
    const double g21 = p.ground_coherence_decay;
    const double om = p.control_rabi;
    const double mu = p.dipole();
    const double n = p.density;
    const double w = 0.5 / (1.0 + 4.0 * om * om / (g * p.radiative_decay));
    const complex dp = (i * d + g) * (i * d + g21) + 2.0 * om * om;
    const complex dm = (-i * d + g) * (-i * d + g21) + 2.0 * om * om;
    SusceptibilityMatrix c;
    c.chi11 = i * mu * mu * n / (2.0 * constants::hbar) * w *
              (i * d + g21 - i * d * om * om / (g * (g + i * d))) / dp;
    c.chi12 = -i * mu * mu * n / (2.0 * constants::hbar * g * (i * d + g)) * om * om * w *
              (i * d + 2.0 * g) / dp;
    c.chi22 = i * mu * mu * n / (2.0 * constants::hbar) * w *
              (-i * d + g21 + i * d * om * om / (g * (g - i * d))) / dm;
    c.chi21 = -i * mu * mu * n / (2.0 * constants::hbar * g * (-i * d + g)) * om * om * w *
              (-i * d + 2.0 * g) / dm;
    return c;
}

FourLevelParams random_params(std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) {
        return std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
    };
    return FourLevelParams::from_relative(gamma_r, log_uniform(0.01, 5.0), 0.5 + log_uniform(1e-3, 3.0),
                                          log_uniform(1e-5, 0.3), log_uniform(1e12, 1e16),
                                          lambda_d1);
}

} // namespace

TEST_SUITE("core")
{
    TEST_CASE("dimensionless density at the potassium D1 wavelength")
    {
        // r = 3 N lambda^3 / 64 pi^2 evaluated by hand: 2.17e-15 per cm^-3 at 770.1 nm
        const double r = dimensionless_density(1e14, lambda_d1);
        const double oracle = 3.0 * 1e14 * std::pow(770.1e-7, 3) / (64.0 * M_PI * M_PI);
        CHECK(r == doctest::Approx(oracle).epsilon(1e-14));
        CHECK(r / 1e14 == doctest::Approx(2.17e-15).epsilon(5e-3));
    }

    TEST_CASE("r equals pi mu^2 N / (2 hbar Gamma_r) with the radiative dipole")
    {
        const double k = 2.0 * pi / lambda_d1;
        const double mu = dipole_from_radiative_decay(gamma_r, k);
        const double n = 3.3e14;
        CHECK(pi * mu * mu * n / (2.0 * constants::hbar * gamma_r) ==
              doctest::Approx(dimensionless_density(n, lambda_d1)).epsilon(1e-12));
        CHECK(radiative_decay_from_dipole(mu, k) == doctest::Approx(gamma_r).epsilon(1e-14));
    }

    TEST_CASE("four-level parameter invariants")
    {
        FourLevelParams p = FourLevelParams::from_relative(gamma_r, 0.1, 0.5, 1e-3, 1e14, lambda_d1);
        CHECK_NOTHROW(p.validate());
        CHECK(p.optical_coherence_decay == doctest::Approx(0.5 * gamma_r));

        FourLevelParams bad = p;
        bad.optical_coherence_decay = 0.4 * gamma_r;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = p;
        bad.density = 0.0;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = p;
        bad.control_rabi = -1.0;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = p;
        bad.ground_coherence_decay = -1.0;
        CHECK_THROWS_AS(bad.validate(), DomainError);
    }

    TEST_CASE("branch tag names round-trip")
    {
        for (BranchTag t : {BranchTag::local_absorption, BranchTag::continuity}) {
            CHECK(branch_tag_from_string(to_string(t)) == t);
        }
        CHECK_THROWS_AS(branch_tag_from_string("sideways"), ConfigurationError);
    }

    TEST_CASE("unit helpers")
    {
        CHECK(units::mhz(1.0) == doctest::Approx(2.0 * M_PI * 1e6));
        CHECK(units::to_mhz(units::mhz(6.035)) == doctest::Approx(6.035));
        CHECK(units::nm(770.1) == doctest::Approx(770.1e-7));
    }
}

TEST_SUITE("analytic")
{
    TEST_CASE("closed-form susceptibilities match the term-by-term transcription")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int i = 0; i < 500; ++i) {
            const FourLevelParams p = random_params(rng);
            const double d = u(rng) * gamma_r;
            const SusceptibilityMatrix a = analytic::fwm_susceptibilities(p, d);
            const SusceptibilityMatrix b = transcribed_chi(p, d);
            CHECK(rel(a.chi11, b.chi11) < 1e-12);
            CHECK(rel(a.chi12, b.chi12) < 1e-12);
            CHECK(rel(a.chi21, b.chi21) < 1e-12);
            CHECK(rel(a.chi22, b.chi22) < 1e-12);
        }
    }

    TEST_CASE("susceptibility symmetry chi22 = -chi11^*, chi21 = -chi12^*")
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int i = 0; i < 200; ++i) {
            const FourLevelParams p = random_params(rng);
            const SusceptibilityMatrix c = analytic::fwm_susceptibilities(p, u(rng) * gamma_r);
            CHECK(rel(c.chi22, -std::conj(c.chi11)) < 1e-12);
            CHECK(rel(c.chi21, -std::conj(c.chi12)) < 1e-12);
        }
    }

    TEST_CASE("plus-mode index equals 2 pi (chi11 + chi12)")
    {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int i = 0; i < 500; ++i) {
            const FourLevelParams p = random_params(rng);
            const double d = u(rng) * gamma_r;
            const SusceptibilityMatrix c = analytic::fwm_susceptibilities(p, d);
            CHECK(rel(analytic::index_plus(p, d).value(), 2.0 * pi * (c.chi11 + c.chi12)) < 1e-10);
        }
    }

    TEST_CASE("zero-absorption detuning is a root of the plus-mode absorption")
    {
        std::mt19937_64 rng(14);
        int with_root = 0;
        for (int i = 0; i < 300; ++i) {
            const FourLevelParams p = random_params(rng);
            const double g = p.optical_coherence_decay;
            const auto d = analytic::zero_absorption_detuning(p.control_rabi, g, p.ground_coherence_decay);
            const double om2 = p.control_rabi * p.control_rabi;
            if (!d) {
                CHECK(4.0 * om2 * om2 / (g * g) < p.ground_coherence_decay * p.ground_coherence_decay);
                continue;
            }
            ++with_root;
            const double scale = std::abs(analytic::index_plus(p, 0.0).value()) +
                                 std::abs(analytic::index_plus(p, *d).value());
            CHECK(std::abs(analytic::index_plus(p, *d).imag_part) < 1e-10 * scale);
            CHECK(std::abs(analytic::index_plus(p, -*d).imag_part) < 1e-10 * scale);
        }
        CHECK(with_root > 100);
    }

    TEST_CASE("enhancement factor equals the plus-mode index over r at the zero")
    {
        std::mt19937_64 rng(15);
        for (int i = 0; i < 300; ++i) {
            const FourLevelParams p = random_params(rng);
            const double g = p.optical_coherence_decay;
            const auto d = analytic::zero_absorption_detuning(p.control_rabi, g, p.ground_coherence_decay);
            const auto f = analytic::enhancement_factor(p.control_rabi, g, p.ground_coherence_decay,
                                                        p.radiative_decay);
            REQUIRE(d.has_value() == f.has_value());
            if (!f) {
                continue;
            }
            // the larger of the two mirror roots carries the enhancement
            const double n1 = analytic::index_plus(p, *d).real_part;
            const double n2 = analytic::index_plus(p, -*d).real_part;
            const double r = dimensionless_density(p.density, p.wavelength);
            CHECK(*f == doctest::Approx(std::max(n1, n2) / r).epsilon(1e-8));
        }
    }

    TEST_CASE("optimised enhancement at N = 1e14 is close to 0.43")
    {
        const double g = 0.5 * gamma_r;
        const auto opt = analytic::optimize_control_rabi(g, 1e-3 * gamma_r, gamma_r,
                                                         {0.01 * gamma_r, 10.0 * gamma_r, 400});
        const double r = dimensionless_density(1e14, lambda_d1);
        CHECK_FALSE(opt.at_boundary);
        CHECK(opt.factor * r == doctest::Approx(0.43).epsilon(0.1));
    }

    TEST_CASE("optimum dominates every grid node")
    {
        const double g = 0.5 * gamma_r;
        for (double y : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
            const analytic::RabiWindow window{0.01 * gamma_r, 10.0 * gamma_r, 200};
            const auto opt = analytic::optimize_control_rabi(g, y * g, gamma_r, window);
            for (int i = 0; i < window.grid_points; ++i) {
                const double om = window.lower * std::pow(window.upper / window.lower,
                                                          static_cast<double>(i) / (window.grid_points - 1));
                const auto f = analytic::enhancement_factor(om, g, y * g, gamma_r);
                if (f) {
                    CHECK(opt.factor >= *f * (1.0 - 1e-12));
                }
            }
        }
    }

    TEST_CASE("population difference saturates toward zero")
    {
        const double g = 0.5 * gamma_r;
        CHECK(analytic::population_difference(0.0, g, gamma_r) == doctest::Approx(0.5));
        const double om = 0.7 * gamma_r;
        CHECK(analytic::population_difference(om, g, gamma_r) ==
              doctest::Approx(0.5 / (1.0 + 4.0 * om * om / (g * gamma_r))));
        CHECK_THROWS_AS(analytic::population_difference(om, 0.0, gamma_r), DomainError);
    }

    TEST_CASE("two-level absorber only absorbs")
    {
        const double k = 2.0 * pi / lambda_d1;
        const analytic::TwoLevelAbsorberParams a{1e15, dipole_from_radiative_decay(gamma_r, k),
                                                 0.5e-3 * gamma_r, 0.1 * gamma_r};
        for (double d = -3.0; d <= 3.0; d += 0.01) {
            const complex chi = analytic::two_level_susceptibility(a, d * gamma_r);
            CHECK(chi.imag() > 0.0);
            // i mu^2 N / hbar / (i(delta_0 - delta) + gamma)
            const complex oracle = complex(0.0, 1.0) * a.dipole * a.dipole * a.density / constants::hbar /
                                   complex(a.coherence_decay, a.offset - d * gamma_r);
            CHECK(rel(chi, oracle) < 1e-12);
        }
    }

    TEST_CASE("composite medium adds the absorber to chi22 only")
    {
        const FourLevelParams p = FourLevelParams::from_relative(gamma_r, 0.45, 0.5, 1e-3, 1e14, lambda_d1);
        const analytic::TwoLevelAbsorberParams a{1e15, p.dipole(), 0.5e-3 * gamma_r, 0.1 * gamma_r};
        const double d = -0.4 * gamma_r;
        const SusceptibilityMatrix base = analytic::fwm_susceptibilities(p, d);
        const SusceptibilityMatrix comp = analytic::composite_susceptibilities(p, a, d);
        CHECK(comp.chi11 == base.chi11);
        CHECK(comp.chi12 == base.chi12);
        CHECK(comp.chi21 == base.chi21);
        CHECK(rel(comp.chi22, base.chi22 + analytic::two_level_susceptibility(a, d)) < 1e-14);
    }

    TEST_CASE("absorbing/amplifying pair: opposite populations cancel at the midpoint")
    {
        const double k = 2.0 * pi / lambda_d1;
        const double mu = dipole_from_radiative_decay(gamma_r, k);
        const double g = 0.5 * gamma_r;
        analytic::RamanPairParams p;
        p.first = {1e14, mu, g, g, 1.0};
        p.second = {1e14, mu, g, -g, -1.0};
        const ComplexIndex n = analytic::absorber_amplifier_index(p);
        CHECK(std::abs(n.imag_part) < 1e-12 * std::abs(n.real_part));
        CHECK(n.real_part != 0.0);

        // single absorber: 2 pi i N mu^2 / hbar / (i Delta + gamma)
        p.second.density = 0.0;
        const complex oracle = 2.0 * pi * complex(0.0, 1.0) / constants::hbar * 1e14 * mu * mu /
                               complex(g, g);
        CHECK(rel(analytic::absorber_amplifier_index(p).value(), oracle) < 1e-12);
        CHECK(analytic::absorber_amplifier_index(p).imag_part > 0.0);

        p.first.coherence_decay = 0.0;
        CHECK_THROWS_AS(analytic::absorber_amplifier_index(p), DomainError);
    }
}
