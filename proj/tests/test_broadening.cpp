#include <doctest.h>

#include <cmath>
#include <vector>

#include <fwm/broadening.hpp>

using namespace fwm;
using namespace fwm::broadening;

namespace {

const double gamma_r = units::mhz(6.035);
const double k_d1 = 2.0 * pi / units::nm(770.1);
const double mass_k40 = 39.963998 * constants::atomic_mass_unit;

} // namespace

TEST_SUITE("broadening")
{
    TEST_CASE("Gauss-Hermite weights are normalised and nodes symmetric")
    {
        for (int n : {8, 16, 64, 128, 256}) {
            const GaussHermiteRule rule = gauss_hermite(n);
            REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
            double sum = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                sum += rule.weights[i];
                CHECK(rule.weights[i] > 0.0);
                CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[n - 1 - i]).epsilon(1e-12));
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("Gauss-Hermite rules integrate even moments exactly")
    {
        // <x^2m> under exp(-x^2)/sqrt(pi) is (2m-1)!! / 2^m
        const GaussHermiteRule rule = gauss_hermite(32);
        double expected = 1.0;
        for (int m = 1; m <= 10; ++m) {
            expected *= (2.0 * m - 1.0) / 2.0;
            double sum = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                sum += rule.weights[i] * std::pow(rule.nodes[i], 2 * m);
            }
            CHECK(sum == doctest::Approx(expected).epsilon(1e-11));
        }
    }

    TEST_CASE("Doppler width of 40K at 300 K is 2 pi x 458 MHz")
    {
        const double w = doppler_width(300.0, mass_k40, k_d1);
        CHECK(units::to_mhz(w) == doctest::Approx(458.0).epsilon(0.01));
        const double oracle = k_d1 * std::sqrt(2.0 * constants::k_boltzmann * 300.0 / mass_k40);
        CHECK(w == doctest::Approx(oracle).epsilon(1e-14));
        CHECK_THROWS_AS(doppler_width(0.0, mass_k40, k_d1), DomainError);
    }

    TEST_CASE("Voigt line centre matches the erfc closed form")
    {
        // <gamma / (gamma^2 + s^2)> over the Gaussian = sqrt(pi) e^{a^2} erfc(a) / W, a = gamma / W
        for (const auto [ratio, nodes] : {std::pair{1.0, 64}, std::pair{3.0, 64}, std::pair{0.3, 512}}) {
            const double w = units::mhz(458.0);
            const double g = ratio * w;
            const auto lorentz = [&](double s) { return complex(g / (g * g + s * s)); };
            const double a = g / w;
            const double oracle = std::sqrt(pi) * std::exp(a * a) * std::erfc(a) / w;
            const auto avg = doppler_average(
                [&](double s) { return std::vector<complex>{lorentz(s)}; }, w, nodes, true, 1e-6);
            CHECK(avg.converged);
            CHECK(avg.nodes == 2 * nodes);
            CHECK(avg.value.front().real() == doctest::Approx(oracle).epsilon(1e-6));
        }
    }

    TEST_CASE("non-convergent doubling is reported, not hidden")
    {
        const double w = units::mhz(458.0);
        const double g = 1e-3 * w;
        const auto avg = doppler_average(
            [&](double s) { return std::vector<complex>{complex(g / (g * g + s * s))}; }, w, 8,
            true, 1e-6);
        CHECK_FALSE(avg.converged);
        CHECK_FALSE(avg.warning.empty());
        CHECK(avg.relative_change > 1e-6);
    }

    TEST_CASE("zero Doppler width returns the unshifted spectrum")
    {
        const auto avg = doppler_average(
            [](double s) { return std::vector<complex>{complex(1.0 + s, 2.0)}; }, 0.0, 64, true);
        CHECK(avg.value.front() == complex(1.0, 2.0));
        CHECK_THROWS_AS(doppler_average([](double) { return complex(1.0); }, -1.0, 8), DomainError);
    }

    TEST_CASE("collisional rate: 2 gamma = 0.7e-13 N MHz")
    {
        BroadeningSpec spec;
        const double n = 1e15;
        CHECK(2.0 * collisional_gamma(n, spec) == doctest::Approx(units::mhz(0.7e-13 * n)).epsilon(1e-12));
    }

    TEST_CASE("collisional ceiling 0.37 and crossover density 8.6e13")
    {
        BroadeningSpec spec;
        const double lambda = units::nm(770.1);
        for (double n : {1e16, 1e17, 1e18}) {
            CHECK(max_index_estimate(n, lambda, gamma_r, spec) == doctest::Approx(0.37).epsilon(0.1));
        }
        const double crossover = 0.5 * gamma_r / spec.collisional_coefficient;
        CHECK(crossover == doctest::Approx(8.6e13).epsilon(0.02));
        // below the crossover the radiative limit 2 r dominates
        spec.collisional_coefficient = 0.0;
        CHECK(max_index_estimate(1e14, lambda, gamma_r, spec) == doctest::Approx(0.434).epsilon(0.01));
    }

    TEST_CASE("vapour density: two-branch fit, increasing, range enforced")
    {
        // N = 1e2 p / (k_B T) with p in mbar, N in m^-3, converted to cm^-3
        const double t = 450.0;
        const double p = std::pow(10.0, 7.4077 - 4453.0 / t);
        CHECK(vapor_density(t) == doctest::Approx(1e2 * p / (constants::k_boltzmann_si * t) * 1e-6).epsilon(1e-12));
        CHECK(vapor_pressure_mbar(310.0, VaporBranch::low) ==
              doctest::Approx(std::pow(10.0, 7.9667 - 4646.0 / 310.0)).epsilon(1e-12));
        double last = 0.0;
        for (double temp = 298.0; temp <= 600.0; temp += 2.0) {
            const double n = vapor_density(temp);
            CHECK(n > last);
            last = n;
        }
        CHECK_NOTHROW(vapor_density(298.0));
        CHECK_NOTHROW(vapor_density(600.0));
        CHECK_THROWS_AS(vapor_density(297.9), DomainError);
        CHECK_THROWS_AS(vapor_density(600.1), DomainError);
    }

    TEST_CASE("broadening spec invariants")
    {
        BroadeningSpec spec;
        CHECK_NOTHROW(spec.validate());
        spec.doppler_nodes = 7;
        CHECK_THROWS_AS(spec.validate(), DomainError);
        spec.doppler_nodes = 64;
        spec.temperature = -1.0;
        CHECK_THROWS_AS(spec.validate(), DomainError);
        spec.temperature = 300.0;
        spec.collisional_coefficient = -1.0;
        CHECK_THROWS_AS(spec.validate(), DomainError);
    }
}
