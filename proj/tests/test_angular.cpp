#include <doctest.h>

#include <cmath>
#include <vector>

#include <fwm/angular.hpp>
#include <fwm/core.hpp>
#include <fwm/hyperfine.hpp>

using namespace fwm;

namespace {

double fact(double n)
{
    return std::tgamma(n + 1.0);
}

double triangle_coefficient(double a, double b, double c)
{
    return fact(a + b - c) * fact(a - b + c) * fact(-a + b + c) / fact(a + b + c + 1.0);
}

bool triangle(double a, double b, double c)
{
    return c >= std::abs(a - b) && c <= a + b && std::fmod(a + b + c, 1.0) == 0.0;
}

/// Racah's closed sum for the 3j symbol.
double racah_3j(double j1, double j2, double j3, double m1, double m2, double m3)
{
    if (m1 + m2 + m3 != 0.0 || !triangle(j1, j2, j3) || std::abs(m1) > j1 || std::abs(m2) > j2 ||
        std::abs(m3) > j3) {
        return 0.0;
    }
    const double pre = std::sqrt(triangle_coefficient(j1, j2, j3) * fact(j1 + m1) * fact(j1 - m1) *
                                 fact(j2 + m2) * fact(j2 - m2) * fact(j3 + m3) * fact(j3 - m3));
    const double kmin = std::max({0.0, j2 - j3 - m1, j1 - j3 + m2});
    const double kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
    double sum = 0.0;
    for (double k = kmin; k <= kmax; k += 1.0) {
        const double term = 1.0 / (fact(k) * fact(j1 + j2 - j3 - k) * fact(j1 - m1 - k) *
                                   fact(j2 + m2 - k) * fact(j3 - j2 + m1 + k) *
                                   fact(j3 - j1 - m2 + k));
        sum += (std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0) * term;
    }
    const double phase = std::fmod(std::abs(j1 - j2 - m3), 2.0) == 0.0 ? 1.0 : -1.0;
    return phase * pre * sum;
}

/// Racah's closed sum for the 6j symbol.
double racah_6j(double a, double b, double c, double d, double e, double f)
{
    if (!triangle(a, b, c) || !triangle(a, e, f) || !triangle(d, b, f) || !triangle(d, e, c)) {
        return 0.0;
    }
    const double pre = std::sqrt(triangle_coefficient(a, b, c) * triangle_coefficient(a, e, f) *
                                 triangle_coefficient(d, b, f) * triangle_coefficient(d, e, c));
    const double tmin = std::max({a + b + c, a + e + f, d + b + f, d + e + c});
    const double tmax = std::min({a + b + d + e, a + c + d + f, b + c + e + f});
    double sum = 0.0;
    for (double t = tmin; t <= tmax; t += 1.0) {
        const double term = fact(t + 1.0) /
                            (fact(t - a - b - c) * fact(t - a - e - f) * fact(t - d - b - f) *
                             fact(t - d - e - c) * fact(a + b + d + e - t) *
                             fact(a + c + d + f - t) * fact(b + c + e + f - t));
        sum += (std::fmod(t, 2.0) == 0.0 ? 1.0 : -1.0) * term;
    }
    return pre * sum;
}

std::vector<double> halves(double max)
{
    std::vector<double> out;
    for (double j = 0.0; j <= max + 1e-12; j += 0.5) {
        out.push_back(j);
    }
    return out;
}

} // namespace

TEST_SUITE("angular")
{
    TEST_CASE("6j spot value {1 1 1; 1 1 1} = 1/6")
    {
        CHECK(angular::wigner_6j(1, 1, 1, 1, 1, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
        CHECK(racah_6j(1, 1, 1, 1, 1, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    }

    TEST_CASE("3j symbols agree with the Racah sum")
    {
        int compared = 0;
        for (double j1 : halves(4.5)) {
            for (double j2 : {0.5, 1.0, 1.5}) {
                for (double j3 : halves(5.0)) {
                    if (!triangle(j1, j2, j3)) {
                        continue;
                    }
                    for (double m1 = -j1; m1 <= j1 + 1e-12; m1 += 1.0) {
                        for (double m2 = -j2; m2 <= j2 + 1e-12; m2 += 1.0) {
                            const double m3 = -m1 - m2;
                            if (std::abs(m3) > j3) {
                                continue;
                            }
                            CHECK(angular::wigner_3j(j1, j2, j3, m1, m2, m3) ==
                                  doctest::Approx(racah_3j(j1, j2, j3, m1, m2, m3)).epsilon(1e-11));
                            ++compared;
                        }
                    }
                }
            }
        }
        CHECK(compared > 500);
    }

    TEST_CASE("6j symbols agree with the Racah sum")
    {
        int compared = 0;
        for (double a : {0.5, 1.0, 1.5})
            for (double b : {0.5, 1.5})
                for (double c : {1.0})
                    for (double d : halves(4.5))
                        for (double e : halves(4.5))
                            for (double f : {1.5, 2.0}) {
                                CHECK(angular::wigner_6j(a, b, c, d, e, f) ==
                                      doctest::Approx(racah_6j(a, b, c, d, e, f)).epsilon(1e-11));
                                ++compared;
                            }
        CHECK(compared > 100);
    }

    TEST_CASE("squared strengths out of each excited sublevel sum to one")
    {
        // 40K D1 (I = 4) and 39K D1 (I = 3/2)
        for (double I : {4.0, 1.5}) {
            for (double Fp = std::abs(I - 0.5); Fp <= I + 0.5; Fp += 1.0) {
                for (double mFp = -Fp; mFp <= Fp + 1e-12; mFp += 1.0) {
                    double sum = 0.0;
                    for (double F = std::abs(I - 0.5); F <= I + 0.5; F += 1.0) {
                        for (double mF = -F; mF <= F + 1e-12; mF += 1.0) {
                            const double s = angular::wigner_coupling(F, mF, Fp, mFp, 0.5, 0.5, I);
                            sum += s * s;
                        }
                    }
                    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
                }
            }
        }
    }

    TEST_CASE("integer F: mF = 0 to mF' = 0 with F' = F is forbidden")
    {
        for (double F : {1.0, 2.0}) {
            CHECK(angular::wigner_coupling(F, 0.0, F, 0.0, 0.5, 0.5, 1.5) == 0.0);
            CHECK(angular::wigner_coupling(F, 0.0, F, 0.0, 0.5, 1.5, 1.5) == 0.0);
        }
        // the neighbouring projections are allowed
        CHECK(angular::wigner_coupling(2.0, 1.0, 2.0, 1.0, 0.5, 0.5, 1.5) != 0.0);
    }

    TEST_CASE("half-integer F: every pi transition of 40K D1 is allowed")
    {
        const auto scheme =
            hyperfine::build_hyperfine_scheme(hyperfine::Species::K40, hyperfine::LineSet::D1,
                                              hyperfine::Polarization::pi);
        std::size_t expected = 0;
        for (double F : {3.5, 4.5}) {
            for (double Fp : {3.5, 4.5}) {
                for (double m = -F; m <= F + 1e-12; m += 1.0) {
                    if (std::abs(m) <= Fp) {
                        ++expected;
                        CHECK(angular::wigner_coupling(F, m, Fp, m, 0.5, 0.5, 4.0) != 0.0);
                    }
                }
            }
        }
        CHECK(scheme.couplings.size() == expected);
        for (const auto &c : scheme.couplings) {
            CHECK(c.strength != 0.0);
        }
    }

    TEST_CASE("selection rules give zero, invalid numbers throw")
    {
        CHECK(angular::wigner_coupling(4.5, 4.5, 3.5, 2.5, 0.5, 0.5, 4.0) == 0.0); // |q| = 2
        CHECK_THROWS_AS(angular::wigner_coupling(4.5, 0.3, 4.5, 0.5, 0.5, 0.5, 4.0), DomainError);
        CHECK_THROWS_AS(angular::wigner_coupling(5.5, 0.5, 4.5, 0.5, 0.5, 0.5, 4.0), DomainError);
        CHECK_THROWS_AS(angular::wigner_coupling(4.5, 5.5, 4.5, 0.5, 0.5, 0.5, 4.0), DomainError);
        CHECK_THROWS_AS(angular::wigner_coupling(-0.5, 0.5, 4.5, 0.5, 0.5, 0.5, 4.0), DomainError);
        CHECK_FALSE(angular::is_half_integer(0.25));
        CHECK(angular::is_half_integer(3.5));
    }
}
