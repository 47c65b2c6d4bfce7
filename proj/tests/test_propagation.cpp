#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <fwm/analytic.hpp>
#include <fwm/propagation.hpp>

using namespace fwm;
using namespace fwm::propagation;

namespace {

const double gamma_r = units::mhz(6.035);
const double lambda_d1 = units::nm(770.1);
const double k = 2.0 * pi / lambda_d1;

/// Coupled-mode matrix of d(E1, E2^*)/dz for phase-matched fields.
Eigen::Matrix2cd mode_matrix(const SusceptibilityMatrix &c, double k1, double k2)
{
    Eigen::Matrix2cd m;
    m << 2.0 * pi * I * k1 * c.chi11, 2.0 * pi * I * k1 * c.chi12,
        -2.0 * pi * I * k2 * std::conj(c.chi21), -2.0 * pi * I * k2 * std::conj(c.chi22);
    return m;
}

SusceptibilityMatrix random_chi(std::mt19937_64 &rng, double scale)
{
    std::normal_distribution<double> n(0.0, scale);
    SusceptibilityMatrix c{{n(rng), std::abs(n(rng))}, {n(rng), n(rng)}, {n(rng), n(rng)},
                           {n(rng), std::abs(n(rng))}};
    return c;
}

double rel(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b)
{
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1e-300);
}

} // namespace

TEST_SUITE("propagation")
{
    TEST_CASE("propagation constants are the eigenvalues of the coupled-mode matrix")
    {
        std::mt19937_64 rng(31);
        for (int i = 0; i < 200; ++i) {
            const SusceptibilityMatrix c = random_chi(rng, 1e-3);
            const double k2 = k * (1.0 + 0.01 * i / 200.0);
            const PropagationConstants pc = propagation_constants(c, k, k2);
            Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(mode_matrix(c, k, k2));
            const complex e0 = es.eigenvalues()(0);
            const complex e1 = es.eigenvalues()(1);
            const double scale = std::abs(e0) + std::abs(e1);
            const double direct = std::abs(pc.lambda_plus - e0) + std::abs(pc.lambda_minus - e1);
            const double crossed = std::abs(pc.lambda_plus - e1) + std::abs(pc.lambda_minus - e0);
            CHECK(std::min(direct, crossed) < 1e-10 * scale);
            CHECK(pc.lambda_minus.real() <= pc.lambda_plus.real());
            CHECK(pc.branch_tag == BranchTag::local_absorption);
        }
    }

    TEST_CASE("idealized medium: roots are 2 pi i k (chi11 +- chi12)")
    {
        const FourLevelParams p = FourLevelParams::from_relative(gamma_r, 0.1, 0.5, 1e-3, 1e14, lambda_d1);
        for (double d = -3.0; d <= 3.0; d += 0.1) {
            const SusceptibilityMatrix c = analytic::fwm_susceptibilities(p, d * gamma_r);
            const PropagationConstants pc = propagation_constants(c, k, k);
            const complex plus = 2.0 * pi * I * k * (c.chi11 + c.chi12);
            const complex minus = 2.0 * pi * I * k * (c.chi11 - c.chi12);
            const double scale = std::abs(plus) + std::abs(minus);
            const double direct = std::abs(pc.lambda_plus - plus) + std::abs(pc.lambda_minus - minus);
            const double crossed = std::abs(pc.lambda_plus - minus) + std::abs(pc.lambda_minus - plus);
            CHECK(std::min(direct, crossed) < 1e-10 * scale);
        }
    }

    TEST_CASE("index convention: dn' = Im lambda / k, dn'' = -Re lambda / k")
    {
        const ComplexIndex n = index_from_constant(complex(-2.0, 3.0), 4.0);
        CHECK(n.real_part == 0.75);
        CHECK(n.imag_part == 0.5);
        CHECK_THROWS_AS(index_from_constant(complex(1.0), 0.0), DomainError);
    }

    TEST_CASE("branch tracking follows the analytic branches across the grid")
    {
        // in the ideal medium 2 pi i k (chi11 +- chi12) are the smooth branches
        for (double n : {1e14, 1e15}) {
            const FourLevelParams p = FourLevelParams::from_relative(gamma_r, 0.1, 0.5, 1e-3, n, lambda_d1);
            std::vector<SusceptibilityMatrix> chi;
            for (int i = 0; i <= 2000; ++i) {
                chi.push_back(analytic::fwm_susceptibilities(p, (-3.0 + 0.003 * i) * gamma_r));
            }
            const auto tracked = track_branches(chi, k, k);
            REQUIRE(tracked.size() == chi.size());
            int as_plus = 0;
            int as_minus = 0;
            for (std::size_t i = 0; i < tracked.size(); ++i) {
                CHECK(tracked[i].branch_tag == BranchTag::continuity);
                const complex plus = 2.0 * pi * I * k * (chi[i].chi11 + chi[i].chi12);
                const complex minus = 2.0 * pi * I * k * (chi[i].chi11 - chi[i].chi12);
                const double tol = 1e-10 * (std::abs(plus) + std::abs(minus));
                if (std::abs(tracked[i].lambda_plus - plus) + std::abs(tracked[i].lambda_minus - minus) < tol) {
                    ++as_plus;
                } else if (std::abs(tracked[i].lambda_plus - minus) + std::abs(tracked[i].lambda_minus - plus) < tol) {
                    ++as_minus;
                }
            }
            // one labelling for the whole grid, no swaps
            CHECK(std::max(as_plus, as_minus) == static_cast<int>(tracked.size()));
            // the branch reaching lower absorption is labelled plus
            CHECK(as_plus == static_cast<int>(tracked.size()));
        }
    }

    TEST_CASE("slab transfer equals the matrix exponential")
    {
        std::mt19937_64 rng(32);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            const SusceptibilityMatrix c = random_chi(rng, 1e-3);
            const double k2 = k * (0.98 + 0.04 * u(rng));
            const Eigen::Matrix2cd m = mode_matrix(c, k, k2);
            const double L = std::exp(std::log(0.01) + u(rng) * std::log(500.0)) / (2.0 * pi * k * 1e-3);
            const Eigen::Matrix2cd oracle = (m * L).exp();
            CHECK(rel(slab_transfer(c, k, k2, L).transfer, oracle) < 1e-9);
        }
    }

    TEST_CASE("slab transfer is exact at the degenerate point S = 0")
    {
        // chi11 = chi12 = x, chi21 = chi22 = x^* makes S^2 vanish identically
        const SusceptibilityMatrix c{{1e-4, 2e-5}, {1e-4, 2e-5}, {1e-4, -2e-5}, {1e-4, -2e-5}};
        const SlabSolution s = slab_transfer(c, k, k, 0.1);
        CHECK(std::abs(s.s) < 1e-6 * k * 1e-4);
        const Eigen::Matrix2cd oracle = (mode_matrix(c, k, k) * 0.1).exp();
        CHECK(rel(s.transfer, oracle) < 1e-10);
    }

    TEST_CASE("zero thickness is the identity and slabs compose")
    {
        std::mt19937_64 rng(33);
        for (int i = 0; i < 50; ++i) {
            const SusceptibilityMatrix c = random_chi(rng, 1e-3);
            CHECK(slab_transfer(c, k, k, 0.0).transfer == Eigen::Matrix2cd::Identity());
            const double a = 0.3 / (2.0 * pi * k * 1e-3);
            const double b = 0.7 / (2.0 * pi * k * 1e-3);
            const Eigen::Matrix2cd ab = slab_transfer(c, k, k, a + b).transfer;
            const Eigen::Matrix2cd prod = slab_transfer(c, k, k, b).transfer * slab_transfer(c, k, k, a).transfer;
            CHECK(rel(ab, prod) < 1e-12);
        }
        CHECK_THROWS_AS(slab_transfer({}, k, k, -1.0), DomainError);
    }

    TEST_CASE("adaptive integration matches the slab transfer")
    {
        std::mt19937_64 rng(34);
        for (int i = 0; i < 20; ++i) {
            const SusceptibilityMatrix c = random_chi(rng, 1e-3);
            const double L = 3.0 / (2.0 * pi * k * 1e-3);
            const FieldPair in{complex(1.0, 0.2), complex(-0.3, 0.5)};
            const FieldPair slab = slab_transfer(c, k, k, L).apply(in);
            const IntegrationResult ode = integrate_coupled(c, k, k, 0.0, L, in);
            const double scale = std::abs(slab.e1) + std::abs(slab.e2_conj);
            CHECK(std::abs(ode.fields.e1 - slab.e1) + std::abs(ode.fields.e2_conj - slab.e2_conj) <
                  1e-8 * scale);
            CHECK(ode.accepted_steps > 0);
        }
    }

    TEST_CASE("phase mismatch: integration against the co-moving frame oracle")
    {
        // substituting E2^* = e^{-i dk z} G turns the system into a constant one
        std::mt19937_64 rng(35);
        const SusceptibilityMatrix c = random_chi(rng, 1e-3);
        const double dk = 2.0 * pi * k * 1e-3 * 0.7;
        const double L = 2.0 / (2.0 * pi * k * 1e-3);
        Eigen::Matrix2cd m = mode_matrix(c, k, k);
        m(1, 1) += I * dk;
        const Eigen::Vector2cd y0(complex(1.0, 0.0), complex(0.4, -0.1));
        const Eigen::Vector2cd y = (m * L).exp() * y0;
        const FieldPair out = integrate_coupled(c, k, k, dk, L, {y0(0), y0(1)}).fields;
        const complex e2 = std::exp(-I * dk * L) * y(1);
        CHECK(std::abs(out.e1 - y(0)) < 1e-8 * y.norm());
        CHECK(std::abs(out.e2_conj - e2) < 1e-8 * y.norm());
    }

    TEST_CASE("thick-slab asymptote keeps the dominant mode")
    {
        const FourLevelParams p = FourLevelParams::from_relative(gamma_r, 0.1, 0.5, 1e-3, 1e14, lambda_d1);
        const SusceptibilityMatrix c = analytic::fwm_susceptibilities(p, 0.5 * gamma_r);
        const PropagationConstants pc = propagation_constants(c, k, k);
        const double gap = pc.lambda_plus.real() - pc.lambda_minus.real();
        const FieldPair in{1.0, 0.0};
        const double L = 30.0 / gap;
        const FieldPair exact = slab_transfer(c, k, k, L).apply(in);
        const FieldPair asym = slab_asymptotic(c, k, k, L, in);
        const double scale = std::abs(exact.e1) + std::abs(exact.e2_conj);
        CHECK(std::abs(asym.e1 - exact.e1) + std::abs(asym.e2_conj - exact.e2_conj) < 1e-9 * scale);
        CHECK_THROWS_AS(slab_asymptotic(c, k, k, 1.0 / gap, in), DomainError);
    }
}
