#ifndef FWM_PROPAGATION_HPP
#define FWM_PROPAGATION_HPP

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include <fwm/core.hpp>

/**
 * Coupled propagation of the probe amplitudes (E1, E2^*) along z.
 *
 * Normal modes evolve as exp(lambda z), so dn = lambda / (i k):
 * dn' = Im lambda / k and dn'' = -Re lambda / k.
 */
namespace fwm::propagation {

/// Roots with lambda_minus taken as the locally more absorbing one.
PropagationConstants propagation_constants(const SusceptibilityMatrix &chi, double k1,
                                           double k2);

/**
 * Roots along a detuning grid, followed by nearest-neighbour continuity.
 * The trace whose least absorption over the grid is larger becomes
 * lambda_minus.
 */
std::vector<PropagationConstants> track_branches(std::span<const SusceptibilityMatrix> chi,
                                                 double k1, double k2);

ComplexIndex index_from_constant(complex lambda, double k);

struct FieldPair
{
    complex e1{};
    complex e2_conj{};
};

struct SlabSolution
{
    Eigen::Matrix2cd transfer = Eigen::Matrix2cd::Identity();
    double thickness = 0.0;
    complex s{};       // sqrt((k1 chi11 + k2 chi22^*)^2 - 4 k1 k2 chi12 chi21^*)
    complex delta_a{}; // k1 chi11 - k2 chi22^*

    FieldPair apply(const FieldPair &in) const;
};

/// Phase-matched slab of thickness L (cm); exact for any S including S = 0.
SlabSolution slab_transfer(const SusceptibilityMatrix &chi, double k1, double k2, double L);

/**
 * Large-thickness form keeping only the less attenuated normal mode.
 * Throws DomainError unless (Re lambda_dominant - Re lambda_other) L
 * exceeds `threshold`.
 */
FieldPair slab_asymptotic(const SusceptibilityMatrix &chi, double k1, double k2, double L,
                          const FieldPair &in, double threshold = 8.0);

using ChiProfile = std::function<SusceptibilityMatrix(double z)>;

struct IntegrationOptions
{
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-14;
    double initial_step = 0.0; // 0: chosen from the coupling scale
    long max_steps = 2'000'000;
};

struct IntegrationResult
{
    FieldPair fields;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

/**
 * Adaptive Dormand-Prince integration of
 *   dE1/dz   =  2 pi i k1 (chi11 E1 + chi12 e^{i dk z} E2^*)
 *   d(E2^*) / dz = -2 pi i k2 (chi22^* E2^* + chi21^* e^{-i dk z} E1).
 * Throws NumericalError when the step size underflows.
 */
IntegrationResult integrate_coupled(const ChiProfile &chi, double k1, double k2,
                                    double delta_k, double L, const FieldPair &in,
                                    const IntegrationOptions &options = {});

IntegrationResult integrate_coupled(const SusceptibilityMatrix &chi, double k1, double k2,
                                    double delta_k, double L, const FieldPair &in,
                                    const IntegrationOptions &options = {});

} // namespace fwm::propagation

#endif
