#ifndef FWM_ANALYTIC_HPP
#define FWM_ANALYTIC_HPP

#include <optional>

#include <fwm/core.hpp>

/**
 * Closed-form susceptibilities and index estimates.
 *
 * Everything here is a pure function of value types. Detunings and rates
 * are in rad/s; returned susceptibilities are dimensionless (Gaussian).
 */
namespace fwm::analytic {

/// One resonance of a two-component absorbing/amplifying medium.
struct ResonanceSpecies
{
    double density = 0.0;               // atoms / cm^3
    double dipole = 0.0;                // esu cm
    double coherence_decay = 0.0;       // rad/s
    double detuning = 0.0;              // rad/s, transition minus probe
    double population_difference = 0.0; // rho_11 - rho_22, > 0 absorbs
};

struct RamanPairParams
{
    ResonanceSpecies first;
    ResonanceSpecies second;
};

/// Two-level absorber added on the second probe transition.
struct TwoLevelAbsorberParams
{
    double density = 0.0;         // N'
    double dipole = 0.0;          // mu'
    double coherence_decay = 0.0; // gamma_abs
    double offset = 0.0;          // delta_0 = omega'_32 - omega_32
};

/// Sum of an absorbing and an amplifying Lorentzian resonance.
ComplexIndex absorber_amplifier_index(const RamanPairParams &p);

/// rho_ll - rho_uu of the symmetric control-driven system, in (0, 1/2].
double population_difference(double control_rabi, double gamma, double radiative_decay);

/**
 * All four probe susceptibilities of the idealized mixing medium at probe
 * detuning delta = omega_41 - omega_1.
 */
SusceptibilityMatrix fwm_susceptibilities(const FourLevelParams &p, double delta);

/// Index of the lambda_plus normal mode, evaluated from its own closed form.
ComplexIndex index_plus(const FourLevelParams &p, double delta);

/**
 * Non-negative detuning at which Im dn_plus vanishes; the mirror root is
 * its negative. Empty when 4 Omega^4 / gamma^2 < gamma_21^2.
 */
std::optional<double> zero_absorption_detuning(double control_rabi, double gamma,
                                               double gamma21);

/// Enhancement factor F = dn_plus' / r at the zero-absorption point.
std::optional<double> enhancement_factor(double control_rabi, double gamma, double gamma21,
                                         double radiative_decay);

struct RabiWindow
{
    double lower = 0.0;
    double upper = 0.0;
    int grid_points = 400;
};

struct RabiOptimum
{
    double control_rabi = 0.0;
    double factor = 0.0;
    /// Set when the maximum sits on a window edge or the objective is flat.
    bool at_boundary = false;
};

/// Maximise F over a log-spaced grid, then refine by golden section.
RabiOptimum optimize_control_rabi(double gamma, double gamma21, double radiative_decay,
                                  const RabiWindow &window);

/// Pure absorber contribution to chi_22.
complex two_level_susceptibility(const TwoLevelAbsorberParams &p, double delta);

/// Mixing medium with the absorber added to chi_22 only.
SusceptibilityMatrix composite_susceptibilities(const FourLevelParams &fwm,
                                                const TwoLevelAbsorberParams &absorber,
                                                double delta);

} // namespace fwm::analytic

#endif
