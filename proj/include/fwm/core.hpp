#ifndef FWM_CORE_HPP
#define FWM_CORE_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

/**
 * Shared units, constants and value types.
 *
 * Internal conventions: angular frequencies in rad/s, lengths in cm,
 * densities in atoms/cm^3, dipoles in Gaussian units (esu cm).
 * Susceptibilities are Gaussian, so that a complex index change is
 * dn = 2 pi chi.
 */
namespace fwm {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr complex I{0.0, 1.0};

namespace constants {
/* CGS */
inline constexpr double hbar = 1.054571817e-27;     // erg s
inline constexpr double k_boltzmann = 1.380649e-16; // erg / K
inline constexpr double atomic_mass_unit = 1.66053906660e-24; // g
/* SI, used by the vapour-pressure fit */
inline constexpr double k_boltzmann_si = 1.380649e-23; // J / K
} // namespace constants

namespace units {
/// Cyclic MHz -> rad/s.
constexpr double mhz(double f) { return 2.0 * pi * 1.0e6 * f; }
constexpr double ghz(double f) { return 2.0 * pi * 1.0e9 * f; }
constexpr double to_mhz(double omega) { return omega / (2.0 * pi * 1.0e6); }
/// Nanometres -> centimetres.
constexpr double nm(double length) { return length * 1.0e-7; }
} // namespace units

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Parameters of the idealized symmetric four-level mixing medium.
 *
 * Both control fields share one Rabi frequency, every optical coherence
 * decays at the same rate and all dipoles are equal. The dipole is never
 * an input: it follows from the radiative rate and the wavelength.
 */
struct FourLevelParams
{
    double control_rabi = 0.0;           // Omega, rad/s
    double optical_coherence_decay = 0.0; // gamma, rad/s
    double ground_coherence_decay = 0.0; // gamma_21, rad/s
    double radiative_decay = 0.0;        // Gamma_r, rad/s
    double density = 0.0;                // atoms / cm^3
    double wavelength = 0.0;             // cm

    double wavevector() const { return 2.0 * pi / wavelength; }
    double dipole() const;

    /// N |mu|^2 / hbar, in rad/s.
    double coupling_scale() const;

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    /**
     * Build from rates expressed in units of Gamma_r, the way figure
     * captions quote them ("Omega = 0.1 Gamma_r").
     */
    static FourLevelParams from_relative(double radiative_decay, double omega_rel,
                                         double gamma_rel, double gamma21_rel,
                                         double density, double wavelength);

    bool operator==(const FourLevelParams &) const = default;
};

/// dn = dn' + i dn''; dn'' > 0 is absorption.
struct ComplexIndex
{
    double real_part = 0.0;
    double imag_part = 0.0;

    static ComplexIndex from(complex dn) { return {dn.real(), dn.imag()}; }
    complex value() const { return {real_part, imag_part}; }
    bool operator==(const ComplexIndex &) const = default;
};

struct SusceptibilityMatrix
{
    complex chi11{};
    complex chi12{};
    complex chi21{};
    complex chi22{};

    bool finite() const;
    bool operator==(const SusceptibilityMatrix &) const = default;
};

enum class BranchTag {
    /// lambda_minus taken as the locally more absorbing root.
    local_absorption,
    /// roots followed by continuity along a detuning grid.
    continuity,
};

/// Eigen-constants (1/cm) of the coupled probe equations.
struct PropagationConstants
{
    complex lambda_plus{};
    complex lambda_minus{};
    BranchTag branch_tag = BranchTag::local_absorption;

    bool operator==(const PropagationConstants &) const = default;
};

/// r = 3 N lambda^3 / (64 pi^2).
double dimensionless_density(double density, double wavelength);

/// mu = sqrt(3 hbar Gamma_r / 4 k^3), Gaussian units.
double dipole_from_radiative_decay(double radiative_decay, double wavevector);

/// Inverse of dipole_from_radiative_decay.
double radiative_decay_from_dipole(double dipole, double wavevector);

std::string to_string(BranchTag tag);
BranchTag branch_tag_from_string(const std::string &name);

} // namespace fwm

#endif
