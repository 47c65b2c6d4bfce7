#ifndef FWM_BROADENING_HPP
#define FWM_BROADENING_HPP

#include <functional>
#include <string>
#include <vector>

#include <fwm/core.hpp>

/// Collisional and Doppler broadening, and the potassium vapour model.
namespace fwm::broadening {

struct BroadeningSpec
{
    /// beta in gamma_coll = beta N, rad cm^3 / s (K D1: 2 beta = 0.7e-13 MHz cm^3).
    double collisional_coefficient = units::mhz(0.35e-13);
    double temperature = 300.0;                             // K
    double mass = 39.963998 * constants::atomic_mass_unit; // g, 40K
    int doppler_nodes = 64;

    /// Throws DomainError on a broken invariant.
    void validate() const;
    bool operator==(const BroadeningSpec &) const = default;
};

/// gamma_coll = beta N (rad/s).
double collisional_gamma(double density, const BroadeningSpec &spec);

/**
 * Upper estimate r Gamma_r / gamma of the index at the zero-absorption
 * point with gamma = Gamma_r / 2 + beta N.
 */
double max_index_estimate(double density, double wavelength, double radiative_decay,
                          const BroadeningSpec &spec);

/// W_D = k sqrt(2 k_B T / m), rad/s.
double doppler_width(double temperature, double mass, double wavevector);

/// Nodes and weights for the weight exp(-x^2) / sqrt(pi); weights sum to one.
struct GaussHermiteRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch rule with n nodes (n >= 1).
GaussHermiteRule gauss_hermite(int n);

struct DopplerAverage
{
    std::vector<complex> value;
    int nodes = 0;
    /// max |avg(2n) - avg(n)| / max |avg(2n)|; zero without a doubling check.
    double relative_change = 0.0;
    bool converged = true;
    std::string warning;
};

/**
 * Average of a vector-valued spectrum over the 1D Maxwell-Boltzmann
 * distribution of the shift delta_omega with width W_D. With the doubling
 * check the value comes from the 2n rule and `converged` reports whether
 * it moved by less than `tolerance` relative to the n rule.
 */
DopplerAverage doppler_average(const std::function<std::vector<complex>(double)> &spectrum,
                               double doppler_width, int nodes = 64,
                               bool check_doubling = true, double tolerance = 1e-6);

/// Scalar convenience form.
complex doppler_average(const std::function<complex(double)> &spectrum, double doppler_width,
                        int nodes = 64);

enum class VaporBranch { low, high };

/// log10 p(mbar) from the two-branch fit; no range check.
double vapor_pressure_mbar(double temperature, VaporBranch branch);

/// Branch-switched vapour density (atoms/cm^3) for 298 K <= T <= 600 K.
double vapor_density(double temperature);

} // namespace fwm::broadening

#endif
