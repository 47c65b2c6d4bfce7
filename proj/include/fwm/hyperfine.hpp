#ifndef FWM_HYPERFINE_HPP
#define FWM_HYPERFINE_HPP

#include <string>

#include <fwm/core.hpp>
#include <fwm/liouville.hpp>

/**
 * Level-scheme builders: potassium hyperfine manifolds and the idealized
 * four-level mixing system, plus the driven configurations used by the
 * scenarios.
 *
 * Energies use a shared reference from which the optical carrier of the
 * 40K D1 line has been removed; field frequencies are quoted against the
 * same reference.
 */
namespace fwm::hyperfine {

enum class Species { K40, K39 };
enum class LineSet {
    /// Ground manifolds plus every D1 excited manifold.
    D1,
    /// Ground manifolds, D1 F'=9/2 and D2 F'=9/2 (40K only).
    D1_D2,
};
enum class Polarization { pi };

std::string to_string(Species s);
std::string to_string(LineSet l);
Species species_from_string(const std::string &name);
LineSet line_set_from_string(const std::string &name);
Polarization polarization_from_string(const std::string &name);

/// Atomic constants that are inputs rather than outputs (all rad/s).
struct HyperfineConstants
{
    double d1_decay = units::mhz(6.035);
    double d1_wavelength = units::nm(770.1);
    double d2_decay = units::mhz(6.035);
    double d2_wavelength = units::nm(766.7);

    // 40K: inverted hyperfine structure, F = 9/2 lowest
    double k40_ground_splitting = units::ghz(1.286); // E(7/2) - E(9/2)
    double k40_d1_splitting = units::ghz(0.155);     // E(7/2') - E(9/2')
    double k40_d2_a = units::mhz(-7.585);
    double k40_d2_b = units::mhz(-3.445);
    double k40_fine_structure = units::ghz(1729.6); // D2 - D1 line centres

    // 39K: F = 2 above F = 1
    double k39_ground_splitting = units::mhz(461.7);
    double k39_d1_splitting = units::mhz(55.5);
    double k39_isotope_shift = units::mhz(125.58); // D1 centre, 40K minus 39K

    bool operator==(const HyperfineConstants &) const = default;
};

/// Manifold label, e.g. "4S1/2 F=9/2".
std::string manifold_name(const std::string &term, double F);

/**
 * All |F, mF> sublevels of the requested manifolds with pi couplings
 * |F, mF> <-> |F', mF> and spontaneous decay into every allowed
 * sublevel (rates proportional to the squared coupling, totalling the
 * line's radiative rate per excited sublevel).
 */
liouville::LevelScheme build_hyperfine_scheme(Species species, LineSet lines,
                                              Polarization polarization,
                                              const HyperfineConstants &constants = {});

/// Centre energy of a manifold (its sublevels are degenerate).
double manifold_energy(const liouville::LevelScheme &scheme, const std::string &manifold);

/// A level scheme together with the fields driving it and the probe readout.
struct DrivenScheme
{
    liouville::LevelScheme scheme;
    liouville::DriveAssignment drives;
    liouville::ProbeSpec probe;
};

/**
 * Idealized symmetric four-level system: equal dipoles, resonant controls,
 * decay Gamma_r / 2 into each ground state, optical coherences at gamma and
 * ground coherence at gamma_21. With `neglect_excited_coherence` the
 * first-order excited-state coherence is held at zero, which is the
 * approximation behind the closed-form susceptibilities.
 */
DrivenScheme idealized_four_level(const FourLevelParams &p,
                                  bool neglect_excited_coherence = true);

struct K40MixingOptions
{
    LineSet lines = LineSet::D1;
    double control1_rabi = 0.0;   // rad/s
    double control2_rabi = 0.0;   // rad/s
    double density = 0.0;         // 40K atoms / cm^3
    double optical_dephasing = 0.0; // collisional addition to optical coherences
    double ground_dephasing = 0.0;  // between the two ground manifolds
    double control1_offset = 0.0;   // control detuning from manifold centres
    double control2_offset = 0.0;
};

/**
 * 40K mixing loop |1> = F=9/2, |2> = F=7/2, |3> = D1 F'=9/2, |4> = D1
 * F'=7/2 (or D2 F'=9/2): control 1 on 1-3, control 2 on 2-4, probe 1 on
 * 1-4, probe 2 on 2-3.
 */
DrivenScheme k40_mixing_scheme(const K40MixingOptions &options,
                               const HyperfineConstants &constants = {});

struct K39RamanOptions
{
    double control_rabi = 0.0;       // rad/s
    double density = 0.0;            // 39K atoms / cm^3
    double raman_offset = 0.0;       // delta_0: Raman resonance position in delta
    double probe2_frequency = 0.0;   // 40K probe-2 frequency at delta = 0
    double optical_dephasing = 0.0;
    double ground_dephasing = 0.0;
    double ground_relaxation = 0.0;  // population exchange between ground sublevels
};

/**
 * 39K Raman absorber for probe 2: the probe addresses F=2 -> F', the
 * control addresses F=1 -> F'. The control frequency is set so that the
 * two-photon resonance falls at delta = raman_offset.
 */
DrivenScheme k39_raman_scheme(const K39RamanOptions &options,
                              const HyperfineConstants &constants = {});

} // namespace fwm::hyperfine

#endif
