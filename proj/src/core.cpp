#include <fwm/core.hpp>

#include <cmath>

namespace fwm {

double dimensionless_density(double density, double wavelength)
{
    if (!(density > 0.0) || !(wavelength > 0.0)) {
        throw DomainError("dimensionless_density: density and wavelength must be positive");
    }
    return 3.0 * density * wavelength * wavelength * wavelength / (64.0 * pi * pi);
}

double dipole_from_radiative_decay(double radiative_decay, double wavevector)
{
    if (!(radiative_decay > 0.0) || !(wavevector > 0.0)) {
        throw DomainError("dipole_from_radiative_decay: rate and wavevector must be positive");
    }
    const double k3 = wavevector * wavevector * wavevector;
    return std::sqrt(3.0 * constants::hbar * radiative_decay / (4.0 * k3));
}

double radiative_decay_from_dipole(double dipole, double wavevector)
{
    if (!(dipole > 0.0) || !(wavevector > 0.0)) {
        throw DomainError("radiative_decay_from_dipole: dipole and wavevector must be positive");
    }
    const double k3 = wavevector * wavevector * wavevector;
    return 4.0 * k3 * dipole * dipole / (3.0 * constants::hbar);
}

double FourLevelParams::dipole() const
{
    return dipole_from_radiative_decay(radiative_decay, wavevector());
}

double FourLevelParams::coupling_scale() const
{
    const double mu = dipole();
    return density * mu * mu / constants::hbar;
}

void FourLevelParams::validate() const
{
    if (!(control_rabi >= 0.0)) {
        throw DomainError("FourLevelParams: control Rabi frequency must be >= 0");
    }
    if (!(radiative_decay > 0.0)) {
        throw DomainError("FourLevelParams: radiative decay must be > 0");
    }
    // relative slack: gamma = Gamma_r / 2 is the radiative limit itself
    if (!(optical_coherence_decay >= 0.5 * radiative_decay * (1.0 - 1e-12))) {
        throw DomainError("FourLevelParams: optical coherence decay below Gamma_r / 2");
    }
    if (!(ground_coherence_decay >= 0.0)) {
        throw DomainError("FourLevelParams: ground coherence decay must be >= 0");
    }
    if (!(density > 0.0)) {
        throw DomainError("FourLevelParams: density must be > 0");
    }
    if (!(wavelength > 0.0)) {
        throw DomainError("FourLevelParams: wavelength must be > 0");
    }
}

FourLevelParams FourLevelParams::from_relative(double radiative_decay, double omega_rel,
                                               double gamma_rel, double gamma21_rel,
                                               double density, double wavelength)
{
    FourLevelParams p;
    p.radiative_decay = radiative_decay;
    p.control_rabi = omega_rel * radiative_decay;
    p.optical_coherence_decay = gamma_rel * radiative_decay;
    p.ground_coherence_decay = gamma21_rel * radiative_decay;
    p.density = density;
    p.wavelength = wavelength;
    return p;
}

bool SusceptibilityMatrix::finite() const
{
    auto ok = [](complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(chi11) && ok(chi12) && ok(chi21) && ok(chi22);
}

std::string to_string(BranchTag tag)
{
    switch (tag) {
    case BranchTag::local_absorption:
        return "local_absorption";
    case BranchTag::continuity:
        return "continuity";
    }
    return "unknown";
}

BranchTag branch_tag_from_string(const std::string &name)
{
    if (name == "local_absorption") {
        return BranchTag::local_absorption;
    }
    if (name == "continuity") {
        return BranchTag::continuity;
    }
    throw ConfigurationError("unknown branch tag '" + name + "'");
}

} // namespace fwm
