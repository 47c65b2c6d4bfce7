#include <fwm/hyperfine.hpp>

#include <cmath>
#include <vector>

#include <fwm/angular.hpp>

namespace fwm::hyperfine {

namespace {

using liouville::AtomicState;
using liouville::FieldDrive;
using liouville::FieldRole;
using liouville::LevelScheme;

struct Manifold
{
    std::string term;
    double J;
    double F;
    double energy;
    bool excited;
    double decay;        // radiative rate of the line (excited only)
    double dipole_scale; // line dipole relative to the reference dipole
};

std::string format_j(double j)
{
    const long twice = std::lround(2.0 * j);
    if (twice % 2 == 0) {
        return std::to_string(twice / 2);
    }
    return std::to_string(twice) + "/2";
}

/// Energies of two hyperfine levels about their centre of gravity.
std::pair<double, double> centred_pair(double F_low, double F_high, double splitting)
{
    const double g_low = 2.0 * F_low + 1.0;
    const double g_high = 2.0 * F_high + 1.0;
    return {-splitting * g_high / (g_low + g_high), splitting * g_low / (g_low + g_high)};
}

/// Magnetic-dipole plus electric-quadrupole hyperfine shift.
double hyperfine_shift(double F, double J, double I, double a, double b)
{
    const double K = F * (F + 1.0) - I * (I + 1.0) - J * (J + 1.0);
    double shift = 0.5 * a * K;
    if (J > 0.5 && I > 0.5) {
        shift += b * (1.5 * K * (K + 1.0) - 2.0 * I * (I + 1.0) * J * (J + 1.0)) /
                 (4.0 * I * (2.0 * I - 1.0) * J * (2.0 * J - 1.0));
    }
    return shift;
}

double line_dipole_scale(double decay, double wavelength, const HyperfineConstants &c)
{
    return std::sqrt(decay / c.d1_decay * std::pow(wavelength / c.d1_wavelength, 3));
}

LevelScheme assemble(const std::vector<Manifold> &manifolds, double I)
{
    LevelScheme scheme;
    struct Span
    {
        std::size_t first;
        std::size_t count;
    };
    std::vector<Span> spans;
    for (const auto &m : manifolds) {
        const std::string name = manifold_name(m.term, m.F);
        const std::size_t first = scheme.states.size();
        const long twice_f = std::lround(2.0 * m.F);
        for (long tm = -twice_f; tm <= twice_f; tm += 2) {
            const double mF = 0.5 * static_cast<double>(tm);
            scheme.states.push_back(
                {name + " mF=" + (mF < 0 ? "-" : "") + format_j(std::abs(mF)), name, m.energy,
                 m.F, mF, m.excited});
        }
        spans.push_back({first, scheme.states.size() - first});
    }

    for (std::size_t a = 0; a < manifolds.size(); ++a) {
        const auto &g = manifolds[a];
        if (g.excited) {
            continue;
        }
        for (std::size_t b = 0; b < manifolds.size(); ++b) {
            const auto &e = manifolds[b];
            if (!e.excited) {
                continue;
            }
            for (std::size_t i = spans[a].first; i < spans[a].first + spans[a].count; ++i) {
                for (std::size_t j = spans[b].first; j < spans[b].first + spans[b].count; ++j) {
                    const double mF = scheme.states[i].mF;
                    const double mFp = scheme.states[j].mF;
                    if (std::abs(mF - mFp) > 1.0 + 1e-9) {
                        continue;
                    }
                    const double c =
                        angular::wigner_coupling(g.F, mF, e.F, mFp, g.J, e.J, I);
                    if (c == 0.0) {
                        continue;
                    }
                    scheme.decays.push_back({j, i, e.decay * c * c});
                    if (std::abs(mF - mFp) < 1e-9) {
                        scheme.couplings.push_back({i, j, e.dipole_scale * c});
                    }
                }
            }
        }
    }
    return scheme;
}

} // namespace

std::string to_string(Species s)
{
    return s == Species::K40 ? "K40" : "K39";
}

std::string to_string(LineSet l)
{
    return l == LineSet::D1 ? "D1" : "D1_D2";
}

Species species_from_string(const std::string &name)
{
    if (name == "K40") {
        return Species::K40;
    }
    if (name == "K39") {
        return Species::K39;
    }
    throw ConfigurationError("unsupported species '" + name + "'");
}

LineSet line_set_from_string(const std::string &name)
{
    if (name == "D1") {
        return LineSet::D1;
    }
    if (name == "D1_D2") {
        return LineSet::D1_D2;
    }
    throw ConfigurationError("unsupported line set '" + name + "'");
}

Polarization polarization_from_string(const std::string &name)
{
    if (name == "pi") {
        return Polarization::pi;
    }
    throw ConfigurationError("unsupported polarization '" + name + "' (only pi)");
}

std::string manifold_name(const std::string &term, double F)
{
    return term + " F=" + format_j(F);
}

liouville::LevelScheme build_hyperfine_scheme(Species species, LineSet lines,
                                              Polarization polarization,
                                              const HyperfineConstants &c)
{
    if (polarization != Polarization::pi) {
        throw ConfigurationError("only pi polarization is supported");
    }
    std::vector<Manifold> manifolds;
    double I = 0.0;
    if (species == Species::K40) {
        I = 4.0;
        const auto [g92, g72] = centred_pair(4.5, 3.5, c.k40_ground_splitting);
        const auto [e92, e72] = centred_pair(4.5, 3.5, c.k40_d1_splitting);
        manifolds.push_back({"4S1/2", 0.5, 4.5, g92, false, 0.0, 0.0});
        manifolds.push_back({"4S1/2", 0.5, 3.5, g72, false, 0.0, 0.0});
        manifolds.push_back({"4P1/2", 0.5, 4.5, e92, true, c.d1_decay, 1.0});
        if (lines == LineSet::D1) {
            manifolds.push_back({"4P1/2", 0.5, 3.5, e72, true, c.d1_decay, 1.0});
        } else {
            const double shift = hyperfine_shift(4.5, 1.5, I, c.k40_d2_a, c.k40_d2_b);
            manifolds.push_back({"4P3/2", 1.5, 4.5, c.k40_fine_structure + shift, true,
                                 c.d2_decay, line_dipole_scale(c.d2_decay, c.d2_wavelength, c)});
        }
    } else if (species == Species::K39) {
        if (lines != LineSet::D1) {
            throw ConfigurationError("K39 supports the D1 line set only");
        }
        I = 1.5;
        const auto [g1, g2] = centred_pair(1.0, 2.0, c.k39_ground_splitting);
        const auto [e1, e2] = centred_pair(1.0, 2.0, c.k39_d1_splitting);
        const double centre = -c.k39_isotope_shift;
        manifolds.push_back({"4S1/2", 0.5, 1.0, g1, false, 0.0, 0.0});
        manifolds.push_back({"4S1/2", 0.5, 2.0, g2, false, 0.0, 0.0});
        manifolds.push_back({"4P1/2", 0.5, 1.0, centre + e1, true, c.d1_decay, 1.0});
        manifolds.push_back({"4P1/2", 0.5, 2.0, centre + e2, true, c.d1_decay, 1.0});
    } else {
        throw ConfigurationError("unsupported species");
    }
    LevelScheme scheme = assemble(manifolds, I);
    scheme.validate();
    return scheme;
}

double manifold_energy(const liouville::LevelScheme &scheme, const std::string &manifold)
{
    for (const auto &s : scheme.states) {
        if (s.manifold == manifold) {
            return s.energy;
        }
    }
    throw ConfigurationError("no manifold '" + manifold + "' in level scheme");
}

DrivenScheme idealized_four_level(const FourLevelParams &p, bool neglect_excited_coherence)
{
    p.validate();
    const double gr = p.radiative_decay;
    LevelScheme scheme;
    scheme.states = {
        {"1", "1", 0.0, 0.0, 0.0, false},
        {"2", "2", 2.0 * gr, 0.0, 0.0, false},
        {"3", "3", 5.0 * gr, 0.0, 0.0, true},
        {"4", "4", 5.5 * gr, 0.0, 0.0, true},
    };
    scheme.couplings = {{0, 2, 1.0}, {1, 3, 1.0}, {0, 3, 1.0}, {1, 2, 1.0}};
    scheme.decays = {{2, 0, 0.5 * gr}, {2, 1, 0.5 * gr}, {3, 0, 0.5 * gr}, {3, 1, 0.5 * gr}};
    scheme.add_optical_dephasing(p.optical_coherence_decay - 0.5 * gr);
    scheme.dephasing.push_back({0, 1, p.ground_coherence_decay});

    const auto energy = [&](std::size_t i) { return scheme.states[i].energy; };
    DrivenScheme out;
    out.drives.fields = {
        {"control1", FieldRole::control, energy(2) - energy(0), p.control_rabi, 1, {0}},
        {"control2", FieldRole::control, energy(3) - energy(1), p.control_rabi, 1, {1}},
        {"probe1", FieldRole::probe1, energy(3) - energy(0), 0.0, 1, {2}},
        {"probe2", FieldRole::probe2, energy(2) - energy(1), 0.0, 1, {3}},
    };
    out.scheme = std::move(scheme);
    out.probe.density = p.density;
    out.probe.reference_dipole = p.dipole();
    if (neglect_excited_coherence) {
        out.probe.neglected_coherences.emplace_back(2, 3);
    }
    return out;
}

DrivenScheme k40_mixing_scheme(const K40MixingOptions &o, const HyperfineConstants &c)
{
    if (!(o.density > 0.0) || o.control1_rabi < 0.0 || o.control2_rabi < 0.0 ||
        o.optical_dephasing < 0.0 || o.ground_dephasing < 0.0) {
        throw ConfigurationError("k40_mixing_scheme: invalid density, Rabi or dephasing");
    }
    LevelScheme scheme = build_hyperfine_scheme(Species::K40, o.lines, Polarization::pi, c);
    const std::string m1 = manifold_name("4S1/2", 4.5);
    const std::string m2 = manifold_name("4S1/2", 3.5);
    const std::string m3 = manifold_name("4P1/2", 4.5);
    const std::string m4 =
        o.lines == LineSet::D1 ? manifold_name("4P1/2", 3.5) : manifold_name("4P3/2", 4.5);
    scheme.add_optical_dephasing(o.optical_dephasing);
    scheme.add_dephasing(m1, m2, o.ground_dephasing);

    const double e1 = manifold_energy(scheme, m1);
    const double e2 = manifold_energy(scheme, m2);
    const double e3 = manifold_energy(scheme, m3);
    const double e4 = manifold_energy(scheme, m4);
    const double wc1 = e3 - e1 + o.control1_offset;
    const double wc2 = e4 - e2 + o.control2_offset;
    const double wp1 = e4 - e1;
    const double wp2 = wc1 + wc2 - wp1;

    DrivenScheme out;
    out.drives.fields = {
        {"control1", FieldRole::control, wc1, o.control1_rabi, 1,
         scheme.couplings_between(m1, m3)},
        {"control2", FieldRole::control, wc2, o.control2_rabi, 1,
         scheme.couplings_between(m2, m4)},
        {"probe1", FieldRole::probe1, wp1, 0.0, 1, scheme.couplings_between(m1, m4)},
        {"probe2", FieldRole::probe2, wp2, 0.0, 1, scheme.couplings_between(m2, m3)},
    };
    out.scheme = std::move(scheme);
    out.probe.density = o.density;
    out.probe.reference_dipole =
        dipole_from_radiative_decay(c.d1_decay, 2.0 * pi / c.d1_wavelength);
    return out;
}

DrivenScheme k39_raman_scheme(const K39RamanOptions &o, const HyperfineConstants &c)
{
    if (!(o.density > 0.0) || o.control_rabi < 0.0 || o.optical_dephasing < 0.0 ||
        o.ground_dephasing < 0.0 || o.ground_relaxation < 0.0) {
        throw ConfigurationError("k39_raman_scheme: invalid density, Rabi or rates");
    }
    LevelScheme scheme = build_hyperfine_scheme(Species::K39, LineSet::D1, Polarization::pi, c);
    const std::string f1 = manifold_name("4S1/2", 1.0);
    const std::string f2 = manifold_name("4S1/2", 2.0);
    scheme.add_optical_dephasing(o.optical_dephasing);
    scheme.add_dephasing(f1, f2, o.ground_dephasing);

    std::vector<std::size_t> ground;
    for (std::size_t i = 0; i < scheme.size(); ++i) {
        if (!scheme.states[i].excited) {
            ground.push_back(i);
        }
    }
    if (o.ground_relaxation > 0.0) {
        const double share = o.ground_relaxation / static_cast<double>(ground.size() - 1);
        for (std::size_t i : ground) {
            for (std::size_t j : ground) {
                if (i != j) {
                    scheme.decays.push_back({i, j, share});
                }
            }
        }
    }

    std::vector<std::size_t> control_couplings;
    std::vector<std::size_t> probe_couplings;
    for (std::size_t k = 0; k < scheme.couplings.size(); ++k) {
        const auto &lower = scheme.states[scheme.couplings[k].lower];
        (lower.manifold == f1 ? control_couplings : probe_couplings).push_back(k);
    }
    const double split = manifold_energy(scheme, f2) - manifold_energy(scheme, f1);

    DrivenScheme out;
    out.drives.fwm_closure = false;
    out.drives.fields = {
        {"control", FieldRole::control, o.probe2_frequency + o.raman_offset + split,
         o.control_rabi, 1, control_couplings},
        {"probe2", FieldRole::probe2, o.probe2_frequency, 0.0, 1, probe_couplings},
    };
    out.scheme = std::move(scheme);
    out.probe.density = o.density;
    out.probe.reference_dipole =
        dipole_from_radiative_decay(c.d1_decay, 2.0 * pi / c.d1_wavelength);
    return out;
}

} // namespace fwm::hyperfine
