#include <fwm/analytic.hpp>

#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

namespace fwm::analytic {

namespace {

complex lorentzian_term(const ResonanceSpecies &s)
{
    const double weight = s.density * s.dipole * s.dipole * s.population_difference;
    return weight / complex(s.coherence_decay, s.detuning);
}

} // namespace

ComplexIndex absorber_amplifier_index(const RamanPairParams &p)
{
    if (!(p.first.coherence_decay > 0.0) || !(p.second.coherence_decay > 0.0)) {
        throw DomainError("absorber_amplifier_index: decay rates must be positive");
    }
    const complex sum = lorentzian_term(p.first) + lorentzian_term(p.second);
    return ComplexIndex::from(2.0 * pi * I / constants::hbar * sum);
}

double population_difference(double control_rabi, double gamma, double radiative_decay)
{
    if (!(gamma > 0.0) || !(radiative_decay > 0.0) || !(control_rabi >= 0.0)) {
        throw DomainError("population_difference: need gamma, Gamma_r > 0 and Omega >= 0");
    }
    const double sat = 4.0 * control_rabi * control_rabi / (gamma * radiative_decay);
    return 0.5 / (1.0 + sat);
}

SusceptibilityMatrix fwm_susceptibilities(const FourLevelParams &p, double delta)
{
    if (!(p.optical_coherence_decay > 0.0)) {
        throw DomainError("fwm_susceptibilities: gamma must be positive");
    }
    const double g = p.optical_coherence_decay;
    const double g21 = p.ground_coherence_decay;
    const double om2 = p.control_rabi * p.control_rabi;
    const double w = population_difference(p.control_rabi, g, p.radiative_decay);
    const double scale = p.coupling_scale(); // N mu^2 / hbar

    const complex plus_g(g, delta);      // i delta + gamma
    const complex minus_g(g, -delta);    // -i delta + gamma
    const complex plus_g21(g21, delta);  // i delta + gamma_21
    const complex minus_g21(g21, -delta);

    const complex den_p = plus_g * plus_g21 + 2.0 * om2;
    const complex den_m = minus_g * minus_g21 + 2.0 * om2;
    assert(std::abs(den_p) > 0.0 && std::abs(den_m) > 0.0);

    SusceptibilityMatrix chi;
    chi.chi11 = I * scale / 2.0 * w * (plus_g21 - I * delta * om2 / (g * plus_g)) / den_p;
    chi.chi12 = -I * scale / (2.0 * g * plus_g) * om2 * w * complex(2.0 * g, delta) / den_p;
    chi.chi22 = I * scale / 2.0 * w * (minus_g21 + I * delta * om2 / (g * minus_g)) / den_m;
    chi.chi21 = -I * scale / (2.0 * g * minus_g) * om2 * w * complex(2.0 * g, -delta) / den_m;
    return chi;
}

ComplexIndex index_plus(const FourLevelParams &p, double delta)
{
    if (!(p.optical_coherence_decay > 0.0)) {
        throw DomainError("index_plus: gamma must be positive");
    }
    const double g = p.optical_coherence_decay;
    const double g21 = p.ground_coherence_decay;
    const double om2 = p.control_rabi * p.control_rabi;
    const double w = population_difference(p.control_rabi, g, p.radiative_decay);

    const complex num(g21 - 2.0 * om2 / g, delta);
    const complex den = complex(g, delta) * complex(g21, delta) + 2.0 * om2;
    return ComplexIndex::from(I * pi * p.coupling_scale() * w * num / den);
}

std::optional<double> zero_absorption_detuning(double control_rabi, double gamma,
                                               double gamma21)
{
    if (!(gamma > 0.0)) {
        throw DomainError("zero_absorption_detuning: gamma must be positive");
    }
    const double om2 = control_rabi * control_rabi;
    const double numer = 4.0 * om2 * om2 / (gamma * gamma) - gamma21 * gamma21;
    if (numer < 0.0) {
        return std::nullopt;
    }
    return std::sqrt(numer / (1.0 + 2.0 * om2 / (gamma * gamma)));
}

std::optional<double> enhancement_factor(double control_rabi, double gamma, double gamma21,
                                         double radiative_decay)
{
    if (!zero_absorption_detuning(control_rabi, gamma, gamma21)) {
        return std::nullopt;
    }
    const double x = control_rabi * control_rabi / (gamma * gamma); // Omega^2 / gamma^2
    const double y = gamma21 / gamma;
    const double saturation = 1.0 + 4.0 * control_rabi * control_rabi / (gamma * radiative_decay);

    const double root = std::sqrt((4.0 * x * x - y * y) / (1.0 + 2.0 * x));
    const double numer = (2.0 * (1.0 + x) - y) * (1.0 + 2.0 * x);
    const double denom = (1.0 + y) * (4.0 * x * (1.0 + x) + y * (2.0 - y));
    return (radiative_decay / gamma) / saturation * root * numer / denom;
}

RabiOptimum optimize_control_rabi(double gamma, double gamma21, double radiative_decay,
                                  const RabiWindow &window)
{
    if (!(window.lower > 0.0) || !(window.upper > window.lower) || window.grid_points < 3) {
        throw DomainError("optimize_control_rabi: need 0 < lower < upper and >= 3 grid points");
    }
    auto objective = [&](double omega) {
        const auto f = enhancement_factor(omega, gamma, gamma21, radiative_decay);
        return f ? *f : -std::numeric_limits<double>::infinity();
    };

    const int n = window.grid_points;
    const double log_lo = std::log(window.lower);
    const double log_hi = std::log(window.upper);
    std::vector<double> nodes(n);
    std::vector<double> values(n);
    int best = 0;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        nodes[i] = std::exp(log_lo + t * (log_hi - log_lo));
        values[i] = objective(nodes[i]);
        if (values[i] > values[best]) {
            best = i;
        }
    }

    if (!std::isfinite(values[best]) || best == 0) {
        return {window.lower, objective(window.lower), true};
    }
    if (best == n - 1) {
        return {window.upper, values[best], true};
    }

    // golden section in log(Omega) on the bracket around the best node
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(nodes[best - 1]);
    double b = std::log(nodes[best + 1]);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = objective(std::exp(c));
    double fd = objective(std::exp(d));
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = objective(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = objective(std::exp(d));
        }
    }
    RabiOptimum out{nodes[best], values[best], false};
    const double mid = std::exp(0.5 * (a + b));
    const double fmid = objective(mid);
    if (fmid >= out.factor) {
        out.control_rabi = mid;
        out.factor = fmid;
    }
    return out;
}

complex two_level_susceptibility(const TwoLevelAbsorberParams &p, double delta)
{
    if (!(p.coherence_decay > 0.0)) {
        throw DomainError("two_level_susceptibility: absorber decay must be positive");
    }
    const double strength = p.dipole * p.dipole * p.density / constants::hbar;
    return I * strength / complex(p.coherence_decay, -delta + p.offset);
}

SusceptibilityMatrix composite_susceptibilities(const FourLevelParams &fwm,
                                                const TwoLevelAbsorberParams &absorber,
                                                double delta)
{
    SusceptibilityMatrix chi = fwm_susceptibilities(fwm, delta);
    chi.chi22 += two_level_susceptibility(absorber, delta);
    return chi;
}

} // namespace fwm::analytic
