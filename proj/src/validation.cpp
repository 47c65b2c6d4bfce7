#include <fwm/validation.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include <fwm/analysis.hpp>
#include <fwm/analytic.hpp>
#include <fwm/angular.hpp>
#include <fwm/broadening.hpp>
#include <fwm/hyperfine.hpp>
#include <fwm/liouville.hpp>
#include <fwm/propagation.hpp>

namespace fwm::validation {

namespace {

constexpr double radiative_decay = units::mhz(6.035);
constexpr double wavelength = units::nm(770.1);

double log_uniform(std::mt19937_64 &rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

double max_entry(const SusceptibilityMatrix &m)
{
    return std::max({std::abs(m.chi11), std::abs(m.chi12), std::abs(m.chi21), std::abs(m.chi22)});
}

double matrix_gap(const SusceptibilityMatrix &a, const SusceptibilityMatrix &b)
{
    return std::max({std::abs(a.chi11 - b.chi11), std::abs(a.chi12 - b.chi12),
                     std::abs(a.chi21 - b.chi21), std::abs(a.chi22 - b.chi22)});
}

CheckResult result(int criterion, const std::string &title, bool pass, std::string detail)
{
    return {criterion, title, pass, std::move(detail)};
}

CheckResult flagship()
{
    std::mt19937_64 rng(20240101);
    double worst = 0.0;
    int failed_points = 0;
    for (int draw = 0; draw < 20; ++draw) {
        const double omega = log_uniform(rng, 0.05, 3.0);
        const double gamma21 = log_uniform(rng, 1e-4, 1e-1);
        const double density = log_uniform(rng, 1e13, 1e16);
        const FourLevelParams p =
            FourLevelParams::from_relative(radiative_decay, omega, 0.5, gamma21, density, wavelength);
        const double gamma = p.optical_coherence_decay;
        std::vector<double> deltas(201);
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            deltas[i] = -3.0 * gamma + 6.0 * gamma * static_cast<double>(i) / 200.0;
        }
        const hyperfine::DrivenScheme d = hyperfine::idealized_four_level(p, true);
        const auto points =
            liouville::linear_response_susceptibilities(d.scheme, d.drives, d.probe, deltas);
        for (const auto &pt : points) {
            if (!pt.ok) {
                ++failed_points;
                continue;
            }
            const SusceptibilityMatrix ref = analytic::fwm_susceptibilities(p, pt.delta);
            worst = std::max(worst, matrix_gap(pt.chi, ref) / max_entry(ref));
        }
    }
    return result(1, "Liouville linear response vs closed-form susceptibilities",
                  failed_points == 0 && worst < 1e-6,
                  "20 draws x 201 points, max relative error " + sci(worst) +
                      " (bound 1e-6), failed points " + std::to_string(failed_points));
}

CheckResult closed_forms()
{
    std::mt19937_64 rng(20240102);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst_index = 0.0;
    double worst_factor = 0.0;
    int factor_samples = 0;
    for (int s = 0; s < 100000; ++s) {
        const double gamma_rel = log_uniform(rng, 0.5, 5.0);
        const FourLevelParams p = FourLevelParams::from_relative(
            radiative_decay, log_uniform(rng, 0.01, 5.0), gamma_rel,
            gamma_rel * log_uniform(rng, 1e-5, 0.5), log_uniform(rng, 1e12, 1e16), wavelength);
        const double delta = 5.0 * p.optical_coherence_decay * unit(rng);
        const SusceptibilityMatrix chi = analytic::fwm_susceptibilities(p, delta);
        const complex sum = 2.0 * pi * (chi.chi11 + chi.chi12);
        const complex eq = analytic::index_plus(p, delta).value();
        worst_index = std::max(worst_index, std::abs(eq - sum) / std::abs(sum));

        const auto root = analytic::zero_absorption_detuning(
            p.control_rabi, p.optical_coherence_decay, p.ground_coherence_decay);
        const auto factor = analytic::enhancement_factor(p.control_rabi, p.optical_coherence_decay,
                                                         p.ground_coherence_decay, radiative_decay);
        if (root && factor && *root > 0.0) {
            const double r = dimensionless_density(p.density, p.wavelength);
            const double direct = analytic::index_plus(p, -*root).real_part / r;
            worst_factor = std::max(worst_factor, std::abs(*factor - direct) / std::abs(direct));
            ++factor_samples;
        }
    }
    const bool pass = worst_index < 1e-9 && worst_factor < 1e-9 && factor_samples > 0;
    return result(2, "Closed-form consistency of the index and enhancement factor", pass,
                  "1e5 samples: index max relative error " + sci(worst_index) +
                      ", factor max relative error " + sci(worst_factor) + " over " +
                      std::to_string(factor_samples) + " samples with a zero (bound 1e-9)");
}

CheckResult headline_index()
{
    const double gamma = 0.5 * radiative_decay;
    const double gamma21 = 1e-3 * radiative_decay;
    const analytic::RabiOptimum opt = analytic::optimize_control_rabi(
        gamma, gamma21, radiative_decay, {0.01 * radiative_decay, 10.0 * radiative_decay});
    const double r = dimensionless_density(1e14, wavelength);
    const double index = r * opt.factor;
    const double rel = std::abs(index - 0.43) / 0.43;
    return result(3, "Optimised index at N = 1e14 cm^-3 vs 0.43", rel < 0.10 && !opt.at_boundary,
                  "dn_plus' = " + sci(index) + " at Omega = " + sci(opt.control_rabi / radiative_decay) +
                      " Gamma_r, relative deviation " + sci(rel) + " (bound 0.10)");
}

CheckResult collisional_ceiling()
{
    const broadening::BroadeningSpec spec;
    double worst = 0.0;
    for (double n : {1e16, 1e17, 1e18}) {
        const double v = broadening::max_index_estimate(n, wavelength, radiative_decay, spec);
        worst = std::max(worst, std::abs(v - 0.37) / 0.37);
    }
    const double crossover = radiative_decay / (2.0 * spec.collisional_coefficient);
    const double rel = std::abs(crossover - 8.6e13) / 8.6e13;
    return result(4, "Collisional ceiling and crossover density", worst < 0.10 && rel < 0.02,
                  "ceiling max relative deviation " + sci(worst) + " for N = 1e16..1e18 (bound 0.10); "
                  "crossover " + sci(crossover) + " cm^-3, relative deviation " + sci(rel) +
                      " (bound 0.02)");
}

CheckResult doppler()
{
    const broadening::BroadeningSpec spec;
    const double k = 2.0 * pi / wavelength;
    const double width = broadening::doppler_width(300.0, spec.mass, k);
    const double rel_width = std::abs(width - units::mhz(458.0)) / units::mhz(458.0);

    const double gamma = width;
    std::vector<double> rel_voigt;
    const auto lorentz = [&](double shift) {
        return std::vector<complex>{complex(gamma / (shift * shift + gamma * gamma), 0.0)};
    };
    const broadening::DopplerAverage avg = broadening::doppler_average(lorentz, width, 64, true);
    const double a = gamma / width;
    const double exact = std::sqrt(pi) * std::exp(a * a) * std::erfc(a) / width;
    const double rel = std::abs(avg.value.front().real() - exact) / exact;
    return result(5, "Doppler width and Voigt peak quadrature", rel_width < 0.01 && rel < 1e-6,
                  "W_D(300 K) = 2 pi x " + sci(units::to_mhz(width)) + " MHz, relative deviation " +
                      sci(rel_width) + " (bound 0.01); Voigt peak relative error " + sci(rel) +
                      " with " + std::to_string(avg.nodes) + " nodes (bound 1e-6)");
}

CheckResult propagation_oracle()
{
    std::mt19937_64 rng(20240106);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double k = 2.0 * pi / wavelength;
    const auto draw_chi = [&] {
        const auto c = [&] { return 0.02 * complex(unit(rng), unit(rng)); };
        SusceptibilityMatrix chi{c(), c(), c(), c()};
        return chi;
    };
    double worst_ode = 0.0;
    double worst_group = 0.0;
    bool identity = true;
    for (int draw = 0; draw < 100; ++draw) {
        const SusceptibilityMatrix chi = draw_chi();
        const double scale = 2.0 * pi * k * max_entry(chi);
        const double L = log_uniform(rng, 0.01, 5.0) / scale;
        const propagation::SlabSolution slab = propagation::slab_transfer(chi, k, k, L);
        Eigen::Matrix2cd ode;
        for (int col = 0; col < 2; ++col) {
            const propagation::FieldPair in = col == 0 ? propagation::FieldPair{1.0, 0.0}
                                                       : propagation::FieldPair{0.0, 1.0};
            const auto r = propagation::integrate_coupled(chi, k, k, 0.0, L, in);
            ode(0, col) = r.fields.e1;
            ode(1, col) = r.fields.e2_conj;
        }
        worst_ode = std::max(worst_ode, (ode - slab.transfer).cwiseAbs().maxCoeff() /
                                            slab.transfer.cwiseAbs().maxCoeff());

        const Eigen::Matrix2cd zero = propagation::slab_transfer(chi, k, k, 0.0).transfer;
        identity = identity && zero == Eigen::Matrix2cd::Identity();

        const double L1 = 0.3 * L;
        const double L2 = L - L1;
        const Eigen::Matrix2cd composed = propagation::slab_transfer(chi, k, k, L2).transfer *
                                          propagation::slab_transfer(chi, k, k, L1).transfer;
        worst_group = std::max(worst_group, (composed - slab.transfer).cwiseAbs().maxCoeff() /
                                                slab.transfer.cwiseAbs().maxCoeff());
    }
    return result(6, "Slab transfer vs ODE oracle, identity and semigroup",
                  worst_ode < 1e-8 && identity && worst_group < 1e-9,
                  "100 draws: ODE max relative error " + sci(worst_ode) + " (bound 1e-8); L = 0 " +
                      (identity ? "exact identity" : "NOT identity") + "; semigroup max relative error " +
                      sci(worst_group) + " (bound 1e-9)");
}

CheckResult composite_ideal()
{
    const analysis::SpectrumResult r =
        analysis::run_scenario(analysis::preset(analysis::ScenarioId::fig6a_ideal_composite));
    const analysis::Curve &curve = r.curves.front();
    std::optional<analysis::ZeroCrossing> in_window;
    for (const analysis::ZeroCrossing &z : curve.roots) {
        if (z.delta >= -0.5 && z.delta <= -0.3 && (!in_window || z.index_real > in_window->index_real)) {
            in_window = z;
        }
    }
    if (!in_window) {
        return result(7, "Idealized composite: zero absorption without nearby gain", false,
                      "no dn_plus'' zero in delta / Gamma_r in [-0.5, -0.3] (" +
                          std::to_string(curve.roots.size()) + " zeros elsewhere)");
    }
    const analysis::GainCheck g = analysis::check_no_nearby_gain(curve, in_window->delta, 2.0);
    return result(7, "Idealized composite: zero absorption without nearby gain", g.no_gain,
                  "zero at delta = " + sci(in_window->delta) + " Gamma_r, dn_plus' = " +
                      sci(in_window->index_real) + "; min dn_plus'' within +-2 Gamma_r = " +
                      sci(g.minimum_imag) + (g.no_gain ? " (no gain)" : " (gain present)"));
}

CheckResult multilevel()
{
    using analysis::ScenarioId;
    const analysis::SpectrumResult coll =
        analysis::run_scenario(analysis::preset(ScenarioId::fig4_k40_collisional));
    double best_coll = 0.0;
    std::string best_label = "none";
    for (const analysis::Curve &c : coll.curves) {
        if (const auto z = analysis::best_enhancement(c); z && z->index_real > best_coll) {
            best_coll = z->index_real;
            best_label = c.label;
        }
    }
    const bool coll_ok = best_coll >= 0.1 / 1.5 && best_coll <= 0.1 * 1.5;

    analysis::ScenarioConfig hot = analysis::preset(ScenarioId::fig4_k40_doppler);
    const nlohmann::json defaults = analysis::resolve_parameters(hot);
    const auto temps = defaults["temperatures"].get<std::vector<double>>();
    const auto omegas = defaults["omegas_rel"].get<std::vector<double>>();
    const auto it = std::find(temps.begin(), temps.end(), 600.0);
    double omega = omegas.back();
    if (it != temps.end()) {
        omega = omegas[static_cast<std::size_t>(it - temps.begin())];
    }
    hot.overrides["temperatures"] = {600.0};
    hot.overrides["omegas_rel"] = {omega};
    const analysis::SpectrumResult dop = analysis::run_scenario(hot);
    const auto z = analysis::best_enhancement(dop.curves.front());
    const double best_dop = z ? z->index_real : 0.0;
    const bool dop_ok = best_dop >= 0.003 && best_dop <= 0.03;
    const nlohmann::json &quad = dop.curves.front().metadata["quadrature"];
    return result(8, "Multilevel 40K: collisional and Doppler-broadened index", coll_ok && dop_ok,
                  "collisional best dn_plus' = " + sci(best_coll) + " (" + best_label +
                      ", bound [0.0667, 0.15]); T = 600 K dn_plus' = " + sci(best_dop) +
                      " at Omega = " + sci(omega) + " Gamma_r (bound [0.003, 0.03]), quadrature " +
                      std::to_string(quad.value("nodes", 0)) + " nodes, doubling change " +
                      sci(quad.value("relative_change", 0.0)));
}

CheckResult dark_states()
{
    const liouville::LevelScheme k40 = hyperfine::build_hyperfine_scheme(
        hyperfine::Species::K40, hyperfine::LineSet::D1, hyperfine::Polarization::pi);
    std::size_t expected = 0;
    for (const auto &g : k40.states) {
        if (g.excited) {
            continue;
        }
        for (double Fp : {3.5, 4.5}) {
            if (std::abs(g.mF) <= Fp) {
                ++expected;
            }
        }
    }
    std::size_t nonzero = 0;
    for (const auto &c : k40.couplings) {
        if (c.strength != 0.0) {
            ++nonzero;
        }
    }
    const double integer_f = angular::wigner_coupling(1.0, 0.0, 1.0, 0.0, 0.5, 0.5, 1.5);
    const double integer_f2 = angular::wigner_coupling(2.0, 0.0, 2.0, 0.0, 0.5, 0.5, 1.5);
    const bool pass = nonzero == expected && k40.couplings.size() == expected &&
                      integer_f == 0.0 && integer_f2 == 0.0;
    return result(9, "Dark-state structure of pi couplings", pass,
                  "40K D1: " + std::to_string(nonzero) + " nonzero of " +
                      std::to_string(expected) + " |F,mF> - |F',mF> couplings; integer-F "
                      "(I = 3/2) mF = 0, F' = F strengths " + sci(integer_f) + ", " + sci(integer_f2));
}

} // namespace

std::string sci(double value)
{
    char buf[64];
    const auto [end, ec] =
        std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 4);
    return ec == std::errc{} ? std::string(buf, end) : std::string("?");
}

std::vector<CheckDefinition> oracle_checks()
{
    return {
        {1, "flagship", 30.0, flagship},
        {2, "closed forms", 10.0, closed_forms},
        {3, "headline index", 0.0, headline_index},
        {4, "collisional ceiling", 0.0, collisional_ceiling},
        {5, "doppler", 0.0, doppler},
        {6, "propagation", 0.0, propagation_oracle},
        {7, "composite", 0.0, composite_ideal},
        {8, "multilevel", 0.0, multilevel},
        {9, "dark states", 0.0, dark_states},
    };
}

std::string format_report(const std::vector<CheckResult> &results)
{
    std::string out;
    for (const CheckResult &r : results) {
        out += "criterion " + std::to_string(r.criterion) + ": " + (r.pass ? "PASS " : "FAIL ") +
               r.title + ": " + r.detail + "\n";
    }
    return out;
}

} // namespace fwm::validation
