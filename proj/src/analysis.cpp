#include "scenario_plan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include <fwm/analytic.hpp>
#include <fwm/broadening.hpp>
#include <fwm/propagation.hpp>

namespace fwm::analysis {

using nlohmann::json;
using detail::ChiModel;
using detail::CurvePlan;

namespace {

/// Fixed chunking keeps every grid value independent of the worker count.
constexpr std::size_t chunk_size = 128;
constexpr double max_flagged_fraction = 0.05;
constexpr double root_tolerance = 1e-10;

template <class Task>
void parallel_for(std::size_t count, Task &&task)
{
    const std::size_t workers = std::min<std::size_t>(worker_count(), count);
    std::vector<std::exception_ptr> errors(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (std::thread &t : pool) {
            t.join();
        }
    }
    for (const std::exception_ptr &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// Susceptibilities of one velocity class over the grid, chunk by chunk.
std::vector<liouville::ResponsePoint> class_grid(const ChiModel &model,
                                                 const std::vector<double> &deltas, double shift)
{
    std::vector<liouville::ResponsePoint> out;
    out.reserve(deltas.size());
    for (std::size_t begin = 0; begin < deltas.size(); begin += chunk_size) {
        const std::size_t n = std::min(chunk_size, deltas.size() - begin);
        std::vector<liouville::ResponsePoint> part =
            model.grid(std::span<const double>(deltas.data() + begin, n), shift);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

struct Track
{
    std::vector<complex> plus;
    std::vector<complex> minus;
};

/// Continuity-tracked roots over the points flagged good (others zero).
Track track_class(const std::vector<liouville::ResponsePoint> &points,
                  const std::vector<char> &good, double k1, double k2)
{
    std::vector<SusceptibilityMatrix> chi;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (good[i]) {
            chi.push_back(points[i].chi);
        }
    }
    const std::vector<PropagationConstants> tracked = propagation::track_branches(chi, k1, k2);
    Track t;
    t.plus.assign(points.size(), complex{});
    t.minus.assign(points.size(), complex{});
    std::size_t j = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (good[i]) {
            t.plus[i] = tracked[j].lambda_plus;
            t.minus[i] = tracked[j].lambda_minus;
            ++j;
        }
    }
    return t;
}

struct EngineSpectrum
{
    std::shared_ptr<ChiModel> model;
    std::vector<char> good;
    std::vector<std::string> error;
    std::vector<complex> plus;
    std::vector<complex> minus;
    /// Velocity classes of the final quadrature rule.
    std::vector<double> shifts;
    std::vector<double> weights;
    std::vector<Track> classes;
    json quadrature = nullptr;
};

EngineSpectrum compute_engine(const CurvePlan &plan, const std::shared_ptr<ChiModel> &model,
                              const std::vector<double> &deltas)
{
    EngineSpectrum out;
    out.model = model;
    const std::size_t n = deltas.size();

    std::vector<broadening::GaussHermiteRule> rules;
    if (plan.doppler_width > 0.0) {
        rules.push_back(broadening::gauss_hermite(plan.doppler_nodes));
        if (plan.check_doubling) {
            rules.push_back(broadening::gauss_hermite(2 * plan.doppler_nodes));
        }
    }
    std::vector<double> shifts;
    if (rules.empty()) {
        shifts.push_back(0.0);
    } else {
        for (const auto &rule : rules) {
            for (double x : rule.nodes) {
                shifts.push_back(plan.doppler_width * x);
            }
        }
    }

    std::vector<std::vector<liouville::ResponsePoint>> raw(shifts.size());
    const bool single = shifts.size() == 1;
    if (single) {
        // one class: spread the grid chunks over the workers
        const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
        std::vector<std::vector<liouville::ResponsePoint>> parts(chunks);
        parallel_for(chunks, [&](std::size_t c) {
            const std::size_t begin = c * chunk_size;
            const std::size_t len = std::min(chunk_size, n - begin);
            parts[c] = model->grid(std::span<const double>(deltas.data() + begin, len), 0.0);
        });
        for (auto &p : parts) {
            raw[0].insert(raw[0].end(), p.begin(), p.end());
        }
    } else {
        parallel_for(shifts.size(), [&](std::size_t s) { raw[s] = class_grid(*model, deltas, shifts[s]); });
    }

    out.good.assign(n, 1);
    out.error.assign(n, "");
    for (const auto &cls : raw) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!cls[i].ok && out.good[i]) {
                out.good[i] = 0;
                out.error[i] = cls[i].error;
            }
        }
    }

    std::vector<Track> tracks(shifts.size());
    parallel_for(shifts.size(), [&](std::size_t s) {
        tracks[s] = track_class(raw[s], out.good, plan.k1, plan.k2);
    });

    if (rules.empty()) {
        out.plus = tracks[0].plus;
        out.minus = tracks[0].minus;
        out.shifts = {0.0};
        out.weights = {1.0};
        out.classes = std::move(tracks);
        return out;
    }

    std::map<double, std::size_t> index_of;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
        index_of.emplace(shifts[s], s);
    }
    const auto spectrum = [&](double shift) {
        const Track &t = tracks.at(index_of.at(shift));
        std::vector<complex> v(t.plus);
        v.insert(v.end(), t.minus.begin(), t.minus.end());
        return v;
    };
    const broadening::DopplerAverage avg =
        broadening::doppler_average(spectrum, plan.doppler_width, plan.doppler_nodes,
                                    plan.check_doubling, plan.doppler_tolerance);
    out.plus.assign(avg.value.begin(), avg.value.begin() + static_cast<std::ptrdiff_t>(n));
    out.minus.assign(avg.value.begin() + static_cast<std::ptrdiff_t>(n), avg.value.end());

    const broadening::GaussHermiteRule &final_rule = rules.back();
    const std::size_t offset = shifts.size() - final_rule.nodes.size();
    for (std::size_t q = 0; q < final_rule.nodes.size(); ++q) {
        out.shifts.push_back(shifts[offset + q]);
        out.weights.push_back(final_rule.weights[q]);
        out.classes.push_back(std::move(tracks[offset + q]));
    }
    out.quadrature = {{"nodes", avg.nodes},
                      {"doubling_checked", plan.check_doubling},
                      {"relative_change", avg.relative_change},
                      {"converged", avg.converged},
                      {"warning", avg.warning},
                      {"doppler_width_rel", plan.doppler_width / plan.radiative_decay}};
    return out;
}

/// dn_plus of an engine at an off-grid detuning between two good points.
ComplexIndex refine_engine(const CurvePlan &plan, const EngineSpectrum &e, double delta,
                           std::size_t a, std::size_t b, double ta)
{
    complex sum{};
    for (std::size_t q = 0; q < e.classes.size(); ++q) {
        const SusceptibilityMatrix chi = e.model->point(delta, e.shifts[q]);
        const PropagationConstants pc = propagation::propagation_constants(chi, plan.k1, plan.k2);
        const Track &t = e.classes[q];
        const complex want_plus = t.plus[a] + ta * (t.plus[b] - t.plus[a]);
        const complex want_minus = t.minus[a] + ta * (t.minus[b] - t.minus[a]);
        const double keep = std::abs(pc.lambda_plus - want_plus) + std::abs(pc.lambda_minus - want_minus);
        const double swap = std::abs(pc.lambda_minus - want_plus) + std::abs(pc.lambda_plus - want_minus);
        sum += e.weights[q] * (keep <= swap ? pc.lambda_plus : pc.lambda_minus);
    }
    return propagation::index_from_constant(sum, plan.k1);
}

double relative_gap(const ComplexIndex &a, const ComplexIndex &b, double scale)
{
    return std::abs(a.value() - b.value()) / scale;
}

std::optional<GainCheck> gain_check_for(const Curve &curve, double half_width, json &meta)
{
    if (curve.roots.empty()) {
        return std::nullopt;
    }
    try {
        return check_no_nearby_gain(curve, curve.roots.front().delta, half_width);
    } catch (const DomainError &e) {
        meta["gain_check_skipped"] = e.what();
        return std::nullopt;
    }
}

Curve run_curve(const CurvePlan &plan, const json &params)
{
    Curve curve;
    curve.label = plan.label;
    curve.metadata["parameters"] = plan.parameters;
    curve.metadata["grid"] = {{"lower", plan.grid.lower},
                              {"upper", plan.grid.upper},
                              {"step", plan.grid.step},
                              {"points", plan.grid.points()}};
    curve.metadata["abscissa"] = plan.abscissa;
    curve.metadata["ordinate"] = plan.ordinate;
    const double half_width = params.at("gain_half_width").get<double>();

    if (plan.direct) {
        curve.rows = plan.direct();
        if (plan.analyse) {
            IndexEvaluator refine;
            if (plan.direct_index) {
                refine = [&](double x, std::size_t) { return plan.direct_index(x); };
            }
            curve.roots = find_zero_absorption(curve, refine);
            curve.gain_check = gain_check_for(curve, half_width, curve.metadata);
        }
        return curve;
    }

    const std::vector<double> xs = plan.grid.values();
    std::vector<double> deltas(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        deltas[i] = xs[i] * plan.radiative_decay;
    }

    EngineSpectrum first = compute_engine(plan, plan.primary, deltas);
    std::optional<EngineSpectrum> second;
    if (plan.secondary) {
        second = compute_engine(plan, plan.secondary, deltas);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!second->good[i] && first.good[i]) {
                first.good[i] = 0;
                first.error[i] = second->model->engine + ": " + second->error[i];
            }
        }
    }
    curve.metadata["engine"] = plan.secondary ? "analytic+liouville" : plan.primary->engine;
    if (!first.quadrature.is_null()) {
        curve.metadata["quadrature"] = first.quadrature;
    }

    // row index -> grid index, for refinement
    std::vector<std::size_t> grid_index;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!first.good[i]) {
            curve.flagged.push_back({xs[i], first.error[i]});
            continue;
        }
        SpectrumRow row;
        row.delta = xs[i];
        row.plus = propagation::index_from_constant(first.plus[i], plan.k1);
        row.minus = propagation::index_from_constant(first.minus[i], plan.k2);
        if (second) {
            const ComplexIndex p2 = propagation::index_from_constant(second->plus[i], plan.k1);
            const ComplexIndex m2 = propagation::index_from_constant(second->minus[i], plan.k2);
            const double scale =
                std::max({std::abs(row.plus.value()), std::abs(row.minus.value()),
                          std::numeric_limits<double>::min()});
            row.discrepancy =
                std::max(relative_gap(row.plus, p2, scale), relative_gap(row.minus, m2, scale));
        }
        curve.rows.push_back(row);
        grid_index.push_back(i);
    }
    const double fraction =
        static_cast<double>(curve.flagged.size()) / static_cast<double>(xs.size());
    curve.metadata["flagged_fraction"] = fraction;
    if (fraction > max_flagged_fraction) {
        throw NumericalError("curve " + plan.label + ": " + std::to_string(curve.flagged.size()) +
                             " of " + std::to_string(xs.size()) +
                             " grid points failed (first: " + curve.flagged.front().error + ")");
    }

    if (plan.analyse) {
        const IndexEvaluator refine = [&](double x, std::size_t row) {
            const std::size_t a = grid_index.at(row);
            const std::size_t b = grid_index.at(row + 1);
            const double t = (x - xs[a]) / (xs[b] - xs[a]);
            return refine_engine(plan, first, x * plan.radiative_decay, a, b, t);
        };
        curve.roots = find_zero_absorption(curve, refine);
        curve.gain_check = gain_check_for(curve, half_width, curve.metadata);
    }
    return curve;
}

int sign_of(double v)
{
    return (v > 0.0) - (v < 0.0);
}

} // namespace

unsigned worker_count()
{
    if (const char *env = std::getenv("FWM_WORKERS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<unsigned>(std::min<long>(v, 256));
        }
        throw ConfigurationError(std::string("FWM_WORKERS must be a positive integer, got '") +
                                 env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t GridSpec::points() const
{
    return static_cast<std::size_t>(std::llround((upper - lower) / step)) + 1;
}

std::vector<double> GridSpec::values() const
{
    const std::size_t n = points();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? lower
                        : lower + (upper - lower) * static_cast<double>(i) /
                                      static_cast<double>(n - 1);
    }
    return out;
}

void GridSpec::validate() const
{
    if (!std::isfinite(lower) || !std::isfinite(upper) || !std::isfinite(step)) {
        throw ConfigurationError("grid bounds and step must be finite");
    }
    if (!(step > 0.0)) {
        throw ConfigurationError("grid step must be positive");
    }
    if (!(lower < upper)) {
        throw ConfigurationError("grid bounds must satisfy lower < upper");
    }
    if ((upper - lower) / step > 1e7) {
        throw ConfigurationError("grid has more than 1e7 points");
    }
}

bool SpectrumResult::has_discrepancy() const
{
    return std::any_of(curves.begin(), curves.end(), [](const Curve &c) {
        return !c.rows.empty() && c.rows.front().discrepancy.has_value();
    });
}

const Curve &SpectrumResult::curve(const std::string &label) const
{
    for (const Curve &c : curves) {
        if (c.label == label) {
            return c;
        }
    }
    throw ConfigurationError("no curve labelled '" + label + "'");
}

std::vector<ZeroCrossing> find_zero_absorption(const Curve &curve, const IndexEvaluator &refine)
{
    const std::vector<SpectrumRow> &rows = curve.rows;
    if (rows.size() < 2) {
        throw DomainError("find_zero_absorption: need at least two rows");
    }
    std::vector<ZeroCrossing> roots;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double fa = rows[i].plus.imag_part;
        const double fb = rows[i + 1].plus.imag_part;
        ZeroCrossing z;
        if (fa == 0.0) {
            // exact zero on a row: count it once, from the bracket it starts
            const int before = i > 0 ? sign_of(rows[i - 1].plus.imag_part) : 0;
            if (sign_of(fb) == 0 || before == sign_of(fb) || before == 0) {
                continue;
            }
            z.delta = rows[i].delta;
            z.index_real = rows[i].plus.real_part;
            z.direction = sign_of(fb);
            roots.push_back(z);
            continue;
        }
        if (fb == 0.0 || sign_of(fa) == sign_of(fb)) {
            continue;
        }
        z.direction = fa < 0.0 ? 1 : -1;
        if (!refine) {
            const double t = fa / (fa - fb);
            z.delta = rows[i].delta + t * (rows[i + 1].delta - rows[i].delta);
            z.index_real = rows[i].plus.real_part +
                           t * (rows[i + 1].plus.real_part - rows[i].plus.real_part);
            roots.push_back(z);
            continue;
        }
        double lo = rows[i].delta;
        double hi = rows[i + 1].delta;
        double flo = fa;
        ComplexIndex at{};
        double mid = 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            mid = 0.5 * (lo + hi);
            at = refine(mid, i);
            if (std::abs(at.imag_part) < root_tolerance) {
                break;
            }
            if (sign_of(at.imag_part) == sign_of(flo)) {
                lo = mid;
                flo = at.imag_part;
            } else {
                hi = mid;
            }
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::abs(mid))) {
                break;
            }
        }
        z.delta = mid;
        z.index_real = at.real_part;
        z.residual = std::abs(at.imag_part);
        roots.push_back(z);
    }
    std::stable_sort(roots.begin(), roots.end(), [](const ZeroCrossing &a, const ZeroCrossing &b) {
        return std::abs(a.index_real) > std::abs(b.index_real);
    });
    return roots;
}

GainCheck check_no_nearby_gain(const Curve &curve, double root, double half_width,
                               double tolerance)
{
    const std::vector<SpectrumRow> &rows = curve.rows;
    if (rows.size() < 2) {
        throw DomainError("check_no_nearby_gain: need at least two rows");
    }
    if (!(half_width > 0.0)) {
        throw DomainError("check_no_nearby_gain: window half width must be positive");
    }
    const double lower = rows.front().delta;
    const double upper = rows.back().delta;
    const double slack = 1e-12 * std::max(1.0, upper - lower);
    if (root < lower || root > upper) {
        throw DomainError("check_no_nearby_gain: root outside the spectrum");
    }
    if (root - half_width < lower - slack || root + half_width > upper + slack) {
        throw DomainError("check_no_nearby_gain: window exceeds the grid");
    }
    const double step = (upper - lower) / static_cast<double>(rows.size() - 1);
    GainCheck out;
    out.root = root;
    out.half_width = half_width;
    double minimum = std::numeric_limits<double>::infinity();
    for (const SpectrumRow &row : rows) {
        const double d = std::abs(row.delta - root);
        if (d > half_width || d <= 2.0 * step) {
            continue;
        }
        minimum = std::min(minimum, row.plus.imag_part);
    }
    out.minimum_imag = std::isfinite(minimum) ? minimum : 0.0;
    out.no_gain = out.minimum_imag >= -tolerance;
    return out;
}

SpectrumResult run_scenario(const ScenarioConfig &config)
{
    const json params = resolve_parameters(config);
    const std::vector<CurvePlan> plans = detail::plan_curves(config, params);
    SpectrumResult result;
    result.config = config;
    result.parameters = params;
    result.metadata = {{"code_version", code_version},
                       {"scenario", to_string(config.scenario)},
                       {"engine", to_string(config.engine)},
                       {"row_columns", config.engine == Engine::both
                                           ? json{"delta_over_gamma_r", "dn_plus_re", "dn_plus_im",
                                                  "dn_minus_re", "dn_minus_im", "discrepancy"}
                                           : json{"delta_over_gamma_r", "dn_plus_re", "dn_plus_im",
                                                  "dn_minus_re", "dn_minus_im"}}};
    for (const CurvePlan &plan : plans) {
        result.curves.push_back(run_curve(plan, params));
    }
    return result;
}

std::optional<ZeroCrossing> best_enhancement(const Curve &curve)
{
    std::optional<ZeroCrossing> best;
    for (const ZeroCrossing &z : curve.roots) {
        if (z.index_real > 0.0 && (!best || z.index_real > best->index_real)) {
            best = z;
        }
    }
    return best;
}

namespace {

/// Config restricted to curve `c`: every per-curve list reduced to its c-th entry.
ScenarioConfig single_curve(const ScenarioConfig &config, const json &params, std::size_t curves,
                            std::size_t c)
{
    ScenarioConfig out = config;
    for (const ParameterSpec &spec : scenario_schema(config.scenario)) {
        if (spec.kind == ParameterKind::number_list && params[spec.name].size() == curves) {
            out.overrides[spec.name] = json::array({params[spec.name][c]});
        }
    }
    return out;
}

} // namespace

std::vector<OmegaCandidate> optimize_omega(const ScenarioConfig &config,
                                           std::optional<double> lower,
                                           std::optional<double> upper, int scan_points)
{
    const detail::OmegaKnob knob = detail::omega_knob(config.scenario);
    const json params = resolve_parameters(config);
    if (scan_points < 3) {
        throw ConfigurationError("optimize-omega needs at least 3 scan points");
    }

    if (knob.closed_form) {
        const double Gr = units::mhz(params["radiative_decay_mhz"].get<double>());
        const double gamma = params["gamma_rel"].get<double>() * Gr;
        const double gamma21 = params["gamma21_rel"].get<double>() * Gr;
        analytic::RabiWindow window{lower.value_or(0.01) * Gr, upper.value_or(10.0) * Gr};
        if (!(window.lower > 0.0 && window.lower < window.upper)) {
            throw ConfigurationError("Omega window must satisfy 0 < lower < upper");
        }
        const analytic::RabiOptimum opt =
            analytic::optimize_control_rabi(gamma, gamma21, Gr, window);
        const double density = config.scenario == ScenarioId::fig3_ideal_fwm
                                   ? params["densities"][0].get<double>()
                                   : params["density"].get<double>();
        const double r = dimensionless_density(
            density, units::nm(params["wavelength_nm"].get<double>()));
        OmegaCandidate out;
        out.curve = "enhancement_factor";
        out.omega = opt.control_rabi / Gr;
        out.index_real = r * opt.factor;
        const auto root = analytic::zero_absorption_detuning(opt.control_rabi, gamma, gamma21);
        out.found = root.has_value();
        out.delta = root ? -*root / Gr : 0.0;
        out.at_boundary = opt.at_boundary;
        return {out};
    }

    const std::size_t curves = params[knob.key].size();
    std::vector<OmegaCandidate> out;
    for (std::size_t c = 0; c < curves; ++c) {
        const ScenarioConfig base = single_curve(config, params, curves, c);
        const double current = params[knob.key][c].get<double>();
        const double lo = lower.value_or(0.25 * current);
        const double hi = upper.value_or(4.0 * current);
        if (!(lo > 0.0 && lo < hi)) {
            throw ConfigurationError("Omega window must satisfy 0 < lower < upper");
        }
        const auto evaluate = [&](double omega, std::string &label) {
            ScenarioConfig trial = base;
            trial.overrides[knob.key] = json::array({omega});
            const SpectrumResult r = run_scenario(trial);
            label = r.curves.front().label;
            return best_enhancement(r.curves.front());
        };
        OmegaCandidate best;
        std::size_t best_k = 0;
        std::vector<double> grid(static_cast<std::size_t>(scan_points));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            grid[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (scan_points - 1));
            std::string label;
            const auto z = evaluate(grid[k], label);
            best.curve = label;
            if (z && (!best.found || z->index_real > best.index_real)) {
                best.found = true;
                best.omega = grid[k];
                best.index_real = z->index_real;
                best.delta = z->delta;
                best_k = k;
            }
        }
        if (best.found) {
            // golden section in log Omega between the scan neighbours
            const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = std::log(grid[best_k == 0 ? 0 : best_k - 1]);
            double b = std::log(grid[std::min(best_k + 1, grid.size() - 1)]);
            for (int iter = 0; iter < 8; ++iter) {
                const double x1 = b - invphi * (b - a);
                const double x2 = a + invphi * (b - a);
                std::string label;
                const auto z1 = evaluate(std::exp(x1), label);
                const auto z2 = evaluate(std::exp(x2), label);
                const double f1 = z1 ? z1->index_real : -1.0;
                const double f2 = z2 ? z2->index_real : -1.0;
                for (const auto &[x, z] : {std::pair{x1, z1}, std::pair{x2, z2}}) {
                    if (z && z->index_real > best.index_real) {
                        best.omega = std::exp(x);
                        best.index_real = z->index_real;
                        best.delta = z->delta;
                    }
                }
                if (f1 >= f2) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            best.at_boundary = best_k == 0 || best_k + 1 == grid.size();
        }
        out.push_back(best);
    }
    return out;
}

} // namespace fwm::analysis
