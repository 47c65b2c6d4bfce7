#include "scenario_plan.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include <fwm/analytic.hpp>
#include <fwm/broadening.hpp>
#include <fwm/hyperfine.hpp>

namespace fwm::analysis {

using nlohmann::json;

namespace {

constexpr std::pair<ScenarioId, const char *> scenario_names[] = {
    {ScenarioId::fig1_raman_pair, "fig1_raman_pair"},
    {ScenarioId::fig3_ideal_fwm, "fig3_ideal_fwm"},
    {ScenarioId::fig4_k40_collisional, "fig4_k40_collisional"},
    {ScenarioId::fig4_k40_doppler, "fig4_k40_doppler"},
    {ScenarioId::fig5_F_curves, "fig5_F_curves"},
    {ScenarioId::fig6a_ideal_composite, "fig6a_ideal_composite"},
    {ScenarioId::fig6c_k39_k40, "fig6c_k39_k40"},
};

ParameterSpec number(std::string name, double value, bool positive, std::string description)
{
    return {std::move(name), ParameterKind::number, value, positive, false, std::move(description)};
}

ParameterSpec list(std::string name, std::vector<double> values, bool positive,
                   std::string description)
{
    return {std::move(name), ParameterKind::number_list, values, positive, false,
            std::move(description)};
}

ParameterSpec optional_number(std::string name, std::string description)
{
    return {std::move(name), ParameterKind::number, nullptr, false, true, std::move(description)};
}

std::vector<ParameterSpec> common_schema()
{
    return {
        number("radiative_decay_mhz", 6.035, true, "Gamma_r / 2 pi of the D1 line, MHz"),
        number("wavelength_nm", 770.1, true, "probe wavelength, nm"),
        optional_number("grid_lower", "lowest detuning, Gamma_r units (null: scenario default)"),
        optional_number("grid_upper", "highest detuning, Gamma_r units (null: scenario default)"),
        optional_number("grid_step", "detuning step, Gamma_r units (null: scenario default)"),
        number("gain_half_width", 2.0, true, "half width of the no-nearby-gain window, Gamma_r"),
    };
}

GridSpec default_grid(ScenarioId id)
{
    switch (id) {
    case ScenarioId::fig1_raman_pair:
        return {-4.0, 4.0, 0.004};
    case ScenarioId::fig5_F_curves:
        return {0.002, 2.0, 0.002};
    default:
        return {-3.0, 3.0, 0.003};
    }
}

bool is_number_value(const json &v)
{
    return v.is_number() && std::isfinite(v.get<double>());
}

void check_value(const ParameterSpec &spec, const json &value)
{
    const auto fail = [&](const std::string &why) {
        throw ConfigurationError("parameter '" + spec.name + "': " + why);
    };
    if (value.is_null()) {
        if (!spec.nullable) {
            fail("must not be null");
        }
        return;
    }
    switch (spec.kind) {
    case ParameterKind::number:
        if (!is_number_value(value)) {
            fail("expected a finite number");
        }
        if (spec.positive && !(value.get<double>() > 0.0)) {
            fail("must be positive");
        }
        break;
    case ParameterKind::number_list:
        if (!value.is_array() || value.empty()) {
            fail("expected a non-empty list of numbers");
        }
        for (const json &v : value) {
            if (!is_number_value(v)) {
                fail("expected a list of finite numbers");
            }
            if (spec.positive && !(v.get<double>() > 0.0)) {
                fail("entries must be positive");
            }
        }
        break;
    case ParameterKind::integer:
        if (!value.is_number_integer()) {
            fail("expected an integer");
        }
        if (spec.positive && !(value.get<long long>() > 0)) {
            fail("must be positive");
        }
        break;
    case ParameterKind::boolean:
        if (!value.is_boolean()) {
            fail("expected true or false");
        }
        break;
    case ParameterKind::text:
        if (!value.is_string()) {
            fail("expected a string");
        }
        break;
    }
}

json normalise(const ParameterSpec &spec, const json &value)
{
    if (value.is_null()) {
        return value;
    }
    if (spec.kind == ParameterKind::number) {
        return value.get<double>();
    }
    if (spec.kind == ParameterKind::number_list) {
        json out = json::array();
        for (const json &v : value) {
            out.push_back(v.get<double>());
        }
        return out;
    }
    return value;
}

double num(const json &params, const char *key)
{
    return params.at(key).get<double>();
}

std::vector<double> numbers(const json &params, const char *key)
{
    return params.at(key).get<std::vector<double>>();
}

void require_same_length(const json &params, std::initializer_list<const char *> keys)
{
    std::size_t n = 0;
    for (const char *key : keys) {
        const std::size_t m = params.at(key).size();
        if (n != 0 && m != n) {
            std::string names;
            for (const char *k : keys) {
                names += names.empty() ? k : std::string(", ") + k;
            }
            throw ConfigurationError("parameters " + names + " must have equal lengths");
        }
        n = m;
    }
}

} // namespace

std::string to_string(ScenarioId id)
{
    for (const auto &[value, name] : scenario_names) {
        if (value == id) {
            return name;
        }
    }
    throw ConfigurationError("unknown scenario id");
}

std::string to_string(Engine engine)
{
    switch (engine) {
    case Engine::analytic:
        return "analytic";
    case Engine::liouville:
        return "liouville";
    case Engine::both:
        return "both";
    }
    throw ConfigurationError("unknown engine");
}

std::string to_string(OutputFormat format)
{
    return format == OutputFormat::csv ? "csv" : "json";
}

ScenarioId scenario_from_string(const std::string &name)
{
    for (const auto &[value, text] : scenario_names) {
        if (name == text) {
            return value;
        }
    }
    throw ConfigurationError("unknown scenario '" + name + "'");
}

Engine engine_from_string(const std::string &name)
{
    if (name == "analytic") {
        return Engine::analytic;
    }
    if (name == "liouville") {
        return Engine::liouville;
    }
    if (name == "both") {
        return Engine::both;
    }
    throw ConfigurationError("unknown engine '" + name + "' (analytic, liouville, both)");
}

OutputFormat format_from_string(const std::string &name)
{
    if (name == "csv") {
        return OutputFormat::csv;
    }
    if (name == "json") {
        return OutputFormat::json;
    }
    throw ConfigurationError("unknown output format '" + name + "' (csv, json)");
}

std::vector<ScenarioId> all_scenarios()
{
    std::vector<ScenarioId> out;
    for (const auto &entry : scenario_names) {
        out.push_back(entry.first);
    }
    return out;
}

std::vector<ParameterSpec> scenario_schema(ScenarioId id)
{
    std::vector<ParameterSpec> s = common_schema();
    const auto add = [&](ParameterSpec p) { s.push_back(std::move(p)); };
    switch (id) {
    case ScenarioId::fig1_raman_pair:
        add(number("width_rel", 1.0, true, "absorbing resonance width gamma / Gamma_r"));
        add(list("amplifier_width_ratio", {1.0, 0.5}, true, "gamma' / gamma per curve"));
        add(list("amplifier_density_ratio", {1.0, 0.1}, true, "N' / N per curve"));
        add(number("separation", 2.0, false, "Delta - Delta' in units of gamma"));
        add(number("density", 1e14, true, "absorber density, cm^-3"));
        break;
    case ScenarioId::fig3_ideal_fwm:
        add(list("densities", {1e14, 5e14, 1e15}, true, "curve densities, cm^-3"));
        add(number("omega_rel", 0.1, true, "control Rabi frequency / Gamma_r"));
        add(number("gamma_rel", 0.5, true, "optical coherence decay / Gamma_r"));
        add(number("gamma21_rel", 1e-3, false, "ground coherence decay / Gamma_r"));
        add(list("gamma21_series", {0.1, 0.01, 0.001, 0.0001}, false,
                 "extra curves: gamma_21 / gamma, Omega from the enhancement factor"));
        add(number("series_density", 1e14, true, "density of the gamma_21 series, cm^-3"));
        add(number("omega_window_lower", 0.01, true, "Omega search window, Gamma_r"));
        add(number("omega_window_upper", 10.0, true, "Omega search window, Gamma_r"));
        break;
    case ScenarioId::fig4_k40_collisional:
        add(list("densities", {1e14, 5e14, 1e15, 5e15}, true, "40K densities, cm^-3"));
        add(list("omegas_rel", {1.25, 1.95, 3.05, 5.96}, false,
                 "control Rabi frequencies / Gamma_r per curve"));
        add(number("gamma21_rel", 1e-3, false, "F=9/2 - F=7/2 coherence decay / Gamma_r"));
        add(number("beta_mhz_cm3", 0.35e-13, false, "collisional coefficient, MHz cm^3"));
        add({"lines", ParameterKind::text, "D1", false, false, "D1 or D1_D2"});
        break;
    case ScenarioId::fig4_k40_doppler:
        add(list("temperatures", {300.0, 450.0, 600.0}, true, "vapour temperatures, K"));
        add(list("omegas_rel", {10.0, 10.0, 10.0}, false,
                 "control Rabi frequencies / Gamma_r per curve"));
        add(number("gamma21_rel", 1e-3, false, "ground coherence decay / Gamma_r"));
        add(number("beta_mhz_cm3", 0.35e-13, false, "collisional coefficient, MHz cm^3"));
        add(number("d2_decay_mhz", 6.035, true, "D2 radiative rate / 2 pi, MHz"));
        add(number("mass_u", 39.963998, true, "atomic mass, u"));
        add({"doppler_nodes", ParameterKind::integer, 64, true, false,
             "Gauss-Hermite nodes"});
        add({"check_doubling", ParameterKind::boolean, true, false, false,
             "repeat with twice the nodes and report the change"});
        add(number("doppler_tolerance", 1e-6, true, "doubling tolerance (relative)"));
        add({"grid_points", ParameterKind::integer, 2001, true, false,
             "points of the automatic grid"});
        add(number("grid_doppler_widths", 3.0, true, "automatic grid half width, W_D units"));
        break;
    case ScenarioId::fig5_F_curves:
        add(number("gamma_rel", 0.5, true, "optical coherence decay / Gamma_r"));
        add(list("gamma21_series", {0.1, 0.01, 0.001, 0.0001, 0.00001}, false,
                 "gamma_21 / gamma per curve"));
        add(number("density", 1e14, true, "density for r, cm^-3"));
        break;
    case ScenarioId::fig6a_ideal_composite:
        add(number("density", 1e14, true, "mixing-medium density, cm^-3"));
        add(number("absorber_ratio", 10.0, true, "N_abs / N_FWM"));
        add(number("gamma_rel", 0.5, true, "optical coherence decay / Gamma_r"));
        add(number("gamma_abs_rel", 0.5e-3, true, "absorber coherence decay / Gamma_r"));
        add(number("delta0_rel", 0.1, false, "absorber offset / Gamma_r"));
        add(number("omega_rel", 0.45, true, "control Rabi frequency / Gamma_r"));
        add(number("gamma21_rel", 1e-3, false, "ground coherence decay / Gamma_r"));
        add(number("absorber_dipole_ratio", 1.0, true, "mu' / mu"));
        break;
    case ScenarioId::fig6c_k39_k40:
        add(list("densities", {1e14, 5e14, 1e15}, true, "40K densities, cm^-3"));
        add(list("k39_ratios", {10.0, 15.0, 25.0}, true, "N_39K / N_40K per curve"));
        add(list("omegas_rel", {1.3, 2.3, 4.4}, false, "40K control Rabi / Gamma_r"));
        add(list("raman_omegas_rel", {10.0, 20.0, 20.0}, false, "39K control Rabi / Gamma_r"));
        add(list("delta0s_rel", {-0.92, -3.0, -3.0}, false, "Raman resonance / Gamma_r"));
        add(number("gamma21_rel", 1e-3, false, "ground coherence decay / Gamma_r"));
        add(number("ground_relaxation_rel", 1e-3, false,
                   "39K ground population relaxation / Gamma_r"));
        add(number("beta_mhz_cm3", 0.35e-13, false, "collisional coefficient, MHz cm^3"));
        break;
    }
    return s;
}

std::vector<Engine> supported_engines(ScenarioId id)
{
    switch (id) {
    case ScenarioId::fig1_raman_pair:
    case ScenarioId::fig5_F_curves:
        return {Engine::analytic};
    case ScenarioId::fig3_ideal_fwm:
    case ScenarioId::fig6a_ideal_composite:
        return {Engine::analytic, Engine::liouville, Engine::both};
    case ScenarioId::fig4_k40_collisional:
    case ScenarioId::fig4_k40_doppler:
    case ScenarioId::fig6c_k39_k40:
        return {Engine::liouville};
    }
    return {};
}

void ScenarioConfig::validate() const
{
    (void)resolve_parameters(*this);
}

ScenarioConfig preset(ScenarioId id)
{
    ScenarioConfig c;
    c.scenario = id;
    c.engine = supported_engines(id).front();
    return c;
}

json resolve_parameters(const ScenarioConfig &config)
{
    const auto engines = supported_engines(config.scenario);
    if (std::find(engines.begin(), engines.end(), config.engine) == engines.end()) {
        throw ConfigurationError("engine '" + to_string(config.engine) +
                                 "' is not available for " + to_string(config.scenario));
    }
    if (!config.overrides.is_object()) {
        throw ConfigurationError("overrides must be an object");
    }
    const std::vector<ParameterSpec> schema = scenario_schema(config.scenario);
    for (const auto &[key, value] : config.overrides.items()) {
        const bool known = std::any_of(schema.begin(), schema.end(),
                                       [&](const ParameterSpec &p) { return p.name == key; });
        if (!known) {
            throw ConfigurationError("unknown parameter '" + key + "' for " +
                                     to_string(config.scenario));
        }
    }
    json out = json::object();
    for (const ParameterSpec &spec : schema) {
        const json &value =
            config.overrides.contains(spec.name) ? config.overrides.at(spec.name) : spec.default_value;
        check_value(spec, value);
        out[spec.name] = normalise(spec, value);
    }

    const bool lower = !out["grid_lower"].is_null();
    const bool upper = !out["grid_upper"].is_null();
    const bool step = !out["grid_step"].is_null();
    if (config.scenario == ScenarioId::fig4_k40_doppler) {
        if ((lower || upper || step) && !(lower && upper && step)) {
            throw ConfigurationError("grid_lower, grid_upper and grid_step must be set together");
        }
    }
    if (lower || upper || step) {
        GridSpec g = default_grid(config.scenario);
        if (lower) {
            g.lower = num(out, "grid_lower");
        }
        if (upper) {
            g.upper = num(out, "grid_upper");
        }
        if (step) {
            g.step = num(out, "grid_step");
        }
        g.validate();
    }
    return out;
}

ScenarioConfig parse_config(const std::string &text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigurationError("config must be a JSON object");
    }
    for (const auto &[key, value] : doc.items()) {
        if (key != "scenario" && key != "engine" && key != "overrides" && key != "output") {
            throw ConfigurationError("unknown config key '" + key + "'");
        }
    }
    if (!doc.contains("scenario") || !doc["scenario"].is_string()) {
        throw ConfigurationError("config needs a string 'scenario'");
    }
    ScenarioConfig c = preset(scenario_from_string(doc["scenario"].get<std::string>()));
    if (doc.contains("engine")) {
        if (!doc["engine"].is_string()) {
            throw ConfigurationError("'engine' must be a string");
        }
        c.engine = engine_from_string(doc["engine"].get<std::string>());
    }
    if (doc.contains("overrides")) {
        c.overrides = doc["overrides"];
    }
    if (doc.contains("output")) {
        const json &o = doc["output"];
        if (!o.is_object()) {
            throw ConfigurationError("'output' must be an object");
        }
        for (const auto &[key, value] : o.items()) {
            if (key != "path" && key != "format") {
                throw ConfigurationError("unknown output key '" + key + "'");
            }
            if (!value.is_string()) {
                throw ConfigurationError("output." + key + " must be a string");
            }
        }
        c.output_path = o.value("path", "");
        c.format = format_from_string(o.value("format", "csv"));
    }
    c.validate();
    return c;
}

std::string dump_config(const ScenarioConfig &config)
{
    json doc;
    doc["scenario"] = to_string(config.scenario);
    doc["engine"] = to_string(config.engine);
    doc["overrides"] = config.overrides;
    doc["output"] = {{"path", config.output_path}, {"format", to_string(config.format)}};
    return doc.dump(2) + "\n";
}

ScenarioConfig load_config(const std::string &source)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(source, ec)) {
        for (const auto &entry : scenario_names) {
            if (source == entry.second) {
                return preset(entry.first);
            }
        }
        throw ConfigurationError("config '" + source + "' is neither a file nor a preset name");
    }
    std::ifstream in(source);
    if (!in) {
        throw ConfigurationError("cannot read config '" + source + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

namespace detail {

namespace {

using liouville::ResponsePoint;

std::vector<ResponsePoint> closed_form_grid(
    const std::function<SusceptibilityMatrix(double)> &chi, std::span<const double> deltas)
{
    std::vector<ResponsePoint> out(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        out[i].delta = deltas[i];
        try {
            out[i].chi = chi(deltas[i]);
            if (!out[i].chi.finite()) {
                out[i].ok = false;
                out[i].error = "non-finite susceptibility";
            }
        } catch (const std::exception &e) {
            out[i].ok = false;
            out[i].error = e.what();
        }
    }
    return out;
}

std::shared_ptr<ChiModel> closed_form_model(std::function<SusceptibilityMatrix(double)> chi)
{
    auto m = std::make_shared<ChiModel>();
    m->engine = "analytic";
    m->grid = [chi](std::span<const double> deltas, double shift) {
        if (shift != 0.0) {
            throw ConfigurationError("closed-form engine has no velocity classes");
        }
        return closed_form_grid(chi, deltas);
    };
    m->point = [chi](double delta, double) { return chi(delta); };
    return m;
}

/// Media whose susceptibilities add; the first one carries the mixing loop.
class LiouvilleMedia
{
public:
    explicit LiouvilleMedia(std::vector<hyperfine::DrivenScheme> media)
        : m_media(std::move(media))
    {
    }

    std::vector<ResponsePoint> grid(std::span<const double> deltas, double shift) const
    {
        std::vector<ResponsePoint> out(deltas.size());
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            out[i].delta = deltas[i];
            out[i].chi = SusceptibilityMatrix{};
        }
        for (const hyperfine::DrivenScheme &m : m_media) {
            std::vector<ResponsePoint> part;
            try {
                part = liouville::linear_response_susceptibilities(m.scheme, m.drives, m.probe,
                                                                   deltas, shift);
            } catch (const NumericalError &e) {
                for (ResponsePoint &p : out) {
                    p.ok = false;
                    p.error = e.what();
                }
                return out;
            }
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                if (!part[i].ok) {
                    out[i].ok = false;
                    out[i].error = part[i].error;
                    continue;
                }
                out[i].chi.chi11 += part[i].chi.chi11;
                out[i].chi.chi12 += part[i].chi.chi12;
                out[i].chi.chi21 += part[i].chi.chi21;
                out[i].chi.chi22 += part[i].chi.chi22;
            }
        }
        return out;
    }

    SusceptibilityMatrix point(double delta, double shift) const
    {
        SusceptibilityMatrix chi{};
        for (std::size_t k = 0; k < m_media.size(); ++k) {
            const hyperfine::DrivenScheme &m = m_media[k];
            const liouville::Generator gen =
                liouville::build_rotating_frame_generator(m.scheme, m.drives, delta, shift);
            const liouville::SteadyState &state = cached_state(k, gen, shift);
            const SusceptibilityMatrix part = liouville::linear_response(gen, state, m.probe);
            chi.chi11 += part.chi11;
            chi.chi12 += part.chi12;
            chi.chi21 += part.chi21;
            chi.chi22 += part.chi22;
        }
        return chi;
    }

private:
    const liouville::SteadyState &cached_state(std::size_t medium,
                                               const liouville::Generator &gen,
                                               double shift) const
    {
        std::lock_guard<std::mutex> lock(m_mutex);
        const auto key = std::make_pair(medium, shift);
        auto it = m_states.find(key);
        if (it == m_states.end()) {
            it = m_states.emplace(key, liouville::steady_state(gen)).first;
        }
        return it->second;
    }

    std::vector<hyperfine::DrivenScheme> m_media;
    mutable std::mutex m_mutex;
    mutable std::map<std::pair<std::size_t, double>, liouville::SteadyState> m_states;
};

std::shared_ptr<ChiModel> liouville_model(std::vector<hyperfine::DrivenScheme> media)
{
    auto media_ptr = std::make_shared<LiouvilleMedia>(std::move(media));
    auto m = std::make_shared<ChiModel>();
    m->engine = "liouville";
    m->grid = [media_ptr](std::span<const double> deltas, double shift) {
        return media_ptr->grid(deltas, shift);
    };
    m->point = [media_ptr](double delta, double shift) { return media_ptr->point(delta, shift); };
    return m;
}

/// Probe-2-only two-level absorber at offset delta_0 from the probe-2 line.
hyperfine::DrivenScheme two_level_absorber(double offset, double coherence_decay,
                                           double density, double dipole)
{
    hyperfine::DrivenScheme d;
    liouville::AtomicState g;
    g.label = "g";
    g.manifold = "g";
    liouville::AtomicState e;
    e.label = "e";
    e.manifold = "e";
    e.energy = offset;
    e.excited = true;
    d.scheme.states = {g, e};
    d.scheme.couplings = {{0, 1, 1.0}};
    d.scheme.decays = {{1, 0, 2.0 * coherence_decay}};
    liouville::FieldDrive probe;
    probe.name = "probe2";
    probe.role = liouville::FieldRole::probe2;
    probe.couplings = {0};
    d.drives.fields = {probe};
    d.drives.fwm_closure = false;
    d.probe.density = density;
    d.probe.reference_dipole = dipole;
    return d;
}

std::string label(const std::string &prefix, double value)
{
    return prefix + "_" + format_double(value);
}

GridSpec resolved_grid(ScenarioId id, const json &params)
{
    GridSpec g = default_grid(id);
    if (!params["grid_lower"].is_null()) {
        g.lower = num(params, "grid_lower");
    }
    if (!params["grid_upper"].is_null()) {
        g.upper = num(params, "grid_upper");
    }
    if (!params["grid_step"].is_null()) {
        g.step = num(params, "grid_step");
    }
    return g;
}

std::vector<std::shared_ptr<ChiModel>> engines_for(
    Engine engine, const std::function<std::shared_ptr<ChiModel>()> &analytic,
    const std::function<std::shared_ptr<ChiModel>()> &liouville)
{
    switch (engine) {
    case Engine::analytic:
        return {analytic(), nullptr};
    case Engine::liouville:
        return {liouville(), nullptr};
    case Engine::both:
        return {analytic(), liouville()};
    }
    return {nullptr, nullptr};
}

CurvePlan base_plan(ScenarioId id, const json &params)
{
    CurvePlan plan;
    plan.radiative_decay = units::mhz(num(params, "radiative_decay_mhz"));
    plan.k1 = plan.k2 = 2.0 * pi / units::nm(num(params, "wavelength_nm"));
    plan.grid = resolved_grid(id, params);
    return plan;
}

void plan_fig1(const json &params, std::vector<CurvePlan> &out)
{
    require_same_length(params, {"amplifier_width_ratio", "amplifier_density_ratio"});
    const std::vector<double> widths = numbers(params, "amplifier_width_ratio");
    const std::vector<double> dens = numbers(params, "amplifier_density_ratio");
    for (std::size_t c = 0; c < widths.size(); ++c) {
        CurvePlan plan = base_plan(ScenarioId::fig1_raman_pair, params);
        plan.label = label("width", widths[c]) + label("_density", dens[c]);
        plan.parameters = {{"amplifier_width_ratio", widths[c]},
                           {"amplifier_density_ratio", dens[c]}};
        plan.ordinate = "dn_over_2pi_N_mu2_over_hbar (single mode, minus columns zero)";
        plan.analyse = true;
        const double Gr = plan.radiative_decay;
        const double gamma = num(params, "width_rel") * Gr;
        const double separation = num(params, "separation") * gamma;
        const double density = num(params, "density");
        const double dipole = dipole_from_radiative_decay(Gr, plan.k1);
        const GridSpec grid = plan.grid;
        const double w = widths[c];
        const double d = dens[c];
        plan.direct_index = [=](double x) {
            const double scale = 2.0 * pi * density * dipole * dipole / constants::hbar;
            analytic::RamanPairParams p;
            p.first = {density, dipole, gamma, x * Gr + 0.5 * separation, 1.0};
            p.second = {d * density, dipole, w * gamma, x * Gr - 0.5 * separation, -1.0};
            const ComplexIndex n = analytic::absorber_amplifier_index(p);
            return ComplexIndex{n.real_part / scale, n.imag_part / scale};
        };
        plan.direct = [grid, index = plan.direct_index]() {
            std::vector<SpectrumRow> rows;
            for (double x : grid.values()) {
                SpectrumRow row;
                row.delta = x;
                row.plus = index(x);
                rows.push_back(row);
            }
            return rows;
        };
        out.push_back(std::move(plan));
    }
}

void plan_fig3(const ScenarioConfig &config, const json &params, std::vector<CurvePlan> &out)
{
    const double Gr = units::mhz(num(params, "radiative_decay_mhz"));
    const double lambda = units::nm(num(params, "wavelength_nm"));
    const double gamma_rel = num(params, "gamma_rel");

    const auto add_curve = [&](std::string name, const FourLevelParams &p, json extra) {
        CurvePlan plan = base_plan(config.scenario, params);
        plan.label = std::move(name);
        extra["density"] = p.density;
        extra["omega_rel"] = p.control_rabi / Gr;
        extra["gamma21_rel"] = p.ground_coherence_decay / Gr;
        plan.parameters = std::move(extra);
        const auto models = engines_for(
            config.engine,
            [p] {
                return closed_form_model(
                    [p](double delta) { return analytic::fwm_susceptibilities(p, delta); });
            },
            [p] { return liouville_model({hyperfine::idealized_four_level(p, true)}); });
        plan.primary = models[0];
        plan.secondary = models[1];
        out.push_back(std::move(plan));
    };

    for (double N : numbers(params, "densities")) {
        add_curve(label("N", N),
                  FourLevelParams::from_relative(Gr, num(params, "omega_rel"), gamma_rel,
                                                 num(params, "gamma21_rel"), N, lambda),
                  json::object());
    }
    const analytic::RabiWindow window{num(params, "omega_window_lower") * Gr,
                                      num(params, "omega_window_upper") * Gr};
    if (!(window.lower < window.upper)) {
        throw ConfigurationError("omega_window_lower must be below omega_window_upper");
    }
    for (double ratio : numbers(params, "gamma21_series")) {
        const double gamma = gamma_rel * Gr;
        const analytic::RabiOptimum opt =
            analytic::optimize_control_rabi(gamma, ratio * gamma, Gr, window);
        FourLevelParams p = FourLevelParams::from_relative(
            Gr, opt.control_rabi / Gr, gamma_rel, ratio * gamma_rel,
            num(params, "series_density"), lambda);
        add_curve(label("gamma21_over_gamma", ratio), p,
                  json{{"omega_optimized", true}, {"omega_at_boundary", opt.at_boundary}});
    }
}

void plan_fig4_collisional(const json &params, std::vector<CurvePlan> &out)
{
    require_same_length(params, {"densities", "omegas_rel"});
    const std::vector<double> dens = numbers(params, "densities");
    const std::vector<double> omegas = numbers(params, "omegas_rel");
    const hyperfine::LineSet lines =
        hyperfine::line_set_from_string(params["lines"].get<std::string>());
    for (std::size_t c = 0; c < dens.size(); ++c) {
        CurvePlan plan = base_plan(ScenarioId::fig4_k40_collisional, params);
        const double Gr = plan.radiative_decay;
        broadening::BroadeningSpec spec;
        spec.collisional_coefficient = units::mhz(num(params, "beta_mhz_cm3"));
        hyperfine::HyperfineConstants constants;
        constants.d1_decay = Gr;
        constants.d1_wavelength = units::nm(num(params, "wavelength_nm"));
        hyperfine::K40MixingOptions o;
        o.lines = lines;
        o.control1_rabi = o.control2_rabi = omegas[c] * Gr;
        o.density = dens[c];
        o.optical_dephasing = broadening::collisional_gamma(dens[c], spec);
        o.ground_dephasing = num(params, "gamma21_rel") * Gr;
        plan.label = label("N", dens[c]);
        plan.parameters = {{"density", dens[c]},
                           {"omega_rel", omegas[c]},
                           {"collisional_gamma_rel", o.optical_dephasing / Gr}};
        plan.primary = liouville_model({hyperfine::k40_mixing_scheme(o, constants)});
        out.push_back(std::move(plan));
    }
}

void plan_fig4_doppler(const json &params, std::vector<CurvePlan> &out)
{
    require_same_length(params, {"temperatures", "omegas_rel"});
    const std::vector<double> temps = numbers(params, "temperatures");
    const std::vector<double> omegas = numbers(params, "omegas_rel");
    for (std::size_t c = 0; c < temps.size(); ++c) {
        CurvePlan plan = base_plan(ScenarioId::fig4_k40_doppler, params);
        const double Gr = plan.radiative_decay;
        broadening::BroadeningSpec spec;
        spec.collisional_coefficient = units::mhz(num(params, "beta_mhz_cm3"));
        spec.temperature = temps[c];
        spec.mass = num(params, "mass_u") * constants::atomic_mass_unit;
        spec.doppler_nodes = params["doppler_nodes"].get<int>();
        spec.validate();
        const double density = broadening::vapor_density(temps[c]);
        const double width = broadening::doppler_width(temps[c], spec.mass, plan.k1);

        hyperfine::HyperfineConstants constants;
        constants.d1_decay = Gr;
        constants.d1_wavelength = units::nm(num(params, "wavelength_nm"));
        constants.d2_decay = units::mhz(num(params, "d2_decay_mhz"));
        hyperfine::K40MixingOptions o;
        o.lines = hyperfine::LineSet::D1_D2;
        o.control1_rabi = o.control2_rabi = omegas[c] * Gr;
        o.density = density;
        o.optical_dephasing = broadening::collisional_gamma(density, spec);
        o.ground_dephasing = num(params, "gamma21_rel") * Gr;

        if (params["grid_lower"].is_null()) {
            const double half = num(params, "grid_doppler_widths") * width / Gr;
            const long points = params["grid_points"].get<long>();
            if (points < 2) {
                throw ConfigurationError("grid_points must be at least 2");
            }
            plan.grid = {-half, half, 2.0 * half / static_cast<double>(points - 1)};
        }
        plan.doppler_width = width;
        plan.doppler_nodes = spec.doppler_nodes;
        plan.check_doubling = params["check_doubling"].get<bool>();
        plan.doppler_tolerance = num(params, "doppler_tolerance");
        plan.label = label("T", temps[c]);
        plan.parameters = {{"temperature", temps[c]},
                           {"density", density},
                           {"omega_rel", omegas[c]},
                           {"collisional_gamma_rel", o.optical_dephasing / Gr},
                           {"doppler_width_rel", width / Gr}};
        plan.primary = liouville_model({hyperfine::k40_mixing_scheme(o, constants)});
        out.push_back(std::move(plan));
    }
}

void plan_fig5(const json &params, std::vector<CurvePlan> &out)
{
    for (double ratio : numbers(params, "gamma21_series")) {
        CurvePlan plan = base_plan(ScenarioId::fig5_F_curves, params);
        plan.label = label("gamma21_over_gamma", ratio);
        plan.parameters = {{"gamma21_over_gamma", ratio}};
        plan.abscissa = "omega_over_gamma_r";
        plan.ordinate = "enhancement factor F in dn_plus_re; rows without a zero omitted";
        plan.analyse = false;
        const double Gr = plan.radiative_decay;
        const double gamma = num(params, "gamma_rel") * Gr;
        const GridSpec grid = plan.grid;
        plan.direct = [=]() {
            std::vector<SpectrumRow> rows;
            for (double x : grid.values()) {
                const auto F = analytic::enhancement_factor(x * Gr, gamma, ratio * gamma, Gr);
                if (!F) {
                    continue;
                }
                SpectrumRow row;
                row.delta = x;
                row.plus.real_part = *F;
                rows.push_back(row);
            }
            return rows;
        };
        out.push_back(std::move(plan));
    }
}

void plan_fig6a(const ScenarioConfig &config, const json &params, std::vector<CurvePlan> &out)
{
    CurvePlan plan = base_plan(config.scenario, params);
    const double Gr = plan.radiative_decay;
    const FourLevelParams p = FourLevelParams::from_relative(
        Gr, num(params, "omega_rel"), num(params, "gamma_rel"), num(params, "gamma21_rel"),
        num(params, "density"), units::nm(num(params, "wavelength_nm")));
    analytic::TwoLevelAbsorberParams a;
    a.density = num(params, "absorber_ratio") * p.density;
    a.dipole = num(params, "absorber_dipole_ratio") * p.dipole();
    a.coherence_decay = num(params, "gamma_abs_rel") * Gr;
    a.offset = num(params, "delta0_rel") * Gr;
    plan.label = "composite";
    plan.parameters = {{"absorber_density", a.density}};
    const auto models = engines_for(
        config.engine,
        [p, a] {
            return closed_form_model([p, a](double delta) {
                return analytic::composite_susceptibilities(p, a, delta);
            });
        },
        [p, a] {
            return liouville_model(
                {hyperfine::idealized_four_level(p, true),
                 two_level_absorber(a.offset, a.coherence_decay, a.density, a.dipole)});
        });
    plan.primary = models[0];
    plan.secondary = models[1];
    out.push_back(std::move(plan));
}

void plan_fig6c(const json &params, std::vector<CurvePlan> &out)
{
    require_same_length(params,
                        {"densities", "k39_ratios", "omegas_rel", "raman_omegas_rel", "delta0s_rel"});
    const std::vector<double> dens = numbers(params, "densities");
    const std::vector<double> ratios = numbers(params, "k39_ratios");
    const std::vector<double> omegas = numbers(params, "omegas_rel");
    const std::vector<double> raman = numbers(params, "raman_omegas_rel");
    const std::vector<double> offsets = numbers(params, "delta0s_rel");
    for (std::size_t c = 0; c < dens.size(); ++c) {
        CurvePlan plan = base_plan(ScenarioId::fig6c_k39_k40, params);
        const double Gr = plan.radiative_decay;
        broadening::BroadeningSpec spec;
        spec.collisional_coefficient = units::mhz(num(params, "beta_mhz_cm3"));
        const double n39 = ratios[c] * dens[c];
        const double coll = broadening::collisional_gamma(dens[c] + n39, spec);
        hyperfine::HyperfineConstants constants;
        constants.d1_decay = Gr;
        constants.d1_wavelength = units::nm(num(params, "wavelength_nm"));

        hyperfine::K40MixingOptions o;
        o.control1_rabi = o.control2_rabi = omegas[c] * Gr;
        o.density = dens[c];
        o.optical_dephasing = coll;
        o.ground_dephasing = num(params, "gamma21_rel") * Gr;
        hyperfine::DrivenScheme k40 = hyperfine::k40_mixing_scheme(o, constants);

        double probe2 = 0.0;
        for (const liouville::FieldDrive &f : k40.drives.fields) {
            if (f.role == liouville::FieldRole::probe2) {
                probe2 = f.frequency;
            }
        }
        hyperfine::K39RamanOptions r;
        r.control_rabi = raman[c] * Gr;
        r.density = n39;
        r.raman_offset = offsets[c] * Gr;
        r.probe2_frequency = probe2;
        r.optical_dephasing = coll;
        r.ground_dephasing = num(params, "gamma21_rel") * Gr;
        r.ground_relaxation = num(params, "ground_relaxation_rel") * Gr;

        plan.label = label("N40", dens[c]);
        plan.parameters = {{"density_40k", dens[c]},
                           {"density_39k", n39},
                           {"omega_rel", omegas[c]},
                           {"raman_omega_rel", raman[c]},
                           {"delta0_rel", offsets[c]},
                           {"collisional_gamma_rel", coll / Gr}};
        plan.primary = liouville_model({std::move(k40), hyperfine::k39_raman_scheme(r, constants)});
        out.push_back(std::move(plan));
    }
}

} // namespace

std::vector<CurvePlan> plan_curves(const ScenarioConfig &config, const json &params)
{
    std::vector<CurvePlan> out;
    try {
        switch (config.scenario) {
        case ScenarioId::fig1_raman_pair:
            plan_fig1(params, out);
            break;
        case ScenarioId::fig3_ideal_fwm:
            plan_fig3(config, params, out);
            break;
        case ScenarioId::fig4_k40_collisional:
            plan_fig4_collisional(params, out);
            break;
        case ScenarioId::fig4_k40_doppler:
            plan_fig4_doppler(params, out);
            break;
        case ScenarioId::fig5_F_curves:
            plan_fig5(params, out);
            break;
        case ScenarioId::fig6a_ideal_composite:
            plan_fig6a(config, params, out);
            break;
        case ScenarioId::fig6c_k39_k40:
            plan_fig6c(params, out);
            break;
        }
    } catch (const DomainError &e) {
        throw ConfigurationError(std::string("invalid scenario parameters: ") + e.what());
    }
    for (const CurvePlan &plan : out) {
        plan.grid.validate();
    }
    return out;
}

OmegaKnob omega_knob(ScenarioId id)
{
    switch (id) {
    case ScenarioId::fig3_ideal_fwm:
    case ScenarioId::fig6a_ideal_composite:
        return {"omega_rel", true};
    case ScenarioId::fig4_k40_collisional:
    case ScenarioId::fig4_k40_doppler:
    case ScenarioId::fig6c_k39_k40:
        return {"omegas_rel", false};
    default:
        throw ConfigurationError("scenario has no control Rabi frequency to optimise");
    }
}

} // namespace detail

} // namespace fwm::analysis
