#ifndef FWM_ANALYSIS_HPP
#define FWM_ANALYSIS_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <fwm/core.hpp>

/**
 * Scenario runner: named parameter presets for every figure, spectrum
 * sweeps over a detuning grid, zero-absorption search and the
 * no-nearby-gain check, plus CSV/JSON emission.
 *
 * All detunings in configs and results are in units of Gamma_r.
 */
namespace fwm::analysis {

inline constexpr const char *code_version = "0.1.0";

/// File could not be written; the message names the path.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioId {
    fig1_raman_pair,
    fig3_ideal_fwm,
    fig4_k40_collisional,
    fig4_k40_doppler,
    fig5_F_curves,
    fig6a_ideal_composite,
    fig6c_k39_k40,
};

enum class Engine { analytic, liouville, both };
enum class OutputFormat { csv, json };

std::string to_string(ScenarioId id);
std::string to_string(Engine engine);
std::string to_string(OutputFormat format);
ScenarioId scenario_from_string(const std::string &name);
Engine engine_from_string(const std::string &name);
OutputFormat format_from_string(const std::string &name);
std::vector<ScenarioId> all_scenarios();

enum class ParameterKind { number, number_list, integer, boolean, text };

struct ParameterSpec
{
    std::string name;
    ParameterKind kind = ParameterKind::number;
    nlohmann::json default_value;
    /// Numbers (or list entries) must be > 0.
    bool positive = false;
    /// null means "derive automatically" (e.g. Doppler grid bounds).
    bool nullable = false;
    std::string description;
};

std::vector<ParameterSpec> scenario_schema(ScenarioId id);
std::vector<Engine> supported_engines(ScenarioId id);

struct ScenarioConfig
{
    ScenarioId scenario = ScenarioId::fig3_ideal_fwm;
    Engine engine = Engine::analytic;
    nlohmann::json overrides = nlohmann::json::object();
    std::string output_path;
    OutputFormat format = OutputFormat::csv;

    /// Throws ConfigurationError when overrides do not fit the schema.
    void validate() const;
    bool operator==(const ScenarioConfig &) const = default;
};

/// Default config of a scenario: caption parameters and its first engine.
ScenarioConfig preset(ScenarioId id);

/// Schema defaults merged with the overrides, type-checked.
nlohmann::json resolve_parameters(const ScenarioConfig &config);

ScenarioConfig parse_config(const std::string &text);
std::string dump_config(const ScenarioConfig &config);
/// Reads a config file, or returns the preset when `source` names a scenario.
ScenarioConfig load_config(const std::string &source);

/// Uniform detuning grid in Gamma_r units.
struct GridSpec
{
    double lower = -3.0;
    double upper = 3.0;
    double step = 0.003;

    std::size_t points() const;
    std::vector<double> values() const;
    void validate() const;
    bool operator==(const GridSpec &) const = default;
};

struct SpectrumRow
{
    double delta = 0.0; // Gamma_r units
    ComplexIndex plus;
    ComplexIndex minus;
    std::optional<double> discrepancy;

    bool operator==(const SpectrumRow &) const = default;
};

struct ZeroCrossing
{
    double delta = 0.0;      // Gamma_r units
    double index_real = 0.0; // dn_plus' at the root
    /// +1 when dn_plus'' goes from gain to absorption with increasing delta.
    int direction = 0;
    double residual = 0.0; // |dn_plus''| after refinement

    bool operator==(const ZeroCrossing &) const = default;
};

struct GainCheck
{
    double root = 0.0;
    double half_width = 0.0;
    bool no_gain = false;
    double minimum_imag = 0.0;

    bool operator==(const GainCheck &) const = default;
};

struct FlaggedPoint
{
    double delta = 0.0;
    std::string error;

    bool operator==(const FlaggedPoint &) const = default;
};

struct Curve
{
    std::string label;
    std::vector<SpectrumRow> rows;
    std::vector<ZeroCrossing> roots;
    std::optional<GainCheck> gain_check;
    std::vector<FlaggedPoint> flagged;
    nlohmann::json metadata = nlohmann::json::object();

    bool operator==(const Curve &) const = default;
};

struct SpectrumResult
{
    ScenarioConfig config;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<Curve> curves;

    bool has_discrepancy() const;
    const Curve &curve(const std::string &label) const;
    bool operator==(const SpectrumResult &) const = default;
};

/**
 * Runs every curve of the scenario. Isolated engine failures are flagged
 * and dropped from the rows; more than 5% flagged points in a curve
 * throws NumericalError.
 */
SpectrumResult run_scenario(const ScenarioConfig &config);

/// dn_plus at delta (Gamma_r units) inside the bracket rows [row, row + 1].
using IndexEvaluator = std::function<ComplexIndex(double delta, std::size_t row)>;

/**
 * Sign changes of dn_plus'' over the rows, refined by bisection on
 * `refine` until |dn_plus''| < 1e-10 (or the bracket collapses). Without an
 * evaluator the root is linearly interpolated between the rows. Roots are
 * sorted by |dn_plus'| descending; no sign change gives an empty list.
 */
std::vector<ZeroCrossing> find_zero_absorption(const Curve &curve,
                                               const IndexEvaluator &refine = {});

/**
 * True when dn_plus'' >= -tolerance over [root - half_width, root +
 * half_width], excluding the rows within two grid steps of the root.
 * Throws DomainError when the window leaves the grid.
 */
GainCheck check_no_nearby_gain(const Curve &curve, double root, double half_width,
                               double tolerance = 1e-9);

/// Root with the largest positive dn_plus', if any.
std::optional<ZeroCrossing> best_enhancement(const Curve &curve);

struct OmegaCandidate
{
    std::string curve;
    double omega = 0.0; // Gamma_r units
    double index_real = 0.0;
    double delta = 0.0;
    bool found = false;
    bool at_boundary = false;
};

/**
 * Control Rabi frequency maximising dn_plus' at the zero-absorption point,
 * per curve. Closed-form scenarios use the enhancement factor; multilevel
 * ones scan the spectrum over a log grid of Omega.
 */
std::vector<OmegaCandidate> optimize_omega(const ScenarioConfig &config,
                                           std::optional<double> lower = std::nullopt,
                                           std::optional<double> upper = std::nullopt,
                                           int scan_points = 13);

/// Worker count from FWM_WORKERS (default: hardware concurrency, at least 1).
unsigned worker_count();

/* emission */

std::string format_double(double value);
std::string emit_csv(const Curve &curve, bool with_discrepancy);
std::string emit_json(const SpectrumResult &result);
SpectrumResult parse_result_json(const std::string &text);

/**
 * Writes the result to `path`: JSON as one document, CSV as one file per
 * curve (`<stem>.<label>.csv` when there is more than one curve). Returns
 * the files written. I/O failures throw OutputError.
 */
std::vector<std::filesystem::path> emit(const SpectrumResult &result,
                                        const std::filesystem::path &path,
                                        OutputFormat format);

} // namespace fwm::analysis

#endif
