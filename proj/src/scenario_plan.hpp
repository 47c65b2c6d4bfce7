#ifndef FWM_SCENARIO_PLAN_HPP
#define FWM_SCENARIO_PLAN_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <fwm/analysis.hpp>
#include <fwm/liouville.hpp>

namespace fwm::analysis::detail {

/// One susceptibility engine for a curve. Detunings are in rad/s here.
struct ChiModel
{
    std::string engine;
    /// Grid evaluation for one velocity class (shift in rad/s).
    std::function<std::vector<liouville::ResponsePoint>(std::span<const double> deltas,
                                                        double shift)>
        grid;
    /// Single detuning, used by root refinement.
    std::function<SusceptibilityMatrix(double delta, double shift)> point;
};

/// Everything needed to compute one curve of a scenario.
struct CurvePlan
{
    std::string label;
    nlohmann::json parameters = nlohmann::json::object();
    GridSpec grid;
    double radiative_decay = 0.0; // rad/s, the grid unit
    double k1 = 0.0;
    double k2 = 0.0;

    double doppler_width = 0.0; // rad/s, 0 disables averaging
    int doppler_nodes = 64;
    bool check_doubling = true;
    double doppler_tolerance = 1e-6;

    std::shared_ptr<ChiModel> primary;
    std::shared_ptr<ChiModel> secondary; // engine = both

    /// Curves that are not propagation spectra (closed-form tables).
    std::function<std::vector<SpectrumRow>()> direct;
    /// Closed-form index of a direct curve, used for root refinement.
    std::function<ComplexIndex(double x)> direct_index;
    std::string abscissa = "delta_over_gamma_r";
    std::string ordinate = "dn_plus_dn_minus";

    /// Run the zero-absorption search and gain check on this curve.
    bool analyse = true;
};

std::vector<CurvePlan> plan_curves(const ScenarioConfig &config, const nlohmann::json &params);

/// Rabi-frequency knob of a multilevel curve for the optimiser: the
/// override key and the curve's position in it.
struct OmegaKnob
{
    std::string key;
    bool closed_form = false;
};
OmegaKnob omega_knob(ScenarioId id);

} // namespace fwm::analysis::detail

#endif
