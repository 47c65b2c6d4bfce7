#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fwm/analysis.hpp>
#include <fwm/validation.hpp>

namespace {

using namespace fwm;
using nlohmann::json;

enum ExitCode { ok = 0, config_error = 2, numerical_error = 3, acceptance_failure = 4 };

std::string summary_line(const analysis::Curve &c)
{
    std::string line = c.label + ": " + std::to_string(c.rows.size()) + " rows, " +
                       std::to_string(c.flagged.size()) + " flagged, " +
                       std::to_string(c.roots.size()) + " zero-absorption points";
    if (const auto best = analysis::best_enhancement(c)) {
        line += "; best dn_plus' = " + analysis::format_double(best->index_real) +
                " at delta = " + analysis::format_double(best->delta) + " Gamma_r";
    }
    if (c.gain_check) {
        line += c.gain_check->no_gain ? "; no gain nearby" : "; gain nearby";
    }
    return line;
}

void write_result(const analysis::SpectrumResult &r, const std::string &path,
                  analysis::OutputFormat format)
{
    if (path.empty()) {
        if (format == analysis::OutputFormat::json) {
            std::cout << analysis::emit_json(r);
        } else {
            for (const analysis::Curve &c : r.curves) {
                std::cout << "# curve " << c.label << "\n"
                          << analysis::emit_csv(c, r.has_discrepancy());
            }
        }
        return;
    }
    for (const auto &p : analysis::emit(r, path, format)) {
        std::cerr << "wrote " << p.string() << "\n";
    }
}

std::string suffixed(const std::string &path, const std::string &suffix)
{
    const std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + "." + suffix + p.extension().string())).string();
}

json override_value(const analysis::ScenarioConfig &config, const std::string &param, double value)
{
    for (const analysis::ParameterSpec &spec : analysis::scenario_schema(config.scenario)) {
        if (spec.name != param) {
            continue;
        }
        switch (spec.kind) {
        case analysis::ParameterKind::number:
            return value;
        case analysis::ParameterKind::number_list:
            return json::array({value});
        case analysis::ParameterKind::integer:
            if (value != std::floor(value)) {
                throw ConfigurationError("parameter '" + param + "' takes integers");
            }
            return static_cast<long long>(value);
        default:
            throw ConfigurationError("parameter '" + param + "' cannot be swept numerically");
        }
    }
    throw ConfigurationError("unknown parameter '" + param + "' for " +
                             analysis::to_string(config.scenario));
}

int run_validate(const std::string &report_path)
{
    std::vector<validation::CheckResult> results;
    for (const auto &check : validation::oracle_checks()) {
        results.push_back(check.run());
    }
    const std::string report = validation::format_report(results);
    if (report_path.empty()) {
        std::cout << report;
    } else {
        std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
        out << report;
        if (!out) {
            throw analysis::OutputError("cannot write report '" + report_path + "'");
        }
    }
    for (const auto &r : results) {
        if (!r.pass) {
            return acceptance_failure;
        }
    }
    return ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Refractive-index enhancement spectra: scenario runner and oracle checks"};
    app.require_subcommand(1);

    std::string config_source;
    std::string output;
    std::string format;

    auto *run = app.add_subcommand("run", "Run a scenario config file or preset name");
    run->add_option("config", config_source, "config file or preset name")->required();
    run->add_option("-o,--output", output, "output path (overrides the config)");
    run->add_option("-f,--format", format, "csv or json (overrides the config)");

    std::string param;
    std::vector<double> values;
    auto *sweep = app.add_subcommand("sweep", "Run a scenario for several values of one parameter");
    sweep->add_option("config", config_source, "config file or preset name")->required();
    sweep->add_option("--param", param, "parameter to vary")->required();
    sweep->add_option("--values", values, "values (comma separated)")->required()->delimiter(',');
    sweep->add_option("-o,--output", output, "output path; one file set per value");
    sweep->add_option("-f,--format", format, "csv or json");

    double lower = 0.0;
    double upper = 0.0;
    int points = 13;
    auto *optimize = app.add_subcommand("optimize-omega",
                                        "Control Rabi frequency maximising the enhanced index");
    optimize->add_option("config", config_source, "config file or preset name")->required();
    optimize->add_option("--lower", lower, "scan lower edge, Gamma_r");
    optimize->add_option("--upper", upper, "scan upper edge, Gamma_r");
    optimize->add_option("--points", points, "log-spaced scan points")->check(CLI::Range(3, 1000));

    std::string report;
    auto *validate = app.add_subcommand("validate", "Run the oracle cross-checks");
    validate->add_option("--report", report, "write the report here instead of stdout");

    std::string preset_name;
    auto *show = app.add_subcommand("preset", "Print the config of a named preset");
    show->add_option("scenario", preset_name, "scenario id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return config_error;
    }

    try {
        if (*validate) {
            return run_validate(report);
        }
        if (*show) {
            std::cout << analysis::dump_config(
                analysis::preset(analysis::scenario_from_string(preset_name)));
            return ok;
        }

        analysis::ScenarioConfig config = analysis::load_config(config_source);
        if (!output.empty()) {
            config.output_path = output;
        }
        if (!format.empty()) {
            config.format = analysis::format_from_string(format);
        }

        if (*run) {
            const analysis::SpectrumResult r = analysis::run_scenario(config);
            for (const auto &c : r.curves) {
                std::cerr << summary_line(c) << "\n";
            }
            write_result(r, config.output_path, config.format);
            return ok;
        }
        if (*sweep) {
            std::cout << "value,curve,zero_delta_over_gamma_r,dn_plus_re_at_zero,no_gain\n";
            for (double v : values) {
                analysis::ScenarioConfig trial = config;
                trial.overrides[param] = override_value(config, param, v);
                const analysis::SpectrumResult r = analysis::run_scenario(trial);
                for (const auto &c : r.curves) {
                    const auto best = analysis::best_enhancement(c);
                    std::cout << analysis::format_double(v) << ',' << c.label << ','
                              << (best ? analysis::format_double(best->delta) : "") << ','
                              << (best ? analysis::format_double(best->index_real) : "") << ','
                              << (c.gain_check ? (c.gain_check->no_gain ? "true" : "false") : "")
                              << "\n";
                }
                if (!config.output_path.empty()) {
                    write_result(r, suffixed(config.output_path, param + "_" + analysis::format_double(v)),
                                 config.format);
                }
            }
            return ok;
        }
        if (*optimize) {
            const auto found = analysis::optimize_omega(
                config, lower > 0.0 ? std::optional<double>(lower) : std::nullopt,
                upper > 0.0 ? std::optional<double>(upper) : std::nullopt, points);
            json out = json::array();
            for (const auto &c : found) {
                out.push_back({{"curve", c.curve},
                               {"omega_over_gamma_r", c.omega},
                               {"dn_plus_re", c.index_real},
                               {"delta_over_gamma_r", c.delta},
                               {"found", c.found},
                               {"at_boundary", c.at_boundary}});
            }
            std::cout << out.dump(2) << "\n";
            return ok;
        }
    } catch (const ConfigurationError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const DomainError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const analysis::OutputError &e) {
        std::cerr << "output error: " << e.what() << "\n";
        return config_error;
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical_error;
    }
    return ok;
}
