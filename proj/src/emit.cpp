#include <fwm/analysis.hpp>

#include <charconv>
#include <fstream>
#include <system_error>

namespace fwm::analysis {

using nlohmann::json;

namespace {

const char *const csv_header = "delta_over_gamma_r,dn_plus_re,dn_plus_im,dn_minus_re,dn_minus_im";

json row_to_json(const SpectrumRow &r)
{
    json row = json::array({r.delta, r.plus.real_part, r.plus.imag_part, r.minus.real_part,
                            r.minus.imag_part});
    if (r.discrepancy) {
        row.push_back(*r.discrepancy);
    }
    return row;
}

SpectrumRow row_from_json(const json &j)
{
    if (!j.is_array() || (j.size() != 5 && j.size() != 6)) {
        throw ConfigurationError("result row must hold 5 or 6 numbers");
    }
    SpectrumRow r;
    r.delta = j[0].get<double>();
    r.plus = {j[1].get<double>(), j[2].get<double>()};
    r.minus = {j[3].get<double>(), j[4].get<double>()};
    if (j.size() == 6) {
        r.discrepancy = j[5].get<double>();
    }
    return r;
}

json curve_to_json(const Curve &c)
{
    json out;
    out["label"] = c.label;
    out["metadata"] = c.metadata;
    json rows = json::array();
    for (const SpectrumRow &r : c.rows) {
        rows.push_back(row_to_json(r));
    }
    out["rows"] = std::move(rows);
    json roots = json::array();
    for (const ZeroCrossing &z : c.roots) {
        roots.push_back({{"delta", z.delta},
                         {"index_real", z.index_real},
                         {"direction", z.direction},
                         {"residual", z.residual}});
    }
    out["roots"] = std::move(roots);
    if (c.gain_check) {
        out["gain_check"] = {{"root", c.gain_check->root},
                             {"half_width", c.gain_check->half_width},
                             {"no_gain", c.gain_check->no_gain},
                             {"minimum_imag", c.gain_check->minimum_imag}};
    } else {
        out["gain_check"] = nullptr;
    }
    json flagged = json::array();
    for (const FlaggedPoint &f : c.flagged) {
        flagged.push_back({{"delta", f.delta}, {"error", f.error}});
    }
    out["flagged"] = std::move(flagged);
    return out;
}

Curve curve_from_json(const json &j)
{
    Curve c;
    c.label = j.at("label").get<std::string>();
    c.metadata = j.at("metadata");
    for (const json &r : j.at("rows")) {
        c.rows.push_back(row_from_json(r));
    }
    for (const json &z : j.at("roots")) {
        c.roots.push_back({z.at("delta").get<double>(), z.at("index_real").get<double>(),
                           z.at("direction").get<int>(), z.at("residual").get<double>()});
    }
    const json &g = j.at("gain_check");
    if (!g.is_null()) {
        c.gain_check = GainCheck{g.at("root").get<double>(), g.at("half_width").get<double>(),
                                 g.at("no_gain").get<bool>(), g.at("minimum_imag").get<double>()};
    }
    for (const json &f : j.at("flagged")) {
        c.flagged.push_back({f.at("delta").get<double>(), f.at("error").get<std::string>()});
    }
    return c;
}

void write_file(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw OutputError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw OutputError("failed writing '" + path.string() + "'");
    }
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw OutputError("number formatting failed");
    }
    return std::string(buf, end);
}

std::string emit_csv(const Curve &curve, bool with_discrepancy)
{
    std::string out = csv_header;
    if (with_discrepancy) {
        out += ",discrepancy";
    }
    out += '\n';
    for (const SpectrumRow &r : curve.rows) {
        out += format_double(r.delta);
        for (double v : {r.plus.real_part, r.plus.imag_part, r.minus.real_part, r.minus.imag_part}) {
            out += ',';
            out += format_double(v);
        }
        if (with_discrepancy) {
            out += ',';
            out += format_double(r.discrepancy.value_or(0.0));
        }
        out += '\n';
    }
    return out;
}

std::string emit_json(const SpectrumResult &result)
{
    json doc;
    doc["config"] = json::parse(dump_config(result.config));
    doc["parameters"] = result.parameters;
    doc["metadata"] = result.metadata;
    json curves = json::array();
    for (const Curve &c : result.curves) {
        curves.push_back(curve_to_json(c));
    }
    doc["curves"] = std::move(curves);
    return doc.dump() + "\n";
}

SpectrumResult parse_result_json(const std::string &text)
{
    try {
        const json doc = json::parse(text);
        SpectrumResult r;
        r.config = parse_config(doc.at("config").dump());
        r.parameters = doc.at("parameters");
        r.metadata = doc.at("metadata");
        for (const json &c : doc.at("curves")) {
            r.curves.push_back(curve_from_json(c));
        }
        return r;
    } catch (const json::exception &e) {
        throw ConfigurationError(std::string("malformed result document: ") + e.what());
    }
}

std::vector<std::filesystem::path> emit(const SpectrumResult &result,
                                        const std::filesystem::path &path, OutputFormat format)
{
    if (path.empty()) {
        throw OutputError("no output path given");
    }
    if (format == OutputFormat::json) {
        write_file(path, emit_json(result));
        return {path};
    }
    const bool discrepancy = result.has_discrepancy();
    std::vector<std::filesystem::path> written;
    for (const Curve &c : result.curves) {
        std::filesystem::path target = path;
        if (result.curves.size() > 1) {
            target = path.parent_path() /
                     (path.stem().string() + "." + c.label + path.extension().string());
        }
        write_file(target, emit_csv(c, discrepancy));
        written.push_back(target);
    }
    return written;
}

} // namespace fwm::analysis
