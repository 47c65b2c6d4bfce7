#include <fwm/scheme_io.hpp>

#include <json.hpp>

namespace fwm::liouville {

using nlohmann::json;

void to_json(json &j, const AtomicState &s)
{
    j = json{{"label", s.label}, {"manifold", s.manifold}, {"energy", s.energy},
             {"F", s.F},         {"mF", s.mF},             {"excited", s.excited}};
}

void from_json(const json &j, AtomicState &s)
{
    j.at("label").get_to(s.label);
    s.manifold = j.value("manifold", s.label);
    j.at("energy").get_to(s.energy);
    s.F = j.value("F", 0.0);
    s.mF = j.value("mF", 0.0);
    j.at("excited").get_to(s.excited);
}

void to_json(json &j, const DipoleCoupling &c)
{
    j = json{{"lower", c.lower}, {"upper", c.upper}, {"strength", c.strength}};
}

void from_json(const json &j, DipoleCoupling &c)
{
    j.at("lower").get_to(c.lower);
    j.at("upper").get_to(c.upper);
    j.at("strength").get_to(c.strength);
}

void to_json(json &j, const DecayChannel &d)
{
    j = json{{"upper", d.upper}, {"lower", d.lower}, {"rate", d.rate}};
}

void from_json(const json &j, DecayChannel &d)
{
    j.at("upper").get_to(d.upper);
    j.at("lower").get_to(d.lower);
    j.at("rate").get_to(d.rate);
}

void to_json(json &j, const Dephasing &d)
{
    j = json{{"first", d.first}, {"second", d.second}, {"rate", d.rate}};
}

void from_json(const json &j, Dephasing &d)
{
    j.at("first").get_to(d.first);
    j.at("second").get_to(d.second);
    j.at("rate").get_to(d.rate);
}

void to_json(json &j, const FieldDrive &f)
{
    j = json{{"name", f.name},           {"role", to_string(f.role)},
             {"frequency", f.frequency}, {"rabi", f.rabi},
             {"direction", f.direction}, {"couplings", f.couplings}};
}

void from_json(const json &j, FieldDrive &f)
{
    j.at("name").get_to(f.name);
    f.role = field_role_from_string(j.at("role").get<std::string>());
    j.at("frequency").get_to(f.frequency);
    f.rabi = j.value("rabi", 0.0);
    f.direction = j.value("direction", 1);
    j.at("couplings").get_to(f.couplings);
}

std::string dump_level_scheme(const LevelScheme &scheme)
{
    const json j{{"states", scheme.states},
                 {"couplings", scheme.couplings},
                 {"decays", scheme.decays},
                 {"dephasing", scheme.dephasing}};
    return j.dump(2) + "\n";
}

LevelScheme parse_level_scheme(const std::string &text)
{
    LevelScheme scheme;
    try {
        const json j = json::parse(text);
        j.at("states").get_to(scheme.states);
        j.at("couplings").get_to(scheme.couplings);
        j.at("decays").get_to(scheme.decays);
        if (j.contains("dephasing")) {
            j.at("dephasing").get_to(scheme.dephasing);
        }
    } catch (const json::exception &e) {
        throw ConfigurationError(std::string("level scheme document: ") + e.what());
    }
    scheme.validate();
    return scheme;
}

std::string dump_drive_assignment(const DriveAssignment &drives)
{
    const json j{{"fields", drives.fields}, {"fwm_closure", drives.fwm_closure}};
    return j.dump(2) + "\n";
}

DriveAssignment parse_drive_assignment(const std::string &text)
{
    DriveAssignment drives;
    try {
        const json j = json::parse(text);
        j.at("fields").get_to(drives.fields);
        drives.fwm_closure = j.value("fwm_closure", true);
    } catch (const json::exception &e) {
        throw ConfigurationError(std::string("drive assignment document: ") + e.what());
    }
    return drives;
}

} // namespace fwm::liouville
