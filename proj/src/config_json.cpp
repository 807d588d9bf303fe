#include "nanosim/config_json.hpp"

#include "nanosim/errors.hpp"

#include <functional>
#include <map>

namespace nanosim {

using nlohmann::json;

json config_to_json(const GenerationConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["name"] = c.name;
    j["sampfreq"] = c.sampfreq;
    j["vshift"] = c.vshift;
    j["events"] = {{"numpulses", c.events.numpulses},     {"mincurr", c.events.mincurr},
                   {"maxcurr", c.events.maxcurr},         {"minpwd", c.events.minpwd},
                   {"maxpwd", c.events.maxpwd},           {"multilevel", to_string(c.events.mode)},
                   {"mixratio", c.events.mixratio},       {"sequence", c.events.sequence},
                   {"currents", c.events.currents},       {"pulsewidths", c.events.pulsewidths},
                   {"shuffle", c.events.shuffle},         {"max_levels", c.events.max_levels}};
    j["placement"] = {{"dist", to_string(c.placement.dist)},
                      {"event_density_factor", c.placement.event_density_factor}};
    j["noise"] = {{"nsigma", c.noise.nsigma},
                  {"strategy", to_string(c.noise.strategy)},
                  {"beta", c.noise.beta},
                  {"n_harmonics", c.noise.n_harmonics},
                  {"white", c.noise.white},
                  {"ac", c.noise.ac},
                  {"colored", c.noise.colored},
                  {"ac_base_amp", c.noise.ac_base_amp ? json(*c.noise.ac_base_amp) : json(nullptr)}};
    j["filters"] = {{"rc", c.filters.rc_enabled},
                    {"resistance", c.filters.resistance},
                    {"capacitance", c.filters.capacitance},
                    {"lpf", c.filters.lpf_enabled},
                    {"cutoff", c.filters.cutoff}};
    j["drift"] = {{"sinusoidal", c.drift.sinusoidal}, {"numconcs", c.drift.numconcs},
                  {"maxamp", c.drift.maxamp},         {"max_harmonic", c.drift.max_harmonic},
                  {"abrupt", c.drift.abrupt},         {"nstepwins", c.drift.nstepwins},
                  {"driftmaxmag", c.drift.driftmaxmag}, {"maxnsteps", c.drift.maxnsteps}};
    j["columns"] = {{"clean", c.columns.clean},
                    {"filtered", c.columns.filtered},
                    {"drift", c.columns.drift},
                    {"noise", c.columns.noise}};
    return j;
}

namespace {

using Setter = std::function<void(const json&)>;

template <typename T>
Setter bind_field(const std::string& key, T& target) {
    return [&target, key](const json& v) {
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError(key, "expected a number");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
            }
            target = v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(key, std::string("wrong type: ") + e.what());
        }
    };
}

void apply_section(const json& doc, const std::string& section, const std::map<std::string, Setter>& setters) {
    if (!doc.is_object()) throw ConfigError(section, "expected an object");
    for (const auto& [key, value] : doc.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
        it->second(value);
    }
}

}  // namespace

GenerationConfig config_from_json(const json& doc) { return config_from_json(doc, GenerationConfig{}); }

GenerationConfig config_from_json(const json& doc, GenerationConfig c) {
    std::string mode = to_string(c.events.mode);
    std::string dist = to_string(c.placement.dist);
    std::string strategy = to_string(c.noise.strategy);
    json ac_base = c.noise.ac_base_amp ? json(*c.noise.ac_base_amp) : json(nullptr);

    const std::map<std::string, Setter> events{
        {"numpulses", bind_field("numpulses", c.events.numpulses)},
        {"mincurr", bind_field("mincurr", c.events.mincurr)},
        {"maxcurr", bind_field("maxcurr", c.events.maxcurr)},
        {"minpwd", bind_field("minpwd", c.events.minpwd)},
        {"maxpwd", bind_field("maxpwd", c.events.maxpwd)},
        {"multilevel", bind_field("multilevel", mode)},
        {"mixratio", bind_field("mixratio", c.events.mixratio)},
        {"sequence", bind_field("sequence", c.events.sequence)},
        {"currents", bind_field("currents", c.events.currents)},
        {"pulsewidths", bind_field("pulsewidths", c.events.pulsewidths)},
        {"shuffle", bind_field("shuffle", c.events.shuffle)},
        {"max_levels", bind_field("max_levels", c.events.max_levels)}};
    const std::map<std::string, Setter> placement{
        {"dist", bind_field("dist", dist)},
        {"event_density_factor", bind_field("event_density_factor", c.placement.event_density_factor)}};
    const std::map<std::string, Setter> noise{{"nsigma", bind_field("nsigma", c.noise.nsigma)},
                                              {"strategy", bind_field("strategy", strategy)},
                                              {"beta", bind_field("beta", c.noise.beta)},
                                              {"n_harmonics", bind_field("n_harmonics", c.noise.n_harmonics)},
                                              {"white", bind_field("white", c.noise.white)},
                                              {"ac", bind_field("ac", c.noise.ac)},
                                              {"colored", bind_field("colored", c.noise.colored)},
                                              {"ac_base_amp", [&](const json& v) { ac_base = v; }}};
    const std::map<std::string, Setter> filters{{"rc", bind_field("rc", c.filters.rc_enabled)},
                                                {"resistance", bind_field("resistance", c.filters.resistance)},
                                                {"capacitance", bind_field("capacitance", c.filters.capacitance)},
                                                {"lpf", bind_field("lpf", c.filters.lpf_enabled)},
                                                {"cutoff", bind_field("cutoff", c.filters.cutoff)}};
    const std::map<std::string, Setter> drift{{"sinusoidal", bind_field("sinusoidal", c.drift.sinusoidal)},
                                              {"numconcs", bind_field("numconcs", c.drift.numconcs)},
                                              {"maxamp", bind_field("maxamp", c.drift.maxamp)},
                                              {"max_harmonic", bind_field("max_harmonic", c.drift.max_harmonic)},
                                              {"abrupt", bind_field("abrupt", c.drift.abrupt)},
                                              {"nstepwins", bind_field("nstepwins", c.drift.nstepwins)},
                                              {"driftmaxmag", bind_field("driftmaxmag", c.drift.driftmaxmag)},
                                              {"maxnsteps", bind_field("maxnsteps", c.drift.maxnsteps)}};
    const std::map<std::string, Setter> columns{{"clean", bind_field("clean", c.columns.clean)},
                                                {"filtered", bind_field("filtered", c.columns.filtered)},
                                                {"drift", bind_field("drift", c.columns.drift)},
                                                {"noise", bind_field("noise", c.columns.noise)}};
    const std::map<std::string, Setter> top{
        {"seed", bind_field("seed", c.seed)},
        {"name", bind_field("name", c.name)},
        {"sampfreq", bind_field("sampfreq", c.sampfreq)},
        {"vshift", bind_field("vshift", c.vshift)},
        {"events", [&](const json& v) { apply_section(v, "events", events); }},
        {"placement", [&](const json& v) { apply_section(v, "placement", placement); }},
        {"noise", [&](const json& v) { apply_section(v, "noise", noise); }},
        {"filters", [&](const json& v) { apply_section(v, "filters", filters); }},
        {"drift", [&](const json& v) { apply_section(v, "drift", drift); }},
        {"columns", [&](const json& v) { apply_section(v, "columns", columns); }}};
    apply_section(doc, "", top);

    c.events.mode = parse_event_mode(mode);
    c.placement.dist = parse_gap_distribution(dist);
    c.noise.strategy = parse_amplitude_strategy(strategy);
    if (ac_base.is_null()) {
        c.noise.ac_base_amp.reset();
    } else if (ac_base.is_number()) {
        c.noise.ac_base_amp = ac_base.get<double>();
    } else {
        throw ConfigError("ac_base_amp", "expected a number or null");
    }
    c.validate();
    return c;
}

std::vector<std::pair<std::string, std::string>> flatten_config(const GenerationConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    const json j = config_to_json(cfg);
    for (const auto& [key, value] : j.items()) {
        if (value.is_object()) {
            for (const auto& [sub, v] : value.items())
                out.emplace_back(key + "." + sub, v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            out.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return out;
}

}  // namespace nanosim
