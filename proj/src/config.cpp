#include "subq/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "../third_party/tomlplusplus/toml.hpp"

#include "subq/errors.hpp"

namespace subq {

using nlohmann::json;

namespace {

enum class ValueKind { real, integer, count, seed, boolean, text, real_list };

struct KeyDef {
    std::string_view name;  // "block.key"
    ValueKind kind;
    std::function<void(RunConfig&, const json&)> set;
    std::function<std::optional<json>(const RunConfig&)> get;
};

template <typename T>
std::optional<json> some(const T& v) {
    return json(v);
}

template <typename T>
std::optional<json> maybe(const std::optional<T>& v) {
    return v ? std::optional<json>(json(*v)) : std::nullopt;
}

double as_real(const json& v, std::string_view key) {
    if (!v.is_number()) throw ParseError(fmt::format("key '{}' expects a number", key));
    return v.get<double>();
}

std::int64_t as_integer(const json& v, std::string_view key) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9.0e15) return std::int64_t(d);
    }
    throw ParseError(fmt::format("key '{}' expects an integer", key));
}

std::size_t as_count(const json& v, std::string_view key) {
    const auto n = as_integer(v, key);
    if (n < 0) throw ParseError(fmt::format("key '{}' must be non-negative", key));
    return std::size_t(n);
}

std::uint64_t as_seed(const json& v, std::string_view key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return std::uint64_t(v.get<std::int64_t>());
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        std::uint64_t out{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec == std::errc() && ptr == s.data() + s.size()) return out;
    }
    throw ParseError(fmt::format("key '{}' expects an unsigned 64-bit integer", key));
}

bool as_bool(const json& v, std::string_view key) {
    if (!v.is_boolean()) throw ParseError(fmt::format("key '{}' expects true or false", key));
    return v.get<bool>();
}

std::string as_text(const json& v, std::string_view key) {
    if (!v.is_string()) throw ParseError(fmt::format("key '{}' expects a string", key));
    return v.get<std::string>();
}

std::vector<double> as_real_list(const json& v, std::string_view key) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ParseError(fmt::format("key '{}' expects a list of numbers", key));
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_real(e, key));
    return out;
}

const std::vector<KeyDef>& key_table() {
    using K = ValueKind;
    static const std::vector<KeyDef> table = {
        {"params.m", K::real,
         [](RunConfig& c, const json& v) { c.params.spec.m = as_real(v, "params.m"); },
         [](const RunConfig& c) { return some(c.params.spec.m); }},
        {"params.omega0", K::real,
         [](RunConfig& c, const json& v) { c.params.spec.omega0 = as_real(v, "params.omega0"); },
         [](const RunConfig& c) { return some(c.params.spec.omega0); }},
        {"params.gamma", K::real,
         [](RunConfig& c, const json& v) { c.params.spec.gamma = as_real(v, "params.gamma"); },
         [](const RunConfig& c) { return maybe(c.params.spec.gamma); }},
        {"params.zeta", K::real,
         [](RunConfig& c, const json& v) { c.params.spec.zeta = as_real(v, "params.zeta"); },
         [](const RunConfig& c) { return maybe(c.params.spec.zeta); }},
        {"params.F0", K::real,
         [](RunConfig& c, const json& v) { c.params.spec.drive_amplitude = as_real(v, "params.F0"); },
         [](const RunConfig& c) { return some(c.params.spec.drive_amplitude); }},
        {"params.n_dof", K::integer,
         [](RunConfig& c, const json& v) { c.params.spec.n_dof = int(as_integer(v, "params.n_dof")); },
         [](const RunConfig& c) { return some(c.params.spec.n_dof); }},
        {"params.canonical", K::boolean,
         [](RunConfig& c, const json& v) { c.params.spec.canonical = as_bool(v, "params.canonical"); },
         [](const RunConfig& c) { return some(c.params.spec.canonical); }},
        {"params.e_zp", K::real,
         [](RunConfig& c, const json& v) { c.params.spec.zp_energy = as_real(v, "params.e_zp"); },
         [](const RunConfig& c) { return some(c.params.spec.zp_energy); }},
        {"params.hbar_target", K::real,
         [](RunConfig& c, const json& v) { c.params.hbar_target = as_real(v, "params.hbar_target"); },
         [](const RunConfig& c) { return maybe(c.params.hbar_target); }},

        {"run.seed", K::seed,
         [](RunConfig& c, const json& v) { c.run.seed = as_seed(v, "run.seed"); },
         [](const RunConfig& c) { return some(c.run.seed); }},
        {"run.ensemble_size", K::count,
         [](RunConfig& c, const json& v) { c.run.ensemble_size = as_count(v, "run.ensemble_size"); },
         [](const RunConfig& c) { return some(c.run.ensemble_size); }},
        {"run.dt", K::real,
         [](RunConfig& c, const json& v) { c.run.dt = as_real(v, "run.dt"); },
         [](const RunConfig& c) { return maybe(c.run.dt); }},
        {"run.t_end", K::real,
         [](RunConfig& c, const json& v) { c.run.t_end = as_real(v, "run.t_end"); },
         [](const RunConfig& c) { return maybe(c.run.t_end); }},
        {"run.drive_omega", K::real,
         [](RunConfig& c, const json& v) { c.run.drive_omega = as_real(v, "run.drive_omega"); },
         [](const RunConfig& c) { return maybe(c.run.drive_omega); }},
        {"run.burn_in", K::real,
         [](RunConfig& c, const json& v) { c.run.burn_in = as_real(v, "run.burn_in"); },
         [](const RunConfig& c) { return some(c.run.burn_in); }},
        {"run.fit_lo", K::real,
         [](RunConfig& c, const json& v) { c.run.fit_lo = as_real(v, "run.fit_lo"); },
         [](const RunConfig& c) { return maybe(c.run.fit_lo); }},
        {"run.fit_hi", K::real,
         [](RunConfig& c, const json& v) { c.run.fit_hi = as_real(v, "run.fit_hi"); },
         [](const RunConfig& c) { return maybe(c.run.fit_hi); }},
        {"run.u_init", K::real,
         [](RunConfig& c, const json& v) { c.run.u_init = as_real(v, "run.u_init"); },
         [](const RunConfig& c) { return some(c.run.u_init); }},
        {"run.integrator", K::text,
         [](RunConfig& c, const json& v) {
             c.run.integrator = integrator_from_string(as_text(v, "run.integrator"));
         },
         [](const RunConfig& c) { return some(std::string(to_string(c.run.integrator))); }},
        {"run.work_periods", K::integer,
         [](RunConfig& c, const json& v) { c.run.work_periods = int(as_integer(v, "run.work_periods")); },
         [](const RunConfig& c) { return some(c.run.work_periods); }},

        {"ensemble.sigma0", K::real_list,
         [](RunConfig& c, const json& v) { c.ensemble.sigma0 = as_real_list(v, "ensemble.sigma0"); },
         [](const RunConfig& c) { return some(c.ensemble.sigma0); }},
        {"ensemble.x0", K::real,
         [](RunConfig& c, const json& v) { c.ensemble.x0 = as_real(v, "ensemble.x0"); },
         [](const RunConfig& c) { return some(c.ensemble.x0); }},
        {"ensemble.v_conv", K::real,
         [](RunConfig& c, const json& v) { c.ensemble.v_conv = as_real(v, "ensemble.v_conv"); },
         [](const RunConfig& c) { return some(c.ensemble.v_conv); }},
        {"ensemble.size", K::count,
         [](RunConfig& c, const json& v) { c.ensemble.size = as_count(v, "ensemble.size"); },
         [](const RunConfig& c) { return some(c.ensemble.size); }},
        {"ensemble.times", K::real_list,
         [](RunConfig& c, const json& v) { c.ensemble.times = as_real_list(v, "ensemble.times"); },
         [](const RunConfig& c) { return some(c.ensemble.times); }},

        {"output.directory", K::text,
         [](RunConfig& c, const json& v) { c.output.directory = as_text(v, "output.directory"); },
         [](const RunConfig& c) { return some(c.output.directory); }},
        {"output.precision", K::integer,
         [](RunConfig& c, const json& v) { c.output.precision = int(as_integer(v, "output.precision")); },
         [](const RunConfig& c) { return some(c.output.precision); }},
    };
    return table;
}

const KeyDef& find_key(std::string_view name) {
    for (const auto& def : key_table())
        if (def.name == name) return def;
    throw ParseError(fmt::format("unknown configuration key '{}'", name));
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& text, std::string_view key) {
    double out{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(fmt::format("key '{}': cannot parse '{}' as a number", key, text));
    return out;
}

json value_from_text(const KeyDef& def, const std::string& text) {
    switch (def.kind) {
        case ValueKind::real: return parse_real(text, def.name);
        case ValueKind::integer:
        case ValueKind::count: {
            std::int64_t out{};
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
            if (ec != std::errc() || ptr != text.data() + text.size())
                throw ParseError(fmt::format("key '{}': cannot parse '{}' as an integer", def.name, text));
            return out;
        }
        case ValueKind::seed: return text;
        case ValueKind::boolean:
            if (text == "true") return true;
            if (text == "false") return false;
            throw ParseError(fmt::format("key '{}' expects true or false", def.name));
        case ValueKind::text: {
            if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
                return text.substr(1, text.size() - 2);
            return text;
        }
        case ValueKind::real_list: {
            std::string body = text;
            if (!body.empty() && body.front() == '[') body.erase(0, 1);
            if (!body.empty() && body.back() == ']') body.pop_back();
            json list = json::array();
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (!item.empty()) list.push_back(parse_real(item, def.name));
            }
            return list;
        }
    }
    throw ParseError("unreachable");
}

json toml_to_json(const toml::node& node, std::string_view key) {
    if (auto v = node.as_integer()) return v->get();
    if (auto v = node.as_floating_point()) return v->get();
    if (auto v = node.as_boolean()) return v->get();
    if (auto v = node.as_string()) return v->get();
    if (auto arr = node.as_array()) {
        json out = json::array();
        for (const auto& e : *arr) out.push_back(toml_to_json(e, key));
        return out;
    }
    throw ParseError(fmt::format("key '{}' has an unsupported value type (line {})", key,
                                 node.source().begin.line));
}

std::string toml_real(double v) {
    auto s = fmt::format("{:.17g}", v);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";  // keep it a TOML float
    return s;
}

std::string toml_value(const KeyDef& def, const json& v) {
    switch (def.kind) {
        case ValueKind::real: return toml_real(v.get<double>());
        case ValueKind::integer:
        case ValueKind::count: return v.dump();
        case ValueKind::seed: {
            const auto seed = v.get<std::uint64_t>();
            if (seed <= std::uint64_t(std::numeric_limits<std::int64_t>::max()))
                return std::to_string(seed);
            return "\"" + std::to_string(seed) + "\"";
        }
        case ValueKind::boolean: return v.get<bool>() ? "true" : "false";
        case ValueKind::text: return v.dump();
        case ValueKind::real_list: {
            std::string out = "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ", ";
                out += toml_real(v[i].get<double>());
            }
            return out + "]";
        }
    }
    return {};
}

}  // namespace

Params resolve_params(const RunConfig& cfg) {
    ParamSpec<double> spec = cfg.params.spec;
    if (cfg.params.hbar_target) {
        detail::require_positive(*cfg.params.hbar_target, "hbar_target");
        detail::require_positive(spec.m, "m");
        detail::require_positive(spec.omega0, "omega0");
        const double gamma = spec.canonical ? 2.0 * spec.omega0 : spec.gamma.value_or(0.0);
        detail::require_positive(gamma, "gamma");
        spec.drive_amplitude = drive_for_action(spec.m, spec.omega0, gamma, *cfg.params.hbar_target);
    }
    return validate_params(spec);
}

double effective_dt(const RunConfig& cfg, const Params& p) {
    return cfg.run.dt.value_or(derive_constants(p).tau / 1000.0);
}

void validate_config(const RunConfig& cfg) {
    const Params p = resolve_params(cfg);
    auto fail = [](const std::string& msg) { throw ParseError(msg); };
    if (cfg.run.ensemble_size < 2) fail("run.ensemble_size must be >= 2");
    if (cfg.run.dt && !(*cfg.run.dt > 0.0)) fail("run.dt must be positive");
    if (cfg.run.t_end && !(*cfg.run.t_end > 0.0)) fail("run.t_end must be positive");
    if (cfg.run.drive_omega && !(*cfg.run.drive_omega >= 0.0)) fail("run.drive_omega must be >= 0");
    if (!(cfg.run.burn_in >= 0.0)) fail("run.burn_in must be >= 0");
    const double lo = cfg.run.fit_lo.value_or(5.0 / p.zeta);
    const double hi = cfg.run.fit_hi.value_or(20.0 / p.zeta);
    if (!(lo < hi)) fail("run.fit_lo must be below run.fit_hi");
    if (cfg.run.work_periods < 1) fail("run.work_periods must be >= 1");
    if (cfg.ensemble.sigma0.empty()) fail("ensemble.sigma0 must list at least one width");
    for (double s : cfg.ensemble.sigma0)
        if (!(s > 0.0)) throw NonPositiveParameter("sigma0");
    if (cfg.ensemble.size < 2) fail("ensemble.size must be >= 2");
    for (std::size_t k = 0; k < cfg.ensemble.times.size(); ++k)
        if (!(cfg.ensemble.times[k] >= 0.0) ||
            (k > 0 && cfg.ensemble.times[k] < cfg.ensemble.times[k - 1]))
            fail("ensemble.times must be non-decreasing from 0");
    if (cfg.output.precision < 1 || cfg.output.precision > 17)
        fail("output.precision must lie in [1, 17]");
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ParseError(fmt::format("override '{}' is not of the form key=value", assignment));
    const std::string key = trim(assignment.substr(0, eq));
    const std::string text = trim(assignment.substr(eq + 1));
    const KeyDef& def = find_key(key);
    def.set(cfg, value_from_text(def, text));
}

RunConfig parse_config_string(std::string_view toml_text,
                              const std::vector<std::string>& overrides, const RunConfig& base) {
    RunConfig cfg = base;
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& err) {
        throw ParseError(fmt::format("TOML error at line {}: {}", err.source().begin.line,
                                     err.description()));
    }
    for (const auto& [block, node] : root) {
        const auto* table = node.as_table();
        if (!table)
            throw ParseError(fmt::format("top-level key '{}' must be a table (line {})",
                                         block.str(), node.source().begin.line));
        for (const auto& [key, value] : *table) {
            const std::string full = std::string(block.str()) + "." + std::string(key.str());
            const KeyDef* def = nullptr;
            try {
                def = &find_key(full);
            } catch (const ParseError&) {
                throw ParseError(fmt::format("unknown configuration key '{}' (line {})", full,
                                             value.source().begin.line));
            }
            def->set(cfg, toml_to_json(value, full));
        }
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides, const RunConfig& base) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_config_string(text, overrides, base);
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& def : key_table()) {
        const auto value = def.get(cfg);
        if (!value) continue;
        const auto dot = def.name.find('.');
        const std::string block(def.name.substr(0, dot));
        const std::string key(def.name.substr(dot + 1));
        out[block][key] = *value;
    }
    return out;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (!j.is_object()) throw ParseError("config JSON must be an object");
    for (const auto& [block, body] : j.items()) {
        if (!body.is_object()) throw ParseError("config block '" + block + "' must be an object");
        for (const auto& [key, value] : body.items()) find_key(block + "." + key).set(cfg, value);
    }
    validate_config(cfg);
    return cfg;
}

std::string config_to_toml(const RunConfig& cfg) {
    std::string out;
    std::string current;
    for (const auto& def : key_table()) {
        const auto value = def.get(cfg);
        if (!value) continue;
        const auto dot = def.name.find('.');
        const std::string block(def.name.substr(0, dot));
        if (block != current) {
            if (!current.empty()) out += "\n";
            out += "[" + block + "]\n";
            current = block;
        }
        out += fmt::format("{} = {}\n", def.name.substr(dot + 1), toml_value(def, *value));
    }
    return out;
}

}  // namespace subq
