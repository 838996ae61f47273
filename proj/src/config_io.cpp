#include "rice/config_io.h"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "rice/region_table.h"

namespace rice {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string format_double17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view context) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (text.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw ConfigError(std::string(context) + ": '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

EconIndex parse_econ_index(const std::string& name) {
    if (name == "cumulative") return EconIndex::Cumulative;
    if (name == "terminal") return EconIndex::Terminal;
    throw ConfigError("unknown econ_index '" + name + "' (expected cumulative | terminal)");
}

std::string to_string(EconIndex kind) { return kind == EconIndex::Cumulative ? "cumulative" : "terminal"; }

EmissionsForm parse_emissions_form(const std::string& name) {
    if (name == "carbon_eq") return EmissionsForm::CarbonEq;
    if (name == "sigma_t_eq") return EmissionsForm::SigmaTEq;
    throw ConfigError("unknown emissions_form '" + name + "' (expected carbon_eq | sigma_t_eq)");
}

std::string to_string(EmissionsForm form) { return form == EmissionsForm::CarbonEq ? "carbon_eq" : "sigma_t_eq"; }

namespace {

/// Typed access to one TOML table that remembers which keys were read.
class Section {
  public:
    Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

    bool present() const { return table_ != nullptr; }
    bool has(const char* key) const { return table_ && table_->contains(key); }

    double number(const char* key, std::optional<double> fallback = std::nullopt) {
        const toml::node* n = get(key);
        if (!n) return required(key, fallback);
        if (n->is_integer()) return static_cast<double>(*n->value<std::int64_t>());
        if (!n->is_floating_point()) type_error(key, "a number");
        const double v = *n->value<double>();
        if (!std::isfinite(v)) throw ConfigError(where(key) + " must be finite");
        return v;
    }

    std::int64_t integer(const char* key, std::optional<std::int64_t> fallback = std::nullopt) {
        const toml::node* n = get(key);
        if (!n) return required(key, fallback);
        if (!n->is_integer()) type_error(key, "an integer");
        return *n->value<std::int64_t>();
    }

    bool boolean(const char* key, std::optional<bool> fallback = std::nullopt) {
        const toml::node* n = get(key);
        if (!n) return required(key, fallback);
        if (!n->is_boolean()) type_error(key, "a boolean");
        return *n->value<bool>();
    }

    std::string string(const char* key, std::optional<std::string> fallback = std::nullopt) {
        const toml::node* n = get(key);
        if (!n) return required(key, std::move(fallback));
        if (!n->is_string()) type_error(key, "a string");
        return *n->value<std::string>();
    }

    std::optional<double> optional_number(const char* key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    std::vector<double> numbers(const char* key, std::optional<std::size_t> size = std::nullopt) {
        const toml::node* n = get(key);
        if (!n) required<int>(key, std::nullopt);
        const toml::array* arr = n->as_array();
        if (!arr) type_error(key, "an array of numbers");
        std::vector<double> out;
        for (const auto& e : *arr) {
            if (e.is_integer()) {
                out.push_back(static_cast<double>(*e.value<std::int64_t>()));
            } else if (e.is_floating_point() && std::isfinite(*e.value<double>())) {
                out.push_back(*e.value<double>());
            } else {
                type_error(key, "an array of finite numbers");
            }
        }
        if (size && out.size() != *size)
            throw ConfigError(where(key) + " must have " + std::to_string(*size) + " entries");
        return out;
    }

    std::vector<std::vector<double>> matrix(const char* key, std::size_t rows, std::size_t cols) {
        const toml::node* n = get(key);
        if (!n) required<int>(key, std::nullopt);
        const toml::array* arr = n->as_array();
        if (!arr || arr->size() != rows) type_error(key, "a " + std::to_string(rows) + "-row matrix");
        std::vector<std::vector<double>> out;
        for (std::size_t r = 0; r < rows; ++r) {
            const toml::array* row = (*arr)[r].as_array();
            if (!row || row->size() != cols) type_error(key, "rows of " + std::to_string(cols) + " numbers");
            std::vector<double> vals;
            for (const auto& e : *row) {
                if (e.is_integer()) {
                    vals.push_back(static_cast<double>(*e.value<std::int64_t>()));
                } else if (e.is_floating_point() && std::isfinite(*e.value<double>())) {
                    vals.push_back(*e.value<double>());
                } else {
                    type_error(key, "a matrix of finite numbers");
                }
            }
            out.push_back(std::move(vals));
        }
        return out;
    }

    std::vector<std::string> strings(const char* key) {
        const toml::node* n = get(key);
        if (!n) required<int>(key, std::nullopt);
        std::vector<std::string> out;
        if (n->is_string()) return {*n->value<std::string>()};
        const toml::array* arr = n->as_array();
        if (!arr) type_error(key, "a string or an array of strings");
        for (const auto& e : *arr) {
            if (!e.is_string()) type_error(key, "an array of strings");
            out.push_back(*e.value<std::string>());
        }
        return out;
    }

    std::vector<std::int64_t> integers(const char* key) {
        const toml::node* n = get(key);
        if (!n) required<int>(key, std::nullopt);
        const toml::array* arr = n->as_array();
        if (!arr) type_error(key, "an array of integers");
        std::vector<std::int64_t> out;
        for (const auto& e : *arr) {
            if (!e.is_integer()) type_error(key, "an array of integers");
            out.push_back(*e.value<std::int64_t>());
        }
        return out;
    }

    Section child(const char* key) {
        const toml::node* n = get(key);
        if (!n) return {nullptr, join(key)};
        if (!n->is_table()) type_error(key, "a table");
        return {n->as_table(), join(key)};
    }

    /// Rejects keys that were never read.
    void finish() const {
        if (!table_) return;
        for (const auto& [k, v] : *table_) {
            if (!seen_.count(std::string(k.str())))
                throw ConfigError("unknown key '" + join(std::string(k.str()).c_str()) + "'");
        }
    }

    void mark(const char* key) { seen_.insert(key); }

  private:
    const toml::node* get(const char* key) {
        seen_.insert(key);
        return table_ ? table_->get(key) : nullptr;
    }
    std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where(const char* key) const { return "'" + join(key) + "'"; }

    template <class T>
    T required(const char* key, std::optional<T> fallback) const {
        if (!fallback) throw ConfigError("missing required key '" + join(key) + "'");
        return *fallback;
    }
    [[noreturn]] void type_error(const char* key, const std::string& expected) const {
        throw ConfigError(where(key) + " must be " + expected);
    }

    const toml::table* table_;
    std::string path_;
    std::set<std::string> seen_;
};

Mat2 to_mat2(const std::vector<std::vector<double>>& m) { return {{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}}; }
Mat3 to_mat3(const std::vector<std::vector<double>>& m) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = m[i][j];
    return out;
}

std::vector<double> ramp_series(Section ramp, int horizon) {
    const double start = ramp.number("start");
    const double end = ramp.number("end");
    const auto steps = ramp.integer("ramp_steps");
    const auto length = ramp.integer("length", horizon);
    ramp.finish();
    if (steps < 1) throw ConfigError("'climate.f_ex_ramp.ramp_steps' must be >= 1");
    if (length < 0) throw ConfigError("'climate.f_ex_ramp.length' must be >= 0");
    std::vector<double> out;
    for (std::int64_t k = 0; k < length; ++k) {
        const double frac = std::min(static_cast<double>(k) / static_cast<double>(steps), 1.0);
        out.push_back(start + (end - start) * frac);
    }
    return out;
}

RegionParams parse_inline_region(Section s, const RegionDefaults& d) {
    RegionParams r;
    r.id = s.string("id");
    r.a0 = s.number("a0");
    r.k0 = s.number("k0");
    r.l0 = s.number("l0");
    r.l_a = s.number("l_a");
    r.delta_a = s.number("delta_a");
    r.g_a = s.number("g_a");
    r.l_g = s.number("l_g");
    r.sigma0 = s.number("sigma0");
    const auto g_sigma = s.has("g_sigma") ? std::optional(s.number("g_sigma")) : d.g_sigma;
    const auto delta_sigma = s.has("delta_sigma") ? std::optional(s.number("delta_sigma")) : d.delta_sigma;
    s.mark("g_sigma");
    s.mark("delta_sigma");
    if (!g_sigma || !delta_sigma) throw ConfigError("region '" + r.id + "': g_sigma/delta_sigma missing and no default");
    r.g_sigma = *g_sigma;
    r.delta_sigma = *delta_sigma;
    r.delta_k = s.has("delta_k") ? std::optional(s.number("delta_k")) : d.delta_k;
    s.mark("delta_k");
    s.finish();
    return r;
}

std::uint64_t to_seed(std::int64_t v) {
    if (v < 0) throw ConfigError("'run.seeds' entries must be >= 0");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    toml::table doc;
    try {
        doc = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "scenario syntax error at line " << e.source().begin.line << ", column " << e.source().begin.column
            << ": " << e.description();
        throw ConfigError(msg.str());
    }

    ScenarioFile file;
    Scenario& sc = file.scenario;
    GlobalParams& g = sc.global;
    Section root(&doc, "");

    const auto version = root.integer("schema_version");
    if (version != kScenarioSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                          std::to_string(kScenarioSchemaVersion) + ")");
    }
    sc.start_year = static_cast<int>(root.integer("start_year", 2015));

    Section sim = root.child("simulation");
    g.delta_years = static_cast<int>(sim.integer("delta_years", 5));
    g.horizon = static_cast<int>(sim.integer("horizon", 20));
    g.num_action_levels = static_cast<int>(sim.integer("num_action_levels", 10));
    sim.finish();

    Section cl = root.child("climate");
    if (!cl.present()) throw ConfigError("missing required table 'climate'");
    g.phi_t = to_mat2(cl.matrix("phi_t", 2, 2));
    const auto bt = cl.numbers("b_t", 2);
    g.b_t = {bt[0], bt[1]};
    g.phi_m = to_mat3(cl.matrix("phi_m", 3, 3));
    const auto bm = cl.numbers("b_m", 3);
    g.b_m = {bm[0], bm[1], bm[2]};
    g.f_2x = cl.number("f_2x");
    g.m_at_1750 = cl.number("m_at_1750");
    if (cl.has("f_ex_series") && cl.has("f_ex_ramp"))
        throw ConfigError("'climate.f_ex_series' and 'climate.f_ex_ramp' are mutually exclusive");
    if (cl.has("f_ex_series")) {
        g.f_ex_series = cl.numbers("f_ex_series");
    } else if (cl.has("f_ex_ramp")) {
        g.f_ex_series = ramp_series(cl.child("f_ex_ramp"), g.horizon);
    } else {
        cl.mark("f_ex_series");
        cl.mark("f_ex_ramp");
        g.f_ex_series.assign(static_cast<std::size_t>(std::max(g.horizon, 0)), 0.0);
    }
    Section init = cl.child("initial");
    if (!init.present()) throw ConfigError("missing required table 'climate.initial'");
    sc.initial_climate = {init.number("t_at"), init.number("t_lo"), init.number("m_at"), init.number("m_up"),
                          init.number("m_lo")};
    init.finish();
    cl.finish();

    Section econ = root.child("economy");
    g.gamma = econ.number("gamma", 0.3);
    g.eta = econ.number("eta", 0.0033);
    g.delta_k = econ.number("delta_k", 0.1);
    g.a1 = econ.number("a1", 0.0);
    g.a2 = econ.number("a2", 0.0);
    g.theta2 = econ.number("theta2", 2.6);
    g.p_b = econ.number("p_b", 550.0);
    g.delta_pb = econ.number("delta_pb", 0.025);
    g.e_l0 = econ.number("e_l0", 0.0);
    g.delta_el = econ.number("delta_el", 0.0);
    g.labor_unit = econ.number("labor_unit", 1.0);
    g.emissions_form = parse_emissions_form(econ.string("emissions_form", std::string("carbon_eq")));
    econ.finish();

    Section wel = root.child("welfare");
    g.alpha_util = wel.number("alpha_util", 1.45);
    g.lambda_arm = wel.number("lambda_arm", 0.5);
    g.psi_dom = wel.number("psi_dom", 1.0);
    g.psi_for = wel.number("psi_for", 1.0);
    g.discount = wel.number("discount", 1.0);
    g.consumption_floor = wel.number("consumption_floor", 0.0);
    wel.finish();

    Section tr = root.child("trade");
    g.interest_rate = tr.number("interest_rate", 0.10);
    g.debt_scale = tr.number("debt_scale", 10.0);
    tr.finish();

    Section defs = root.child("region_defaults");
    RegionDefaults defaults{defs.optional_number("g_sigma"), defs.optional_number("delta_sigma"),
                            defs.optional_number("delta_k")};
    defs.finish();

    const bool has_file = root.has("regions_file");
    const bool has_inline = root.has("regions");
    if (has_file == has_inline) throw ConfigError("exactly one of 'regions_file' or [[regions]] must be given");
    if (has_file) {
        std::filesystem::path p = root.string("regions_file");
        if (p.is_relative()) p = base_dir / p;
        sc.regions = read_region_table(p, defaults);
    } else {
        root.mark("regions");
        const toml::array* arr = doc.get("regions")->as_array();
        if (!arr || !arr->is_array_of_tables()) throw ConfigError("'regions' must be an array of tables");
        for (std::size_t i = 0; i < arr->size(); ++i)
            sc.regions.push_back(
                parse_inline_region(Section((*arr)[i].as_table(), "regions[" + std::to_string(i) + "]"), defaults));
    }

    Section run = root.child("run");
    RunConfig& rc = file.run;
    rc.protocol.kind = parse_protocol_kind(run.string("protocol", std::string("none")));
    rc.protocol.alpha_coef = run.number("alpha_coef", 1.0);
    rc.protocol.binding = run.boolean("binding", true);
    if (run.has("policies")) {
        rc.policies.clear();
        for (const auto& s : run.strings("policies")) rc.policies.push_back(parse_policy_spec(s));
    } else {
        run.mark("policies");
    }
    if (run.has("seeds")) {
        rc.seeds.clear();
        for (auto v : run.integers("seeds")) rc.seeds.push_back(to_seed(v));
    } else {
        run.mark("seeds");
    }
    rc.econ_index = parse_econ_index(run.string("econ_index", std::string("cumulative")));
    run.finish();

    root.finish();
    return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    try {
        return parse_scenario(read_text_file(path), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {

std::string list(std::initializer_list<double> values) {
    std::string out = "[";
    bool first = true;
    for (double v : values) {
        if (!first) out += ", ";
        out += format_double(v);
        first = false;
    }
    return out + "]";
}

std::string list(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out + "]";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

void write_scenario_body(std::ostringstream& out, const Scenario& sc) {
    const auto& g = sc.global;
    out << "schema_version = " << kScenarioSchemaVersion << "\n";
    out << "start_year = " << sc.start_year << "\n\n";
    out << "[simulation]\n";
    out << "delta_years = " << g.delta_years << "\n";
    out << "horizon = " << g.horizon << "\n";
    out << "num_action_levels = " << g.num_action_levels << "\n\n";
    out << "[climate]\n";
    out << "phi_t = [" << list({g.phi_t[0][0], g.phi_t[0][1]}) << ", " << list({g.phi_t[1][0], g.phi_t[1][1]})
        << "]\n";
    out << "b_t = " << list({g.b_t[0], g.b_t[1]}) << "\n";
    out << "phi_m = [";
    for (int i = 0; i < 3; ++i) out << (i ? ", " : "") << list({g.phi_m[i][0], g.phi_m[i][1], g.phi_m[i][2]});
    out << "]\n";
    out << "b_m = " << list({g.b_m[0], g.b_m[1], g.b_m[2]}) << "\n";
    out << "f_2x = " << format_double(g.f_2x) << "\n";
    out << "m_at_1750 = " << format_double(g.m_at_1750) << "\n";
    out << "f_ex_series = " << list(g.f_ex_series) << "\n\n";
    const auto& c = sc.initial_climate;
    out << "[climate.initial]\n";
    out << "t_at = " << format_double(c.t_at) << "\n";
    out << "t_lo = " << format_double(c.t_lo) << "\n";
    out << "m_at = " << format_double(c.m_at) << "\n";
    out << "m_up = " << format_double(c.m_up) << "\n";
    out << "m_lo = " << format_double(c.m_lo) << "\n\n";
    out << "[economy]\n";
    const std::pair<const char*, double> econ[] = {
        {"gamma", g.gamma}, {"eta", g.eta},   {"delta_k", g.delta_k},   {"a1", g.a1},
        {"a2", g.a2},       {"theta2", g.theta2}, {"p_b", g.p_b},       {"delta_pb", g.delta_pb},
        {"e_l0", g.e_l0},   {"delta_el", g.delta_el}, {"labor_unit", g.labor_unit}};
    for (const auto& [k, v] : econ) out << k << " = " << format_double(v) << "\n";
    out << "emissions_form = " << quoted(to_string(g.emissions_form)) << "\n\n";
    out << "[welfare]\n";
    const std::pair<const char*, double> wel[] = {
        {"alpha_util", g.alpha_util}, {"lambda_arm", g.lambda_arm}, {"psi_dom", g.psi_dom},
        {"psi_for", g.psi_for},       {"discount", g.discount},     {"consumption_floor", g.consumption_floor}};
    for (const auto& [k, v] : wel) out << k << " = " << format_double(v) << "\n";
    out << "\n[trade]\n";
    out << "interest_rate = " << format_double(g.interest_rate) << "\n";
    out << "debt_scale = " << format_double(g.debt_scale) << "\n";
}

void write_regions(std::ostringstream& out, const std::vector<RegionParams>& regions) {
    for (const auto& r : regions) {
        out << "\n[[regions]]\n";
        out << "id = " << quoted(r.id) << "\n";
        const std::pair<const char*, double> fields[] = {
            {"a0", r.a0},           {"k0", r.k0},        {"l0", r.l0},         {"l_a", r.l_a},
            {"delta_a", r.delta_a}, {"g_a", r.g_a},      {"l_g", r.l_g},       {"sigma0", r.sigma0},
            {"g_sigma", r.g_sigma}, {"delta_sigma", r.delta_sigma}};
        for (const auto& [k, v] : fields) out << k << " = " << format_double(v) << "\n";
        if (r.delta_k) out << "delta_k = " << format_double(*r.delta_k) << "\n";
    }
}

}  // namespace

std::string serialize_scenario(const Scenario& scenario) {
    std::ostringstream out;
    write_scenario_body(out, scenario);
    write_regions(out, scenario.regions);
    return out.str();
}

std::string serialize_scenario(const ScenarioFile& file) {
    std::ostringstream out;
    write_scenario_body(out, file.scenario);
    const auto& rc = file.run;
    out << "\n[run]\n";
    out << "protocol = " << quoted(to_string(rc.protocol.kind)) << "\n";
    out << "alpha_coef = " << format_double(rc.protocol.alpha_coef) << "\n";
    out << "binding = " << (rc.protocol.binding ? "true" : "false") << "\n";
    out << "policies = [";
    for (std::size_t i = 0; i < rc.policies.size(); ++i) out << (i ? ", " : "") << quoted(to_string(rc.policies[i]));
    out << "]\nseeds = [";
    for (std::size_t i = 0; i < rc.seeds.size(); ++i) out << (i ? ", " : "") << rc.seeds[i];
    out << "]\n";
    out << "econ_index = " << quoted(to_string(rc.econ_index)) << "\n";
    write_regions(out, file.scenario.regions);
    return out.str();
}

std::string config_hash(const Scenario& scenario) {
    char buf[17];
    const std::uint64_t h = fnv1a64(serialize_scenario(scenario));
    static const char* hex = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xF];
    buf[16] = '\0';
    return buf;
}

}  // namespace rice
