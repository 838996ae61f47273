#include "rice/rollout_io.h"

#include <sstream>

#include "json.hpp"
#include "rice/config_io.h"
#include "rice/region_table.h"

namespace rice {

namespace {

using nlohmann::json;

constexpr const char* kColumns[] = {
    "step",         "region",        "savings",          "mitigation",         "export_limit",
    "tariffs",      "import_bids",   "agreed_min_level", "compliant",          "capital",
    "labor",        "tfp",           "sigma",            "theta1",             "production",
    "damage_fraction", "abatement_fraction", "gross_output", "investment",     "emissions",
    "imports",      "exports",       "domestic_consumption", "foreign_consumption", "aggregate_consumption",
    "utility",      "balance",       "reserve_fund",     "forcing",            "land_emissions",
    "total_emissions", "t_at",       "t_lo",             "m_at",               "m_up",
    "m_lo"};
constexpr std::size_t kNumColumns = sizeof(kColumns) / sizeof(kColumns[0]);

std::string join_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        out += format_double17(values[i]);
    }
    return out;
}

std::vector<double> split_list(std::string_view cell, const std::string& context) {
    std::vector<double> out;
    if (cell.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto semi = cell.find(';', start);
        out.push_back(parse_double(cell.substr(start, semi - start), context));
        if (semi == std::string_view::npos) break;
        start = semi + 1;
    }
    return out;
}

long parse_int(std::string_view cell, const std::string& context) {
    const double v = parse_double(cell, context);
    if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError(context + ": expected an integer");
    return static_cast<long>(v);
}

}  // namespace

std::string rollout_csv_header() {
    std::string out;
    for (std::size_t c = 0; c < kNumColumns; ++c) {
        if (c) out += ',';
        out += kColumns[c];
    }
    return out;
}

std::string format_rollout_csv(const RolloutRecord& record) {
    std::string out = rollout_csv_header();
    out += '\n';
    const auto num = [&](double v) {
        out += ',';
        out += format_double17(v);
    };
    for (const auto& r : record.rows) {
        const auto& gs = record.globals.at(static_cast<std::size_t>(r.step));
        out += std::to_string(r.step);
        out += ',';
        out += std::to_string(r.region);
        num(r.actions.savings);
        num(r.actions.mitigation);
        num(r.actions.export_limit);
        out += ',' + join_list(r.actions.tariffs);
        out += ',' + join_list(r.actions.import_bids);
        out += ',' + std::to_string(r.agreed_min_level);
        out += r.compliant ? ",1" : ",0";
        for (double v : {r.capital, r.labor, r.tfp, r.sigma, r.theta1, r.production, r.damage_fraction,
                         r.abatement_fraction, r.gross_output, r.investment, r.emissions})
            num(v);
        out += ',' + join_list(r.imports);
        out += ',' + join_list(r.exports);
        num(r.domestic_consumption);
        out += ',' + join_list(r.foreign_consumption);
        for (double v : {r.aggregate_consumption, r.utility, r.balance, r.reserve_fund, gs.forcing,
                         gs.land_emissions, gs.total_emissions, gs.climate.t_at, gs.climate.t_lo,
                         gs.climate.m_at, gs.climate.m_up, gs.climate.m_lo})
            num(v);
        out += '\n';
    }
    return out;
}

std::string format_rollout_sidecar(const RolloutRecord& record) {
    json doc;
    doc["schema_version"] = kRolloutSchemaVersion;
    doc["seed"] = record.seed;
    doc["config_hash"] = record.config_hash;
    doc["protocol"] = record.protocol;
    doc["num_regions"] = record.num_regions;
    doc["horizon"] = record.horizon;
    doc["delta_years"] = record.delta_years;
    doc["start_year"] = record.start_year;
    doc["discount"] = record.discount;
    doc["diagnostics"] = {{"damage_clamps", record.diagnostics.damage_clamps},
                          {"abatement_clamps", record.diagnostics.abatement_clamps},
                          {"consumption_clamps", record.diagnostics.consumption_clamps},
                          {"mask_substitutions", record.diagnostics.mask_substitutions}};
    json log = json::array();
    for (const auto& e : record.negotiation)
        log.push_back({{"step", e.step}, {"stage", e.stage}, {"region", e.region}, {"choices", e.choices}});
    doc["negotiation"] = std::move(log);
    return doc.dump(2) + "\n";
}

RolloutRecord parse_rollout(std::string_view csv, std::string_view sidecar_json) {
    RolloutRecord rec;
    json doc;
    try {
        doc = json::parse(sidecar_json);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("rollout sidecar: ") + e.what());
    }
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version != kRolloutSchemaVersion) {
            throw ConfigError("rollout schema_version " + std::to_string(version) + " does not match " +
                              std::to_string(kRolloutSchemaVersion));
        }
        rec.seed = doc.at("seed").get<std::uint64_t>();
        rec.config_hash = doc.at("config_hash").get<std::string>();
        rec.protocol = doc.at("protocol").get<std::string>();
        rec.num_regions = doc.at("num_regions").get<int>();
        rec.horizon = doc.at("horizon").get<int>();
        rec.delta_years = doc.at("delta_years").get<int>();
        rec.start_year = doc.at("start_year").get<int>();
        rec.discount = doc.at("discount").get<double>();
        const auto& d = doc.at("diagnostics");
        rec.diagnostics = {d.at("damage_clamps").get<long>(), d.at("abatement_clamps").get<long>(),
                           d.at("consumption_clamps").get<long>(), d.at("mask_substitutions").get<long>()};
        for (const auto& e : doc.at("negotiation"))
            rec.negotiation.push_back({e.at("step").get<int>(), e.at("stage").get<int>(), e.at("region").get<int>(),
                                       e.at("choices").get<std::vector<int>>()});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("rollout sidecar: ") + e.what());
    }

    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line) || line != rollout_csv_header())
        throw ConfigError("rollout csv: header does not match the expected schema");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "rollout csv line " + std::to_string(line_no);
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != kNumColumns) throw ConfigError(where + ": wrong number of cells");
        std::size_t c = 0;
        const auto num = [&] { return parse_double(cells[c++], where); };
        const auto vec = [&] { return split_list(cells[c++], where); };
        RegionStepRecord r;
        r.step = static_cast<int>(parse_int(cells[c++], where));
        r.region = static_cast<int>(parse_int(cells[c++], where));
        r.actions.savings = num();
        r.actions.mitigation = num();
        r.actions.export_limit = num();
        r.actions.tariffs = vec();
        r.actions.import_bids = vec();
        r.agreed_min_level = static_cast<int>(parse_int(cells[c++], where));
        r.compliant = parse_int(cells[c++], where) != 0;
        for (double* f : {&r.capital, &r.labor, &r.tfp, &r.sigma, &r.theta1, &r.production, &r.damage_fraction,
                          &r.abatement_fraction, &r.gross_output, &r.investment, &r.emissions})
            *f = num();
        r.imports = vec();
        r.exports = vec();
        r.domestic_consumption = num();
        r.foreign_consumption = vec();
        for (double* f : {&r.aggregate_consumption, &r.utility, &r.balance, &r.reserve_fund}) *f = num();
        GlobalStepRecord gs;
        gs.step = r.step;
        for (double* f : {&gs.forcing, &gs.land_emissions, &gs.total_emissions, &gs.climate.t_at, &gs.climate.t_lo,
                          &gs.climate.m_at, &gs.climate.m_up, &gs.climate.m_lo})
            *f = num();
        const auto expected_step = rec.rows.size() / static_cast<std::size_t>(std::max(rec.num_regions, 1));
        if (static_cast<std::size_t>(r.step) != expected_step ||
            r.region != static_cast<int>(rec.rows.size() % static_cast<std::size_t>(std::max(rec.num_regions, 1))))
            throw ConfigError(where + ": rows are not in step-major, region-minor order");
        if (r.region == 0) rec.globals.push_back(gs);
        rec.rows.push_back(std::move(r));
    }
    if (rec.rows.size() != static_cast<std::size_t>(rec.num_regions) * static_cast<std::size_t>(rec.horizon))
        throw ConfigError("rollout csv: row count does not equal horizon x regions");
    return rec;
}

void write_rollout(const RolloutRecord& record, const std::filesystem::path& stem) {
    auto csv = stem;
    auto side = stem;
    csv += ".csv";
    side += ".json";
    write_text_file(csv, format_rollout_csv(record));
    write_text_file(side, format_rollout_sidecar(record));
}

RolloutRecord read_rollout(const std::filesystem::path& stem) {
    auto csv = stem;
    auto side = stem;
    csv += ".csv";
    side += ".json";
    return parse_rollout(read_text_file(csv), read_text_file(side));
}

}  // namespace rice
