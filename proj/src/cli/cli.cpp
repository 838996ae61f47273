#include "rice/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rice/calibration.h"
#include "rice/config_io.h"
#include "rice/engine.h"
#include "rice/evaluation.h"
#include "rice/region_table.h"
#include "rice/rollout_io.h"
#include "rice/scenario.h"

namespace rice::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kSummarySchemaVersion = 1;

std::string rollout_stem(std::uint64_t seed) { return "rollout_seed" + std::to_string(seed); }

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::string protocol;
    std::vector<std::string> policies;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    int threads = 0;
    std::optional<double> alpha_coef;
    bool non_binding = false;
};

ordered_json summary_json(const ScenarioFile& file, const MonteCarloResult& mc) {
    ordered_json doc;
    doc["schema_version"] = kSummarySchemaVersion;
    doc["config_hash"] = config_hash(file.scenario);
    doc["protocol"] = to_string(file.run.protocol.kind);
    doc["binding"] = file.run.protocol.binding;
    doc["econ_index"] = to_string(file.run.econ_index);
    doc["start_year"] = file.scenario.start_year;
    doc["end_year"] = file.scenario.start_year + file.scenario.global.horizon * file.scenario.global.delta_years;
    ordered_json policies = ordered_json::array();
    for (const auto& p : file.run.policies) policies.push_back(to_string(p));
    doc["policies"] = policies;
    doc["seeds"] = file.run.seeds;
    ordered_json metrics = ordered_json::object();
    for (const auto& m : mc.metrics) metrics[m.name] = {{"mean", m.mean}, {"std", m.std}};
    doc["metrics"] = metrics;
    ordered_json episodes = ordered_json::array();
    for (const auto& e : mc.episodes) {
        ordered_json ep;
        ep["seed"] = e.seed;
        for (const auto& [name, field] : summary_metrics()) ep[name] = e.*field;
        ep["rollout"] = rollout_stem(e.seed);
        episodes.push_back(ep);
    }
    doc["episodes"] = episodes;
    return doc;
}

std::string summary_csv(const MonteCarloResult& mc) {
    std::string out = "seed";
    for (const auto& [name, field] : summary_metrics()) out += "," + name;
    out += '\n';
    for (const auto& e : mc.episodes) {
        out += std::to_string(e.seed);
        for (const auto& [name, field] : summary_metrics()) out += "," + format_double17(e.*field);
        out += '\n';
    }
    return out;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    ScenarioFile file = load_scenario(a.scenario);
    file.scenario = make_scenario(file.scenario);
    if (!a.protocol.empty()) file.run.protocol.kind = parse_protocol_kind(a.protocol);
    if (a.alpha_coef) file.run.protocol.alpha_coef = *a.alpha_coef;
    if (a.non_binding) file.run.protocol.binding = false;
    if (!a.policies.empty()) {
        file.run.policies.clear();
        for (const auto& p : a.policies) file.run.policies.push_back(parse_policy_spec(p));
    }
    if (!a.seeds.empty()) file.run.seeds = a.seeds;
    const std::size_t n = file.scenario.regions.size();
    if (file.run.policies.size() != 1 && file.run.policies.size() != n) {
        throw ConfigError("expected 1 or " + std::to_string(n) + " policies, got " +
                          std::to_string(file.run.policies.size()));
    }
    if (file.run.seeds.empty()) throw ConfigError("at least one seed is required");

    const auto mc = monte_carlo(file.scenario, file.run.protocol, file.run.policies, file.run.seeds, a.threads, true);
    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    for (const auto& r : mc.rollouts) write_rollout(r, dir / rollout_stem(r.seed));
    write_text_file(dir / "summary.json", summary_json(file, mc).dump(2) + "\n");
    write_text_file(dir / "summary.csv", summary_csv(mc));

    out << "wrote " << mc.rollouts.size() << " rollout(s) to " << dir.string() << "\n";
    for (const auto& m : mc.metrics) out << "  " << m.name << ": mean " << m.mean << ", std " << m.std << "\n";
    return kOk;
}

// ---- calibrate -----------------------------------------------------------

struct CalibrateArgs {
    std::string series_dir;
    std::string out;
    double eta = 0.0033;
    int delta_years = 5;
    double gamma = 0.3;
    double labor_unit = 1000.0;
    int k = 5;
    double g_sigma = 0.0152;
    double delta_sigma = 0.001;
};

HistoricalSeries read_series_csv(const fs::path& path) {
    HistoricalSeries s;
    s.region_id = path.stem().string();
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
    std::vector<std::string> header;
    {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            header.push_back(cell);
        }
    }
    std::map<std::string, std::vector<double>*> targets = {{"labor", &s.labor},       {"tfp", &s.tfp},
                                                            {"capital", &s.capital},   {"output", &s.output},
                                                            {"emissions", &s.emissions}};
    if (header.empty() || header[0] != "year") throw ConfigError(path.string() + ": first column must be 'year'");
    for (std::size_t c = 1; c < header.size(); ++c)
        if (!targets.count(header[c])) throw ConfigError(path.string() + ": unknown column '" + header[c] + "'");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        const std::string where = path.string() + " line " + std::to_string(line_no);
        if (cells.size() != header.size()) throw ConfigError(where + ": wrong number of cells");
        const double year = parse_double(cells[0], where + " year");
        if (year != static_cast<int>(year)) throw ConfigError(where + ": year must be an integer");
        s.years.push_back(static_cast<int>(year));
        for (std::size_t c = 1; c < header.size(); ++c) targets[header[c]]->push_back(parse_double(cells[c], where));
    }
    validate_series(s);
    return s;
}

/// Observations at years last, last - stride, ... (ascending).
std::vector<double> subsample(const HistoricalSeries& s, const std::vector<double>& v, int stride) {
    std::vector<double> out;
    if (v.empty() || s.years.empty()) return out;
    const int last = s.years.back();
    for (std::size_t i = 0; i < v.size(); ++i)
        if ((last - s.years[i]) % stride == 0) out.push_back(v[i]);
    return out;
}

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
    const fs::path dir = a.series_dir;
    if (!fs::is_directory(dir)) throw ConfigError("series directory '" + dir.string() + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv" && entry.path().filename() != "convergence.csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("series directory '" + dir.string() + "' contains no region series");

    std::map<std::string, double> convergence;
    if (fs::exists(dir / "convergence.csv")) {
        std::istringstream in(read_text_file(dir / "convergence.csv"));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw ConfigError("convergence.csv: expected region_id,l_a");
            convergence[line.substr(0, comma)] = parse_double(line.substr(comma + 1), "convergence.csv l_a");
        }
    }

    std::vector<HistoricalSeries> series;
    std::vector<std::string> problems;
    for (const auto& f : files) {
        auto s = read_series_csv(f);
        if (s.labor.empty()) problems.push_back(s.region_id + ": missing labor series");
        if (s.output.empty()) problems.push_back(s.region_id + ": missing output series");
        if (s.tfp.empty() && s.capital.empty())
            problems.push_back(s.region_id + ": needs a tfp or a capital series");
        series.push_back(std::move(s));
    }
    if (!problems.empty()) {
        err << "calibration input errors:\n";
        for (const auto& p : problems) err << "  - " << p << "\n";
        return kValidationError;
    }

    struct Partial {
        RegionParams params;
        bool has_k, has_sigma, has_la;
        double gdp, pop;
    };
    std::vector<Partial> parts;
    for (const auto& s : series) {
        Partial p{};
        p.params.id = s.region_id;
        p.gdp = s.output.back();
        p.pop = s.labor.back();
        p.params.l0 = s.labor.back();
        p.has_k = !s.capital.empty();
        if (p.has_k) p.params.k0 = s.capital.back();
        p.has_sigma = !s.emissions.empty() && s.output.back() > 0.0;
        if (p.has_sigma) p.params.sigma0 = s.emissions.back() / s.output.back();
        const auto it = convergence.find(s.region_id);
        p.has_la = it != convergence.end();
        if (p.has_la) p.params.l_a = it->second;
        parts.push_back(p);
    }

    const auto impute = [&](bool Partial::*has, double RegionParams::*field, const char* name) {
        std::vector<KnnReference> refs;
        std::vector<KnnTarget> targets;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i].*has) {
                refs.push_back({parts[i].params.id, parts[i].gdp, parts[i].pop, parts[i].params.*field});
            } else {
                targets.push_back({parts[i].params.id, parts[i].gdp, parts[i].pop});
                idx.push_back(i);
            }
        }
        if (targets.empty()) return;
        try {
            const auto values = knn_impute(targets, refs, a.k);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                parts[idx[j]].params.*field = values[j];
                out << parts[idx[j]].params.id << ": imputed " << name << " = " << values[j] << "\n";
            }
        } catch (const CalibrationError& e) {
            throw CalibrationError(std::string("imputing ") + name + ": " + e.what());
        }
    };
    impute(&Partial::has_k, &RegionParams::k0, "k0");
    impute(&Partial::has_sigma, &RegionParams::sigma0, "sigma0");
    impute(&Partial::has_la, &RegionParams::l_a, "l_a");

    std::vector<RegionParams> table;
    out << "region,l_g,g_a,delta_a,technology_residual\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        auto& p = parts[i].params;
        std::vector<double> tfp = s.tfp;
        if (tfp.empty()) {
            for (std::size_t t = 0; t < s.years.size(); ++t)
                tfp.push_back(s.output[t] / (std::pow(s.capital[t], a.gamma) *
                                             std::pow(s.labor[t] / a.labor_unit, 1.0 - a.gamma)));
        }
        p.a0 = tfp.back();
        p.l_g = fit_population(subsample(s, s.labor, a.delta_years), p.l_a);
        const auto fit = fit_technology(subsample(s, tfp, a.delta_years), a.eta, a.delta_years);
        p.g_a = fit.g_a;
        p.delta_a = fit.delta_a;
        p.g_sigma = a.g_sigma;
        p.delta_sigma = a.delta_sigma;
        out << p.id << "," << format_double(p.l_g) << "," << format_double(p.g_a) << "," << format_double(p.delta_a)
            << "," << format_double(fit.residual) << "\n";
        table.push_back(p);
    }
    write_region_table(table, a.out);
    out << "wrote " << table.size() << " region(s) to " << a.out << "\n";
    return kOk;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
    std::string no_mitigation;
    std::string full_mitigation;
    std::vector<std::string> solutions;
    std::vector<std::string> sets;
    std::string out;
    std::string econ_index = "cumulative";
};

struct SummaryValues {
    double temperature;
    double production;
};

SummaryValues read_summary(const std::string& path, EconIndex econ) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
        if (doc.at("schema_version").get<int>() != kSummarySchemaVersion)
            throw ConfigError(path + ": unsupported summary schema_version");
        const auto& m = doc.at("metrics");
        const char* prod = econ == EconIndex::Cumulative ? "cumulative_production" : "terminal_production";
        return {m.at("final_t_at").at("mean").get<double>(), m.at(prod).at("mean").get<double>()};
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    const EconIndex econ = parse_econ_index(a.econ_index);
    const auto none = read_summary(a.no_mitigation, econ);
    const auto full = read_summary(a.full_mitigation, econ);
    const double p_min = std::min(none.production, full.production);
    const double p_max = std::max(none.production, full.production);

    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
    if (!a.solutions.empty()) groups.emplace_back("solutions", a.solutions);
    for (const auto& spec : a.sets) {
        const auto colon = spec.find('=');
        if (colon == std::string::npos || colon == 0)
            throw ConfigError("--set expects name=file1,file2,... got '" + spec + "'");
        std::vector<std::string> files;
        std::stringstream ss(spec.substr(colon + 1));
        std::string f;
        while (std::getline(ss, f, ','))
            if (!f.empty()) files.push_back(f);
        if (files.empty()) throw ConfigError("--set '" + spec.substr(0, colon) + "' lists no files");
        groups.emplace_back(spec.substr(0, colon), files);
    }
    if (groups.empty()) throw ConfigError("evaluate needs --solution or --set");

    ordered_json report;
    report["schema_version"] = 1;
    report["formulas"] = {
        {"climate_index", "(T_none - T_solution) / (T_none - T_full)"},
        {"economic_index", "(P_solution - P_min) / (P_max - P_min)"},
        {"production", econ == EconIndex::Cumulative ? "sum over steps and regions of Y" : "sum over regions of final-step Y"},
        {"reference_point", "(0, 0)"}};
    report["extremal"] = {{"t_none", none.temperature}, {"t_full", full.temperature}, {"p_min", p_min},
                          {"p_max", p_max}};

    std::vector<std::vector<OutcomePoint>> point_sets;
    ordered_json sets = ordered_json::array();
    for (const auto& [name, files] : groups) {
        std::vector<OutcomePoint> points;
        for (const auto& f : files) {
            const auto v = read_summary(f, econ);
            points.push_back({climate_index(v.temperature, none.temperature, full.temperature),
                              economic_index(v.production, p_min, p_max), f});
        }
        const auto front = pareto_front(points);
        const auto hv = hypervolume_detail(points);
        ordered_json pts = ordered_json::array();
        for (const auto& p : points) {
            const bool on_front = std::any_of(front.begin(), front.end(), [&](const OutcomePoint& q) {
                return q.climate == p.climate && q.economic == p.economic;
            });
            pts.push_back({{"source", p.label}, {"climate_index", p.climate}, {"economic_index", p.economic},
                           {"on_front", on_front}});
        }
        sets.push_back({{"name", name}, {"points", pts}, {"hypervolume", hv.area}, {"discarded", hv.discarded}});
        point_sets.push_back(std::move(points));
    }
    report["sets"] = sets;
    ordered_json ranking = ordered_json::array();
    for (const auto& r : rank_solution_sets(point_sets))
        ranking.push_back({{"name", groups[r.index].first}, {"hypervolume", r.hypervolume}});
    report["ranking"] = ranking;

    const std::string text = report.dump(2) + "\n";
    if (a.out.empty()) {
        out << text;
    } else {
        write_text_file(a.out, text);
        out << "wrote report to " << a.out << "\n";
    }
    return kOk;
}

// ---- fetch-data ----------------------------------------------------------

struct FetchArgs {
    std::string country;
    std::string indicator;
    std::string out_dir;
    std::string fixture_dir;
    int per_page = 1000;
};

int cmd_fetch(const FetchArgs& a, const Transport& injected, std::ostream& out) {
    Transport transport = injected;
    if (!a.fixture_dir.empty()) {
        transport = directory_transport(a.fixture_dir);
    } else if (!transport) {
        transport = http_transport();
    }
    const fs::path dir = a.out_dir.empty() ? data_dir() : fs::path(a.out_dir);
    const auto pages = fetch_indicator(a.country, a.indicator, transport, a.per_page);
    std::vector<WorldBankRecord> records;
    for (const auto& p : pages) records.insert(records.end(), p.records.begin(), p.records.end());
    const auto series = to_series(records);
    std::string csv = "country_id,indicator_id,year,value\n";
    for (const auto& s : series)
        for (const auto& pt : s.points)
            csv += s.country_id + "," + s.indicator_id + "," + std::to_string(pt.year) + "," + format_double17(pt.value) + "\n";
    const fs::path target = dir / (a.country + "_" + a.indicator + ".csv");
    write_text_file(target, csv);
    out << "fetched " << pages.size() << " page(s), " << records.size() << " record(s); wrote " << target.string()
        << "\n";
    return kOk;
}

// ---- regions -------------------------------------------------------------

struct RegionsArgs {
    std::string table;
    std::string out;
    double gamma = 0.3;
    double labor_unit = 1000.0;
    double g_sigma = 0.0152;
    double delta_sigma = 0.001;
    std::vector<std::string> ids;
    std::string new_id;
    std::string id;
    std::vector<double> fractions;
    std::vector<double> tfps;
    std::vector<std::string> new_ids;
};

std::vector<RegionParams> load_table(const RegionsArgs& a) {
    return read_region_table(a.table, RegionDefaults{a.g_sigma, a.delta_sigma, std::nullopt});
}

int cmd_merge(const RegionsArgs& a, std::ostream& out) {
    auto table = load_table(a);
    if (a.ids.size() < 1) throw ConfigError("merge needs --ids");
    std::vector<RegionParams> parts;
    for (const auto& id : a.ids) {
        const auto it = std::find_if(table.begin(), table.end(), [&](const RegionParams& r) { return r.id == id; });
        if (it == table.end()) throw ConfigError("region '" + id + "' is not in the table");
        parts.push_back(*it);
    }
    const auto merged = merge_region_params(parts, a.new_id, a.gamma, a.labor_unit);
    std::vector<RegionParams> result;
    bool inserted = false;
    for (const auto& r : table) {
        if (std::find(a.ids.begin(), a.ids.end(), r.id) == a.ids.end()) {
            result.push_back(r);
        } else if (!inserted) {
            result.push_back(merged);
            inserted = true;
        }
    }
    write_region_table(result, a.out);
    out << "merged " << parts.size() << " region(s) into '" << a.new_id << "'; wrote " << a.out << "\n";
    return kOk;
}

int cmd_split(const RegionsArgs& a, std::ostream& out) {
    auto table = load_table(a);
    const auto it = std::find_if(table.begin(), table.end(), [&](const RegionParams& r) { return r.id == a.id; });
    if (it == table.end()) throw ConfigError("region '" + a.id + "' is not in the table");
    if (a.fractions.size() != a.tfps.size() || a.fractions.size() != a.new_ids.size())
        throw ConfigError("--fractions, --tfps and --new-ids must have the same length");
    std::vector<RegionParams> pieces;
    try {
        pieces = split_region_params(*it, a.fractions, a.tfps, a.new_ids, a.gamma, a.labor_unit);
    } catch (const CalibrationError& e) {
        throw ConfigError(e.what());
    }
    std::vector<RegionParams> result;
    for (const auto& r : table) {
        if (r.id == a.id) {
            result.insert(result.end(), pieces.begin(), pieces.end());
        } else {
            result.push_back(r);
        }
    }
    write_region_table(result, a.out);
    out << "split '" << a.id << "' into " << pieces.size() << " region(s); wrote " << a.out << "\n";
    return kOk;
}

void add_region_table_flags(CLI::App* cmd, RegionsArgs& a) {
    cmd->add_option("--table", a.table, "Input region table (CSV)")->required();
    cmd->add_option("--out", a.out, "Output region table (CSV)")->required();
    cmd->add_option("--gamma", a.gamma, "Capital elasticity")->capture_default_str();
    cmd->add_option("--labor-unit", a.labor_unit, "Population divisor used in production")->capture_default_str();
    cmd->add_option("--g-sigma", a.g_sigma, "g_sigma for rows without one")->capture_default_str();
    cmd->add_option("--delta-sigma", a.delta_sigma, "delta_sigma for rows without one")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Transport& transport) {
    CLI::App app{"RICE-N climate-economy simulator", "rice_sim"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run Monte-Carlo rollouts of a scenario");
    simulate->add_option("--scenario", sim.scenario, "Scenario file (TOML)")->required();
    simulate->add_option("--protocol", sim.protocol, "none | unilateral | bilateral | club");
    simulate->add_option("--policy", sim.policies, "Policy spec; give once for all regions or once per region");
    simulate->add_option("--seeds", sim.seeds, "Comma-separated seeds")->delimiter(',');
    simulate->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads (default: RICE_SIM_THREADS or all cores)");
    simulate->add_option("--alpha-coef", sim.alpha_coef, "Unilateral mitigation correction coefficient");
    simulate->add_flag("--non-binding", sim.non_binding, "Record compliance instead of enforcing masks");

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "Fit region parameters from historical series");
    calibrate->add_option("--series-dir", cal.series_dir, "Directory of <region>.csv series")->required();
    calibrate->add_option("--out", cal.out, "Output region table (CSV)")->required();
    calibrate->add_option("--eta", cal.eta, "Long-run TFP growth")->capture_default_str();
    calibrate->add_option("--delta-years", cal.delta_years, "Years per step")->capture_default_str();
    calibrate->add_option("--gamma", cal.gamma, "Capital elasticity")->capture_default_str();
    calibrate->add_option("--labor-unit", cal.labor_unit, "Population divisor used in production")
        ->capture_default_str();
    calibrate->add_option("--k", cal.k, "Neighbours for imputation")->capture_default_str();
    calibrate->add_option("--g-sigma", cal.g_sigma, "g_sigma written to every region")->capture_default_str();
    calibrate->add_option("--delta-sigma", cal.delta_sigma, "delta_sigma written to every region")
        ->capture_default_str();

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score simulate summaries against the extremal policies");
    evaluate->add_option("--no-mitigation", ev.no_mitigation, "Summary of the 0% mitigation run")->required();
    evaluate->add_option("--full-mitigation", ev.full_mitigation, "Summary of the 100% mitigation run")->required();
    evaluate->add_option("--solution", ev.solutions, "Summary file of one solution (repeatable)");
    evaluate->add_option("--set", ev.sets, "Named solution set: name=file1,file2 (repeatable)");
    evaluate->add_option("--out", ev.out, "Report path (default: stdout)");
    evaluate->add_option("--econ-index", ev.econ_index, "cumulative | terminal")->capture_default_str();

    FetchArgs fe;
    auto* fetch = app.add_subcommand("fetch-data", "Download a World Bank indicator");
    fetch->add_option("--country", fe.country, "Country code, e.g. USA or all")->required();
    fetch->add_option("--indicator", fe.indicator, "Indicator code, e.g. SP.POP.TOTL")->required();
    fetch->add_option("--out-dir", fe.out_dir, "Output directory (default: RICE_SIM_DATA_DIR or data/cache)");
    fetch->add_option("--fixture-dir", fe.fixture_dir, "Serve pages from saved files instead of the network");
    fetch->add_option("--per-page", fe.per_page, "Records per page")->capture_default_str();

    auto* regions = app.add_subcommand("regions", "Merge or split rows of a region table");
    regions->require_subcommand(1);
    RegionsArgs mg;
    auto* merge = regions->add_subcommand("merge", "Merge regions into one");
    add_region_table_flags(merge, mg);
    merge->add_option("--ids", mg.ids, "Region ids to merge")->delimiter(',')->required();
    merge->add_option("--new-id", mg.new_id, "Id of the merged region")->required();
    RegionsArgs sp;
    auto* split = regions->add_subcommand("split", "Split one region into pieces");
    add_region_table_flags(split, sp);
    split->add_option("--id", sp.id, "Region id to split")->required();
    split->add_option("--fractions", sp.fractions, "Population/output shares summing to 1")->delimiter(',')->required();
    split->add_option("--tfps", sp.tfps, "TFP of each piece")->delimiter(',')->required();
    split->add_option("--new-ids", sp.new_ids, "Ids of the pieces")->delimiter(',')->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << "\n";
        return kValidationError;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out);
        if (*calibrate) return cmd_calibrate(cal, out, err);
        if (*evaluate) return cmd_evaluate(ev, out);
        if (*fetch) return cmd_fetch(fe, transport, out);
        if (*merge) return cmd_merge(mg, out);
        if (*split) return cmd_split(sp, out);
    } catch (const ScenarioError& e) {
        err << e.what() << "\n";
        return kValidationError;
    } catch (const ConfigError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kValidationError;
    } catch (const FitError& e) {
        err << "calibration failed: " << e.what() << "\n";
        return kRuntimeError;
    } catch (const CalibrationError& e) {
        err << "calibration failed: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kRuntimeError;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace rice::cli
