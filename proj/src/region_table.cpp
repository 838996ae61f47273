#include "rice/region_table.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "rice/config_io.h"

namespace rice {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

bool is_known(std::string_view name) {
    for (const char* c : kRegionColumns)
        if (name == c) return true;
    for (const char* c : kRegionOptionalColumns)
        if (name == c) return true;
    return false;
}

}  // namespace

std::vector<RegionParams> parse_region_table(std::string_view text, const RegionDefaults& defaults) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        lines.push_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) throw ConfigError("region table: missing header line");

    const auto header = split(lines[first]);
    std::map<std::string, std::size_t, std::less<>> column;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name(header[c]);
        if (name.find('"') != std::string::npos) throw ConfigError("region table: quoted cells are not supported");
        if (!is_known(name)) throw ConfigError("region table: unknown column '" + name + "'");
        if (!column.emplace(name, c).second) throw ConfigError("region table: duplicate column '" + name + "'");
    }
    for (const char* req : kRegionColumns)
        if (!column.count(req)) throw ConfigError(std::string("region table: missing required column '") + req + "'");

    std::vector<RegionParams> regions;
    for (std::size_t li = first + 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const std::string where = "region table line " + std::to_string(li + 1);
        const auto cells = split(lines[li]);
        if (cells.size() != header.size()) {
            throw ConfigError(where + ": expected " + std::to_string(header.size()) + " cells, got " +
                              std::to_string(cells.size()));
        }
        const auto num = [&](const char* name) {
            return parse_double(cells[column.find(name)->second], where + " column " + name);
        };
        const auto opt = [&](const char* name, std::optional<double> fallback) -> std::optional<double> {
            const auto it = column.find(name);
            if (it == column.end() || cells[it->second].empty()) return fallback;
            return parse_double(cells[it->second], where + " column " + name);
        };
        RegionParams r;
        r.id = std::string(cells[column.find("region_id")->second]);
        if (r.id.empty()) throw ConfigError(where + ": empty region_id");
        r.a0 = num("a0");
        r.k0 = num("k0");
        r.l0 = num("l0");
        r.l_a = num("l_a");
        r.delta_a = num("delta_a");
        r.g_a = num("g_a");
        r.l_g = num("l_g");
        r.sigma0 = num("sigma0");
        const auto g_sigma = opt("g_sigma", defaults.g_sigma);
        const auto delta_sigma = opt("delta_sigma", defaults.delta_sigma);
        if (!g_sigma) throw ConfigError(where + ": g_sigma missing and no default configured");
        if (!delta_sigma) throw ConfigError(where + ": delta_sigma missing and no default configured");
        r.g_sigma = *g_sigma;
        r.delta_sigma = *delta_sigma;
        r.delta_k = opt("delta_k", defaults.delta_k);
        regions.push_back(std::move(r));
    }
    return regions;
}

std::vector<RegionParams> read_region_table(const std::filesystem::path& path, const RegionDefaults& defaults) {
    try {
        return parse_region_table(read_text_file(path), defaults);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string format_region_table(const std::vector<RegionParams>& regions) {
    const bool any_delta_k =
        std::any_of(regions.begin(), regions.end(), [](const RegionParams& r) { return r.delta_k.has_value(); });
    std::ostringstream out;
    out << "region_id,a0,k0,l0,l_a,delta_a,g_a,l_g,sigma0,g_sigma,delta_sigma";
    if (any_delta_k) out << ",delta_k";
    out << '\n';
    for (const auto& r : regions) {
        out << r.id;
        for (double v : {r.a0, r.k0, r.l0, r.l_a, r.delta_a, r.g_a, r.l_g, r.sigma0, r.g_sigma, r.delta_sigma})
            out << ',' << format_double(v);
        if (any_delta_k) out << ',' << (r.delta_k ? format_double(*r.delta_k) : "");
        out << '\n';
    }
    return out.str();
}

void write_region_table(const std::vector<RegionParams>& regions, const std::filesystem::path& path) {
    write_text_file(path, format_region_table(regions));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ModelError("write failed for '" + path.string() + "'");
}

}  // namespace rice
