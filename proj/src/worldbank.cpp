#include "rice/worldbank.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace rice {

using nlohmann::json;

WorldBankParseError::WorldBankParseError(const std::string& what, std::size_t offset)
    : ConfigError("world bank payload, byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

namespace {

int meta_int(const json& meta, const char* key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw WorldBankParseError(std::string("metadata lacks '") + key + "'", 0);
    if (it->is_number_integer()) return it->get<int>();
    if (it->is_string()) {
        // The API sometimes quotes these numbers.
        const auto& s = it->get_ref<const std::string&>();
        int v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
    }
    throw WorldBankParseError(std::string("metadata '") + key + "' is not an integer", 0);
}

std::string nested_string(const json& rec, const char* key, const char* field) {
    const auto it = rec.find(key);
    if (it == rec.end() || !it->is_object()) return {};
    const auto f = it->find(field);
    return f != it->end() && f->is_string() ? f->get<std::string>() : std::string{};
}

/// Byte offset of the value of the k-th "date" key, or 0.
std::size_t date_offset(std::string_view bytes, std::size_t k) {
    std::size_t pos = 0;
    for (std::size_t seen = 0;; ++seen) {
        pos = bytes.find("\"date\"", pos);
        if (pos == std::string_view::npos) return 0;
        pos += 6;
        if (seen == k) {
            const auto colon = bytes.find(':', pos);
            if (colon == std::string_view::npos) return pos;
            return bytes.find_first_not_of(" \t\r\n", colon + 1);
        }
    }
}

}  // namespace

WorldBankPage parse_worldbank_page(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw WorldBankParseError(e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    const std::size_t first = bytes.find_first_not_of(" \t\r\n");
    if (!doc.is_array() || doc.size() < 1 || doc.size() > 2 || !doc[0].is_object())
        throw WorldBankParseError("expected a [metadata, observations] array", first == std::string_view::npos ? 0 : first);
    if (doc[0].contains("message"))
        throw WorldBankParseError("API error message: " + doc[0]["message"].dump(), first);

    WorldBankPage page;
    page.page = meta_int(doc[0], "page");
    page.pages = meta_int(doc[0], "pages");
    page.per_page = meta_int(doc[0], "per_page");
    page.total = meta_int(doc[0], "total");
    if (doc.size() == 1 || doc[1].is_null()) return page;
    if (!doc[1].is_array()) throw WorldBankParseError("observations must be an array", first);
    if (page.per_page > 0 && doc[1].size() > static_cast<std::size_t>(page.per_page))
        throw WorldBankParseError("more observations than per_page", first);

    for (const auto& rec : doc[1]) {
        if (!rec.is_object()) throw WorldBankParseError("observation is not an object", first);
        WorldBankRecord r;
        r.country_id = nested_string(rec, "country", "id");
        r.country_name = nested_string(rec, "country", "value");
        r.indicator_id = nested_string(rec, "indicator", "id");
        r.indicator_name = nested_string(rec, "indicator", "value");
        const auto date = rec.find("date");
        if (date == rec.end() || !date->is_string())
            throw WorldBankParseError("observation lacks a string 'date'", date_offset(bytes, page.records.size()));
        r.date = date->get<std::string>();
        const auto value = rec.find("value");
        if (value != rec.end() && !value->is_null()) {
            if (!value->is_number()) throw WorldBankParseError("observation value is not a number or null", first);
            r.value = value->get<double>();
        }
        page.records.push_back(std::move(r));
    }
    return page;
}

std::vector<CountrySeries> to_series(const std::vector<WorldBankRecord>& records, std::string_view source_bytes) {
    std::map<std::pair<std::string, std::string>, CountrySeries> grouped;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        int year = 0;
        const auto res = std::from_chars(r.date.data(), r.date.data() + r.date.size(), year);
        if (r.date.empty() || res.ec != std::errc() || res.ptr != r.date.data() + r.date.size()) {
            throw WorldBankParseError("date '" + r.date + "' is not a year",
                                      source_bytes.empty() ? 0 : date_offset(source_bytes, k));
        }
        auto& s = grouped[{r.country_id, r.indicator_id}];
        s.country_id = r.country_id;
        s.indicator_id = r.indicator_id;
        if (r.value) s.points.push_back({year, *r.value});
    }
    std::vector<CountrySeries> out;
    for (auto& [key, s] : grouped) {
        std::stable_sort(s.points.begin(), s.points.end(),
                         [](const SeriesPoint& a, const SeriesPoint& b) { return a.year < b.year; });
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CountrySeries> parse_worldbank_json(std::string_view bytes) {
    return to_series(parse_worldbank_page(bytes).records, bytes);
}

std::string worldbank_url(const std::string& base, const FetchRequest& r) {
    return base + "/v2/country/" + r.country + "/indicator/" + r.indicator + "?format=json&page=" +
           std::to_string(r.page) + "&per_page=" + std::to_string(r.per_page);
}

std::vector<WorldBankPage> fetch_indicator(const std::string& country, const std::string& indicator,
                                           const Transport& transport, int per_page, const std::string& base_url) {
    if (!transport) throw FetchError("fetch_indicator: no transport supplied");
    std::vector<WorldBankPage> pages;
    for (int page = 1;; ++page) {
        if (page > kMaxFetchPages)
            throw FetchError("fetch " + country + "/" + indicator + ": more than " + std::to_string(kMaxFetchPages) +
                             " pages");
        FetchRequest req{country, indicator, page, per_page, {}};
        req.url = worldbank_url(base_url, req);
        FetchResponse resp;
        try {
            resp = transport(req);
        } catch (const std::exception& e) {
            throw FetchError("request " + req.url + " failed: " + e.what());
        }
        if (resp.status != 200)
            throw FetchError("request " + req.url + " returned HTTP status " + std::to_string(resp.status));
        WorldBankPage p;
        try {
            p = parse_worldbank_page(resp.body);
        } catch (const WorldBankParseError& e) {
            throw FetchError("request " + req.url + ": " + e.what());
        }
        const int total_pages = p.pages;
        if (total_pages == 0) break;
        pages.push_back(std::move(p));
        if (page >= total_pages) break;
    }
    return pages;
}

std::string cache_file_name(const std::string& country, const std::string& indicator, int page) {
    return country + "_" + indicator + "_p" + std::to_string(page) + ".json";
}

Transport directory_transport(const std::filesystem::path& dir) {
    return [dir](const FetchRequest& req) {
        std::ifstream in(dir / cache_file_name(req.country, req.indicator, req.page), std::ios::binary);
        if (!in) return FetchResponse{404, {}};
        std::ostringstream buf;
        buf << in.rdbuf();
        return FetchResponse{200, buf.str()};
    };
}

std::filesystem::path data_dir(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("RICE_SIM_DATA_DIR"); env && *env) return env;
    return fallback;
}

}  // namespace rice
