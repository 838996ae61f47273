#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rice/types.h"

namespace rice {

/// Malformed World Bank payload; `offset` is the byte position of the problem.
class WorldBankParseError : public ConfigError {
  public:
    WorldBankParseError(const std::string& what, std::size_t offset);
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

class FetchError : public ModelError {
  public:
    using ModelError::ModelError;
};

struct WorldBankRecord {
    std::string country_id;
    std::string country_name;
    std::string indicator_id;
    std::string indicator_name;
    std::string date;
    std::optional<double> value;
    bool operator==(const WorldBankRecord&) const = default;
};

struct WorldBankPage {
    int page = 0;
    int pages = 0;
    int per_page = 0;
    int total = 0;
    std::vector<WorldBankRecord> records;
    bool operator==(const WorldBankPage&) const = default;
};

struct SeriesPoint {
    int year = 0;
    double value = 0.0;
    bool operator==(const SeriesPoint&) const = default;
};

/// One indicator for one country, ascending by year, nulls dropped.
struct CountrySeries {
    std::string country_id;
    std::string indicator_id;
    std::vector<SeriesPoint> points;
    bool operator==(const CountrySeries&) const = default;
};

/// Parses the two-element [metadata, observations] array form. A null or
/// missing observation list is an empty page.
WorldBankPage parse_worldbank_page(std::string_view bytes);

/// Groups records by country (ascending id), drops nulls and sorts by year.
/// Throws WorldBankParseError when a date is not a plain year.
std::vector<CountrySeries> to_series(const std::vector<WorldBankRecord>& records,
                                     std::string_view source_bytes = {});

/// parse_worldbank_page followed by to_series.
std::vector<CountrySeries> parse_worldbank_json(std::string_view bytes);

struct FetchRequest {
    std::string country;
    std::string indicator;
    int page = 1;
    int per_page = 1000;
    std::string url;  // full request URL, for transports that do real HTTP
};

struct FetchResponse {
    int status = 0;
    std::string body;
};

using Transport = std::function<FetchResponse(const FetchRequest&)>;

inline constexpr int kMaxFetchPages = 1000;
inline constexpr const char* kWorldBankBaseUrl = "https://api.worldbank.org";

std::string worldbank_url(const std::string& base, const FetchRequest& request);

/// Fetches every page of an indicator through `transport`.
/// Throws FetchError on transport failure, non-200 status or > 1000 pages.
std::vector<WorldBankPage> fetch_indicator(const std::string& country, const std::string& indicator,
                                           const Transport& transport, int per_page = 1000,
                                           const std::string& base_url = kWorldBankBaseUrl);

/// Serves `<dir>/<country>_<indicator>_p<page>.json` files; missing files answer 404.
Transport directory_transport(const std::filesystem::path& dir);

/// File name used by directory_transport and the fetch-data cache.
std::string cache_file_name(const std::string& country, const std::string& indicator, int page);

/// RICE_SIM_DATA_DIR when set, otherwise `fallback`.
std::filesystem::path data_dir(const std::filesystem::path& fallback = "data/cache");

}  // namespace rice
