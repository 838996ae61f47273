#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "json.hpp"

#include "rice/config_io.h"
#include "rice/engine.h"
#include "rice/region_table.h"
#include "rice/rollout_io.h"
#include "rice/worldbank.h"
#include "support.h"

using namespace rice;
namespace fs = std::filesystem;
namespace rt = rice::testing;

namespace {

fs::path fixture_dir() { return RICE_FIXTURE_DIR; }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rice_dataio_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::string page_json(int page, int pages, const std::string& observations) {
    return R"([{"page":)" + std::to_string(page) + R"(,"pages":)" + std::to_string(pages) +
           R"(,"per_page":50,"total":3},)" + observations + "]";
}

std::string obs(const std::string& date, const std::string& value) {
    return R"({"indicator":{"id":"SP.POP.TOTL","value":"Population, total"},"country":{"id":"US","value":"United States"},"date":")" +
           date + R"(","value":)" + value + "}";
}

}  // namespace

// ---- scenario files ------------------------------------------------------

TEST(ScenarioFile, RoundTripIsBitIdentical) {
    const auto file = load_scenario(rt::source_dir() / "configs" / "default.toml");
    const std::string once = serialize_scenario(file);
    const auto again = parse_scenario(once);
    EXPECT_EQ(serialize_scenario(again), once);
    EXPECT_EQ(format_region_table(again.scenario.regions), format_region_table(file.scenario.regions));
    EXPECT_EQ(again.run.seeds, file.run.seeds);
    EXPECT_EQ(config_hash(again.scenario), config_hash(file.scenario));
}

TEST(ScenarioFile, HashIsStableAndSensitive) {
    auto sc = rt::default_scenario();
    const auto h = config_hash(sc);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h, config_hash(sc));
    sc.global.a2 = 0.00237;
    EXPECT_NE(config_hash(sc), h);
}

TEST(ScenarioFile, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(ScenarioFile, UnknownKeyIsRejected) {
    const auto text = serialize_scenario(load_scenario(rt::source_dir() / "configs" / "default.toml"));
    EXPECT_THROW(parse_scenario(text + "\nbogus_key = 3\n"), ConfigError);
    try {
        parse_scenario(text + "\nbogus_key = 3\n");
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bogus_key"), std::string::npos) << e.what();
    }
}

TEST(ScenarioFile, SyntaxErrorAndSchemaVersion) {
    EXPECT_THROW(parse_scenario("schema_version = \n"), ConfigError);
    auto text = serialize_scenario(load_scenario(rt::source_dir() / "configs" / "default.toml"));
    const auto pos = text.find("schema_version = 1");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 18, "schema_version = 2");
    EXPECT_THROW(parse_scenario(text), ConfigError);
}

TEST(NumberFormat, RoundTripAndStrictParse) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e17, 0.0}) {
        EXPECT_EQ(parse_double(format_double(v), "v"), v);
        EXPECT_EQ(parse_double(format_double17(v), "v"), v);
    }
    EXPECT_EQ(format_double17(0.1), "0.10000000000000001");
    EXPECT_THROW(parse_double("1.5x", "cell"), ConfigError);
    EXPECT_THROW(parse_double("", "cell"), ConfigError);
    EXPECT_THROW(parse_double("nan", "cell"), ConfigError);
}

// ---- region tables -------------------------------------------------------

TEST(RegionTable, RoundTrip) {
    const auto regions = read_region_table(rt::source_dir() / "data" / "regions_27.csv",
                                           RegionDefaults{0.0152, 0.001, std::nullopt});
    ASSERT_EQ(regions.size(), 27u);
    EXPECT_EQ(regions[0].id, "1");
    EXPECT_EQ(regions[0].l0, 476.878);
    EXPECT_EQ(regions[0].sigma0, 0.456);
    const auto text = format_region_table(regions);
        EXPECT_EQ(format_region_table(parse_region_table(text)), text);
}

TEST(RegionTable, AnyColumnOrder) {
    const std::string a =
        "region_id,a0,k0,l0,l_a,delta_a,g_a,l_g,sigma0\n"
        "x,1.5,2,300,400,0.1,0.05,0.03,0.4\n";
    const std::string b =
        "sigma0,l_g,region_id,g_a,delta_a,l_a,l0,k0,a0\n"
        "0.4,0.03,x,0.05,0.1,400,300,2,1.5\n";
    const RegionDefaults d{0.01, 0.002, std::nullopt};
    EXPECT_EQ(format_region_table(parse_region_table(a, d)), format_region_table(parse_region_table(b, d)));
    const auto r = parse_region_table(b, d);
    EXPECT_EQ(r[0].g_sigma, 0.01);
    EXPECT_EQ(r[0].delta_sigma, 0.002);
    EXPECT_EQ(r[0].a0, 1.5);
}

TEST(RegionTable, Errors) {
    const std::string head = "region_id,a0,k0,l0,l_a,delta_a,g_a,l_g,sigma0\n";
    const RegionDefaults d{0.01, 0.002, std::nullopt};
    EXPECT_THROW(parse_region_table("region_id,a0,k0,l0,l_a,delta_a,g_a,l_g\nx,1,1,1,1,1,1,1\n", d), ConfigError);
    EXPECT_THROW(parse_region_table(head + "x,1,1,1,1,1,1,1\n", d), ConfigError);
    EXPECT_THROW(parse_region_table(head + "x,1,1,abc,1,1,1,1,1\n", d), ConfigError);
    EXPECT_THROW(parse_region_table("region_id,a0,k0,l0,l_a,delta_a,g_a,l_g,sigma0,wat\nx,1,1,1,1,1,1,1,1,1\n", d),
                 ConfigError);
    EXPECT_THROW(parse_region_table("region_id,a0,a0,k0,l0,l_a,delta_a,g_a,l_g,sigma0\nx,1,1,1,1,1,1,1,1,1\n", d),
                 ConfigError);
    try {
        parse_region_table(head + "x,1,1,1,1,1,1,1,1\ny,1,1,oops,1,1,1,1,1\n", d);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

// ---- rollouts ------------------------------------------------------------

TEST(Rollout, HeaderIsExact) {
    EXPECT_EQ(rollout_csv_header(),
              "step,region,savings,mitigation,export_limit,tariffs,import_bids,agreed_min_level,compliant,"
              "capital,labor,tfp,sigma,theta1,production,damage_fraction,abatement_fraction,gross_output,"
              "investment,emissions,imports,exports,domestic_consumption,foreign_consumption,"
              "aggregate_consumption,utility,balance,reserve_fund,forcing,land_emissions,total_emissions,"
              "t_at,t_lo,m_at,m_up,m_lo");
}

TEST(Rollout, SmallRoundTrip) {
    const auto sc = rt::small_scenario(2, 3);
    ProtocolSpec proto;
    proto.kind = ProtocolKind::Bilateral;
    const auto rec = run_episode(sc, proto, {PolicySpec::random(7)}, 11);
    ASSERT_EQ(rec.rows.size(), 6u);
    const auto csv = format_rollout_csv(rec);
    const auto side = format_rollout_sidecar(rec);
    EXPECT_EQ(count_lines(csv), 7u);
    const auto back = parse_rollout(csv, side);
    EXPECT_EQ(back, rec);
    EXPECT_EQ(format_rollout_csv(back), csv);
    EXPECT_EQ(format_rollout_sidecar(back), side);

    const auto dir = scratch("roundtrip");
    write_rollout(rec, dir / "r");
    EXPECT_EQ(read_rollout(dir / "r"), rec);
}

TEST(Rollout, DefaultScenarioLineCount) {
    const auto sc = rt::default_scenario();
    const auto rec = run_episode(sc, ProtocolSpec{}, {PolicySpec::extremal_min()}, 1);
    EXPECT_EQ(count_lines(format_rollout_csv(rec)), 27u * 20u + 1u);
}

TEST(Rollout, SchemaMismatchAndCorruption) {
    const auto rec = run_episode(rt::small_scenario(2, 3), ProtocolSpec{}, {PolicySpec::extremal_min()}, 3);
    const auto csv = format_rollout_csv(rec);
    auto side = nlohmann::json::parse(format_rollout_sidecar(rec));
    side["schema_version"] = 99;
    EXPECT_THROW(parse_rollout(csv, side.dump()), ConfigError);

    const auto good_side = format_rollout_sidecar(rec);
    EXPECT_THROW(parse_rollout("wrong,header\n" + csv.substr(csv.find('\n') + 1), good_side), ConfigError);
    EXPECT_THROW(parse_rollout(csv.substr(0, csv.rfind('\n', csv.size() - 2) + 1), good_side), ConfigError);
}

// ---- World Bank payloads -------------------------------------------------

TEST(WorldBank, NullValuesAreDropped) {
    const auto text = page_json(1, 1, "[" + obs("2021", "331.9") + "," + obs("2020", "null") + "," +
                                          obs("2019", "328.2") + "]");
    const auto page = parse_worldbank_page(text);
    EXPECT_EQ(page.records.size(), 3u);
    EXPECT_FALSE(page.records[1].value.has_value());
    const auto series = parse_worldbank_json(text);
    ASSERT_EQ(series.size(), 1u);
    EXPECT_EQ(series[0].country_id, "US");
    EXPECT_EQ(series[0].indicator_id, "SP.POP.TOTL");
    ASSERT_EQ(series[0].points.size(), 2u);
    EXPECT_EQ(series[0].points[0], (SeriesPoint{2019, 328.2}));
    EXPECT_EQ(series[0].points[1], (SeriesPoint{2021, 331.9}));
}

TEST(WorldBank, EmptyObservationList) {
    EXPECT_TRUE(parse_worldbank_json(page_json(0, 0, "null")).empty());
    EXPECT_TRUE(parse_worldbank_json(page_json(1, 1, "[]")).empty());
    EXPECT_TRUE(parse_worldbank_json(R"([{"page":1,"pages":0,"per_page":50,"total":0}])").empty());
}

TEST(WorldBank, QuotedMetadataIntegers) {
    const auto page = parse_worldbank_page(R"([{"page":"2","pages":"3","per_page":"50","total":"120"},[]])");
    EXPECT_EQ(page.page, 2);
    EXPECT_EQ(page.pages, 3);
    EXPECT_EQ(page.per_page, 50);
    EXPECT_EQ(page.total, 120);
}

TEST(WorldBank, BadYearReportsByteOffset) {
    const auto text = page_json(1, 1, "[" + obs("2021", "1") + "," + obs("2020Q1", "2") + "]");
    try {
        parse_worldbank_json(text);
        FAIL();
    } catch (const WorldBankParseError& e) {
        EXPECT_EQ(e.offset(), text.find("\"2020Q1\""));
    }
}

TEST(WorldBank, MalformedPayloads) {
    EXPECT_THROW(parse_worldbank_page("{not json"), WorldBankParseError);
    EXPECT_THROW(parse_worldbank_page(R"({"page":1})"), WorldBankParseError);
    EXPECT_THROW(parse_worldbank_page(R"([{"message":[{"id":"120","value":"Invalid value"}]}])"),
                 WorldBankParseError);
    EXPECT_THROW(parse_worldbank_page(page_json(1, 1, "[" + obs("2020", "\"big\"") + "]")), WorldBankParseError);
}

TEST(WorldBank, FixtureMatchesGolden) {
    const auto text = read_text_file(fixture_dir() / "worldbank" / "multi_country.json");
    const auto series = parse_worldbank_json(text);
    std::string csv = "country_id,indicator_id,year,value\n";
    for (const auto& s : series)
        for (const auto& p : s.points)
            csv += s.country_id + "," + s.indicator_id + "," + std::to_string(p.year) + "," +
                   format_double17(p.value) + "\n";
    EXPECT_EQ(csv, read_text_file(fixture_dir() / "worldbank" / "multi_country.golden.csv"));
}

TEST(WorldBank, UrlFormat) {
    FetchRequest r{"USA", "SP.POP.TOTL", 2, 500, {}};
    EXPECT_EQ(worldbank_url("https://api.worldbank.org", r),
              "https://api.worldbank.org/v2/country/USA/indicator/SP.POP.TOTL?format=json&page=2&per_page=500");
    EXPECT_EQ(cache_file_name("USA", "SP.POP.TOTL", 2), "USA_SP.POP.TOTL_p2.json");
}

TEST(Fetch, FollowsPages) {
    std::vector<int> asked;
    const Transport fake = [&](const FetchRequest& r) {
        asked.push_back(r.page);
        if (r.page == 1) return FetchResponse{200, page_json(1, 2, "[" + obs("2021", "3") + "]")};
        return FetchResponse{200, page_json(2, 2, "[" + obs("2020", "2") + "]")};
    };
    const auto pages = fetch_indicator("USA", "SP.POP.TOTL", fake);
    EXPECT_EQ(asked, (std::vector<int>{1, 2}));
    ASSERT_EQ(pages.size(), 2u);
    EXPECT_EQ(pages[1].records[0].date, "2020");
}

TEST(Fetch, ZeroPagesIsEmpty) {
    int calls = 0;
    const Transport fake = [&](const FetchRequest&) {
        ++calls;
        return FetchResponse{200, R"([{"page":0,"pages":0,"per_page":50,"total":0},null])"};
    };
    EXPECT_TRUE(fetch_indicator("USA", "X", fake).empty());
    EXPECT_EQ(calls, 1);
}

TEST(Fetch, HttpErrorNamesUrl) {
    const Transport fake = [](const FetchRequest&) { return FetchResponse{500, "oops"}; };
    try {
        fetch_indicator("USA", "SP.POP.TOTL", fake, 100);
        FAIL();
    } catch (const FetchError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("https://api.worldbank.org/v2/country/USA/indicator/SP.POP.TOTL?format=json&page=1"),
                  std::string::npos)
            << msg;
        EXPECT_NE(msg.find("500"), std::string::npos);
    }
}

TEST(Fetch, TransportExceptionBecomesFetchError) {
    const Transport fake = [](const FetchRequest&) -> FetchResponse { throw std::runtime_error("no route"); };
    EXPECT_THROW(fetch_indicator("USA", "X", fake), FetchError);
    EXPECT_THROW(fetch_indicator("USA", "X", Transport{}), FetchError);
}

TEST(Fetch, DirectoryTransportServesFixtures) {
    const auto t = directory_transport(fixture_dir() / "worldbank");
    const auto pages = fetch_indicator("BRA", "NY.GDP.MKTP.KD", t);
    ASSERT_EQ(pages.size(), 2u);
    EXPECT_EQ(pages[0].records.size() + pages[1].records.size(), 5u);
    EXPECT_EQ(t(FetchRequest{"BRA", "NY.GDP.MKTP.KD", 9, 1000, {}}).status, 404);
}

TEST(DataDir, EnvironmentOverride) {
    ::unsetenv("RICE_SIM_DATA_DIR");
    EXPECT_EQ(data_dir("fallback"), fs::path("fallback"));
    ::setenv("RICE_SIM_DATA_DIR", "/tmp/rice_cache", 1);
    EXPECT_EQ(data_dir("fallback"), fs::path("/tmp/rice_cache"));
    ::unsetenv("RICE_SIM_DATA_DIR");
}
