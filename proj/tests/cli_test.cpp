#include <greenllm/cli.hpp>

#include "test_util.hpp"

#include <sstream>

using namespace greenllm;
using greenllm::test::TempFile;
using Json = nlohmann::ordered_json;

namespace {

std::string const kFixtures = GREENLLM_FIXTURE_DIR;

struct Outcome {
    int code {};
    std::string out;
    std::string err;

    [[nodiscard]] auto json() const -> Json { return Json::parse(out); }
};

auto invoke(std::vector<std::string> args) -> Outcome
{
    std::ostringstream out;
    std::ostringstream err;
    int code = cli::run(args, out, err);
    return { code, out.str(), err.str() };
}

auto row_for(Json const& doc, std::string const& model) -> Json
{
    for (auto const& r : doc.at("rows")) {
        if (r.at("model") == model) {
            return r;
        }
    }
    return nullptr;
}

} // namespace

TEST(Cli, EstimateSimplifiedDefaults)
{
    auto r = invoke({ "--format", "json", "estimate", "--in", "100", "--out", "20", "--params-b", "7", "--pue", "1.2" });
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = r.json();
    EXPECT_NEAR(doc["rows"][0]["total_j"].get<double>(), 85.72234247849273, 1e-9);
    EXPECT_EQ(doc["meta"]["pue_source"], "flag");
    EXPECT_TRUE(doc["meta"].contains("note"));
}

TEST(Cli, EstimateZeroTokensIsZero)
{
    auto r = invoke({ "--format", "json", "estimate", "--in", "0", "--out", "0", "--params-b", "7" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["rows"][0]["total_j"].get<double>(), 0.0);
}

TEST(Cli, EstimateUsesProviderPue)
{
    auto r = invoke({ "--format", "json", "estimate", "--in", "100", "--out", "20", "--params-b", "7", "--provider", "Anthropic" });
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = r.json();
    EXPECT_EQ(doc["meta"]["pue"].get<double>(), 1.10);
    // 0.15 * 180 * sqrt(7) * 1.10 * 0.85
    EXPECT_NEAR(doc["rows"][0]["total_j"].get<double>(), 0.15 * 180 * std::sqrt(7.0) * 1.10 * 0.85, 1e-9);
}

TEST(Cli, UnknownModelWithoutSizeIsMissingEntity)
{
    auto r = invoke({ "estimate", "--in", "10", "--out", "1", "--model", "no-such-model" });
    EXPECT_EQ(r.code, cli::kExitMissing);
    EXPECT_NE(r.err.find("not-found"), std::string::npos) << r.err;
}

TEST(Cli, UnknownProviderIsMissingEntity)
{
    EXPECT_EQ(invoke({ "estimate", "--in", "10", "--out", "1", "--params-b", "7", "--provider", "Nobody" }).code, cli::kExitMissing);
}

TEST(Cli, FullFormulaAttributesPhases)
{
    auto r = invoke({ "--format", "json", "estimate", "--in", "100", "--out", "20", "--params-b", "7", "--pue", "1", "--formula", "full" });
    ASSERT_EQ(r.code, 0) << r.err;
    auto row = r.json()["rows"][0];
    EXPECT_NEAR(row["prefill_j"].get<double>() + row["decode_j"].get<double>(), row["total_j"].get<double>(), 1e-12);
}

TEST(Cli, TraceEstimate)
{
    TempFile trace("timestamp_s,power_w\n0,100\n1,200\n3,200\n");
    auto r = invoke({ "--format", "json", "estimate", "--trace", trace.path() });
    ASSERT_EQ(r.code, 0) << r.err;
    auto row = r.json()["rows"][0];
    EXPECT_NEAR(row["total_j"].get<double>(), 550.0, 1e-12);
    EXPECT_EQ(row["prefill_j"], "unattributed");

    auto server = invoke({ "--format", "json", "estimate", "--trace", trace.path(), "--server-overheads" });
    ASSERT_EQ(server.code, 0) << server.err;
    EXPECT_NEAR(server.json()["rows"][0]["total_j"].get<double>(), 825.0, 1e-9);

    TempFile bad("timestamp_s,power_w\n0,100\n0,200\n");
    EXPECT_EQ(invoke({ "estimate", "--trace", bad.path() }).code, cli::kExitSchema);
}

TEST(Cli, Roi)
{
    auto r = invoke({ "--format", "json", "roi", "--ratio", "0.5", "--target-params-b", "70" });
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = r.json();
    EXPECT_NEAR(doc["rows"][0]["roi"].get<double>(), 7.0710678118654755, 1e-12);
    EXPECT_NEAR(doc["rows"][0]["break_even_queries"].get<double>(), 0.1414213562373095, 1e-12);
    EXPECT_TRUE(doc["meta"].contains("compression_energy_note"));
    EXPECT_EQ(invoke({ "roi", "--ratio", "1.5", "--target-params-b", "70" }).code, cli::kExitPrecondition);
    EXPECT_EQ(invoke({ "roi", "--target-params-b", "70" }).code, cli::kExitUsage);
}

TEST(Cli, Carbon)
{
    auto r = invoke({ "--format", "json", "carbon", "--energy-j", "7.2e6", "--grams-per-kwh", "475" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.json()["rows"][0]["grams_co2"].get<double>(), 950.0, 1e-9);

    std::string config = GREENLLM_DATA_DIR "/calibration.ini";
    auto region = invoke({ "--format", "json", "--config", config, "carbon", "--energy-j", "3.6e6", "--region", "example-high" });
    ASSERT_EQ(region.code, 0) << region.err;
    EXPECT_NEAR(region.json()["rows"][0]["grams_co2"].get<double>(), 700.0, 1e-9);
    EXPECT_EQ(invoke({ "carbon", "--energy-j", "1", "--region", "atlantis" }).code, cli::kExitMissing);
}

TEST(Cli, GasOnFixtureLog)
{
    auto r = invoke({ "--format", "json", "gas", "--log", kFixtures + "/two_model_log.csv" });
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = r.json();
    auto gpt = row_for(doc, "gpt-4o-mini");
    auto ds = row_for(doc, "deepseek-chat");
    EXPECT_EQ(round1(gpt["gas_trial"].get<double>()), 100.0);
    EXPECT_EQ(round1(gpt["gas_success"].get<double>()), 100.0);
    EXPECT_EQ(round1(ds["gas_trial"].get<double>()), 5.8);
    EXPECT_EQ(round1(ds["gas_success"].get<double>()), 5.7);
    EXPECT_NEAR(gpt["energy_per_success_j"].get<double>(), 0.0949, 0.0005);
    EXPECT_NEAR(ds["energy_per_success_j"].get<double>(), 1.6667, 0.0005);

    auto table = invoke({ "gas", "--log", kFixtures + "/two_model_log.csv" });
    EXPECT_NE(table.out.find("5.8"), std::string::npos);
    EXPECT_NE(table.out.find("5.7"), std::string::npos);
}

TEST(Cli, OptimizeCostCornerPicksCheapModel)
{
    auto r = invoke({ "--format", "json", "optimize", "--log", kFixtures + "/two_candidates.csv", "--weights", "1,0,0" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["rows"][0]["model"], "cheap-model");

    auto q = invoke({ "--format", "json", "optimize", "--log", kFixtures + "/two_candidates.csv", "--weights", "0,0,1" });
    EXPECT_EQ(q.json()["rows"][0]["model"], "green-model");
    EXPECT_EQ(invoke({ "optimize", "--log", kFixtures + "/two_candidates.csv", "--weights", "0,0,0" }).code, cli::kExitPrecondition);
    EXPECT_EQ(invoke({ "optimize", "--log", kFixtures + "/two_candidates.csv", "--weights", "1,x,0" }).code, cli::kExitPrecondition);
}

TEST(Cli, OptimizeSweep)
{
    auto r = invoke({ "--format", "json", "optimize", "--log", kFixtures + "/two_candidates.csv", "--sweep", "3" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["rows"].size(), 6u);
}

TEST(Cli, CandidatesFromAggregateReport)
{
    auto agg = invoke({ "--format", "json", "aggregate", "--log", kFixtures + "/two_candidates.csv" });
    ASSERT_EQ(agg.code, 0) << agg.err;
    TempFile report(agg.out, ".json");
    auto pareto = invoke({ "--format", "json", "pareto", "--candidates", report.path() });
    ASSERT_EQ(pareto.code, 0) << pareto.err;
    auto rows = pareto.json()["rows"];
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0]["model"], "green-model");
    auto opt = invoke({ "--format", "json", "optimize", "--candidates", report.path(), "--weights", "1,0,0" });
    EXPECT_EQ(opt.json()["rows"][0]["model"], "cheap-model");
    EXPECT_EQ(invoke({ "pareto" }).code, cli::kExitPrecondition);
}

TEST(Cli, EmptyLogRendersValidReportButFails)
{
    for (std::string cmd : { "aggregate", "gas", "deltas", "drift" }) {
        auto r = invoke({ "--format", "json", cmd, "--log", kFixtures + "/empty_log.csv" });
        EXPECT_EQ(r.code, cli::kExitPrecondition) << cmd;
        auto doc = r.json();
        EXPECT_EQ(doc["report"], cmd);
        EXPECT_TRUE(doc["rows"].empty()) << cmd;
    }
    EXPECT_EQ(invoke({ "ingest", "--log", kFixtures + "/empty_log.csv" }).code, 0);
}

TEST(Cli, RejectedRows)
{
    TempFile log("provider,model,benchmark,compression_ratio,input_tokens,output_tokens,passed,cost_usd,run_index,energy_j\n"
                 "OpenAI,m,b,1,10,2,true,0.1,0,1.0\n"
                 "OpenAI,m,b,1.7,10,2,true,0.1,1,1.0\n"
                 "OpenAI,m,b,1,10,2,maybe,0.1,2,1.0\n");
    auto strict = invoke({ "--format", "json", "ingest", "--log", log.path() });
    EXPECT_EQ(strict.code, cli::kExitRejects);
    auto rows = strict.json()["rows"];
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0]["row"], 2);
    EXPECT_EQ(rows[1]["row"], 3);
    EXPECT_EQ(invoke({ "--allow-rejects", "aggregate", "--log", log.path() }).code, 0);
    EXPECT_EQ(invoke({ "aggregate", "--log", log.path() }).code, cli::kExitRejects);
}

TEST(Cli, SchemaErrors)
{
    TempFile log("provider,model,colour\nOpenAI,m,red\n");
    EXPECT_EQ(invoke({ "aggregate", "--log", log.path() }).code, cli::kExitSchema);
    EXPECT_EQ(invoke({ "aggregate", "--log", "/nonexistent/log.csv" }).code, cli::kExitSchema);
    EXPECT_EQ(invoke({ "--registry", "/nonexistent/providers.ini", "carbon", "--energy-j", "1", "--grams-per-kwh", "1" }).code,
        cli::kExitSchema);
}

TEST(Cli, IngestRecordsCsvRoundTrip)
{
    auto r = invoke({ "--format", "csv", "ingest", "--records", "--log", kFixtures + "/two_candidates.csv" });
    ASSERT_EQ(r.code, 0) << r.err;
    TempFile again(r.out);
    auto second = invoke({ "--format", "csv", "ingest", "--records", "--log", again.path() });
    ASSERT_EQ(second.code, 0) << second.err;
    EXPECT_EQ(second.out, r.out);
}

TEST(Cli, JsonOutputIsByteIdenticalAcrossRuns)
{
    std::vector<std::string> args { "--format", "json", "aggregate", "--log", kFixtures + "/two_model_log.csv" };
    auto a = invoke(args);
    auto b = invoke(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
}

TEST(Cli, DeltasAndMissingBaseline)
{
    TempFile log("provider,model,benchmark,compression_ratio,input_tokens,output_tokens,passed,cost_usd,run_index,energy_j\n"
                 "DeepSeek,d,b,1,10,2,true,0.1,0,0.1134\n"
                 "DeepSeek,d,b,0.5,10,2,true,0.1,1,2.54\n");
    auto r = invoke({ "--format", "json", "deltas", "--log", log.path() });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.json()["rows"][0]["delta_energy_pct"].get<double>(), 2139.8589, 1e-3);

    TempFile no_base("provider,model,benchmark,compression_ratio,input_tokens,output_tokens,passed,cost_usd,run_index,energy_j\n"
                     "DeepSeek,d,b,0.5,10,2,true,0.1,1,2.54\n");
    auto missing = invoke({ "deltas", "--log", no_base.path() });
    EXPECT_EQ(missing.code, cli::kExitMissing);
    EXPECT_NE(missing.err.find("'d'"), std::string::npos) << missing.err;
}

TEST(Cli, DriftIsSeedDeterministic)
{
    std::vector<std::string> args { "--format", "json", "--seed", "5", "drift", "--log", kFixtures + "/two_model_log.csv", "--permutations", "200" };
    auto a = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, invoke(args).out);
    EXPECT_EQ(a.json()["rows"][0]["seed"], 5);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(invoke({ "frobnicate" }).code, cli::kExitUsage);
    EXPECT_EQ(invoke({ "estimate", "--in", "abc" }).code, cli::kExitUsage);
    EXPECT_EQ(invoke({ "--format", "yaml", "carbon", "--energy-j", "1", "--grams-per-kwh", "1" }).code, cli::kExitPrecondition);
    EXPECT_EQ(invoke({ "--help" }).code, 0);
}

TEST(Cli, OutputFileOption)
{
    TempFile target("");
    auto r = invoke({ "--format", "csv", "--output", target.path(), "carbon", "--energy-j", "3.6e6", "--grams-per-kwh", "100" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(target.path());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "region,grams_per_kwh,energy_j,energy_kwh,grams_co2");
}
