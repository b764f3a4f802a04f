#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "charkern_cli/cli.hpp"

using nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = charkern::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(Cli, UnknownOrMissingSubcommand) {
  EXPECT_EQ(run({"frobnicate"}).code, charkern::cli::kExitUnknownCommand);
  EXPECT_EQ(run({}).code, charkern::cli::kExitUnknownCommand);
}

TEST(Cli, HelpSucceeds) { EXPECT_EQ(run({"--help"}).code, charkern::cli::kExitOk); }

TEST(Cli, VerdictFindsWitnessForConstantKernel) {
  const Invocation r = run({"verdict", "--gram", "[[1,1],[1,1]]", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["characteristic"], "no");
  EXPECT_EQ(j["witnesses"][0], json::parse("[1.0, -1.0]"));
}

TEST(Cli, GramFromFile) {
  const std::string path = write_temp("charkern_cli_gram.json", "[[1,1],[1,1]]");
  const Invocation r = run({"verdict", "--gram", path, "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["characteristic"], "no");
  EXPECT_EQ(run({"verdict", "--gram", "/nonexistent/gram.json"}).code, charkern::cli::kExitParse);
}

TEST(Cli, VerdictOnGroup) {
  const Invocation r = run({"verdict", "--gram", "[[1.5,0.5],[0.5,1.5]]", "--group", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("universal:"), std::string::npos);
  EXPECT_NE(r.out.find("yes"), std::string::npos);
}

TEST(Cli, ParseAndValidationErrors) {
  EXPECT_EQ(run({"verdict", "--gram", "[[1,1],[1"}).code, charkern::cli::kExitParse);
  EXPECT_EQ(run({"verdict", "--gram", "[[1,2],[2,1]]"}).code, charkern::cli::kExitParse);
  EXPECT_EQ(run({"verdict"}).code, charkern::cli::kExitParse);
  EXPECT_EQ(run({"group-verdict", "--moduli", "2,x", "--coeffs", "[1,1]"}).code, charkern::cli::kExitParse);
}

TEST(Cli, SpaceMismatch) {
  EXPECT_EQ(run({"group-verdict", "--moduli", "2,3", "--coeffs", "[1,1,1]"}).code, charkern::cli::kExitSpaceMismatch);
}

TEST(Cli, GroupVerdict) {
  const Invocation r = run({"group-verdict", "--moduli", "5", "--coeffs", "[0,1,1,1,1]", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["characteristic"], "yes");
  EXPECT_EQ(j["universal"], "no");
}

TEST(Cli, Spectrum) {
  const Invocation r = run({"spectrum", "--gram", "[[2,0],[0,1]]", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["lambdas"][0].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["lambdas"][1].get<double>(), 0.5, 1e-12);
}

TEST(Cli, ScoreReportsProprietyGap) {
  const std::string kernel = write_temp("charkern_cli_kernel.json",
                                        R"({"space": {"points": ["a", "b", "c"]}, "gram": [[1,0,0],[0,1,0],[0,0,1]]})");
  const std::string records = write_temp("charkern_cli_records.json", R"({"records": [
    {"id": "r1", "forecast": [0.2, 0.3, 0.5], "observation": "c", "competitor": [0.6, 0.2, 0.2]},
    {"id": "r2", "forecast": [1, 0, 0], "observation": "a"}]})");
  const Invocation r = run({"score", "--kernel", kernel, "--forecasts", records, "--json", "--simulate", "2000", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const json& r1 = j["records"][0];
  // Brier-type score: S(P, y) = 0.5 sum p^2 - p_y
  EXPECT_NEAR(r1["score"].get<double>(), 0.5 * (0.04 + 0.09 + 0.25) - 0.5, 1e-12);
  EXPECT_NEAR(r1["propriety_gap"].get<double>(), r1["half_mmd_sq"].get<double>(), 1e-12);
  EXPECT_NEAR(r1["half_mmd_sq"].get<double>(), 0.5 * (0.16 + 0.01 + 0.09), 1e-12);
  EXPECT_NEAR(r1["simulated"]["mean_gap"].get<double>(), 0.13, 6.0 * r1["simulated"]["std_error"].get<double>());
  EXPECT_NEAR(j["records"][1]["score"].get<double>(), -0.5, 1e-12);

  const std::string bad = write_temp("charkern_cli_bad.json",
                                     R"({"records": [{"forecast": [1, 0, 0], "observation": "z"}]})");
  EXPECT_EQ(run({"score", "--kernel", kernel, "--forecasts", bad}).code, charkern::cli::kExitSpaceMismatch);
}

TEST(Cli, CounterexampleVerifies) {
  const Invocation r = run({"counterexample", "--kind", "near-zero", "--group", "16", "--decay", "0.5", "--eps", "0.05", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["verification"]["passed"].get<bool>());
  EXPECT_NEAR(j["verification"]["tv"].get<double>(), 2.0, 1e-12);
  EXPECT_LE(j["verification"]["sqrt_mmd"].get<double>(), 0.05);

  const Invocation zero = run({"counterexample", "--kind", "zero", "--gram", "[[1,1,0],[1,1,0],[0,0,1]]", "--json"});
  ASSERT_EQ(zero.code, 0) << zero.err;
  EXPECT_LE(json::parse(zero.out)["verification"]["mmd_sq"].get<double>(), 1e-12);

  const Invocation flat = run({"counterexample", "--kind", "near-zero", "--group", "16", "--decay", "0.5", "--eps", "0.05",
                        "--symmetric"});
  EXPECT_NE(flat.code, 0);
}

TEST(Cli, SphereVerdictAndEmbed) {
  const Invocation v = run({"sphere-verdict", "--coeffs", R"({"d": 2, "b": [0.4, 0.3, 0.2, 0.1]})", "--tail", "positive",
                     "--json"});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(json::parse(v.out)["universal"], "yes");
  EXPECT_EQ(run({"sphere-verdict", "--coeffs", "[1, 0.5]", "--tail", "often"}).code, charkern::cli::kExitParse);

  const Invocation e = run({"sphere-embed", "--coeffs", R"({"d": 2, "b": [0.3, 0.2, 0.1, 0.1, 0.0, 0.05]})", "--n", "4",
                     "--a", "0.5", "--json"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(json::parse(e.out)["constant"].get<bool>());
}
