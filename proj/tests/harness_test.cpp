#include "bornwalk/harness.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bornwalk/error.hpp"
#include "bornwalk/stats.hpp"
#include "oracles.hpp"

namespace bornwalk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Scenario single_packet(Vec3 center, std::vector<Cell> cells) {
  Scenario s{.array = DetectorArray(std::move(cells)),
             .wave = WaveFunction({GaussianPacket{center, {0.5, 0.5, 0.5}, {0, 0, 0}, {1, 0}}})};
  s.walks = 2000;
  s.master_seed = 3;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Scenario, PacketInsideOneCell) {
  const Scenario s = single_packet({0, 0, 6}, {{-10, 10, -10, 10}, {20, 30, -10, 10}});
  const ScenarioReport r = run_scenario(s);
  EXPECT_GT(r.expected[0], 1 - 1e-12);
  EXPECT_GT(r.ensemble.freq[0], 0.999);
}

TEST(Scenario, SymmetricTwoCells) {
  Scenario s = single_packet({0, 0, 6}, {{-kInf, 0, -kInf, kInf}, {0, kInf, -kInf, kInf}});
  s.walks = 20'000;
  const ScenarioReport r = run_scenario(s);
  EXPECT_NEAR(r.expected[0], 0.5, 1e-12);
  EXPECT_NEAR(r.expected[1], 0.5, 1e-12);
  EXPECT_LT(r.expected[2], 1e-12);
  EXPECT_NEAR(r.ensemble.freq[0], 0.5, 3 * binomial_se(0.5, s.walks));
}

TEST(TwoSlit, GeometryAndSymmetry) {
  const Scenario s = two_slit(4, 1, 0, 8, 4);
  EXPECT_EQ(s.array.region_count(), 9u);
  EXPECT_TRUE(validate(s.array).empty());
  const SimplexPoint a = born_weights(s.wave, s.array, s.quadrature);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a[i], a[7 - i], 1e-9) << i;
}

TEST(TwoSlit, CoincidentPacketsActLikeOne) {
  const Scenario s = two_slit(0, 1, 0, 8, 4);
  GaussianPacket p{{0, 0, 8}, {1, 1, 1}, {0, 0, 0}, {1, 0}};
  const auto expected = testing::erf_single_packet_weights(p, s.array);
  const SimplexPoint a = born_weights(s.wave, s.array, s.quadrature);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], expected[i], 1e-8) << i;
}

TEST(TwoSlit, AntisymmetricSuppressesCenter) {
  const Scenario sym = two_slit(2, 1, 0, 8, 4);
  const Scenario anti = two_slit(2, 1, 0, 8, 4, {-1, 0});
  // Unnormalized: the odd combination has a node at x = 0.
  const auto a = region_masses(sym.wave, sym.array, sym.quadrature);
  const auto b = region_masses(anti.wave, anti.array, anti.quadrature);
  EXPECT_LT(b[3] + b[4], 0.25 * (a[3] + a[4]));
  EXPECT_GT(b[0] + b[7], 0.5 * (a[0] + a[7]));
}

TEST(TwoSlit, BadParameters) {
  EXPECT_THROW(two_slit(-1, 1, 0, 8, 4), Error);
  EXPECT_THROW(two_slit(4, 0, 0, 8, 4), Error);
  EXPECT_THROW(two_slit(4, 1, 0, 1, 4), Error);
  EXPECT_THROW(two_slit(4, 1, 0, 8, 0), Error);
}

// End to end: walk frequencies land within 3 binomial standard errors of the
// Born weights.
TEST(TwoSlit, EnsembleMatchesBornWeights) {
  Scenario s = two_slit(4, 1, 0, 8, 4);
  s.walks = 10'000;
  s.master_seed = 11;
  const ScenarioReport r = run_scenario(s);
  EXPECT_EQ(r.ensemble.unabsorbed, 0u);
  for (std::size_t i = 0; i < r.expected.size(); ++i) {
    EXPECT_TRUE(r.within_band[i]) << i << ": " << r.ensemble.freq[i] << " vs " << r.expected[i];
  }
  ASSERT_TRUE(r.ensemble.p_value);
  EXPECT_GT(*r.ensemble.p_value, 1e-3);
}

TEST(Report, DigestsAndReproducibility) {
  Scenario s = two_slit(3, 1, 1.5, 6, 3);
  s.walks = 3000;
  s.master_seed = 5;
  const ScenarioReport r1 = run_scenario(s, 1);
  const ScenarioReport r2 = run_scenario(s, 3);
  EXPECT_EQ(dump(to_json(r1)), dump(to_json(r2)));
  EXPECT_EQ(r1.weights_digest, weights_digest(born_weights(s.wave, s.array, s.quadrature)));
  EXPECT_EQ(r1.weights_digest.size(), 64u);

  const auto dir = std::filesystem::temp_directory_path() / "bornwalk_harness_test";
  std::filesystem::remove_all(dir);
  const auto files = write_scenario_artifacts(s, r1, dir);
  EXPECT_EQ(files.size(), 4u);
  const Json manifest = Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["files"]["report.json"], sha256_hex(slurp(dir / "report.json")));
  EXPECT_EQ(manifest["weights_digest"], r1.weights_digest);
  EXPECT_EQ(slurp(dir / "report.json"), dump(to_json(r1)));
  std::filesystem::remove_all(dir);
}

TEST(ScenarioJson, RoundTrip) {
  Scenario s = two_slit(4, 1, 0, 8, 4);
  s.kernel = DirichletMix{3, 0.25};
  s.walks = 123;
  const Scenario back = scenario_from_json(Json::parse(dump(to_json(s))));
  EXPECT_EQ(dump(to_json(back)), dump(to_json(s)));
}

TEST(ScenarioJson, ErrorsNameTheField) {
  const Json base = to_json(two_slit(4, 1, 0, 8, 4));
  auto message_for = [](const Json& j) {
    try {
      scenario_from_json(j);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  Json j = base;
  j.erase("wave");
  EXPECT_NE(message_for(j).find("scenario.wave"), std::string::npos);
  j = base;
  j["wave"]["packets"][1]["sigma"][2] = -1.0;
  EXPECT_NE(message_for(j).find("scenario.wave.packets[1]"), std::string::npos);
  j = base;
  j["walks"] = 0;
  EXPECT_NE(message_for(j).find("scenario.walks"), std::string::npos);
  j = base;
  j["kernel"] = "pair:0.9";
  EXPECT_NE(message_for(j).find("scenario.kernel"), std::string::npos);
}

TEST(BlockCheck, StanzaPreservesWeights) {
  Scenario s = two_slit(4, 1, 0, 4, 3);
  s.walks = 1000;
  std::mt19937_64 rng(8);
  Json stanza = {{"dims", {{"m", 3}, {"d", {1, 2, 1, 2, 1}}}}, {"times", {0.1, 1.0, 5.0}}};
  Json blocks = Json::array();
  for (int i = 0; i < 5; ++i) blocks.push_back(matrix_to_json(testing::random_hermitian(3, rng)));
  stanza["apparatus_blocks"] = blocks;
  Json j = to_json(s);
  j["block_check"] = stanza;
  const ScenarioReport r = run_scenario(scenario_from_json(j));
  ASSERT_TRUE(r.block_check);
  EXPECT_TRUE(r.block_check->form_ok);
  EXPECT_EQ(r.block_check->subsets_checked, 32u);
  EXPECT_EQ(r.block_check->subsets_failing, 0u);
  EXPECT_LT(r.block_check->max_simplex_drift, 1e-10);

  stanza["dims"]["d"] = {1, 1};
  j["block_check"] = stanza;
  EXPECT_THROW(scenario_from_json(j), Error);
}

}  // namespace
}  // namespace bornwalk
