#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "sphens/compensated.hpp"
#include "sphens/errors.hpp"
#include "sphens/point_io.hpp"
#include "sphens/rng.hpp"
#include "testkit.hpp"

using namespace sphens;

// ---------------------------------------------------------------- point files

TEST(PointIo, CsvRoundTripIsBitExact) {
  Rng rng(5);
  const auto pts = testkit::random_points(rng, 50);
  std::stringstream ss;
  write_points_csv(ss, pts);
  EXPECT_EQ(ss.str().substr(0, 6), "x,y,z\n");
  const auto back = read_points_csv(ss);
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(back[i].coords(), pts[i].coords());
}

TEST(PointIo, JsonRoundTripIsBitExact) {
  Rng rng(6);
  const auto pts = testkit::random_points(rng, 20);
  std::stringstream ss;
  write_points_json(ss, pts);
  const auto doc = nlohmann::json::parse(ss.str());
  ASSERT_TRUE(doc.is_array());
  EXPECT_EQ(doc.size(), 20u);
  std::stringstream in(ss.str());
  const auto back = read_points_json(in);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(back[i].coords(), pts[i].coords());
}

TEST(PointIo, RejectsNonUnitRows) {
  std::stringstream bad("x,y,z\n1.00001,0,0\n");
  EXPECT_THROW(read_points_csv(bad), IoError);
  std::stringstream ok("x,y,z\n1.0000005,0,0\n");
  EXPECT_EQ(read_points_csv(ok).size(), 1u);
  std::stringstream bad_json("[[0, 0, 0.5]]");
  EXPECT_THROW(read_points_json(bad_json), IoError);
}

TEST(PointIo, RejectsMalformedInput) {
  std::stringstream no_header("1,0,0\n");
  EXPECT_THROW(read_points_csv(no_header), IoError);
  std::stringstream short_row("x,y,z\n1,0\n");
  EXPECT_THROW(read_points_csv(short_row), IoError);
  std::stringstream junk("x,y,z\n1,zero,0\n");
  EXPECT_THROW(read_points_csv(junk), IoError);
  std::stringstream not_array("{\"a\": 1}");
  EXPECT_THROW(read_points_json(not_array), IoError);
  EXPECT_THROW(load_points("/nonexistent/dir/points.csv"), IoError);
}

TEST(PointIo, FormatFollowsExtension) {
  EXPECT_EQ(format_for_path("a/b.json"), PointFormat::Json);
  EXPECT_EQ(format_for_path("a/b.csv"), PointFormat::Csv);
  EXPECT_EQ(format_for_path("noext"), PointFormat::Csv);
}

TEST(PointIo, SaveLoadAndManifest) {
  const auto dir = testkit::temp_dir("io");
  Rng rng(7);
  const Configuration config(testkit::random_points(rng, 5), "dpp", 42);
  for (const char* name : {"pts.csv", "pts.json"}) {
    const auto path = dir / name;
    save_points(path, config.points());
    const auto back = load_points(path);
    ASSERT_EQ(back.size(), 5u);
    EXPECT_EQ(back[3].coords(), config[3].coords());
  }
  const auto manifest_path = write_sample_manifest(dir / "pts.csv", config);
  EXPECT_EQ(manifest_path, dir / "pts.csv.manifest.json");
  std::ifstream in(manifest_path);
  const auto m = nlohmann::json::parse(in);
  EXPECT_EQ(m["sampler"], "dpp");
  EXPECT_EQ(m["n"], 5);
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["software_version"], software_version());
  std::filesystem::remove_all(dir);
}

// ----------------------------------------------------------------------- rng

// Published SplitMix64 outputs for state 0.
TEST(Rng, MatchesSplitMixReferenceStream) {
  Rng rng(0);
  EXPECT_EQ(rng(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng(), 0x06c45d188009454fULL);
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, MixSeedFollowsDocumentedChain) {
  const std::uint64_t base = 1009, n = 1024, r = 17;
  std::uint64_t h = mix64(base);
  h = mix64(h ^ 2ULL);
  h = mix64(h ^ n);
  h = mix64(h ^ r);
  EXPECT_EQ(mix_seed(base, SeedTag::Dpp, n, r), h);
  EXPECT_NE(mix_seed(base, SeedTag::Matrix, n, r), mix_seed(base, SeedTag::Iid, n, r));
  EXPECT_NE(mix_seed(base, SeedTag::Matrix, n, r), mix_seed(base, SeedTag::Matrix, n, r + 1));
}

TEST(Rng, UniformRange) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_pos();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

struct Moments {
  double mean, var;
};

template <typename Draw>
Moments moments(Draw&& draw, int count) {
  CompensatedSum s, s2;
  for (int i = 0; i < count; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double m = s.value() / count;
  return {m, s2.value() / count - m * m};
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  const auto m = moments([&] { return rng.normal(); }, 400000);
  EXPECT_NEAR(m.mean, 0.0, 0.01);
  EXPECT_NEAR(m.var, 1.0, 0.01);
}

TEST(Rng, GammaMoments) {
  for (double shape : {0.3, 1.0, 2.5, 17.0}) {
    Rng rng(3);
    const auto m = moments([&] { return rng.gamma(shape); }, 200000);
    EXPECT_NEAR(m.mean / shape, 1.0, 0.02) << "shape " << shape;
    EXPECT_NEAR(m.var / shape, 1.0, 0.05) << "shape " << shape;
  }
}

TEST(Rng, BetaAndBetaPrimeMeans) {
  Rng rng(4);
  const auto b = moments([&] { return rng.beta(2.0, 3.0); }, 200000);
  EXPECT_NEAR(b.mean, 0.4, 0.005);
  // BetaPrime(a, b) has mean a / (b - 1) for b > 1.
  const auto bp = moments([&] { return rng.beta_prime(2.0, 5.0); }, 200000);
  EXPECT_NEAR(bp.mean, 0.5, 0.01);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(CompensatedSum, RecoversCancellation) {
  CompensatedSum s;
  s += 1e16;
  s += 1.0;
  s += -1e16;
  EXPECT_EQ(s.value(), 1.0);
  CompensatedSum a, b;
  a += 0.1;
  b += 0.2;
  a.merge(b);
  EXPECT_NEAR(a.value(), 0.3, 1e-16);
}
