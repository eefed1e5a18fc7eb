#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "crtmap/cli.hpp"

using namespace crtmap;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("crtmap_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::dispatch(std::move(args), out_, err_);
  }

  // the real executable, for exit codes as seen by a shell
  int shell(const std::string& args) const {
    const std::string cmd = std::string(CRTMAP_CLI_PATH) + " " + args + " > " + path("stdout.txt") + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST(Io, ExcursionRoundTrip) {
  const auto e = sample_dyck_excursion(50, 4);
  io::RunHeader h;
  h.seed = 4;
  const auto j = io::excursion_to_json(e, h);
  EXPECT_EQ(j["format_version"], io::format_version);
  const auto back = io::excursion_from_json(j);
  EXPECT_EQ(back.heights, e.heights);
  EXPECT_EQ(back.seed, 4u);
}

TEST(Io, ExcursionRejectsBadInput) {
  io::RunHeader h;
  auto j = io::excursion_to_json(sample_dyck_excursion(5, 1), h);
  auto wrong = j;
  wrong["format_version"] = 99;
  EXPECT_THROW(io::excursion_from_json(wrong), std::runtime_error);
  wrong = j;
  wrong["steps"][0] = -1;
  EXPECT_THROW(io::excursion_from_json(wrong), std::invalid_argument);
}

TEST(Io, LabelsRoundTrip) {
  const auto tree = build_circle_tree(sample_dyck_excursion(40, 2));
  const auto z = sample_labels(tree, IncrementLaw::plus_minus_one, 9);
  const auto back = io::labels_from_json(io::labels_to_json(z, {}));
  EXPECT_EQ(back.values, z.values);
  EXPECT_EQ(back.law, IncrementLaw::plus_minus_one);
}

TEST(Io, MapRoundTrip) {
  const auto map = sample_2k_angulation(40, 3, 5);
  const auto back = io::map_from_json(io::map_to_json(map, {}));
  EXPECT_EQ(canonical_code(back), canonical_code(map));
  auto j = io::map_to_json(map, {});
  j["next"][0] = j["next"][1];
  EXPECT_THROW(io::map_from_json(j), std::exception);
}

TEST(Io, DistanceRowsRoundTrip) {
  const auto file = (fs::temp_directory_path() / ("crtmap_rows_" + std::to_string(::getpid()))).string();
  const std::vector<std::vector<std::int64_t>> rows{{0, 3, -2, std::int64_t{1} << 40}, {7, 7, 7, 7}};
  io::write_distance_rows(file, rows, io::Json{{"N", 4}});
  const auto flat = io::read_distance_rows(file);
  EXPECT_EQ(flat, (std::vector<std::int64_t>{0, 3, -2, std::int64_t{1} << 40, 7, 7, 7, 7}));
  EXPECT_EQ(io::read_json(file + ".json")["N"], 4);
  fs::remove(file);
  fs::remove(file + ".json");
}

TEST(Io, MissingFileNamesPath) {
  try {
    io::read_text("/nonexistent/crtmap/file.json");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/crtmap/file.json"), std::string::npos);
  }
}

TEST(Range, Parsing) {
  EXPECT_EQ(cli::parse_range("0..9").values().size(), 10u);
  EXPECT_EQ(cli::parse_range("5").values(), (std::vector<std::int64_t>{5}));
  EXPECT_THROW(cli::parse_range("3..1"), CLI::ValidationError);
  EXPECT_THROW(cli::parse_range("a..b"), CLI::ValidationError);
  EXPECT_THROW(cli::parse_range("1..2x"), CLI::ValidationError);
}

TEST_F(CliTest, SampleExcursionIdempotent) {
  ASSERT_EQ(run({"sample-excursion", "--n", "4", "--seed", "7", "--out", path("a.json")}), 0);
  const std::string first = io::read_text(path("a.json"));
  ASSERT_EQ(run({"sample-excursion", "--n", "4", "--seed", "7", "--out", path("a.json")}), 0);
  EXPECT_EQ(io::read_text(path("a.json")), first);
  const auto j = io::read_json(path("a.json"));
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["steps"].size(), 8u);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["config"]["command"], "sample-excursion");
  EXPECT_EQ(j["config"]["n"], "4");
}

TEST_F(CliTest, VerifyPasses) {
  EXPECT_EQ(run({"verify", "--n", "256", "--seeds", "0..9"}), 0) << out_.str();
  EXPECT_NE(out_.str().find("quadrangulation"), std::string::npos);
}

TEST_F(CliTest, DimensionCsv) {
  ASSERT_EQ(run({"dim", "--target", "lamination", "--n", "65536", "--seed", "3", "--scales", "3..9", "--out",
                 path("dim.csv")}),
            0)
      << err_.str();
  std::istringstream in(io::read_text(path("dim.csv")));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  ASSERT_EQ(lines.size(), 9u);  // header, 7 scales, slope
  EXPECT_EQ(lines[0], "scale,count");
  EXPECT_EQ(lines.back().rfind("slope,", 0), 0u);
}

TEST_F(CliTest, ByteIdenticalReruns) {
  const std::string base = path("r");
  const std::vector<std::vector<std::string>> runs = {
      {"lamination", "--n", "300", "--seed", "5", "--out", base + ".csv"},
      {"render", "--n", "300", "--seed", "5", "--model", "poincare", "--out", base + ".svg"},
      {"brownian-map", "--n", "300", "--seed", "5", "--samples", "64", "--out", base + ".bin"},
      {"sample-map", "--n", "300", "--k", "3", "--seed", "5", "--out", base + ".map.json"},
  };
  const std::vector<std::string> files = {".csv", ".svg", ".bin", ".bin.json", ".map.json"};
  std::vector<std::string> first;
  for (const auto& args : runs) ASSERT_EQ(run(args), 0) << err_.str();
  for (const auto& ext : files) first.push_back(io::read_text(base + ext));
  for (const auto& args : runs) ASSERT_EQ(run(args), 0) << err_.str();
  for (std::size_t i = 0; i < files.size(); ++i) EXPECT_EQ(io::read_text(base + files[i]), first[i]) << files[i];
}

TEST_F(CliTest, HeaderEmbedded) {
  ASSERT_EQ(run({"lamination", "--n", "50", "--seed", "2", "--out", path("l.csv")}), 0);
  const std::string text = io::read_text(path("l.csv"));
  ASSERT_EQ(text.rfind("# ", 0), 0u);
  const auto header = io::Json::parse(text.substr(2, text.find('\n') - 2));
  EXPECT_EQ(header["format_version"], io::format_version);
  EXPECT_EQ(header["seed"], 2);
  EXPECT_EQ(header["config"]["command"], "lamination");
}

TEST_F(CliTest, ConfigPrecedence) {
  io::write_text(path("c.json"), R"({"n": 6, "seed": 11})");
  ASSERT_EQ(run({"sample-excursion", "--config", path("c.json"), "--seed", "3", "--out", path("e.json")}), 0)
      << err_.str();
  const auto j = io::read_json(path("e.json"));
  EXPECT_EQ(j["n"], 6);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(io::excursion_from_json(j).heights, sample_dyck_excursion(6, 3).heights);
}

TEST_F(CliTest, BrownianMapSidecar) {
  ASSERT_EQ(run({"brownian-map", "--n", "512", "--seed", "1", "--samples", "100", "--source", "3", "--out",
                 path("d.bin")}),
            0)
      << err_.str();
  const auto row = io::read_distance_rows(path("d.bin"));
  ASSERT_EQ(row.size(), 100u);
  EXPECT_EQ(row[3], 0);
  const auto side = io::read_json(path("d.bin.json"));
  EXPECT_EQ(side["N"], 100);
  EXPECT_EQ(side["dtype"], "int64-le");
}

TEST_F(CliTest, LabelsOut) {
  ASSERT_EQ(run({"sample-excursion", "--n", "30", "--seed", "2", "--law", "pm1", "--out", path("e.json"),
                 "--labels-out", path("z.json")}),
            0);
  const auto z = io::labels_from_json(io::read_json(path("z.json")));
  EXPECT_EQ(z.values.size(), 61u);
  EXPECT_EQ(z.law, IncrementLaw::plus_minus_one);
}

TEST_F(CliTest, BottleneckCsv) {
  ASSERT_EQ(run({"bottleneck", "--n", "200", "--seeds", "0..2", "--out", path("b.csv")}), 0) << err_.str();
  const std::string text = io::read_text(path("b.csv"));
  EXPECT_NE(text.find("n,seed,cycles_found\n"), std::string::npos);
  EXPECT_NE(text.find("\n200,2,"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(shell("sample-excursion --n 4 --bogus 1 --out " + path("e.json")), 2);
  EXPECT_EQ(shell("sample-excursion --seed 1 --out " + path("e.json")), 2);
  EXPECT_EQ(shell("sample-excursion --n 4 --out " + path("e.json") + " --law cubic"), 2);
  EXPECT_EQ(shell("dim --n 64 --scales 9..3 --out " + path("d.csv")), 2);
  EXPECT_EQ(shell("frobnicate"), 2);
  EXPECT_EQ(shell("--help"), 0);
  EXPECT_EQ(shell("tree --in /nonexistent.json --out " + path("t.json")), 1);
  EXPECT_EQ(shell("sample-excursion --n 4 --seed 7 --out " + path("e.json")), 0);
}
