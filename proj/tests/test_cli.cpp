#include <bit>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "tapered/cli.hpp"
#include "tapered/frame.hpp"

using namespace tapered;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override
  {
    dir_ = std::filesystem::temp_directory_path() /
           ("tapered_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

const std::vector<std::string> kSmallScene{"--width", "40", "--height", "40", "--radius", "15"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b)
{
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST(CliHelpers, FormatDoubleRoundTrips)
{
  for (double x : {0.0, -0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 5e-324}) {
    const auto s = cli::format_double(x);
    double back = 1.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back), std::bit_cast<std::uint64_t>(x)) << s;
  }
  EXPECT_EQ(cli::format_double(0.1), "0.1");
}

TEST(CliHelpers, ParseNorms)
{
  EXPECT_EQ(cli::parse_norms("3..6"), (std::vector<int>{3, 4, 5, 6}));
  EXPECT_EQ(cli::parse_norms("1,32,255"), (std::vector<int>{1, 32, 255}));
  EXPECT_EQ(cli::parse_norms("7"), (std::vector<int>{7}));
  EXPECT_EQ(cli::parse_norms("1..255").size(), 255u);
  EXPECT_THROW(cli::parse_norms("0..4"), std::invalid_argument);
  EXPECT_THROW(cli::parse_norms("256"), std::invalid_argument);
  EXPECT_THROW(cli::parse_norms("5..2"), std::invalid_argument);
  EXPECT_THROW(cli::parse_norms("a"), std::invalid_argument);
  EXPECT_THROW(cli::parse_norms("1,,2"), std::invalid_argument);
}

TEST_F(CliTest, GenWritesFramesAndChecksums)
{
  const auto r = run({"gen", "--out", path("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "frame_0000.pgm 0e2e44f2de831f09\nframe_0001.pgm d75bbb2afcbb7403\n");
  EXPECT_EQ(frame_checksum(read_pgm_file(path("g/frame_0001.pgm"))), 0xd75bbb2afcbb7403ull);

  const auto still = run({"gen", "--out", path("s"), "--angle", "0", "--frames", "3"});
  ASSERT_EQ(still.code, 0);
  std::istringstream lines(still.out);
  std::string name, sum, first;
  int n = 0;
  while (lines >> name >> sum) {
    if (n++ == 0) first = sum;
    EXPECT_EQ(sum, first);
  }
  EXPECT_EQ(n, 3);
  EXPECT_EQ(run({"gen", "--out", path("bad"), "--radius", "150"}).code, cli::kUsage);
}

TEST_F(CliTest, FlowCsvReparsesExactly)
{
  for (const char* fmt : {"reference", "posit:16,2", "float16", "q16"}) {
    const auto r = run(with({"flow", "--format", fmt, "--norm", "2", "--out", path("f.csv")}, kSmallScene));
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path("f.csv"));
    const auto parsed = cli::parse_flow_csv(in);

    SphereSceneParams p;
    p.width = p.height = 40;
    p.radius = 15;
    const auto s = gen_sphere(p);
    const auto direct = flow_any(s[0], s[1], 2, {}, parse_format(fmt));
    ASSERT_EQ(parsed.width(), 40);
    ASSERT_EQ(parsed.height(), 40);
    EXPECT_TRUE((parsed.status == direct.status).all()) << fmt;
    for (Eigen::Index i = 0; i < direct.u.size(); ++i) {
      if (std::isnan(direct.u.data()[i])) {
        EXPECT_TRUE(std::isnan(parsed.u.data()[i]));
        continue;
      }
      ASSERT_EQ(std::bit_cast<std::uint64_t>(parsed.u.data()[i]), std::bit_cast<std::uint64_t>(direct.u.data()[i]));
      ASSERT_EQ(std::bit_cast<std::uint64_t>(parsed.v.data()[i]), std::bit_cast<std::uint64_t>(direct.v.data()[i]));
    }
  }
}

TEST_F(CliTest, FlowIdenticalInputsGiveZeroFlow)
{
  ASSERT_EQ(run(with({"gen", "--out", path("g"), "--angle", "0"}, kSmallScene)).code, 0);
  const auto r = run({"flow", path("g/frame_0000.pgm"), path("g/frame_0001.pgm"), "--format", "posit:16,2", "--norm",
                      "16", "--out", path("f.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("f.csv"));
  const auto f = cli::parse_flow_csv(in);
  EXPECT_TRUE((f.u == 0.0).all());
  EXPECT_TRUE((f.v == 0.0).all());
}

TEST_F(CliTest, Q16SummaryCarriesOverflowCount)
{
  const auto r = run(with({"flow", "--format", "q16", "--norm", "1", "--out", path("f.csv")}, kSmallScene));
  ASSERT_EQ(r.code, 0);
  const auto line = r.out.substr(0, r.out.find('\n'));
  EXPECT_NE(line.find("format=q16"), std::string::npos) << line;
  EXPECT_NE(line.find(" overflows="), std::string::npos) << line;
  const auto p = run(with({"flow", "--format", "posit:16,2", "--out", path("f.csv")}, kSmallScene));
  EXPECT_EQ(p.out.find("overflows"), std::string::npos);
}

TEST_F(CliTest, FlowHeatmap)
{
  const auto r = run(with({"flow", "--format", "float16", "--norm", "64", "--out", path("f.csv"), "--heatmap",
                           path("h.csv")},
                          kSmallScene));
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("h.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x,y,err_u,err_v,exception");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 1600);
}

TEST_F(CliTest, SweepSingleNormAndReference)
{
  const auto one = run(with({"sweep", "--format", "posit:16,2", "--norms", "9"}, kSmallScene));
  ASSERT_EQ(one.code, 0) << one.err;
  std::istringstream in(one.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "norm,max,rms,std,exceptions,singulars");
  EXPECT_EQ(lines[1].substr(0, 2), "9,");
  EXPECT_EQ(lines[2], "# best_norm=9");

  const auto ref = run(with({"sweep", "--format", "reference", "--norms", "1,2,255", "--out", path("s.csv")},
                            kSmallScene));
  ASSERT_EQ(ref.code, 0);
  EXPECT_EQ(ref.out, "best_norm=1\n");
  std::ifstream csv(path("s.csv"));
  std::string l;
  std::getline(csv, l);
  while (std::getline(csv, l)) EXPECT_NE(l.find(",0,0,0,0,"), std::string::npos) << l;
}

TEST_F(CliTest, SweepFloat16SmallNormsHaveExceptions)
{
  const auto r = run({"sweep", "--format", "float16", "--norms", "1..8", "--out", path("s.csv")});
  ASSERT_EQ(r.code, 0);
  std::ifstream csv(path("s.csv"));
  std::string l;
  std::getline(csv, l);
  int rows = 0;
  while (std::getline(csv, l)) {
    ++rows;
    // exceptions is the fifth column
    std::istringstream fields(l);
    std::string f;
    for (int i = 0; i < 5; ++i) std::getline(fields, f, ',');
    EXPECT_GT(std::stoull(f), 0u) << l;
  }
  EXPECT_EQ(rows, 8);
}

TEST_F(CliTest, HistConstantFramesOneBinadePlusZero)
{
  Frame f(12, 12);
  f.pixels.fill(100);
  write_pgm_file(path("a.pgm"), f);
  const auto r = run({"hist", path("a.pgm"), path("a.pgm"), "--norm", "1", "--out", path("h.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(path("h.csv"));
  std::string header, zero;
  std::getline(csv, header);
  std::getline(csv, zero);
  EXPECT_EQ(header, "binade,data,posit16_2,posit16_1,float16");
  EXPECT_EQ(zero, "zero,1,0,0,0");
  // Only the quotient 100/1 is nonzero; it sits in [64, 128).
  std::map<int, std::size_t> data;
  for (std::string l; std::getline(csv, l);) {
    const auto n = std::stoull(l.substr(l.find(',') + 1));
    if (n > 0) data[std::stoi(l)] = n;
  }
  EXPECT_EQ(data, (std::map<int, std::size_t>{{6, 1}}));
  EXPECT_NE(r.out.find("coverage float16="), std::string::npos);

  // Census columns do not depend on the input.
  const auto a = run(with({"hist", "--norm", "4"}, kSmallScene));
  const auto b = run({"hist", path("a.pgm"), path("a.pgm"), "--norm", "4"});
  auto census = [](const std::string& s) {
    std::istringstream in(s);
    std::map<std::string, std::string> m;
    for (std::string l; std::getline(in, l);) {
      if (l[0] == '#' || l.rfind("binade", 0) == 0 || l.rfind("zero", 0) == 0) continue;
      const auto c1 = l.find(',');
      const auto c2 = l.find(',', c1 + 1);
      m[l.substr(0, c1)] = l.substr(c2 + 1);
    }
    return m;
  };
  const auto ca = census(a.out);
  for (const auto& [binade, cols] : census(b.out)) {
    if (ca.count(binade)) EXPECT_EQ(ca.at(binade), cols) << binade;
  }
}

TEST_F(CliTest, VerifyModesAndExitCodes)
{
  const auto e = run({"verify", "--format", "posit:8,0", "--mode", "exhaustive"});
  EXPECT_EQ(e.code, 0) << e.out;
  EXPECT_NE(e.out.find("checked=262144 mismatches=0 PASS"), std::string::npos) << e.out;
  const auto b = run({"verify", "--format", "float16", "--mode", "basis", "--out", path("v.csv")});
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(run({"verify", "--format", "q16"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--format", "posit:16,2", "--mode", "exhaustive"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--format", "float16", "--mode", "exhaustive"}).code, cli::kUsage);

  const std::vector<std::string> sampled{"verify", "--format", "posit:16,2", "--samples", "20000", "--seed", "9"};
  const auto s1 = run(sampled);
  EXPECT_EQ(s1.code, 0);
  EXPECT_EQ(s1.out, run(sampled).out);
}

TEST_F(CliTest, UsageAndParseErrors)
{
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"flow", "--format", "bfloat16"}).code, cli::kUsage);
  EXPECT_EQ(run({"flow", "--norm", "0"}).code, cli::kUsage);
  EXPECT_EQ(run({"sweep", "--norms", "0..3"}).code, cli::kUsage);
  EXPECT_EQ(run({"flow", "--window", "-1"}).code, cli::kUsage);
  EXPECT_EQ(run({"flow", "--norm", "x"}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, 0);

  std::ofstream(path("bad.pgm"), std::ios::binary) << "P6 2 2 255\n....";
  const auto bad = run({"flow", path("bad.pgm"), path("bad.pgm")});
  EXPECT_EQ(bad.code, cli::kInputParse);
  EXPECT_NE(bad.err.find("offset 0"), std::string::npos) << bad.err;
  EXPECT_EQ(run({"flow", path("missing.pgm"), path("missing.pgm")}).code, cli::kInputParse);

  Frame a(5, 5), b(6, 5);
  write_pgm_file(path("a.pgm"), a);
  write_pgm_file(path("b.pgm"), b);
  EXPECT_EQ(run({"flow", path("a.pgm"), path("b.pgm")}).code, cli::kInputParse);
}

TEST_F(CliTest, DeterministicAcrossRunsAndThreads)
{
  const std::vector<std::vector<std::string>> commands{
      with({"flow", "--format", "posit:16,2", "--norm", "5"}, kSmallScene),
      with({"flow", "--format", "float16", "--norm", "1"}, kSmallScene),
      with({"flow", "--format", "q16", "--norm", "3"}, kSmallScene),
      with({"sweep", "--format", "float16", "--norms", "1..6"}, kSmallScene),
      with({"hist", "--norm", "8"}, kSmallScene),
  };
  for (const auto& c : commands) {
    const auto once = run(with(c, {"--out", path("a.csv")}));
    ASSERT_EQ(once.code, 0) << once.err;
    const auto twice = run(with(c, {"--out", path("b.csv"), "--threads", "3"}));
    ASSERT_EQ(twice.code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv"))) << c[0] << ' ' << c[2];
    EXPECT_EQ(once.out, twice.out);
  }
}
