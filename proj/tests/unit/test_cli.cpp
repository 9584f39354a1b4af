#include "dcqe/cli.hpp"
#include "dcqe/scan_io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "dcqe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dcqe::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dcqe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    put(dir / "bench.ini",
        "[source]\nkind = entangled\ncoherence = 0.73\npair_rate = 22222\n"
        "[scan]\nn_steps = 40\ndwell_s = 5\n[run]\nmaster_seed = 31\n");
    put(dir / "fringe.manifest", "format_version = 1\nconfig = bench.ini\nexperiment = fringe\n");
    unsetenv("DCQE_OUTPUT_DIR");
  }
  void TearDown() override {
    unsetenv("DCQE_OUTPUT_DIR");
    fs::remove_all(dir);
  }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, ValidateWritesNothing) {
  const auto before = std::distance(fs::directory_iterator(dir), fs::directory_iterator());
  const Result r = call({"validate", (dir / "bench.ini").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ok"), std::string::npos);
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator()), before);
  EXPECT_EQ(call({"validate", DCQE_CONFIG_DIR "/erasure.ini"}).code, 0);
}

TEST_F(Cli, RunTwiceByteIdentical) {
  ASSERT_EQ(call({"run", (dir / "fringe.manifest").string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(call({"run", (dir / "fringe.manifest").string(), "--out", (dir / "b").string(),
                  "--threads", "2"})
                .code,
            0);
  const std::string a = slurp(dir / "a" / "scan.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "scan.csv"));
  EXPECT_NE(a.find(dcqe::kScanHeader), std::string::npos);
}

TEST_F(Cli, ReportOnErasureScan) {
  ASSERT_EQ(call({"run", (dir / "fringe.manifest").string(), "--out", (dir / "o").string()}).code, 0);
  const Result r = call({"report", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("in [0.71, 0.77] vs target band [0.72, 0.75]: PASS"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "o" / "report.txt"));

  const Result a = call({"analyze", (dir / "o" / "scan.csv").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.rfind("series,offset,amplitude", 0), 0u);
  EXPECT_NE(a.out.find("\nn_ApBp,"), std::string::npos);
}

TEST_F(Cli, SeedOverrideChangesOutput) {
  ASSERT_EQ(call({"run", (dir / "fringe.manifest").string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(call({"run", (dir / "fringe.manifest").string(), "--out", (dir / "b").string(), "--seed",
                  "32"})
                .code,
            0);
  const auto b = dcqe::read_scan(dir / "b" / "scan.csv");
  EXPECT_EQ(b.meta("master_seed"), "32");
  EXPECT_NE(dcqe::read_scan(dir / "a" / "scan.csv").rows, b.rows);
}

TEST_F(Cli, UsageErrorIsOne) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"run"}).code, 1);
  EXPECT_EQ(call({"run", "x.manifest", "--threads", "0"}).code, 1);
}

TEST_F(Cli, BadConfigIsTwo) {
  put(dir / "bad.ini", "[source]\nkind = entangled\ncoherence = 2\n");
  const Result r = call({"validate", (dir / "bad.ini").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("source.coherence"), std::string::npos) << r.err;
  EXPECT_EQ(call({"run", (dir / "missing.manifest").string()}).code, 2);
  EXPECT_EQ(call({"report", (dir / "nothing_here").string()}).code, 2);
}

TEST_F(Cli, OutputDirFromEnvironment) {
  setenv("DCQE_OUTPUT_DIR", (dir / "env").string().c_str(), 1);
  ASSERT_EQ(call({"run", (dir / "fringe.manifest").string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "env" / "scan.csv"));
  ASSERT_EQ(call({"run", (dir / "fringe.manifest").string(), "--out", (dir / "flag").string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "flag" / "scan.csv"));
}

TEST_F(Cli, OutputDirFromManifest) {
  put(dir / "m2.manifest", "format_version = 1\nconfig = bench.ini\nexperiment = fringe\noutput_dir = sub\n");
  ASSERT_EQ(call({"run", (dir / "m2.manifest").string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "sub" / "scan.csv"));
}

TEST_F(Cli, BeamBlockAndChshOutputs) {
  put(dir / "small.ini", "[source]\nkind = mixed_hv\n[scan]\ndwell_s = 0.5\n");
  put(dir / "bb.manifest", "format_version = 1\nconfig = small.ini\nexperiment = beam_block\n");
  put(dir / "chsh.manifest", "format_version = 1\nconfig = small.ini\nexperiment = chsh\n");
  ASSERT_EQ(call({"run", (dir / "bb.manifest").string(), "--out", (dir / "o").string()}).code, 0);
  ASSERT_EQ(call({"run", (dir / "chsh.manifest").string(), "--out", (dir / "o").string()}).code, 0);
  EXPECT_NE(slurp(dir / "o" / "beam_block.csv").find("\nmixed_hv,"), std::string::npos);
  const Result r = call({"report", (dir / "o").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("S = "), std::string::npos);
}
