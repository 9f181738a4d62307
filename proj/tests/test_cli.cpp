#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <panfuse/harness.hpp>
#include <panfuse/io.hpp>
#include <panfuse/metrics.hpp>

#include "test_helpers.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("PANFUSE_CLI");
  return p ? p : "";
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<unsigned char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("panfuse_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli workflows") {
  if (cli_path().empty()) SKIP("PANFUSE_CLI not set");
  TempDir tmp;
  const std::string dir = tmp.path.string();

  SECTION("synth writes a loadable, reproducible scene") {
    REQUIRE(run("synth --width 32 --height 32 --bands 4 --ratio 4 --seed 5 --out " +
                dir + "/s1") == 0);
    REQUIRE(run("synth --width 32 --height 32 --bands 4 --ratio 4 --seed 5 --out " +
                dir + "/s2") == 0);
    for (const char* name : {"pan.brs", "ms.brs", "reference.brs"}) {
      CAPTURE(name);
      REQUIRE(fs::exists(tmp.path / "s1" / name));
      CHECK(slurp(tmp.path / "s1" / name) == slurp(tmp.path / "s2" / name));
    }
    const auto ms = panfuse::load_brs(tmp.path / "s1" / "ms.brs");
    CHECK(ms.band_count() == 4);
    CHECK(ms.width() == 8);
  }

  SECTION("fuse with bw reproduces the stack when the pan is the band mean") {
    const panfuse::BandStack ms = testutil::random_stack(32, 32, 4, 500, 0.2, 1.2);
    panfuse::save_brs(tmp.path / "ms.brs", ms);
    panfuse::save_brs(tmp.path / "pan.brs",
                      panfuse::BandStack({panfuse::pixelwise_mean(ms)}));
    REQUIRE(run("fuse --method bw --pan " + dir + "/pan.brs --ms " + dir +
                "/ms.brs --out " + dir + "/fused.brs") == 0);
    const auto fused = panfuse::load_brs(tmp.path / "fused.brs");
    const auto report = panfuse::evaluate_stack(fused, ms, {8, 1});
    CHECK(report.mean_cc >= 0.99);
  }

  SECTION("fuse upsamples a smaller ms stack to the pan grid") {
    const auto scene = panfuse::generate_scene(32, 32, 4, 4, 77);
    panfuse::save_brs(tmp.path / "pan.brs", panfuse::BandStack({scene.pan}));
    panfuse::save_brs(tmp.path / "ms.brs", scene.ms);
    REQUIRE(run("fuse --method brovey --pan " + dir + "/pan.brs --ms " + dir +
                "/ms.brs --out " + dir + "/fused.brs") == 0);
    const auto fused = panfuse::load_brs(tmp.path / "fused.brs");
    CHECK(fused.width() == 32);
    CHECK(fused.band_count() == 4);
  }

  SECTION("evaluate scores a stack against itself as all ones") {
    const panfuse::BandStack s = testutil::random_stack(16, 16, 3, 501, 0.2, 1.2);
    panfuse::save_brs(tmp.path / "s.brs", s);
    REQUIRE(run("evaluate --fused " + dir + "/s.brs --reference " + dir +
                "/s.brs --out " + dir + "/report.csv") == 0);
    std::ifstream in(tmp.path / "report.csv");
    std::string line;
    std::size_t ones = 0;
    while (std::getline(in, line))
      if (line.find("1.0000,1.0000") != std::string::npos) ++ones;
    CHECK(ones == 4);  // 3 bands + mean
  }

  SECTION("experiment is byte-deterministic") {
    REQUIRE(run("synth --width 64 --height 64 --bands 4 --ratio 4 --seed 3 --out " +
                dir + "/scene") == 0);
    const std::string common = "experiment --pan " + dir + "/scene/pan.brs --reference " +
                               dir + "/scene/reference.brs --methods brovey,aw,bw "
                               "--ratio 4 --out " +
                               dir;
    REQUIRE(run(common + "/e1") == 0);
    REQUIRE(run(common + "/e2") == 0);
    const auto r1 = slurp(tmp.path / "e1" / "report.csv");
    REQUIRE(!r1.empty());
    CHECK(r1 == slurp(tmp.path / "e2" / "report.csv"));

    const std::string csv(r1.begin(), r1.end());
    CHECK(csv.find("band,method,cc,uiqi") != std::string::npos);
    CHECK(csv.find("Mean,brovey,") != std::string::npos);
    CHECK(csv.find("Mean,bw,") != std::string::npos);
    CHECK(csv.find("# ratio=4") != std::string::npos);
  }

  SECTION("experiment can dump fused stacks") {
    REQUIRE(run("synth --width 32 --height 32 --bands 4 --ratio 4 --seed 6 --out " +
                dir + "/scene") == 0);
    REQUIRE(run("experiment --pan " + dir + "/scene/pan.brs --reference " + dir +
                "/scene/reference.brs --methods aw,bw --ratio 4 --dump-fused --out " +
                dir + "/exp") == 0);
    CHECK(fs::exists(tmp.path / "exp" / "fused_aw.brs"));
    CHECK(fs::exists(tmp.path / "exp" / "fused_bw.brs"));
    const auto fused = panfuse::load_brs(tmp.path / "exp" / "fused_bw.brs");
    CHECK(fused.width() == 32);
  }

  SECTION("decompose dumps planes that sum back to the input") {
    const panfuse::Band b = testutil::random_band(32, 32, 502);
    panfuse::save_brs(tmp.path / "in.brs", panfuse::BandStack({b}));
    REQUIRE(run("decompose --in " + dir + "/in.brs --levels 2 --out " + dir + "/dec") ==
            0);
    const auto p1 = panfuse::load_brs(tmp.path / "dec" / "band1_plane1.brs").band(0);
    const auto p2 = panfuse::load_brs(tmp.path / "dec" / "band1_plane2.brs").band(0);
    const auto res = panfuse::load_brs(tmp.path / "dec" / "band1_residual.brs").band(0);
    const auto sum = panfuse::add(panfuse::add(p1, p2), res);
    // the container stores 32-bit floats, so the round trip is float-exact
    CHECK(testutil::max_rel_err(sum, b) < 1e-6);
  }

  SECTION("inputs are never mutated") {
    const panfuse::BandStack ms = testutil::random_stack(16, 16, 3, 503, 0.2, 1.2);
    panfuse::save_brs(tmp.path / "ms.brs", ms);
    panfuse::save_brs(tmp.path / "pan.brs",
                      panfuse::BandStack({panfuse::pixelwise_mean(ms)}));
    const auto pan_before = slurp(tmp.path / "pan.brs");
    const auto ms_before = slurp(tmp.path / "ms.brs");
    REQUIRE(run("fuse --method aw --pan " + dir + "/pan.brs --ms " + dir +
                "/ms.brs --out " + dir + "/out.brs") == 0);
    CHECK(slurp(tmp.path / "pan.brs") == pan_before);
    CHECK(slurp(tmp.path / "ms.brs") == ms_before);
  }
}

TEST_CASE("cli exit codes") {
  if (cli_path().empty()) SKIP("PANFUSE_CLI not set");
  TempDir tmp;
  const std::string dir = tmp.path.string();

  const panfuse::BandStack ms = testutil::random_stack(8, 8, 2, 504);
  panfuse::save_brs(tmp.path / "ms.brs", ms);
  panfuse::save_brs(tmp.path / "pan.brs", panfuse::BandStack({ms.band(0)}));

  SECTION("unknown method is a usage error") {
    CHECK(run("fuse --method sharpen --pan " + dir + "/pan.brs --ms " + dir +
              "/ms.brs --out " + dir + "/o.brs") == 2);
  }
  SECTION("unknown flags are usage errors") {
    CHECK(run("fuse --method bw --frobnicate --pan " + dir + "/pan.brs --ms " + dir +
              "/ms.brs --out " + dir + "/o.brs") == 2);
    CHECK(run("") == 2);
    CHECK(run("evaluate") == 2);
  }
  SECTION("bad level strings are usage errors") {
    CHECK(run("fuse --method bw --levels never --pan " + dir + "/pan.brs --ms " + dir +
              "/ms.brs --out " + dir + "/o.brs") == 2);
  }
  SECTION("missing files are runtime errors") {
    CHECK(run("fuse --method bw --pan " + dir + "/absent.brs --ms " + dir +
              "/ms.brs --out " + dir + "/o.brs") == 1);
  }
  SECTION("malformed rasters are runtime errors") {
    std::ofstream bad(tmp.path / "bad.brs", std::ios::binary);
    bad << "JUNKJUNKJUNK";
    bad.close();
    CHECK(run("fuse --method bw --pan " + dir + "/bad.brs --ms " + dir +
              "/ms.brs --out " + dir + "/o.brs") == 1);
  }
  SECTION("inconsistent ratio and grids are runtime errors") {
    CHECK(run("fuse --method bw --ratio 2 --pan " + dir + "/pan.brs --ms " + dir +
              "/ms.brs --out " + dir + "/o.brs") == 0);  // equal grids: ratio only sets levels
    const auto scene = panfuse::generate_scene(16, 16, 2, 2, 505);
    panfuse::save_brs(tmp.path / "pan2.brs", panfuse::BandStack({scene.pan}));
    panfuse::save_brs(tmp.path / "ms2.brs", scene.ms);
    CHECK(run("fuse --method bw --ratio 4 --pan " + dir + "/pan2.brs --ms " + dir +
              "/ms2.brs --out " + dir + "/o.brs") == 1);
  }
  SECTION("help exits zero") {
    CHECK(run("--help") == 0);
    CHECK(run("fuse --help") == 0);
  }
}
