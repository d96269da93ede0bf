#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "rz/experiment.hpp"
#include "rz/report.hpp"

using namespace rz;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "rz-test-cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read(p)); }

ExperimentConfig config(Command cmd, const fs::path& dir, const std::string& out) {
  ExperimentConfig c;
  c.command = cmd;
  c.cache_dir = dir / "cache";
  c.output = dir / out;
  return c;
}

int shell(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("schema identifier") {
    CHECK(report_schema_version() == "riesz-report/1");
    CsvTable t({"a", "b"});
    t.add_row({"1", CsvTable::cell("x,y")});
    CHECK(t.str() == "# schema: riesz-report/1\na,b\n1,\"x,y\"\n");
    CHECK(json_report("r")["schema"] == "riesz-report/1");
  }

  TEST_CASE("settings, config file and validation") {
    const auto dir = fresh_dir("settings");
    ExperimentConfig c;
    {
      std::ofstream f(dir / "run.cfg");
      f << "# comment\ntestbed = eisenstein\nshifts = 0, 2, -2\nk = 4\nepsilon = 0.1\n\nxmax=1e5\n";
    }
    load_config_file(c, dir / "run.cfg");
    CHECK(c.testbed == "eisenstein");
    CHECK(c.shifts == std::vector<double>{0.0, 2.0, -2.0});
    CHECK(*c.k == 4);
    CHECK(*c.xmax == 1e5);
    apply_setting(c, "k", "2");  // flags applied after the file win
    CHECK(*c.k == 2);
    CHECK_NOTHROW(validate(c));

    for (auto [key, value] : std::vector<std::pair<std::string, std::string>>{
             {"epsilon", "0"}, {"epsilon", "0.6"}, {"grid-ratio", "1"}, {"xmin", "0.5"}, {"testbed", "gl3"},
             {"method", "guess"}, {"t0", "5"}}) {
      ExperimentConfig bad;
      apply_setting(bad, key, value);
      CHECK_THROWS_AS(validate(bad), Error);
    }
    CHECK_THROWS_AS(apply_setting(c, "k", "two"), Error);
    CHECK_THROWS_AS(apply_setting(c, "bogus", "1"), Error);
    CHECK(exit_code_for(Errc::invalid_argument) == 2);
    CHECK(exit_code_for(Errc::pole_collision) == 3);
    CHECK(exit_code_for(Errc::non_convergence) == 3);
    CHECK(exit_code_for(Errc::resource_exhausted) == 4);
  }

  TEST_CASE("cache directory resolution") {
    ExperimentConfig c;
    ::setenv("RZ_CACHE_DIR", "/tmp/from-env", 1);
    CHECK(resolve_cache_dir(c) == fs::path("/tmp/from-env"));
    c.cache_dir = "/tmp/from-flag";
    CHECK(resolve_cache_dir(c) == fs::path("/tmp/from-flag"));
    ::unsetenv("RZ_CACHE_DIR");
    c.cache_dir.reset();
    CHECK(resolve_cache_dir(c) == fs::path(".rz-cache"));
  }

  TEST_CASE("invalid epsilon exits 2 and writes nothing") {
    const auto dir = fresh_dir("bad-eps");
    auto c = config(Command::riesz, dir, "r.csv");
    c.epsilon = 0.0;
    auto r = run(c);
    CHECK(r.exit_code == 2);
    CHECK(r.reason.rfind("error: code=invalid_argument exit=2", 0) == 0);
    CHECK(!fs::exists(dir / "r.csv"));
    CHECK(!fs::exists(dir / "r.json"));
  }

  TEST_CASE("riesz report on zeta with k = 2") {
    const auto dir = fresh_dir("riesz");
    auto c = config(Command::riesz, dir, "r.csv");
    c.k = 2;
    c.xmax = 1e6;
    auto r = run(c);
    REQUIRE(r.exit_code == 0);
    const std::string csv = read(dir / "r.csv");
    CHECK(csv.rfind("# schema: riesz-report/1\nx,S_k,main,error\n", 0) == 0);
    auto j = read_json(dir / "r.json");
    CHECK(j["schema"] == "riesz-report/1");
    CHECK(j["C_source"] == "residue_hint");
    CHECK(j["max_abs_error"].get<double>() <= 1.0);
    CHECK(fs::exists(dir / "r.csv.meta.json"));
  }

  TEST_CASE("cache reuse, corruption and idempotent bodies") {
    const auto dir = fresh_dir("cache");
    auto c = config(Command::probe_identity, dir, "p.csv");
    c.xmax = 20000;
    c.workers = 1;
    REQUIRE(run(c).exit_code == 0);
    const std::string body1 = read(dir / "p.csv"), sum1 = read(dir / "p.json");
    CHECK(read_json(dir / "p.csv.meta.json")["cache_events"][0]["event"] == "stored");

    c.workers = 3;
    REQUIRE(run(c).exit_code == 0);
    CHECK(read_json(dir / "p.csv.meta.json")["cache_events"][0]["event"] == "hit");
    CHECK(read(dir / "p.csv") == body1);
    CHECK(read(dir / "p.json") == sum1);

    fs::path cached;
    for (const auto& e : fs::directory_iterator(dir / "cache"))
      if (e.path().filename().string().rfind("zeta-", 0) == 0) cached = e.path();
    REQUIRE(fs::exists(cached));
    {
      std::fstream f(cached, std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(100);
      f.put('\x7f');
    }
    REQUIRE(run(c).exit_code == 0);
    auto meta = read_json(dir / "p.csv.meta.json");
    CHECK(meta["cache_events"][0]["event"] == "corrupt");
    CHECK(meta["cache_events"][1]["event"] == "stored");
    CHECK(read(dir / "p.csv") == body1);

    REQUIRE(run(c).exit_code == 0);
    CHECK(read_json(dir / "p.csv.meta.json")["cache_events"][0]["event"] == "hit");
  }

  TEST_CASE("json format embeds the table") {
    const auto dir = fresh_dir("json");
    auto c = config(Command::residue, dir, "res.json");
    c.format = Format::json;
    c.testbed = "eisenstein";
    c.shifts = {0.0, 1.0, -1.0};
    c.method = "all";
    REQUIRE(run(c).exit_code == 0);
    auto j = read_json(dir / "res.json");
    CHECK(j["schema"] == "riesz-report/1");
    CHECK(j["agree_within_1pct"] == true);
    CHECK(j["table"]["columns"][0] == "method");
  }

  TEST_CASE("numerical contract and resource exit codes") {
    const auto dir = fresh_dir("codes");
    auto c = config(Command::riesz, dir, "z2.csv");
    c.testbed = "zeta2";
    auto r = run(c);
    CHECK(r.exit_code == 3);
    CHECK(r.reason.find("code=pole_order") != std::string::npos);

    auto d = config(Command::coeffs, dir, "d.csv");
    d.testbed = "rs_delta";
    d.tau_cap = 1000;
    d.xmax = 5000;
    CHECK(run(d).exit_code == 4);

    auto p = config(Command::contour, dir, "c.csv");
    p.testbed = "eisenstein";
    p.shifts = {0.0, 5.0, -5.0};
    p.T = 5.0;
    CHECK(run(p).exit_code == 3);
  }

  TEST_CASE("command-line front end") {
    const auto dir = fresh_dir("front");
    const std::string bin = RZ_CLI_PATH;
    const std::string cache = " --cache-dir " + (dir / "cache").string();
    CHECK(shell(bin + " perron --k 3 --y 2 --format json --out " + (dir / "p.json").string() + cache + " >/dev/null") == 0);
    auto j = read_json(dir / "p.json");
    REQUIRE(j["cells"].size() == 1);
    CHECK(std::abs(j["cells"][0]["slope"].get<double>() + 3.0) <= 0.5);

    CHECK(shell(bin + " riesz --epsilon 0 --out " + (dir / "bad.csv").string() + cache + " 2>/dev/null") == 2);
    CHECK(!fs::exists(dir / "bad.csv"));
    CHECK(shell(bin + " riesz --no-such-flag 1 2>/dev/null >/dev/null") == 2);

    {
      std::ofstream f(dir / "run.cfg");
      f << "testbed = zeta2\nk = 1\nxmax = 400\nC = 1\n";
    }
    CHECK(shell(bin + " riesz --config " + (dir / "run.cfg").string() + " --k 2 --out " + (dir / "cfg.csv").string() +
                cache + " >/dev/null") == 0);
    auto s = read_json(dir / "cfg.json");
    CHECK(s["testbed"] == "zeta2");
    CHECK(s["k"] == 2);
    CHECK(s["C_source"] == "config");
  }
}
