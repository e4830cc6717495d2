#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "pvyield/util/csv.hpp"
#include "temp_dir.hpp"

// Exercises the installed command-line interface as a subprocess: exit code 0
// on success, 1 on validation problems, 2 on runtime failures.

namespace fs = std::filesystem;
using pvtest::TempDir;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PVYIELD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("version and help exit cleanly") {
  CHECK(run("--version") == 0);
  CHECK(run("--help") == 0);
  CHECK(run("simulate --help") == 0);
}

TEST_CASE("bad usage is a validation failure") {
  CHECK(run("") == 1);                     // missing subcommand
  CHECK(run("simulate") == 1);             // missing required flags
  CHECK(run("no_such_command") == 1);
  CHECK(run("synth --seed 1 --dlat 0 --dlon 10 --lat-lo -60 --lat-hi 60 --out /tmp/x.csv") == 1);
}

TEST_CASE("the full pipeline runs through the CLI") {
  TempDir tmp("cli");
  const std::string world = tmp.file("world.csv");
  const std::string zones_json = tmp.file("zones.json");
  const std::string zmap = tmp.file("zmap.csv");
  const std::string yields = tmp.file("yields.csv");
  const std::string plan = tmp.file("plan.json");
  const std::string rows = tmp.file("rows.csv");
  const std::string model = tmp.file("model.json");
  const std::string pred = tmp.file("pred.csv");
  const std::string emap = tmp.file("emap.csv");

  CHECK(run("synth --seed 7 --dlat 15 --dlon 30 --lat-lo -60 --lat-hi 60 --out " + world) == 0);
  CHECK(fs::exists(world));
  CHECK(run("ingest --climate " + world + " --out " + tmp.file("canon.csv")) == 0);
  CHECK(run("zone fit --climate " + world + " --k 3 --seed 11 --model-out " + zones_json +
            " --map-out " + zmap) == 0);
  CHECK(run("simulate --climate " + world + " --out " + yields) == 0);

  pvyield::write_text_file(plan, R"({"strategy": "diversity", "sites_per_zone": 2, "seed": 3})");
  CHECK(run("sample --climate " + world + " --zone-map " + zmap + " --yields " + yields +
            " --plan " + plan + " --rows-out " + rows) == 0);
  CHECK(run("train --rows " + rows + " --seed 42 --max-epochs 80 --model-out " + model) == 0);
  CHECK(run("predict --model " + model + " --climate " + world + " --out " + pred) == 0);
  CHECK(run("evaluate --pred " + pred + " --ref-yields " + yields + " --zone-map " + zmap +
            " --error-map " + emap + " --ecdf " + tmp.file("ecdf.csv") + " --summary " +
            tmp.file("summary.json")) == 0);
  CHECK(fs::exists(emap));

  // evaluate needs a baseline
  CHECK(run("evaluate --pred " + pred + " --zone-map " + zmap + " --error-map " + emap) == 1);
  // both baselines at once is a usage error
  CHECK(run("evaluate --pred " + pred + " --ref-yields " + yields + " --ref-pred " + pred +
            " --zone-map " + zmap + " --error-map " + emap) == 1);
}

TEST_CASE("validation problems in input files exit with 1") {
  TempDir tmp("cli_bad");
  const std::string bad = tmp.file("bad.csv");
  pvyield::write_text_file(bad, "lat,lon,month,ghi_kwh_m2_day,tamb_c,kt\n95,0,1,5,10,0.5\n");
  CHECK(run("simulate --climate " + bad + " --out " + tmp.file("y.csv")) == 1);
  CHECK(run("simulate --climate " + tmp.file("absent.csv") + " --out " + tmp.file("y.csv")) == 1);

  // Runtime-class failure: training data too small for the architecture.
  const std::string rows = tmp.file("rows.csv");
  pvyield::write_text_file(rows,
                           "source,site_id,lat,lon,month,zone,ghi,tamb,kt,target_kwh_m2\n"
                           "simulated,s0,0,0,1,1,5,10,0.5,30\n");
  CHECK(run("train --rows " + rows + " --seed 1 --max-epochs 5 --model-out " +
            tmp.file("m.json")) == 2);
}

TEST_CASE("experiment configs run from the CLI") {
  TempDir tmp("cli_exp");
  const std::string cfg = tmp.file("exp.json");
  pvyield::write_text_file(cfg, R"({
    "name": "cli_mini",
    "out_dir": ")" + tmp.file("out") + R"(",
    "world": {"kind": "synthetic", "seed": 7, "dlat": 20, "dlon": 40, "lat_lo": -60, "lat_hi": 60},
    "zoning": {"k": 3, "seed": 11},
    "datasets": [{"name": "div", "source": "simulated",
                  "plan": {"strategy": "diversity", "sites_per_zone": 2, "seed": 3}}],
    "models": [{"name": "m1", "dataset": "div", "seed": 42, "max_epochs": 50}],
    "evaluate": {"against": "simulation"}
  })");
  CHECK(run("experiment run --config " + cfg) == 0);
  CHECK(fs::exists(tmp.file("out") + "/manifest.json"));
  CHECK(run("experiment run --config " + tmp.file("nope.json")) == 1);
}
