#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "zk/cli.hpp"
#include "zk/config.hpp"
#include "zk/errors.hpp"
#include "zk/field.hpp"
#include "zk/snapshot.hpp"
#include "zk/transforms.hpp"

using namespace zk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("zk-test-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(bool(is));
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool has_partial_files(const fs::path& root) {
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.path().extension() == ".partial") return true;
  }
  return false;
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const ExperimentConfig cfg = parse_config("{}");
  CHECK(cfg.preset == Preset::Custom);
  CHECK(cfg.name == "run");
  CHECK(cfg.solver.dt == 1e-3);
  CHECK(cfg.solver.T == 1.0);
  CHECK(cfg.domain.Nx == 128);
  CHECK(cfg.domain.dealias == true);
  CHECK(cfg.initial.type == "gaussian-pulse");
  CHECK(cfg.forcing.type == "none");
  CHECK(cfg.seed == 1);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("bad values are kept by the parser and named by validation") {
  const ExperimentConfig cfg = parse_config(R"({"solver": {"dt": -1.0}})");
  CHECK(cfg.solver.dt == -1.0);
  try {
    cfg.validate();
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("dt") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    parse_config(R"({"solver": {"foo": 1}})");
    CHECK(false);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"bogon": 3})"), DataError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), DataError);
  CHECK_THROWS_AS(parse_config("{not json"), DataError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "no-such-preset"})"), UsageError);
}

TEST_CASE("preset names round trip") {
  for (const auto p : {Preset::LinearDispersion, Preset::Conservation, Preset::HSweep,
                       Preset::DecaySweep, Preset::Perturbation, Preset::InterpolationAudit,
                       Preset::Custom}) {
    CHECK(preset_from_name(preset_name(p)) == p);
  }
  CHECK(preset_name(Preset::HSweep) == "h-sweep");
  CHECK(preset_name(Preset::InterpolationAudit) == "interpolation-audit");
  CHECK_THROWS_AS(preset_from_name("H-Sweep"), UsageError);
}

TEST_CASE("canonical form and hash ignore key order") {
  const ExperimentConfig a = parse_config(R"({"solver": {"dt": 0.002, "T": 0.5}, "seed": 9})");
  const ExperimentConfig b = parse_config(R"({"seed": 9, "solver": {"T": 0.5, "dt": 0.002}})");
  CHECK(canonical_json(a) == canonical_json(b));
  CHECK(config_hash(a) == config_hash(b));
  const ExperimentConfig c = parse_config(R"({"seed": 10})");
  CHECK(config_hash(a) != config_hash(c));
  CHECK(canonical_json(a).back() == '\n');
}

TEST_CASE("dotted overrides re-parse strictly") {
  ExperimentConfig cfg = parse_config("{}");
  apply_override(cfg, "solver.dt=5e-4");
  CHECK(cfg.solver.dt == 5e-4);
  apply_override(cfg, "name=alt-run");
  CHECK(cfg.name == "alt-run");
  apply_override(cfg, "initial.type=zero");
  CHECK(cfg.initial.type == "zero");
  apply_override(cfg, "domain.Nx=64");
  CHECK(cfg.domain.Nx == 64);
  CHECK_THROWS_AS(apply_override(cfg, "solver.nope=1"), DataError);
  CHECK_THROWS_AS(apply_override(cfg, "no-equals-sign"), UsageError);
}

TEST_CASE("snapshot round trip and header checks") {
  const fs::path dir = fresh_dir("snap");
  const DomainSpec dom{1.5, 2.5, 3.0, 16, 4, 6, true};
  const Transforms tr(dom);
  Field u = make_physical_field(dom);
  for (std::size_t i = 0; i < u.phys.size(); ++i) u.phys[i] = 0.25 * double(i) - 7.0;

  const fs::path file = dir / "u.zkf1";
  write_snapshot(file, u);
  CHECK(!has_partial_files(dir));

  const Field v = read_snapshot(file);
  CHECK(v.dom.Nx == 16);
  CHECK(v.dom.L2 == 2.5);
  CHECK(v.dom.dealias == true);
  for (std::size_t i = 0; i < u.phys.size(); ++i) CHECK(v.phys[i] == u.phys[i]);

  const Field w = read_snapshot(file, dom);
  CHECK(w.phys == u.phys);
  DomainSpec other = dom;
  other.Nx = 32;
  CHECK_THROWS_AS(read_snapshot(file, other), DataError);

  std::ofstream junk(dir / "junk.zkf1", std::ios::binary);
  junk << "ZKF9999";
  junk.close();
  CHECK_THROWS_AS(read_snapshot(dir / "junk.zkf1"), DataError);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.zkf1"), DataError);

  Field spec_rep = tr.spectral_copy(u);
  CHECK_THROWS_AS(write_snapshot(dir / "bad.zkf1", spec_rep), UsageError);
}

TEST_CASE("truncated snapshot data is a data error") {
  const fs::path dir = fresh_dir("trunc");
  const DomainSpec dom{1.0, 1.0, 1.0, 8, 4, 4, true};
  Field u = make_physical_field(dom);
  const fs::path file = dir / "u.zkf1";
  write_snapshot(file, u);
  const std::string full = slurp(file);
  std::ofstream cut(dir / "cut.zkf1", std::ios::binary);
  cut.write(full.data(), static_cast<std::streamsize>(full.size() / 2));
  cut.close();
  CHECK_THROWS_AS(read_snapshot(dir / "cut.zkf1"), DataError);
}

TEST_CASE("initial data recipes and their failure modes") {
  const DomainSpec dom{3.141592653589793, 3.141592653589793, 4.0, 32, 8, 8, true};
  const Transforms tr(dom);

  InitialSpec zero;
  zero.type = "zero";
  CHECK(l2_norm(build_initial(tr, zero, 1)) == 0.0);

  InitialSpec gp;  // defaults: gaussian-pulse, mode (1,1)
  const Field g = build_initial(tr, gp, 1);
  CHECK(l2_norm(g) > 0.0);
  CHECK(max_abs(g) <= 1.0 + 1e-12);

  InitialSpec norm = gp;
  norm.l2_normalize = 0.25;
  CHECK(std::abs(l2_norm(build_initial(tr, norm, 1)) - 0.25) < 1e-12);

  InitialSpec rnd;
  rnd.type = "random";
  rnd.amplitude = 2.0;
  CHECK(std::abs(l2_norm(build_initial(tr, rnd, 3)) - 2.0) < 1e-12);

  InitialSpec bad = gp;
  bad.type = "hexagonal";
  CHECK_THROWS_AS(build_initial(tr, bad, 1), DataError);
  bad = gp;
  bad.l1 = 0;
  CHECK_THROWS_AS(build_initial(tr, bad, 1), DomainError);
  bad = gp;
  bad.l1 = 9;  // Ny = 8
  CHECK_THROWS_AS(build_initial(tr, bad, 1), DomainError);
  InitialSpec sm;
  sm.type = "single-mode";
  sm.kx = 16;  // Nx/2 is out of range
  CHECK_THROWS_AS(build_initial(tr, sm, 1), DomainError);
  InitialSpec zn = zero;
  zn.l2_normalize = 1.0;
  CHECK_THROWS_AS(build_initial(tr, zn, 1), DataError);
}

TEST_CASE("execute is deterministic and leaves no partial files") {
  const fs::path out = fresh_dir("exec");
  ExperimentConfig cfg = parse_config(R"({
    "name": "tiny",
    "domain": {"Nx": 16, "Ny": 4, "Nz": 4, "X": 4.0},
    "solver": {"dt": 0.01, "T": 0.1},
    "initial": {"amplitude": 0.3},
    "snapshots": true
  })");
  ExecuteOptions opts;
  opts.output_root = out / "a";
  const fs::path dir1 = execute(cfg, opts);
  CHECK(fs::exists(dir1 / "config.json"));
  CHECK(fs::exists(dir1 / "metrics.csv"));
  CHECK(fs::exists(dir1 / "report.txt"));
  CHECK(fs::exists(dir1 / "initial.zkf1"));
  CHECK(fs::exists(dir1 / "final.zkf1"));
  CHECK(!has_partial_files(out));

  opts.output_root = out / "b";
  const fs::path dir2 = execute(cfg, opts);
  CHECK(slurp(dir1 / "metrics.csv") == slurp(dir2 / "metrics.csv"));
  CHECK(slurp(dir1 / "config.json") == slurp(dir2 / "config.json"));

  const std::string header = slurp(dir1 / "metrics.csv").substr(0, 200);
  CHECK(header.find("t,l2,energy,weighted_l2,max_abs,seam_magnitude,res_l2,res_weighted") == 0);

  const std::string rep = report_text(dir1);
  CHECK(rep.find("experiment:") != std::string::npos);
  CHECK(rep.find("config-hash:") != std::string::npos);
  CHECK_THROWS_AS(report_text(out / "nope"), DataError);
}

TEST_CASE("seed option changes the hash-relevant config") {
  const fs::path out = fresh_dir("seed");
  ExperimentConfig cfg = parse_config(R"({
    "name": "seeded",
    "domain": {"Nx": 16, "Ny": 4, "Nz": 4, "X": 4.0},
    "solver": {"dt": 0.01, "T": 0.05},
    "initial": {"type": "random", "amplitude": 0.1}
  })");
  ExecuteOptions o1;
  o1.output_root = out / "a";
  ExecuteOptions o2 = o1;
  o2.output_root = out / "b";
  o2.seed = 99;
  const fs::path d1 = execute(cfg, o1);
  const fs::path d2 = execute(cfg, o2);
  CHECK(slurp(d1 / "metrics.csv") != slurp(d2 / "metrics.csv"));
}

TEST_CASE("config validation names bad experiment fields") {
  ExperimentConfig cfg = parse_config(R"({"name": "has/slash"})");
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = parse_config(R"({"name": ".."})");
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = parse_config(R"({"diagnostics": {"window_max": 99.0}})");
  CHECK_THROWS_AS(cfg.validate(), DomainError);  // |window| must fit inside [-X, X]
  cfg = parse_config(R"({"preset": "decay-sweep"})");
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("cli runs and reports in process") {
  const fs::path out = fresh_dir("cli");
  const fs::path cfgfile = out / "cfg.json";
  {
    std::ofstream os(cfgfile);
    os << R"({
      "name": "cli-run",
      "domain": {"Nx": 16, "Ny": 4, "Nz": 4, "X": 4.0},
      "solver": {"dt": 0.01, "T": 0.05},
      "initial": {"amplitude": 0.2}
    })";
  }
  const std::string root = (out / "runs").string();
  CHECK(cli_main({"run", cfgfile.string(), "--output", root}) == 0);
  CHECK(fs::exists(out / "runs" / "cli-run" / "metrics.csv"));
  CHECK(cli_main({"report", (out / "runs" / "cli-run").string()}) == 0);

  CHECK(cli_main({"report", (out / "runs" / "absent").string()}) == 1);
  CHECK(cli_main({"run", (out / "missing.json").string()}) == 1);
  CHECK(cli_main({"definitely-not-a-command"}) != 0);

  CHECK(cli_main({"run", cfgfile.string(), "--output", root, "--override",
                  "name=cli-run-2", "--override", "solver.T=0.02"}) == 0);
  CHECK(fs::exists(out / "runs" / "cli-run-2" / "report.txt"));
}
