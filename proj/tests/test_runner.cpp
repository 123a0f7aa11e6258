#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "scs/runner.hpp"

using namespace scs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.p_grid = {4.0};
  cfg.eps_grid = {0.25};
  cfg.phi_fracs = {0.0, 1.0};
  cfg.samples = 400;
  cfg.seed = 7;
  cfg.n_max = 6;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  ExperimentConfig cfg;
  apply_config_line(cfg, "p", "2.5, 4");
  apply_config_line(cfg, "epsilon", "0.1");
  apply_config_line(cfg, "phi", "0,0.5,-0.5");
  apply_config_line(cfg, "samples", "123");
  apply_config_line(cfg, "seed", "99");
  apply_config_line(cfg, "n_max", "5");
  apply_config_line(cfg, "out", "results");
  CHECK(cfg.p_grid == std::vector<double>{2.5, 4.0});
  CHECK(cfg.eps_grid == std::vector<double>{0.1});
  CHECK(cfg.phi_fracs == std::vector<double>{0.0, 0.5, -0.5});
  CHECK(cfg.samples == 123);
  CHECK(cfg.seed == 99);
  CHECK(cfg.n_max == 5);
  CHECK(cfg.out_dir == "results");
  CHECK_THROWS(apply_config_line(cfg, "bogus", "1"));
  CHECK_THROWS(apply_config_line(cfg, "p", ""));

  CHECK(cfg.eff_samples(50) == 123);
  cfg.samples = 0;
  CHECK(cfg.eff_samples(50) == 50);

  fs::path file = fs::temp_directory_path() / "scs_cfg_test.ini";
  {
    std::ofstream out(file);
    out << "# comment line\n";
    out << "p = 8\n";
    out << "seed = 42   # trailing comment\n";
    out << "\n";
    out << "not a key value line\n";
  }
  ExperimentConfig loaded = load_config(file.string());
  CHECK(loaded.p_grid == std::vector<double>{8.0});
  CHECK(loaded.seed == 42);
  CHECK(loaded.eps_grid.size() == 3);  // untouched defaults
  fs::remove(file);
  CHECK_THROWS(load_config("/nonexistent/scs.ini"));
}

TEST_CASE("subcommand dispatch and small runs pass") {
  ExperimentConfig cfg = tiny_config();
  CHECK_THROWS(run("nonsense", cfg));

  for (const std::string& name :
       {std::string("verify-convexity"), std::string("bakry"),
        std::string("monotonicity"), std::string("prop-p4")}) {
    ExperimentConfig c = cfg;
    if (name == "monotonicity" || name == "prop-p4") c.samples = 20;
    Report rep = run(name, c);
    CHECK(!rep.rows.empty());
    CHECK(rep.all_pass());
  }

  ExperimentConfig cb = cfg;
  cb.samples = 15;
  Report bl = run("bilinear", cb);
  CHECK(bl.all_pass());

  ExperimentConfig cl = cfg;
  cl.samples = 4;
  Report lp = run("laplace-type", cl);
  CHECK(lp.rows.size() == 4);  // fixed exponent set, independent of p_grid
  CHECK(lp.all_pass());
}

TEST_CASE("csv schema and determinism") {
  ExperimentConfig cfg = tiny_config();
  Report a = run("bakry", cfg);
  Report b = run("bakry", cfg);
  std::string csv_a = report_csv(a), csv_b = report_csv(b);
  CHECK(csv_a == csv_b);
  CHECK(csv_a.rfind("p,epsilon,phi,n,seed,quantity,observed,bound,slack,pass\n", 0) ==
        0);

  cfg.samples = 300;
  CHECK(report_csv(run("verify-convexity", cfg)) ==
        report_csv(run("verify-convexity", cfg)));

  ExperimentConfig other = cfg;
  other.seed = 8;
  CHECK(report_csv(run("verify-convexity", cfg)) !=
        report_csv(run("verify-convexity", other)));

  nlohmann::json s = report_summary("bakry", a);
  CHECK(s["subcommand"] == "bakry");
  CHECK(s["pass"] == true);
  CHECK(s["rows"].get<std::size_t>() == a.rows.size());
  CHECK(s["failures"] == 0);
}

TEST_CASE("hormander manifest table") {
  fs::path manifest = fs::temp_directory_path() / "scs_manifest_test.json";
  {
    std::ofstream out(manifest);
    out << R"([{"name":"heat","expression-id":"heat","J":2.0,"phi":0.3}])";
  }
  ExperimentConfig cfg;
  cfg.manifest = manifest.string();
  Report rep = run("hormander", cfg);
  fs::remove(manifest);

  REQUIRE(rep.table_lines.size() == 1);
  CHECK(rep.all_pass());
  CHECK(rep.table_lines[0].rfind("heat,2,0.3,", 0) == 0);
  std::string csv = report_csv(rep);
  CHECK(csv.rfind("name,J,phi,hormander_norm,reconstruction_error,C1\n", 0) == 0);

  CHECK_THROWS(detail::multiplier_expression("no-such-multiplier"));
  ExperimentConfig bad;
  bad.manifest = "/nonexistent/manifest.json";
  CHECK_THROWS(run("hormander", bad));
}

TEST_CASE("command line binary end to end") {
  const char* bin = std::getenv("SCSLAB_BIN");
  REQUIRE(bin != nullptr);

  fs::path out1 = fs::temp_directory_path() / "scs_cli_out1";
  fs::path out2 = fs::temp_directory_path() / "scs_cli_out2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  auto invoke = [&](const fs::path& out) {
    std::string cmd = std::string(bin) +
                      " bakry --seed 5 --out " + out.string() + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  CHECK(invoke(out1) == 0);
  CHECK(invoke(out2) == 0);
  CHECK(fs::exists(out1 / "bakry.csv"));
  CHECK(fs::exists(out1 / "summary.json"));
  CHECK(slurp(out1 / "bakry.csv") == slurp(out2 / "bakry.csv"));

  nlohmann::json summary;
  {
    std::ifstream in(out1 / "summary.json");
    in >> summary;
  }
  CHECK(summary["bakry"]["pass"] == true);

  std::string badcmd = std::string(bin) + " bogus-subcommand >/dev/null 2>&1";
  CHECK(std::system(badcmd.c_str()) != 0);

  fs::remove_all(out1);
  fs::remove_all(out2);
}
