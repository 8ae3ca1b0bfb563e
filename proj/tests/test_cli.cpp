// End-to-end checks of the command-line tool: exit codes, output files,
// determinism of reruns.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "landbubble/csv.hpp"

namespace fs = std::filesystem;
using landbubble::io::CsvTable;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() /
          ("landbubble_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (dir / name).string(); }

  void write_config(const std::string& contents) const {
    std::ofstream out(file("run.conf"));
    out << contents;
  }

  int run(const std::string& args) const {
    std::string cmd = std::string(LANDBUBBLE_CLI_PATH) + " " + args + " >" + file("stdout.txt") +
                      " 2>" + file("stderr.txt");
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(file(name));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
};

}  // namespace

TEST_CASE("help exits cleanly") {
  Sandbox box;
  CHECK(box.run("--help") == 0);
}

TEST_CASE("phase diagram endpoints match the published boundary") {
  Sandbox box;
  box.write_config("grid.inv_rho = 1.0,2.0,3.0,4.0\n");
  REQUIRE(box.run("--config " + box.file("run.conf") + " --out " + box.dir.string() +
                  " --quiet phase") == 0);
  auto table = CsvTable::read(box.file("phase_boundary.csv"));
  auto inv_rho = table.numbers("inv_rho");
  auto lb = table.numbers("lambda_bar");
  REQUIRE(inv_rho.size() == 4);
  CHECK(lb[0] == Catch::Approx(1.6093).margin(1e-3));
  CHECK(lb[1] == Catch::Approx(0.7413).margin(1e-3));
  CHECK(lb[1] > lb[2]);
  CHECK(lb[2] > lb[3]);
  CHECK(fs::exists(box.file("phase_regimes.csv")));
}

TEST_CASE("reruns are byte-identical") {
  Sandbox box;
  box.write_config("grid.lambda = 1.0:0.5:3.0\n");
  std::string base = "--config " + box.file("run.conf") + " --out " + box.dir.string() + " --quiet ";
  REQUIRE(box.run(base + "growth") == 0);
  auto first = box.slurp("growth.csv");
  REQUIRE(box.run(base + "growth") == 0);
  CHECK(box.slurp("growth.csv") == first);
  CHECK_FALSE(first.empty());
}

TEST_CASE("unsorted grid exits with the config code") {
  Sandbox box;
  box.write_config("grid.lambda = 2.0,1.0\n");
  CHECK(box.run("--config " + box.file("run.conf") + " --out " + box.dir.string() +
                " --quiet growth") == 2);
}

TEST_CASE("trend at the knife edge exits with the domain code") {
  Sandbox box;
  box.write_config("tech.kind = TwoSectorLinear\nlambda = 1.60927691776230\n");
  // lambda_bar to 12+ digits: the knife-edge guard rejects it
  CHECK(box.run("--config " + box.file("run.conf") + " --out " + box.dir.string() +
                " --quiet trend") == 4);
  box.write_config("tech.kind = TwoSectorLinear\nlambda = 2.0\n");
  CHECK(box.run("--config " + box.file("run.conf") + " --out " + box.dir.string() +
                " --quiet trend") == 0);
  auto table = CsvTable::read(box.file("trend.csv"));
  CHECK(table.rows[0][table.column("regime")] == "bubbly");
}

TEST_CASE("steady and rates subcommands produce the documented files") {
  Sandbox box;
  std::string base = "--out " + box.dir.string() + " --quiet ";
  REQUIRE(box.run(base + "steady") == 0);
  auto steady = CsvTable::read(box.file("steady.csv"));
  CHECK(steady.numbers("residual_K")[0] <= 1e-9);
  CHECK(steady.numbers("residual_z")[0] <= 1e-9);

  Sandbox box2;
  box2.write_config("tech.kind = TwoSectorLinear\ngrid.lambda = 1.0,1.3,1.55,1.65,2.0,2.5\n");
  REQUIRE(box2.run("--config " + box2.file("run.conf") + " --out " + box2.dir.string() +
                   " --quiet rates") == 0);
  auto rates = CsvTable::read(box2.file("rates.csv"));
  auto R = rates.numbers("R");
  REQUIRE(R.size() == 6);
  CHECK(R[0] > R[1]);
  CHECK(R[1] > R[2]);
  CHECK(R[3] < R[4]);
  CHECK(R[4] < R[5]);
}

TEST_CASE("pareto over a small grid") {
  Sandbox box;
  box.write_config("tech.kind = TwoSectorLinear\nupsilon = 0.975\ngrid.lambda = 1.0,1.5,2.0,2.5\n");
  REQUIRE(box.run("--config " + box.file("run.conf") + " --out " + box.dir.string() +
                  " --quiet pareto") == 0);
  auto table = CsvTable::read(box.file("pareto.csv"));
  auto zeta = table.numbers("zeta");
  REQUIRE(zeta.size() == 4);
  for (std::size_t i = 1; i < zeta.size(); ++i) CHECK(zeta[i] < zeta[i - 1]);
  for (double z : zeta) CHECK(z > 1.0);
}

TEST_CASE("bubbletest on a synthetic bubbly series") {
  Sandbox box;
  {
    std::ofstream csv(box.file("series.csv"));
    csv << "t,rent,price,rate\n";
    double R = 1.05, D = 1.0;
    for (int t = 0; t < 120; ++t)
      csv << t << "," << D << "," << (4.0 * std::pow(R, t) + D / (R - 1.0)) << "," << R << "\n";
  }
  REQUIRE(box.run("--out " + box.dir.string() + " bubbletest --input " + box.file("series.csv")) ==
          0);
  auto verdict = CsvTable::read(box.file("bubbletest_verdict.csv"));
  CHECK(verdict.rows[0][verdict.column("classification")] == "bubbly");
  CHECK(verdict.numbers("fitted_ratio")[0] == Catch::Approx(1.0 / 1.05).margin(2e-3));
  CHECK(verdict.numbers("V0")[0] == Catch::Approx(20.0).epsilon(1e-6));
  auto text = box.slurp("stdout.txt");
  CHECK(text.find("classification: bubbly") != std::string::npos);
}

TEST_CASE("transition subcommand writes a validated path") {
  Sandbox box;
  box.write_config(
      "lambda = 1.0\n"
      "shock.lambda = 2.0\n"
      "shock.start = 0\n"
      "shock.end = 10\n"
      "horizon.T = 40\n");
  REQUIRE(box.run("--config " + box.file("run.conf") + " --out " + box.dir.string() +
                  " --quiet transition") == 0);
  auto table = CsvTable::read(box.file("transition.csv"));
  REQUIRE(table.rows.size() == 41);
  auto regime = table.rows[0][static_cast<std::size_t>(table.column("regime"))];
  CHECK(regime == "bubbly");
  CHECK(table.rows.back()[static_cast<std::size_t>(table.column("regime"))] == "fundamental");
  // V is finite and below price during the bubble
  auto V = table.numbers("V");
  auto P = table.numbers("P");
  CHECK(V[3] < P[3]);
  CHECK(V[3] > 0.0);
}

TEST_CASE("fig2 produces normalized series starting at one") {
  Sandbox box;
  REQUIRE(box.run("--out " + box.dir.string() + " --quiet fig2") == 0);
  for (std::string name : {"fig2_leverage.csv", "fig2_productivity.csv"}) {
    auto table = CsvTable::read(box.file(name));
    auto t = table.numbers("t");
    auto price = table.numbers("price");
    auto rent = table.numbers("rent");
    CHECK(t.front() == -5.0);
    for (std::size_t i = 0; i < t.size() && t[i] < 0; ++i) {
      CHECK(price[i] == 1.0);
      CHECK(rent[i] == 1.0);
    }
  }
  auto lev = CsvTable::read(box.file("fig2_leverage.csv"));
  auto price = lev.numbers("price");
  auto t = lev.numbers("t");
  // price dips on impact in the leverage experiment
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] == 0.0) CHECK(price[i] < 1.0);
  CHECK(fs::exists(box.file("fig2_leverage_path.csv")));
  CHECK(fs::exists(box.file("fig2_productivity_path.csv")));
}

TEST_CASE("simulate emits a cross-section and summary") {
  Sandbox box;
  box.write_config("tech.kind = TwoSectorLinear\nlambda = 2.0\nupsilon = 0.975\nmc.N = 20000\nmc.T = 200\n");
  REQUIRE(box.run("--config " + box.file("run.conf") + " --out " + box.dir.string() +
                  " --seed 99 --quiet simulate") == 0);
  auto samples = CsvTable::read(box.file("simulate.csv"));
  CHECK(samples.rows.size() == 20000);
  auto summary = CsvTable::read(box.file("simulate_summary.csv"));
  CHECK(summary.numbers("hill")[0] > 1.0);
  CHECK(summary.numbers("zeta")[0] > 1.0);
}
