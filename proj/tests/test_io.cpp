#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "nematorus/io/commands.hpp"
#include "nematorus/io/config.hpp"
#include "nematorus/io/csv.hpp"

using namespace nematorus;
using namespace nematorus::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nematorus_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("number formatting round trips") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int n = 0; n < 1000; ++n) {
    const double v = d(gen) * std::pow(10.0, n % 40 - 20);
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK_THROWS_AS(parse_number("1.5x"), ConfigError);
  CHECK_THROWS_AS(parse_number(""), ConfigError);
  CHECK_THROWS_AS(parse_number("nan"), ConfigError);
  CHECK_THROWS_AS(parse_number("inf"), ConfigError);
}

TEST_CASE("config serialization round trips") {
  RunConfig c;
  c.command = Command::sweep_mu;
  c.R = 3.0;
  c.r = 2.0;
  c.k1 = 1.0;
  c.k2 = 0.5;
  c.k3 = 1.25;
  c.n_theta = 32;
  c.n_phi = 48;
  c.dt = 1e-4;
  c.tol = 1e-7;
  c.max_steps = 12345;
  c.snapshot_every = 10;
  c.flat_energy_stop = true;
  c.winding = {2, -1};
  c.alpha0 = 0.1;
  c.noise = 0.02;
  c.rng_seed = 99;
  c.mu_lo = 1.3;
  c.mu_hi = 1.7;
  c.mu_tol = 0.02;
  c.windings = {{0, 0}, {3, 4}};
  CHECK(parse_config(serialize(c)) == c);
  const RunConfig d;
  CHECK(parse_config(serialize(d)) == d);
}

TEST_CASE("config errors carry line numbers") {
  auto message = [](std::string_view text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("# comment\n\ngeometry.mu = 1.4\nbogus.key = 3\n").find("line 4") != std::string::npos);
  CHECK(message("grid.n_theta = 12.5\n").find("line 1") != std::string::npos);
  CHECK(message("geometry.mu\n").find("line 1") != std::string::npos);
  CHECK(message("command = fly\n").find("line 1") != std::string::npos);
  CHECK(message("geometry.mu = 1.4\n").empty());
}

TEST_CASE("config validation") {
  RunConfig c;
  c.mu = 1.4;
  CHECK_NOTHROW(c.validate());
  c.R = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.R.reset();
  c.k = 1.0;
  c.k2 = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.k2.reset();
  c.n_theta = 7;
  CHECK_THROWS(c.validate());
  c.n_theta = 64;
  c.tol = 0;
  CHECK_THROWS(c.validate());
  c.tol = 1e-8;
  c.mu = 0.9;
  CHECK_THROWS(c.validate());
}

TEST_CASE("winding lists") {
  CHECK(parse_winding(" 1, -4") == WindingNumber{1, -4});
  CHECK(format_winding({3, 2}) == "3,2");
  const std::vector<WindingNumber> l{{0, 0}, {1, 4}};
  CHECK(parse_windings(format_windings(l)) == l);
  CHECK_THROWS_AS(parse_winding("1,"), ConfigError);
}

TEST_CASE("stamp records version, config and seed") {
  RunConfig c;
  c.mu = 1.4;
  c.rng_seed = 17;
  const auto s = stamp(c);
  CHECK(s.find("nematorus") == 0);
  CHECK(s.find("geometry.mu = 1.4") != std::string::npos);
  CHECK(s.find("rng_seed = 17") != std::string::npos);
  CHECK(s.find('\n') == std::string::npos);
}

TEST_CASE("csv document and atomic write") {
  CsvDocument doc("run stamp", {"a", "b", "c"});
  doc.cell(1.5).cell(7LL).cell("x");
  doc.end_row();
  CHECK(doc.text() == "# run stamp\na,b,c\n1.5,7,x\n");
  const auto dir = scratch("csv");
  write_file_atomic(dir / "out.csv", doc.text());
  CHECK(slurp(dir / "out.csv") == doc.text());
  CHECK_FALSE(fs::exists(dir / "out.csv.tmp"));
  fs::remove_all(dir);
}

TEST_CASE("commands write their outputs") {
  const auto dir = scratch("commands");
  std::ostringstream log, err;
  RunConfig c;
  c.mu = 1.8;
  c.n_theta = c.n_phi = 16;
  c.output_dir = dir.string();

  c.command = Command::geometry_dump;
  CHECK(run(c, log, err) == exit_ok);
  CHECK(fs::exists(dir / "geometry.csv"));
  CHECK(fs::exists(dir / "moments.csv"));

  c.command = Command::constant_analysis;
  CHECK(run(c, log, err) == exit_ok);
  CHECK(slurp(dir / "equilibria.csv").rfind("# nematorus", 0) == 0);
  CHECK(fs::exists(dir / "scan.csv"));

  c.command = Command::flow;
  c.snapshot_every = 200;
  CHECK(run(c, log, err) == exit_ok);
  CHECK(fs::exists(dir / "final.csv"));
  CHECK(fs::exists(dir / "flow_history.csv"));
  CHECK(fs::exists(dir / "snapshots" / "snapshot_000000000.csv"));
  CHECK(slurp(dir / "flow_history.csv").find("# summary") != std::string::npos);

  c.max_steps = 3;
  CHECK(run(c, log, err) == exit_not_converged);

  c.command = Command::sweep_mu;
  c.mu_lo = 1.6;
  c.mu_hi = 1.9;
  c.mu_tol = 0.1;
  CHECK(run(c, log, err) == exit_bracket_invalid);
  CHECK(fs::exists(dir / "sweep_mu.csv"));

  c.mu = 0.5;
  CHECK(run(c, log, err) == exit_config_error);
  fs::remove_all(dir);
}

TEST_CASE("winding table output is reproducible") {
  const auto a = scratch("table_a");
  const auto b = scratch("table_b");
  std::ostringstream log, err;
  RunConfig c;
  c.command = Command::winding_table;
  c.mu = 1.8;
  c.n_theta = c.n_phi = 16;
  c.tol = 1e-6;
  c.windings = {{0, 0}, {1, 0}, {0, 1}};
  c.rng_seed = 7;
  c.output_dir = a.string();
  CHECK(run(c, log, err) == exit_ok);
  c.output_dir = b.string();
  c.jobs = 2;
  CHECK(run(c, log, err) == exit_ok);
  CHECK(slurp(a / "windings.csv") == slurp(b / "windings.csv"));
  CHECK(slurp(a / "windings" / "h1_0.csv") == slurp(b / "windings" / "h1_0.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}
