#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using tailwave::cli::main;

namespace {
fs::path config(const std::string& name) {
  const char* d = std::getenv("TAILWAVE_CONFIG_DIR");
  return (d ? fs::path(d) : fs::path("configs")) / name;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tailwave_cli_" + std::to_string(::getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

int tw(std::vector<std::string> args) {
  args.insert(args.begin(), "tailwave");
  return main(args);
}
}  // namespace

TEST_CASE("indicial subcommand") {
  const auto out = scratch("indicial.json");
  REQUIRE(tw({"indicial", "--config", config("mink3.cfg").string(), "--out", out.string()}) == 0);
  const auto j = load(out);
  CHECK(j["gap"][0].get<double>() == 0.0);
  CHECK(j["gap"][1].get<double>() == 1.0);
  CHECK(j["k"].get<int>() == 1);
  CHECK(j["exponents"]["T"].get<double>() == doctest::Approx(2.0));
  CHECK(j["exponents"]["upper_bound_only"].get<bool>());
}

TEST_CASE("exit codes for bad invocations") {
  CHECK(tw({"indicial", "--config", "/nonexistent/model.cfg"}) == 65);
  CHECK(tw({"bogus"}) == 64);
  CHECK(tw({}) == 64);
  CHECK(tw({"indicial"}) == 64);
  CHECK(tw({"scan", "--config", config("mink3.cfg").string(), "--sigma-grid", "1:0:3"}) == 64);
  CHECK(tw({"evolve", "--config", config("mink3.cfg").string()}) == 64);
  const auto bad = scratch("bad.cfg");
  std::ofstream(bad) << "[model]\nn = 3\nalpha = -5\n";
  CHECK(tw({"indicial", "--config", bad.string()}) == 1);
  std::ofstream(bad) << "[model]\nn = 3\nwhat = 1\n";
  CHECK(tw({"indicial", "--config", bad.string()}) == 65);
}

TEST_CASE("verify passes on the inverse-square model") {
  const auto out = scratch("verify.json");
  REQUIRE(tw({"verify", "--config", config("invsq_a1.cfg").string(), "--evolve-config", config("quick.cfg").string(),
              "--out", out.string()}) == 0);
  const auto j = load(out);
  CHECK(j["status"] == "pass");
  CHECK(j["scan"]["stable"].get<bool>());
  CHECK(j["ledger"]["k"].get<int>() == 3);
}

TEST_CASE("scan and evolve outputs are deterministic") {
  const auto a = scratch("scan_a"), b = scratch("scan_b");
  for (const auto& d : {a, b})
    REQUIRE(tw({"scan", "--config", config("invsq_a1.cfg").string(), "--sigma-grid", "0.1:5:12", "--imag", "0:0.5:2",
                "--out", d.string()}) == 0);
  CHECK(slurp(a / "scan.csv") == slurp(b / "scan.csv"));
  CHECK(slurp(a / "scan.json") == slurp(b / "scan.json"));

  const auto e1 = scratch("ev_a"), e2 = scratch("ev_b");
  const auto run_cfg = scratch("short.cfg");
  std::ofstream(run_cfg) << "[evolve]\ndr = 0.1\nT_max = 120\nobservers = r:10, ray:0.5\npulse_center = 5\n";
  for (const auto& d : {e1, e2})
    REQUIRE(tw({"evolve", "--config", config("invsq_a1.cfg").string(), "--evolve-config", run_cfg.string(), "--out",
                d.string()}) == 0);
  for (const char* f : {"r_10.csv", "ray_0.5.csv", "energy.csv"}) {
    CHECK(fs::exists(e1 / f));
    CHECK(slurp(e1 / f) == slurp(e2 / f));
  }
  auto m1 = load(e1 / "manifest.json"), m2 = load(e2 / "manifest.json");
  m1.erase("timestamp");
  m2.erase("timestamp");
  CHECK(m1 == m2);
}

TEST_CASE("profile, evolve, fit round trip") {
  const auto prof = scratch("profile.json");
  const auto dir = scratch("fit_run");
  REQUIRE(tw({"profile", "--config", config("invsq_a1.cfg").string(), "--out", prof.string()}) == 0);
  REQUIRE(tw({"evolve", "--config", config("invsq_a1.cfg").string(), "--evolve-config", config("quick.cfg").string(),
              "--out", dir.string()}) == 0);
  const auto rep = scratch("fit.json");
  CHECK(tw({"fit", "--in", dir.string(), "--profile", prof.string(), "--out", rep.string()}) == 0);
  const auto j = load(rep);
  CHECK(j["status"] == "pass");
  CHECK(j["measurements"].contains("r_10"));

  // a profile for a different model makes the verdict fail
  const auto other = scratch("alpha3.cfg");
  std::ofstream(other) << "[model]\nn = 3\nalpha = 3\n";
  const auto prof3 = scratch("profile3.json");
  REQUIRE(tw({"profile", "--config", other.string(), "--out", prof3.string()}) == 0);
  CHECK(tw({"fit", "--in", dir.string(), "--profile", prof3.string(), "--out", scratch("fit3.json").string()}) == 2);
}

TEST_CASE("degenerate model profile and ledger") {
  const auto prof = scratch("profile_mink3.json");
  REQUIRE(tw({"profile", "--config", config("mink3.cfg").string(), "--out", prof.string()}) == 0);
  const auto j = load(prof);
  CHECK(j["degenerate"].get<bool>());
  const auto led = scratch("expand.json");
  REQUIRE(tw({"expand", "--config", config("mink4.cfg").string(), "--out", led.string()}) == 0);
  const auto l = load(led);
  CHECK(l.at("ledger").at("k").get<int>() == 2);
  CHECK(l.at("ledger").at("log_case").get<bool>());
}

TEST_CASE("zero-energy subcommand") {
  const auto out = scratch("ze");
  REQUIRE(tw({"zero-energy", "--config", config("invsq_a1.cfg").string(), "--out", out.string()}) == 0);
  CHECK(fs::exists(out / "zero_energy.csv"));
  const auto j = load(out / "zero_energy.json");
  CHECK(j["tail_exponent"].get<double>() == doctest::Approx(j["tail_exponent_predicted"].get<double>()).epsilon(1e-4));
}

TEST_CASE("scratch cleanup") {
  std::error_code ec;
  fs::remove_all(scratch("x").parent_path(), ec);
  CHECK_FALSE(ec);
}
