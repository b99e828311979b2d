#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "support.hpp"
#include "tailwave/config.hpp"
#include "tailwave/errors.hpp"

using namespace tailwave;

namespace {
std::string parse_message(const std::string& text) {
  try {
    model_from_config(parse_config(text, "t.cfg"));
  } catch (const Error& e) {
    return e.code() == ErrorCode::ConfigParse ? e.what() : "wrong code";
  }
  return "";
}

std::filesystem::path config_dir() {
  const char* d = std::getenv("TAILWAVE_CONFIG_DIR");
  return d ? std::filesystem::path(d) : std::filesystem::path("configs");
}
}  // namespace

TEST_CASE("parse, serialize, parse") {
  const std::string text =
      "# comment\n"
      "top = 1\n"
      "[model]\n"
      "n = 3   # trailing\n"
      "alpha = 1\n"
      "\n"
      "[evolve]\n"
      "observers = r:10, ray:0.5\n";
  const auto a = parse_config(text);
  CHECK(a.get("", "top") == "1");
  CHECK(a.get("model", "n") == "3");
  CHECK(a.get("evolve", "observers") == "r:10, ray:0.5");
  CHECK_FALSE(a.get("model", "ell").has_value());
  const auto b = parse_config(a.serialize());
  CHECK(a == b);
  CHECK(b.serialize() == a.serialize());
}

TEST_CASE("number literals") {
  CHECK(parse_number("0.25").value == 0.25);
  CHECK(parse_number("0.25").rational == std::make_pair(std::int64_t(1), std::int64_t(4)));
  CHECK(parse_number("-3/6").rational == std::make_pair(std::int64_t(-1), std::int64_t(2)));
  CHECK(parse_number("sqrt(5)").value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-16));
  CHECK(parse_number("-sqrt(2)").value == doctest::Approx(-std::sqrt(2.0)));
  CHECK(parse_number("3*sqrt(2)").value == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK_FALSE(parse_number("sqrt(2)").rational.has_value());
  CHECK(parse_number("1e-3").value == 1e-3);
  for (const char* bad : {"", "abc", "1/0", "sqrt(-1)", "2sqrt(3)", "1.5/2", "3x"})
    CHECK_THROWS_AS(parse_number(bad), Error);
}

TEST_CASE("errors carry the line number") {
  CHECK(parse_message("n = 3\nbogus line\n").find("t.cfg:2") != std::string::npos);
  CHECK(parse_message("[model\nn = 3\n").find("t.cfg:1") != std::string::npos);
  CHECK(parse_message("n = 3\nn = 4\n").find("t.cfg:2") != std::string::npos);
  CHECK(parse_message("[model]\n[model]\n").find("duplicate section") != std::string::npos);
  CHECK(parse_message("= 3\n").find("empty key") != std::string::npos);
}

TEST_CASE("unknown keys and bad values are refused") {
  CHECK(parse_message("[model]\nn = 3\nalhpa = 1\n").find("unknown key 'alhpa'") != std::string::npos);
  CHECK(parse_message("[model]\nn = 3.5\n").find("integer") != std::string::npos);
  CHECK(parse_message("[model]\nalpha = 1\nalpha_re = 1\n") != "");
  CHECK(parse_message("[model]\npotential = square(1)\n").find("potential") != std::string::npos);
  CHECK_THROWS_AS(evolution_from_config(parse_config("[evolve]\nobservers = x:3\n")), Error);
  CHECK_THROWS_AS(evolution_from_config(parse_config("[evolve]\npulse = sideways\n")), Error);
  CHECK_THROWS_AS(evolution_from_config(parse_config("[evolve]\nkernel = gpu\n")), Error);
  CHECK_THROWS_AS(read_config("/nonexistent/file.cfg"), Error);
}

TEST_CASE("model keys") {
  const auto m = model_from_config(parse_config(
      "[model]\nn = 4\nell = 1\nalpha = 1/2\nS_re = 0.25\npotential = yukawa(2,1)\n"
      "pert_eps = 0.1\npert_w = cutoff_inverse_square(1)\n"));
  CHECK(m.n == 4);
  CHECK(m.ell == 1);
  CHECK(m.alpha == cplx(0.5));
  CHECK(m.alpha_rational == std::make_pair(std::int64_t(1), std::int64_t(2)));
  CHECK(m.S == cplx(0.25));
  REQUIRE(m.perturbation.has_value());
  CHECK(m.perturbation->eps == 0.1);
  CHECK(std::abs(m.potential(1.0) - 2.0 * std::exp(-1.0)) < 1e-15);
  // complex alpha drops the rational tag
  const auto c = model_from_config(parse_config("n = 3\nalpha_re = 1\nalpha_im = 0.5\n"));
  CHECK(c.alpha == cplx(1.0, 0.5));
  CHECK_FALSE(c.alpha_rational.has_value());
}

TEST_CASE("canonical model section round-trips") {
  for (const char* text : {"[model]\nn = 3\nalpha = 1\n", "[model]\nn = 4\n",
                           "[model]\nn = 3\npotential = gauss(-2.5,1)\n",
                           "[model]\nn = 3\nalpha = 1\npert_eps = 0.1\npert_delta_t = 1\npert_w = cutoff_inverse_square(1)\n",
                           "[model]\nn = 5\nalpha_re = 0.3\nalpha_im = -0.2\nS_re = 0.1\n"}) {
    const auto m = model_from_config(parse_config(text));
    const auto canon = model_to_config(m);
    const auto m2 = model_from_config(parse_config(canon));
    CHECK(m2.hash() == m.hash());
    CHECK(model_to_config(m2) == canon);
  }
}

TEST_CASE("evolve keys and defaults") {
  const auto e = evolution_from_config(parse_config(
      "[evolve]\ndr = 0.1\ncfl = 0.4\nT_max = 800\norder = 2\nobservers = r:10, ray:1/2, scri:50\n"
      "pulse = time_symmetric\npulse_center = 7\npulse_width = 2\nsample_every = 3\nkernel = serial\n"));
  CHECK(e.dr == 0.1);
  CHECK(e.cfl == 0.4);
  CHECK(e.order == 2);
  REQUIRE(e.observers.size() == 3);
  CHECK(e.observers[1].key() == "ray_0.5");
  CHECK(e.observers[2].kind == RegionKind::ScriPlus);
  CHECK(e.data.kind == PulseKind::TimeSymmetric);
  CHECK(e.data.center == 7.0);
  CHECK(e.sample_every == 3);
  CHECK(e.kernel == KernelKind::Serial);
  const auto d = evolution_from_config(ConfigFile{});
  CHECK(d.order == 4);
  CHECK(d.data.kind == PulseKind::Ingoing);
  // the kernel choice does not enter the hash
  auto s = d;
  s.kernel = KernelKind::Serial;
  CHECK(s.hash() == d.hash());
  s.dr = 0.1;
  CHECK(s.hash() != d.hash());
}

TEST_CASE("shipped configurations load") {
  for (const char* name : {"mink3.cfg", "mink4.cfg", "invsq_a1.cfg", "invsq_a1_perturbed.cfg"}) {
    const auto cfg = read_config(config_dir() / name);
    CHECK_NOTHROW(model_from_config(cfg));
  }
  for (const char* name : {"quick.cfg", "invsq_a1_run.cfg", "mink4.cfg"}) {
    const auto cfg = read_config(config_dir() / name);
    CHECK_NOTHROW(evolution_from_config(cfg));
  }
}
