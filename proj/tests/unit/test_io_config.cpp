#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fracwell/config.hpp"
#include "fracwell/io.hpp"

using namespace fracwell;
namespace fs = std::filesystem;

TEST_CASE("doubles print at full precision") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567, 0.0}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("csv layout") {
  CsvTable t({"a", "b"});
  t.row().add(1).add(0.5);
  t.row().add(std::string("x")).add(-2.0);
  CHECK(t.str() == "a,b\n1,0.5\nx,-2\n");
  const auto f = field_table(Grid::make(2, 2, 1), {1, 2, 3, 4});
  CHECK(f.header() == std::vector<std::string>{"x", "y", "value"});
  CHECK(f.rows() == 4);
}

TEST_CASE("disorder snapshots round-trip") {
  const auto g = Disorder::sample(SiteBox::covering(Grid::make(2, 4, 1)), DisorderDistribution::triangular_unit(), 8);
  const auto j = disorder_from_json(disorder_to_json(g));
  CHECK(j.values() == g.values());
  CHECK(j.box() == g.box());
  CHECK(j.seed() == g.seed());
  const fs::path p = fs::temp_directory_path() / "fracwell_unit_disorder.bin";
  write_disorder_binary(g, p);
  const auto b = read_disorder_binary(p);
  CHECK(b.values() == g.values());
  CHECK(b.distribution().law == g.distribution().law);
  fs::remove(p);
}

TEST_CASE("weight cache") {
  const fs::path dir = fs::temp_directory_path() / "fracwell_unit_cache";
  fs::remove_all(dir);
  const Grid g = Grid::make(1, 16, 1);
  const auto a = cached_exterior_weights(g, 0.3, dir);
  CHECK(fs::exists(dir / weight_cache_name(g, 0.3)));
  const auto b = cached_exterior_weights(g, 0.3, dir);
  CHECK(a == b);
  CHECK(a == exterior_weights(g, 0.3));
  fs::remove_all(dir);
}

TEST_CASE("minimal config is valid") {
  const auto kv = read_config_text("experiment = minimize\nd = 1\ns = 0.5\ntheta = 1 # comment\n\nn = 64\nseed = 7\n");
  const auto c = parse_config(kv, {});
  CHECK(c.experiment == "minimize");
  CHECK(c.s == 0.5);
  CHECK(c.n_list == std::vector<int>{64});
  CHECK(c.seed == 7);
  CHECK(output_stem(c) == "minimize_1d_s0.5_theta1_n64");
}

TEST_CASE("config errors name the key") {
  const std::map<std::string, std::string> base{{"experiment", "minimize"}};
  auto key_of = [&](std::map<std::string, std::string> kv) -> std::string {
    kv.insert(base.begin(), base.end());
    try {
      parse_config(kv, {});
    } catch (const ConfigError& e) {
      return e.key();
    }
    return "";
  };
  CHECK(key_of({{"s", "1.2"}}) == "s");
  CHECK(key_of({{"theta", "-1"}}) == "theta");
  CHECK(key_of({{"n", "63"}}) == "n");
  CHECK(key_of({{"n", ""}}) == "n");
  CHECK(key_of({{"colour", "red"}}) == "colour");
  CHECK(key_of({{"d", "two"}}) == "d");
  CHECK(key_of({{"K", "1.5"}}) == "K");
  CHECK(key_of({{"experiment", "bake"}}) == "experiment");
  CHECK(key_of({}) == "");
}

TEST_CASE("flags win over the file") {
  const auto c = parse_config({{"experiment", "minimize"}, {"theta", "1"}}, {{"theta", "0"}});
  CHECK(c.theta == 0.0);
}

TEST_CASE("config entries round-trip") {
  auto c = parse_config({{"experiment", "scaling"}, {"s_list", "0.25,0.5"}, {"n", "64,128,256"}}, {});
  auto entries = c.entries();
  entries.erase("v0");
  const auto d = parse_config(entries, {});
  CHECK(d.entries() == c.entries());
  CHECK(output_stem(d) == "scaling_1d_s0.25-0.5_theta1_n64-128-256");
}
