#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "magweyl/io.hpp"

using namespace magweyl;

namespace {

json small_config() {
  return json::parse(R"({
    "model": {"d": 2, "n": 2, "F": [[1, 0], [0, 1]]},
    "field": {"components": [{"j": 0, "k": 1, "modes": [{"m": [1, 0], "re": 0.5, "im": 0}, {"m": [-1, 0], "re": 0.5, "im": 0}]}]},
    "symbols": {
      "phi": {"atoms": [{"hull": {"modes": [{"m": [0, 0], "re": 1, "im": 0}]}, "gamma": 0.5, "center": [0.3, -0.2], "momentum": [0.5, 0.0]}]},
      "psi": {"atoms": [{"hull": {"modes": [{"m": [0, 1], "re": 0.4, "im": 0}]}, "gamma": 0.7, "center": [0, 0], "momentum": [0, 0]}],
              "realization": "XStar"}
    },
    "omega_grid": [8, 4],
    "hbar_list": [1, 0.5, 0.25],
    "seed": 11,
    "output": "out/small"
  })");
}

std::string message_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, RoundTrip) {
  RunConfig c = config_from_json(small_config());
  EXPECT_EQ(c.pair, (std::vector<std::string>{"phi", "psi"}));
  EXPECT_EQ(c.omega_grid, (std::vector<int>{8, 4}));
  EXPECT_EQ(c.second().realization(), Realization::XStar);
  json again = to_json(config_from_json(to_json(c)));
  EXPECT_EQ(again, to_json(c));
  EXPECT_EQ(config_hash(c), config_hash(config_from_json(again)));
}

TEST(Config, HashIgnoresOutputOnly) {
  json j = small_config();
  std::uint64_t base = config_hash(config_from_json(j));
  j["output"] = "elsewhere/run";
  EXPECT_EQ(config_hash(config_from_json(j)), base);
  j["seed"] = 12;
  EXPECT_NE(config_hash(config_from_json(j)), base);
}

TEST(Config, ErrorsCarryPointers) {
  json j = small_config();
  j["hbar_list"] = {1.0, 0.5, 0.5};
  EXPECT_EQ(message_of(j).rfind("/hbar_list/2", 0), 0u);
  j = small_config();
  j["symbols"]["phi"]["atoms"][0]["gamma"] = -1.0;
  EXPECT_EQ(message_of(j).rfind("/symbols/phi/atoms/0/gamma", 0), 0u);
  j = small_config();
  j["model"].erase("F");
  EXPECT_EQ(message_of(j).rfind("/model/F", 0), 0u);
  j = small_config();
  j["pair"] = {"phi", "nope"};
  EXPECT_EQ(message_of(j).rfind("/pair/1", 0), 0u);
  j = small_config();
  j["grid"] = {{"L", 8.0}, {"N", 12}};
  EXPECT_EQ(message_of(j).rfind("/grid/N", 0), 0u);
}

TEST(Hash, PublishedFnvVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(hash_hex(0xabcull), "0000000000000abc");
}

TEST(Sampled, BinaryRoundTripIsExact) {
  GridSpec g(6.0, 8, 2, Realization::XStar);
  Sampled s(g, OmegaGrid(std::vector<int>{3, 2}));
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = cplx(std::sin(1.0 + i), 1.0 / (3.0 + i));
  s.prov.tolerance = 1e-11;
  s.prov.warnings = {"interpolated"};
  auto path = (std::filesystem::temp_directory_path() / "magweyl_io_roundtrip.bin").string();
  write_sampled(path, s);
  Sampled r = read_sampled(path);
  std::remove(path.c_str());
  EXPECT_EQ(r.grid.N, 8);
  EXPECT_EQ(r.grid.L, 6.0);
  EXPECT_EQ(r.grid.tag, Realization::XStar);
  EXPECT_EQ(r.omega.shape, s.omega.shape);
  EXPECT_EQ(r.prov.tolerance, 1e-11);
  EXPECT_EQ(r.prov.warnings, s.prov.warnings);
  ASSERT_EQ(r.values.size(), s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) EXPECT_EQ(r.values[i], s.values[i]);
}

TEST(Sampled, TruncatedPayloadThrows) {
  GridSpec g(6.0, 4, 1);
  Sampled s(g, OmegaGrid(std::vector<int>{2}));
  auto path = (std::filesystem::temp_directory_path() / "magweyl_io_truncated.bin").string();
  write_sampled(path, s);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(read_sampled(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST(Format, FullPrecision) {
  EXPECT_EQ(format_real(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_real(std::nan("")), "nan");
}
