#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "ecx/io.hpp"
#include "ecx/model.hpp"

using namespace ecx;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double v : {1.0 / 3.0, 0.1, 1e-300, 6.02e23, -0.0, 2.5000000000000004}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
}

TEST_CASE("matrix CSV round-trips bit-exactly") {
  Mat m(2, 3);
  m << 1.0 / 3.0, 0.1, -7.25, 1e-17, 2e300, 0.0;
  const std::string path = temp_path("ecx_test_matrix.csv");
  write_matrix_csv(path, m, {"c0", "c1"}, {"p0", "p1", "p2"});
  const CsvMatrix back = read_matrix_csv(path);
  REQUIRE(back.values.rows() == 2);
  REQUIRE(back.values.cols() == 3);
  CHECK(back.row_ids == std::vector<std::string>{"c0", "c1"});
  CHECK(back.col_ids == std::vector<std::string>{"p0", "p1", "p2"});
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(back.values(i, j) == m(i, j));
  }
  std::filesystem::remove(path);
}

TEST_CASE("table CSV layout") {
  const std::string path = temp_path("ecx_test_table.csv");
  Vec a(2);
  a << 1.5, -2.0;
  Vec b(2);
  b << 0.0, 4.0;
  write_table_csv(path, {"c0", "c1"}, {"alpha", "beta"}, {a, b});
  CHECK(read_text_file(path) == "id,alpha,beta\nc0,1.5,0\nc1,-2,4\n");
  std::filesystem::remove(path);
}

TEST_CASE("json writer emits deterministic text") {
  JsonWriter j;
  Vec v(2);
  v << 0.5, 1.0;
  j.begin_object();
  j.kv("name", "run");
  j.kv("count", 3);
  j.kv("ratio", 0.25);
  j.kv("flag", true);
  j.kv("scores", v);
  j.kv("bad", std::nan(""));
  j.end_object();
  const std::string expected =
      "{\n"
      "  \"name\": \"run\",\n"
      "  \"count\": 3,\n"
      "  \"ratio\": 0.25,\n"
      "  \"flag\": true,\n"
      "  \"scores\": [\n"
      "    0.5,\n"
      "    1\n"
      "  ],\n"
      "  \"bad\": \"nan\"\n"
      "}";
  CHECK(j.str() == expected);
}

TEST_CASE("json writer escapes strings") {
  JsonWriter j;
  j.begin_object();
  j.kv("weird", "a\"b\\c\nd");
  j.end_object();
  CHECK(j.str() == "{\n  \"weird\": \"a\\\"b\\\\c\\nd\"\n}");
}

TEST_CASE("config parsing handles comments and whitespace") {
  const auto cfg = parse_config_text(
      "# header comment\n"
      "kind = circulant   # trailing comment\n"
      "\n"
      "  n_economies=25\n"
      "alpha = 0.75\n");
  CHECK(cfg.at("kind") == "circulant");
  CHECK(cfg.at("n_economies") == "25");
  CHECK(cfg.at("alpha") == "0.75");
  CHECK(cfg.size() == 3);

  CHECK_THROWS_AS(parse_config_text("just a bare line\n"), ValidationError);
  CHECK_THROWS_AS(
      spec_from_config(parse_config_text("n_economies = ten\n")),
      ValidationError);
}

TEST_CASE("spec to config and back is stable") {
  GeneratorSpec s;
  s.kind = GeneratorKind::block;
  s.n_economies = 33;
  s.n_activities = 44;
  s.n_capabilities = 5;
  s.seed = 987654321012345ULL;
  s.alpha = 0.375;
  s.scale = 2.0;
  s.profile_halfwidth = 3;
  s.profile_plateau = 1;
  s.blocks = 4;

  const GeneratorSpec t = spec_from_config(parse_config_text(config_from_spec(s)));
  CHECK(t.kind == s.kind);
  CHECK(t.n_economies == s.n_economies);
  CHECK(t.n_activities == s.n_activities);
  CHECK(t.n_capabilities == s.n_capabilities);
  CHECK(t.seed == s.seed);
  CHECK(t.alpha == s.alpha);
  CHECK(t.scale == s.scale);
  CHECK(t.profile_halfwidth == s.profile_halfwidth);
  CHECK(t.profile_plateau == s.profile_plateau);
  CHECK(t.blocks == s.blocks);
}

TEST_CASE("unknown generator kind in config is rejected") {
  CHECK_THROWS_AS(spec_from_config(parse_config_text("kind = pyramid\n")),
                  ValidationError);
}

TEST_CASE("ensure_directory creates nested paths") {
  const std::string dir = temp_path("ecx_test_dir/nested/deep");
  ensure_directory(dir);
  CHECK(std::filesystem::is_directory(dir));
  std::filesystem::remove_all(temp_path("ecx_test_dir"));
}
