#include "doctest.h"
#include "oracle.hpp"
#include "tsx/audit.hpp"
#include "tsx/io.hpp"

#include <filesystem>
#include <fstream>

using namespace tsx;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_vector(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string space_error(const std::string& text) {
  try {
    parse_space(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("vector text format") {
  auto x = parse_vector("3\t2/3\n4\t2/3\n5\t2/3");
  CHECK(x == SparseVector::uniform({3, 4, 5}, Scalar::exact(2, 3)));
  CHECK(format_vector(x) == "3\t2/3\n4\t2/3\n5\t2/3\n");

  auto y = parse_vector("# header\n1 0\n2\t-1/2   # trailing\n\n7 3\n");
  REQUIRE(y.entries().size() == 2);
  CHECK(y.entries()[0].first == 2);

  CHECK(parse_error("4\t1\n3\t1\n").find("line 2") != std::string::npos);
  CHECK(parse_error("1\t1\n1\t2\n").find("line 2") != std::string::npos);
  CHECK(parse_error("0\t1\n").find("line 1") != std::string::npos);
  CHECK(parse_error("1\tabc\n").find("line 1") != std::string::npos);
  CHECK(parse_error("1\n").find("line 1") != std::string::npos);
}

TEST_CASE("vector round trip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto mode = i % 2 ? Arithmetic::float64 : Arithmetic::rational;
    auto x = oracle::random_vector(rng, 8, 30, mode);
    if (mode == Arithmetic::float64) x = x.scaled(Scalar::real(1.0 / 3.0));
    CHECK(parse_vector(format_vector(x), mode) == x);
  }
}

TEST_CASE("functional s-expressions") {
  auto f = parse_sexpr("(n 1 (l + 3) (l + 4))");
  CHECK_FALSE(f.leaf);
  CHECK(f.weight_index == 1);
  REQUIRE(f.children.size() == 2);
  CHECK(f.children[1].coord == 4);
  CHECK(to_sexpr(f) == "(n 1 (l + 3) (l + 4))");

  std::mt19937_64 rng(5);
  auto sp = SpaceSpec::preset("tsirelson");
  for (int i = 0; i < 100; ++i) {
    FiniteSet coords;
    for (Coord k = 1 + static_cast<Coord>(rng() % 4); k <= 14; ++k) coords.push_back(k);
    auto g = random_functional(sp, coords, rng, 4);
    CHECK(parse_sexpr(to_sexpr(g)) == g);
  }
  CHECK_THROWS_AS(parse_sexpr("(n 1 (l + 3)"), Error);
  CHECK_THROWS_AS(parse_sexpr("(q 1)"), Error);
}

TEST_CASE("space configs") {
  auto s = parse_space("kind = S\ntheta = geometric:1/2\n");
  CHECK(s.kind == SpaceSpec::Kind::S);
  CHECK(s.weight(3) == Scalar::exact(1, 8));

  auto a = parse_space("# c0 space\nkind = A\ntheta = geometric:1/3\narithmetic = rational\n");
  CHECK(a.kind == SpaceSpec::Kind::A);

  auto single = parse_space("kind = single\nsingle_family = S1[A2]\nsingle_theta = 1/2\n");
  CHECK(single.kind == SpaceSpec::Kind::Single);

  CHECK(parse_space("preset = schlumprecht\n").arithmetic == Arithmetic::float64);
  CHECK(parse_space("kind = S\ntheta = geometric:1/2\ninner_ak = 2\n").inner_ak == 2);

  CHECK(space_error("kind = S\n").find("line 1") != std::string::npos);
  CHECK(space_error("kind = S\ntheta = geometric:1/2\ncolour = red\n").find("line 3") != std::string::npos);
  CHECK(space_error("kind = S\ntheta = geometric:1/2\ntheta = geometric:1/3\n").find("line 3") != std::string::npos);
  CHECK(space_error("kind = A\ntheta = bogus\n").find("line 2") != std::string::npos);
  CHECK(space_error("kind = S\ntheta = geometric:1/2\narithmetic = decimal\n").find("line 3") != std::string::npos);
}

TEST_CASE("explicit theta files") {
  auto dir = std::filesystem::temp_directory_path() / "tsx_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "weights.txt") << "# weights\n1/2\n1/4\ntail 1/2\n";
    std::ofstream(dir / "x.cfg") << "kind = S\ntheta = explicit:weights.txt\n";
  }
  auto sp = load_space((dir / "x.cfg").string());
  CHECK(sp.weight(1) == Scalar::exact(1, 2));
  CHECK(sp.weight(2) == Scalar::exact(1, 4));
  CHECK(sp.weight(3) == Scalar::exact(1, 8));

  // configs written back use the inline form
  auto again = parse_space(format_space(sp));
  for (long n = 1; n <= 6; ++n) CHECK(again.weight(n) == sp.weight(n));
  std::filesystem::remove_all(dir);
}

TEST_CASE("space round trip") {
  for (const char* name : {"tsirelson", "schlumprecht", "tzafriri:9/10", "geometric-s:1/4"}) {
    auto sp = SpaceSpec::preset(name);
    auto back = parse_space(format_space(sp));
    CHECK(format_space(back) == format_space(sp));
    const long top = sp.kind == SpaceSpec::Kind::Single ? 1 : 5;
    for (long n = 1; n <= top; ++n) CHECK(back.weight(n) == sp.weight(n));
  }
  auto k = parse_space("kind = single\nsingle_family = S2\nsingle_theta = 1/3\nname = mine\n");
  CHECK(format_space(parse_space(format_space(k))) == format_space(k));
}

TEST_CASE("report JSON") {
  AuditReport r;
  r.suite = "demo";
  r.seed = 9;
  r.status = "ok";
  ReportRow row;
  row.id = "a";
  row.values = {{"x", "1/2"}};
  row.pass = true;
  r.rows.push_back(row);
  auto j = to_json(r);
  CHECK(to_json(report_from_json(j)).dump() == j.dump());
  CHECK(render_table(r).find("pass") != std::string::npos);
}
