#include "doctest.h"
#include "oracle.hpp"

#include "tsx/families.hpp"

using namespace tsx;

namespace {

FamilyExpr F(const char* s) { return FamilyExpr::parse(s); }

bool decomposition_valid(const FamilyExpr& fam, const Decomposition& d) {
  if (fam.kind() != FamilyExpr::Kind::Compose) return is_member(fam, d.set);
  FiniteSet minima, joined;
  for (auto& p : d.pieces) {
    if (p.set.empty() || !decomposition_valid(fam.inner(), p)) return false;
    minima.push_back(p.set.front());
    joined.insert(joined.end(), p.set.begin(), p.set.end());
  }
  return joined == d.set && is_member(fam.outer(), minima);
}

}  // namespace

TEST_CASE("membership examples") {
  CHECK(is_member(F("S1"), {3, 4, 5}));
  CHECK_FALSE(is_member(F("S1"), {1, 2}));
  CHECK(is_member(F("S2"), {2, 3, 4, 6, 7, 8}));
  CHECK(is_member(F("A3"), {1, 5, 9}));
  CHECK(is_member(F("S0"), {}));
  CHECK(is_member(F("S0"), {7}));
  CHECK_FALSE(is_member(F("S0"), {7, 8}));
  for (const char* f : {"A1", "S3", "S2[A3]", "A4[S1[A2]]"}) CHECK(is_member(F(f), {}));
}

TEST_CASE("membership agrees with the exhaustive oracle") {
  for (const char* f : {"A1", "A2", "A3", "S0", "S1", "S2", "S3", "S1[A2]", "S2[A3]", "A2[S1]", "A3[S1]",
                        "A4[S1[A2]]", "S1[A2][A2]", "S1[S1]"}) {
    const FamilyExpr fam = F(f);
    for (auto& s : oracle::subsets(10)) {
      if (s.size() > 9) continue;
      INFO(f << " " << set_str(s));
      CHECK(is_member(fam, s) == oracle::member(fam, s));
    }
  }
}

TEST_CASE("admissibility") {
  CHECK(is_admissible(F("S1"), {{2, 5}, {6, 9}}));
  CHECK_FALSE(is_admissible(F("S1"), {{1}, {2}}));
  CHECK_FALSE(is_admissible(F("A2"), {{1}, {2}, {3}}));
  CHECK_THROWS_WITH_AS(is_admissible(F("S1"), {{2, 5}, {4, 9}}), doctest::Contains("overlapping"), Error);
  try {
    is_admissible(F("S1"), {{3}, {2}});
    FAIL("expected NonSuccessive");
  } catch (const Error& e) {
    CHECK(e.code() == "NonSuccessive");
  }
}

TEST_CASE("decompose") {
  auto d = decompose(F("A3[S1]"), {2, 3, 4, 5});
  REQUIRE(d);
  CHECK(decomposition_valid(F("A3[S1]"), *d));
  auto single = decompose(F("S1"), {7});
  REQUIRE(single);
  CHECK(single->set == FiniteSet{7});
  CHECK_FALSE(decompose(F("S2"), {1, 2}));

  for (const char* f : {"S1[A2]", "A2[S1]", "S2[A3]", "A3[S1[A2]]"}) {
    const FamilyExpr fam = F(f);
    for (auto& s : oracle::subsets(9)) {
      auto w = decompose(fam, s);
      CHECK(w.has_value() == is_member(fam, s));
      if (w) CHECK(decomposition_valid(fam, *w));
    }
  }
}

TEST_CASE("max weight subset") {
  auto r = max_weight_subset(F("S1"), {{1, Scalar(5)}, {2, Scalar(3)}, {3, Scalar(2)}});
  CHECK(r.value == Scalar(5));
  CHECK(r.set == FiniteSet{1});
  auto e = max_weight_subset(F("S2"), {});
  CHECK(e.set.empty());
  CHECK(e.value == Scalar(0));
  CHECK(max_weight_subset(F("A2"), {{1, Scalar(1)}, {2, Scalar(1)}, {3, Scalar(1)}}).value == Scalar(2));

  std::mt19937_64 rng(5);
  for (const char* f : {"S0", "S1", "S2", "A2", "S1[A2]"}) {
    const FamilyExpr fam = F(f);
    for (int trial = 0; trial < 30; ++trial) {
      std::map<Coord, Scalar> w;
      for (Coord k = 1; k <= 8; ++k)
        if (rng() % 3) w[k] = Scalar::exact(static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 3));
      Scalar best(0);
      for (auto& s : oracle::subsets(8)) {
        if (!oracle::member(fam, s)) continue;
        Scalar v(0);
        for (Coord k : s)
          if (w.count(k)) v += w[k];
        best = max(best, v);
      }
      auto got = max_weight_subset(fam, w);
      CHECK(got.value == best);
      CHECK(is_member(fam, got.set));
    }
  }
}

TEST_CASE("maximal member") {
  CHECK(maximal_member(F("S1"), 4) == FiniteSet{4, 5, 6, 7});
  CHECK(maximal_member(F("A3"), 10) == FiniteSet{10, 11, 12});
  for (const char* f : {"S1", "S2", "S3", "A2[S1]", "S1[A2]"}) {
    for (Coord start = 1; start <= (std::string(f) == "S3" ? 2 : 4); ++start) {
      FiniteSet m = maximal_member(F(f), start);
      CHECK(m.front() == start);
      for (std::size_t i = 1; i < m.size(); ++i) CHECK(m[i] == m[i - 1] + 1);
      CHECK(is_member(F(f), m));
      FiniteSet ext = m;
      ext.push_back(m.back() + 1);
      CHECK_FALSE(is_member(F(f), ext));
    }
  }
}

TEST_CASE("maximal member guards runaway growth") {
  try {
    maximal_member(F("S3"), 4);
    FAIL("expected Unbounded");
  } catch (const Error& e) {
    CHECK(e.code() == "Unbounded");
  }
}

TEST_CASE("family laws on small grounds") {
  for (const char* f : {"A1", "A3", "S1", "S2", "S1[A2]", "A2[S1]"}) {
    const FamilyExpr fam = F(f);
    auto all = oracle::subsets(9);
    for (auto& s : all) {
      if (!is_member(fam, s)) continue;
      for (std::size_t i = 0; i < s.size(); ++i) {
        FiniteSet t = s;
        t.erase(t.begin() + static_cast<long>(i));
        CHECK(is_member(fam, t));
        FiniteSet u = s;
        u[i] += 1;
        if (i + 1 == s.size() || u[i] < s[i + 1]) CHECK(is_member(fam, u));
      }
    }
  }
}

TEST_CASE("family grammar") {
  for (const char* f : {"A1", "S0", "S12", "S2[A3]", "A4[S1[A2]]", "S1[A2][A3]"}) CHECK(F(f).str() == f);
  CHECK(F("S1[A2][A3]") == FamilyExpr::compose(FamilyExpr::compose(FamilyExpr::S(1), FamilyExpr::A(2)),
                                                FamilyExpr::A(3)));
  for (const char* bad : {"", "B1", "S", "S1[", "S1[A2", "A0", "S1 [A2]", "S1]"}) {
    INFO(bad);
    try {
      F(bad);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == "ParseError");
      CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
  }
  CHECK(parse_set("{2,3,4}") == FiniteSet{2, 3, 4});
  CHECK(parse_set("2,3,4,6,7,8") == FiniteSet{2, 3, 4, 6, 7, 8});
  CHECK_THROWS_AS(parse_set("3,2"), Error);
  CHECK_THROWS_AS(parse_set("0,2"), Error);
}
