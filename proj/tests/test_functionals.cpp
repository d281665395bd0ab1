#include "doctest.h"
#include "oracle.hpp"

#include "tsx/audit.hpp"
#include "tsx/norm.hpp"
#include "tsx/surgery.hpp"

using namespace tsx;

namespace {

Scalar q(long a, long b) { return Scalar::exact(a, b); }

TreeFunctional L(int sign, Coord k) { return TreeFunctional::make_leaf(sign, k); }
TreeFunctional N(long n, std::vector<TreeFunctional> c) { return TreeFunctional::make_node(n, std::move(c)); }

SparseVector ones(const FiniteSet& s) { return SparseVector::uniform(s, Scalar(1)); }

std::vector<SparseVector> random_blocks(std::mt19937_64& rng, const SparseVector& v) {
  std::vector<SparseVector> out;
  std::vector<SparseVector::Entry> cur;
  for (auto& e : v.entries()) {
    if (!cur.empty() && rng() % 3 == 0) {
      out.emplace_back(cur);
      cur.clear();
    }
    cur.push_back(e);
  }
  if (!cur.empty()) out.emplace_back(cur);
  return out;
}

std::vector<Coord> range(Coord a, Coord b) {
  std::vector<Coord> c;
  for (Coord k = a; k <= b; ++k) c.push_back(k);
  return c;
}

}  // namespace

TEST_CASE("validate examples") {
  auto ts = SpaceSpec::preset("tsirelson");
  CHECK(validate(ts, N(1, {L(1, 3), L(1, 4), L(1, 5)})).empty());
  auto v = validate(ts, N(1, {L(1, 1), L(1, 2)}));
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "root");
  auto gs = SpaceSpec::preset("geometric-s:1/2");
  CHECK(validate(gs, N(2, {N(1, {L(1, 3), L(1, 4)})})).empty());
  CHECK(eval_functional(gs, N(2, {N(1, {L(1, 3), L(1, 4)})}), ones({3, 4})) == q(1, 4));
  // children must be successive
  CHECK_FALSE(validate(ts, N(1, {L(1, 5), L(1, 4)})).empty());
  CHECK_FALSE(validate(ts, N(2, {L(1, 5)})).empty());
}

TEST_CASE("evaluation") {
  auto ts = SpaceSpec::preset("tsirelson");
  CHECK(eval_functional(ts, N(1, {L(1, 3), L(1, 4), L(1, 5)}), ones({3, 4, 5})) == q(3, 2));
  CHECK(eval_functional(ts, L(-1, 2), SparseVector::basis(2)) == Scalar(-1));
  CHECK(eval_functional(ts, N(1, {L(1, 3), L(1, 4)}), ones({7, 8})) == Scalar(0));
}

TEST_CASE("valid functionals never exceed the norm") {
  std::mt19937_64 rng(31);
  for (auto sp : {SpaceSpec::preset("tsirelson"), SpaceSpec::preset("geometric-s:1/2"),
                  SpaceSpec::a_type(ThetaSeq::geometric(q(1, 2)), Arithmetic::rational)}) {
    for (int trial = 0; trial < 60; ++trial) {
      auto f = random_functional(sp, range(1 + static_cast<Coord>(rng() % 4), 12), rng, 4);
      CHECK(validate(sp, f).empty());
      auto x = oracle::random_vector(rng, 10, 14);
      CHECK(eval_functional(sp, f, x) <= norm_value(sp, x));
    }
  }
}

TEST_CASE("comparability") {
  std::vector<SparseVector> blocks = {ones({2, 3}), ones({5, 6})};
  CHECK(is_comparable(N(1, {L(1, 2), L(1, 3), L(1, 5)}).children.front(), blocks));
  CHECK(is_comparable(L(1, 5), blocks));
  // straddles both blocks while containing neither
  CHECK_FALSE(is_comparable(N(1, {N(1, {L(1, 3), L(1, 5)}), L(1, 6)}), blocks));
  // contains every block it meets
  CHECK(is_comparable(N(1, {L(1, 2), L(1, 3), L(1, 5), L(1, 6)}), blocks));
  auto ts = SpaceSpec::preset("tsirelson");
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = oracle::random_vector(rng, 8, 16);
    CHECK(is_comparable(norm(ts, x).witness, {x}));
  }
}

TEST_CASE("s-expressions") {
  auto f = parse_sexpr("(n 1 (l + 3) (l + 4) (l + 5))");
  CHECK(f == N(1, {L(1, 3), L(1, 4), L(1, 5)}));
  CHECK(to_sexpr(f) == "(n 1 (l + 3) (l + 4) (l + 5))");
  CHECK(to_sexpr(L(-1, 2)) == "(l - 2)");
  for (const char* bad : {"", "(n 1)", "(l * 3)", "(l + 0)", "(n 0 (l + 1))", "(n 1 (l + 3)", "(x 1)"}) {
    INFO(bad);
    CHECK_THROWS_AS(parse_sexpr(bad), Error);
  }
  std::mt19937_64 rng(41);
  auto gs = SpaceSpec::preset("geometric-s:1/2");
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_functional(gs, range(2, 20), rng, 5);
    CHECK(parse_sexpr(to_sexpr(g)) == g);
  }
}

TEST_CASE("X_k split") {
  auto x2 = SpaceSpec::preset("geometric-s:1/2").with_inner(2);
  auto f = N(1, {L(1, 2), L(1, 3), L(1, 4), L(1, 5)});
  REQUIRE(validate(x2, f).empty());
  auto parts = split_xk(x2, f);
  REQUIRE(parts.size() >= 1);
  CHECK(parts.size() <= 3);
  auto x = x2.without_inner();
  for (auto& p : parts) CHECK(validate(x, p).empty());
  CHECK(same_leaf_multiset(parts, f));

  auto plain = N(1, {L(1, 3), L(1, 4)});
  auto one = split_xk(x2, plain);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == plain);

  CHECK_THROWS_AS(split_xk(x2, N(1, {L(1, 1), L(1, 2), L(1, 3)})), Error);

  std::mt19937_64 rng(43);
  for (int k : {2, 3}) {
    auto xk = SpaceSpec::preset("geometric-s:1/2").with_inner(k);
    for (int trial = 0; trial < 40; ++trial) {
      auto g = random_functional(xk, range(1 + static_cast<Coord>(rng() % 3), 16), rng, 4);
      auto ps = split_xk(xk, g);
      CHECK(ps.size() <= static_cast<std::size_t>(k + 1));
      for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(validate(xk.without_inner(), ps[i]).empty());
        if (i > 0) CHECK(ps[i - 1].max_coord() < ps[i].min_coord());
      }
      auto v = oracle::random_vector(rng, 12, 18);
      Scalar total(0);
      for (auto& p : ps) total += eval_functional(xk.without_inner(), p, v);
      CHECK(total == eval_functional(xk, g, v));
    }
  }
}

TEST_CASE("comparable rewriting") {
  auto ts = SpaceSpec::preset("tsirelson");
  auto blocks = std::vector<SparseVector>{ones({4, 5}), ones({6, 7})};
  auto comparable = N(1, {L(1, 4), L(1, 5), L(1, 6), L(1, 7)});
  CHECK(make_comparable(ts, comparable, blocks) == comparable);
  auto single = std::vector<SparseVector>{ones({3, 4, 5})};
  auto f = N(1, {L(1, 3), L(1, 5)});
  CHECK(make_comparable(ts, f, single) == f);

  std::mt19937_64 rng(47);
  for (auto sp : {ts, SpaceSpec::preset("geometric-s:1/2"),
                  SpaceSpec::a_type(ThetaSeq::geometric(q(1, 2)), Arithmetic::rational)}) {
    const int c = sp.kind == SpaceSpec::Kind::A ? 6 : 4;
    for (int trial = 0; trial < 60; ++trial) {
      auto v = oracle::random_vector(rng, 10, 14).abs();
      auto bl = random_blocks(rng, v);
      auto g = random_functional(sp, range(1, 14), rng, 4);
      auto r = make_comparable_ex(sp, g, bl);
      CHECK(validate(sp, r.f).empty());
      CHECK(is_comparable(r.f, bl));
      CHECK(Scalar(c) * eval_functional(sp, r.f, v) >= eval_functional(sp, g, v));
    }
  }
}
