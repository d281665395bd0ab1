#include "doctest.h"

#include "tsx/spaces.hpp"

#include <cmath>
#include <functional>

using namespace tsx;

namespace {

Scalar q(long a, long b) { return Scalar::exact(a, b); }

// sup of prod theta_{n_i} over index sequences (entries <= N, length <= N) whose sum / product reaches n
Scalar brute_hat(const ThetaSeq& s, RegMode mode, long n, long N) {
  Scalar best(0);
  std::function<void(long, long, Scalar, int)> go = [&](long acc, long, Scalar prod, int depth) {
    const bool reached = mode == RegMode::sum ? acc >= n : acc >= n;
    if (depth > 0 && reached) best = max(best, prod);
    if (depth == N) return;
    for (long f = 1; f <= N; ++f)
      go(mode == RegMode::sum ? acc + f : (depth == 0 ? f : acc * f), 0, prod * s.theta(f, Arithmetic::rational),
         depth + 1);
  };
  go(0, 0, Scalar(1), 0);
  return best;
}

}  // namespace

TEST_CASE("theta values") {
  CHECK(ThetaSeq::geometric(q(1, 2)).theta(3, Arithmetic::rational) == q(1, 8));
  CHECK(ThetaSeq::log_reciprocal().theta(3, Arithmetic::rational) == q(1, 2));
  CHECK(ThetaSeq::log_reciprocal().theta(1, Arithmetic::rational) == Scalar(1));
  auto ex = ThetaSeq::explicit_list({Scalar::parse("0.5"), Scalar::parse("0.3")}, Scalar::parse("0.5"));
  CHECK(ex.theta(3, Arithmetic::rational) == Scalar::parse("0.15"));
  CHECK(ThetaSeq::power_law(Scalar(2)).theta(4, Arithmetic::rational) == q(1, 2));
  CHECK(std::abs(ThetaSeq::power_law(Scalar(2)).theta(2, Arithmetic::float64).to_double() - std::sqrt(0.5)) < 1e-15);
  try {
    ThetaSeq::power_law(Scalar(2)).theta(2, Arithmetic::rational);
    FAIL("expected an irrational weight");
  } catch (const Error& e) {
    CHECK(e.code() == "IrrationalInRationalMode");
  }
  CHECK_THROWS_AS(ThetaSeq::log_reciprocal().theta(2, Arithmetic::rational), Error);
  CHECK_THROWS_AS(ThetaSeq::geometric(Scalar(0)), Error);
  CHECK_THROWS_AS(ThetaSeq::geometric(Scalar(1)), Error);
  CHECK_THROWS_AS(ThetaSeq::power_law(Scalar(1)), Error);
  CHECK_THROWS_AS(ThetaSeq::explicit_list({}, q(1, 2)), Error);
  CHECK_THROWS_AS(ThetaSeq::explicit_list({q(1, 2)}, Scalar(1)), Error);
  CHECK_THROWS_AS(ThetaSeq::geometric(q(1, 2)).theta(0, Arithmetic::rational), Error);
}

TEST_CASE("weights lie in (0,1] and are deterministic") {
  for (auto s : {ThetaSeq::geometric(q(2, 3)), ThetaSeq::power_law(Scalar(3)), ThetaSeq::log_reciprocal(),
                 ThetaSeq::scaled_power_law(Scalar::parse("0.9"), Scalar(2))})
    for (long n = 1; n <= 40; ++n) {
      Scalar t = s.theta(n, Arithmetic::float64);
      CHECK(t.to_double() > 0);
      CHECK(t.to_double() <= 1);
      CHECK(t == s.theta(n, Arithmetic::float64));
    }
}

TEST_CASE("regularize examples") {
  auto g = ThetaSeq::geometric(q(1, 3));
  auto hat = regularize(g, RegMode::sum, 8, Arithmetic::rational);
  for (long n = 1; n <= 8; ++n) CHECK(hat[n - 1] == pow(q(1, 3), static_cast<unsigned>(n)));
  auto a = ThetaSeq::explicit_list({q(1, 2), Scalar::parse("0.3")}, q(1, 2));
  auto ha = regularize(a, RegMode::sum, 2, Arithmetic::rational);
  CHECK(ha[0] == q(1, 2));
  CHECK(ha[1] == Scalar::parse("0.3"));
  auto b = ThetaSeq::explicit_list({Scalar::parse("0.6"), Scalar::parse("0.2")}, q(1, 2));
  CHECK(regularize(b, RegMode::sum, 2, Arithmetic::rational)[1] == Scalar::parse("0.36"));
}

TEST_CASE("regularize matches exhaustive combinations") {
  std::vector<ThetaSeq> seqs = {
      ThetaSeq::explicit_list({Scalar::parse("0.6"), Scalar::parse("0.2"), Scalar::parse("0.3"), q(1, 20)}, q(1, 2)),
      ThetaSeq::explicit_list({q(9, 10), q(1, 10), q(7, 10), q(1, 5), q(1, 2)}, q(1, 3)),
      ThetaSeq::geometric(q(3, 5))};
  const long N = 5;
  for (auto& s : seqs)
    for (RegMode mode : {RegMode::sum, RegMode::product}) {
      auto hat = regularize(s, mode, N, Arithmetic::rational);
      for (long n = 1; n <= N; ++n) {
        INFO(s.str() << " n=" << n);
        CHECK(hat[n - 1] == brute_hat(s, mode, n, N));
        CHECK(hat[n - 1] >= s.theta(n, Arithmetic::rational));
      }
      auto again = ThetaSeq::explicit_list(hat, q(1, 2));
      auto hat2 = regularize(again, mode, N, Arithmetic::rational);
      for (long n = 1; n <= N; ++n) CHECK(hat2[n - 1] == hat[n - 1]);
      auto rep = check_regularity(again, mode, N, Arithmetic::rational);
      for (auto& v : rep.violations) CHECK(v.find("super") == std::string::npos);
    }
}

TEST_CASE("regularity report") {
  CHECK(check_regularity(ThetaSeq::geometric(q(1, 2)), RegMode::sum, 10, Arithmetic::rational).violations.empty());
  auto ok = check_regularity(ThetaSeq::explicit_list({q(1, 2), Scalar::parse("0.3")}, q(1, 2)), RegMode::sum, 2,
                             Arithmetic::rational);
  CHECK(ok.super_multiplicative);
  auto bad = check_regularity(ThetaSeq::explicit_list({q(1, 2), Scalar::parse("0.2")}, q(1, 2)), RegMode::sum, 2,
                              Arithmetic::rational);
  CHECK_FALSE(bad.super_multiplicative);
  REQUIRE_FALSE(bad.violations.empty());
  CHECK(bad.violations.front().find("(1,1)") != std::string::npos);
}

TEST_CASE("derived parameters") {
  auto s = SpaceSpec::s_type(ThetaSeq::geometric(q(1, 2)), Arithmetic::rational);
  auto d = derived_params(s, 12);
  CHECK(d.theta_limit_exact);
  CHECK(d.theta_limit_estimate == q(1, 2));
  for (auto& c : d.c) CHECK(c == Scalar(1));
  auto t = SpaceSpec::preset("tzafriri:0.9");
  auto dt = derived_params(t, 30);
  for (auto& c : dt.c) CHECK(std::abs(c.to_double() - 0.9) < 1e-12);
  REQUIRE(dt.q_used);
  CHECK(*dt.q_used == doctest::Approx(2.0));
}

TEST_CASE("space presets and validation") {
  auto ts = SpaceSpec::preset("tsirelson");
  CHECK(ts.kind == SpaceSpec::Kind::Single);
  CHECK(ts.weight(1) == q(1, 2));
  CHECK(ts.level_family(1) == FamilyExpr::S(1));
  auto sch = SpaceSpec::preset("schlumprecht");
  CHECK(sch.kind == SpaceSpec::Kind::A);
  CHECK(sch.arithmetic == Arithmetic::float64);
  CHECK(sch.level_family(3) == FamilyExpr::A(3));
  auto gs = SpaceSpec::preset("geometric-s:1/2");
  CHECK(gs.weight(3) == q(1, 8));
  CHECK(gs.level_family(2) == FamilyExpr::S(2));
  auto x3 = gs.with_inner(3);
  CHECK(x3.level_family(2).str() == "S2[A3]");
  CHECK(x3.without_inner().level_family(2).str() == "S2");
  CHECK_THROWS_AS(SpaceSpec::preset("nope"), Error);
  CHECK_THROWS_AS(sch.with_inner(2), Error);
}
