#include "tsx/spaces.hpp"

#include <cmath>
#include <sstream>

namespace tsx {

namespace {

bool in_open_unit(const Scalar& s) { return s.sign() > 0 && s < Scalar(1); }

// exact k-th root of a positive integer, if any
std::optional<long> exact_root(long n, long k) {
  long r = std::lround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(k)));
  for (long c = std::max(1L, r - 1); c <= r + 1; ++c) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(c), static_cast<unsigned long>(k));
    if (p == n) return c;
  }
  return std::nullopt;
}

Scalar inv_root(long n, const Scalar& q, Arithmetic mode, const char* what) {
  if (mode == Arithmetic::float64) return Scalar::real(std::pow(static_cast<double>(n), -1.0 / q.to_double()));
  if (n == 1) return Scalar(1);
  if (q.is_exact() && q.q().get_den() == 1 && q.q().get_num().fits_slong_p()) {
    if (auto r = exact_root(n, q.q().get_num().get_si())) return Scalar::exact(1, *r);
  }
  throw Error("IrrationalInRationalMode",
              std::string(what) + ": theta_" + std::to_string(n) + " is irrational; use float64 arithmetic");
}

}  // namespace

ThetaSeq ThetaSeq::geometric(const Scalar& theta) {
  if (!in_open_unit(theta)) throw Error("InvalidTheta", "geometric ratio must lie in (0,1)");
  ThetaSeq t;
  t.kind_ = Kind::Geometric;
  t.a_ = theta;
  return t;
}

ThetaSeq ThetaSeq::power_law(const Scalar& q) {
  if (!(q > Scalar(1))) throw Error("InvalidTheta", "power law needs q > 1");
  ThetaSeq t;
  t.kind_ = Kind::PowerLaw;
  t.a_ = q;
  return t;
}

ThetaSeq ThetaSeq::scaled_power_law(const Scalar& c, const Scalar& q) {
  if (!in_open_unit(c)) throw Error("InvalidTheta", "scale must lie in (0,1)");
  if (!(q > Scalar(1))) throw Error("InvalidTheta", "power law needs q > 1");
  ThetaSeq t;
  t.kind_ = Kind::ScaledPowerLaw;
  t.a_ = c;
  t.b_ = q;
  return t;
}

ThetaSeq ThetaSeq::log_reciprocal() {
  ThetaSeq t;
  t.kind_ = Kind::LogReciprocal;
  return t;
}

ThetaSeq ThetaSeq::explicit_list(std::vector<Scalar> values, const Scalar& tail) {
  if (values.empty()) throw Error("InvalidTheta", "explicit sequence needs at least one value");
  for (auto& v : values)
    if (!in_open_unit(v)) throw Error("InvalidTheta", "explicit values must lie in (0,1), got " + v.str());
  if (!in_open_unit(tail)) throw Error("InvalidTheta", "tail ratio must lie in (0,1)");
  ThetaSeq t;
  t.kind_ = Kind::Explicit;
  t.values_ = std::move(values);
  t.a_ = tail;
  return t;
}

Scalar ThetaSeq::theta(long n, Arithmetic mode) const {
  if (n < 1) throw Error("InvalidIndex", "weight index must be >= 1");
  switch (kind_) {
    case Kind::Geometric:
      return pow(a_.in_mode(mode), static_cast<unsigned>(n));
    case Kind::PowerLaw:
      return inv_root(n, a_, mode, "powerlaw");
    case Kind::ScaledPowerLaw:
      return a_.in_mode(mode) * inv_root(n, b_, mode, "scaledpowerlaw");
    case Kind::LogReciprocal: {
      if (mode == Arithmetic::float64) return Scalar::real(1.0 / std::log2(static_cast<double>(n) + 1.0));
      long m = n + 1;
      if ((m & (m - 1)) == 0) {
        long k = 0;
        while (m > 1) {
          m >>= 1;
          ++k;
        }
        return Scalar::exact(1, k);
      }
      throw Error("IrrationalInRationalMode",
                  "logreciprocal: theta_" + std::to_string(n) + " is irrational; use float64 arithmetic");
    }
    case Kind::Explicit: {
      long len = static_cast<long>(values_.size());
      if (n <= len) return values_[n - 1].in_mode(mode);
      return values_.back().in_mode(mode) * pow(a_.in_mode(mode), static_cast<unsigned>(n - len));
    }
  }
  return Scalar(0);
}

long ThetaSeq::monotone_from() const {
  return kind_ == Kind::Explicit ? static_cast<long>(values_.size()) : 1;
}

std::optional<double> ThetaSeq::known_q() const {
  if (kind_ == Kind::PowerLaw) return a_.to_double();
  if (kind_ == Kind::ScaledPowerLaw) return b_.to_double();
  return std::nullopt;
}

std::string ThetaSeq::str() const {
  switch (kind_) {
    case Kind::Geometric:
      return "geometric:" + a_.str();
    case Kind::PowerLaw:
      return "powerlaw:" + a_.str();
    case Kind::ScaledPowerLaw:
      return "scaledpowerlaw:" + a_.str() + "," + b_.str();
    case Kind::LogReciprocal:
      return "logreciprocal";
    case Kind::Explicit: {
      std::string s = "explicit[";
      for (std::size_t i = 0; i < values_.size(); ++i) s += (i ? "," : "") + values_[i].str();
      return s + ";tail " + a_.str() + "]";
    }
  }
  return "";
}

SpaceSpec SpaceSpec::a_type(ThetaSeq t, Arithmetic a) {
  SpaceSpec s;
  s.kind = Kind::A;
  s.thetas = std::move(t);
  s.arithmetic = a;
  return s;
}

SpaceSpec SpaceSpec::s_type(ThetaSeq t, Arithmetic a, std::optional<int> inner) {
  SpaceSpec s;
  s.kind = Kind::S;
  s.thetas = std::move(t);
  s.arithmetic = a;
  s.inner_ak = inner;
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::single(FamilyExpr f, const Scalar& theta, Arithmetic a) {
  SpaceSpec s;
  s.kind = Kind::Single;
  s.single_family = std::move(f);
  s.single_theta = theta;
  s.arithmetic = a;
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::preset(const std::string& name) {
  auto arg = [&](const std::string& prefix) -> std::optional<std::string> {
    if (name.rfind(prefix, 0) == 0) return name.substr(prefix.size());
    return std::nullopt;
  };
  SpaceSpec s;
  if (name == "tsirelson") {
    s = single(FamilyExpr::S(1), Scalar::exact(1, 2), Arithmetic::rational);
  } else if (name == "schlumprecht") {
    s = a_type(ThetaSeq::log_reciprocal(), Arithmetic::float64);
  } else if (auto c = arg("tzafriri:")) {
    s = a_type(ThetaSeq::scaled_power_law(Scalar::parse(*c), Scalar(2)), Arithmetic::float64);
  } else if (auto t = arg("geometric-s:")) {
    s = s_type(ThetaSeq::geometric(Scalar::parse(*t)), Arithmetic::rational);
  } else {
    throw Error("UnknownPreset", "unknown space preset '" + name + "'");
  }
  s.name = name;
  return s;
}

void SpaceSpec::validate() const {
  if (inner_ak && kind != Kind::S) throw Error("InvalidSpace", "inner_ak is only allowed for S-type spaces");
  if (inner_ak && *inner_ak < 1) throw Error("InvalidSpace", "inner_ak must be >= 1");
  if (kind == Kind::Single) {
    if (!single_family) throw Error("InvalidSpace", "single kind needs single_family");
    if (!(single_theta.sign() > 0 && single_theta < Scalar(1)))
      throw Error("InvalidSpace", "single_theta must lie in (0,1)");
  }
}

Scalar SpaceSpec::weight(long n) const {
  if (kind == Kind::Single) {
    if (n != 1) throw Error("InvalidIndex", "single-family spaces only have weight index 1");
    return single_theta.in_mode(arithmetic);
  }
  return thetas.theta(n, arithmetic);
}

FamilyExpr SpaceSpec::level_family(long n) const {
  switch (kind) {
    case Kind::A:
      return FamilyExpr::A(static_cast<int>(n));
    case Kind::S:
      if (inner_ak) return FamilyExpr::compose(FamilyExpr::S(static_cast<int>(n)), FamilyExpr::A(*inner_ak));
      return FamilyExpr::S(static_cast<int>(n));
    case Kind::Single:
      if (n != 1) throw Error("InvalidIndex", "single-family spaces only have weight index 1");
      return *single_family;
  }
  return FamilyExpr::S(0);
}

SpaceSpec SpaceSpec::without_inner() const {
  SpaceSpec s = *this;
  s.inner_ak.reset();
  return s;
}

SpaceSpec SpaceSpec::with_inner(int k) const {
  SpaceSpec s = *this;
  s.inner_ak = k;
  s.validate();
  return s;
}

std::string SpaceSpec::describe() const {
  std::ostringstream os;
  const char* ar = arithmetic == Arithmetic::rational ? "rational" : "float64";
  switch (kind) {
    case Kind::A:
      os << "T[(A_n, theta_n)] theta=" << thetas.str();
      break;
    case Kind::S:
      os << "T[(S_n" << (inner_ak ? "[A" + std::to_string(*inner_ak) + "]" : std::string()) << ", theta_n)] theta="
         << thetas.str();
      break;
    case Kind::Single:
      os << "T[" << single_family->str() << ", " << single_theta.str() << "]";
      break;
  }
  os << " arithmetic=" << ar;
  return os.str();
}

std::vector<Scalar> regularize(const ThetaSeq& seq, RegMode mode, long N, Arithmetic a) {
  if (N < 1) throw Error("InvalidHorizon", "horizon must be >= 1");
  std::vector<Scalar> th(N + 1), R(N + 1);
  for (long m = 1; m <= N; ++m) th[m] = seq.theta(m, a);
  for (long n = 1; n <= N; ++n) {
    Scalar best = th[1];
    bool have = n <= 1;
    for (long m = 1; m <= N; ++m) {
      long rest = mode == RegMode::sum ? n - m : (n + m - 1) / m;
      bool done = mode == RegMode::sum ? rest <= 0 : rest <= 1;
      if (!done && (rest >= n)) continue;  // factor 1 in product mode never helps
      Scalar v = done ? th[m] : th[m] * R[rest];
      if (!have || v > best) {
        best = v;
        have = true;
      }
    }
    R[n] = best;
  }
  return std::vector<Scalar>(R.begin() + 1, R.end());
}

Scalar theta_limit(const ThetaSeq& seq, long N, Arithmetic a, bool* exact) {
  if (seq.kind() == ThetaSeq::Kind::Geometric) {
    if (exact) *exact = true;
    return seq.param().in_mode(a);
  }
  if (exact) *exact = false;
  double best = 0;
  for (long n = 1; n <= N; ++n)
    best = std::max(best, std::pow(seq.theta(n, Arithmetic::float64).to_double(), 1.0 / static_cast<double>(n)));
  return Scalar::real(best);
}

RegularityReport check_regularity(const ThetaSeq& seq, RegMode mode, long N, Arithmetic a) {
  if (N < 2) throw Error("InvalidHorizon", "horizon must be >= 2");
  RegularityReport r;
  std::vector<Scalar> th(N + 1);
  for (long n = 1; n <= N; ++n) th[n] = seq.theta(n, a);
  for (long n = 1; n < N; ++n)
    if (definitely_greater(th[n + 1], th[n])) {
      r.monotone = false;
      r.violations.push_back("monotone: theta_" + std::to_string(n + 1) + " > theta_" + std::to_string(n));
    }
  for (long n = 1; n <= N; ++n)
    for (long m = n; m <= N; ++m) {
      long idx = mode == RegMode::sum ? n + m : n * m;
      if (idx > N) break;
      Scalar prod = th[n] * th[m];
      if (definitely_greater(prod, th[idx])) {
        r.super_multiplicative = false;
        r.violations.push_back("super-multiplicativity at (" + std::to_string(n) + "," + std::to_string(m) +
                               "): theta_" + std::to_string(idx) + " = " + th[idx].str() + " < " + prod.str());
      }
    }
  bool exact = false;
  r.theta_limit_estimate = theta_limit(seq, N, a, &exact);
  Scalar prev;
  for (long n = 1; n <= N; ++n) {
    Scalar ratio = exact ? th[n] / pow(r.theta_limit_estimate, static_cast<unsigned>(n))
                         : Scalar::real(th[n].to_double() /
                                        std::pow(r.theta_limit_estimate.to_double(), static_cast<double>(n)));
    if (n > 1 && definitely_greater(ratio, prev)) {
      r.ratio_non_increasing = false;
      r.violations.push_back("theta_n/theta^n increases at n=" + std::to_string(n));
    }
    prev = ratio;
  }
  return r;
}

DerivedParams derived_params(const SpaceSpec& spec, long N) {
  if (N < 1) throw Error("InvalidHorizon", "horizon must be >= 1");
  DerivedParams d;
  Arithmetic a = spec.arithmetic;
  if (spec.kind == SpaceSpec::Kind::Single) {
    Scalar t = spec.weight(1);
    d.theta_hat = {t};
    d.theta_limit_estimate = t;
    d.theta_limit_exact = true;
    d.c = {Scalar(1)};
    d.q = {std::nullopt};
    return d;
  }
  const ThetaSeq& seq = spec.thetas;
  d.theta_hat = regularize(seq, spec.kind == SpaceSpec::Kind::A ? RegMode::product : RegMode::sum, N, a);
  d.theta_limit_estimate = theta_limit(seq, N, a, &d.theta_limit_exact);
  for (long n = 1; n <= N; ++n) {
    double t = seq.theta(n, Arithmetic::float64).to_double();
    if (n >= 2 && t < 1)
      d.q.push_back(std::log(static_cast<double>(n)) / std::log(1.0 / t));
    else
      d.q.push_back(std::nullopt);
  }
  if (spec.kind == SpaceSpec::Kind::A) {
    if (auto q = seq.known_q()) {
      d.q_used = *q;
    } else if (!seq.q_infinite()) {
      double best = 0;
      for (auto& q : d.q)
        if (q) best = std::max(best, *q);
      if (best > 0) d.q_used = best;
    }
    for (long n = 1; n <= N; ++n) {
      Scalar t = seq.theta(n, a);
      if (!d.q_used)
        d.c.push_back(t);
      else
        d.c.push_back(Scalar::real(t.to_double() * std::pow(static_cast<double>(n), 1.0 / *d.q_used)));
    }
  } else {
    for (long n = 1; n <= N; ++n) {
      Scalar t = seq.theta(n, a);
      if (d.theta_limit_exact)
        d.c.push_back(t / pow(d.theta_limit_estimate, static_cast<unsigned>(n)));
      else
        d.c.push_back(Scalar::real(t.to_double() /
                                   std::pow(d.theta_limit_estimate.to_double(), static_cast<double>(n))));
    }
  }
  d.estimates = !d.theta_limit_exact;
  return d;
}

}  // namespace tsx
