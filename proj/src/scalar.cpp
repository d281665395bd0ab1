#include "tsx/scalar.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace tsx {

Scalar Scalar::exact(long num, long den) {
  if (den == 0) throw Error("ParseError", "zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::parse(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (c != ' ' && c != '\t' && c != '\r') text += c;
  if (text.empty()) throw Error("ParseError", "empty number");
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      mpz_class num(text.substr(0, slash), 10), den(text.substr(slash + 1), 10);
      if (den == 0) throw Error("ParseError", "zero denominator in '" + raw + "'");
      mpq_class q(num, den);
      q.canonicalize();
      return Scalar(q);
    }
    std::string mant = text;
    long exp10 = 0;
    auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
      mant = text.substr(0, e);
      exp10 = std::stol(text.substr(e + 1));
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      neg = mant[0] == '-';
      mant = mant.substr(1);
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty()) throw Error("ParseError", "bad number '" + raw + "'");
    for (char c : digits)
      if (c < '0' || c > '9') throw Error("ParseError", "bad number '" + raw + "'");
    mpz_class num(digits, 10);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    mpq_class q = exp10 >= 0 ? mpq_class(num * p10) : mpq_class(num, p10);
    q.canonicalize();
    if (neg) q = -q;
    return Scalar(q);
  } catch (const std::invalid_argument&) {
    throw Error("ParseError", "bad number '" + raw + "'");
  } catch (const std::out_of_range&) {
    throw Error("ParseError", "bad number '" + raw + "'");
  }
}

const mpq_class& Scalar::q() const {
  if (!is_exact()) throw Error("NotExact", "scalar is not exact");
  return std::get<mpq_class>(v_);
}

namespace {

// mpq get_d truncates; round to nearest, ties to even
double nearest_double(const mpq_class& q) {
  const double t = q.get_d();
  if (!std::isfinite(t) || mpq_class(t) == q) return t;
  const double u = std::nextafter(t, q > 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(u)) return t;
  const mpq_class dt = abs(q - mpq_class(t)), du = abs(mpq_class(u) - q);
  if (dt < du) return t;
  if (du < dt) return u;
  std::int64_t bits;
  std::memcpy(&bits, &t, sizeof bits);
  return (bits & 1) ? u : t;
}

}  // namespace

double Scalar::to_double() const {
  if (is_exact()) return nearest_double(std::get<mpq_class>(v_));
  return std::get<double>(v_);
}

Scalar Scalar::in_mode(Arithmetic a) const {
  if (a == Arithmetic::float64) return real(to_double());
  if (!is_exact()) throw Error("IrrationalInRationalMode", "float value in rational mode");
  return *this;
}

int Scalar::sign() const {
  if (is_exact()) return sgn(std::get<mpq_class>(v_));
  double d = std::get<double>(v_);
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

Scalar Scalar::abs() const { return sign() < 0 ? -*this : *this; }

Scalar Scalar::operator-() const {
  if (is_exact()) return Scalar(mpq_class(-std::get<mpq_class>(v_)));
  return Scalar(-std::get<double>(v_));
}

#define TSX_SCALAR_OP(OP)                                                   \
  Scalar& Scalar::operator OP##=(const Scalar& o) {                         \
    if (is_exact() && o.is_exact()) {                                       \
      std::get<mpq_class>(v_) OP## = std::get<mpq_class>(o.v_);             \
    } else {                                                                \
      v_ = to_double() OP o.to_double();                                    \
    }                                                                       \
    return *this;                                                           \
  }
TSX_SCALAR_OP(+)
TSX_SCALAR_OP(-)
TSX_SCALAR_OP(*)
#undef TSX_SCALAR_OP

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw Error("DivisionByZero", "division by zero");
  if (is_exact() && o.is_exact()) {
    std::get<mpq_class>(v_) /= std::get<mpq_class>(o.v_);
  } else {
    v_ = to_double() / o.to_double();
  }
  return *this;
}

int Scalar::cmp(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return ::cmp(std::get<mpq_class>(a.v_), std::get<mpq_class>(b.v_));
  double x = a.to_double(), y = b.to_double();
  return x < y ? -1 : (x > y ? 1 : 0);
}

std::string format_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string Scalar::str() const {
  if (is_exact()) return std::get<mpq_class>(v_).get_str();
  return format_double(std::get<double>(v_));
}

static double tol_of(const Scalar& a, const Scalar& b) {
  return kRelTol * std::max(std::fabs(a.to_double()), std::fabs(b.to_double()));
}

bool definitely_greater(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return a > b;
  return a.to_double() > b.to_double() + tol_of(a, b);
}

bool approx_le(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return a <= b;
  return a.to_double() <= b.to_double() + tol_of(a, b);
}

bool approx_eq(const Scalar& a, const Scalar& b) { return approx_le(a, b) && approx_le(b, a); }

Scalar max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
Scalar min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }

Scalar pow(const Scalar& base, unsigned n) {
  if (base.is_exact()) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.q().get_num_mpz_t(), n);
    mpz_pow_ui(den.get_mpz_t(), base.q().get_den_mpz_t(), n);
    return Scalar::exact(mpq_class(num, den));
  }
  return Scalar::real(std::pow(base.to_double(), static_cast<double>(n)));
}

}  // namespace tsx
