#ifndef tsx_scalar_hpp
#define tsx_scalar_hpp

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace tsx {

enum class Arithmetic { rational, float64 };

// relative comparison tolerance used whenever a float operand is involved
inline constexpr double kRelTol = 1e-12;

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Exact rational or binary64 value. Mixed operations degrade to binary64.
class Scalar {
 public:
  Scalar() : v_(mpq_class(0)) {}
  Scalar(int n) : v_(mpq_class(n)) {}
  static Scalar exact(const mpq_class& q) { return Scalar(q); }
  static Scalar exact(long num, long den);
  static Scalar real(double d) { return Scalar(d); }
  // accepts "p/q", "-3", "0.15", "1e-3"; always exact
  static Scalar parse(const std::string& text);

  bool is_exact() const { return std::holds_alternative<mpq_class>(v_); }
  const mpq_class& q() const;
  double to_double() const;
  Scalar in_mode(Arithmetic a) const;

  int sign() const;
  bool is_zero() const { return sign() == 0; }
  Scalar abs() const;
  Scalar operator-() const;

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator<(const Scalar& a, const Scalar& b) { return cmp(a, b) < 0; }
  friend bool operator>(const Scalar& a, const Scalar& b) { return cmp(a, b) > 0; }
  friend bool operator<=(const Scalar& a, const Scalar& b) { return cmp(a, b) <= 0; }
  friend bool operator>=(const Scalar& a, const Scalar& b) { return cmp(a, b) >= 0; }
  friend bool operator==(const Scalar& a, const Scalar& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return cmp(a, b) != 0; }

  // "p/q" (or "p") when exact, 17 significant digits otherwise
  std::string str() const;

 private:
  explicit Scalar(const mpq_class& q) : v_(q) {}
  explicit Scalar(double d) : v_(d) {}
  static int cmp(const Scalar& a, const Scalar& b);

  std::variant<double, mpq_class> v_;
};

// a > b, treating float values within kRelTol as equal
bool definitely_greater(const Scalar& a, const Scalar& b);
// a <= b up to kRelTol when either side is a float
bool approx_le(const Scalar& a, const Scalar& b);
bool approx_eq(const Scalar& a, const Scalar& b);

Scalar max(const Scalar& a, const Scalar& b);
Scalar min(const Scalar& a, const Scalar& b);
Scalar pow(const Scalar& base, unsigned n);
std::string format_double(double d);

}  // namespace tsx

#endif
