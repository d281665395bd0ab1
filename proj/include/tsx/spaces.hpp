#ifndef tsx_spaces_hpp
#define tsx_spaces_hpp

#include "tsx/families.hpp"
#include "tsx/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tsx {

/// Weight sequence (theta_n), n >= 1.
class ThetaSeq {
 public:
  enum class Kind { Geometric, PowerLaw, ScaledPowerLaw, LogReciprocal, Explicit };

  static ThetaSeq geometric(const Scalar& theta);
  static ThetaSeq power_law(const Scalar& q);
  static ThetaSeq scaled_power_law(const Scalar& c, const Scalar& q);
  static ThetaSeq log_reciprocal();
  static ThetaSeq explicit_list(std::vector<Scalar> values, const Scalar& tail);

  Kind kind() const { return kind_; }
  // throws IrrationalInRationalMode when the exact value is not rational
  Scalar theta(long n, Arithmetic mode) const;
  // from this index on the sequence is non-increasing
  long monotone_from() const;
  // exponent q with theta_n ~ n^{-1/q} when it is known in closed form (infinite: p = 1)
  std::optional<double> known_q() const;
  bool q_infinite() const { return kind_ == Kind::LogReciprocal; }
  std::string str() const;

  const Scalar& param() const { return a_; }
  const Scalar& param2() const { return b_; }
  const std::vector<Scalar>& values() const { return values_; }

 private:
  Kind kind_ = Kind::Geometric;
  Scalar a_, b_;
  std::vector<Scalar> values_;
};

struct SpaceSpec {
  enum class Kind { A, S, Single };
  Kind kind = Kind::S;
  ThetaSeq thetas = ThetaSeq::geometric(Scalar::exact(1, 2));
  std::optional<FamilyExpr> single_family;
  Scalar single_theta;
  std::optional<int> inner_ak;
  Arithmetic arithmetic = Arithmetic::rational;
  std::string name;

  static SpaceSpec a_type(ThetaSeq t, Arithmetic a);
  static SpaceSpec s_type(ThetaSeq t, Arithmetic a, std::optional<int> inner = std::nullopt);
  static SpaceSpec single(FamilyExpr f, const Scalar& theta, Arithmetic a);
  // tsirelson, schlumprecht, tzafriri:<c>, geometric-s:<theta>
  static SpaceSpec preset(const std::string& name);

  void validate() const;
  // weight of a node with weight index n
  Scalar weight(long n) const;
  // family M_n used by nodes of weight index n (including the inner A_k)
  FamilyExpr level_family(long n) const;
  // largest admissible weight index (single-family spaces have only n = 1)
  long max_index() const { return kind == Kind::Single ? 1 : -1; }
  SpaceSpec without_inner() const;
  SpaceSpec with_inner(int k) const;
  std::string describe() const;
};

enum class RegMode { product, sum };

// element n-1 holds the regularized theta_n
std::vector<Scalar> regularize(const ThetaSeq& seq, RegMode mode, long horizon, Arithmetic a);

struct RegularityReport {
  std::vector<std::string> violations;
  bool monotone = true;
  bool super_multiplicative = true;
  bool ratio_non_increasing = true;  // theta_n / theta^n
  Scalar theta_limit_estimate;
};
RegularityReport check_regularity(const ThetaSeq& seq, RegMode mode, long horizon, Arithmetic a);

struct DerivedParams {
  std::vector<Scalar> theta_hat;
  Scalar theta_limit_estimate;
  bool theta_limit_exact = false;
  std::vector<Scalar> c;
  std::vector<std::optional<double>> q;  // q_1 is undefined
  std::optional<double> q_used;          // exponent used for c_n in A-type spaces
  bool estimates = true;
};
DerivedParams derived_params(const SpaceSpec& spec, long horizon);

// sup_{n<=horizon} theta_n^{1/n}; exact for geometric sequences
Scalar theta_limit(const ThetaSeq& seq, long horizon, Arithmetic a, bool* exact = nullptr);

}  // namespace tsx

#endif
