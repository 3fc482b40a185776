#pragma once

// Laurent polynomials sum_u f_u X^u with coefficients in End(A).
// The product follows composition: (f X^u)(g X^v) = (f o g) X^(u+v), so the
// polynomial of F o G is P_F * P_G.

#include "algca/finite_abelian.hpp"

#include <map>
#include <string>

namespace algca {

class LaurentPoly {
 public:
  explicit LaurentPoly(GroupSpec group) : group_(std::move(group)) {}
  LaurentPoly(GroupSpec group, const std::map<int, Endomorphism>& terms);

  static LaurentPoly monomial(const GroupSpec& group, int degree, const Endomorphism& coeff);
  static LaurentPoly one(const GroupSpec& group) { return monomial(group, 0, Endomorphism::identity(group)); }
  static LaurentPoly x_power(const GroupSpec& group, int degree) {
    return monomial(group, degree, Endomorphism::identity(group));
  }
  /// Scalar coefficients (multiplication maps); any alphabet.
  static LaurentPoly scalar(const GroupSpec& group, const std::map<int, std::int64_t>& coeffs);

  const GroupSpec& group() const { return group_; }
  const std::map<int, Endomorphism>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int min_degree() const;
  int max_degree() const;
  Endomorphism coefficient(int degree) const;

  /// Multiplication by X^k.
  LaurentPoly shifted(int k) const;
  /// Residues of the scalar coefficient at each degree; requires a cyclic alphabet.
  std::int64_t scalar_coefficient(int degree) const;

  std::string to_string() const;

  bool operator==(const LaurentPoly& other) const { return group_ == other.group_ && terms_ == other.terms_; }

 private:
  void add_term(int degree, const Endomorphism& coeff);

  GroupSpec group_;
  std::map<int, Endomorphism> terms_;

  friend LaurentPoly operator+(const LaurentPoly&, const LaurentPoly&);
  friend LaurentPoly operator*(const LaurentPoly&, const LaurentPoly&);
};

LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q);
LaurentPoly operator-(const LaurentPoly& p);
LaurentPoly operator-(const LaurentPoly& p, const LaurentPoly& q);
LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q);
LaurentPoly operator*(const Endomorphism& f, const LaurentPoly& p);
LaurentPoly pow(const LaurentPoly& p, std::uint64_t n);

}  // namespace algca
