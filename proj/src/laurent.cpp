#include "algca/laurent.hpp"

#include "algca/error.hpp"

#include <sstream>

namespace algca {

LaurentPoly::LaurentPoly(GroupSpec group, const std::map<int, Endomorphism>& terms) : group_(std::move(group)) {
  for (const auto& [d, f] : terms) {
    if (!(f.source() == group_) || !f.is_square()) throw ShapeError("Laurent coefficient is not an endomorphism of " + group_.describe());
    add_term(d, f);
  }
}

LaurentPoly LaurentPoly::monomial(const GroupSpec& group, int degree, const Endomorphism& coeff) {
  return LaurentPoly(group, {{degree, coeff}});
}

LaurentPoly LaurentPoly::scalar(const GroupSpec& group, const std::map<int, std::int64_t>& coeffs) {
  LaurentPoly p(group);
  for (const auto& [d, c] : coeffs) p.add_term(d, Endomorphism::scalar(group, c));
  return p;
}

void LaurentPoly::add_term(int degree, const Endomorphism& coeff) {
  auto it = terms_.find(degree);
  if (it == terms_.end()) {
    if (!coeff.is_zero()) terms_.emplace(degree, coeff);
    return;
  }
  Endomorphism sum = it->second + coeff;
  if (sum.is_zero())
    terms_.erase(it);
  else
    it->second = std::move(sum);
}

int LaurentPoly::min_degree() const {
  if (terms_.empty()) throw PreconditionError("zero polynomial has no degree");
  return terms_.begin()->first;
}

int LaurentPoly::max_degree() const {
  if (terms_.empty()) throw PreconditionError("zero polynomial has no degree");
  return terms_.rbegin()->first;
}

Endomorphism LaurentPoly::coefficient(int degree) const {
  auto it = terms_.find(degree);
  return it == terms_.end() ? Endomorphism::zero(group_) : it->second;
}

LaurentPoly LaurentPoly::shifted(int k) const {
  LaurentPoly out(group_);
  for (const auto& [d, f] : terms_) out.terms_.emplace(d + k, f);
  return out;
}

std::int64_t LaurentPoly::scalar_coefficient(int degree) const {
  if (!group_.is_cyclic()) throw PreconditionError("scalar coefficients need a cyclic alphabet");
  auto it = terms_.find(degree);
  return it == terms_.end() ? 0 : it->second.matrix()(0, 0);
}

std::string LaurentPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [d, f] : terms_) {
    if (!first) os << " + ";
    first = false;
    const bool unit = f == Endomorphism::identity(group_);
    if (!unit || d == 0) os << f.describe();
    if (d != 0) {
      os << 'X';
      if (d != 1) os << '^' << d;
    }
  }
  return os.str();
}

LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q) {
  if (!(p.group() == q.group())) throw ShapeError("polynomial sum: alphabet mismatch");
  LaurentPoly out = p;
  for (const auto& [d, f] : q.terms_) out.add_term(d, f);
  return out;
}

LaurentPoly operator-(const LaurentPoly& p) {
  std::map<int, Endomorphism> terms;
  for (const auto& [d, f] : p.terms()) terms.emplace(d, -f);
  return LaurentPoly(p.group(), terms);
}

LaurentPoly operator-(const LaurentPoly& p, const LaurentPoly& q) { return p + (-q); }

LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q) {
  if (!(p.group() == q.group())) throw ShapeError("polynomial product: alphabet mismatch");
  LaurentPoly out(p.group());
  for (const auto& [u, f] : p.terms_)
    for (const auto& [v, g] : q.terms_) out.add_term(u + v, compose(f, g));
  return out;
}

LaurentPoly operator*(const Endomorphism& f, const LaurentPoly& p) {
  return LaurentPoly::monomial(p.group(), 0, f) * p;
}

LaurentPoly pow(const LaurentPoly& p, std::uint64_t n) {
  LaurentPoly result = LaurentPoly::one(p.group());
  LaurentPoly base = p;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace algca
