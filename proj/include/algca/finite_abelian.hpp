#pragma once

// Finite abelian groups presented as products of cyclic factors Z/d_1 x ... x Z/d_k.
//
// Elements are handled in two forms: GroupElement (explicit residues) at API
// boundaries, and Letter (a mixed-radix integer code, first factor most
// significant) inside the enumeration-heavy algorithms. Code 0 is always the
// zero element.

#include <Eigen/Dense>

#include <complex>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace algca {

using Letter = std::uint32_t;
using Word = std::vector<Letter>;

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Non-negative residue of a modulo m (m > 0).
constexpr std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b);
/// Product of the distinct prime factors of n.
std::uint64_t prime_radical(std::uint64_t n);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);
bool is_prime(std::uint64_t n);

struct GroupElement {
  std::vector<std::int64_t> residues;

  auto operator<=>(const GroupElement&) const = default;
};

class GroupSpec {
 public:
  GroupSpec() = default;
  /// Throws SpecError when the list is empty, a modulus is < 2, or the order overflows 2^31.
  explicit GroupSpec(std::vector<std::int64_t> moduli);

  static GroupSpec cyclic(std::int64_t n) { return GroupSpec({n}); }

  const std::vector<std::int64_t>& moduli() const { return moduli_; }
  std::size_t rank() const { return moduli_.size(); }
  std::uint64_t order() const { return order_; }
  std::uint64_t radical() const { return prime_radical(order_); }
  bool is_cyclic() const { return moduli_.size() == 1; }

  /// The product group A^q, letters ordered first-position-most-significant.
  GroupSpec power(std::size_t q) const;

  Letter encode(const GroupElement& x) const;
  GroupElement decode(Letter code) const;
  bool contains(const GroupElement& x) const;

  Letter add(Letter a, Letter b) const;
  Letter neg(Letter a) const;
  Letter sub(Letter a, Letter b) const { return add(a, neg(b)); }
  Letter scale(std::int64_t k, Letter a) const;
  /// Additive order of an element.
  std::uint64_t element_order(Letter a) const;

  std::string describe() const;
  std::string letter_string(Letter a) const;

  bool operator==(const GroupSpec& other) const { return moduli_ == other.moduli_; }

 private:
  std::vector<std::int64_t> moduli_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t order_ = 0;
  std::shared_ptr<const std::vector<Letter>> add_table_;
};

/// Homomorphism between product-of-cyclic groups, stored as an integer matrix
/// with entry (j, i) mapping source factor i into target factor j.
class Endomorphism {
 public:
  /// Validates hom-compatibility m_ji * d_i = 0 (mod d_j) and reduces entries.
  Endomorphism(GroupSpec source, GroupSpec target, IntMatrix matrix);
  Endomorphism(const GroupSpec& group, IntMatrix matrix) : Endomorphism(group, group, std::move(matrix)) {}

  static Endomorphism identity(const GroupSpec& group);
  static Endomorphism zero(const GroupSpec& group);
  static Endomorphism scalar(const GroupSpec& group, std::int64_t k);

  const GroupSpec& source() const { return source_; }
  const GroupSpec& target() const { return target_; }
  const IntMatrix& matrix() const { return matrix_; }
  bool is_square() const { return source_ == target_; }
  bool is_zero() const;

  GroupElement apply(const GroupElement& x) const;
  Letter apply(Letter x) const;

  bool operator==(const Endomorphism& other) const;

  std::string describe() const;

 private:
  GroupSpec source_;
  GroupSpec target_;
  IntMatrix matrix_;
  std::shared_ptr<const std::vector<Letter>> table_;
};

/// f o g (apply g first).
Endomorphism compose(const Endomorphism& f, const Endomorphism& g);
Endomorphism operator+(const Endomorphism& f, const Endomorphism& g);
Endomorphism operator-(const Endomorphism& f);
Endomorphism operator-(const Endomorphism& f, const Endomorphism& g);

GroupElement hom_apply(const Endomorphism& f, const GroupElement& x);
/// Bijectivity by exhaustive image enumeration.
bool hom_is_automorphism(const Endomorphism& f);
/// Inverse automorphism, or nullopt when f is not bijective.
std::optional<Endomorphism> hom_inverse(const Endomorphism& f);
/// Endomorphism whose action on letters is given by a table that is known to be additive.
Endomorphism endomorphism_from_table(const GroupSpec& group, std::span<const Letter> images);

/// Image and kernel as sorted letter lists.
std::vector<Letter> hom_image(const Endomorphism& f);
std::vector<Letter> hom_kernel(const Endomorphism& f);

struct Character {
  std::vector<std::int64_t> residues;

  auto operator<=>(const Character&) const = default;
};

/// exp(2 pi i sum c_i e_i / d_i).
std::complex<double> char_eval(const GroupSpec& group, const Character& chi, const GroupElement& x);
std::complex<double> char_eval(const GroupSpec& group, const Character& chi, Letter x);
bool is_trivial(const Character& chi);

struct Subgroup {
  GroupSpec ambient;
  std::vector<Letter> elements;  // sorted, contains 0

  std::size_t size() const { return elements.size(); }
  bool contains(Letter x) const;
  bool operator==(const Subgroup& other) const {
    return ambient == other.ambient && elements == other.elements;
  }
};

using LetterMap = std::function<Letter(Letter)>;

inline constexpr std::size_t kDefaultClosureCap = std::size_t{1} << 20;
inline constexpr std::size_t kDefaultSubgroupEnumerationCap = 4096;

/// Smallest subgroup of the ambient group containing the seeds and closed under every operator.
Subgroup subgroup_closure(const GroupSpec& ambient, std::span<const Letter> seeds,
                          std::span<const LetterMap> operators = {},
                          std::size_t cap = kDefaultClosureCap);

std::vector<Subgroup> enumerate_subgroups(const GroupSpec& group,
                                          std::size_t cap = kDefaultSubgroupEnumerationCap);
/// Subgroups of a given subgroup, expressed in its ambient group.
std::vector<Subgroup> enumerate_subgroups(const Subgroup& group,
                                          std::size_t cap = kDefaultSubgroupEnumerationCap);

}  // namespace algca
