#pragma once

// Spatially periodic configurations of A^Z and cylinder sets.
//
// A PeriodicConfig is a point of A^Z, anchored at coordinate 0: word()[i mod q]
// is the letter at coordinate i. Shifts of a config are distinct points; use
// orbit_representative() / same_orbit() to compare up to shift.

#include "algca/finite_abelian.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace algca {

/// Mixed-radix packing of a word, first letter most significant.
std::uint64_t pack_word(std::uint64_t base, std::span<const Letter> word);
Word unpack_word(std::uint64_t base, std::uint64_t code, std::size_t length);
/// base^exponent, or throws CapExceeded when it exceeds `cap`.
std::uint64_t checked_power(std::uint64_t base, std::size_t exponent,
                            std::uint64_t cap = std::uint64_t{1} << 40);

class PeriodicConfig {
 public:
  /// The word is reduced to its minimal period. Throws ShapeError on empty words or bad letters.
  PeriodicConfig(GroupSpec alphabet, Word word);

  static PeriodicConfig constant(const GroupSpec& alphabet, Letter a) { return {alphabet, Word{a}}; }
  static PeriodicConfig zero(const GroupSpec& alphabet) { return constant(alphabet, 0); }

  const GroupSpec& alphabet() const { return alphabet_; }
  const Word& word() const { return word_; }
  std::size_t period() const { return word_.size(); }
  bool is_zero() const { return word_.size() == 1 && word_[0] == 0; }

  Letter at(std::int64_t i) const;
  Word window(std::int64_t start, std::size_t length) const;

  /// Least rotation of the period word.
  PeriodicConfig orbit_representative() const;
  bool same_orbit(const PeriodicConfig& other) const;

  /// "^inf(w)^inf" with letters rendered by the alphabet.
  std::string to_string() const;

  bool operator==(const PeriodicConfig& other) const { return word_ == other.word_ && alphabet_ == other.alphabet_; }
  std::strong_ordering operator<=>(const PeriodicConfig& other) const;

 private:
  GroupSpec alphabet_;
  Word word_;
};

struct PeriodicConfigHash {
  std::size_t operator()(const PeriodicConfig& x) const noexcept;
};

/// sigma^m: result[i] = x[i + m].
PeriodicConfig config_shift(const PeriodicConfig& x, std::int64_t m);
PeriodicConfig config_add(const PeriodicConfig& x, const PeriodicConfig& y);
PeriodicConfig config_neg(const PeriodicConfig& x);

/// Block recoding phi_r: block i of the result is x[r i .. r i + r - 1], a letter of A^r.
PeriodicConfig group_blocks(const PeriodicConfig& x, std::size_t r);
PeriodicConfig ungroup_blocks(const PeriodicConfig& x, const GroupSpec& base, std::size_t r);
/// Word versions; the word length must be a multiple of r.
Word group_blocks(const GroupSpec& base, std::span<const Letter> word, std::size_t r);
Word ungroup_blocks(const GroupSpec& base, std::span<const Letter> word, std::size_t r);

struct Cylinder {
  std::int64_t offset = 0;
  Word word;

  auto operator<=>(const Cylinder&) const = default;
};

bool in_cylinder(const PeriodicConfig& x, const Cylinder& c);

std::string word_string(const GroupSpec& alphabet, std::span<const Letter> word);

}  // namespace algca
