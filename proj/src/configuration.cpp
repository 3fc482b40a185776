#include "algca/configuration.hpp"

#include "algca/error.hpp"

#include <algorithm>
#include <sstream>

namespace algca {

std::uint64_t pack_word(std::uint64_t base, std::span<const Letter> word) {
  std::uint64_t code = 0;
  for (Letter a : word) code = code * base + a;
  return code;
}

Word unpack_word(std::uint64_t base, std::uint64_t code, std::size_t length) {
  Word w(length);
  for (std::size_t i = length; i-- > 0;) {
    w[i] = static_cast<Letter>(code % base);
    code /= base;
  }
  return w;
}

std::uint64_t checked_power(std::uint64_t base, std::size_t exponent, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (v > cap / base) throw CapExceeded("enumeration size " + std::to_string(base) + "^" +
                                          std::to_string(exponent) + " exceeds cap " + std::to_string(cap));
    v *= base;
  }
  return v;
}

namespace {

std::size_t minimal_period(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t q = 1; q < n; ++q) {
    if (n % q != 0) continue;
    bool ok = true;
    for (std::size_t i = q; i < n && ok; ++i) ok = w[i] == w[i - q];
    if (ok) return q;
  }
  return n;
}

}  // namespace

PeriodicConfig::PeriodicConfig(GroupSpec alphabet, Word word) : alphabet_(std::move(alphabet)), word_(std::move(word)) {
  if (word_.empty()) throw ShapeError("periodic configuration needs a nonempty word");
  for (Letter a : word_)
    if (a >= alphabet_.order()) throw ShapeError("letter outside alphabet " + alphabet_.describe());
  word_.resize(minimal_period(word_));
}

Letter PeriodicConfig::at(std::int64_t i) const {
  return word_[static_cast<std::size_t>(mod(i, static_cast<std::int64_t>(word_.size())))];
}

Word PeriodicConfig::window(std::int64_t start, std::size_t length) const {
  Word w(length);
  for (std::size_t j = 0; j < length; ++j) w[j] = at(start + static_cast<std::int64_t>(j));
  return w;
}

PeriodicConfig PeriodicConfig::orbit_representative() const {
  Word best = word_;
  Word rotated = word_;
  for (std::size_t k = 1; k < word_.size(); ++k) {
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    if (rotated < best) best = rotated;
  }
  return {alphabet_, std::move(best)};
}

bool PeriodicConfig::same_orbit(const PeriodicConfig& other) const {
  return orbit_representative() == other.orbit_representative();
}

std::string PeriodicConfig::to_string() const {
  std::string inner = word_string(alphabet_, word_);
  if (word_.size() > 1) inner = "(" + inner + ")";
  return "^inf" + inner + "^inf";
}

std::strong_ordering PeriodicConfig::operator<=>(const PeriodicConfig& other) const {
  if (auto c = alphabet_.moduli() <=> other.alphabet_.moduli(); c != 0) return c;
  return word_ <=> other.word_;
}

std::size_t PeriodicConfigHash::operator()(const PeriodicConfig& x) const noexcept {
  std::size_t h = x.period();
  for (Letter a : x.word()) h = h * 1000003u ^ (a + 0x9e3779b9u + (h << 6) + (h >> 2));
  return h;
}

PeriodicConfig config_shift(const PeriodicConfig& x, std::int64_t m) {
  return {x.alphabet(), x.window(m, x.period())};
}

PeriodicConfig config_add(const PeriodicConfig& x, const PeriodicConfig& y) {
  if (!(x.alphabet() == y.alphabet())) throw ShapeError("config_add: alphabet mismatch");
  const std::size_t q = lcm_u64(x.period(), y.period());
  Word w(q);
  for (std::size_t i = 0; i < q; ++i) w[i] = x.alphabet().add(x.word()[i % x.period()], y.word()[i % y.period()]);
  return {x.alphabet(), std::move(w)};
}

PeriodicConfig config_neg(const PeriodicConfig& x) {
  Word w = x.word();
  for (Letter& a : w) a = x.alphabet().neg(a);
  return {x.alphabet(), std::move(w)};
}

Word group_blocks(const GroupSpec& base, std::span<const Letter> word, std::size_t r) {
  if (r == 0 || word.size() % r != 0) throw ShapeError("group_blocks: word length must be a multiple of r");
  Word out(word.size() / r);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<Letter>(pack_word(base.order(), word.subspan(i * r, r)));
  return out;
}

Word ungroup_blocks(const GroupSpec& base, std::span<const Letter> word, std::size_t r) {
  if (r == 0) throw ShapeError("ungroup_blocks: r must be positive");
  Word out;
  out.reserve(word.size() * r);
  for (Letter block : word) {
    const Word part = unpack_word(base.order(), block, r);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

PeriodicConfig group_blocks(const PeriodicConfig& x, std::size_t r) {
  if (r == 0) throw ShapeError("group_blocks: r must be positive");
  const Word w = x.window(0, lcm_u64(x.period(), r));
  return {x.alphabet().power(r), group_blocks(x.alphabet(), w, r)};
}

PeriodicConfig ungroup_blocks(const PeriodicConfig& x, const GroupSpec& base, std::size_t r) {
  if (!(base.power(r) == x.alphabet())) throw ShapeError("ungroup_blocks: alphabet is not base^r");
  return {base, ungroup_blocks(base, x.word(), r)};
}

bool in_cylinder(const PeriodicConfig& x, const Cylinder& c) {
  for (std::size_t j = 0; j < c.word.size(); ++j)
    if (x.at(c.offset + static_cast<std::int64_t>(j)) != c.word[j]) return false;
  return true;
}

std::string word_string(const GroupSpec& alphabet, std::span<const Letter> word) {
  std::string out;
  for (Letter a : word) out += alphabet.letter_string(a);
  return out;
}

}  // namespace algca
