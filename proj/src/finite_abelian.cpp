#include "algca/finite_abelian.hpp"

#include "algca/closure.hpp"
#include "algca/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace algca {

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a / gcd_u64(a, b) * b;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::uint64_t prime_radical(std::uint64_t n) {
  std::uint64_t r = 1;
  for (std::uint64_t p : prime_factors(n)) r *= p;
  return r;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

namespace {

constexpr std::uint64_t kMaxOrder = std::uint64_t{1} << 31;
constexpr std::uint64_t kAddTableLimit = 256;
constexpr std::uint64_t kHomTableLimit = std::uint64_t{1} << 20;

}  // namespace

GroupSpec::GroupSpec(std::vector<std::int64_t> moduli) : moduli_(std::move(moduli)) {
  if (moduli_.empty()) throw SpecError("alphabet.moduli: must be a nonempty list");
  order_ = 1;
  for (std::int64_t d : moduli_) {
    if (d < 2) throw SpecError("alphabet.moduli: every modulus must be >= 2, got " + std::to_string(d));
    order_ *= static_cast<std::uint64_t>(d);
    if (order_ > kMaxOrder) throw SpecError("alphabet.moduli: group order exceeds 2^31");
  }
  strides_.assign(moduli_.size(), 1);
  for (std::size_t i = moduli_.size(); i-- > 1;)
    strides_[i - 1] = strides_[i] * static_cast<std::uint64_t>(moduli_[i]);

  if (order_ <= kAddTableLimit) {
    auto table = std::make_shared<std::vector<Letter>>(order_ * order_);
    for (Letter a = 0; a < order_; ++a) {
      const GroupElement ea = decode(a);
      for (Letter b = 0; b < order_; ++b) {
        const GroupElement eb = decode(b);
        GroupElement sum;
        sum.residues.resize(rank());
        for (std::size_t i = 0; i < rank(); ++i)
          sum.residues[i] = (ea.residues[i] + eb.residues[i]) % moduli_[i];
        (*table)[a * order_ + b] = encode(sum);
      }
    }
    add_table_ = std::move(table);
  }
}

GroupSpec GroupSpec::power(std::size_t q) const {
  std::vector<std::int64_t> m;
  m.reserve(moduli_.size() * q);
  for (std::size_t i = 0; i < q; ++i) m.insert(m.end(), moduli_.begin(), moduli_.end());
  return GroupSpec(std::move(m));
}

Letter GroupSpec::encode(const GroupElement& x) const {
  if (x.residues.size() != rank()) throw ShapeError("element rank does not match alphabet " + describe());
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < rank(); ++i)
    code += static_cast<std::uint64_t>(mod(x.residues[i], moduli_[i])) * strides_[i];
  return static_cast<Letter>(code);
}

GroupElement GroupSpec::decode(Letter code) const {
  GroupElement x;
  x.residues.resize(rank());
  std::uint64_t c = code;
  for (std::size_t i = 0; i < rank(); ++i) {
    x.residues[i] = static_cast<std::int64_t>(c / strides_[i]);
    c %= strides_[i];
  }
  return x;
}

bool GroupSpec::contains(const GroupElement& x) const {
  if (x.residues.size() != rank()) return false;
  for (std::size_t i = 0; i < rank(); ++i)
    if (x.residues[i] < 0 || x.residues[i] >= moduli_[i]) return false;
  return true;
}

Letter GroupSpec::add(Letter a, Letter b) const {
  if (add_table_) return (*add_table_)[a * order_ + b];
  std::uint64_t code = 0;
  std::uint64_t ca = a;
  std::uint64_t cb = b;
  for (std::size_t i = 0; i < rank(); ++i) {
    const std::uint64_t da = ca / strides_[i];
    const std::uint64_t db = cb / strides_[i];
    ca %= strides_[i];
    cb %= strides_[i];
    code += ((da + db) % static_cast<std::uint64_t>(moduli_[i])) * strides_[i];
  }
  return static_cast<Letter>(code);
}

Letter GroupSpec::neg(Letter a) const {
  std::uint64_t code = 0;
  std::uint64_t ca = a;
  for (std::size_t i = 0; i < rank(); ++i) {
    const std::uint64_t d = static_cast<std::uint64_t>(moduli_[i]);
    const std::uint64_t da = ca / strides_[i];
    ca %= strides_[i];
    code += ((d - da) % d) * strides_[i];
  }
  return static_cast<Letter>(code);
}

Letter GroupSpec::scale(std::int64_t k, Letter a) const {
  GroupElement x = decode(a);
  for (std::size_t i = 0; i < rank(); ++i) x.residues[i] = mod(mod(k, moduli_[i]) * x.residues[i], moduli_[i]);
  return encode(x);
}

std::uint64_t GroupSpec::element_order(Letter a) const {
  const GroupElement x = decode(a);
  std::uint64_t ord = 1;
  for (std::size_t i = 0; i < rank(); ++i) {
    const auto d = static_cast<std::uint64_t>(moduli_[i]);
    ord = lcm_u64(ord, d / gcd_u64(d, static_cast<std::uint64_t>(x.residues[i])));
  }
  return ord;
}

std::string GroupSpec::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < rank(); ++i) os << (i ? " x " : "") << "Z/" << moduli_[i];
  return os.str();
}

std::string GroupSpec::letter_string(Letter a) const {
  const GroupElement x = decode(a);
  if (rank() == 1 && moduli_[0] <= 10) return std::to_string(x.residues[0]);
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < rank(); ++i) os << (i ? "," : "") << x.residues[i];
  os << ')';
  return os.str();
}

// --- Endomorphism ----------------------------------------------------------

Endomorphism::Endomorphism(GroupSpec source, GroupSpec target, IntMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  const auto rows = static_cast<Eigen::Index>(target_.rank());
  const auto cols = static_cast<Eigen::Index>(source_.rank());
  if (matrix_.rows() != rows || matrix_.cols() != cols)
    throw ShapeError("endomorphism matrix must be " + std::to_string(rows) + "x" + std::to_string(cols));
  for (Eigen::Index j = 0; j < rows; ++j) {
    const std::int64_t dj = target_.moduli()[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < cols; ++i) {
      matrix_(j, i) = mod(matrix_(j, i), dj);
      const std::int64_t di = source_.moduli()[static_cast<std::size_t>(i)];
      if (mod(matrix_(j, i) * di, dj) != 0)
        throw SpecError("endomorphism entry (" + std::to_string(j) + "," + std::to_string(i) +
                        ") is not compatible with Z/" + std::to_string(di) + " -> Z/" + std::to_string(dj));
    }
  }
  if (source_.order() <= kHomTableLimit) {
    auto table = std::make_shared<std::vector<Letter>>(source_.order());
    for (Letter a = 0; a < source_.order(); ++a) (*table)[a] = target_.encode(apply(source_.decode(a)));
    table_ = std::move(table);
  }
}

Endomorphism Endomorphism::identity(const GroupSpec& group) {
  const auto k = static_cast<Eigen::Index>(group.rank());
  return Endomorphism(group, group, IntMatrix::Identity(k, k));
}

Endomorphism Endomorphism::zero(const GroupSpec& group) {
  const auto k = static_cast<Eigen::Index>(group.rank());
  return Endomorphism(group, group, IntMatrix::Zero(k, k));
}

Endomorphism Endomorphism::scalar(const GroupSpec& group, std::int64_t c) {
  const auto k = static_cast<Eigen::Index>(group.rank());
  IntMatrix m = IntMatrix::Identity(k, k) * c;
  return Endomorphism(group, group, std::move(m));
}

bool Endomorphism::is_zero() const { return (matrix_.array() == 0).all(); }

GroupElement Endomorphism::apply(const GroupElement& x) const {
  if (x.residues.size() != source_.rank()) throw ShapeError("hom_apply: element rank mismatch");
  IntVector v(static_cast<Eigen::Index>(x.residues.size()));
  for (std::size_t i = 0; i < x.residues.size(); ++i) v(static_cast<Eigen::Index>(i)) = x.residues[i];
  const IntVector y = matrix_ * v;
  GroupElement out;
  out.residues.resize(target_.rank());
  for (std::size_t j = 0; j < target_.rank(); ++j)
    out.residues[j] = mod(y(static_cast<Eigen::Index>(j)), target_.moduli()[j]);
  return out;
}

Letter Endomorphism::apply(Letter x) const {
  if (table_) return (*table_)[x];
  return target_.encode(apply(source_.decode(x)));
}

bool Endomorphism::operator==(const Endomorphism& other) const {
  return source_ == other.source_ && target_ == other.target_ && matrix_ == other.matrix_;
}

std::string Endomorphism::describe() const {
  if (matrix_.size() == 1) return std::to_string(matrix_(0, 0));
  std::ostringstream os;
  os << '[';
  for (Eigen::Index j = 0; j < matrix_.rows(); ++j) {
    os << (j ? ";" : "");
    for (Eigen::Index i = 0; i < matrix_.cols(); ++i) os << (i ? " " : "") << matrix_(j, i);
  }
  os << ']';
  return os.str();
}

Endomorphism compose(const Endomorphism& f, const Endomorphism& g) {
  if (!(g.target() == f.source())) throw ShapeError("compose: g target differs from f source");
  return Endomorphism(g.source(), f.target(), f.matrix() * g.matrix());
}

Endomorphism operator+(const Endomorphism& f, const Endomorphism& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw ShapeError("endomorphism sum: shape mismatch");
  return Endomorphism(f.source(), f.target(), f.matrix() + g.matrix());
}

Endomorphism operator-(const Endomorphism& f) { return Endomorphism(f.source(), f.target(), -f.matrix()); }

Endomorphism operator-(const Endomorphism& f, const Endomorphism& g) { return f + (-g); }

GroupElement hom_apply(const Endomorphism& f, const GroupElement& x) { return f.apply(x); }

bool hom_is_automorphism(const Endomorphism& f) {
  if (!f.is_square()) return false;
  const std::uint64_t n = f.source().order();
  std::vector<bool> hit(n, false);
  for (Letter a = 0; a < n; ++a) {
    const Letter b = f.apply(a);
    if (hit[b]) return false;
    hit[b] = true;
  }
  return true;
}

Endomorphism endomorphism_from_table(const GroupSpec& group, std::span<const Letter> images) {
  const auto k = static_cast<Eigen::Index>(group.rank());
  IntMatrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    GroupElement unit;
    unit.residues.assign(group.rank(), 0);
    unit.residues[static_cast<std::size_t>(i)] = 1;
    const GroupElement image = group.decode(images[group.encode(unit)]);
    for (Eigen::Index j = 0; j < k; ++j) m(j, i) = image.residues[static_cast<std::size_t>(j)];
  }
  return Endomorphism(group, group, std::move(m));
}

std::optional<Endomorphism> hom_inverse(const Endomorphism& f) {
  if (!hom_is_automorphism(f)) return std::nullopt;
  const std::uint64_t n = f.source().order();
  std::vector<Letter> inverse(n);
  for (Letter a = 0; a < n; ++a) inverse[f.apply(a)] = a;
  return endomorphism_from_table(f.source(), inverse);
}

std::vector<Letter> hom_image(const Endomorphism& f) {
  std::vector<bool> hit(f.target().order(), false);
  for (Letter a = 0; a < f.source().order(); ++a) hit[f.apply(a)] = true;
  std::vector<Letter> out;
  for (Letter b = 0; b < hit.size(); ++b)
    if (hit[b]) out.push_back(b);
  return out;
}

std::vector<Letter> hom_kernel(const Endomorphism& f) {
  std::vector<Letter> out;
  for (Letter a = 0; a < f.source().order(); ++a)
    if (f.apply(a) == 0) out.push_back(a);
  return out;
}

// --- Characters ------------------------------------------------------------

std::complex<double> char_eval(const GroupSpec& group, const Character& chi, const GroupElement& x) {
  if (chi.residues.size() != group.rank() || x.residues.size() != group.rank())
    throw ShapeError("char_eval: moduli mismatch");
  // Accumulate the phase as an exact fraction of a turn per factor to keep |value| = 1.
  double turns = 0.0;
  for (std::size_t i = 0; i < group.rank(); ++i) {
    const std::int64_t d = group.moduli()[i];
    turns += static_cast<double>(mod(chi.residues[i] * x.residues[i], d)) / static_cast<double>(d);
  }
  const double angle = 2.0 * std::numbers::pi * turns;
  return {std::cos(angle), std::sin(angle)};
}

std::complex<double> char_eval(const GroupSpec& group, const Character& chi, Letter x) {
  return char_eval(group, chi, group.decode(x));
}

bool is_trivial(const Character& chi) {
  return std::all_of(chi.residues.begin(), chi.residues.end(), [](std::int64_t c) { return c == 0; });
}

// --- Subgroups -------------------------------------------------------------

bool Subgroup::contains(Letter x) const { return std::binary_search(elements.begin(), elements.end(), x); }

Subgroup subgroup_closure(const GroupSpec& ambient, std::span<const Letter> seeds,
                          std::span<const LetterMap> operators, std::size_t cap) {
  if (ambient.order() > cap) throw CapExceeded("subgroup_closure: ambient group larger than cap");
  for (Letter s : seeds)
    if (s >= ambient.order()) throw ShapeError("subgroup_closure: seed outside ambient group");
  auto add = [&](Letter a, Letter b) { return ambient.add(a, b); };
  return Subgroup{ambient, close_subgroup<Letter>(seeds, Letter{0}, add, operators, cap)};
}

std::vector<Subgroup> enumerate_subgroups(const GroupSpec& group, std::size_t cap) {
  if (group.order() > cap) throw CapExceeded("enumerate_subgroups: group order exceeds cap");
  std::vector<Letter> all(group.order());
  for (Letter a = 0; a < all.size(); ++a) all[a] = a;
  return enumerate_subgroups(Subgroup{group, std::move(all)}, cap);
}

std::vector<Subgroup> enumerate_subgroups(const Subgroup& group, std::size_t cap) {
  if (group.size() > cap) throw CapExceeded("enumerate_subgroups: group order exceeds cap");
  const GroupSpec& ambient = group.ambient;
  auto add = [&](Letter a, Letter b) { return ambient.add(a, b); };
  std::vector<Subgroup> out;
  for (auto& members : enumerate_all_subgroups<Letter>(group.elements, Letter{0}, add, std::size_t{1} << 20))
    out.push_back(Subgroup{ambient, std::move(members)});
  return out;
}

}  // namespace algca
