#include "algca/modular.hpp"

#include "algca/error.hpp"
#include "algca/kernel_tower.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace algca {

PrimePower prime_power(std::uint64_t n) {
  const auto primes = prime_factors(n);
  if (primes.size() != 1) throw PreconditionError("modulus " + std::to_string(n) + " is not a prime power");
  PrimePower out{primes[0], 0};
  while (n > 1) {
    n /= out.prime;
    ++out.exponent;
  }
  return out;
}

namespace {

std::uint64_t ipow(std::uint64_t base, std::uint64_t e) {
  std::uint64_t v = 1;
  while (e-- > 0) v *= base;
  return v;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) {
  a = mod(a, p);
  for (std::int64_t x = 1; x < p; ++x)
    if (mod(a * x, p) == 1) return x;
  throw PreconditionError("no inverse mod " + std::to_string(p));
}

void require_cyclic(const GroupSpec& a) {
  if (!a.is_cyclic()) throw PreconditionError("cyclic alphabet Z/p^k required, got " + a.describe());
}

}  // namespace

PermutativeSupport permutative_support(const CellularAutomaton& f) {
  require_cyclic(f.alphabet());
  const CellularAutomaton lin = to_linear(f);
  PermutativeSupport out;
  out.modulus = prime_power(static_cast<std::uint64_t>(f.alphabet().moduli()[0]));
  for (const auto& [u, coeff] : lin.polynomial().terms()) {
    (void)coeff;
    const auto c = static_cast<std::uint64_t>(lin.polynomial().scalar_coefficient(u));
    if (c % out.modulus.prime != 0) out.offsets.push_back(u);
  }
  return out;
}

CellularAutomaton bipermutative_power(const CellularAutomaton& f) {
  const PermutativeSupport support = permutative_support(f);
  if (support.empty()) throw PreconditionError("no coefficient is prime to p; the permutative support is empty");
  if (support.min() == support.max()) throw PreconditionError("permutative support has one point; r_hat < s_hat required");
  const auto e = static_cast<int>(ipow(support.modulus.prime, support.modulus.exponent - 1));
  CellularAutomaton g = smallest_neighborhood(power(to_linear(f), static_cast<std::uint64_t>(e)));
  if (!permutativity(g).bipermutative()) throw Error("power of F is not bipermutative");
  if (!(g.neighborhood() == Neighborhood{e * support.min(), e * support.max()}))
    throw Error("power of F has an unexpected smallest neighborhood");
  return g;
}

bool frobenius_congruence_check(const LaurentPoly& p1, const LaurentPoly& p2, std::uint64_t p, std::uint32_t j) {
  const GroupSpec& a = p1.group();
  const auto modulus = static_cast<std::int64_t>(ipow(p, j + 1));
  for (std::int64_t d : a.moduli())
    if (d % modulus != 0) throw PreconditionError("p^(j+1) must divide every modulus");
  const LaurentPoly sum = p1 + Endomorphism::scalar(a, static_cast<std::int64_t>(p)) * p2;
  const std::uint64_t e = ipow(p, j);
  const LaurentPoly lhs = pow(sum, e);
  const LaurentPoly rhs = pow(p1, e);
  std::set<int> degrees;
  for (const auto& [d, c] : lhs.terms()) degrees.insert(d), (void)c;
  for (const auto& [d, c] : rhs.terms()) degrees.insert(d), (void)c;
  for (int d : degrees) {
    const IntMatrix diff = lhs.coefficient(d).matrix() - rhs.coefficient(d).matrix();
    for (Eigen::Index i = 0; i < diff.size(); ++i)
      if (mod(diff(i), modulus) != 0) return false;
  }
  return true;
}

std::uint64_t divisor_bound(std::uint64_t p, std::uint32_t r) {
  const std::uint64_t pr = ipow(p, r);
  std::uint64_t out = 1;
  for (std::uint32_t i = 0; i < r; ++i) out *= pr - ipow(p, i);
  return out;
}

// --- polynomials over F_p --------------------------------------------------

PolyFp poly_trim(PolyFp a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

PolyFp poly_mul(const PolyFp& a, const PolyFp& b, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  PolyFp out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = mod(out[i + j] + a[i] * b[j], p);
  return poly_trim(std::move(out));
}

std::pair<PolyFp, PolyFp> poly_divmod(const PolyFp& a, const PolyFp& b, std::int64_t p) {
  if (b.empty()) throw PreconditionError("polynomial division by zero");
  PolyFp rem = poly_trim(a);
  if (rem.size() < b.size()) return {{}, rem};
  PolyFp quot(rem.size() - b.size() + 1, 0);
  const std::int64_t lead_inv = inverse_mod(b.back(), p);
  while (rem.size() >= b.size()) {
    const std::size_t shift = rem.size() - b.size();
    const std::int64_t c = mod(rem.back() * lead_inv, p);
    quot[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) rem[shift + i] = mod(rem[shift + i] - c * b[i], p);
    rem = poly_trim(std::move(rem));
  }
  return {poly_trim(std::move(quot)), rem};
}

std::string poly_string(const PolyFp& a) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (a[d] != 1 || d == 0) os << a[d];
    if (d >= 1) os << 'X';
    if (d >= 2) os << '^' << d;
  }
  return os.str();
}

PolyFp Factorization::expand() const {
  PolyFp out{unit};
  for (const auto& [f, m] : factors)
    for (int i = 0; i < m; ++i) out = poly_mul(out, f, prime);
  return out;
}

PolyFp from_laurent_scalar(const LaurentPoly& poly) {
  if (poly.is_zero()) return {};
  const int lo = poly.min_degree();
  PolyFp out(static_cast<std::size_t>(poly.max_degree() - lo + 1), 0);
  for (int d = lo; d <= poly.max_degree(); ++d) out[static_cast<std::size_t>(d - lo)] = poly.scalar_coefficient(d);
  return out;
}

LaurentPoly to_laurent(const GroupSpec& alphabet, const PolyFp& a, int shift) {
  std::map<int, std::int64_t> coeffs;
  for (std::size_t d = 0; d < a.size(); ++d)
    if (a[d] != 0) coeffs[static_cast<int>(d) + shift] = a[d];
  return LaurentPoly::scalar(alphabet, coeffs);
}

Factorization factor_mod_p(const LaurentPoly& poly) {
  require_cyclic(poly.group());
  const std::int64_t p = poly.group().moduli()[0];
  if (!is_prime(static_cast<std::uint64_t>(p))) throw PreconditionError("factorization needs a prime modulus");
  if (poly.is_zero()) throw PreconditionError("cannot factor the zero polynomial");
  Factorization out;
  out.prime = p;
  out.shift = poly.min_degree();
  PolyFp rest = from_laurent_scalar(poly);
  out.unit = rest.back();
  const std::int64_t inv = inverse_mod(out.unit, p);
  for (auto& c : rest) c = mod(c * inv, p);

  for (int d = 1; static_cast<int>(rest.size()) - 1 >= 2 * d; ++d) {
    if (d > kMaxFactorDegree) throw CapExceeded("factor_mod_p: trial division limited to degree 8");
    const std::uint64_t count = ipow(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(d));
    for (std::uint64_t code = 0; code < count && static_cast<int>(rest.size()) - 1 >= 2 * d; ++code) {
      PolyFp cand(static_cast<std::size_t>(d) + 1, 0);
      std::uint64_t c = code;
      for (int i = 0; i < d; ++i) {
        cand[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(c % static_cast<std::uint64_t>(p));
        c /= static_cast<std::uint64_t>(p);
      }
      cand[static_cast<std::size_t>(d)] = 1;
      int mult = 0;
      while (true) {
        auto [q, r] = poly_divmod(rest, cand, p);
        if (!r.empty()) break;
        rest = std::move(q);
        ++mult;
      }
      if (mult > 0) out.factors.emplace_back(cand, mult);
    }
  }
  if (rest.size() >= 2) {
    // Remaining cofactor is irreducible; merge with an equal factor if present.
    auto it = std::find_if(out.factors.begin(), out.factors.end(), [&](const auto& f) { return f.first == rest; });
    if (it != out.factors.end())
      ++it->second;
    else
      out.factors.emplace_back(rest, 1);
  }
  std::sort(out.factors.begin(), out.factors.end(), [](const auto& x, const auto& y) {
    return x.first.size() != y.first.size() ? x.first.size() < y.first.size() : x.first < y.first;
  });
  return out;
}

bool is_irreducible(const LaurentPoly& poly) {
  const Factorization f = factor_mod_p(poly);
  return f.factors.size() == 1 && f.factors[0].second == 1;
}

DirectSumReport kernel_direct_sum_check(const CellularAutomaton& f, std::size_t n) {
  const CellularAutomaton lin = to_linear(f);
  const GroupSpec& a = lin.alphabet();
  const Factorization fac = factor_mod_p(lin.polynomial());
  DirectSumReport report;
  const auto whole = kernel_elements(lin, n);
  report.kernel_size = whole.size();

  std::vector<std::vector<PeriodicConfig>> parts;
  std::size_t product = 1;
  for (const auto& [factor, mult] : fac.factors) {
    PolyFp power_poly{1};
    for (int i = 0; i < mult; ++i) power_poly = poly_mul(power_poly, factor, fac.prime);
    parts.push_back(kernel_elements(from_laurent(to_laurent(a, power_poly)), n));
    report.factor_kernel_sizes.push_back(parts.back().size());
    product *= parts.back().size();
    if (product > kDefaultKernelCap) throw CapExceeded("kernel_direct_sum_check: product of kernels exceeds cap");
  }

  std::set<PeriodicConfig> sums;
  bool inside = true;
  std::vector<std::size_t> index(parts.size(), 0);
  for (std::size_t c = 0; c < product; ++c) {
    std::size_t rest = c;
    PeriodicConfig sum = PeriodicConfig::zero(a);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      sum = config_add(sum, parts[i][rest % parts[i].size()]);
      rest /= parts[i].size();
    }
    inside = inside && std::binary_search(whole.begin(), whole.end(), sum);
    sums.insert(std::move(sum));
  }
  report.sum_map_bijective = inside && sums.size() == product && product == whole.size();
  report.holds = report.sum_map_bijective;
  return report;
}

}  // namespace algca
