#include "rlab/superalg.hpp"

#include <bit>
#include <cmath>

#include "rlab/errors.hpp"

namespace rlab {
namespace {

int pc(std::uint8_t m) { return std::popcount(static_cast<unsigned>(m)); }

// Number of pairs (x in s, y in t) with x > y.
int inversions(std::uint8_t s, std::uint8_t t) {
  int count = 0;
  for (int y = 0; y < SuperTensor::kMaxRank; ++y) {
    if (!(t >> y & 1u)) continue;
    count += pc(static_cast<std::uint8_t>(s >> (y + 1)));
  }
  return count;
}

// Sign and product of two normal-ordered monomials; sign 0 when they share a
// generator.
int monomial_product(const Basis& a, const Basis& b, Basis& out) {
  if ((a.hol & b.hol) || (a.antihol & b.antihol) || (a.vec & b.vec) || (a.covec & b.covec))
    return 0;
  int parity = pc(b.hol) * (pc(a.antihol) + pc(a.vec) + pc(a.covec)) +
               pc(b.antihol) * (pc(a.vec) + pc(a.covec)) + pc(b.vec) * pc(a.covec);
  parity += inversions(a.hol, b.hol) + inversions(a.antihol, b.antihol) +
            inversions(a.vec, b.vec) + inversions(a.covec, b.covec);
  out = {static_cast<std::uint8_t>(a.hol | b.hol),
         static_cast<std::uint8_t>(a.antihol | b.antihol),
         static_cast<std::uint8_t>(a.vec | b.vec),
         static_cast<std::uint8_t>(a.covec | b.covec)};
  return parity % 2 == 0 ? 1 : -1;
}

void check_same_n(const SuperTensor& a, const SuperTensor& b) {
  if (a.n() != b.n()) throw DimensionError("super tensors of different dimension");
}

}  // namespace

Block block_of(const Basis& b) {
  return {pc(b.hol), pc(b.antihol), pc(b.vec), pc(b.covec)};
}

SuperTensor::SuperTensor(int n) : n_(n) {
  if (n < 0 || n > kMaxRank) throw DimensionError("super tensor rank out of range");
}

SuperTensor SuperTensor::scalar(int n, Complex c) { return basis(n, Basis{}, c); }

SuperTensor SuperTensor::basis(int n, Basis b, Complex c) {
  SuperTensor t(n);
  t.add(b, c);
  return t;
}

SuperTensor SuperTensor::dw(int n, int a) {
  if (a < 0 || a >= n) throw DimensionError("form index out of range");
  return basis(n, Basis{static_cast<std::uint8_t>(1u << a), 0, 0, 0});
}
SuperTensor SuperTensor::dwbar(int n, int b) {
  if (b < 0 || b >= n) throw DimensionError("form index out of range");
  return basis(n, Basis{0, static_cast<std::uint8_t>(1u << b), 0, 0});
}
SuperTensor SuperTensor::e(int n, int k) {
  if (k < 0 || k >= n) throw DimensionError("bundle index out of range");
  return basis(n, Basis{0, 0, static_cast<std::uint8_t>(1u << k), 0});
}
SuperTensor SuperTensor::edual(int n, int l) {
  if (l < 0 || l >= n) throw DimensionError("bundle index out of range");
  return basis(n, Basis{0, 0, 0, static_cast<std::uint8_t>(1u << l)});
}

void SuperTensor::add(const Basis& b, Complex c) {
  const std::uint8_t limit = static_cast<std::uint8_t>((1u << n_) - 1u);
  if ((b.hol | b.antihol | b.vec | b.covec) & ~limit)
    throw DimensionError("basis index exceeds tensor rank");
  if (c == Complex(0.0, 0.0)) return;
  auto [it, inserted] = terms_.emplace(b.key(), c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0, 0.0)) terms_.erase(it);
  }
}

Complex SuperTensor::coefficient(const Basis& b) const {
  auto it = terms_.find(b.key());
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

std::set<Block> SuperTensor::blocks() const {
  std::set<Block> out;
  for (const auto& [k, c] : terms_) out.insert(block_of(Basis::from_key(k)));
  return out;
}

SuperTensor SuperTensor::block(const Block& blk) const {
  SuperTensor out(n_);
  for (const auto& [k, c] : terms_)
    if (block_of(Basis::from_key(k)) == blk) out.terms_.emplace(k, c);
  return out;
}

double SuperTensor::max_abs() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

SuperTensor& SuperTensor::operator+=(const SuperTensor& o) {
  check_same_n(*this, o);
  for (const auto& [k, c] : o.terms_) add(Basis::from_key(k), c);
  return *this;
}

SuperTensor operator-(SuperTensor a, const SuperTensor& b) { return a += Complex(-1.0) * b; }

SuperTensor operator*(Complex s, const SuperTensor& a) {
  SuperTensor out(a.n_);
  if (s == Complex(0.0, 0.0)) return out;
  for (const auto& [k, c] : a.terms_) out.terms_.emplace(k, s * c);
  return out;
}

SuperTensor wedge(const SuperTensor& a, const SuperTensor& b) {
  check_same_n(a, b);
  SuperTensor out(a.n());
  Basis prod;
  for (const auto& [ka, ca] : a.terms()) {
    const Basis ba = Basis::from_key(ka);
    for (const auto& [kb, cb] : b.terms()) {
      const int sign = monomial_product(ba, Basis::from_key(kb), prod);
      if (sign != 0) out.add(prod, static_cast<double>(sign) * ca * cb);
    }
  }
  return out;
}

SuperTensor dual_pair(const SuperTensor& u, const SuperTensor& t) {
  check_same_n(u, t);
  int k_u = -1, k_t = -1;
  for (const auto& [k, c] : u.terms()) {
    const Basis b = Basis::from_key(k);
    if (b.covec) throw DimensionError("dual_pair: first argument carries V* factors");
    const int kk = pc(b.vec);
    if (k_u >= 0 && kk != k_u) throw DimensionError("dual_pair: mixed V-degree");
    k_u = kk;
  }
  for (const auto& [k, c] : t.terms()) {
    const Basis b = Basis::from_key(k);
    if (b.vec) throw DimensionError("dual_pair: second argument carries V factors");
    const int kk = pc(b.covec);
    if (k_t >= 0 && kk != k_t) throw DimensionError("dual_pair: mixed V*-degree");
    k_t = kk;
  }
  if (k_u >= 0 && k_t >= 0 && k_u != k_t)
    throw DimensionError("dual_pair: V-degree does not match V*-degree");

  SuperTensor out(u.n());
  Basis prod;
  for (const auto& [ku, cu] : u.terms()) {
    const Basis bu = Basis::from_key(ku);
    for (const auto& [kt, ct] : t.terms()) {
      const Basis bt = Basis::from_key(kt);
      if (bu.vec != bt.covec) continue;
      const int sign = monomial_product(Basis{bu.hol, bu.antihol, 0, 0},
                                        Basis{bt.hol, bt.antihol, 0, 0}, prod);
      if (sign != 0) out.add(prod, static_cast<double>(sign) * cu * ct);
    }
  }
  return out;
}

SuperTensor contract(const SuperTensor& u, const SuperTensor& theta) {
  check_same_n(u, theta);
  SuperTensor out(u.n());
  Basis forms;
  for (const auto& [ku, cu] : u.terms()) {
    const Basis bu = Basis::from_key(ku);
    if (bu.covec) throw DimensionError("contract: u must not carry V* factors");
    const int i = pc(bu.hol), j = pc(bu.antihol), k = pc(bu.vec);
    const int grade_u = i + j + k;
    for (const auto& [kt, ct] : theta.terms()) {
      const Basis bt = Basis::from_key(kt);
      if (bt.vec) throw DimensionError("contract: theta must not carry V factors");
      const int p = pc(bt.hol), q = pc(bt.antihol), l = pc(bt.covec);
      // Require L ⊆ K; M = K \ L is what survives.
      if ((bt.covec & bu.vec) != bt.covec) continue;
      const auto rest = static_cast<std::uint8_t>(bu.vec & ~bt.covec);
      const int form_sign = monomial_product(Basis{bu.hol, bu.antihol, 0, 0},
                                             Basis{bt.hol, bt.antihol, 0, 0}, forms);
      if (form_sign == 0) continue;
      int parity = (i + j) * l + (p + q) * grade_u + l * (l - 1) / 2;
      parity += inversions(bt.covec, rest);  // e^L ∧ e^M = ε(L,M) e^{L∪M}
      const double sign = (parity % 2 == 0 ? 1.0 : -1.0) * form_sign;
      out.add(Basis{forms.hol, forms.antihol, rest, 0}, sign * cu * ct);
    }
  }
  return out;
}

SForm::SForm(Complex scalar_part, SuperTensor one_form_part)
    : scalar_(scalar_part), one_form_(std::move(one_form_part)) {
  for (const auto& [k, c] : one_form_.terms())
    if (block_of(Basis::from_key(k)) != Block{0, 1, 0, 1})
      throw DimensionError("SForm: one-form part must lie in the (0,1,0,1) block");
}

SuperTensor exp_S(const SForm& s) {
  const int n = s.n();
  SuperTensor sum = SuperTensor::scalar(n, 1.0);
  SuperTensor power = SuperTensor::scalar(n, 1.0);
  double factorial = 1.0;
  for (int p = 1; p <= n; ++p) {
    power = wedge(power, s.one_form_part());
    if (power.is_zero()) break;
    factorial *= p;
    sum += Complex(1.0 / factorial) * power;
  }
  return std::exp(s.scalar_part()) * sum;
}

Complex top_pairing(const SuperTensor& psi, const SuperTensor& E) {
  const int n = psi.n();
  const Block top{n, 0, n, 0};
  for (const auto& [k, c] : psi.terms())
    if (block_of(Basis::from_key(k)) != top)
      throw DimensionError("top_pairing: psi must lie in the (n,0,n,0) block");
  // Only the (0,n,0,n) part of E reaches form bidegree (n,n).
  const SuperTensor reach = E.block(Block{0, n, 0, n});
  const SuperTensor full = contract(psi, reach);
  const auto all = static_cast<std::uint8_t>((1u << n) - 1u);
  return full.coefficient(Basis{all, all, 0, 0});
}

}  // namespace rlab
