#pragma once

// Pointwise fibers of  ⊕ Λ^i T*^{1,0} ⊗ Λ^j T*^{0,1} ⊗ Λ^k V ⊗ Λ^l V*.
//
// Every generator (dw_a, dw̄_b, e_k, e^l) is odd. Basis monomials are stored
// in the normal order  dw_I ∧ dw̄_J ∧ e_K ∧ e^L  with each index set
// increasing; products are reordered with Koszul signs.

#include <cstdint>
#include <map>
#include <set>
#include <tuple>

#include "rlab/scalar.hpp"

namespace rlab {

/// Four index sets as bitmasks (bit a set <=> index a present).
struct Basis {
  std::uint8_t hol = 0;
  std::uint8_t antihol = 0;
  std::uint8_t vec = 0;
  std::uint8_t covec = 0;

  std::uint32_t key() const {
    return (std::uint32_t{hol} << 24) | (std::uint32_t{antihol} << 16) |
           (std::uint32_t{vec} << 8) | std::uint32_t{covec};
  }
  static Basis from_key(std::uint32_t k) {
    return {static_cast<std::uint8_t>(k >> 24), static_cast<std::uint8_t>(k >> 16),
            static_cast<std::uint8_t>(k >> 8), static_cast<std::uint8_t>(k)};
  }
  friend bool operator==(const Basis&, const Basis&) = default;
};

/// Form/bundle bidegree (i, j, k, l) of a homogeneous block.
struct Block {
  int i = 0, j = 0, k = 0, l = 0;
  /// Grading i + j + k - l.
  int grade() const { return i + j + k - l; }
  auto operator<=>(const Block&) const = default;
};

Block block_of(const Basis& b);

class SuperTensor {
 public:
  /// Up to 8 slots per family; the library uses n <= 4.
  static constexpr int kMaxRank = 8;

  SuperTensor() = default;
  explicit SuperTensor(int n);

  static SuperTensor scalar(int n, Complex c);
  static SuperTensor basis(int n, Basis b, Complex c = 1.0);
  /// Single generators (0-based index).
  static SuperTensor dw(int n, int a);
  static SuperTensor dwbar(int n, int b);
  static SuperTensor e(int n, int k);
  static SuperTensor edual(int n, int l);

  int n() const { return n_; }
  const std::map<std::uint32_t, Complex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Basis& b, Complex c);
  Complex coefficient(const Basis& b) const;

  std::set<Block> blocks() const;
  /// Restriction to one (i,j,k,l) block.
  SuperTensor block(const Block& blk) const;
  /// Max |coefficient|; 0 for the zero tensor.
  double max_abs() const;

  SuperTensor& operator+=(const SuperTensor& o);
  friend SuperTensor operator+(SuperTensor a, const SuperTensor& b) { return a += b; }
  friend SuperTensor operator-(SuperTensor a, const SuperTensor& b);
  friend SuperTensor operator*(Complex s, const SuperTensor& a);

 private:
  int n_ = 0;
  std::map<std::uint32_t, Complex> terms_;
};

/// Graded (Koszul-signed) product.
SuperTensor wedge(const SuperTensor& a, const SuperTensor& b);

/// Pairing of u ∈ forms ⊗ Λ^k V with t ∈ forms ⊗ Λ^k V*:
/// (α⊗e_K, β⊗e^L) = δ_{K,L} α∧β on increasing index tuples.
/// Result has no bundle part.
SuperTensor dual_pair(const SuperTensor& u, const SuperTensor& t);

/// u⌟θ for u ∈ Ω^{(i,j)}(Λ^k V), θ ∈ Ω^{(p,q)}(Λ^l V*), characterized by
///   (u⌟θ, ν*) = (-1)^{(i+j)l + (p+q)♯u + l(l-1)/2} (u, θ∧ν*)
/// for every ν* ∈ Λ^{k-l} V*. Terms with l > k contribute nothing; both
/// arguments may mix blocks (the sign is applied per term).
SuperTensor contract(const SuperTensor& u, const SuperTensor& theta);

/// S = scalar_part + one_form_part, one_form_part ∈ Ω^{(0,1)}(V*).
class SForm {
 public:
  SForm(Complex scalar_part, SuperTensor one_form_part);
  Complex scalar_part() const { return scalar_; }
  const SuperTensor& one_form_part() const { return one_form_; }
  int n() const { return one_form_.n(); }

 private:
  Complex scalar_;
  SuperTensor one_form_;
};

/// e^S = e^{S0} Σ_{p≤n} S1^{∧p}/p!  (S1 is nilpotent of order n+1).
SuperTensor exp_S(const SForm& s);

/// Coefficient of dw_1…dw_n ∧ dw̄_1…dw̄_n in ψ⌟E, for ψ supported on the
/// (n,0,n,0) block.
Complex top_pairing(const SuperTensor& psi, const SuperTensor& E);

}  // namespace rlab
