#ifndef QFACTOR_OPER_HPP
#define QFACTOR_OPER_HPP

#include "qfactor/chain.hpp"
#include "qfactor/lattice.hpp"

namespace qfactor {

// Coefficients of the second-order form Z ∂_q Q⁻¹ ∂_q + W ∂_q + V. All three
// live on the same lattice as the functions the operator acts on.
struct QDiffOp {
    LatticeFn Z;
    LatticeFn W;
    LatticeFn V;
};

// (Z ∂_q Q⁻¹ ∂_q + W ∂_q + V) ψ, assembled from the shift primitives so the
// boundary rule (Q⁻¹ vanishes at the branch heads) is applied uniformly.
// Undefined at the deepest point of each branch, like ∂_q itself.
LatticeFn apply(const QDiffOp& op, const LatticeFn& psi);

// Lowering operator of level k: ψ ↦ ∂_qψ + f_kψ. Undefined at the deepest
// point of each branch.
LatticeFn annihilate(const ChainLevel& level, const LatticeFn& psi);

// Raising operator of level k in the shift form
//   ψ ↦ η_kφ_k ψ − (B_k/((1−q)x)) Q⁻¹ψ,
// defined on the whole lattice thanks to the Q⁻¹ boundary rule.
LatticeFn create(const ChainLevel& level, const LatticeFn& psi);

// The same operator assembled from its defining combination
//   B_k(−∂_qQ⁻¹ + f_k) − A_k(1 + (1−q)x f_k);
// loses the deepest point to ∂_q but must agree with create() elsewhere.
LatticeFn create_expanded(const ChainLevel& level, const LatticeFn& psi);

struct AdjointSides {
    double lhs; // ⟨lower φ, ψ⟩ with weight ρ_{k−1} = η_kρ_k
    double rhs; // ⟨φ, raise ψ⟩ with weight ρ_k
};

// Both Jackson scalar products whose equality makes raising the adjoint of
// lowering. They agree up to the truncation tail when B_kρ_k vanishes (or
// the integrands decay) toward the origin.
AdjointSides adjoint_check(const ChainLevel& level, const LatticeFn& phi,
                           const LatticeFn& psi);

// Explicit second-order coefficients of H_k, the operator that factorizes
// both ways: create_k∘annihilate_k + a_k and, one level up,
// d_{k+1}^{-1}(annihilate_{k+1}∘create_{k+1} + a_{k+1}). The coefficients
// need level k+1 data, so k must stay below the chain's declared max_k.
QDiffOp hamiltonian(const Chain& chain, int k);

// hamiltonian() sampled and applied in one call.
LatticeFn apply_hamiltonian(const Chain& chain, int k, const LatticeFn& psi);

// Largest |f| over the interior points of each branch: the head (whose
// second-order row is truncated by the Q⁻¹ rule) and the deepest point
// (no forward neighbour) are excluded. Undefined points are skipped.
double interior_sup_norm(const LatticeFn& f);

} // namespace qfactor

#endif
