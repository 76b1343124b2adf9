#ifndef QFACTOR_LATTICE_HPP
#define QFACTOR_LATTICE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "qfactor/error.hpp"

namespace qfactor {

// One geometric branch of the lattice: the points y, qy, q²y, ... with
// y = a (Branch::A) or y = b (Branch::B).
enum class Branch { A, B };

inline constexpr std::array<Branch, 2> all_branches{Branch::A, Branch::B};

const char* branch_name(Branch br);

// Finite truncation of the q-interval [a,b]_q: points qⁿa and qⁿb for
// 0 <= n < depth. a = 0 is allowed and contributes no points at all (the
// a-branch is empty rather than a point at the origin), so every stored
// point is strictly positive.
struct QLattice {
    double q;
    double a;
    double b;
    int depth;

    QLattice(double q, double a, double b, int depth);

    bool has_branch(Branch br) const { return br == Branch::B || a > 0.0; }
    double head(Branch br) const { return br == Branch::A ? a : b; }
    int branch_size(Branch br) const { return has_branch(br) ? depth : 0; }
    double point(Branch br, int n) const;
    int total_points() const { return branch_size(Branch::A) + branch_size(Branch::B); }
    std::vector<Branch> branches() const;

    // Largest depth whose deepest point still satisfies q^{depth-1} >= x_scale.
    // Residual tests use this to keep 1/x² stencil factors well conditioned.
    static int depth_for(double q, double x_scale);
};

bool operator==(const QLattice& lhs, const QLattice& rhs);
inline bool operator!=(const QLattice& lhs, const QLattice& rhs) { return !(lhs == rhs); }

// Real scalar function sampled on a QLattice, one value per point. Points can
// be marked undefined (the q-derivative at the deepest point of a branch has
// no forward neighbour); reading an undefined point throws DomainError.
class LatticeFn {
public:
    explicit LatticeFn(const QLattice& lat);

    static LatticeFn sample(const QLattice& lat, const std::function<double(double)>& f);

    const QLattice& lattice() const { return lat_; }
    double at(Branch br, int n) const;
    void set(Branch br, int n, double v);
    void set_undefined(Branch br, int n);
    bool defined(Branch br, int n) const;
    bool all_defined() const;
    double x(Branch br, int n) const { return lat_.point(br, n); }

private:
    QLattice lat_;
    std::array<std::vector<double>, 2> values_;
    std::array<std::vector<std::uint8_t>, 2> defined_;

    static int side(Branch br) { return br == Branch::A ? 0 : 1; }
    void check_index(Branch br, int n) const;
};

// Pointwise arithmetic; the result is defined exactly where all operands are.
// Operands must share one lattice (ParamError otherwise).
LatticeFn operator+(const LatticeFn& lhs, const LatticeFn& rhs);
LatticeFn operator-(const LatticeFn& lhs, const LatticeFn& rhs);
LatticeFn operator*(const LatticeFn& lhs, const LatticeFn& rhs);
LatticeFn operator*(double c, const LatticeFn& f);

// Largest |f| over the defined points; zero for an everywhere-undefined f.
double sup_norm(const LatticeFn& f);

} // namespace qfactor

#endif
