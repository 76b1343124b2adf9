#include "qfactor/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfactor {

const char* branch_name(Branch br) {
    return br == Branch::A ? "a" : "b";
}

QLattice::QLattice(double q_, double a_, double b_, int depth_)
    : q(q_), a(a_), b(b_), depth(depth_) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream os;
        os << "lattice needs q in (0,1), got q=" << q;
        throw ParamError(os.str());
    }
    if (!(a >= 0.0) || !(b > 0.0) || !(a < b)) {
        std::ostringstream os;
        os << "lattice needs 0 <= a < b with b > 0, got a=" << a << " b=" << b;
        throw ParamError(os.str());
    }
    if (depth < 1) {
        std::ostringstream os;
        os << "lattice needs depth >= 1, got " << depth;
        throw ParamError(os.str());
    }
}

double QLattice::point(Branch br, int n) const {
    return head(br) * std::pow(q, n);
}

std::vector<Branch> QLattice::branches() const {
    std::vector<Branch> out;
    for (Branch br : all_branches) {
        if (has_branch(br)) out.push_back(br);
    }
    return out;
}

int QLattice::depth_for(double q, double x_scale) {
    if (!(q > 0.0 && q < 1.0) || !(x_scale > 0.0) || x_scale > 1.0) {
        throw ParamError("depth_for needs q in (0,1) and x_scale in (0,1]");
    }
    int n = static_cast<int>(std::floor(std::log(x_scale) / std::log(q)));
    while (std::pow(q, n) < x_scale) --n;
    while (std::pow(q, n + 1) >= x_scale) ++n;
    return n + 1;
}

bool operator==(const QLattice& lhs, const QLattice& rhs) {
    return lhs.q == rhs.q && lhs.a == rhs.a && lhs.b == rhs.b && lhs.depth == rhs.depth;
}

LatticeFn::LatticeFn(const QLattice& lat) : lat_(lat) {
    for (Branch br : all_branches) {
        int m = lat_.branch_size(br);
        values_[side(br)].assign(static_cast<size_t>(m), 0.0);
        defined_[side(br)].assign(static_cast<size_t>(m), 1);
    }
}

LatticeFn LatticeFn::sample(const QLattice& lat, const std::function<double(double)>& f) {
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            out.set(br, n, f(lat.point(br, n)));
        }
    }
    return out;
}

void LatticeFn::check_index(Branch br, int n) const {
    if (n < 0 || n >= lat_.branch_size(br)) {
        std::ostringstream os;
        os << "lattice index out of range: branch " << branch_name(br) << ", n=" << n
           << ", branch size " << lat_.branch_size(br);
        throw ParamError(os.str());
    }
}

double LatticeFn::at(Branch br, int n) const {
    check_index(br, n);
    if (!defined_[side(br)][static_cast<size_t>(n)]) {
        std::ostringstream os;
        os << "read of undefined lattice value at branch " << branch_name(br)
           << ", x=" << lat_.point(br, n);
        throw DomainError(os.str());
    }
    return values_[side(br)][static_cast<size_t>(n)];
}

void LatticeFn::set(Branch br, int n, double v) {
    check_index(br, n);
    values_[side(br)][static_cast<size_t>(n)] = v;
    defined_[side(br)][static_cast<size_t>(n)] = 1;
}

void LatticeFn::set_undefined(Branch br, int n) {
    check_index(br, n);
    values_[side(br)][static_cast<size_t>(n)] = 0.0;
    defined_[side(br)][static_cast<size_t>(n)] = 0;
}

bool LatticeFn::defined(Branch br, int n) const {
    check_index(br, n);
    return defined_[side(br)][static_cast<size_t>(n)] != 0;
}

bool LatticeFn::all_defined() const {
    for (Branch br : all_branches) {
        for (std::uint8_t d : defined_[side(br)]) {
            if (!d) return false;
        }
    }
    return true;
}

namespace {

LatticeFn combine(const LatticeFn& lhs, const LatticeFn& rhs, double (*op)(double, double)) {
    if (lhs.lattice() != rhs.lattice()) {
        throw ParamError("pointwise arithmetic needs both operands on one lattice");
    }
    LatticeFn out(lhs.lattice());
    for (Branch br : lhs.lattice().branches()) {
        for (int n = 0; n < lhs.lattice().branch_size(br); ++n) {
            if (lhs.defined(br, n) && rhs.defined(br, n)) {
                out.set(br, n, op(lhs.at(br, n), rhs.at(br, n)));
            } else {
                out.set_undefined(br, n);
            }
        }
    }
    return out;
}

} // namespace

LatticeFn operator+(const LatticeFn& lhs, const LatticeFn& rhs) {
    return combine(lhs, rhs, [](double l, double r) { return l + r; });
}

LatticeFn operator-(const LatticeFn& lhs, const LatticeFn& rhs) {
    return combine(lhs, rhs, [](double l, double r) { return l - r; });
}

LatticeFn operator*(const LatticeFn& lhs, const LatticeFn& rhs) {
    return combine(lhs, rhs, [](double l, double r) { return l * r; });
}

LatticeFn operator*(double c, const LatticeFn& f) {
    LatticeFn out(f.lattice());
    for (Branch br : f.lattice().branches()) {
        for (int n = 0; n < f.lattice().branch_size(br); ++n) {
            if (f.defined(br, n)) {
                out.set(br, n, c * f.at(br, n));
            } else {
                out.set_undefined(br, n);
            }
        }
    }
    return out;
}

double sup_norm(const LatticeFn& f) {
    double out = 0.0;
    for (Branch br : f.lattice().branches()) {
        for (int n = 0; n < f.lattice().branch_size(br); ++n) {
            if (f.defined(br, n)) out = std::max(out, std::fabs(f.at(br, n)));
        }
    }
    return out;
}

} // namespace qfactor
