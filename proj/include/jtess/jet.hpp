#pragma once

#include "jtess/common.hpp"

#include <vector>

namespace jtess {

// Truncated power series c0 + c1 z + ... + cN z^N with arithmetic exact at
// each retained order.
class Jet {
public:
    Jet() : c_(1, cplx(0.0)) {}
    explicit Jet(int order) : c_(static_cast<size_t>(order) + 1, cplx(0.0)) {}
    Jet(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.assign(1, cplx(0.0));
    }

    static Jet identity(int order);
    static Jet constant(cplx value, int order);
    static Jet monomial(cplx value, int power, int order);

    int order() const { return static_cast<int>(c_.size()) - 1; }
    cplx coeff(int k) const { return k <= order() ? c_[static_cast<size_t>(k)] : cplx(0.0); }
    void set_coeff(int k, cplx v);
    Jet truncated(int order) const;

    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(const Jet& o) const;
    Jet operator*(cplx s) const;
    Jet operator-() const { return *this * cplx(-1.0); }

    // this(other(z)); other must have zero constant term.
    Jet compose(const Jet& other) const;
    // Multiplicative inverse; constant term must be nonzero.
    Jet reciprocal() const;
    // Compositional inverse; requires c0 = 0 and c1 != 0.
    Jet inverse() const;
    Jet derivative() const;
    Jet pow(int k) const;
    // log(1 + u) for u with zero constant term.
    static Jet log1p(const Jet& u);

    cplx eval(cplx z) const;
    cplx eval_derivative(cplx z) const;

    // Largest radius rho with |c_k| rho^k <= tail_bound * max(1, |c_1| rho)
    // for all k >= 2; a working disk for series evaluation.
    double trust_radius(double tail_bound = 1e-16) const;

private:
    std::vector<cplx> c_;
};

struct SmallDivisor : NumericsError {
    explicit SmallDivisor(const std::string& what) : NumericsError(what) {}
};

// Linearizer of an attracting/repelling jet f = lambda z + O(z^2) with
// |lambda| not 0 or 1: returns psi tangent to the identity with
// psi(f(z)) = lambda psi(z) through the jet order.
Jet koenigs_series(const Jet& f);

struct NormalFormResult {
    Jet change;      // polynomial change of coordinates (c0 = 0)
    Jet normalized;  // lambda z + z^{q+1} + O(z^{2q+1})
};

// Coordinate changes z -> z - B z^n with B = A/(lambda^{n+1} - lambda)
// eliminating orders 2..q and q+2..2q, plus the linear rescale making the
// z^{q+1} coefficient 1.
NormalFormResult normal_form(const Jet& series, cplx lambda, int q,
                             double small_divisor_threshold = 1e-8);

// Same elimination carried to the full jet order, keeping every resonant
// order k*q + 1 untouched, so the normalized jet is lambda z (1 + u1 z^q +
// u2 z^{2q} + ...).
NormalFormResult resonant_normal_form(const Jet& series, cplx lambda, int q,
                                      double small_divisor_threshold = 1e-8);

// z^{q+1} coefficient of the n-th iterate of lambda z + z^{q+1} + ...,
// by the recursion C_{n+1} = lambda^{q+1} C_n + lambda^n, C_0 = 0.
cplx iterate_normal_coeff(cplx lambda, int n, int q);

}  // namespace jtess
