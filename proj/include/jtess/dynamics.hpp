#pragma once

#include "jtess/angles.hpp"
#include "jtess/common.hpp"
#include "jtess/jet.hpp"

#include <vector>

namespace jtess {

inline cplx quad_step(cplx c, cplx z) { return z * z + c; }

inline cplx quad_iter(cplx c, cplx z, long n) {
    for (long i = 0; i < n; ++i) z = z * z + c;
    return z;
}

// Orbit z, f(z), ..., f^n(z) (n+1 entries).
std::vector<cplx> quad_orbit(cplx c, cplx z, long n);

// d/dz f^n(z), by the chain rule along the orbit.
cplx quad_deriv(cplx c, cplx z, long n);

// Taylor jet of f^n at z0, to the given order.
Jet quad_jet(cplx c, cplx z0, long n, int order);

struct Cycle {
    std::vector<cplx> points;  // points[j] = f(points[j-1]); points[0] chosen by caller
    long period = 0;
    cplx multiplier = 0.0;

    bool attracting() const { return std::abs(multiplier) < 1.0; }
    bool repelling() const { return std::abs(multiplier) > 1.0; }
};

enum class CaseTag { A, B };

struct InconsistentPair : NumericsError {
    explicit InconsistentPair(const std::string& what) : NumericsError(what) {}
};
struct DegenerateJacobian : NumericsError {
    explicit DegenerateJacobian(const std::string& what) : NumericsError(what) {}
};

// c = lambda/2 - lambda^2/4 with lambda = r e^{2 pi i p/q}: the quadratic
// parameter whose fixed point has that multiplier.
cplx param_s1(int p, int q, double r);

// Newton on the two-unknown system f_c^n(z) = z, (f_c^n)'(z) = target.
// Returns the solved parameter and the polished cycle through z.
struct CycleWithParam {
    cplx c;
    Cycle cycle;
};
CycleWithParam solve_cycle_with_multiplier(long period, cplx target_multiplier, cplx seed_c,
                                           cplx seed_z, int max_iter = 80);

// Locate the attracting cycle of a hyperbolic parameter by following the
// critical orbit; polishes by Newton and computes the multiplier.
Cycle find_attracting_cycle(cplx c, long budget = 200000);

// Center of the p/q satellite component used by the (s2) construction;
// built-in seeds exist for small q, otherwise supply one via seed.
cplx satellite_center(int p, int q, std::optional<cplx> seed = std::nullopt);

// Full numeric description of a hyperbolic-to-parabolic pair (f -> g).
struct DegenerationPair {
    cplx c_f;  // hyperbolic parameter
    cplx c_g;  // parabolic parameter
    double r = 0.0;

    int p = 1, q = 1;        // rotation number of the multiplier of O_f
    int p_prime = 1, q_prime = 1;  // rotation number of the multiplier of O_g
    long l = 1, l_prime = 1;       // cycle periods
    CaseTag case_tag = CaseTag::A;

    Cycle O_f, O_g, O_f_prime;
    cplx alpha0;  // cycle point of O_f whose component contains 0
    cplx beta0;   // parabolic point on the boundary of the critical component

    RotationData rot;    // combinatorics of the multiplier rotation p/q
    RotationData rot_prime;  // angle combinatorics at the parabolic, p'/q'

    bool parabolic_only = false;  // r == 1: only the g side is populated

    cplx lambda() const { return std::polar(r, kTwoPi * p / q); }
    double model_R() const { return std::pow(r, q); }
    long lq() const { return l * q; }
    bool nontrivial_primitive() const { return q_prime == 1 && l_prime > 1; }
};

CaseTag classify_case(const DegenerationPair& pair);

// Continuation of O_g to the f side: the cycle of the same period l'.
Cycle find_perturbed_cycle(const DegenerationPair& pair);

// Builders for the two segment families. s1: fixed point of multiplier
// r e^{2 pi i p/q}. s2: q'-cycle of real multiplier r, sharing its limit g
// with the s1 pair of the same p'/q'.
DegenerationPair build_pair_s1(int p, int q, double r);
DegenerationPair build_pair_s2(int p_prime, int q_prime, double r,
                               std::optional<cplx> center_seed = std::nullopt);

// Custom pair from a solved hyperbolic parameter and its parabolic limit.
DegenerationPair build_pair_custom(cplx c_f, cplx c_g, long l, long l_prime, double r);

}  // namespace jtess
