#pragma once

#include "jtess/common.hpp"
#include "jtess/dynamics.hpp"
#include "jtess/jet.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace jtess {

struct NotInPetalBasin : NumericsError {
    explicit NotInPetalBasin(const std::string& what) : NumericsError(what) {}
};

// Extended linearizing coordinate phi on the critical component B0 of a
// hyperbolic map: phi(f^l(z)) = lambda phi(z), phi(alpha0) = 0, phi(0) = 1.
// Local Koenigs series at alpha0, extended along forward orbits.
class KoenigsCoord {
public:
    static KoenigsCoord build(const DegenerationPair& pair, int order = 24);

    cplx eval(cplx z) const;
    cplx eval_with_deriv(cplx z, cplx& dphi) const;

    // f^{l n}(z) inside the handoff disk: n and the arrived point.
    struct Pushed {
        long n = 0;
        cplx u = 0.0;  // arrived point minus alpha0
    };
    std::optional<Pushed> try_push(cplx z, long budget = 0) const;

    // Local inverse: z with phi(z) = w, valid for |w| <= handoff/|norm|.
    cplx local_inverse(cplx w) const;

    double handoff_radius() const { return rho_; }
    // the handoff disk measured in phi units
    double local_phi_radius() const { return rho_ / std::abs(norm0_); }
    cplx alpha0() const { return alpha0_; }
    cplx lambda() const { return lambda_; }
    long l() const { return l_; }
    cplx c() const { return c_; }
    long default_budget() const { return budget_; }

private:
    cplx c_, alpha0_, lambda_, norm0_;
    long l_ = 1;
    long budget_ = 20000;
    double rho_ = 0.0;
    Jet psi_, psi_inv_;
};

// Extended Fatou coordinate phi on the critical component B0' of a parabolic
// map: phi(g^{lq}(z)) = phi(z) + 1, phi(0) = 0. Built from the resonant
// normal form at beta0 and an asymptotic solution of the Abel equation in
// the sector coordinate w = -kappa / zeta^{q'}.
class FatouCoord {
public:
    static FatouCoord build(const DegenerationPair& pair, int order = 40);

    cplx eval(cplx z) const;
    cplx eval_with_deriv(cplx z, cplx& dphi) const;

    struct ChartPoint {
        cplx zeta;    // normal-form coordinate
        cplx w;       // sector coordinate
        int sector;   // petal index relative to the critical petal
    };
    // Chart data if z - beta0 lies in the trusted disk, regardless of depth.
    std::optional<ChartPoint> chart(cplx z) const;

    // Normal-form coordinate with a relaxed radius; adequate for direction
    // queries only.
    std::optional<cplx> zeta_loose(cplx z, double radius_factor = 4.0) const;

    // Number of g^{lq} steps to reach the deep petal region, and the arrived
    // chart point; nullopt if the orbit fails to get there within budget.
    struct Pushed {
        long n = 0;
        ChartPoint cp;
    };
    std::optional<Pushed> try_push(cplx z, long budget = 0) const;

    bool deep(const ChartPoint& cp) const { return cp.w.real() >= wstar_; }

    // Inverse of the deep-petal evaluation: z with phi(z) = t, needs
    // Re t large enough; used to seed continuation.
    cplx deep_inverse(cplx t) const;

    cplx beta0() const { return beta0_; }
    long lq() const { return lq_; }
    int q_prime() const { return q_prime_; }
    cplx c() const { return c_; }
    double wstar() const { return wstar_; }
    double crit_sector_arg() const { return crit_sector_arg_; }
    long default_budget() const { return budget_; }
    double chart_radius() const { return rho_; }
    cplx kappa() const { return kappa_; }

    // Abel coordinate on the w plane (before subtracting the base value).
    cplx abel(cplx w) const;
    cplx abel_derivative(cplx w) const;

private:
    cplx c_, beta0_, kappa_, base_;
    long lq_ = 1;
    int q_prime_ = 1;
    long budget_ = 200000;
    double rho_ = 0.0, wstar_ = 40.0;
    double crit_sector_arg_ = 0.0;
    cplx log_coeff_ = 0.0;
    std::vector<cplx> inv_coeffs_;  // c_k of u(w) = w + b log w + sum c_k w^{-k}
    Jet sigma_, sigma_inv_;
};

// Simultaneous (Ueda) linearization of a map tau z + 1 + O(1/z): telescoped
// limit u(z) = lim (z_n - a_n)/tau^n, affinely renormalized so that
// u(f(z)) = tau u(z) + 1 exactly in the limit.
struct UedaResult {
    cplx value = 0.0;
    cplx raw = 0.0;         // before dividing by the constant
    cplx norm_const = 1.0;  // C with u_raw(f(z)) = tau u_raw(z) + C
    long iterations = 0;
    double last_diff = 0.0;
};
UedaResult ueda_linearize(const std::function<cplx(cplx)>& map, double tau, cplx base_a, cplx z,
                          long budget = 10000000, double rtol = 5e-13);

// Degenerating arcs of the critical component: level sets arg(phi^q) = pi
// continued from alpha0 out to their repelling endpoints.
struct DegeneratingArc {
    std::vector<cplx> points;  // from alpha0 outward
    cplx endpoint = 0.0;       // matched repelling point (snap target)
    int endpoint_index = -1;   // index into the candidate endpoint list
    bool complete = false;
};
std::vector<DegeneratingArc> degenerating_arcs(const DegenerationPair& pair,
                                               const KoenigsCoord& phi,
                                               const std::vector<cplx>& endpoint_candidates,
                                               double snap_tol = 1e-5);

// Lemma-style invariant neighborhood checks for the model family
// f_eps(z) = lambda z (1 + z^q + ...).
struct InvariantRegionReport {
    double eps = 0.0;
    bool degenerate = false;
    bool d_inclusion = true;  // f(D) inside D
    bool e_inclusion = true;  // f^{-1}(boundary E) inside E
    cplx witness_d = 0.0, witness_e = 0.0;
    std::vector<double> path_diameters;  // one invariant path per sector
};
InvariantRegionReport invariant_regions_check(cplx lambda_eps, int q, const Jet& f,
                                              int boundary_samples = 1000);

}  // namespace jtess
