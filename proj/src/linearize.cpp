#include "jtess/linearize.hpp"

#include <algorithm>
#include <cmath>

namespace jtess {

namespace {

long basin_budget(double modulus_lambda) {
    double gap = std::max(1e-6, 1.0 - modulus_lambda);
    return std::min<long>(4000000, 4000 + static_cast<long>(400.0 / gap));
}

}  // namespace

KoenigsCoord KoenigsCoord::build(const DegenerationPair& pair, int order) {
    if (pair.parabolic_only)
        throw std::invalid_argument("KoenigsCoord: pair has no hyperbolic side");
    KoenigsCoord k;
    k.c_ = pair.c_f;
    k.alpha0_ = pair.alpha0;
    k.l_ = pair.l;
    Jet fl = quad_jet(k.c_, k.alpha0_, k.l_, order);
    k.lambda_ = fl.coeff(1);
    k.psi_ = koenigs_series(fl);
    k.psi_inv_ = k.psi_.inverse();
    k.budget_ = basin_budget(std::abs(k.lambda_));

    double rho = 0.6 * std::min(k.psi_.trust_radius(1e-15), fl.trust_radius(1e-14));
    // the handoff disk must be mapped into itself by the return map
    for (int attempt = 0; attempt < 60; ++attempt) {
        bool ok = true;
        for (int s = 0; s < 32 && ok; ++s) {
            cplx u = std::polar(rho, kTwoPi * s / 32.0);
            cplx img = quad_iter(k.c_, k.alpha0_ + u, k.l_) - k.alpha0_;
            ok = std::abs(img) < rho;
        }
        if (ok) break;
        rho *= 0.7;
    }
    k.rho_ = rho;

    auto pushed = k.try_push(cplx(0.0));
    if (!pushed)
        throw NotInBasin("KoenigsCoord: critical point failed to reach the handoff disk");
    cplx val = k.psi_.eval(pushed->u);
    for (long i = 0; i < pushed->n; ++i) val /= k.lambda_;
    k.norm0_ = val;  // phi(0) = 1
    if (std::abs(k.norm0_) < 1e-100)
        throw NumericsError("KoenigsCoord: degenerate normalization");
    return k;
}

std::optional<KoenigsCoord::Pushed> KoenigsCoord::try_push(cplx z, long budget) const {
    if (budget <= 0) budget = budget_;
    cplx w = z;
    for (long n = 0; n <= budget; ++n) {
        cplx u = w - alpha0_;
        if (std::abs(u) <= rho_) return Pushed{n, u};
        if (std::norm(w) > 25.0) return std::nullopt;
        w = quad_iter(c_, w, l_);
    }
    return std::nullopt;
}

cplx KoenigsCoord::eval(cplx z) const {
    cplx d;
    return eval_with_deriv(z, d);
}

cplx KoenigsCoord::eval_with_deriv(cplx z, cplx& dphi) const {
    cplx w = z;
    cplx ratio = 1.0;  // prod (f^l)'(z_k) / lambda over the pushed orbit
    for (long n = 0; n <= budget_; ++n) {
        cplx u = w - alpha0_;
        if (std::abs(u) <= rho_) {
            cplx val = psi_.eval(u);
            for (long i = 0; i < n; ++i) val /= lambda_;
            dphi = psi_.eval_derivative(u) * ratio / norm0_;
            return val / norm0_;
        }
        if (std::norm(w) > 25.0) break;
        ratio *= quad_deriv(c_, w, l_) / lambda_;
        w = quad_iter(c_, w, l_);
    }
    throw NotInBasin("KoenigsCoord: orbit failed to approach alpha0");
}

cplx KoenigsCoord::local_inverse(cplx w) const {
    return alpha0_ + psi_inv_.eval(w * norm0_);
}

FatouCoord FatouCoord::build(const DegenerationPair& pair, int order) {
    FatouCoord f;
    f.c_ = pair.c_g;
    f.beta0_ = pair.beta0;
    f.lq_ = pair.l_prime * pair.q_prime;
    f.q_prime_ = pair.q_prime;
    int qp = f.q_prime_;
    order = std::max(order, 13 * qp + 2);

    Jet gl = quad_jet(f.c_, f.beta0_, pair.l_prime, order);
    cplx lam = gl.coeff(1);
    if (std::abs(std::abs(lam) - 1.0) > 1e-6)
        throw NumericsError("FatouCoord: cycle is not parabolic");
    auto rnf = resonant_normal_form(gl, lam, qp);
    f.sigma_ = rnf.change;
    f.sigma_inv_ = f.sigma_.inverse();

    Jet nf = rnf.normalized;
    Jet big = nf;
    for (int i = 1; i < qp; ++i) big = nf.compose(big).truncated(order);
    // non-resonant orders should vanish up to rounding relative to the
    // neighbouring resonant coefficients
    double scale = 1.0;
    for (int k = 2; k <= order; ++k) {
        if ((k - 1) % qp == 0) scale = std::max(scale, std::abs(big.coeff(k)));
        if ((k - 1) % qp != 0 && std::abs(big.coeff(k)) > 1e-6 * scale)
            throw NumericsError("FatouCoord: return map is not resonant-only");
    }

    int kv = (order - 1) / qp;
    Jet T(kv);
    for (int k = 0; k <= kv; ++k) T.set_coeff(k, big.coeff(k * qp + 1));
    if (std::abs(T.coeff(0) - 1.0) > 1e-7)
        throw NumericsError("FatouCoord: return multiplier differs from 1");
    Jet R = T.pow(qp).reciprocal();
    cplx s1 = R.coeff(1);
    if (std::abs(s1) < 1e-12) throw NumericsError("FatouCoord: degenerate sector coefficient");
    f.kappa_ = -1.0 / s1;

    // the return map in the sector coordinate: w' = w + 1 + sum b_j w^{-j}
    int K = std::min(10, kv - 2);
    if (K < 2) throw NumericsError("FatouCoord: jet order too small");
    std::vector<cplx> b(static_cast<size_t>(K) + 2, cplx(0.0));
    for (int j = 1; j <= K + 1 && j + 1 <= kv; ++j)
        b[static_cast<size_t>(j)] = R.coeff(j + 1) * std::pow(-f.kappa_, j + 1);

    // Abel asymptotics in x = 1/w: u(w) = w + b_log log w + sum c_k w^{-k}
    int M = K + 1;
    Jet A(M), E(M);
    for (int j = 1; j <= M; ++j) A.set_coeff(j, b[static_cast<size_t>(j)]);
    E.set_coeff(1, 1.0);
    for (int j = 1; j + 1 <= M; ++j) E.set_coeff(j + 1, b[static_cast<size_t>(j)]);
    Jet L = Jet::log1p(E);
    Jet xprime = Jet::identity(M) * (Jet::constant(1.0, M) + E).reciprocal();
    std::vector<Jet> P;  // P[k-1] = (x')^k - x^k
    for (int k = 1; k <= M; ++k) P.push_back(xprime.pow(k) - Jet::identity(M).pow(k));

    f.log_coeff_ = -A.coeff(1) / L.coeff(1);
    f.inv_coeffs_.assign(static_cast<size_t>(K) + 1, cplx(0.0));
    for (int m = 2; m <= K + 1; ++m) {
        cplx acc = A.coeff(m) + f.log_coeff_ * L.coeff(m);
        for (int k = 1; k <= m - 2; ++k)
            acc += f.inv_coeffs_[static_cast<size_t>(k)] * P[static_cast<size_t>(k - 1)].coeff(m);
        cplx denom = P[static_cast<size_t>(m - 2)].coeff(m);
        f.inv_coeffs_[static_cast<size_t>(m - 1)] = -acc / denom;
    }

    f.rho_ = 0.5 * std::min(f.sigma_.trust_radius(1e-13), gl.trust_radius(1e-13));
    f.wstar_ = 40.0;

    // calibrate the working depth: one true return step must satisfy the
    // Abel equation to high accuracy
    for (int attempt = 0; attempt < 12; ++attempt) {
        double worst = 0.0;
        int tested = 0;
        for (int s = 0; s < 8; ++s) {
            cplx w0(f.wstar_ * (1.0 + 0.12 * s), 0.4 * s * f.wstar_ / 40.0);
            cplx v = -f.kappa_ / w0;
            double vmag = std::pow(std::abs(v), 1.0 / qp);
            if (vmag > 0.8 * f.rho_) continue;
            cplx zeta = std::polar(vmag, std::arg(v) / qp);
            cplx u = f.sigma_inv_.eval(zeta);
            cplx z = f.beta0_ + u;
            cplx z1 = quad_iter(f.c_, z, f.lq_);
            auto cp0 = f.chart(z);
            auto cp1 = f.chart(z1);
            if (!cp0 || !cp1) {
                worst = 1.0;
                break;
            }
            worst = std::max(worst, std::abs(f.abel(cp1->w) - f.abel(cp0->w) - 1.0));
            ++tested;
        }
        if (tested > 0 && worst < 1e-9) break;
        f.wstar_ *= 1.35;
        if (f.wstar_ > 4000.0) throw NumericsError("FatouCoord: chart calibration failed");
    }

    // locate the critical petal and fix the normalization phi(0) = 0
    cplx z = 0.0;
    bool found = false;
    for (long n = 0; n <= f.budget_; ++n) {
        cplx u = z - f.beta0_;
        if (std::abs(u) <= f.rho_) {
            cplx zeta = f.sigma_.eval(u);
            cplx v = std::pow(zeta, qp);
            if (std::abs(v) > 1e-300) {
                cplx w = -f.kappa_ / v;
                if (w.real() >= f.wstar_) {
                    f.crit_sector_arg_ = std::arg(zeta);
                    f.base_ = f.abel(w) - cplx(double(n), 0.0);
                    found = true;
                    break;
                }
            }
        }
        z = quad_iter(f.c_, z, f.lq_);
    }
    if (!found) throw NotInPetalBasin("FatouCoord: critical orbit failed to reach the petal");
    return f;
}

std::optional<FatouCoord::ChartPoint> FatouCoord::chart(cplx z) const {
    cplx u = z - beta0_;
    if (std::abs(u) > rho_) return std::nullopt;
    cplx zeta = sigma_.eval(u);
    cplx v = std::pow(zeta, q_prime_);
    if (std::abs(v) < 1e-300) return std::nullopt;
    cplx w = -kappa_ / v;
    double rel = (std::arg(zeta) - crit_sector_arg_) * q_prime_ / kTwoPi;
    int sector = static_cast<int>(std::lround(rel)) % q_prime_;
    if (sector < 0) sector += q_prime_;
    return ChartPoint{zeta, w, sector};
}

std::optional<cplx> FatouCoord::zeta_loose(cplx z, double radius_factor) const {
    cplx u = z - beta0_;
    if (std::abs(u) > radius_factor * rho_) return std::nullopt;
    return sigma_.eval(u);
}

std::optional<FatouCoord::Pushed> FatouCoord::try_push(cplx z, long budget) const {
    if (budget <= 0) budget = budget_;
    for (long n = 0; n <= budget; ++n) {
        auto cp = chart(z);
        if (cp && deep(*cp)) return Pushed{n, *cp};
        if (std::norm(z) > 25.0) return std::nullopt;
        z = quad_iter(c_, z, lq_);
    }
    return std::nullopt;
}

cplx FatouCoord::abel(cplx w) const {
    cplx val = w + log_coeff_ * std::log(w);
    cplx x = 1.0 / w, xk = x;
    for (size_t k = 1; k < inv_coeffs_.size(); ++k) {
        val += inv_coeffs_[k] * xk;
        xk *= x;
    }
    return val;
}

cplx FatouCoord::abel_derivative(cplx w) const {
    cplx val = 1.0 + log_coeff_ / w;
    cplx x = 1.0 / w, xk = x * x;
    for (size_t k = 1; k < inv_coeffs_.size(); ++k) {
        val -= double(k) * inv_coeffs_[k] * xk;
        xk *= x;
    }
    return val;
}

cplx FatouCoord::eval(cplx z) const {
    cplx d;
    return eval_with_deriv(z, d);
}

cplx FatouCoord::eval_with_deriv(cplx z, cplx& dphi) const {
    cplx ratio = 1.0;
    for (long n = 0; n <= budget_; ++n) {
        auto cp = chart(z);
        if (cp && deep(*cp)) {
            cplx u = z - beta0_;
            cplx dzeta = sigma_.eval_derivative(u);
            cplx dv = double(q_prime_) * std::pow(cp->zeta, q_prime_ - 1) * dzeta;
            cplx v = -kappa_ / cp->w;
            cplx dw = kappa_ / (v * v) * dv;
            dphi = abel_derivative(cp->w) * dw * ratio;
            return abel(cp->w) - cplx(double(n), 0.0) - base_;
        }
        if (std::norm(z) > 25.0) break;
        ratio *= quad_deriv(c_, z, lq_);
        z = quad_iter(c_, z, lq_);
    }
    throw NotInPetalBasin("FatouCoord: orbit failed to reach the petal region");
}

cplx FatouCoord::deep_inverse(cplx t) const {
    cplx rhs = t + base_;
    cplx w = rhs;
    for (int it = 0; it < 60; ++it) {
        cplx fw = abel(w) - rhs;
        if (std::abs(fw) < 1e-13 * (1.0 + std::abs(rhs))) break;
        w -= fw / abel_derivative(w);
    }
    cplx v = -kappa_ / w;
    double vmag = std::pow(std::abs(v), 1.0 / q_prime_);
    double vbase = std::arg(v) / q_prime_;
    cplx best = 0.0;
    double bestd = 1e9;
    for (int s = 0; s < q_prime_; ++s) {
        double a = vbase + kTwoPi * s / q_prime_;
        double d = std::abs(std::remainder(a - crit_sector_arg_, kTwoPi));
        if (d < bestd) {
            bestd = d;
            best = std::polar(vmag, a);
        }
    }
    return beta0_ + sigma_inv_.eval(best);
}

UedaResult ueda_linearize(const std::function<cplx(cplx)>& map, double tau, cplx base_a, cplx z,
                          long budget, double rtol) {
    UedaResult out;
    cplx zn = z, an = base_a;
    double inv_tau_n = 1.0;
    cplx u_prev = zn - an;
    cplx C = 1.0;
    for (long n = 0; n < budget; ++n) {
        cplx zn1 = map(zn);
        cplx an1 = map(an);
        double inv_next = inv_tau_n / tau;
        cplx u_next = (zn1 - an1) * inv_next;
        C = (an1 - an) * inv_tau_n;
        double diff = std::abs(u_next - u_prev);
        out.iterations = n + 1;
        out.last_diff = diff;
        zn = zn1;
        an = an1;
        inv_tau_n = inv_next;
        u_prev = u_next;
        if (diff < rtol * (1.0 + std::abs(u_next))) break;
    }
    out.raw = u_prev;
    out.norm_const = C;
    out.value = u_prev / C;
    return out;
}

std::vector<DegeneratingArc> degenerating_arcs(const DegenerationPair& pair,
                                               const KoenigsCoord& phi,
                                               const std::vector<cplx>& endpoint_candidates,
                                               double snap_tol) {
    if (pair.parabolic_only)
        throw std::invalid_argument("degenerating_arcs: parabolic side has no arcs");
    int qa = pair.case_tag == CaseTag::A ? pair.q : 1;
    std::vector<DegeneratingArc> arcs;
    for (int j = 0; j < qa; ++j) {
        double dir = (kPi + kTwoPi * j) / qa;
        DegeneratingArc arc;
        double s = 0.02 * phi.handoff_radius();
        cplx z = phi.local_inverse(std::polar(s, dir));
        arc.points.push_back(phi.alpha0());
        arc.points.push_back(z);
        double grow = 1.15;
        int stall = 0;
        for (int step = 0; step < 40000 && !arc.complete; ++step) {
            for (size_t e = 0; e < endpoint_candidates.size(); ++e) {
                if (std::abs(z - endpoint_candidates[e]) < snap_tol) {
                    arc.endpoint = endpoint_candidates[e];
                    arc.endpoint_index = static_cast<int>(e);
                    arc.complete = true;
                    arc.points.push_back(arc.endpoint);
                }
            }
            if (arc.complete) break;

            double s_next = s * grow;
            cplx w_next = std::polar(s_next, dir);
            cplx dphi;
            cplx val = phi.eval_with_deriv(z, dphi);
            cplx zc = z + (w_next - val) / dphi;
            bool ok = false;
            for (int it = 0; it < 25; ++it) {
                cplx d2, v2;
                try {
                    v2 = phi.eval_with_deriv(zc, d2);
                } catch (const NotInBasin&) {
                    break;
                }
                cplx delta = (v2 - w_next) / d2;
                zc -= delta;
                if (std::abs(delta) < 1e-11 * (1.0 + std::abs(zc))) {
                    ok = true;
                    break;
                }
            }
            double move = std::abs(zc - z);
            if (!ok || move > 0.05) {
                grow = std::sqrt(grow);
                if (grow < 1.0 + 1e-9) {
                    ++stall;
                    grow = 1.0 + 1e-9;
                }
                if (stall > 50) break;
                continue;
            }
            if (move < 0.01) grow = std::min(grow * grow, 1.3);
            z = zc;
            s = s_next;
            arc.points.push_back(z);
            if (std::abs(z) > 4.0) break;
        }
        arcs.push_back(std::move(arc));
    }
    return arcs;
}

InvariantRegionReport invariant_regions_check(cplx lambda_eps, int q, const Jet& f,
                                              int boundary_samples) {
    InvariantRegionReport rep;
    double eps = 1.0 - std::abs(lambda_eps);
    rep.eps = eps;
    if (eps <= 0.0) {
        rep.degenerate = true;
        return rep;
    }
    auto finv = [&](cplx z) {
        cplx w = z / lambda_eps;
        for (int it = 0; it < 60; ++it) {
            cplx delta = (f.eval(w) - z) / f.eval_derivative(w);
            w -= delta;
            if (std::abs(delta) < 1e-16 + 1e-14 * std::abs(w)) break;
        }
        return w;
    };

    double rd = std::pow(eps / 2.0, 1.0 / q);
    for (int s = 0; s < boundary_samples; ++s) {
        cplx z = std::polar(rd, kTwoPi * s / boundary_samples);
        if (std::pow(std::abs(f.eval(z)), q) >= eps / 2.0) {
            rep.d_inclusion = false;
            rep.witness_d = z;
            break;
        }
    }

    auto in_E_interior = [&](cplx z) {
        cplx zq = std::pow(z, q);
        double m = std::abs(zq);
        double a = std::abs(std::arg(zq));
        return m > eps / 2.0 && m < 4.0 * eps && a < kPi / 3.0;
    };
    int per_piece = std::max(8, boundary_samples / (4 * q));
    for (int comp = 0; comp < q && rep.e_inclusion; ++comp) {
        for (int piece = 0; piece < 4 && rep.e_inclusion; ++piece) {
            for (int s = 0; s < per_piece; ++s) {
                double t = double(s) / (per_piece - 1);
                double m, a;
                if (piece == 0) {
                    m = eps / 2.0;
                    a = -kPi / 3.0 + 2.0 * kPi / 3.0 * t;
                } else if (piece == 1) {
                    m = 4.0 * eps;
                    a = -kPi / 3.0 + 2.0 * kPi / 3.0 * t;
                } else {
                    m = eps / 2.0 + 3.5 * eps * t;
                    a = piece == 2 ? kPi / 3.0 : -kPi / 3.0;
                }
                cplx z = std::polar(std::pow(m, 1.0 / q), (a + kTwoPi * comp) / q);
                if (!in_E_interior(finv(z))) {
                    rep.e_inclusion = false;
                    rep.witness_e = z;
                    break;
                }
            }
        }
    }

    for (int j = 0; j < q; ++j) {
        cplx seed = std::polar(std::pow(eps / 2.0, 1.0 / q), kTwoPi * j / q);
        cplx rep_pt = std::polar(std::pow(eps, 1.0 / q), kTwoPi * j / q);
        for (int it = 0; it < 200; ++it) {
            cplx D = f.eval_derivative(rep_pt) - 1.0;
            if (std::abs(D) < 1e-300) break;
            cplx delta = (f.eval(rep_pt) - rep_pt) / D;
            rep_pt -= delta;
            if (std::abs(delta) < 1e-16 + 1e-14 * std::abs(rep_pt)) break;
        }
        std::vector<cplx> path = {seed};
        cplx z = seed;
        for (int it = 0; it < 100000; ++it) {
            z = f.eval(z);
            path.push_back(z);
            if (std::abs(z) < 0.02 * std::pow(eps, 1.0 / q)) break;
        }
        z = seed;
        for (int it = 0; it < 100000; ++it) {
            z = finv(z);
            path.push_back(z);
            if (std::abs(z - rep_pt) < 1e-4 * std::pow(eps, 1.0 / q)) break;
        }
        path.push_back(rep_pt);
        path.push_back(0.0);
        double diam = 0.0;
        for (size_t a = 0; a < path.size(); ++a)
            for (size_t b2 = a + 1; b2 < path.size(); b2 += 7)
                diam = std::max(diam, std::abs(path[a] - path[b2]));
        rep.path_diameters.push_back(diam);
    }
    return rep;
}

}  // namespace jtess
