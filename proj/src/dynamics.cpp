#include "jtess/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace jtess {

std::vector<cplx> quad_orbit(cplx c, cplx z, long n) {
    std::vector<cplx> orbit;
    orbit.reserve(static_cast<size_t>(n) + 1);
    orbit.push_back(z);
    for (long i = 0; i < n; ++i) {
        z = z * z + c;
        orbit.push_back(z);
    }
    return orbit;
}

cplx quad_deriv(cplx c, cplx z, long n) {
    cplx d = 1.0;
    for (long i = 0; i < n; ++i) {
        d *= 2.0 * z;
        z = z * z + c;
    }
    return d;
}

Jet quad_jet(cplx c, cplx z0, long n, int order) {
    // jet of u -> f^n(z0 + u) - f^n(z0); the constant term stays zero
    Jet j = Jet::identity(order);
    cplx z = z0;
    for (long i = 0; i < n; ++i) {
        Jet step = Jet::monomial(2.0 * z, 1, order) + Jet::monomial(1.0, 2, order);
        j = step.compose(j).truncated(order);
        z = z * z + c;
    }
    return j;
}

cplx param_s1(int p, int q, double r) {
    if (q < 1 || p < 1 || std::gcd(p, q) != 1)
        throw std::invalid_argument("param_s1: p/q must be coprime with q >= 1");
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("param_s1: need 0 <= r <= 1");
    cplx lambda = std::polar(r, kTwoPi * p / q);
    return lambda / 2.0 - lambda * lambda / 4.0;
}

namespace {

struct OrbitDerivs {
    cplx value;  // f^n(z)
    cplx dz;     // d f^n / dz
    cplx dc;     // d f^n / dc
    cplx mult;   // prod 2 z_k
    cplx dmult_dz;
    cplx dmult_dc;
};

OrbitDerivs orbit_with_derivs(cplx c, cplx z, long n) {
    cplx v = z, dz = 1.0, dc = 0.0;
    cplx mult = 1.0, sum_dz = 0.0, sum_dc = 0.0;
    for (long k = 0; k < n; ++k) {
        mult *= 2.0 * v;
        sum_dz += dz / v;
        sum_dc += dc / v;
        cplx nv = v * v + c;
        dz = 2.0 * v * dz;
        dc = 2.0 * v * dc + 1.0;
        v = nv;
    }
    return {v, dz, dc, mult, mult * sum_dz, mult * sum_dc};
}

long minimal_period(cplx c, cplx z, long period, double tol) {
    for (long d = 1; d < period; ++d) {
        if (period % d != 0) continue;
        if (std::abs(quad_iter(c, z, d) - z) < tol) return d;
    }
    return period;
}

Cycle cycle_through(cplx c, cplx z, long period) {
    Cycle cyc;
    cyc.period = period;
    cyc.points = quad_orbit(c, z, period - 1);
    cyc.multiplier = 1.0;
    for (const cplx& p : cyc.points) cyc.multiplier *= 2.0 * p;
    return cyc;
}

cplx polish_periodic(cplx c, cplx z, long period, int iters = 60) {
    for (int it = 0; it < iters; ++it) {
        OrbitDerivs od = orbit_with_derivs(c, z, period);
        cplx fz = od.value - z;
        cplx dz = od.dz - 1.0;
        if (std::abs(dz) < 1e-300) break;
        cplx step = fz / dz;
        z -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
}

std::pair<int, int> multiplier_rotation(cplx mult, int qmax = 64, double tol = 1e-4) {
    double turns = std::arg(mult) / kTwoPi;
    if (turns < 0) turns += 1.0;
    for (int q = 1; q <= qmax; ++q) {
        for (int p = 1; p <= q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            double t = double(p % q) / q;
            double d = std::abs(turns - t);
            d = std::min(d, 1.0 - d);
            if (d < tol) return {p == q ? 1 : p, q};
        }
    }
    throw NumericsError("multiplier_rotation: argument not close to a rational with q <= 64");
}

}  // namespace

CycleWithParam solve_cycle_with_multiplier(long period, cplx target_multiplier, cplx seed_c,
                                           cplx seed_z, int max_iter) {
    cplx c = seed_c, z = seed_z;
    for (int it = 0; it < max_iter; ++it) {
        OrbitDerivs od = orbit_with_derivs(c, z, period);
        cplx F1 = od.value - z;
        cplx F2 = od.mult - target_multiplier;
        if (std::abs(F1) < 1e-13 && std::abs(F2) < 1e-12) {
            z = polish_periodic(c, z, period);
            return {c, cycle_through(c, z, period)};
        }
        cplx a = od.dz - 1.0, b = od.dc;
        cplx d = od.dmult_dz, e = od.dmult_dc;
        cplx det = a * e - b * d;
        if (std::abs(det) < 1e-14)
            throw DegenerateJacobian("solve_cycle_with_multiplier: singular Jacobian");
        cplx dz_step = (F1 * e - b * F2) / det;
        cplx dc_step = (a * F2 - F1 * d) / det;
        double norm = std::abs(dz_step) + std::abs(dc_step);
        double damp = norm > 0.5 ? 0.5 / norm : 1.0;
        z -= damp * dz_step;
        c -= damp * dc_step;
        if (std::abs(c) > 8.0 || std::abs(z) > 8.0)
            throw NoConvergence("solve_cycle_with_multiplier: iterates left the search region");
    }
    throw NoConvergence("solve_cycle_with_multiplier: no convergence");
}

Cycle find_attracting_cycle(cplx c, long budget) {
    const double esc2 = 16.0;  // escape radius 4
    cplx z = 0.0;
    long done = 0;
    const long max_period = 256;
    for (long chunk = 256; done < budget; chunk = std::min(chunk * 2, budget - done)) {
        for (long i = 0; i < chunk; ++i) {
            z = z * z + c;
            if (std::norm(z) > esc2)
                throw Escaped("find_attracting_cycle: critical orbit escaped");
        }
        done += chunk;
        cplx w = z;
        for (long k = 1; k <= max_period; ++k) {
            w = w * w + c;
            if (std::norm(w) > esc2)
                throw Escaped("find_attracting_cycle: critical orbit escaped");
            if (std::abs(w - z) < 1e-9) {
                cplx zp = polish_periodic(c, z, k);
                if (std::abs(quad_iter(c, zp, k) - zp) > 1e-10) break;
                long d = minimal_period(c, zp, k, 1e-8);
                zp = polish_periodic(c, zp, d);
                Cycle cyc = cycle_through(c, zp, d);
                if (std::abs(cyc.multiplier) < 1.0 + 1e-9) return cyc;
                break;
            }
        }
        if (chunk <= 0) break;
    }
    throw NoConvergence("find_attracting_cycle: no period detected within budget");
}

cplx satellite_center(int p, int q, std::optional<cplx> seed) {
    static const std::map<std::pair<int, int>, cplx> known = {
        {{1, 1}, cplx(0.0, 0.0)},
        {{1, 2}, cplx(-1.0, 0.0)},
        {{1, 3}, cplx(-0.122561, 0.744862)},
        {{2, 3}, cplx(-0.122561, -0.744862)},
        {{1, 4}, cplx(0.282271, 0.530061)},
        {{3, 4}, cplx(0.282271, -0.530061)},
    };
    cplx c;
    if (seed) {
        c = *seed;
    } else {
        auto it = known.find({p, q});
        if (it == known.end())
            throw std::invalid_argument("satellite_center: no built-in seed for p/q, supply one");
        c = it->second;
    }
    for (int it2 = 0; it2 < 60; ++it2) {
        cplx v = 0.0, dc = 0.0;
        for (int k = 0; k < q; ++k) {
            cplx nv = v * v + c;
            dc = 2.0 * v * dc + 1.0;
            v = nv;
        }
        if (std::abs(v) < 1e-14) break;
        c -= v / dc;
    }
    cplx v = 0.0;
    for (int k = 1; k < q; ++k) {
        v = v * v + c;
        if (std::abs(v) < 1e-8)
            throw NumericsError("satellite_center: converged to a lower-period center");
    }
    return c;
}

CaseTag classify_case(const DegenerationPair& pair) {
    if (pair.q == pair.q_prime && pair.l == pair.l_prime) return CaseTag::A;
    if (pair.q == 1 && pair.q_prime > 1 && pair.l == pair.l_prime * pair.q_prime)
        return CaseTag::B;
    throw InconsistentPair("classify_case: periods/rotations fit neither case");
}

Cycle find_perturbed_cycle(const DegenerationPair& pair) {
    if (pair.parabolic_only || pair.r >= 1.0) return pair.O_g;
    if (pair.case_tag == CaseTag::A) return pair.O_f;
    // Case B: continue each parabolic point to the nearby repelling cycle.
    cplx z = polish_periodic(pair.c_f, pair.O_g.points[0], pair.l_prime, 200);
    if (std::abs(quad_iter(pair.c_f, z, pair.l_prime) - z) > 1e-9)
        throw NoConvergence("find_perturbed_cycle: continuation did not converge");
    Cycle cyc = cycle_through(pair.c_f, z, pair.l_prime);
    if (!cyc.repelling())
        throw InconsistentPair("find_perturbed_cycle: Case B continuation is not repelling");
    return cyc;
}

namespace {

// The cycle point whose Fatou component contains the critical point is the
// limit of the f^l-orbit of 0.
cplx select_component_point(cplx c, const Cycle& cyc, double r_hint) {
    double dmin = 1e9;
    for (size_t i = 0; i < cyc.points.size(); ++i)
        for (size_t j = i + 1; j < cyc.points.size(); ++j)
            dmin = std::min(dmin, std::abs(cyc.points[i] - cyc.points[j]));
    if (cyc.points.size() == 1) return cyc.points[0];

    long budget = 2000;
    if (r_hint > 0.0 && r_hint < 1.0)
        budget = std::min<long>(4000000, budget + long(200.0 / (1.0 - r_hint)));
    cplx z = 0.0;
    long l = cyc.period;
    cplx best = cyc.points[0];
    for (long n = 0; n < budget; ++n) {
        z = quad_iter(c, z, l);
        double bd = 1e9;
        for (const cplx& pt : cyc.points) {
            double dd = std::abs(z - pt);
            if (dd < bd) {
                bd = dd;
                best = pt;
            }
        }
        if (bd < 0.25 * dmin && n > 16) return best;
    }
    return best;
}

// Parabolic-side marked point: nearest cycle point to the settled critical
// orbit (the approach is slow but the other cycle points stay O(1) away).
cplx select_parabolic_point(cplx c, const Cycle& cyc) {
    if (cyc.points.size() == 1) return cyc.points[0];
    cplx z = 0.0;
    long l = cyc.period;
    for (long n = 0; n < 20000; ++n) z = quad_iter(c, z, l);
    cplx best = cyc.points[0];
    double bd = 1e9;
    for (const cplx& pt : cyc.points) {
        double d = std::abs(z - pt);
        if (d < bd) {
            bd = d;
            best = pt;
        }
    }
    return best;
}

void finish_pair(DegenerationPair& pair) {
    pair.rot = rotation_cycle(pair.p, pair.q);
    pair.rot_prime = rotation_cycle(pair.p_prime, pair.q_prime);
    pair.beta0 = select_parabolic_point(pair.c_g, pair.O_g);
    if (!pair.parabolic_only) {
        pair.case_tag = classify_case(pair);
        pair.alpha0 = select_component_point(pair.c_f, pair.O_f, pair.r);
        pair.O_f_prime = find_perturbed_cycle(pair);
    } else {
        pair.alpha0 = pair.beta0;
        pair.O_f_prime = pair.O_g;
    }
}

}  // namespace

DegenerationPair build_pair_s1(int p, int q, double r) {
    if (r <= 0.0 || r > 1.0) throw std::invalid_argument("build_pair_s1: need 0 < r <= 1");
    DegenerationPair pair;
    pair.p = p;
    pair.q = q;
    pair.p_prime = p;
    pair.q_prime = q;
    pair.r = r;
    pair.l = pair.l_prime = 1;
    pair.c_g = param_s1(p, q, 1.0);
    cplx omega = std::polar(1.0, kTwoPi * p / q);
    pair.O_g.points = {omega / 2.0};
    pair.O_g.period = 1;
    pair.O_g.multiplier = omega;

    if (r >= 1.0) {
        pair.parabolic_only = true;
        pair.c_f = pair.c_g;
        pair.O_f = pair.O_g;
    } else {
        pair.c_f = param_s1(p, q, r);
        cplx lambda = pair.lambda();
        pair.O_f.points = {lambda / 2.0};
        pair.O_f.period = 1;
        pair.O_f.multiplier = lambda;
    }
    finish_pair(pair);
    return pair;
}

DegenerationPair build_pair_s2(int p_prime, int q_prime, double r,
                               std::optional<cplx> center_seed) {
    if (q_prime < 2) throw std::invalid_argument("build_pair_s2: need q' >= 2");
    if (r <= 0.0 || r > 1.0) throw std::invalid_argument("build_pair_s2: need 0 < r <= 1");
    DegenerationPair pair;
    pair.p = pair.q = 1;
    pair.p_prime = p_prime;
    pair.q_prime = q_prime;
    pair.r = r;
    pair.l = q_prime;
    pair.l_prime = 1;
    pair.c_g = param_s1(p_prime, q_prime, 1.0);
    cplx omega = std::polar(1.0, kTwoPi * p_prime / q_prime);
    pair.O_g.points = {omega / 2.0};
    pair.O_g.period = 1;
    pair.O_g.multiplier = omega;

    if (r >= 1.0) {
        pair.parabolic_only = true;
        pair.c_f = pair.c_g;
        pair.O_f = pair.O_g;
        finish_pair(pair);
        return pair;
    }

    // continuation from the component center along real multipliers
    cplx c = satellite_center(p_prime, q_prime, center_seed);
    cplx z = cplx(0.01, 0.005);
    double m = 0.05;
    CycleWithParam cur = solve_cycle_with_multiplier(q_prime, m, c, z);
    while (m < r) {
        double step = std::max(std::min(0.5 * (1.0 - m), r - m), 1e-6);
        m = std::min(r, m + step);
        cur = solve_cycle_with_multiplier(q_prime, m, cur.c, cur.cycle.points[0]);
    }
    pair.c_f = cur.c;
    pair.O_f = cur.cycle;
    finish_pair(pair);
    return pair;
}

DegenerationPair build_pair_custom(cplx c_f, cplx c_g, long l, long l_prime, double r) {
    DegenerationPair pair;
    pair.r = r;
    pair.l = l;
    pair.l_prime = l_prime;
    pair.c_f = c_f;
    pair.c_g = c_g;
    pair.O_f = find_attracting_cycle(c_f);
    if (pair.O_f.period != l)
        throw InconsistentPair("build_pair_custom: attracting cycle period != l");
    auto [p, q] = multiplier_rotation(pair.O_f.multiplier / std::abs(pair.O_f.multiplier));
    pair.p = p;
    pair.q = q;

    cplx b = polish_periodic(c_g, pair.O_f.points[0], l_prime, 400);
    if (std::abs(quad_iter(c_g, b, l_prime) - b) > 1e-8)
        throw NoConvergence("build_pair_custom: parabolic cycle solve failed");
    pair.O_g = cycle_through(c_g, b, l_prime);
    auto [pp, qp] = multiplier_rotation(pair.O_g.multiplier);
    pair.p_prime = pp;
    pair.q_prime = qp;
    finish_pair(pair);
    return pair;
}

}  // namespace jtess
