#include "jtess/boettcher.hpp"

#include "jtess/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace jtess {

namespace {

constexpr double kAnchorPotential = 16.0;  // e^16 ~ 9e6: asymptotics exact in doubles

// Boettcher inverse near infinity: B(w) = w - c/(2w) + O(1/w^3).
cplx boettcher_asymptotic(cplx c, cplx w) { return w - c / (2.0 * w); }

cplx ray_target(cplx c, double potential, double angle_turns) {
    cplx w = std::exp(cplx(potential, kTwoPi * angle_turns));
    return boettcher_asymptotic(c, w);
}

// Newton on f^j(z) = target, dividing the step through the orbit to avoid
// overflow of the full derivative product.
bool ray_newton(cplx c, long j, cplx target, cplx& z) {
    std::vector<cplx> orbit(static_cast<size_t>(j) + 1);
    for (int it = 0; it < 40; ++it) {
        orbit[0] = z;
        for (long k = 0; k < j; ++k) orbit[static_cast<size_t>(k + 1)] =
            orbit[static_cast<size_t>(k)] * orbit[static_cast<size_t>(k)] + c;
        cplx delta = orbit[static_cast<size_t>(j)] - target;
        double resid = std::abs(delta);
        for (long k = j - 1; k >= 0; --k) {
            cplx d = 2.0 * orbit[static_cast<size_t>(k)];
            if (std::abs(d) < 1e-300) return false;
            delta /= d;
        }
        z -= delta;
        // done when the image matches to rounding noise or the correction is
        // below the resolution of z itself
        if (resid < 1e-11 * (1.0 + std::abs(target))) return true;
        if (std::abs(delta) < 1e-13 * (1.0 + std::abs(z))) return true;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return false;
}

struct DescentState {
    long j = 0;      // depth: f^j(z) sits at the anchor window
    double tau = 0;  // anchor potential in [S0, 2 S0)
    cplx z = 0.0;
};

// One continuation move: lower tau toward tau_goal by at most factor step,
// re-anchoring a level down when tau would drop below the window.
bool descend_once(cplx c, const std::function<double(long)>& angle_at, DescentState& st,
                  double tau_goal_at_j, double step) {
    double next = std::max(st.tau / step, tau_goal_at_j);
    if (next < kAnchorPotential) {
        st.j += 1;
        st.tau *= 2.0;
        next *= 2.0;
        tau_goal_at_j *= 2.0;
        // target at the new depth is the same point; no solve needed
    }
    cplx target = ray_target(c, next, angle_at(st.j));
    cplx z = st.z;
    if (!ray_newton(c, st.j, target, z)) return false;
    st.z = z;
    st.tau = next;
    return true;
}

// Walk the state down to the requested potential, adaptively refining the
// step when Newton fails.
bool descend_to(cplx c, const std::function<double(long)>& angle_at, DescentState& st,
                double potential) {
    const double base_step = std::pow(2.0, 1.0 / 6.0);
    while (st.tau / std::pow(2.0, double(st.j)) > potential * (1.0 + 1e-12)) {
        double goal = potential * std::pow(2.0, double(st.j));
        DescentState trial = st;
        double step = base_step;
        bool ok = descend_once(c, angle_at, trial, goal, step);
        int refine = 0;
        while (!ok && refine < 7) {
            step = std::sqrt(step);
            trial = st;
            ok = descend_once(c, angle_at, trial, goal, step);
            ++refine;
        }
        if (!ok) return false;
        st = trial;
    }
    return true;
}

DescentState descent_start(cplx c, const std::function<double(long)>& angle_at) {
    DescentState st;
    st.j = 0;
    st.tau = 2.0 * kAnchorPotential * 0.999;
    st.z = ray_target(c, st.tau, angle_at(0));
    return st;
}

std::function<double(long)> rational_angle_fn(const RationalAngle& theta) {
    // exact doubling orbit, converted to double per level
    auto angles = std::make_shared<std::vector<double>>();
    auto cur = std::make_shared<RationalAngle>(theta);
    return [angles, cur](long j) {
        while (static_cast<long>(angles->size()) <= j) {
            angles->push_back(cur->value());
            *cur = cur->doubled();
        }
        return (*angles)[static_cast<size_t>(j)];
    };
}

std::function<double(long)> real_angle_fn(double theta) {
    auto angles = std::make_shared<std::vector<double>>();
    auto cur = std::make_shared<double>(theta - std::floor(theta));
    return [angles, cur](long j) {
        while (static_cast<long>(angles->size()) <= j) {
            angles->push_back(*cur);
            *cur = *cur * 2.0;
            *cur -= std::floor(*cur);
        }
        return (*angles)[static_cast<size_t>(j)];
    };
}

RayTrace trace_impl(cplx c, const std::function<double(long)>& angle_at, double min_potential) {
    RayTrace tr;
    DescentState st = descent_start(c, angle_at);
    tr.points.push_back(st.z);
    tr.potentials.push_back(st.tau);
    tr.converged = true;
    double pot = kAnchorPotential;
    while (pot > min_potential) {
        pot = std::max(pot / 2.0, min_potential);
        if (!descend_to(c, angle_at, st, pot)) {
            tr.converged = false;
            break;
        }
        tr.points.push_back(st.z);
        tr.potentials.push_back(pot);
    }
    tr.landing_estimate = tr.points.back();
    return tr;
}

}  // namespace

double green_potential(cplx c, cplx z, long budget) {
    double scale = 0.5;
    for (long n = 0; n < budget; ++n) {
        double m2 = std::norm(z);
        if (m2 > 1e30) return scale * std::log(m2);
        z = z * z + c;
        scale *= 0.5;
    }
    return 0.0;
}

RayTrace trace_ray(cplx c, const RationalAngle& theta, double min_potential) {
    RayTrace tr = trace_impl(c, rational_angle_fn(theta), min_potential);
    tr.angle = theta;
    return tr;
}

RayTrace trace_ray_real(cplx c, double theta, double min_potential) {
    return trace_impl(c, real_angle_fn(theta), min_potential);
}

cplx point_at_potential(cplx c, const RationalAngle& theta, double potential) {
    auto fn = rational_angle_fn(theta);
    DescentState st = descent_start(c, fn);
    if (!descend_to(c, fn, st, potential))
        throw NewtonDivergence("point_at_potential: descent stalled for " + theta.str());
    return st.z;
}

cplx point_at_potential_real(cplx c, double theta, double potential) {
    auto fn = real_angle_fn(theta);
    DescentState st = descent_start(c, fn);
    if (!descend_to(c, fn, st, potential))
        throw NewtonDivergence("point_at_potential_real: descent stalled");
    return st.z;
}

namespace {

struct PolishResult {
    cplx z = 0.0;
    double residual = 1e300;
    double deriv_mag = 0.0;  // |d/dw (f^{pre+d} - f^{pre})| at the result
    bool ok = false;
};

// Newton on f^{pre+d}(w) - f^{pre}(w) from the given seed. At multiple roots
// (parabolic landing) convergence is linear and stalls at the rounding floor;
// the small final derivative magnitude reports that.
PolishResult polish_preperiodic(cplx c, cplx seed, long pre, long d, int iters = 800) {
    PolishResult out;
    cplx z = seed;
    for (int it = 0; it < iters; ++it) {
        cplx v = z, dv = 1.0, mid = z, dmid = 1.0;
        for (long k = 0; k < pre + d; ++k) {
            if (k == pre) {
                mid = v;
                dmid = dv;
            }
            dv = 2.0 * v * dv;
            v = v * v + c;
        }
        cplx F = v - mid;
        cplx D = dv - dmid;
        double res = std::abs(F);
        if (res < out.residual) {
            out.residual = res;
            out.z = z;
            out.deriv_mag = std::abs(D);
        }
        if (res < 1e-15 || std::abs(D) < 1e-300) break;
        cplx step = F / D;
        double damp = std::abs(step) > 0.1 ? 0.1 / std::abs(step) : 1.0;
        z -= damp * step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
    }
    out.ok = out.residual < 1e-9;
    return out;
}

}  // namespace

cplx landing_point(cplx c, const RationalAngle& theta) {
    RayTrace tr = trace_ray(c, theta, 1e-6);
    long pre = theta.preperiod();
    long per = theta.period();

    PolishResult main = polish_preperiodic(c, tr.landing_estimate, pre, per);
    if (!main.ok || std::abs(main.z - tr.landing_estimate) > 0.8)
        throw NewtonDivergence("landing_point: polish failed for " + theta.str());

    // A small derivative signals a multiple root: the landing point has a
    // shorter dynamical period than the angle (co-landing at a parabolic
    // point). Refine with the proper divisors, seeded at the stalled value.
    if (main.deriv_mag < 1e-4) {
        for (long d = 1; d < per; ++d) {
            if (per % d != 0) continue;
            PolishResult fine = polish_preperiodic(c, main.z, pre, d, 200);
            if (fine.ok && fine.deriv_mag >= 1e-4 && std::abs(fine.z - main.z) < 1e-3)
                return fine.z;
        }
    }
    return main.z;
}

double boettcher_angle(cplx c, cplx z) {
    const double safe2 = std::pow(2.5 + std::abs(c), 2.0);
    std::vector<cplx> orbit;
    orbit.push_back(z);
    while (std::norm(orbit.back()) < 1e24) {
        cplx w = orbit.back();
        orbit.push_back(w * w + c);
        if (orbit.size() > 4000)
            throw NumericsError("boettcher_angle: point does not escape");
    }
    long n = static_cast<long>(orbit.size()) - 1;
    double theta = std::arg(orbit[static_cast<size_t>(n)]) / kTwoPi;
    theta -= std::floor(theta);
    // walk back down; for large moduli the raw argument selects the branch
    for (long k = n - 1; k >= 0; --k) {
        cplx zk = orbit[static_cast<size_t>(k)];
        double h0 = theta / 2.0, h1 = h0 + 0.5;
        if (std::norm(zk) > safe2) {
            double raw = std::arg(zk) / kTwoPi;
            raw -= std::floor(raw);
            double d0 = std::abs(raw - h0);
            d0 = std::min(d0, 1.0 - d0);
            double d1 = std::abs(raw - h1);
            d1 = std::min(d1, 1.0 - d1);
            theta = d0 <= d1 ? h0 : h1;
        } else {
            // near the Julia set the raw argument is unreliable: compare
            // against traced ray points at this point's potential
            double pot = green_potential(c, zk);
            if (pot <= 0) throw NumericsError("boettcher_angle: zero potential");
            cplx p0 = point_at_potential_real(c, h0, pot);
            cplx p1 = point_at_potential_real(c, h1, pot);
            theta = std::abs(p0 - zk) <= std::abs(p1 - zk) ? h0 : h1;
        }
    }
    return theta;
}

std::vector<RationalAngle> hausdorff_angle_set(int n_samples) {
    int d = 4;
    while (((1L << d) - 1) < n_samples && d < 24) ++d;
    long den = (1L << d) - 1;
    std::vector<RationalAngle> out;
    out.reserve(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        long k = (long)((double)i * den / n_samples);
        if (k == 0) k = 1;
        out.emplace_back(bigint(k), bigint(den));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    auto one_sided = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        double worst = 0.0;
        for (const cplx& p : x) {
            double best = 1e300;
            for (const cplx& q : y) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

double julia_hausdorff_sample(cplx c1, cplx c2, int n_samples) {
    auto angles = hausdorff_angle_set(n_samples);
    std::vector<cplx> ga, gb;
    ga.reserve(angles.size());
    gb.reserve(angles.size());
    for (const auto& t : angles) {
        ga.push_back(landing_point(c1, t));
        gb.push_back(landing_point(c2, t));
    }
    return hausdorff_distance(ga, gb);
}

}  // namespace jtess
