#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jtess/boettcher.hpp"
#include "jtess/linearize.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace jtess;

namespace {
RationalAngle ra(long n, long d) { return RationalAngle(bigint(n), bigint(d)); }
}

TEST_CASE("Koenigs coordinate: normalization and functional equation") {
    for (auto [p, q, r] : std::vector<std::tuple<int, int, double>>{
             {1, 3, 0.9}, {1, 1, 0.7}, {1, 2, 0.95}}) {
        DegenerationPair pair = build_pair_s1(p, q, r);
        KoenigsCoord phi = KoenigsCoord::build(pair);
        CHECK(std::abs(phi.eval(pair.alpha0)) < 1e-12);
        CHECK(std::abs(phi.eval(cplx(0.0)) - 1.0) < 1e-12);
        cplx fl0 = quad_iter(pair.c_f, cplx(0.0), pair.l);
        CHECK(std::abs(phi.eval(fl0) - pair.lambda()) < 1e-11);

        // functional equation on a spread of basin samples
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        int done = 0;
        double worst = 0.0;
        while (done < 200) {
            cplx z = pair.alpha0 + 0.9 * cplx(u(rng), u(rng));
            cplx v;
            try {
                v = phi.eval(z);
            } catch (const NotInBasin&) {
                continue;
            }
            cplx w = phi.eval(quad_iter(pair.c_f, z, pair.l));
            worst = std::max(worst,
                             std::abs(w - pair.lambda() * v) / (1.0 + std::abs(v)));
            ++done;
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("Koenigs derivative is consistent") {
    DegenerationPair pair = build_pair_s1(1, 3, 0.9);
    KoenigsCoord phi = KoenigsCoord::build(pair);
    cplx z = pair.alpha0 + cplx(0.21, -0.13);
    cplx d;
    cplx v = phi.eval_with_deriv(z, d);
    cplx h(1e-7, 5e-8);
    cplx fd = (phi.eval(z + h) - v) / h;
    CHECK(std::abs(fd - d) < 1e-4 * (1.0 + std::abs(d)));
}

TEST_CASE("Fatou coordinate: Abel equation and normalization") {
    for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 3}, {1, 1}, {1, 2}}) {
        DegenerationPair pair = build_pair_s1(p, q, 1.0);
        FatouCoord phi = FatouCoord::build(pair);
        CHECK(std::abs(phi.eval(cplx(0.0))) < 1e-9);
        long lq = pair.lq();
        cplx g0 = quad_iter(pair.c_g, cplx(0.0), lq);
        CHECK(std::abs(phi.eval(g0) - 1.0) < 1e-8);
        cplx g20 = quad_iter(pair.c_g, cplx(0.0), 2 * lq);
        CHECK(std::abs(phi.eval(g20) - 2.0) < 1e-8);

        // Abel equation along the critical orbit and perturbations of it
        double worst = 0.0;
        cplx z = 0.0;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int k = 0; k < 40; ++k) {
            z = quad_iter(pair.c_g, z, lq);
            cplx zp = z + 0.02 * cplx(u(rng), u(rng));
            try {
                cplx a = phi.eval(zp);
                cplx b = phi.eval(quad_iter(pair.c_g, zp, lq));
                worst = std::max(worst, std::abs(b - a - 1.0));
            } catch (const NotInPetalBasin&) {
            }
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("Fatou deep inverse round-trips") {
    DegenerationPair pair = build_pair_s1(1, 3, 1.0);
    FatouCoord phi = FatouCoord::build(pair);
    for (cplx t : {cplx(90.0, 3.0), cplx(150.0, -20.0), cplx(70.0, 0.0)}) {
        cplx z = phi.deep_inverse(t);
        CHECK(std::abs(phi.eval(z) - t) < 1e-8 * (1.0 + std::abs(t)));
    }
}

TEST_CASE("ueda linearization") {
    // exactly linear map: u(z) = z - a
    auto lin = [](cplx z) { return z + 1.0; };
    UedaResult r1 = ueda_linearize(lin, 1.0, cplx(2.0), cplx(37.0, 4.0), 100000);
    CHECK(std::abs(r1.value - cplx(35.0, 4.0)) < 1e-12);

    // tau > 1, exact: telescoping is geometric
    double tau = 1.01;
    auto lin2 = [tau](cplx z) { return tau * z + 1.0; };
    UedaResult r2 = ueda_linearize(lin2, tau, cplx(5.0), cplx(60.0, -2.0));
    // u must satisfy u(f(z)) = tau u(z) + 1
    UedaResult r2f = ueda_linearize(lin2, tau, cplx(5.0), lin2(cplx(60.0, -2.0)));
    CHECK(std::abs(r2f.value - (tau * r2.value + 1.0)) < 1e-10);

    // perturbed translation: functional equation residual and u_0(z) ~ z
    auto pert = [](cplx z) { return z + 1.0 + 0.1 / z; };
    for (double re : {50.0, 500.0}) {
        cplx z(re, 3.0);
        UedaResult a = ueda_linearize(pert, 1.0, cplx(1.0), z);
        UedaResult b = ueda_linearize(pert, 1.0, cplx(1.0), pert(z));
        CHECK(std::abs(b.value - (a.value + 1.0)) < 1e-9);
        CHECK(std::abs(a.value / z - 1.0) < 0.05);
    }
}

TEST_CASE("ueda convergence in the perturbation parameter") {
    auto family = [](double eps) {
        return [eps](cplx z) { return (1.0 + eps) * z + 1.0 + 0.1 / z; };
    };
    std::vector<cplx> sample = {cplx(40.0, 0.0), cplx(55.0, 8.0), cplx(70.0, -5.0)};
    double prev = 1e9;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        double worst = 0.0;
        for (cplx z : sample) {
            UedaResult ue = ueda_linearize(family(eps), 1.0 + eps, cplx(10.0), z);
            UedaResult u0 = ueda_linearize(family(0.0), 1.0, cplx(10.0), z);
            worst = std::max(worst, std::abs(ue.value - u0.value));
        }
        CHECK(worst < prev);
        prev = worst;
    }
}

TEST_CASE("degenerating arcs join alpha and the ray landing points") {
    // q = 1: the arc runs along the real axis
    {
        DegenerationPair pair = build_pair_s1(1, 1, 0.9);
        KoenigsCoord phi = KoenigsCoord::build(pair);
        cplx rep = landing_point(pair.c_f, ra(0, 1));
        auto arcs = degenerating_arcs(pair, phi, {rep}, 1e-4);
        REQUIRE(arcs.size() == 1);
        CHECK(arcs[0].complete);
        for (const cplx& z : arcs[0].points) CHECK(std::abs(z.imag()) < 1e-9);
        CHECK(std::abs(arcs[0].endpoint - rep) < 1e-4);
    }

    // q = 3: three arcs, permuted by f with rotation number 1/3
    {
        DegenerationPair pair = build_pair_s1(1, 3, 0.9);
        KoenigsCoord phi = KoenigsCoord::build(pair);
        std::vector<cplx> reps;
        for (const auto& t : pair.rot.cycle) reps.push_back(landing_point(pair.c_f, t));
        auto arcs = degenerating_arcs(pair, phi, reps, 1e-4);
        REQUIRE(arcs.size() == 3);
        for (const auto& a : arcs) CHECK(a.complete);
        // endpoints hit all three repelling points
        std::set<int> hit;
        for (const auto& a : arcs) hit.insert(a.endpoint_index);
        CHECK(hit.size() == 3);

        // the image f(arc_j) lies on the arc set (forward invariance),
        // measured against the polyline segments
        auto seg_dist = [](cplx z, cplx a, cplx b) {
            cplx d = b - a;
            double n2 = std::norm(d);
            if (n2 == 0.0) return std::abs(z - a);
            double t = std::clamp(((z - a) * std::conj(d)).real() / n2, 0.0, 1.0);
            return std::abs(z - (a + t * d));
        };
        auto dist_to_arcs = [&](cplx z) {
            double best = 1e9;
            for (const auto& a : arcs)
                for (size_t i = 0; i + 1 < a.points.size(); ++i)
                    best = std::min(best, seg_dist(z, a.points[i], a.points[i + 1]));
            return best;
        };
        double worst = 0.0;
        for (const auto& a : arcs)
            for (size_t i = 0; i < a.points.size(); i += 3)
                worst = std::max(worst, dist_to_arcs(quad_step(pair.c_f, a.points[i])));
        CHECK(worst < 5e-3);
    }
}

TEST_CASE("case B arc joins alpha0 to the repelling fixed point") {
    DegenerationPair pair = build_pair_s2(1, 3, 0.9);
    KoenigsCoord phi = KoenigsCoord::build(pair);
    auto arcs = degenerating_arcs(pair, phi, {pair.O_f_prime.points[0]}, 1e-4);
    REQUIRE(arcs.size() == 1);
    CHECK(arcs[0].complete);
    CHECK(std::abs(arcs[0].points.front() - pair.alpha0) < 1e-12);
    CHECK(std::abs(arcs[0].endpoint - pair.O_f_prime.points[0]) < 1e-4);
}

TEST_CASE("invariant regions of the model family") {
    int q = 1;
    for (double eps : {1e-2, 1e-3}) {
        Jet f(4);
        cplx lam = 1.0 - eps;
        f.set_coeff(1, lam);
        f.set_coeff(2, lam);  // lambda z (1 + z)
        auto rep = invariant_regions_check(lam, q, f, 1000);
        CHECK(rep.d_inclusion);
        CHECK(rep.e_inclusion);
        REQUIRE(rep.path_diameters.size() == 1);
        CHECK(rep.path_diameters[0] > 0.0);
    }

    // diameter scaling diam ~ eps^{1/q}
    for (int q2 : {1, 2}) {
        std::vector<double> ratios;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            Jet f(2 * q2 + 2);
            cplx lam = 1.0 - eps;
            f.set_coeff(1, lam);
            f.set_coeff(q2 + 1, lam);
            auto rep = invariant_regions_check(lam, q2, f, 400);
            CHECK(rep.d_inclusion);
            CHECK(rep.e_inclusion);
            ratios.push_back(rep.path_diameters[0] / std::pow(eps, 1.0 / q2));
        }
        double lo = *std::min_element(ratios.begin(), ratios.end());
        double hi = *std::max_element(ratios.begin(), ratios.end());
        CHECK(hi / lo < 3.0);
    }

    // eps = 0 degenerates
    Jet f0(3);
    f0.set_coeff(1, 1.0);
    f0.set_coeff(2, 1.0);
    CHECK(invariant_regions_check(cplx(1.0), 1, f0).degenerate);
}
