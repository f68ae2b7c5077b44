#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jtess/dynamics.hpp"

using namespace jtess;

TEST_CASE("param_s1 closed forms") {
    CHECK(std::abs(param_s1(1, 1, 1.0) - cplx(0.25)) < 1e-15);
    CHECK(std::abs(param_s1(1, 2, 1.0) - cplx(-0.75)) < 1e-15);
    CHECK(std::abs(param_s1(1, 3, 0.0)) < 1e-15);
}

TEST_CASE("find_attracting_cycle basics") {
    Cycle c0 = find_attracting_cycle(cplx(0.0));
    CHECK(c0.period == 1);
    CHECK(std::abs(c0.points[0]) < 1e-12);
    CHECK(std::abs(c0.multiplier) < 1e-12);

    // (s1) fixed point of multiplier 0.5 e^{2 pi i/3}
    cplx c = param_s1(1, 3, 0.5);
    Cycle cyc = find_attracting_cycle(c);
    CHECK(cyc.period == 1);
    cplx target = std::polar(0.5, kTwoPi / 3.0);
    CHECK(std::abs(cyc.multiplier - target) < 1e-9);

    CHECK_THROWS_AS(find_attracting_cycle(cplx(0.3)), Escaped);
}

TEST_CASE("multiplier equals chain-rule product") {
    for (double r : {0.3, 0.9}) {
        cplx c = param_s1(2, 5, r);
        Cycle cyc = find_attracting_cycle(c);
        cplx prod = 1.0;
        for (auto& z : cyc.points) prod *= 2.0 * z;
        CHECK(std::abs(prod - cyc.multiplier) < 1e-10 * (1.0 + std::abs(prod)));
        CHECK(std::abs(cyc.multiplier - std::polar(r, kTwoPi * 2 / 5)) < 1e-8);
    }
}

TEST_CASE("solve_cycle_with_multiplier matches the closed form on (s1)") {
    cplx target = std::polar(0.8, kTwoPi / 3.0);
    cplx c_expect = target / 2.0 - target * target / 4.0;
    auto sol = solve_cycle_with_multiplier(1, target, c_expect + cplx(0.02, -0.01),
                                           target / 2.0 + cplx(0.01, 0.01));
    CHECK(std::abs(sol.c - c_expect) < 1e-10);
    CHECK(std::abs(sol.cycle.multiplier - target) < 1e-10);

    auto one = solve_cycle_with_multiplier(1, cplx(1.0), cplx(0.24, 0.005), cplx(0.49, 0.01));
    CHECK(std::abs(one.c - cplx(0.25)) < 1e-9);
}

TEST_CASE("rabbit center from Newton") {
    cplx c = satellite_center(1, 3);
    CHECK(std::abs(c - cplx(-0.122561, 0.744862)) < 1e-5);
    CHECK(std::abs(quad_iter(c, cplx(0.0), 3)) < 1e-12);
}

TEST_CASE("round trip: solve then detect") {
    auto sol = solve_cycle_with_multiplier(3, cplx(0.4, 0.0), satellite_center(1, 3),
                                           cplx(0.01, 0.005));
    Cycle redetect = find_attracting_cycle(sol.c);
    CHECK(redetect.period == 3);
    double best = 1e9;
    for (auto& z : redetect.points) best = std::min(best, std::abs(z - sol.cycle.points[0]));
    CHECK(best < 1e-9);
}

TEST_CASE("build_pair_s1 case A") {
    DegenerationPair pair = build_pair_s1(1, 3, 0.9);
    CHECK(pair.case_tag == CaseTag::A);
    CHECK(pair.q == 3);
    CHECK(pair.q_prime == 3);
    CHECK(pair.l == 1);
    CHECK(pair.l_prime == 1);
    CHECK(pair.l * pair.q == pair.l_prime * pair.q_prime);
    // O'_f = O_f in Case A
    CHECK(std::abs(pair.O_f_prime.points[0] - pair.O_f.points[0]) < 1e-14);
    CHECK(std::abs(pair.O_g.multiplier - unit(1.0 / 3.0)) < 1e-14);
    // parabolic beta = omega/2 on the principal cardioid
    CHECK(std::abs(pair.beta0 - unit(1.0 / 3.0) / 2.0) < 1e-12);
}

TEST_CASE("build_pair_s2 case B with q' = 3") {
    DegenerationPair pair = build_pair_s2(1, 3, 0.9);
    CHECK(pair.case_tag == CaseTag::B);
    CHECK(pair.q == 1);
    CHECK(pair.q_prime == 3);
    CHECK(pair.l == 3);
    CHECK(pair.l_prime == 1);
    CHECK(pair.l * pair.q == pair.l_prime * pair.q_prime);
    // multiplier of O_f is real r
    CHECK(std::abs(pair.O_f.multiplier - cplx(0.9)) < 1e-9);
    // shares g with the s1 pair
    DegenerationPair s1 = build_pair_s1(1, 3, 0.9);
    CHECK(std::abs(pair.c_g - s1.c_g) < 1e-14);
    // O'_f is a repelling fixed point near beta
    CHECK(pair.O_f_prime.period == 1);
    CHECK(pair.O_f_prime.repelling());
    CHECK(std::abs(pair.O_f_prime.points[0] - pair.beta0) < 0.2);
    // alpha0 is a point of the attracting cycle
    double d = 1e9;
    for (auto& z : pair.O_f.points) d = std::min(d, std::abs(z - pair.alpha0));
    CHECK(d < 1e-14);
}

TEST_CASE("perturbed cycle at r = 1 is the parabolic cycle") {
    DegenerationPair pair = build_pair_s1(1, 3, 1.0);
    CHECK(pair.parabolic_only);
    Cycle pert = find_perturbed_cycle(pair);
    CHECK(std::abs(pert.points[0] - pair.O_g.points[0]) < 1e-14);
}

TEST_CASE("case classification table") {
    // q = q' = 1, l = l' = 3: Case A (non-trivial primitive)
    DegenerationPair pair;
    pair.p = pair.q = 1;
    pair.p_prime = pair.q_prime = 1;
    pair.l = pair.l_prime = 3;
    CHECK(classify_case(pair) == CaseTag::A);
    CHECK(pair.nontrivial_primitive());
    pair.q_prime = 3;
    pair.l = 3;
    pair.l_prime = 1;
    CHECK(classify_case(pair) == CaseTag::B);
    pair.l = 2;
    CHECK_THROWS_AS(classify_case(pair), InconsistentPair);
}

TEST_CASE("continuity of cycles in r") {
    DegenerationPair a = build_pair_s2(1, 3, 0.90);
    DegenerationPair b = build_pair_s2(1, 3, 0.905);
    double best = 1e9;
    for (auto& z : b.O_f.points) best = std::min(best, std::abs(z - a.O_f.points[0]));
    CHECK(best < 0.05);
    CHECK(std::abs(a.c_f - b.c_f) < 0.05);
}

TEST_CASE("quad_jet matches finite differences") {
    cplx c(-0.1, 0.2);
    cplx z0(0.3, -0.1);
    Jet j = quad_jet(c, z0, 5, 8);
    CHECK(std::abs(j.coeff(0)) == 0.0);
    CHECK(std::abs(j.coeff(1) - quad_deriv(c, z0, 5)) < 1e-12);
    cplx h(1e-3, 0.5e-3);
    cplx exact = quad_iter(c, z0 + h, 5) - quad_iter(c, z0, 5);
    CHECK(std::abs(j.eval(h) - exact) < 1e-14);
}
