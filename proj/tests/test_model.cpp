#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jtess/model.hpp"

#include <random>

using namespace jtess;

TEST_CASE("model tiles and edges") {
    FundamentalModel G = FundamentalModel::translation(3);
    ModelClass g0 = model_classify(G, cplx(0.5, 1.0));
    CHECK(g0.mu == 0);
    CHECK(g0.sig == Signature::Plus);
    ModelClass g1 = model_classify(G, cplx(-0.5, -2.0));
    CHECK(g1.mu == -1);
    CHECK(g1.sig == Signature::Minus);
    ModelClass ge = model_classify(G, cplx(0.5, 2.0), 1e-3);
    CHECK((ge.edges & kEdgeEssential) != 0);

    FundamentalModel F = FundamentalModel::contracting(0.5, 3);
    double a = F.a();
    // mid-band point of A_0(+): |W - a| = R^{1/2} a, upper half
    cplx W = a + std::polar(std::sqrt(0.5) * a, kPi / 2);
    ModelClass f0 = model_classify(F, W);
    CHECK(f0.mu == 0);
    CHECK(f0.sig == Signature::Plus);
    CHECK((f0.edges & kEdgeEssential) != 0);
    // one band in: F maps band mu to mu+1
    ModelClass f1 = model_classify(F, F.apply(W));
    CHECK(f1.mu == 1);
    CHECK(f1.sig == Signature::Plus);
    CHECK_THROWS_AS(model_classify(F, cplx(a * 1.5, 0.0)), OnSlit);
}

TEST_CASE("H conjugates F to G") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    for (double R : {0.5, 0.9, 0.99}) {
        FundamentalModel F = FundamentalModel::contracting(R, 3);
        FundamentalModel G = FundamentalModel::translation(3);
        double a = F.a();
        double worst = 0.0;
        for (int s = 0; s < 1000; ++s) {
            double u = -3.0 + 6.0 * uu(rng);
            double t = 0.15 + (kTwoPi - 0.3) * uu(rng);
            cplx W = a + std::polar(a * std::pow(R, u), t);
            cplx lhs = model_H(F, F.apply(W));
            cplx rhs = model_H(F, W) + 1.0;
            worst = std::max(worst, std::abs(lhs - rhs));
            (void)G;
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("H maps bands to strips with matched indices") {
    FundamentalModel F = FundamentalModel::contracting(0.8, 2);
    double a = F.a();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    FundamentalModel G = FundamentalModel::translation(2);
    for (int s = 0; s < 400; ++s) {
        double u = -4.0 + 8.0 * uu(rng);
        double t = 0.05 + (kTwoPi - 0.1) * uu(rng);
        cplx W = a + std::polar(a * std::pow(F.R, u), t);
        ModelClass mf = model_classify(F, W, 1e-9);
        cplx HW = model_H(F, W);
        ModelClass mg = model_classify(G, HW, 1e-9);
        CHECK(mf.mu == mg.mu);
        CHECK(mf.sig == mg.sig);
    }
    // band boundary |W - a| = R a maps to Re H = 1
    cplx Wb = a + std::polar(F.R * a, 2.0);
    CHECK(std::abs(model_H(F, Wb).real() - 1.0) < 1e-12);
    CHECK(model_H(F, Wb).imag() > 0.0);
    // W = 0 maps to 0
    CHECK(std::abs(model_H(F, cplx(0.0))) < 1e-12);
}

TEST_CASE("H inverse round-trips") {
    FundamentalModel F = FundamentalModel::contracting(0.9, 3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    double a = F.a();
    for (int s = 0; s < 300; ++s) {
        double u = -3.0 + 6.0 * uu(rng);
        double t = 0.1 + (kTwoPi - 0.2) * uu(rng);
        cplx W = a + std::polar(a * std::pow(F.R, u), t);
        cplx back = model_H_inverse(F, model_H(F, W));
        CHECK(std::abs(back - W) < 1e-9 * (1.0 + std::abs(W)));
    }
}
