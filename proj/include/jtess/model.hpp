#pragma once

#include "jtess/angles.hpp"
#include "jtess/common.hpp"

namespace jtess {

struct OnSlit : NumericsError {
    explicit OnSlit(const std::string& what) : NumericsError(what) {}
};

enum EdgeFlags : unsigned {
    kEdgeNone = 0,
    kEdgeCircular = 1,
    kEdgeCritical = 2,
    kEdgeDegenerating = 4,
    kEdgeEssential = 8,
};

// The model pair on the W-plane: F(W) = R W + 1 with fixed point
// a = 1/(1-R), slit I = [a, inf), annular tiles A_mu(+-); its R -> 1 limit
// G(W) = W + 1 with strip tiles C_mu(+-).
struct FundamentalModel {
    double R = 0.5;
    int q = 1;

    static FundamentalModel contracting(double R, int q);
    static FundamentalModel translation(int q);  // the G model

    bool is_translation() const { return R >= 1.0; }
    double a() const { return 1.0 / (1.0 - R); }

    cplx apply(cplx W) const {  // F or G
        return is_translation() ? W + 1.0 : R * W + 1.0;
    }
};

struct ModelClass {
    long mu = 0;
    Signature sig = Signature::Plus;
    unsigned edges = kEdgeNone;
    double band_pos = 0.5;  // fractional position inside the band/strip
};

// Tile classification in the model plane. edge_tol is measured in band units.
ModelClass model_classify(const FundamentalModel& model, cplx W, double edge_tol = 1e-3);

// The conjugacy H between F on C - I and G on C:
//   W = a + rho e^{it}, 0 < t < 2 pi:
//   H(W) = (log rho - log a)/log R + 2 a i tan((pi - t)/2).
cplx model_H(const FundamentalModel& model, cplx W);
cplx model_H_inverse(const FundamentalModel& model, cplx W);

}  // namespace jtess
