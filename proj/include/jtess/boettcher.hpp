#pragma once

#include "jtess/angles.hpp"
#include "jtess/common.hpp"

#include <functional>
#include <vector>

namespace jtess {

// Escape-rate (Green) potential G(z) = lim 2^{-n} log |f^n(z)|; 0 if the
// orbit does not escape within the budget.
double green_potential(cplx c, cplx z, long budget = 1000);

struct RayTrace {
    RationalAngle angle;
    std::vector<cplx> points;      // ordered by decreasing potential
    std::vector<double> potentials;
    cplx landing_estimate = 0.0;
    bool converged = false;
};

struct NewtonDivergence : NumericsError {
    explicit NewtonDivergence(const std::string& what) : NumericsError(what) {}
};

// Trace R(theta) from potential ~16 down to min_potential, stepping potential
// levels with Newton correction onto f^j(z) = (Boettcher target); the angle's
// exact doubling orbit selects the target at each level.
RayTrace trace_ray(cplx c, const RationalAngle& theta, double min_potential);

// Same descent for a floating-point angle (used by exterior transport).
RayTrace trace_ray_real(cplx c, double theta, double min_potential);

// The point on R(theta) at a prescribed potential.
cplx point_at_potential(cplx c, const RationalAngle& theta, double potential);
cplx point_at_potential_real(cplx c, double theta, double potential);

// gamma(theta): ray-trace estimate polished against the (pre)periodicity of
// the landing point forced by the angle.
cplx landing_point(cplx c, const RationalAngle& theta);

// External angle of an exterior point, in turns: digit-consistent argument
// of the Boettcher coordinate.
double boettcher_angle(cplx c, cplx z);

// Sample-based symmetric Hausdorff distance between the two landing-point
// sets over n rational angles of bounded denominator (same set both sides).
double julia_hausdorff_sample(cplx c1, cplx c2, int n_samples);

std::vector<RationalAngle> hausdorff_angle_set(int n_samples);

double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace jtess
