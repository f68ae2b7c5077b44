#include "jtess/model.hpp"

#include <cmath>

namespace jtess {

FundamentalModel FundamentalModel::contracting(double R, int q) {
    if (R <= 0.0 || R >= 1.0)
        throw std::invalid_argument("FundamentalModel: need 0 < R < 1");
    return FundamentalModel{R, q};
}

FundamentalModel FundamentalModel::translation(int q) { return FundamentalModel{1.0, q}; }

ModelClass model_classify(const FundamentalModel& model, cplx W, double edge_tol) {
    ModelClass out;
    if (model.is_translation()) {
        double x = W.real();
        double mu = std::floor(x);
        out.mu = static_cast<long>(mu);
        out.band_pos = x - mu;
        out.sig = W.imag() >= 0.0 ? Signature::Plus : Signature::Minus;
        if (out.band_pos < edge_tol || out.band_pos > 1.0 - edge_tol)
            out.edges |= kEdgeCircular;
        if (std::abs(W.imag()) < edge_tol) out.edges |= kEdgeCritical;
        if (std::abs(out.band_pos - 0.5) < edge_tol) out.edges |= kEdgeEssential;
        return out;
    }

    double a = model.a();
    cplx d = W - a;
    double rho = std::abs(d);
    if (rho == 0.0) throw OnSlit("model_classify: W at the fixed point");
    double t = std::arg(d);  // (-pi, pi]
    if (std::abs(t) < edge_tol && rho >= 0.0 && W.real() > a) {
        // on (or next to) the slit I = [a, inf)
        if (std::abs(t) < 1e-14) throw OnSlit("model_classify: W on the slit");
        out.edges |= kEdgeDegenerating;
    }
    double x = std::log(rho / a) / std::log(model.R);  // band coordinate
    double mu = std::floor(x);
    out.mu = static_cast<long>(mu);
    out.band_pos = x - mu;
    out.sig = W.imag() >= 0.0 ? Signature::Plus : Signature::Minus;
    if (out.band_pos < edge_tol || out.band_pos > 1.0 - edge_tol) out.edges |= kEdgeCircular;
    if (std::abs(out.band_pos - 0.5) < edge_tol) out.edges |= kEdgeEssential;
    if (std::abs(W.imag()) < edge_tol * rho && W.real() < a) out.edges |= kEdgeCritical;
    return out;
}

namespace {
using lcplx = std::complex<long double>;
}

cplx model_H(const FundamentalModel& model, cplx W) {
    if (model.is_translation()) return W;
    long double a = 1.0L / (1.0L - (long double)model.R);
    lcplx d = lcplx(W.real(), W.imag()) - a;
    long double rho = std::abs(d);
    if (rho == 0.0L) throw OnSlit("model_H: W at the fixed point");
    long double t = std::arg(d);  // (-pi, pi]
    if (t <= 0.0L) t += 2.0L * (long double)kPi;  // (0, 2 pi]
    if (t >= 2.0L * (long double)kPi - 1e-18L)
        throw OnSlit("model_H: W on the slit");
    long double x = (std::log(rho) - std::log(a)) / std::log((long double)model.R);
    long double y = 2.0L * a * std::tan(((long double)kPi - t) / 2.0L);
    return cplx(static_cast<double>(x), static_cast<double>(y));
}

cplx model_H_inverse(const FundamentalModel& model, cplx W) {
    if (model.is_translation()) return W;
    long double a = 1.0L / (1.0L - (long double)model.R);
    long double rho = a * std::pow((long double)model.R, (long double)W.real());
    long double t = (long double)kPi - 2.0L * std::atan((long double)W.imag() / (2.0L * a));
    lcplx d = std::polar(rho, t);
    return cplx(static_cast<double>(a + d.real()), static_cast<double>(d.imag()));
}

}  // namespace jtess
