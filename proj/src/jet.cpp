#include "jtess/jet.hpp"

#include <algorithm>
#include <cmath>

namespace jtess {

Jet Jet::identity(int order) {
    Jet j(order);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
}

Jet Jet::constant(cplx value, int order) {
    Jet j(order);
    j.c_[0] = value;
    return j;
}

Jet Jet::monomial(cplx value, int power, int order) {
    Jet j(order);
    if (power <= order) j.c_[static_cast<size_t>(power)] = value;
    return j;
}

void Jet::set_coeff(int k, cplx v) {
    if (k > order()) c_.resize(static_cast<size_t>(k) + 1, cplx(0.0));
    c_[static_cast<size_t>(k)] = v;
}

Jet Jet::truncated(int order) const {
    Jet j(order);
    for (int k = 0; k <= std::min(order, this->order()); ++k)
        j.c_[static_cast<size_t>(k)] = c_[static_cast<size_t>(k)];
    return j;
}

Jet Jet::operator+(const Jet& o) const {
    Jet r(std::max(order(), o.order()));
    for (int k = 0; k <= r.order(); ++k) r.c_[static_cast<size_t>(k)] = coeff(k) + o.coeff(k);
    return r;
}

Jet Jet::operator-(const Jet& o) const {
    Jet r(std::max(order(), o.order()));
    for (int k = 0; k <= r.order(); ++k) r.c_[static_cast<size_t>(k)] = coeff(k) - o.coeff(k);
    return r;
}

Jet Jet::operator*(const Jet& o) const {
    int n = std::max(order(), o.order());
    Jet r(n);
    for (int i = 0; i <= std::min(n, order()); ++i) {
        if (c_[static_cast<size_t>(i)] == cplx(0.0)) continue;
        for (int j = 0; i + j <= n && j <= o.order(); ++j)
            r.c_[static_cast<size_t>(i + j)] += c_[static_cast<size_t>(i)] * o.coeff(j);
    }
    return r;
}

Jet Jet::operator*(cplx s) const {
    Jet r = *this;
    for (auto& c : r.c_) c *= s;
    return r;
}

Jet Jet::compose(const Jet& other) const {
    if (std::abs(other.coeff(0)) != 0.0)
        throw std::invalid_argument("Jet::compose: inner jet must have zero constant term");
    int n = std::max(order(), other.order());
    Jet r = Jet::constant(coeff(order()), n);
    for (int k = order() - 1; k >= 0; --k) {
        r = r * other;
        r.c_[0] += c_[static_cast<size_t>(k)];
    }
    return r.truncated(n);
}

Jet Jet::reciprocal() const {
    cplx a0 = coeff(0);
    if (std::abs(a0) == 0.0) throw std::invalid_argument("Jet::reciprocal: zero constant term");
    Jet r(order());
    r.c_[0] = 1.0 / a0;
    for (int k = 1; k <= order(); ++k) {
        cplx s = 0.0;
        for (int j = 1; j <= k; ++j) s += coeff(j) * r.c_[static_cast<size_t>(k - j)];
        r.c_[static_cast<size_t>(k)] = -s / a0;
    }
    return r;
}

Jet Jet::inverse() const {
    if (std::abs(coeff(0)) != 0.0 || std::abs(coeff(1)) == 0.0)
        throw std::invalid_argument("Jet::inverse: need c0 = 0, c1 != 0");
    int n = order();
    Jet g = Jet::monomial(1.0 / coeff(1), 1, n);
    Jet id = Jet::identity(n);
    int rounds = 2;
    for (int m = n; m > 1; m /= 2) ++rounds;
    for (int it = 0; it < rounds; ++it) {
        Jet err = compose(g) - id;
        Jet corr = err * derivative().compose(g).reciprocal();
        g = (g - corr).truncated(n);
        g.c_[0] = 0.0;
    }
    return g;
}

Jet Jet::derivative() const {
    if (order() == 0) return Jet(0);
    Jet r(order() - 1);
    for (int k = 1; k <= order(); ++k)
        r.c_[static_cast<size_t>(k - 1)] = c_[static_cast<size_t>(k)] * double(k);
    return r;
}

Jet Jet::pow(int k) const {
    Jet r = Jet::constant(1.0, order());
    Jet base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

Jet Jet::log1p(const Jet& u) {
    if (std::abs(u.coeff(0)) != 0.0)
        throw std::invalid_argument("Jet::log1p: argument must have zero constant term");
    int n = u.order();
    Jet r(n);
    Jet p = u;
    for (int k = 1; k <= n; ++k) {
        r = r + p * (((k % 2) ? 1.0 : -1.0) / double(k));
        if (k < n) p = p * u;
    }
    return r;
}

cplx Jet::eval(cplx z) const {
    cplx r = c_.back();
    for (int k = order() - 1; k >= 0; --k) r = r * z + c_[static_cast<size_t>(k)];
    return r;
}

cplx Jet::eval_derivative(cplx z) const { return derivative().eval(z); }

double Jet::trust_radius(double tail_bound) const {
    // radius where every term is dominated by the linear one, shrunk so the
    // first omitted order contributes at most tail_bound
    double lead = std::max(1.0, std::abs(coeff(1)));
    double rho_conv = 1e9;
    for (int k = 2; k <= order(); ++k) {
        double a = std::abs(coeff(k));
        if (a > 0.0) rho_conv = std::min(rho_conv, std::pow(lead / a, 1.0 / (k - 1)));
    }
    if (rho_conv > 1e8) return 1.0;
    double margin = std::pow(tail_bound, 1.0 / std::max(2, order()));
    return rho_conv * std::min(0.75, margin);
}

Jet koenigs_series(const Jet& f) {
    cplx lambda = f.coeff(1);
    double al = std::abs(lambda);
    if (std::abs(f.coeff(0)) > 1e-300)
        throw std::invalid_argument("koenigs_series: fixed point must be at 0");
    if (al == 0.0 || std::abs(al - 1.0) < 1e-14)
        throw std::invalid_argument("koenigs_series: |lambda| must differ from 0 and 1");
    int n = f.order();
    Jet psi = Jet::identity(n);
    for (int k = 2; k <= n; ++k) {
        Jet err = psi.compose(f) - psi * lambda;
        cplx ek = err.coeff(k);
        cplx denom = std::pow(lambda, k) - lambda;
        psi.set_coeff(k, -ek / denom);
    }
    return psi;
}

namespace {

NormalFormResult eliminate_orders(const Jet& series, cplx lambda, int q, int max_order,
                                  double small_divisor_threshold) {
    int n = series.order();
    Jet f = series;
    Jet change = Jet::identity(n);

    auto apply_change = [&](const Jet& chg) {
        f = chg.compose(f).compose(chg.inverse()).truncated(n);
        change = chg.compose(change).truncated(n);
    };

    int limit = std::min(max_order, n);
    for (int k = 2; k <= limit; ++k) {
        bool resonant = (k - 1) % q == 0;
        if (resonant) {
            if (k == q + 1) {
                // rescale so the z^{q+1} coefficient becomes 1
                cplx c = f.coeff(q + 1);
                if (std::abs(c) < 1e-14)
                    throw SmallDivisor("normal_form: vanishing z^{q+1} coefficient");
                cplx scale = std::pow(c, 1.0 / double(q));
                apply_change(Jet::monomial(scale, 1, n));
            }
            continue;
        }
        cplx a = f.coeff(k);
        if (std::abs(a) == 0.0) continue;
        cplx denom = std::pow(lambda, k) - lambda;
        if (std::abs(denom) < small_divisor_threshold)
            throw SmallDivisor("normal_form: small divisor at order " + std::to_string(k));
        Jet chg = Jet::identity(n) - Jet::monomial(a / denom, k, n);
        apply_change(chg);
    }
    return {change, f};
}

}  // namespace

NormalFormResult normal_form(const Jet& series, cplx lambda, int q,
                             double small_divisor_threshold) {
    if (series.order() < 2 * q + 1)
        throw std::invalid_argument("normal_form: truncation order must be >= 2q+1");
    return eliminate_orders(series, lambda, q, 2 * q, small_divisor_threshold);
}

NormalFormResult resonant_normal_form(const Jet& series, cplx lambda, int q,
                                      double small_divisor_threshold) {
    return eliminate_orders(series, lambda, q, series.order(), small_divisor_threshold);
}

cplx iterate_normal_coeff(cplx lambda, int n, int q) {
    cplx c = 0.0;
    cplx lq1 = std::pow(lambda, q + 1);
    cplx ln = 1.0;
    for (int k = 0; k < n; ++k) {
        c = lq1 * c + ln;
        ln *= lambda;
    }
    return c;
}

}  // namespace jtess
