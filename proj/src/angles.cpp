#include "jtess/angles.hpp"

#include <algorithm>
#include <numeric>

namespace jtess {

namespace {

bigint gcd_big(bigint a, bigint b) {
    while (b != 0) {
        bigint t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

RationalAngle::RationalAngle(bigint num, bigint den) {
    if (den <= 0) throw std::invalid_argument("RationalAngle: denominator must be positive");
    num %= den;
    if (num < 0) num += den;
    bigint g = gcd_big(num, den);
    num_ = num / g;
    den_ = den / g;
}

RationalAngle RationalAngle::parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return RationalAngle(bigint(text), 1);
    return RationalAngle(bigint(text.substr(0, slash)), bigint(text.substr(slash + 1)));
}

RationalAngle RationalAngle::doubled() const { return RationalAngle(num_ * 2, den_); }

std::pair<RationalAngle, RationalAngle> RationalAngle::halves() const {
    return {RationalAngle(num_, den_ * 2), RationalAngle(num_ + den_, den_ * 2)};
}

int RationalAngle::preperiod() const {
    // Doubling divides the even part of the denominator by two each step;
    // once the denominator is odd the orbit is purely periodic.
    int v = 0;
    bigint d = den_;
    while (d % 2 == 0) {
        d /= 2;
        ++v;
    }
    return v;
}

int RationalAngle::period() const {
    bigint d = den_;
    while (d % 2 == 0) d /= 2;
    if (d == 1) return 1;  // eventually fixed at 0
    // multiplicative order of 2 modulo d
    bigint pow = 2 % d;
    int k = 1;
    while (pow != 1) {
        pow = (pow * 2) % d;
        ++k;
        if (k > 1000000) throw std::runtime_error("RationalAngle::period: order too large");
    }
    return k;
}

double RationalAngle::value() const {
    return num_.convert_to<double>() / den_.convert_to<double>();
}

std::string RationalAngle::str() const {
    return num_.str() + "/" + den_.str();
}

bool in_ccw_arc(const RationalAngle& x, const RationalAngle& a, const RationalAngle& b) {
    if (a == b) return false;
    if (a < b) return a < x && x < b;
    return a < x || x < b;  // arc wraps through 0
}

double ccw_arc_length(const RationalAngle& a, const RationalAngle& b) {
    double d = b.value() - a.value();
    if (d <= 0) d += 1.0;
    return d;
}

bool RotationData::contains(const RationalAngle& t) const { return index_of(t) >= 0; }

int RotationData::index_of(const RationalAngle& t) const {
    for (size_t i = 0; i < cycle.size(); ++i)
        if (cycle[i] == t) return static_cast<int>(i);
    return -1;
}

std::string TileAddress::str() const {
    return "theta=" + angle.str() + " level=" + std::to_string(level) + " sig=" + sig_char(sig);
}

RationalAngle double_angle(const RationalAngle& theta) { return theta.doubled(); }

RotationData rotation_cycle(int p, int q) {
    if (q < 1 || p < 1 || p > q) throw std::invalid_argument("rotation_cycle: need 1 <= p <= q");
    if (std::gcd(p, q) != 1) throw std::invalid_argument("rotation_cycle: p, q must be coprime");

    RotationData rot;
    rot.p = p;
    rot.q = q;
    if (q == 1) {
        rot.cycle = {RationalAngle(0, 1)};
        rot.critical_plus = rot.critical_minus = RationalAngle(0, 1);
        return rot;
    }

    const bigint den = (bigint(1) << q) - 1;
    std::vector<bool> seen(static_cast<size_t>(q <= 25 ? (1 << q) - 1 : 0), false);
    if (seen.empty()) throw std::invalid_argument("rotation_cycle: q too large for search");

    for (long k = 1; k < (1L << q) - 1; ++k) {
        if (seen[static_cast<size_t>(k)]) continue;
        // collect the doubling cycle of k/den
        std::vector<long> orbit;
        long j = k;
        do {
            orbit.push_back(j);
            seen[static_cast<size_t>(j)] = true;
            j = (2 * j) % static_cast<long>(den.convert_to<long>());
        } while (j != k);
        if (static_cast<int>(orbit.size()) != q) continue;

        std::vector<long> sorted = orbit;
        std::sort(sorted.begin(), sorted.end());
        // position of each orbit element in circular order
        auto pos = [&](long v) {
            return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                                    sorted.begin());
        };
        // doubling must advance the circular position by a constant p' == p
        int advance = (pos(orbit[1]) - pos(orbit[0]) + q) % q;
        bool ok = advance == p % q;
        for (size_t i = 0; ok && i + 1 < orbit.size(); ++i)
            ok = (pos(orbit[i + 1]) - pos(orbit[i]) + q) % q == advance;
        if (!ok) continue;

        for (long v : sorted) rot.cycle.emplace_back(bigint(v), den);
        break;
    }
    if (rot.cycle.empty()) throw std::runtime_error("rotation_cycle: no cycle found");

    // Critical sector default: the widest complementary arc, traversed ccw
    // from theta_0^+ to theta_0^-.
    double widest = -1.0;
    for (int i = 0; i < q; ++i) {
        const RationalAngle& a = rot.cycle[static_cast<size_t>(i)];
        const RationalAngle& b = rot.cycle[static_cast<size_t>((i + 1) % q)];
        double len = ccw_arc_length(a, b);
        if (len > widest) {
            widest = len;
            rot.critical_plus = a;
            rot.critical_minus = b;
        }
    }
    return rot;
}

std::optional<int> hits_cycle_after(const RationalAngle& theta, const RotationData& rot) {
    RationalAngle t = theta;
    int horizon = theta.preperiod() + theta.period();
    for (int n = 0; n <= horizon; ++n) {
        if (rot.contains(t)) return n;
        t = t.doubled();
    }
    return std::nullopt;
}

bool in_theta_f(const RationalAngle& theta, const RotationData& rot) {
    return hits_cycle_after(theta, rot).has_value();
}

int depth(const RationalAngle& theta, const RotationData& rot) {
    RationalAngle t = theta;
    int horizon = theta.preperiod() + theta.period() + rot.q;
    for (int n = 0; n <= horizon; ++n) {
        if (t == rot.critical_plus) return n;
        t = t.doubled();
    }
    throw NotInThetaF("depth: orbit of " + theta.str() + " never reaches theta_0^+");
}

std::vector<RationalAngle> preimage_angles(const RationalAngle& theta, int n) {
    if (n < 0) throw std::invalid_argument("preimage_angles: n must be >= 0");
    std::vector<RationalAngle> cur = {theta};
    for (int i = 0; i < n; ++i) {
        std::vector<RationalAngle> next;
        next.reserve(cur.size() * 2);
        for (const auto& t : cur) {
            auto [h0, h1] = t.halves();
            next.push_back(h0);
            next.push_back(h1);
        }
        cur = std::move(next);
    }
    return cur;
}

bool address_realizable(const TileAddress& addr, long l, const RotationData& rot) {
    if (!in_theta_f(addr.angle, rot))
        throw std::invalid_argument("address_realizable: angle not in Theta_f");
    if (l == 1) return true;
    const RationalAngle target =
        addr.sig == Signature::Plus ? rot.critical_plus : rot.critical_minus;
    // First n > 0 with 2^n theta = theta_0^sig; later hits recur every
    // doubling period of the target.
    RationalAngle t = addr.angle.doubled();
    int horizon = addr.angle.preperiod() + addr.angle.period() + rot.q + 1;
    int n0 = -1;
    for (int n = 1; n <= horizon; ++n) {
        if (t == target) {
            n0 = n;
            break;
        }
        t = t.doubled();
    }
    if (n0 < 0) return false;
    const int ret = target.period();
    for (long k = 0; k < l; ++k)
        if ((addr.level + n0 + k * ret) % l == 0) return true;
    return false;
}

std::vector<TileAddress> subdivision_levels(const TileAddress& coarse, long l, int q) {
    if (q < 1) throw std::invalid_argument("subdivision_levels: q must be >= 1");
    std::vector<TileAddress> out;
    out.reserve(static_cast<size_t>(q));
    for (int j = 0; j < q; ++j)
        out.push_back(TileAddress{coarse.angle, coarse.level + l * j, coarse.sig});
    return out;
}

TileAddress normalize_address(const TileAddress& addr, const RotationData& rot,
                              bool nontrivial_primitive) {
    if (!nontrivial_primitive) return addr;
    TileAddress a = addr;
    if (a.sig == Signature::Minus && a.angle == rot.critical_plus)
        a.angle = rot.critical_minus;
    else if (a.sig == Signature::Plus && a.angle == rot.critical_minus)
        a.angle = rot.critical_plus;
    return a;
}

}  // namespace jtess
