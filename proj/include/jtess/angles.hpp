#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace jtess {

using bigint = boost::multiprecision::cpp_int;

// Exact external angle in T = R/Z, kept reduced with 0 <= num < den.
class RationalAngle {
public:
    RationalAngle() : num_(0), den_(1) {}
    RationalAngle(bigint num, bigint den);

    static RationalAngle parse(const std::string& text);  // "num/den" or "num"

    const bigint& num() const { return num_; }
    const bigint& den() const { return den_; }

    RationalAngle doubled() const;                    // 2*theta mod 1
    std::pair<RationalAngle, RationalAngle> halves() const;  // theta/2, theta/2 + 1/2

    // Steps until the doubling orbit becomes periodic, and the period itself.
    int preperiod() const;
    int period() const;

    double value() const;
    std::string str() const;

    bool operator==(const RationalAngle& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RationalAngle& o) const { return !(*this == o); }
    bool operator<(const RationalAngle& o) const { return num_ * o.den_ < o.num_ * den_; }

private:
    bigint num_, den_;
};

// True iff x lies in the open arc from a to b going counterclockwise.
bool in_ccw_arc(const RationalAngle& x, const RationalAngle& a, const RationalAngle& b);

// Counterclockwise arc length from a to b (in [0,1) as a double).
double ccw_arc_length(const RationalAngle& a, const RationalAngle& b);

enum class Signature : int { Plus = +1, Minus = -1 };

inline Signature opposite(Signature s) {
    return s == Signature::Plus ? Signature::Minus : Signature::Plus;
}
inline char sig_char(Signature s) { return s == Signature::Plus ? '+' : '-'; }

// The unique doubling cycle of combinatorial rotation number p/q, together
// with the two cycle angles bounding the critical sector.
struct RotationData {
    int p = 1;
    int q = 1;
    std::vector<RationalAngle> cycle;  // sorted increasingly in [0,1)
    RationalAngle critical_plus;       // theta_0^+
    RationalAngle critical_minus;      // theta_0^-

    bool contains(const RationalAngle& t) const;
    int index_of(const RationalAngle& t) const;  // -1 if absent
};

struct TileAddress {
    RationalAngle angle;
    long level = 0;
    Signature sig = Signature::Plus;

    bool operator==(const TileAddress& o) const {
        return angle == o.angle && level == o.level && sig == o.sig;
    }
    std::string str() const;
};

struct NotInThetaF : std::runtime_error {
    explicit NotInThetaF(const std::string& what) : std::runtime_error(what) {}
};

RationalAngle double_angle(const RationalAngle& theta);

// rotation_cycle(p, q): exhaustive search over angles with denominator 2^q - 1.
// Critical sector bounded by the widest complementary arc of the cycle; this
// combinatorial default can be overridden by the geometric computation.
RotationData rotation_cycle(int p, int q);

// Minimal n >= 0 with 2^n theta = rot.critical_plus. Throws NotInThetaF.
int depth(const RationalAngle& theta, const RotationData& rot);

// Minimal n >= 0 with 2^n theta in the cycle; nullopt if the orbit misses it.
std::optional<int> hits_cycle_after(const RationalAngle& theta, const RotationData& rot);

bool in_theta_f(const RationalAngle& theta, const RotationData& rot);

// All 2^n angles t with 2^n t = theta.
std::vector<RationalAngle> preimage_angles(const RationalAngle& theta, int n);

// Realizability of (theta, m, sig) for cycle-point period l (paper's indexing
// convention: true iff l == 1 or some n > 0 with 2^n theta = theta_0^sig has
// m + n == 0 mod l).
bool address_realizable(const TileAddress& addr, long l, const RotationData& rot);

// The q fine-tessellation addresses (theta, mu + l*j, sig), j = 0..q-1.
std::vector<TileAddress> subdivision_levels(const TileAddress& coarse, long l, int q);

// Non-trivial primitive aliasing: (theta_pm, m, mp) names the tile
// (theta_mp, m, mp). No-op unless the pair is a non-trivial primitive.
TileAddress normalize_address(const TileAddress& addr, const RotationData& rot,
                              bool nontrivial_primitive);

}  // namespace jtess
