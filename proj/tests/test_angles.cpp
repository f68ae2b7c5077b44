#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jtess/angles.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace jtess;

namespace {

RationalAngle ra(long n, long d) { return RationalAngle(bigint(n), bigint(d)); }

// Independent brute-force search for the p/q cycle: enumerate all doubling
// cycles over denominator 2^q - 1 and keep those whose sorted order is
// advanced by a constant step p under doubling.
std::vector<std::vector<long>> brute_cycles_with_rotation(int p, int q) {
    long den = (1L << q) - 1;
    std::set<long> used;
    std::vector<std::vector<long>> found;
    for (long k = 1; k < den; ++k) {
        if (used.count(k)) continue;
        std::vector<long> orbit;
        long j = k;
        do {
            orbit.push_back(j);
            used.insert(j);
            j = (2 * j) % den;
        } while (j != k);
        if ((int)orbit.size() != q) continue;
        std::vector<long> sorted = orbit;
        std::sort(sorted.begin(), sorted.end());
        std::map<long, int> pos;
        for (int i = 0; i < q; ++i) pos[sorted[i]] = i;
        bool ok = true;
        for (int i = 0; i < q && ok; ++i)
            ok = pos[(2 * sorted[i]) % den] == (pos[sorted[i]] + p) % q;
        if (ok) found.push_back(sorted);
    }
    return found;
}

}  // namespace

TEST_CASE("doubling is exact") {
    CHECK(ra(0, 1).doubled() == ra(0, 1));
    CHECK(ra(1, 7).doubled() == ra(2, 7));
    CHECK(ra(9, 14).doubled() == ra(2, 7));
    // odd part of the denominator is preserved
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        long d = 1 + (long)(rng() % 10000);
        long n = (long)(rng() % (unsigned long)d);
        RationalAngle t = ra(n, d);
        bigint odd = t.den();
        while (odd % 2 == 0) odd /= 2;
        RationalAngle u = t.doubled();
        bigint odd2 = u.den();
        while (odd2 % 2 == 0) odd2 /= 2;
        // odd2 divides odd (cancellation can only shrink it)
        CHECK(odd % odd2 == 0);
    }
}

TEST_CASE("preperiod and period") {
    CHECK(ra(1, 7).period() == 3);
    CHECK(ra(1, 7).preperiod() == 0);
    CHECK(ra(9, 14).preperiod() == 1);
    CHECK(ra(9, 14).period() == 3);
    CHECK(ra(1, 4).preperiod() == 2);
    CHECK(ra(1, 4).period() == 1);
    CHECK(ra(1, 3).period() == 2);
}

TEST_CASE("rotation_cycle known values") {
    RotationData r13 = rotation_cycle(1, 3);
    REQUIRE(r13.cycle.size() == 3);
    CHECK(r13.cycle[0] == ra(1, 7));
    CHECK(r13.cycle[1] == ra(2, 7));
    CHECK(r13.cycle[2] == ra(4, 7));
    CHECK(r13.critical_plus == ra(4, 7));
    CHECK(r13.critical_minus == ra(1, 7));

    RotationData r11 = rotation_cycle(1, 1);
    REQUIRE(r11.cycle.size() == 1);
    CHECK(r11.cycle[0] == ra(0, 1));

    RotationData r12 = rotation_cycle(1, 2);
    REQUIRE(r12.cycle.size() == 2);
    CHECK(r12.cycle[0] == ra(1, 3));
    CHECK(r12.cycle[1] == ra(2, 3));
}

TEST_CASE("rotation_cycle agrees with brute force for q <= 6") {
    for (int q = 2; q <= 6; ++q) {
        for (int p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            auto brute = brute_cycles_with_rotation(p, q);
            REQUIRE(brute.size() == 1);  // uniqueness
            RotationData rot = rotation_cycle(p, q);
            REQUIRE((int)rot.cycle.size() == q);
            long den = (1L << q) - 1;
            for (int i = 0; i < q; ++i) {
                CHECK(rot.cycle[i].num() == brute[0][i]);
                CHECK(rot.cycle[i].den() == den);
            }
        }
    }
}

TEST_CASE("rotation_cycle doubling advances circular order by p") {
    for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 3}, {2, 5}, {3, 7}}) {
        RotationData rot = rotation_cycle(p, q);
        for (int j = 0; j < q; ++j) {
            RationalAngle img = rot.cycle[j].doubled();
            CHECK(rot.index_of(img) == (j + p) % q);
        }
    }
}

TEST_CASE("primitive critical sector example") {
    // Parabolic with two rays {2/7, 5/7} at the marked point: widest gap runs
    // ccw from 5/7 to 2/7.
    RotationData rot;
    rot.q = 2;
    rot.cycle = {ra(2, 7), ra(5, 7)};
    double g1 = ccw_arc_length(ra(2, 7), ra(5, 7));
    double g2 = ccw_arc_length(ra(5, 7), ra(2, 7));
    CHECK(g2 > g1);
    // aliasing of addresses for non-trivial primitives
    rot.critical_plus = ra(5, 7);
    rot.critical_minus = ra(2, 7);
    TileAddress a{ra(2, 7), 3, Signature::Plus};
    TileAddress n = normalize_address(a, rot, true);
    CHECK(n.angle == ra(5, 7));
    CHECK(n.level == 3);
    TileAddress b{ra(5, 7), -1, Signature::Minus};
    CHECK(normalize_address(b, rot, true).angle == ra(2, 7));
    CHECK(normalize_address(b, rot, false).angle == ra(5, 7));
}

TEST_CASE("depth") {
    RotationData rot = rotation_cycle(1, 3);
    CHECK(depth(ra(4, 7), rot) == 0);
    CHECK(depth(ra(2, 7), rot) == 1);
    CHECK(depth(ra(1, 7), rot) == 2);
    CHECK(depth(ra(9, 14), rot) == 2);  // 9/14 -> 2/7 -> 4/7
    CHECK_THROWS_AS(depth(ra(1, 5), rot), NotInThetaF);
    CHECK(!in_theta_f(ra(1, 5), rot));

    // depth(2 theta) = depth(theta) - 1 when depth >= 1
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        auto pres = preimage_angles(ra(4, 7), 1 + (int)(rng() % 6));
        for (const auto& t : pres) {
            int d = depth(t, rot);
            if (d >= 1) CHECK(depth(t.doubled(), rot) == d - 1);
        }
    }
}

TEST_CASE("preimage_angles") {
    RationalAngle t = ra(4, 7);
    auto p0 = preimage_angles(t, 0);
    REQUIRE(p0.size() == 1);
    CHECK(p0[0] == t);

    auto p1 = preimage_angles(t, 1);
    REQUIRE(p1.size() == 2);
    CHECK(p1[0] == ra(2, 7));
    CHECK(p1[1] == ra(11, 14));
    CHECK(p1[1].doubled() == t);
    // 9/14 is a preimage of 2/7, not of 4/7
    CHECK(ra(9, 14).doubled() == ra(2, 7));

    auto z2 = preimage_angles(ra(0, 1), 2);
    std::set<std::string> got;
    for (auto& a : z2) got.insert(a.str());
    CHECK(got == std::set<std::string>{"0/1", "1/4", "1/2", "3/4"});

    // 2^n preimages, all mapping back
    for (int n = 0; n <= 8; ++n) {
        auto ps = preimage_angles(ra(3, 7), n);
        CHECK(ps.size() == (size_t)1 << n);
        for (auto a : ps) {
            for (int k = 0; k < n; ++k) a = a.doubled();
            CHECK(a == ra(3, 7));
        }
    }
}

TEST_CASE("address_realizable") {
    RotationData rot = rotation_cycle(1, 3);
    // l = 1: everything realizable
    CHECK(address_realizable(TileAddress{ra(9, 14), -5, Signature::Minus}, 1, rot));

    // l = 3 (Case B with q' = 3): theta_0^+ = 4/7 returns to itself every 3
    // doublings, so (4/7, m, +) needs m + 3k == 0 mod 3, i.e. m == 0 mod 3.
    CHECK(address_realizable(TileAddress{ra(4, 7), 0, Signature::Plus}, 3, rot));
    CHECK(address_realizable(TileAddress{ra(4, 7), 3, Signature::Plus}, 3, rot));
    CHECK(!address_realizable(TileAddress{ra(4, 7), 1, Signature::Plus}, 3, rot));
    // depth-2 angle 1/7: n0 = 2, so levels m == 1 mod 3 are the plus tiles
    CHECK(address_realizable(TileAddress{ra(1, 7), 1, Signature::Plus}, 3, rot));
    CHECK(!address_realizable(TileAddress{ra(1, 7), 0, Signature::Plus}, 3, rot));

    CHECK_THROWS(address_realizable(TileAddress{ra(1, 5), 0, Signature::Plus}, 3, rot));
}

TEST_CASE("subdivision_levels") {
    TileAddress base{ra(4, 7), 0, Signature::Plus};
    auto s1 = subdivision_levels(base, 1, 1);
    REQUIRE(s1.size() == 1);
    CHECK(s1[0] == base);

    auto s3 = subdivision_levels(base, 1, 3);
    REQUIRE(s3.size() == 3);
    CHECK(s3[0].level == 0);
    CHECK(s3[1].level == 1);
    CHECK(s3[2].level == 2);

    TileAddress b2{ra(2, 7), 2, Signature::Minus};
    auto s2 = subdivision_levels(b2, 2, 2);
    REQUIRE(s2.size() == 2);
    CHECK(s2[0].level == 2);
    CHECK(s2[1].level == 4);
}

TEST_CASE("serialization") {
    CHECK(ra(4, 7).str() == "4/7");
    CHECK(RationalAngle::parse("9/14") == ra(9, 14));
    CHECK(RationalAngle::parse("3") == ra(0, 1));
    TileAddress a{ra(4, 7), -2, Signature::Minus};
    CHECK(a.str() == "theta=4/7 level=-2 sig=-");
}
