#include "jtess/tess.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace jtess {

void Box::add(cplx z) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
}

bool Box::contains(cplx z, double pad) const {
    return z.real() >= x0 - pad && z.real() <= x1 + pad && z.imag() >= y0 - pad &&
           z.imag() <= y1 + pad;
}

bool TilePatch::contains(cplx z) const {
    if (!bbox.contains(z)) return false;
    bool in = false;
    size_t n = boundary.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const cplx& a = boundary[j];
        const cplx& b = boundary[i];
        if ((b.imag() > z.imag()) != (a.imag() > z.imag())) {
            double x = b.real() + (z.imag() - b.imag()) * (a.real() - b.real()) /
                                      (a.imag() - b.imag());
            if (z.real() < x) in = !in;
        }
    }
    return in;
}

double TilePatch::diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < boundary.size(); ++i)
        for (size_t j = i + 1; j < boundary.size(); j += 3)
            d = std::max(d, std::abs(boundary[i] - boundary[j]));
    return d;
}

double PanelGeometry::diameter() const {
    std::vector<cplx> pts = cloud(4);
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, std::abs(pts[i] - pts[j]));
    return d;
}

std::vector<cplx> PanelGeometry::cloud(int stride) const {
    std::vector<cplx> pts;
    for (const auto& t : tiles)
        for (size_t i = 0; i < t.boundary.size(); i += static_cast<size_t>(stride))
            pts.push_back(t.boundary[i]);
    pts.push_back(landing);
    pts.push_back(base_point);
    return pts;
}

namespace {

std::string panel_key(const RationalAngle& angle, Signature sig) {
    return angle.str() + (sig == Signature::Plus ? "+" : "-");
}

// sqrt-preimage stream with branch continuity
std::vector<cplx> pull_stream(cplx c, const std::vector<cplx>& pts, cplx anchor, bool use_anchor) {
    std::vector<cplx> out;
    out.reserve(pts.size());
    cplx prev = anchor;
    bool have_prev = use_anchor;
    for (const cplx& p : pts) {
        cplx w = std::sqrt(p - c);
        if (have_prev && std::abs(-w - prev) < std::abs(w - prev)) w = -w;
        out.push_back(w);
        prev = w;
        have_prev = true;
    }
    return out;
}

}  // namespace

TessSide TessSide::build(const DegenerationPair& pair, Side side) {
    TessSide t;
    t.side_ = side;
    t.pair_ = pair;
    if (side == Side::F && pair.parabolic_only)
        throw std::invalid_argument("TessSide: no hyperbolic side in a parabolic-only pair");

    if (side == Side::F) {
        t.c_ = pair.c_f;
        t.model_ = FundamentalModel::contracting(pair.model_R(), pair.q);
        t.koenigs_ = std::make_shared<KoenigsCoord>(KoenigsCoord::build(pair));
        t.fatou_ = nullptr;

        // landing points of the parabolic angle combinatorics on the f side
        for (const auto& th : pair.rot_prime.cycle)
            t.cycle_landing_.push_back(landing_point(t.c_, th));

        std::vector<cplx> candidates;
        if (pair.case_tag == CaseTag::A) {
            candidates = t.cycle_landing_;
        } else {
            candidates = pair.O_f_prime.points;
        }
        t.arcs_ = degenerating_arcs(pair, *t.koenigs_, candidates);
        for (const auto& a : t.arcs_)
            if (!a.complete)
                throw NumericsError("TessSide: degenerating arc incomplete");

        int qs = static_cast<int>(t.arcs_.size());
        if (pair.case_tag == CaseTag::A && qs > 1) {
            // sector k lies between arc_{k-1} and arc_k; its two boundary
            // angles form one complementary gap of the cycle set, ordered so
            // that the ccw arc from start to end avoids the other members
            for (int k = 0; k < qs; ++k) {
                int lo = t.arcs_[static_cast<size_t>((k - 1 + qs) % qs)].endpoint_index;
                int hi = t.arcs_[static_cast<size_t>(k)].endpoint_index;
                const RationalAngle& a = pair.rot_prime.cycle[static_cast<size_t>(lo)];
                const RationalAngle& b = pair.rot_prime.cycle[static_cast<size_t>(hi)];
                bool ab_clear = true, ba_clear = true;
                for (const auto& other : pair.rot_prime.cycle) {
                    if (other == a || other == b) continue;
                    if (in_ccw_arc(other, a, b)) ab_clear = false;
                    if (in_ccw_arc(other, b, a)) ba_clear = false;
                }
                if (ab_clear == ba_clear)
                    throw NumericsError("TessSide: ambiguous sector gap");
                t.sector_gap_.emplace_back(ab_clear ? lo : hi, ab_clear ? hi : lo);
            }
            t.theta0_plus_ = pair.rot_prime.cycle[static_cast<size_t>(t.sector_gap_[0].first)];
            t.theta0_minus_ = pair.rot_prime.cycle[static_cast<size_t>(t.sector_gap_[0].second)];
        } else {
            // single sector: the critical gap from the combinatorics
            t.sector_gap_.emplace_back(-1, -1);
            t.theta0_plus_ = pair.rot_prime.critical_plus;
            t.theta0_minus_ = pair.rot_prime.critical_minus;
        }
    } else {
        t.c_ = pair.c_g;
        t.model_ = FundamentalModel::translation(pair.q);
        t.fatou_ = std::make_shared<FatouCoord>(FatouCoord::build(pair));
        t.koenigs_ = nullptr;
        for (const auto& th : pair.rot_prime.cycle)
            t.cycle_landing_.push_back(landing_point(t.c_, th));

        // bounding rays of the critical sector: the two rays landing at
        // beta0 whose normal-form directions are adjacent to the critical
        // petal; between them, theta0^+ sits on the side where the sector
        // coordinate has positive imaginary part
        struct RayDir {
            double delta;  // direction relative to the petal axis, in (-pi, pi]
            double im_w;
            int j;
        };
        std::vector<RayDir> described;
        double crit_arg = t.fatou_->crit_sector_arg();
        for (size_t j = 0; j < pair.rot_prime.cycle.size(); ++j) {
            if (std::abs(t.cycle_landing_[j] - pair.beta0) > 1e-5) continue;
            RayTrace tr = trace_ray(t.c_, pair.rot_prime.cycle[j], 1e-9);
            for (size_t i = tr.points.size(); i-- > 0;) {
                auto zeta = t.fatou_->zeta_loose(tr.points[i]);
                if (zeta) {
                    cplx w = -t.fatou_->kappa() / std::pow(*zeta, pair.q_prime);
                    double delta = std::remainder(std::arg(*zeta) - crit_arg, kTwoPi);
                    described.push_back({delta, w.imag(), static_cast<int>(j)});
                    break;
                }
            }
        }
        if (described.empty()) throw NumericsError("TessSide: no rays charted at beta0");
        int plus_idx = -1, minus_idx = -1;
        if (described.size() == 1) {
            plus_idx = minus_idx = described[0].j;
        } else {
            // the two adjacent rays: smallest |delta| on each side
            const RayDir* ccw = nullptr;
            const RayDir* cw = nullptr;
            for (const auto& rd : described) {
                if (rd.delta >= 0.0 && (!ccw || rd.delta < ccw->delta)) ccw = &rd;
                if (rd.delta < 0.0 && (!cw || rd.delta > cw->delta)) cw = &rd;
            }
            if (!ccw || !cw)
                throw NumericsError("TessSide: could not bracket the critical sector");
            // inside the petal the sector coordinate has Im w > 0 along the
            // clockwise wedge boundary, so the cw-adjacent ray is theta_0^+
            plus_idx = cw->j;
            minus_idx = ccw->j;
        }
        t.theta0_plus_ = pair.rot_prime.cycle[static_cast<size_t>(plus_idx)];
        t.theta0_minus_ = pair.rot_prime.cycle[static_cast<size_t>(minus_idx)];
        t.sector_gap_.emplace_back(plus_idx, minus_idx);
    }
    return t;
}

RationalAngle TessSide::sector_angle(int k, Signature sig) const {
    const auto& [pi, mi] = sector_gap_[static_cast<size_t>(k)];
    if (pi < 0) return sig == Signature::Plus ? theta0_plus_ : theta0_minus_;
    return pair_.rot_prime.cycle[static_cast<size_t>(sig == Signature::Plus ? pi : mi)];
}

cplx TessSide::Phi(cplx z) const {
    cplx d;
    return Phi_with_deriv(z, d);
}

cplx TessSide::Phi_with_deriv(cplx z, cplx& dPhi) const {
    if (side_ == Side::F) {
        cplx dphi;
        cplx phi = koenigs_->eval_with_deriv(z, dphi);
        double a = model_.a();
        cplx phiq = std::pow(phi, pair_.q);
        dPhi = -a * double(pair_.q) *
               (pair_.q == 1 ? cplx(1.0) : std::pow(phi, pair_.q - 1)) * dphi;
        return a * (1.0 - phiq);
    }
    cplx dphi;
    cplx phi = fatou_->eval_with_deriv(z, dphi);
    dPhi = double(pair_.q) * dphi;
    return double(pair_.q) * phi;
}

std::optional<PushInfo> TessSide::push_to_component(cplx z, double edge_tol,
                                                    long budget_override) const {
    long budget;
    if (side_ == Side::F)
        budget = koenigs_->default_budget() * pair_.l + 2000;
    else
        budget = fatou_->default_budget() * pair_.lq() + 2000;
    if (budget_override > 0) budget = budget_override;
    cplx w = z;
    for (long n = 0; n <= budget; ++n) {
        bool inside = false;
        if (side_ == Side::F) {
            inside = std::abs(w - koenigs_->alpha0()) <= koenigs_->handoff_radius();
        } else {
            auto cp = fatou_->chart(w);
            inside = cp && fatou_->deep(*cp) && cp->sector == 0;
        }
        if (inside) {
            PushInfo out;
            out.n = n;
            out.W = Phi(w);
            out.mc = model_classify(model_, out.W, edge_tol);
            out.level = out.mc.mu * pair_.l - n;
            return out;
        }
        if (std::norm(w) > 25.0) return std::nullopt;
        w = w * w + c_;
    }
    return std::nullopt;
}

AddressInfo TessSide::address_of(cplx z, double edge_tol) const {
    auto p = push_to_component(z, edge_tol);
    if (!p) throw NotInInterior("address_of: point escaped or failed to classify");
    AddressInfo info;
    info.push = *p;
    info.addr.level = p->level;
    info.addr.sig = p->mc.sig;
    // collect every containing tile consistent with the dynamics; a unique
    // angle wins, disagreement (overlapping truncated polygons) stays unknown
    const PanelGeometry* match = nullptr;
    bool ambiguous = false;
    for (const auto& [key, p] : panels_) {
        if (!p.bbox.contains(z, 1e-12)) continue;
        for (const auto& t : p.tiles) {
            if (t.addr.level != info.addr.level || t.addr.sig != info.addr.sig) continue;
            if (!t.contains(z)) continue;
            if (match && !(match->angle == p.angle)) ambiguous = true;
            match = &p;
            break;
        }
    }
    if (match && !ambiguous) {
        info.addr.angle = match->angle;
        info.angle_known = true;
    }
    return info;
}

cplx TessSide::invert_phi_f(cplx w, cplx seed) const {
    cplx z = seed;
    for (int it = 0; it < 40; ++it) {
        cplx d;
        cplx v = koenigs_->eval_with_deriv(z, d);
        cplx delta = (v - w) / d;
        z -= delta;
        if (std::abs(delta) < 1e-12 * (1.0 + std::abs(z))) return z;
    }
    cplx d;
    cplx v = koenigs_->eval_with_deriv(z, d);
    if (std::abs(v - w) > 1e-6 * (1.0 + std::abs(w)))
        throw NoConvergence("invert_phi_f: Newton stalled");
    return z;
}

cplx TessSide::invert_phi_g(cplx t, cplx seed) const {
    cplx z = seed;
    for (int it = 0; it < 40; ++it) {
        cplx d;
        cplx v = fatou_->eval_with_deriv(z, d);
        cplx delta = (v - t) / d;
        z -= delta;
        if (std::abs(delta) < 1e-12 * (1.0 + std::abs(z))) return z;
    }
    cplx d;
    cplx v = fatou_->eval_with_deriv(z, d);
    if (std::abs(v - t) > 1e-6 * (1.0 + std::abs(t)))
        throw NoConvergence("invert_phi_g: Newton stalled");
    return z;
}

TilePatch TessSide::seed_tile_f(int sector, Signature sig, long mu, int samples) const {
    int qs = sector_count();
    double r = pair_.r;
    double width = kPi / qs;
    double base = (2.0 * sector - 1.0) * kPi / qs;
    double a0 = base + (sig == Signature::Plus ? 0.0 : width);
    double a1 = a0 + width;
    double inset = 0.02 * width;
    a0 += inset;
    a1 -= inset;

    double r_out = std::pow(r, double(mu));
    double r_in = std::pow(r, double(mu + 1));
    double local = 0.6 * koenigs_->local_phi_radius();

    // radial chains at the sampled arguments
    std::vector<double> args(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double t = double(i) / (samples - 1);
        args[static_cast<size_t>(i)] = a0 + (a1 - a0) * 0.5 * (1.0 - std::cos(kPi * t));
    }
    std::vector<double> radii(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i)
        radii[static_cast<size_t>(i)] =
            r_in * std::pow(r_out / r_in, double(i) / (samples - 1));
    double r_mid = std::sqrt(r_in * r_out);

    auto chain = [&](double arg, const std::vector<double>& rhos) {
        // rhos ascending; walk outward from the local disk
        std::vector<cplx> out;
        double rho0 = std::min(0.5 * local, rhos.front());
        cplx z = koenigs_->local_inverse(std::polar(rho0, arg));
        double cur = rho0;
        for (double target : rhos) {
            while (cur < target) {
                double next = std::min(target, cur * 1.12);
                z = invert_phi_f(std::polar(next, arg), z);
                cur = next;
            }
            if (target < rho0) {
                z = koenigs_->local_inverse(std::polar(target, arg));
            }
            out.push_back(z);
        }
        return out;
    };

    TilePatch tile;
    tile.addr.angle = sector_angle(sector, sig);
    tile.addr.level = mu * pair_.l;
    tile.addr.sig = sig;
    tile.mu = mu;

    std::vector<cplx> rad_a = chain(a0, radii);
    std::vector<cplx> rad_b = chain(a1, radii);
    std::vector<cplx> circ_in, circ_out, essential;
    for (double arg : args) {
        auto pts = chain(arg, {r_in, r_mid, r_out});
        circ_in.push_back(pts[0]);
        essential.push_back(pts[1]);
        circ_out.push_back(pts[2]);
    }
    // assemble closed boundary: rad_a up, circ_out a0->a1, rad_b down,
    // circ_in a1->a0
    tile.boundary = rad_a;
    tile.boundary.insert(tile.boundary.end(), circ_out.begin(), circ_out.end());
    for (auto it = rad_b.rbegin(); it != rad_b.rend(); ++it) tile.boundary.push_back(*it);
    for (auto it = circ_in.rbegin(); it != circ_in.rend(); ++it) tile.boundary.push_back(*it);

    tile.edge_circ_outer = circ_out;
    tile.edge_circ_inner = circ_in;
    // + tiles touch the arc along their lower argument, - tiles along the
    // upper; the other radial edge is the critical one
    if (sig == Signature::Plus) {
        tile.edge_deg = rad_a;
        tile.edge_crit = rad_b;
    } else {
        tile.edge_deg = rad_b;
        tile.edge_crit = rad_a;
    }
    tile.essential = essential;
    tile.marker = chain(0.5 * (a0 + a1), {r_mid})[0];
    for (const cplx& p : tile.boundary) tile.bbox.add(p);
    return tile;
}

TilePatch TessSide::seed_tile_g(Signature sig, long mu, int samples) const {
    double q = double(pair_.q);
    double s = sig == Signature::Plus ? 1.0 : -1.0;
    double x0 = double(mu) + 0.002;
    double x1 = double(mu) + 1.0 - 0.002;

    // geometric imaginary ladder up to the cap
    std::vector<double> ys = {1e-6, 0.35, 0.8};
    while (ys.back() < im_cap_) ys.push_back(ys.back() * 1.45);

    double anchor_re = std::max(q * (fatou_->wstar() * 1.2 + 3.0), x1 + 2.0);

    auto chain = [&](double y, const std::vector<double>& xs) {
        // xs descending from the deep anchor; work in Phi units (W = q phi)
        std::vector<cplx> out;
        cplx t0 = cplx(anchor_re, s * y) / q;
        cplx z = fatou_->deep_inverse(t0);
        double cur = anchor_re;
        for (double x : xs) {
            while (cur > x) {
                double next = std::max(x, cur - 0.35 * q);
                z = invert_phi_g(cplx(next, s * y) / q, z);
                cur = next;
            }
            out.push_back(z);
        }
        return out;
    };

    std::vector<double> xs(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double t = double(i) / (samples - 1);
        xs[static_cast<size_t>(i)] = x1 - (x1 - x0) * 0.5 * (1.0 - std::cos(kPi * t));
    }
    double x_mid = double(mu) + 0.5;

    TilePatch tile;
    tile.addr.angle = sig == Signature::Plus ? theta0_plus_ : theta0_minus_;
    tile.addr.level = mu * pair_.l;
    tile.addr.sig = sig;
    tile.mu = mu;

    // vertical chains at x0 and x1 (walk at fixed y instead: assemble from
    // per-y chains across x)
    std::vector<cplx> side_lo, side_hi, bottom, essential;
    std::vector<std::vector<cplx>> rows;
    for (double y : ys) {
        auto row = chain(y, xs);  // x1 -> x0
        rows.push_back(row);
        side_hi.push_back(row.front());
        side_lo.push_back(row.back());
    }
    bottom = rows.front();  // y ~ 0: the critical edge, x1 -> x0
    for (auto& row : rows) essential.push_back(row[static_cast<size_t>(samples / 2)]);
    // mid-row marker
    tile.marker = rows[2][static_cast<size_t>(samples / 2)];
    (void)x_mid;

    // boundary: bottom (x1->x0), then up the lo side, across the top row
    // (x0->x1), and down the hi side
    tile.boundary = bottom;
    for (size_t i = 1; i < side_lo.size(); ++i) tile.boundary.push_back(side_lo[i]);
    const auto& top = rows.back();
    for (auto it = top.rbegin(); it != top.rend(); ++it) tile.boundary.push_back(*it);
    for (size_t i = side_hi.size(); i-- > 1;) tile.boundary.push_back(side_hi[i]);

    tile.edge_circ_outer = side_lo;   // toward level m - l
    tile.edge_circ_inner = side_hi;   // toward level m + l
    tile.edge_deg = {};                 // no degenerating edge for the G model
    tile.edge_crit = bottom;             // critical edge
    tile.essential = essential;
    for (const cplx& p : tile.boundary) tile.bbox.add(p);
    return tile;
}

void TessSide::seed_panels(long mu_min, long mu_max) {
    const int samples = 9;
    std::vector<PanelGeometry> seeds;

    if (side_ == Side::F) {
        int qs = sector_count();
        for (int k = 0; k < qs; ++k) {
            for (Signature sig : {Signature::Plus, Signature::Minus}) {
                PanelGeometry panel;
                panel.angle = sector_angle(k, sig);
                panel.sig = sig;
                for (long mu = mu_min; mu <= mu_max; ++mu)
                    panel.tiles.push_back(seed_tile_f(k, sig, mu, samples));
                panel.base_point = koenigs_->alpha0();
                seeds.push_back(std::move(panel));
            }
        }
    } else {
        for (Signature sig : {Signature::Plus, Signature::Minus}) {
            PanelGeometry panel;
            panel.angle = sig == Signature::Plus ? theta0_plus_ : theta0_minus_;
            panel.sig = sig;
            for (long mu = mu_min; mu <= mu_max; ++mu)
                panel.tiles.push_back(seed_tile_g(sig, mu, samples));
            panel.base_point = fatou_->beta0();
            seeds.push_back(std::move(panel));
        }
    }

    long push_count = side_ == Side::F ? pair_.l - 1 : pair_.lq() - 1;
    std::vector<PanelGeometry> all;
    for (const auto& p : seeds) all.push_back(p);
    for (long j = 1; j <= push_count; ++j) {
        // push the previous generation forward by one step
        size_t start = all.size() - seeds.size();
        std::vector<PanelGeometry> next;
        for (size_t i = start; i < all.size(); ++i) {
            const PanelGeometry& src = all[i];
            PanelGeometry dst;
            dst.angle = src.angle.doubled();
            dst.sig = src.sig;
            dst.base_point = src.base_point * src.base_point + c_;
            for (const auto& tl : src.tiles) {
                TilePatch nt;
                nt.addr.angle = dst.angle;
                nt.addr.level = tl.addr.level + 1;
                nt.addr.sig = tl.addr.sig;
                nt.mu = tl.mu;
                auto mapv = [&](const std::vector<cplx>& v) {
                    std::vector<cplx> o;
                    o.reserve(v.size());
                    for (const cplx& p : v) o.push_back(p * p + c_);
                    return o;
                };
                nt.boundary = mapv(tl.boundary);
                nt.edge_circ_outer = mapv(tl.edge_circ_outer);
                nt.edge_circ_inner = mapv(tl.edge_circ_inner);
                nt.edge_deg = mapv(tl.edge_deg);
                nt.edge_crit = mapv(tl.edge_crit);
                nt.essential = mapv(tl.essential);
                nt.marker = tl.marker * tl.marker + c_;
                for (const cplx& p : nt.boundary) nt.bbox.add(p);
                dst.tiles.push_back(std::move(nt));
            }
            next.push_back(std::move(dst));
        }
        for (auto& p : next) all.push_back(std::move(p));
    }

    for (auto& p : all) {
        p.depth = 0;
        RationalAngle t = p.angle;
        for (int n = 0; n <= pair_.rot_prime.q + 2; ++n) {
            if (t == theta0_plus_) break;
            t = t.doubled();
            p.depth = n + 1;
        }
        p.landing = landing_point(c_, p.angle);
        for (const auto& tl : p.tiles)
            for (const cplx& b : tl.boundary) p.bbox.add(b);
        p.bbox.add(p.landing);
        p.bbox.add(p.base_point);
        std::string key = panel_key(p.angle, p.sig);
        if (!panels_.count(key)) panels_.emplace(key, std::move(p));
    }
}

void TessSide::pull_back_panel(const PanelGeometry& src) {
    auto [h0, h1] = src.angle.halves();
    bool need0 = !panels_.count(panel_key(h0, src.sig));
    bool need1 = !panels_.count(panel_key(h1, src.sig));
    if (!need0 && !need1) return;

    // pull the whole panel with branch continuity chained across tiles
    PanelGeometry P;
    P.sig = src.sig;
    P.depth = src.depth + 1;
    cplx anchor = 0.0;
    bool have_anchor = false;
    for (const auto& tl : src.tiles) {
        // concatenate the tile's point data into one stream
        std::vector<cplx> stream = tl.boundary;
        size_t nb = stream.size();
        auto append = [&stream](const std::vector<cplx>& v) {
            stream.insert(stream.end(), v.begin(), v.end());
        };
        append(tl.edge_circ_outer);
        size_t no = stream.size();
        append(tl.edge_circ_inner);
        size_t ni = stream.size();
        append(tl.edge_deg);
        size_t na = stream.size();
        append(tl.edge_crit);
        size_t nbb = stream.size();
        append(tl.essential);
        size_t ne = stream.size();
        stream.push_back(tl.marker);

        std::vector<cplx> pulled = pull_stream(c_, stream, anchor, have_anchor);
        anchor = pulled.front();
        have_anchor = true;

        TilePatch nt;
        nt.addr.angle = h0;  // assigned below
        nt.addr.level = tl.addr.level - 1;
        nt.addr.sig = tl.addr.sig;
        nt.mu = tl.mu;
        nt.boundary.assign(pulled.begin(), pulled.begin() + static_cast<long>(nb));
        nt.edge_circ_outer.assign(pulled.begin() + static_cast<long>(nb),
                                  pulled.begin() + static_cast<long>(no));
        nt.edge_circ_inner.assign(pulled.begin() + static_cast<long>(no),
                                  pulled.begin() + static_cast<long>(ni));
        nt.edge_deg.assign(pulled.begin() + static_cast<long>(ni),
                         pulled.begin() + static_cast<long>(na));
        nt.edge_crit.assign(pulled.begin() + static_cast<long>(na),
                         pulled.begin() + static_cast<long>(nbb));
        nt.essential.assign(pulled.begin() + static_cast<long>(nbb),
                            pulled.begin() + static_cast<long>(ne));
        nt.marker = pulled.back();
        for (const cplx& p : nt.boundary) nt.bbox.add(p);
        P.tiles.push_back(std::move(nt));
    }

    // branch landmarks: the two preimages of the landing point
    cplx gp = std::sqrt(src.landing - c_);
    cplx land0 = landing_point(c_, h0);
    cplx land1 = landing_point(c_, h1);
    double d0p = std::abs(land0 - gp), d0m = std::abs(land0 + gp);
    cplx land_for_plusbranch = d0p < d0m ? land0 : land1;
    cplx land_for_minusbranch = d0p < d0m ? land1 : land0;
    RationalAngle ang_plus = d0p < d0m ? h0 : h1;
    RationalAngle ang_minus = d0p < d0m ? h1 : h0;

    // which branch did the pulled stream take? compare against the panel
    // geometry: distance of the pulled cloud to +gp versus -gp
    double dplus = 1e300, dminus = 1e300;
    for (const auto& tl : P.tiles) {
        for (size_t i = 0; i < tl.boundary.size(); i += 5) {
            dplus = std::min(dplus, std::abs(tl.boundary[i] - gp));
            dminus = std::min(dminus, std::abs(tl.boundary[i] + gp));
        }
    }
    bool pulled_is_plus = dplus < dminus;
    if (dplus / dminus > 0.25 && dminus / dplus > 0.25) P.flagged = true;

    cplx base_p = std::sqrt(src.base_point - c_);
    auto finish = [&](PanelGeometry&& panel, const RationalAngle& ang, cplx land) {
        panel.angle = ang;
        panel.landing = land;
        double bp = 1e300, bm = 1e300;
        for (const auto& tl : panel.tiles)
            for (size_t i = 0; i < tl.boundary.size(); i += 7) {
                bp = std::min(bp, std::abs(tl.boundary[i] - base_p));
                bm = std::min(bm, std::abs(tl.boundary[i] + base_p));
            }
        panel.base_point = bp < bm ? base_p : -base_p;
        for (auto& tl : panel.tiles) tl.addr.angle = ang;
        for (const auto& tl : panel.tiles)
            for (const cplx& b : tl.boundary) panel.bbox.add(b);
        panel.bbox.add(panel.landing);
        panel.bbox.add(panel.base_point);
        panels_.emplace(panel_key(ang, panel.sig), std::move(panel));
    };

    PanelGeometry Q;  // the mirrored branch
    Q.sig = P.sig;
    Q.depth = P.depth;
    Q.flagged = P.flagged;
    for (const auto& tl : P.tiles) {
        TilePatch nt = tl;
        for (auto& p : nt.boundary) p = -p;
        for (auto& p : nt.edge_circ_outer) p = -p;
        for (auto& p : nt.edge_circ_inner) p = -p;
        for (auto& p : nt.edge_deg) p = -p;
        for (auto& p : nt.edge_crit) p = -p;
        for (auto& p : nt.essential) p = -p;
        nt.marker = -nt.marker;
        nt.bbox = Box{};
        for (const cplx& p : nt.boundary) nt.bbox.add(p);
        Q.tiles.push_back(std::move(nt));
    }

    RationalAngle angP = pulled_is_plus ? ang_plus : ang_minus;
    RationalAngle angQ = pulled_is_plus ? ang_minus : ang_plus;
    cplx landP = pulled_is_plus ? land_for_plusbranch : land_for_minusbranch;
    cplx landQ = pulled_is_plus ? land_for_minusbranch : land_for_plusbranch;
    if ((angP == h0 && need0) || (angP == h1 && need1)) finish(std::move(P), angP, landP);
    if ((angQ == h0 && need0) || (angQ == h1 && need1)) finish(std::move(Q), angQ, landQ);
}

void TessSide::build_panels(int max_depth, long mu_min, long mu_max) {
    panels_.clear();
    seed_panels(mu_min, mu_max);
    bool progress = true;
    while (progress) {
        progress = false;
        std::vector<const PanelGeometry*> frontier;
        for (const auto& [k, p] : panels_)
            if (p.depth < max_depth) frontier.push_back(&p);
        std::sort(frontier.begin(), frontier.end(),
                  [](const PanelGeometry* a, const PanelGeometry* b) {
                      return a->depth < b->depth;
                  });
        for (const PanelGeometry* p : frontier) {
            auto [h0, h1] = p->angle.halves();
            bool need = !panels_.count(panel_key(h0, p->sig)) ||
                        !panels_.count(panel_key(h1, p->sig));
            if (!need) continue;
            pull_back_panel(*p);
            progress = true;
        }
    }
}

const PanelGeometry* TessSide::find_panel(const RationalAngle& angle, Signature sig) const {
    auto it = panels_.find(panel_key(angle, sig));
    return it == panels_.end() ? nullptr : &it->second;
}

const TilePatch* TessSide::find_tile(const TileAddress& addr) const {
    const PanelGeometry* p = find_panel(addr.angle, addr.sig);
    if (!p) return nullptr;
    for (const auto& t : p->tiles)
        if (t.addr.level == addr.level) return &t;
    return nullptr;
}

const PanelGeometry* TessSide::panel_containing(cplx z, const TilePatch** tile) const {
    for (const auto& [k, p] : panels_) {
        if (!p.bbox.contains(z, 1e-12)) continue;
        for (const auto& t : p.tiles) {
            if (t.contains(z)) {
                if (tile) *tile = &t;
                return &p;
            }
        }
    }
    if (tile) *tile = nullptr;
    return nullptr;
}

namespace {

// Eight tiles meet at precritical points; probes landing next to such a
// corner are excluded from the strict neighbour rules.
bool near_vertex(const FundamentalModel& model, cplx W, double tol) {
    try {
        ModelClass mc = model_classify(model, W, tol);
        return (mc.edges & kEdgeCircular) && (mc.edges & kEdgeCritical);
    } catch (const OnSlit&) {
        return false;
    }
}

}  // namespace

EdgeReport verify_edge_sharing(const TessSide& side, const std::vector<TileAddress>& samples,
                               double probe_frac) {
    EdgeReport rep;
    long l = side.level_l();
    for (const auto& addr : samples) {
        const TilePatch* tile = side.find_tile(addr);
        if (!tile) continue;

        struct Want {
            const std::vector<cplx>* edge;
            std::string name;
            bool angle_checked;
            RationalAngle angle;
            long level;
            Signature sig;
        };
        std::vector<Want> wants;
        if (!tile->edge_circ_outer.empty())
            wants.push_back({&tile->edge_circ_outer, "circular-outer", true, addr.angle,
                             addr.level - l, addr.sig});
        if (!tile->edge_circ_inner.empty())
            wants.push_back({&tile->edge_circ_inner, "circular-inner", true, addr.angle,
                             addr.level + l, addr.sig});
        if (!tile->edge_deg.empty())
            wants.push_back({&tile->edge_deg, "degenerating", true, addr.angle, addr.level,
                             opposite(addr.sig)});
        if (!tile->edge_crit.empty())
            wants.push_back({&tile->edge_crit, "critical", false, addr.angle, addr.level,
                             opposite(addr.sig)});

        for (const auto& wv : wants) {
            const auto& edge = *wv.edge;
            // probe from an interior edge sample nearest the marker (the
            // polyline ends sit at tile vertices), stepping outward until the
            // address changes
            // probe from the deep interior of the edge: the sample farthest
            // from both endpoints (corners are vertices shared by many tiles)
            size_t mi = edge.size() / 2;
            double best = -1.0;
            for (size_t i = 0; i < edge.size(); ++i) {
                double d = std::min(std::abs(edge[i] - edge.front()),
                                    std::abs(edge[i] - edge.back()));
                if (d > best) {
                    best = d;
                    mi = i;
                }
            }
            cplx mid = edge[mi];
            double span = std::abs(edge.front() - edge.back());
            if (best < 0.1 * span) continue;  // degenerate sliver: skip

            // outward normal at the selected sample, and a local width scale
            // from the distance to the other edges of the tile
            cplx tan = edge[std::min(mi + 1, edge.size() - 1)] -
                       edge[mi == 0 ? 0 : mi - 1];
            if (std::abs(tan) < 1e-300) continue;
            cplx normal = cplx(0.0, 1.0) * tan / std::abs(tan);
            if ((normal * std::conj(mid - tile->marker)).real() < 0.0) normal = -normal;
            double width = std::abs(mid - tile->marker);
            for (const auto* other : {&tile->edge_circ_outer, &tile->edge_circ_inner,
                                      &tile->edge_deg, &tile->edge_crit}) {
                if (other->empty() || other == wv.edge) continue;
                for (const cplx& e : *other) width = std::min(width, std::abs(mid - e));
            }
            EdgeCheckEntry entry;
            entry.tile = addr;
            entry.edge = wv.name;
            entry.expected = TileAddress{wv.angle, wv.level, wv.sig};
            entry.expected_known = wv.angle_checked;
            bool found = false;
            bool vertex_only = true;
            for (double frac : {probe_frac / 3.0, probe_frac, probe_frac * 2.0}) {
                cplx probe = mid + frac * width * normal;
                entry.probe = probe;
                try {
                    AddressInfo got = side.address_of(probe);
                    if (near_vertex(side.model(), got.push.W, 0.12)) continue;
                    vertex_only = false;
                    if (got.addr.level == addr.level && got.addr.sig == addr.sig &&
                        (!got.angle_known || got.addr.angle == addr.angle))
                        continue;  // still inside the tile
                    entry.got = got.addr;
                    entry.got_angle = got.angle_known;
                    found = true;
                    break;
                } catch (const NumericsError&) {
                    vertex_only = false;
                }
            }
            if (vertex_only && !found) continue;  // vertex-adjacent: not counted
            if (found) {
                bool ok = entry.got.level == wv.level && entry.got.sig == wv.sig;
                if (wv.angle_checked && entry.got_angle)
                    ok = ok && entry.got.angle == wv.angle;
                entry.ok = ok;
                if (wv.name == "critical" && entry.got_angle && ok)
                    rep.critical_partner[addr.str()] = entry.got.angle;
            }
            rep.checked += 1;
            rep.failures += entry.ok ? 0 : 1;
            rep.entries.push_back(std::move(entry));
        }
    }
    return rep;
}

cplx Raster::pixel_center(const RasterConfig& cfg, int ix, int iy) const {
    double step = cfg.width / cfg.px;
    double x = cfg.center.real() + (ix - w / 2 + 0.5) * step;
    double y = cfg.center.imag() + (iy - h / 2 + 0.5) * step;
    return {x, y};
}

Raster classify_image(const TessSide& side, const RasterConfig& cfg) {
    Raster out;
    out.w = cfg.px;
    out.h = cfg.py > 0 ? cfg.py : cfg.px;
    size_t n = static_cast<size_t>(out.w) * static_cast<size_t>(out.h);
    out.kind.assign(n, 2);
    out.level.assign(n, 0);
    out.sig.assign(n, 0);
    out.angle_depth.assign(n, -1);
    out.potential.assign(n, 0.0f);

    int nthreads = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;

    auto work = [&](int tid) {
        for (int iy = tid; iy < out.h; iy += nthreads) {
            for (int ix = 0; ix < out.w; ++ix) {
                size_t idx = static_cast<size_t>(iy) * out.w + ix;
                cplx z = out.pixel_center(cfg, ix, iy);
                double pot = green_potential(side.map_c(), z, cfg.escape_budget);
                if (pot > 0.0) {
                    out.kind[idx] = 0;
                    out.potential[idx] = static_cast<float>(pot);
                    continue;
                }
                auto p = side.push_to_component(z, 1e-3, cfg.escape_budget * 4);
                if (!p) continue;  // unresolved / julia
                if (p->mc.edges & kEdgeDegenerating) {
                    out.kind[idx] = 3;
                    continue;
                }
                out.kind[idx] = 1;
                out.level[idx] = static_cast<int>(p->level);
                out.sig[idx] = p->mc.sig == Signature::Plus ? 1 : -1;
                if (cfg.angle_depth) {
                    const PanelGeometry* panel = side.panel_containing(z);
                    if (panel) out.angle_depth[idx] = static_cast<short>(panel->depth);
                }
            }
        }
    };
    std::vector<std::thread> threads;
    for (int t = 1; t < nthreads; ++t) threads.emplace_back(work, t);
    work(0);
    for (auto& th : threads) th.join();
    return out;
}

}  // namespace jtess
