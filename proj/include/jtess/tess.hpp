#pragma once

#include "jtess/angles.hpp"
#include "jtess/boettcher.hpp"
#include "jtess/common.hpp"
#include "jtess/linearize.hpp"
#include "jtess/model.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace jtess {

struct OnEdge : NumericsError {
    explicit OnEdge(const std::string& what) : NumericsError(what) {}
};
struct OnDegeneratingArc : NumericsError {
    explicit OnDegeneratingArc(const std::string& what) : NumericsError(what) {}
};
struct NotInInterior : NumericsError {
    explicit NotInInterior(const std::string& what) : NumericsError(what) {}
};
struct BranchAmbiguity : NumericsError {
    explicit BranchAmbiguity(const std::string& what) : NumericsError(what) {}
};
struct AddressFailure : NumericsError {
    explicit AddressFailure(const std::string& what) : NumericsError(what) {}
};

enum class Side { F, G };

struct Box {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    void add(cplx z);
    bool contains(cplx z, double pad = 0.0) const;
};

struct TilePatch {
    TileAddress addr;
    long mu = 0;  // model band of the tile's component representative
    std::vector<cplx> boundary;            // closed polyline
    std::vector<cplx> edge_circ_outer;     // toward lower levels
    std::vector<cplx> edge_circ_inner;     // toward higher levels
    std::vector<cplx> edge_deg;            // degenerating edge (empty for G)
    std::vector<cplx> edge_crit;           // critical edge
    std::vector<cplx> essential;           // essential-curve samples
    cplx marker = 0.0;
    Box bbox;
    bool flagged = false;

    bool contains(cplx z) const;
    double diameter() const;
};

struct PanelGeometry {
    RationalAngle angle;
    Signature sig = Signature::Plus;
    int depth = 0;
    std::vector<TilePatch> tiles;
    cplx landing = 0.0;     // gamma(angle)
    cplx base_point = 0.0;  // attachment on the arc system / parabolic point
    Box bbox;
    bool flagged = false;

    double diameter() const;
    std::vector<cplx> cloud(int stride = 1) const;  // boundary samples + landing
};

struct PushInfo {
    long n = 0;       // iterates to reach the classified region
    cplx W = 0.0;     // model value of the pushed point
    ModelClass mc;
    long level = 0;   // mu * l - n
};

struct AddressInfo {
    TileAddress addr;
    bool angle_known = false;
    PushInfo push;
};

// One side of the tessellation: the reduction to the fundamental model, the
// seed tiles of the critical component, and the panels grown from them by
// inverse branches.
class TessSide {
public:
    static TessSide build(const DegenerationPair& pair, Side side);

    Side side() const { return side_; }
    const DegenerationPair& pair() const { return pair_; }
    const FundamentalModel& model() const { return model_; }
    cplx map_c() const { return c_; }

    // Phi_f(z) = a (1 - phi_f(z)^q)  /  Phi_g(z) = q phi_g(z)
    cplx Phi(cplx z) const;
    cplx Phi_with_deriv(cplx z, cplx& dPhi) const;

    std::optional<PushInfo> push_to_component(cplx z, double edge_tol = 1e-3,
                                              long budget_override = 0) const;
    AddressInfo address_of(cplx z, double edge_tol = 1e-3) const;

    void build_panels(int max_depth, long mu_min, long mu_max);
    const PanelGeometry* find_panel(const RationalAngle& angle, Signature sig) const;
    const TilePatch* find_tile(const TileAddress& addr) const;
    const PanelGeometry* panel_containing(cplx z, const TilePatch** tile = nullptr) const;
    const std::map<std::string, PanelGeometry>& panels() const { return panels_; }

    // critical-sector data
    RationalAngle theta0_plus() const { return theta0_plus_; }
    RationalAngle theta0_minus() const { return theta0_minus_; }
    const std::vector<DegeneratingArc>& arcs() const { return arcs_; }
    const std::vector<cplx>& cycle_landing() const { return cycle_landing_; }

    const KoenigsCoord& koenigs() const { return *koenigs_; }
    const FatouCoord& fatou() const { return *fatou_; }

    // angle of the seed tile in sector k with the given signature
    RationalAngle sector_angle(int k, Signature sig) const;
    int sector_count() const { return static_cast<int>(sector_gap_.size()); }

    long level_l() const { return pair_.l; }

private:
    Side side_ = Side::F;
    DegenerationPair pair_;
    FundamentalModel model_{0.5, 1};
    cplx c_ = 0.0;
    std::shared_ptr<KoenigsCoord> koenigs_;
    std::shared_ptr<FatouCoord> fatou_;
    std::vector<DegeneratingArc> arcs_;
    std::vector<cplx> cycle_landing_;           // landing of rot_prime cycle angles
    std::vector<std::pair<int, int>> sector_gap_;  // sector k -> (plus idx, minus idx)
    RationalAngle theta0_plus_, theta0_minus_;
    std::map<std::string, PanelGeometry> panels_;

    // g-side continuation cache threshold
    double im_cap_ = 48.0;

    TilePatch seed_tile_f(int sector, Signature sig, long mu, int samples) const;
    TilePatch seed_tile_g(Signature sig, long mu, int samples) const;
    void seed_panels(long mu_min, long mu_max);
    void pull_back_panel(const PanelGeometry& src);
    cplx invert_phi_f(cplx w, cplx seed) const;
    cplx invert_phi_g(cplx t, cplx seed) const;
};

struct EdgeCheckEntry {
    TileAddress tile;
    std::string edge;
    bool ok = false;
    bool expected_known = true;
    TileAddress expected;
    TileAddress got;
    bool got_angle = false;
    cplx probe = 0.0;
};

struct EdgeReport {
    std::vector<EdgeCheckEntry> entries;
    int checked = 0;
    int failures = 0;
    // critical-edge partner angles keyed by the tile address string
    std::map<std::string, RationalAngle> critical_partner;
};

EdgeReport verify_edge_sharing(const TessSide& side, const std::vector<TileAddress>& samples,
                               double probe_frac = 0.12);

// Per-pixel classification raster.
struct RasterConfig {
    cplx center = 0.0;
    double width = 3.0;
    int px = 512;
    int py = 0;              // 0: square
    long escape_budget = 600;
    bool angle_depth = false;  // color by containing panel depth (needs panels)
    int threads = 0;           // 0: hardware
};

struct Raster {
    int w = 0, h = 0;
    // kind: 0 exterior, 1 interior with address, 2 julia/unresolved, 3 on-arc
    std::vector<unsigned char> kind;
    std::vector<int> level;
    std::vector<signed char> sig;
    std::vector<short> angle_depth;  // -1 unknown
    std::vector<float> potential;
    cplx pixel_center(const RasterConfig& cfg, int ix, int iy) const;
};

Raster classify_image(const TessSide& side, const RasterConfig& cfg);

}  // namespace jtess
