#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bianchi/rolling.hpp"
#include "bianchi/surface.hpp"
#include "bianchi/tangency.hpp"

namespace bianchi {

/// A seed surface applicable to the z = 0 quadric, rolled with orientation epsilon.
class RollingSeed {
public:
    RollingSeed(ConfocalFamily family, std::shared_ptr<const Surface> seed, int epsilon);

    const ConfocalFamily& family() const { return family_; }
    const Surface& surface() const { return *seed_; }
    int epsilon() const { return epsilon_; }

    SurfaceJet quadric_jet(double u, double v) const;
    SurfaceJet seed_jet(double u, double v) const { return seed_->jet(u, v); }
    RollingJet roll_at(double u, double v) const;
    /// Same seed rolled on the other side.
    RollingSeed flipped() const { return {family_, seed_, -epsilon_}; }

private:
    ConfocalFamily family_;
    std::shared_ptr<const Surface> seed_;
    int epsilon_;
};

enum class Direction { U, V };

/// d(state)/d(direction) = -m(state)^T omega / (2z), omega = P (U) or Q (V).
double riccati_rhs(const MPolynomial& m, double z, const Vec3& omega, double state);
double riccati_rhs(const RollingSeed& seed, double z, MFamily flavor, double u0, double v0,
                   Direction dir, double state);

struct TransportOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// Upper bound on the step; 0 leaves it to the controller.
    double max_step = 0.0;
    /// Switch to 1/s above this |s|, back below chart_return.
    double chart_switch = 1e3;
    double chart_return = 1e2;
    /// Nodes with |s| beyond this are reported as poles.
    double blowup = 1e8;
    /// Stop after this many rejected or accepted steps on one path.
    long max_steps = 2000000;
};

enum class PathOrder { UFirst, VFirst };

/// Riccati state at a node, held either as s or as 1/s.
struct StateNode {
    double value = 0.0;
    bool reciprocal = false;
    bool blowup = false;
    double ds_du = 0.0, ds_dv = 0.0; // from the right-hand side; finite chart only

    /// Homogeneous coordinates (s, 1) or (1, 1/s).
    Eigen::Vector2d homogeneous() const;
    double state() const { return reciprocal ? 1.0 / value : value; }
};

struct StateField {
    Grid2D grid;
    std::vector<StateNode> nodes;
    const StateNode& at(int i, int j) const { return nodes[grid.index(i, j)]; }
};

StateField transport_states(const RollingSeed& seed, double z, MFamily flavor, double initial,
                            const Grid2D& grid, PathOrder order, const TransportOptions& options = {});

/// Chordal distance of two states on the projective line.
double chordal_distance(const StateNode& a, const StateNode& b);

struct LeafNode {
    bool valid = false;      // finite state and a tangent partner
    bool blowup = false;
    bool analytic = false;   // partner in the finite chart, semi-analytic differentials set
    double state = 0.0;
    ParamPoint p1;
    Vec3 x0 = Vec3::Zero();  // seed point
    Vec3 x1 = Vec3::Zero();  // leaf point
    Vec3 V = Vec3::Zero();   // x1 - x0
    RigidMotion motion;      // rolling at the node
    Vec3 P = Vec3::Zero(), Q = Vec3::Zero();
    double du1[2] = {0, 0}, dv1[2] = {0, 0}; // partials of the partner in u0, v0
    Vec3 dx1[2] = {Vec3::Zero(), Vec3::Zero()};
    double tangency = 0.0;
};

struct LeafPatch {
    Grid2D grid;
    ConfocalFamily family;
    double z = 0.0;
    MFamily flavor = MFamily::M;
    int epsilon = 1;
    std::vector<LeafNode> nodes;
    /// Path-order comparison (filled by transport()).
    double path_state_gap = 0.0;
    double path_leaf_gap = 0.0;
    int blowup_nodes = 0;

    const LeafNode& at(int i, int j) const { return nodes[grid.index(i, j)]; }
};

/// Builds leaf points from a state field by re-solving tangency at every node.
LeafPatch assemble_leaf(const RollingSeed& seed, double z, MFamily flavor, const StateField& states);

/// Runs both path orders from `initial` at the grid origin and assembles the u-first leaf.
LeafPatch transport(const RollingSeed& seed, double z, MFamily flavor, double initial,
                    const Grid2D& grid, const TransportOptions& options = {});

/// The same grid with the state frozen at its origin value (negative control).
StateField constant_states(const StateField& states);

struct LeafReport {
    bool degenerate = false;          // leaf is not immersed (a curve)
    int nodes_checked = 0;
    double isometry_fd = 0.0;         // finite differences on the grid
    double isometry = 0.0;            // semi-analytic differentials
    double congruence_seed = 0.0;     // |N0 . V| / |V|
    double congruence_leaf = 0.0;     // |N1 . V| / |V|
    double weingarten = 0.0;          // |II0 x II1| / (|II0||II1|)
    double leaf_on_ivory = 0.0;
};

LeafReport verify_leaf(const LeafPatch& leaf, const RollingSeed& seed);

/// Rolls the quadric onto the leaf at the partner and checks that the seed point
/// un-rolls to the Ivory image of x0 in tangency configuration. A leaf that is not
/// immersed only gets the static partner-side tangency check.
double inversion_check(const LeafPatch& leaf, const RollingSeed& seed);

/// Largest |x1 - y1| over nodes valid in both leaves, relative to |x1|.
double leaf_gap(const LeafPatch& a, const LeafPatch& b);

/// Max over nodes of the reflection of the two partner facets in the seed tangent plane.
double facet_reflection_residual(const LeafPatch& leaf);

struct FlavorExchange {
    double point_gap = 0.0;   // leaf(M, eps) against leaf(M', -eps), same partner at the origin
    double facet_gap = 0.0;   // their tangent facets coincide
    double mirror = 0.0;      // the M' facet rolled with eps mirrors the M facet in the seed tangent plane
    int nodes = 0;
};

/// Transports the M flavor with the seed's orientation and the M' flavor with the opposite one.
FlavorExchange flavor_exchange(const RollingSeed& seed, double z, double initial, const Grid2D& grid,
                               const TransportOptions& options = {});

/// Collinearity of the leaf points: second / first singular value of the centred cloud.
double collinearity(const LeafPatch& leaf);
/// Largest implicit residual of the leaf points on x_z (relative).
double leaf_on_quadric(const LeafPatch& leaf);
/// Variance of the state over valid nodes.
double state_variance(const LeafPatch& leaf);

} // namespace bianchi
