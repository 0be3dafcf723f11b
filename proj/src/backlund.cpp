#include "bianchi/backlund.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/numeric/odeint.hpp>

namespace bianchi {

namespace odeint = boost::numeric::odeint;

RollingSeed::RollingSeed(ConfocalFamily family, std::shared_ptr<const Surface> seed, int epsilon)
    : family_(family), seed_(std::move(seed)), epsilon_(epsilon)
{
    if (epsilon != 1 && epsilon != -1)
        throw DomainError("orientation must be +1 or -1");
}

SurfaceJet RollingSeed::quadric_jet(double u, double v) const
{
    return eval(family_, 0.0, ParamPoint::finite(u, v));
}

RollingJet RollingSeed::roll_at(double u, double v) const
{
    return roll(quadric_jet(u, v), seed_->jet(u, v), epsilon_);
}

double riccati_rhs(const MPolynomial& m, double z, const Vec3& omega, double state)
{
    if (z == 0.0)
        throw SpectralZeroError("the Riccati equation degenerates at z = 0");
    return -m.at(state).dot(omega) / (2.0 * z);
}

double riccati_rhs(const RollingSeed& seed, double z, MFamily flavor, double u0, double v0,
                   Direction dir, double state)
{
    if (z == 0.0)
        throw SpectralZeroError("the Riccati equation degenerates at z = 0");
    const RollingJet r = seed.roll_at(u0, v0);
    const MPolynomial m = m_polynomial(seed.family(), z, u0, v0, flavor);
    return riccati_rhs(m, z, dir == Direction::U ? r.P : r.Q, state);
}

Eigen::Vector2d StateNode::homogeneous() const
{
    return reciprocal ? Eigen::Vector2d(1.0, value) : Eigen::Vector2d(value, 1.0);
}

double chordal_distance(const StateNode& a, const StateNode& b)
{
    const Eigen::Vector2d x = a.homogeneous(), y = b.homogeneous();
    return std::abs(x[0] * y[1] - x[1] * y[0]) / (x.norm() * y.norm());
}

namespace {

using OdeState = std::array<double, 1>;

// Quadratic coefficients a0 + a1 s + a2 s^2 of m(s)^T omega along the path.
struct PathSystem {
    const RollingSeed& seed;
    double z;
    MFamily flavor;
    Direction dir;
    double fixed; // the coordinate held constant on this path

    Vec3 coefficients(double t) const
    {
        const double u = dir == Direction::U ? t : fixed;
        const double v = dir == Direction::U ? fixed : t;
        const RollingJet r = seed.roll_at(u, v);
        const MPolynomial m = m_polynomial(seed.family(), z, u, v, flavor);
        const Vec3& w = dir == Direction::U ? r.P : r.Q;
        return {m.c0.dot(w), m.c1.dot(w), m.c2.dot(w)};
    }
};

// Integrates along one grid line, recording the state at every node.
void integrate_line(const PathSystem& sys, StateNode start, const std::vector<double>& ts,
                    std::vector<StateNode>& out, const TransportOptions& opt)
{
    out.assign(ts.size(), {});
    StateNode cur = start;
    cur.blowup = cur.reciprocal && std::abs(cur.value) < 1.0 / opt.blowup;
    out[0] = cur;
    const double inv2z = 1.0 / (2.0 * sys.z);

    auto rhs = [&](const OdeState& x, OdeState& dxdt, double t) {
        const Vec3 a = sys.coefficients(t);
        const double s = x[0];
        // s' = -(a0 + a1 s + a2 s^2) / 2z; for 1/s the roles of a0 and a2 swap and the sign flips
        dxdt[0] = cur.reciprocal ? (a[0] * s * s + a[1] * s + a[2]) * inv2z
                                 : -(a[0] + a[1] * s + a[2] * s * s) * inv2z;
    };

    auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<OdeState>());
    double t = ts[0];
    double dt = 0.25 * (ts.back() - ts.front()) / std::max<std::size_t>(1, ts.size() - 1);
    long steps = 0;
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double target = ts[k];
        while (t < target) {
            if (++steps > opt.max_steps)
                throw QuadratureError("Riccati transport exceeded the step budget");
            double h = std::min(dt, target - t);
            if (opt.max_step > 0.0)
                h = std::min(h, opt.max_step);
            OdeState x{cur.value};
            const double before = t;
            const double h_try = h;
            if (stepper.try_step(rhs, x, t, h) == odeint::success) {
                cur.value = x[0];
                // keep the controller's suggestion unless the step was clipped at a node
                dt = (h_try < dt) ? std::max(dt, h) : h;
                if (!std::isfinite(cur.value))
                    throw QuadratureError("Riccati transport produced a non-finite state");
                if (!cur.reciprocal && std::abs(cur.value) > opt.chart_switch) {
                    cur.value = 1.0 / cur.value;
                    cur.reciprocal = true;
                    stepper.reset();
                } else if (cur.reciprocal && std::abs(cur.value) > 1.0 / opt.chart_return) {
                    cur.value = 1.0 / cur.value;
                    cur.reciprocal = false;
                    stepper.reset();
                }
                if (t - before <= 0.0)
                    throw QuadratureError("Riccati step size underflow");
            } else {
                dt = h;
                if (dt < 1e-14 * std::max(1.0, std::abs(t)))
                    throw QuadratureError("Riccati step size underflow");
            }
        }
        t = target;
        out[k] = cur;
        out[k].blowup = cur.reciprocal && std::abs(cur.value) < 1.0 / opt.blowup;
    }
}

std::vector<double> axis(const Grid2D& g, Direction d)
{
    std::vector<double> t(d == Direction::U ? g.nu : g.nv);
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = d == Direction::U ? g.u(static_cast<int>(k)) : g.v(static_cast<int>(k));
    return t;
}

} // namespace

StateField transport_states(const RollingSeed& seed, double z, MFamily flavor, double initial,
                            const Grid2D& grid, PathOrder order, const TransportOptions& options)
{
    if (z == 0.0)
        throw SpectralZeroError("transport requires z != 0");
    seed.family().require_admissible(z);
    if (!std::isfinite(initial))
        throw DomainError("initial state must be finite");

    StateNode start;
    if (std::abs(initial) > options.chart_switch) {
        start.value = 1.0 / initial;
        start.reciprocal = true;
    } else {
        start.value = initial;
    }

    StateField field{grid, std::vector<StateNode>(grid.size())};
    const Direction first = order == PathOrder::UFirst ? Direction::U : Direction::V;
    const Direction second = order == PathOrder::UFirst ? Direction::V : Direction::U;
    const std::vector<double> t1 = axis(grid, first), t2 = axis(grid, second);
    const double fixed1 = first == Direction::U ? grid.v_min : grid.u_min;

    std::vector<StateNode> spine, line;
    integrate_line({seed, z, flavor, first, fixed1}, start, t1, spine, options);
    for (std::size_t a = 0; a < t1.size(); ++a) {
        integrate_line({seed, z, flavor, second, t1[a]}, spine[a], t2, line, options);
        for (std::size_t b = 0; b < t2.size(); ++b) {
            const int i = static_cast<int>(first == Direction::U ? a : b);
            const int j = static_cast<int>(first == Direction::U ? b : a);
            field.nodes[grid.index(i, j)] = line[b];
        }
    }

    // partials from the right-hand side, finite chart
    for (int j = 0; j < grid.nv; ++j)
        for (int i = 0; i < grid.nu; ++i) {
            StateNode& n = field.nodes[grid.index(i, j)];
            if (n.blowup)
                continue;
            const double s = n.state();
            const RollingJet r = seed.roll_at(grid.u(i), grid.v(j));
            const MPolynomial m = m_polynomial(seed.family(), z, grid.u(i), grid.v(j), flavor);
            n.ds_du = riccati_rhs(m, z, r.P, s);
            n.ds_dv = riccati_rhs(m, z, r.Q, s);
        }
    return field;
}

StateField constant_states(const StateField& states)
{
    StateField out = states;
    for (auto& n : out.nodes) {
        n = states.nodes.front();
        n.ds_du = n.ds_dv = 0.0;
    }
    return out;
}

LeafPatch assemble_leaf(const RollingSeed& seed, double z, MFamily flavor, const StateField& states)
{
    const Grid2D& g = states.grid;
    const ConfocalFamily& fam = seed.family();
    LeafPatch leaf{g, fam, z, flavor, seed.epsilon(), std::vector<LeafNode>(g.size())};
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const StateNode& sn = states.at(i, j);
            LeafNode& n = leaf.nodes[g.index(i, j)];
            const double u0 = g.u(i), v0 = g.v(j);
            const SurfaceJet x0 = seed.seed_jet(u0, v0);
            const RollingJet r = roll(seed.quadric_jet(u0, v0), x0, seed.epsilon());
            n.x0 = x0.x;
            n.motion = r.motion;
            n.P = r.P;
            n.Q = r.Q;
            if (sn.blowup) {
                n.blowup = true;
                ++leaf.blowup_nodes;
                continue;
            }
            n.state = sn.state();
            std::optional<TangencyConfig> sol;
            try {
                sol = solve_for_state(fam, z, u0, v0, n.state, flavor);
            } catch (const NoSolutionError&) {
                continue;
            }
            const TangencyConfig& c = *sol;
            n.valid = true;
            n.p1 = c.p1;
            n.V = r.motion.R * c.V01;
            n.x1 = n.x0 + n.V;
            n.tangency = tangency_residual(c);

            if (c.p1.chart != Chart::Finite || c.free_ruling)
                continue;
            // implicit differentiation of (x_z(p1) - x_0(p0)) . N^_0(p0) = 0
            const JetPoint q0 = eval(fam, 0.0, ParamPoint::finite(u0, v0));
            const JetPoint qz = eval(fam, z, c.p1);
            const double T_u0 = c.V01.dot(q0.scaled_normal_u);
            const double T_v0 = c.V01.dot(q0.scaled_normal_v);
            const double T_u1 = qz.x_u.dot(q0.scaled_normal);
            const double T_v1 = qz.x_v.dot(q0.scaled_normal);
            const double T_0[2] = {T_u0, T_v0};
            const double ds[2] = {sn.ds_du, sn.ds_dv};
            const Vec3 omega[2] = {r.P, r.Q};
            for (int d = 0; d < 2; ++d) {
                if (flavor == MFamily::M) {
                    n.dv1[d] = ds[d];
                    n.du1[d] = -(T_0[d] + T_v1 * ds[d]) / T_u1;
                } else {
                    n.du1[d] = ds[d];
                    n.dv1[d] = -(T_0[d] + T_u1 * ds[d]) / T_v1;
                }
                n.dx1[d] = r.motion.R * (omega[d].cross(c.V01) + qz.x_u * n.du1[d] + qz.x_v * n.dv1[d]);
            }
            n.analytic = std::isfinite(n.du1[0] + n.du1[1] + n.dv1[0] + n.dv1[1]);
        }
    return leaf;
}

LeafPatch transport(const RollingSeed& seed, double z, MFamily flavor, double initial,
                    const Grid2D& grid, const TransportOptions& options)
{
    const StateField a = transport_states(seed, z, flavor, initial, grid, PathOrder::UFirst, options);
    const StateField b = transport_states(seed, z, flavor, initial, grid, PathOrder::VFirst, options);
    LeafPatch leaf = assemble_leaf(seed, z, flavor, a);
    const LeafPatch other = assemble_leaf(seed, z, flavor, b);
    for (int k = 0; k < grid.size(); ++k) {
        if (a.nodes[k].blowup || b.nodes[k].blowup)
            continue;
        leaf.path_state_gap = std::max(leaf.path_state_gap, chordal_distance(a.nodes[k], b.nodes[k]));
    }
    leaf.path_leaf_gap = leaf_gap(leaf, other);
    return leaf;
}

double leaf_gap(const LeafPatch& a, const LeafPatch& b)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
        if (!a.nodes[k].valid || !b.nodes[k].valid)
            continue;
        worst = std::max(worst, (a.nodes[k].x1 - b.nodes[k].x1).norm() / std::max(1.0, a.nodes[k].x1.norm()));
    }
    return worst;
}

namespace {

struct Jet2 {
    Vec3 xu, xv, xuu, xuv, xvv;
};

// Central differences of the leaf at an interior node; false if a stencil node is unusable.
bool leaf_fd(const LeafPatch& leaf, int i, int j, Jet2& out)
{
    const Grid2D& g = leaf.grid;
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
            if (!leaf.at(i + di, j + dj).valid)
                return false;
    auto x = [&](int a, int b) { return leaf.at(i + a, j + b).x1; };
    const double hu = g.hu(), hv = g.hv();
    out.xu = (x(1, 0) - x(-1, 0)) / (2 * hu);
    out.xv = (x(0, 1) - x(0, -1)) / (2 * hv);
    out.xuu = (x(1, 0) - 2 * x(0, 0) + x(-1, 0)) / (hu * hu);
    out.xvv = (x(0, 1) - 2 * x(0, 0) + x(0, -1)) / (hv * hv);
    out.xuv = (x(1, 1) - x(1, -1) - x(-1, 1) + x(-1, -1)) / (4 * hu * hv);
    return true;
}

Vec3 pulled_back_form(const ConfocalFamily& fam, const ParamPoint& p1, const double du1[2], const double dv1[2])
{
    const JetPoint q = eval(fam, 0.0, p1);
    const Vec3 a = q.x_u * du1[0] + q.x_v * dv1[0];
    const Vec3 b = q.x_u * du1[1] + q.x_v * dv1[1];
    return {a.squaredNorm(), a.dot(b), b.squaredNorm()};
}

Vec3 form(const Vec3& a, const Vec3& b) { return {a.squaredNorm(), a.dot(b), b.squaredNorm()}; }

double form_gap(const Vec3& a, const Vec3& b)
{
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Immersion of the leaf from the semi-analytic differentials.
bool leaf_degenerate(const LeafPatch& leaf)
{
    double max_area = 0.0, max_len = 0.0;
    for (const auto& n : leaf.nodes)
        if (n.analytic) {
            max_area = std::max(max_area, n.dx1[0].cross(n.dx1[1]).norm());
            max_len = std::max({max_len, n.dx1[0].squaredNorm(), n.dx1[1].squaredNorm()});
        }
    return !(max_area > 1e-8 * std::max(1.0, max_len));
}

} // namespace

LeafReport verify_leaf(const LeafPatch& leaf, const RollingSeed& seed)
{
    LeafReport rep;
    const Grid2D& g = leaf.grid;
    const ConfocalFamily& fam = leaf.family;
    rep.degenerate = leaf_degenerate(leaf);

    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const LeafNode& n = leaf.at(i, j);
            if (!n.valid)
                continue;
            const SurfaceJet sj = seed.seed_jet(g.u(i), g.v(j));
            const double vn = n.V.norm();
            if (vn > 0.0)
                rep.congruence_seed = std::max(rep.congruence_seed, std::abs(sj.unit_normal().dot(n.V)) / vn);

            // un-roll and map back through the inverse Ivory affinity
            const Vec3 xz1 = n.motion.R.transpose() * (n.x1 - n.motion.t);
            const Vec3 back = inverse_ivory_map(fam, leaf.z, xz1);
            const Vec3 expect = n.p1.chart == Chart::Finite ? eval(fam, 0.0, n.p1).x
                                                            : inverse_ivory_map(fam, leaf.z, eval(fam, leaf.z, n.p1).x);
            rep.leaf_on_ivory = std::max(rep.leaf_on_ivory, (back - expect).norm() / std::max(1.0, expect.norm()));

            if (rep.degenerate || !n.analytic)
                continue;
            const Vec3 n1 = n.dx1[0].cross(n.dx1[1]);
            if (vn > 0.0 && n1.norm() > 0.0)
                rep.congruence_leaf = std::max(rep.congruence_leaf, std::abs(n1.normalized().dot(n.V)) / vn);
            rep.isometry = std::max(rep.isometry, form_gap(form(n.dx1[0], n.dx1[1]), pulled_back_form(fam, n.p1, n.du1, n.dv1)));

            if (i == 0 || j == 0 || i == g.nu - 1 || j == g.nv - 1)
                continue;
            Jet2 fd;
            if (!leaf_fd(leaf, i, j, fd))
                continue;
            bool finite_partners = true;
            for (int dj = -1; dj <= 1 && finite_partners; ++dj)
                for (int di = -1; di <= 1; ++di)
                    finite_partners = finite_partners && leaf.at(i + di, j + dj).p1.chart == Chart::Finite;
            if (!finite_partners)
                continue;
            ++rep.nodes_checked;
            // partner partials by central differences as well
            const LeafNode &e = leaf.at(i + 1, j), &w = leaf.at(i - 1, j), &nn = leaf.at(i, j + 1), &s = leaf.at(i, j - 1);
            const double du1[2] = {(e.p1.u - w.p1.u) / (2 * g.hu()), (nn.p1.u - s.p1.u) / (2 * g.hv())};
            const double dv1[2] = {(e.p1.v - w.p1.v) / (2 * g.hu()), (nn.p1.v - s.p1.v) / (2 * g.hv())};
            rep.isometry_fd = std::max(rep.isometry_fd, form_gap(form(fd.xu, fd.xv), pulled_back_form(fam, n.p1, du1, dv1)));

            const Vec3 nrm = fd.xu.cross(fd.xv).normalized();
            const Vec3 II1(nrm.dot(fd.xuu), nrm.dot(fd.xuv), nrm.dot(fd.xvv));
            const Vec3 II0 = sj.second_form();
            rep.weingarten = std::max(rep.weingarten, safe_ratio(II0.cross(II1).norm(), II0.norm() * II1.norm()));
        }
    return rep;
}

double inversion_check(const LeafPatch& leaf, const RollingSeed&)
{
    const Grid2D& g = leaf.grid;
    const ConfocalFamily& fam = leaf.family;
    const Ruling r = ruling_of(leaf.flavor);
    const bool degenerate = leaf_degenerate(leaf);
    double worst = 0.0;
    int checked = 0;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const LeafNode& n = leaf.at(i, j);
            if (!n.valid || n.p1.chart != Chart::Finite)
                continue;
            const ParamPoint p0 = ParamPoint::finite(g.u(i), g.v(j));
            const PointPair pair = PointPair::make(fam, leaf.z, p0, n.p1);
            if (degenerate) {
                ++checked;
                const Vec3 n01 = eval(fam, 0.0, n.p1).scaled_normal;
                worst = std::max({worst, tangency_symmetry_residual(pair),
                                  safe_ratio(std::abs(pair.V10.dot(n01)), pair.V10.norm() * n01.norm())});
                continue;
            }
            if (!n.analytic)
                continue;
            RigidMotion ivory;
            try {
                ivory = build_ivory_motion(pair, r, r);
            } catch (const DegenerateFrameError&) {
                continue;
            }
            ++checked;
            const JetPoint q1 = eval(fam, 0.0, n.p1);

            // rolling of x_0 at the partner onto the leaf, from the leaf differentials
            Mat2 J;
            J << n.du1[0], n.du1[1], n.dv1[0], n.dv1[1];
            const double det = J.determinant();
            if (!(std::abs(det) > 1e-12 * std::max(1.0, J.cwiseAbs().maxCoeff()))) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            const Mat2 Ji = J.inverse();
            const Vec3 xa = n.dx1[0] * Ji(0, 0) + n.dx1[1] * Ji(1, 0);
            const Vec3 xb = n.dx1[0] * Ji(0, 1) + n.dx1[1] * Ji(1, 1);
            const int eps1 = n.motion.det_sign * ivory.det_sign;
            Mat3 F, Phi;
            F << xa, xb, eps1 * xa.cross(xb).normalized();
            Phi << q1.x_u, q1.x_v, q1.unit_normal();
            const Mat3 R1 = F * Phi.inverse();
            const Mat3 expect = n.motion.R * ivory.R.transpose();
            worst = std::max(worst, (R1 - expect).cwiseAbs().maxCoeff());

            const Vec3 t1 = n.x1 - R1 * q1.x;
            const Vec3 unrolled = R1.transpose() * (n.x0 - t1);
            const Vec3 xz0 = eval(fam, leaf.z, p0).x;
            worst = std::max(worst, (unrolled - xz0).norm() / std::max(1.0, xz0.norm()));
            const Vec3 v10 = unrolled - q1.x;
            worst = std::max(worst, safe_ratio(std::abs(v10.dot(q1.scaled_normal)), v10.norm() * q1.scaled_normal.norm()));
        }
    if (checked == 0)
        throw DegenerateFrameError("no node admits an inversion check");
    return worst;
}

FlavorExchange flavor_exchange(const RollingSeed& seed, double z, double initial, const Grid2D& grid,
                               const TransportOptions& options)
{
    const ConfocalFamily& fam = seed.family();
    const RollingSeed flipped = seed.flipped();
    const LeafPatch a = assemble_leaf(seed, z, MFamily::M,
                                      transport_states(seed, z, MFamily::M, initial, grid, PathOrder::UFirst, options));
    const LeafNode& origin = a.at(0, 0);
    if (!origin.valid || origin.p1.chart != Chart::Finite)
        throw DegenerateFrameError("no finite partner at the grid origin");
    const LeafPatch b = assemble_leaf(
        flipped, z, MFamily::MPrime,
        transport_states(flipped, z, MFamily::MPrime, origin.p1.u, grid, PathOrder::UFirst, options));

    FlavorExchange out;
    for (int j = 0; j < grid.nv; ++j)
        for (int i = 0; i < grid.nu; ++i) {
            const LeafNode &na = a.at(i, j), &nb = b.at(i, j);
            if (!na.valid || !nb.valid || na.p1.chart != Chart::Finite || nb.p1.chart != Chart::Finite)
                continue;
            ++out.nodes;
            out.point_gap = std::max(out.point_gap, (na.x1 - nb.x1).norm() / std::max(1.0, na.x1.norm()));
            const TangencyConfig ca = make_config(fam, z, grid.u(i), grid.v(j), na.p1);
            const TangencyConfig cb = make_config(fam, z, grid.u(i), grid.v(j), nb.p1);
            const Vec3 fa = na.motion.R * m_field(ca, MFamily::M).m;
            const Vec3 fb = nb.motion.R * m_field(cb, MFamily::MPrime).m;
            const Vec3 fm = na.motion.R * m_field(ca, MFamily::MPrime).m;
            const Vec3 ns = seed.seed_jet(grid.u(i), grid.v(j)).unit_normal();
            auto angle = [](const Vec3& x, const Vec3& y) { return safe_ratio(x.cross(y).norm(), x.norm() * y.norm()); };
            out.facet_gap = std::max(out.facet_gap, angle(fa, fb));
            out.mirror = std::max(out.mirror, angle(reflection_matrix(ns) * fa, fm));
        }
    return out;
}

double facet_reflection_residual(const LeafPatch& leaf)
{
    double worst = 0.0;
    for (int j = 0; j < leaf.grid.nv; ++j)
        for (int i = 0; i < leaf.grid.nu; ++i) {
            const LeafNode& n = leaf.at(i, j);
            if (!n.valid || n.p1.chart != Chart::Finite)
                continue;
            const TangencyConfig c = make_config(leaf.family, leaf.z, leaf.grid.u(i), leaf.grid.v(j), n.p1);
            worst = std::max(worst, reflection_residual(c));
        }
    return worst;
}

double collinearity(const LeafPatch& leaf)
{
    std::vector<Vec3> pts;
    for (const auto& n : leaf.nodes)
        if (n.valid)
            pts.push_back(n.x1);
    if (pts.size() < 2)
        return 0.0;
    Vec3 mean = Vec3::Zero();
    for (const auto& p : pts)
        mean += p;
    mean /= static_cast<double>(pts.size());
    Eigen::MatrixXd m(pts.size(), 3);
    for (std::size_t k = 0; k < pts.size(); ++k)
        m.row(static_cast<Eigen::Index>(k)) = (pts[k] - mean).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    return safe_ratio(sv(1), sv(0));
}

double leaf_on_quadric(const LeafPatch& leaf)
{
    double worst = 0.0;
    const Eigen::Matrix4d M = bordered_form(leaf.family, leaf.z);
    for (const auto& n : leaf.nodes) {
        if (!n.valid)
            continue;
        const Eigen::Vector4d h(n.x1.x(), n.x1.y(), n.x1.z(), 1.0);
        const double scale = h.cwiseAbs().dot(M.cwiseAbs() * h.cwiseAbs());
        worst = std::max(worst, std::abs(implicit_residual(leaf.family, leaf.z, n.x1)) / scale);
    }
    return worst;
}

double state_variance(const LeafPatch& leaf)
{
    double sum = 0.0, sq = 0.0;
    int count = 0;
    for (const auto& n : leaf.nodes)
        if (n.valid) {
            sum += n.state;
            ++count;
        }
    if (count == 0)
        return 0.0;
    const double mean = sum / count;
    for (const auto& n : leaf.nodes)
        if (n.valid)
            sq += (n.state - mean) * (n.state - mean);
    return sq / count;
}

} // namespace bianchi
