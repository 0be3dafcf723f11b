#include "bianchi/rolling.hpp"

#include <algorithm>
#include <cmath>

namespace bianchi {

namespace {

Mat3 frame(const Vec3& a, const Vec3& b, const Vec3& c)
{
    Mat3 m;
    m << a, b, c;
    return m;
}

// Second-order derivative of a node-sampled field along one axis.
template <class T, class At>
T axis_derivative(At at, int k, int n, double h)
{
    if (k == 0)
        return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k == n - 1)
        return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

void require_same_grid(const Grid2D& a, const Grid2D& b)
{
    if (a.nu != b.nu || a.nv != b.nv || a.u_min != b.u_min || a.u_max != b.u_max ||
        a.v_min != b.v_min || a.v_max != b.v_max)
        throw DomainError("patches live on different grids");
}

} // namespace

double first_form_mismatch(const SurfaceJet& quadric, const SurfaceJet& seed)
{
    const Vec3 a = quadric.first_form(), b = seed.first_form();
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1.0);
}

RollingJet roll(const SurfaceJet& quadric, const SurfaceJet& seed, int epsilon)
{
    if (quadric.cross_normal().norm() < kImmersionFloor || seed.cross_normal().norm() < kImmersionFloor)
        throw ImmersionError("degenerate jet in rolling");
    if (first_form_mismatch(quadric, seed) > kIsometryTolerance)
        throw NotIsometricError("first fundamental forms disagree");

    const double eps = epsilon;
    const Vec3 n0 = quadric.unit_normal();
    const Vec3 n = seed.unit_normal();
    const auto [n0_u, n0_v] = quadric.unit_normal_derivatives();
    const auto [n_u, n_v] = seed.unit_normal_derivatives();

    const Mat3 phi = frame(quadric.x_u, quadric.x_v, n0);
    const Mat3 phi_inv = phi.inverse();
    const Mat3 R = frame(seed.x_u, seed.x_v, eps * n) * phi_inv;

    // F = R Phi  =>  R_u = (F_u - R Phi_u) Phi^-1
    const Mat3 R_u = (frame(seed.x_uu, seed.x_uv, eps * n_u) -
                      R * frame(quadric.x_uu, quadric.x_uv, n0_u)) * phi_inv;
    const Mat3 R_v = (frame(seed.x_uv, seed.x_vv, eps * n_v) -
                      R * frame(quadric.x_uv, quadric.x_vv, n0_v)) * phi_inv;

    RollingJet out;
    out.motion.R = polar_orthogonal(R);
    out.motion.det_sign = epsilon;
    out.motion.t = seed.x - out.motion.R * quadric.x;
    out.P = n0.cross(R.transpose() * R_u * n0);
    out.Q = n0.cross(R.transpose() * R_v * n0);
    return out;
}

RollingField rolling_field(const SurfacePatch& quadric, const SurfacePatch& seed, int epsilon)
{
    require_same_grid(quadric.grid, seed.grid);
    if (epsilon != 1 && epsilon != -1)
        throw DomainError("orientation must be +1 or -1");
    RollingField field{quadric.grid, epsilon, {}};
    field.motions.resize(quadric.jets.size());
    for (std::size_t k = 0; k < quadric.jets.size(); ++k)
        field.motions[k] = roll(quadric.jets[k], seed.jets[k], epsilon).motion;
    return field;
}

double rolling_residual(const RollingField& field, const SurfacePatch& quadric,
                        const SurfacePatch& seed)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < field.motions.size(); ++k) {
        const Mat3& R = field.motions[k].R;
        const SurfaceJet& a = quadric.jets[k];
        const SurfaceJet& b = seed.jets[k];
        worst = std::max(worst, (b.x_u - R * a.x_u).norm() / b.x_u.norm());
        worst = std::max(worst, (b.x_v - R * a.x_v).norm() / b.x_v.norm());
        worst = std::max(worst, (b.x - field.motions[k].apply(a.x)).norm() / std::max(1.0, b.x.norm()));
    }
    return worst;
}

double normal_transport_residual(const RollingField& field, const SurfacePatch& quadric,
                                 const SurfacePatch& seed)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < field.motions.size(); ++k) {
        const Mat3& R = field.motions[k].R;
        const Vec3 expect = R.determinant() * (R * quadric.jets[k].unit_normal());
        worst = std::max(worst, (seed.jets[k].unit_normal() - expect).norm());
    }
    return worst;
}

ConnectionForm connection_form(const RollingField& field, const SurfacePatch& quadric,
                               double max_reconstruction_error)
{
    require_same_grid(field.grid, quadric.grid);
    const Grid2D& g = field.grid;
    ConnectionForm omega{g, std::vector<Vec3>(g.size()), std::vector<Vec3>(g.size()), 0.0};
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const Mat3 R_u = axis_derivative<Mat3>([&](int k) { return field.at(k, j).R; }, i, g.nu, g.hu());
            const Mat3 R_v = axis_derivative<Mat3>([&](int k) { return field.at(i, k).R; }, j, g.nv, g.hv());
            const Mat3& R = field.at(i, j).R;
            const Mat3 om_u = R.transpose() * R_u;
            const Mat3 om_v = R.transpose() * R_v;
            const Vec3 n0 = quadric.at(i, j).unit_normal();
            const Vec3 P = n0.cross(om_u * n0);
            const Vec3 Q = n0.cross(om_v * n0);
            omega.P[g.index(i, j)] = P;
            omega.Q[g.index(i, j)] = Q;
            // |Omega a - omega x a| over unit a is bounded by the largest column norm
            const Mat3 du = om_u - skew(P), dv = om_v - skew(Q);
            omega.reconstruction_error = std::max(
                {omega.reconstruction_error, du.colwise().norm().maxCoeff(), dv.colwise().norm().maxCoeff()});
        }
    if (omega.reconstruction_error > max_reconstruction_error)
        throw GridTooCoarseError("connection form reconstruction error " +
                                 std::to_string(omega.reconstruction_error) + " exceeds " +
                                 std::to_string(max_reconstruction_error));
    return omega;
}

ConnectionForm analytic_connection_form(const SurfacePatch& quadric, const SurfacePatch& seed,
                                        int epsilon)
{
    require_same_grid(quadric.grid, seed.grid);
    const Grid2D& g = quadric.grid;
    ConnectionForm omega{g, std::vector<Vec3>(g.size()), std::vector<Vec3>(g.size()), 0.0};
    for (int k = 0; k < g.size(); ++k) {
        const RollingJet r = roll(quadric.jets[k], seed.jets[k], epsilon);
        omega.P[k] = r.P;
        omega.Q[k] = r.Q;
    }
    return omega;
}

double tangential_defect(const ConnectionForm& omega, const SurfacePatch& quadric)
{
    double worst = 0.0;
    for (int k = 0; k < omega.grid.size(); ++k) {
        const Vec3 n0 = quadric.jets[k].unit_normal();
        worst = std::max(worst, safe_ratio(std::abs(n0.dot(omega.P[k])), omega.P[k].norm()));
        worst = std::max(worst, safe_ratio(std::abs(n0.dot(omega.Q[k])), omega.Q[k].norm()));
    }
    return worst;
}

std::pair<double, double> flatness_residual(const ConnectionForm& omega, const SurfacePatch& quadric)
{
    const Grid2D& g = omega.grid;
    if (g.nu < 4 || g.nv < 4)
        throw GridTooCoarseError("flatness needs interior cells (at least 4 nodes per axis)");
    const double hu = g.hu(), hv = g.hv();
    double structure = 0.0, solder = 0.0;
    for (int j = 1; j + 2 < g.nv; ++j)
        for (int i = 1; i + 2 < g.nu; ++i) {
            const int c[4][2] = {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}};
            // trapezoidal circulation of omega around the cell, counterclockwise
            const Vec3 circ = 0.5 * hu * (omega.P_at(i, j) + omega.P_at(i + 1, j)) +
                              0.5 * hv * (omega.Q_at(i + 1, j) + omega.Q_at(i + 1, j + 1)) -
                              0.5 * hu * (omega.P_at(i, j + 1) + omega.P_at(i + 1, j + 1)) -
                              0.5 * hv * (omega.Q_at(i, j) + omega.Q_at(i, j + 1));
            Vec3 pq = Vec3::Zero(), sol = Vec3::Zero();
            for (const auto& n : c) {
                const Vec3& P = omega.P_at(n[0], n[1]);
                const Vec3& Q = omega.Q_at(n[0], n[1]);
                const SurfaceJet& x0 = quadric.at(n[0], n[1]);
                pq += 0.25 * P.cross(Q);
                sol += 0.25 * (P.cross(x0.x_v) - Q.cross(x0.x_u));
            }
            structure = std::max(structure, (circ / (hu * hv) + pq).norm());
            solder = std::max(solder, sol.norm());
        }
    return {structure, solder};
}

double wedge_identity_residual(const Vec3& a, const Vec3& b, const Vec3& P, const Vec3& Q)
{
    const double lhs = a.dot(P) * b.dot(Q) - a.dot(Q) * b.dot(P);
    const double rhs = a.cross(b).dot(P.cross(Q));
    return safe_ratio(std::abs(lhs - rhs), a.norm() * b.norm() * P.norm() * Q.norm());
}

} // namespace bianchi
