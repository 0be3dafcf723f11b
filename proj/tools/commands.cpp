#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "bianchi/archimedes.hpp"
#include "bianchi/rolling.hpp"
#include "bianchi/suites.hpp"

#ifndef BIANCHI_VERSION
#define BIANCHI_VERSION "unknown"
#endif

namespace bianchi::cli {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ojson num(double x)
{
    return std::isfinite(x) ? ojson(x) : ojson(nullptr);
}

const char* error_kind(const Error& e)
{
#define KIND(T) if (dynamic_cast<const T*>(&e)) return #T
    KIND(ConfigError);
    KIND(DomainError);
    KIND(KindError);
    KIND(SpectralZeroError);
    KIND(BlowupError);
    KIND(DegenerateFrameError);
    KIND(NoSolutionError);
    KIND(NotIsometricError);
    KIND(ImmersionError);
    KIND(GridTooCoarseError);
    KIND(ValidityError);
    KIND(QuadratureError);
#undef KIND
    return "Error";
}

int exit_code_for(const Error& e)
{
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const KindError*>(&e) || dynamic_cast<const SpectralZeroError*>(&e))
        return kExitConfig;
    if (dynamic_cast<const BlowupError*>(&e))
        return kExitTolerance;
    return kExitDegenerate;
}

std::string versions_eigen()
{
    return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
           std::to_string(EIGEN_MINOR_VERSION);
}

std::string versions_boost()
{
    return std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
           std::to_string(BOOST_VERSION % 100);
}

fs::path output_path(const Overrides& o, const std::string& configured, const std::string& fallback)
{
    const fs::path p = configured.empty() ? fs::path(fallback) : fs::path(configured);
    return p.is_absolute() ? p : fs::path(resolve_out_dir(o)) / p;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw ConfigError(path.string() + ": cannot write");
}

// Checks accumulate into the report; the run passes iff every check passes.
class Report {
public:
    Report(const std::string& command, const nlohmann::json& effective, const RunConfig* config, double tol_scale)
        : config_(config), tol_scale_(tol_scale)
    {
        const nlohmann::json hashed = {{"command", command}, {"config", effective}, {"tol_scale", tol_scale}};
        doc_["command"] = command;
        doc_["metadata"] = {{"config_hash", fnv1a_hex(hashed.dump())},
                            {"version", BIANCHI_VERSION},
                            {"eigen", versions_eigen()},
                            {"boost", versions_boost()},
                            {"rng", "mt19937_64, uniforms from the top 53 bits"},
                            {"tol_scale", tol_scale}};
        doc_["config"] = effective;
        doc_["checks"] = ojson::array();
    }

    ojson& operator[](const char* key) { return doc_[key]; }

    double tolerance(const std::string& name) const
    {
        const Tolerance t = default_tolerances().at(name);
        double v = t.value;
        if (config_) {
            const auto it = config_->tolerances.find(name);
            if (it != config_->tolerances.end())
                v = it->second;
        }
        return t.scaled ? v * tol_scale_ : v;
    }

    void upper(const std::string& name, double value, const std::string& tol)
    {
        const double bound = tolerance(tol);
        add(name, value, "<=", num(bound), std::isfinite(value) && value <= bound);
    }
    void lower(const std::string& name, double value, const std::string& tol)
    {
        const double bound = tolerance(tol);
        add(name, value, ">=", num(bound), std::isfinite(value) && value >= bound);
    }
    // |value - center| <= band
    void band(const std::string& name, double value, double center)
    {
        const double b = tolerance("ratio_band");
        add(name, value, "within", ojson{{"center", center}, {"band", b}},
            std::isfinite(value) && std::abs(value - center) <= b);
    }

    void error(const Error& e)
    {
        doc_["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
        pass_ = false;
    }

    bool pass() const { return pass_; }

    void write(const fs::path& path)
    {
        doc_["pass"] = pass_;
        write_text(path, doc_.dump(2) + "\n");
    }

private:
    void add(const std::string& name, double value, const char* relation, ojson bound, bool ok)
    {
        doc_["checks"].push_back({{"name", name}, {"value", num(value)}, {"relation", relation}, {"bound", bound}, {"pass", ok}});
        pass_ = pass_ && ok;
    }

    ojson doc_;
    const RunConfig* config_;
    double tol_scale_;
    bool pass_ = true;
};

void summary(std::ostream& log, const Report& r, const fs::path& path)
{
    log << (r.pass() ? "pass" : "FAIL") << "; report written to " << path.string() << "\n";
}

double flatness_guard(int epsilon)
{
    // rolling on the far side turns faster; its reconstruction is coarser
    return epsilon == 1 ? kMaxReconstructionError : 1e-2;
}

void rolling_sweep(Report& r, const RunConfig& c)
{
    const ConfocalFamily fam = c.family();
    const auto seed = c.seed_surface();
    Grid2D g = c.grid.grid();
    const int levels = c.seed.kind == SeedKind::Bent ? 3 : 1;
    ojson rows = ojson::array();
    std::vector<std::pair<double, double>> res;
    for (int k = 0; k < levels; ++k, g = g.refined()) {
        const SurfacePatch q = sample(QuadricSurface(fam), g);
        const SurfacePatch s = sample(*seed, g);
        const ConnectionForm om = connection_form(rolling_field(q, s, c.epsilon), q, flatness_guard(c.epsilon));
        res.push_back(flatness_residual(om, q));
        rows.push_back({{"nu", g.nu}, {"nv", g.nv}, {"reconstruction_error", num(om.reconstruction_error)},
                        {"first", num(res.back().first)}, {"second", num(res.back().second)}});
    }
    r["rolling"] = {{"levels", rows}};
    if (levels == 1) {
        // a rigid or trivial seed rolls with a constant motion
        r.upper("flatness_first", res[0].first, "flat_exact");
        r.upper("flatness_second", res[0].second, "flat_exact");
        return;
    }
    ojson ratios = ojson::array();
    for (int k = 1; k < levels; ++k) {
        const double a = res[k - 1].first / res[k].first, b = res[k - 1].second / res[k].second;
        ratios.push_back({{"first", num(a)}, {"second", num(b)}});
        r.band("flatness_first_ratio_" + std::to_string(k), a, 4.0);
        r.band("flatness_second_ratio_" + std::to_string(k), b, 4.0);
    }
    r["rolling"]["ratios"] = ratios;
    r.upper("flatness_first_finest", res.back().first, "flatness");
    r.upper("flatness_second_finest", res.back().second, "flatness");
}

std::string csv_row(std::initializer_list<double> xs)
{
    std::string line;
    bool first = true;
    for (double x : xs) {
        if (!first)
            line += ',';
        line += format_double(x);
        first = false;
    }
    line += '\n';
    return line;
}

std::pair<double, double> partner_coords(const LeafNode& n)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!n.valid)
        return {nan, nan};
    switch (n.p1.chart) {
    case Chart::Finite:
        return {n.p1.u, n.p1.v};
    case Chart::UAtInfinity:
        return {inf, n.p1.v};
    case Chart::VAtInfinity:
        return {n.p1.u, inf};
    }
    return {nan, nan};
}

void write_meshes(const LeafPatch& leaf, const Surface& seed, const fs::path& stem)
{
    static const char* header = "u0,v0,x,y,z,u1,v1\n";
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::string seed_csv = header, leaf_csv = header;
    const Grid2D& g = leaf.grid;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const LeafNode& n = leaf.at(i, j);
            const double u = g.u(i), v = g.v(j);
            const auto [u1, v1] = partner_coords(n);
            const Vec3 x0 = seed.jet(u, v).x;
            const Vec3 x1 = n.valid ? n.x1 : Vec3::Constant(nan);
            seed_csv += csv_row({u, v, x0.x(), x0.y(), x0.z(), u1, v1});
            leaf_csv += csv_row({u, v, x1.x(), x1.y(), x1.z(), u1, v1});
        }
    write_text(stem.string() + ".seed.csv", seed_csv);
    write_text(stem.string() + ".leaf.csv", leaf_csv);
}

ojson leaf_report_json(const LeafReport& r)
{
    return {{"degenerate", r.degenerate},
            {"nodes_checked", r.nodes_checked},
            {"isometry_fd", num(r.isometry_fd)},
            {"isometry", num(r.isometry)},
            {"congruence_seed", num(r.congruence_seed)},
            {"congruence_leaf", num(r.congruence_leaf)},
            {"weingarten", num(r.weingarten)},
            {"leaf_on_ivory", num(r.leaf_on_ivory)}};
}

// Refinement for the convergence block is skipped above this many nodes.
constexpr int kRefineLimit = 201 * 201;

} // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string resolve_out_dir(const Overrides& o)
{
    if (o.out_dir)
        return *o.out_dir;
    if (const char* env = std::getenv(kOutDirEnv); env && *env)
        return env;
    return ".";
}

int cmd_identities(const RunConfig& config, const Overrides& o, std::ostream& log)
{
    RunConfig c = config;
    if (o.seed)
        c.rng_seed = *o.seed;
    Report r("identities", to_json(c), &c, o.tol_scale);
    const fs::path path = output_path(o, c.report_path, "identities.json");
    int code = kExitOk;
    try {
        log << "identity sweep: " << c.samples << " samples, rng_seed " << c.rng_seed << "\n";
        const IdentitySuite s = run_identity_suite(c.kind, c.samples, c.rng_seed);
        r["sweep"] = {{"samples", s.samples},     {"motions", s.motions},   {"motions_skipped", s.motions_skipped},
                      {"flips", s.flips},         {"flips_skipped", s.flips_skipped},
                      {"solved", s.solved},       {"controls", s.controls}, {"wedges", s.wedges}};
        r.upper("ivory_length", s.ivory_length, "ivory_length");
        r.upper("ruling_length", s.ruling_length, "ruling_length");
        r.upper("segment_ruling_angle", s.segment_ruling_angle, "segment_ruling_angle");
        r.upper("ruling_angle", s.ruling_angle, "ruling_angle");
        r.upper("tangency_symmetry", s.tangency_symmetry, "tangency_symmetry");
        r.upper("gram", s.gram, "gram");
        r.upper("motion_map", s.motion_map, "motion_map");
        r.upper("motion_orthogonality", s.motion_orthogonality, "motion_orthogonality");
        r.upper("motion_flip", s.motion_flip, "motion_flip");
        r.upper("reflection", s.reflection, "reflection");
        r.upper("factorization", s.factorization, "factorization");
        r.upper("integrability", s.integrability, "integrability");
        r.lower("control_reflection", s.control_reflection, "control_floor");
        r.lower("control_factorization", s.control_factorization, "control_floor");
        r.lower("control_integrability", s.control_integrability, "control_floor");
        r.upper("wedge", s.wedge, "wedge");
        log << "rolling sweep\n";
        rolling_sweep(r, c);
        code = r.pass() ? kExitOk : kExitTolerance;
    } catch (const Error& e) {
        r.error(e);
        code = exit_code_for(e);
        log << "error: " << error_kind(e) << ": " << e.what() << "\n";
    }
    r.write(path);
    summary(log, r, path);
    return code;
}

int cmd_transform(const RunConfig& config, const Overrides& o, std::ostream& log)
{
    const RunConfig& c = config;
    if (!c.z)
        throw ConfigError("z: required for transform");
    if (*c.z == 0.0)
        throw SpectralZeroError("z = 0: the transform degenerates at the spectral zero");

    Report r("transform", to_json(c), &c, o.tol_scale);
    const fs::path path = output_path(o, c.report_path, "transform.json");
    const fs::path mesh = output_path(o, c.mesh_path, "mesh");
    int code = kExitOk;
    try {
        const double z = *c.z;
        const auto surface = c.seed_surface();
        const RollingSeed seed(c.family(), surface, c.epsilon);
        const Grid2D grid = c.grid.grid();
        const TransportOptions opts = c.transport_options();
        log << "transport on " << grid.nu << "x" << grid.nv << ", z " << z << "\n";
        const LeafPatch leaf = transport(seed, z, c.flavor, c.v1_init, grid, opts);
        write_meshes(leaf, *surface, mesh);

        int valid = 0;
        double tangency = 0.0;
        for (const auto& n : leaf.nodes)
            if (n.valid) {
                ++valid;
                tangency = std::max(tangency, n.tangency);
            }
        const double blowup_fraction = static_cast<double>(leaf.blowup_nodes) / grid.size();
        r["transport"] = {{"nodes", grid.size()},
                          {"valid_nodes", valid},
                          {"blowup_nodes", leaf.blowup_nodes},
                          {"blowup_fraction", blowup_fraction},
                          {"path_state_gap", num(leaf.path_state_gap)},
                          {"path_leaf_gap", num(leaf.path_leaf_gap)},
                          {"tangency", num(tangency)}};
        // relative to the output dir so reports do not depend on where they were written
        const std::string stem = c.mesh_path.empty() ? "mesh" : c.mesh_path;
        r["meshes"] = {{"seed", stem + ".seed.csv"}, {"leaf", stem + ".leaf.csv"}};
        if (blowup_fraction > r.tolerance("blowup_fraction"))
            throw BlowupError("Riccati poles at " + std::to_string(leaf.blowup_nodes) + " of " +
                              std::to_string(grid.size()) + " nodes");
        if (valid == 0)
            throw DegenerateFrameError("no node admits a tangent partner");

        r.upper("path_state_gap", leaf.path_state_gap, "path_gap");
        r.upper("path_leaf_gap", leaf.path_leaf_gap, "path_gap");
        r.upper("tangency", tangency, "tangency");

        const LeafReport rep = verify_leaf(leaf, seed);
        r["leaf"] = leaf_report_json(rep);
        r.upper("congruence_seed", rep.congruence_seed, "congruence");
        r.upper("leaf_on_ivory", rep.leaf_on_ivory, "leaf_on_ivory");
        const double inversion = inversion_check(leaf, seed);
        r["leaf"]["inversion"] = num(inversion);
        r.upper("inversion", inversion, "inversion");

        if (rep.degenerate) {
            // the leaf collapses onto a ruling of the partner quadric
            const double var = state_variance(leaf), col = collinearity(leaf), onq = leaf_on_quadric(leaf);
            r["leaf"]["note"] = "degenerate leaf: the points lie on a single ruling of the partner quadric";
            r["leaf"]["state_variance"] = num(var);
            r["leaf"]["collinearity"] = num(col);
            r["leaf"]["leaf_on_quadric"] = num(onq);
            r.upper("state_variance", var, "state_variance");
            r.upper("collinearity", col, "collinearity");
            r.upper("leaf_on_quadric", onq, "leaf_on_quadric");
        } else {
            r.upper("congruence_leaf", rep.congruence_leaf, "congruence");
            r.upper("isometry", rep.isometry, "isometry");
            if (grid.refined().size() <= kRefineLimit) {
                const Grid2D fine = grid.refined();
                log << "refined transport on " << fine.nu << "x" << fine.nv << "\n";
                const LeafReport rf = verify_leaf(transport(seed, z, c.flavor, c.v1_init, fine, opts), seed);
                r["convergence"] = {{"nu", {grid.nu, fine.nu}},
                                    {"isometry_fd", {num(rep.isometry_fd), num(rf.isometry_fd)}},
                                    {"weingarten", {num(rep.weingarten), num(rf.weingarten)}},
                                    {"isometry_fd_ratio", num(rep.isometry_fd / rf.isometry_fd)},
                                    {"weingarten_ratio", num(rep.weingarten / rf.weingarten)}};
            } else {
                r["convergence"] = {{"skipped", "grid too large to refine"}};
            }
        }
        code = r.pass() ? kExitOk : kExitTolerance;
    } catch (const Error& e) {
        r.error(e);
        code = exit_code_for(e);
        log << "error: " << error_kind(e) << ": " << e.what() << "\n";
    }
    r.write(path);
    summary(log, r, path);
    return code;
}

int cmd_archimedes(int n, const Overrides& o, std::ostream& log, const std::string& report_path)
{
    if (n < 2)
        throw DomainError("n = " + std::to_string(n) + ": at least two slices are needed");
    const nlohmann::json effective = {{"n", n}};
    Report r("archimedes", effective, nullptr, o.tol_scale);
    const fs::path path = output_path(o, report_path, "archimedes.json");

    const BalanceLedger ledger = balance_moments(n);
    const BalanceLedger fine = balance_moments(2 * n);
    const double area_exact = 1.0 / 3.0, ratio_exact = 4.0 / 3.0, centroid_exact = 0.6;
    const double ratio = segment_triangle_ratio(n), ratio_fine = segment_triangle_ratio(2 * n);
    const Centroid cen = segment_centroid(n), cen_fine = segment_centroid(2 * n);
    const double e_area = ledger.area_estimate - area_exact, e_area_fine = fine.area_estimate - area_exact;
    const double e_ratio = ratio - ratio_exact, e_ratio_fine = ratio_fine - ratio_exact;
    const double e_cen = cen.height_fraction - centroid_exact, e_cen_fine = cen_fine.height_fraction - centroid_exact;

    r["ledger"] = {{"slices", n},
                   {"moment_left", ledger.moment_left},
                   {"moment_right", ledger.moment_right},
                   {"moment_gap", std::abs(ledger.moment_left - ledger.moment_right)},
                   {"max_slice_residual", ledger.max_slice_residual}};
    r["area"] = {{"estimate", ledger.area_estimate}, {"exact", area_exact}, {"error", e_area}};
    r["segment_ratio"] = {{"estimate", ratio}, {"exact", ratio_exact}, {"error", e_ratio}};
    r["centroid"] = {{"abscissa", cen.abscissa},
                     {"height_fraction", cen.height_fraction},
                     {"exact", centroid_exact},
                     {"error", e_cen}};
    r["convergence"] = {{"n", {n, 2 * n}},
                        {"area_error_ratio", num(e_area / e_area_fine)},
                        {"segment_ratio_error_ratio", num(e_ratio / e_ratio_fine)},
                        {"centroid_error_ratio", num(e_cen / e_cen_fine)}};
    r.write(path);
    log << "archimedes n=" << n << ": area " << format_double(ledger.area_estimate) << ", ratio "
        << format_double(ratio) << ", centroid " << format_double(cen.height_fraction) << "; report written to "
        << path.string() << "\n";
    return kExitOk;
}

} // namespace bianchi::cli
