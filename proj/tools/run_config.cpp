#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "bianchi/bending.hpp"

namespace bianchi::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what)
{
    throw ConfigError(field + ": " + what);
}

// Object reader that remembers the dotted path and rejects unknown keys.
class Section {
public:
    Section(const json& j, std::string path, std::set<std::string> keys)
        : j_(j), path_(std::move(path))
    {
        if (!j.is_object())
            fail(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& [k, v] : j.items())
            if (!keys.count(k))
                fail(field(k), "unknown key");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }
    const json& raw(const std::string& key) const { return j_.at(key); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) const
    {
        if (!has(key)) {
            if (!fallback)
                fail(field(key), "required");
            return *fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_number())
            fail(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            fail(field(key), "must be finite");
        return x;
    }

    long long integer(const std::string& key, long long fallback) const
    {
        if (!has(key))
            return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            fail(field(key), "expected an integer");
        return v.get<long long>();
    }

    std::string text(const std::string& key, const std::string& fallback) const
    {
        if (!has(key))
            return fallback;
        const json& v = j_.at(key);
        if (!v.is_string())
            fail(field(key), "expected a string");
        return v.get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
};

Vec3 vec3(const json& v, const std::string& field)
{
    if (!v.is_array() || v.size() != 3)
        fail(field, "expected an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
            fail(field + "[" + std::to_string(i) + "]", "expected a finite number");
        out[i] = v[i].get<double>();
    }
    return out;
}

void parse_quadric(const json& j, RunConfig& c)
{
    const Section q(j, "quadric", {"kind", "a1", "a2", "a3"});
    const std::string kind = q.text("kind", "");
    if (kind == "hyperboloid")
        c.kind = QuadricKind::HyperboloidOneSheet;
    else if (kind == "paraboloid")
        c.kind = QuadricKind::HyperbolicParaboloid;
    else
        fail("quadric.kind", "expected \"hyperboloid\" or \"paraboloid\"");
    c.a1 = q.number("a1");
    c.a2 = q.number("a2");
    if (!(c.a1 > 0))
        fail("quadric.a1", "must be positive (a2 < 0 < a1)");
    if (!(c.a2 < 0))
        fail("quadric.a2", "must be negative (a2 < 0 < a1)");
    if (c.kind == QuadricKind::HyperboloidOneSheet) {
        c.a3 = q.number("a3");
        if (!(c.a3 > 0))
            fail("quadric.a3", "must be positive for the hyperboloid");
    } else if (q.has("a3")) {
        fail("quadric.a3", "not used by the paraboloid");
    }
    try {
        (void)c.family();
    } catch (const Error& e) {
        fail("quadric", e.what());
    }
}

void default_grid(RunConfig& c)
{
    if (c.kind == QuadricKind::HyperboloidOneSheet)
        c.grid = {1.75, 2.25, -0.25, 0.25, 41, 41};
    else
        c.grid = {-0.5, 0.5, -0.5, 0.5, 41, 41};
}

void parse_grid(const json& j, RunConfig& c)
{
    const Section g(j, "grid", {"u0_min", "u0_max", "v0_min", "v0_max", "nu", "nv"});
    GridConfig& out = c.grid;
    out.u0_min = g.number("u0_min");
    out.u0_max = g.number("u0_max");
    out.v0_min = g.number("v0_min");
    out.v0_max = g.number("v0_max");
    const long long nu = g.integer("nu", 41), nv = g.integer("nv", 41);
    if (!(out.u0_min < out.u0_max))
        fail("grid.u0_max", "must exceed u0_min");
    if (!(out.v0_min < out.v0_max))
        fail("grid.v0_max", "must exceed v0_min");
    if (nu < 3 || nu > 4097)
        fail("grid.nu", "must lie in [3, 4097]");
    if (nv < 3 || nv > 4097)
        fail("grid.nv", "must lie in [3, 4097]");
    out.nu = static_cast<int>(nu);
    out.nv = static_cast<int>(nv);
    // the hyperboloid chart is singular on u = v
    if (c.kind == QuadricKind::HyperboloidOneSheet && out.u0_min <= out.v0_max + kDomainGuard &&
        out.v0_min <= out.u0_max + kDomainGuard)
        fail("grid", "u0 and v0 ranges overlap; the hyperboloid chart is singular on u = v");
}

void parse_seed(const json& j, RunConfig& c)
{
    SeedConfig& s = c.seed;
    if (j.is_string()) {
        if (j.get<std::string>() != "trivial")
            fail("seed", "expected \"trivial\" or an object with key \"rigid\" or \"bent\"");
        s.kind = SeedKind::Trivial;
        return;
    }
    if (!j.is_object() || j.size() != 1)
        fail("seed", "expected \"trivial\" or an object with exactly one of \"trivial\", \"rigid\", \"bent\"");
    const auto& [key, body] = *j.items().begin();
    if (key == "trivial") {
        Section(body, "seed.trivial", {});
        s.kind = SeedKind::Trivial;
    } else if (key == "rigid") {
        const Section r(body, "seed.rigid", {"R", "t"});
        s.kind = SeedKind::Rigid;
        if (!r.has("R") || !r.raw("R").is_array() || r.raw("R").size() != 3)
            fail("seed.rigid.R", "expected a 3x3 array of rows");
        Mat3 R;
        for (int i = 0; i < 3; ++i)
            R.row(i) = vec3(r.raw("R")[i], "seed.rigid.R[" + std::to_string(i) + "]").transpose();
        if (orthogonality_defect(R) > 1e-9)
            fail("seed.rigid.R", "not orthogonal (|R^T R - I| > 1e-9)");
        s.rigid.R = R;
        s.rigid.det_sign = R.determinant() > 0 ? 1 : -1;
        s.rigid.t = r.has("t") ? vec3(r.raw("t"), "seed.rigid.t") : Vec3::Zero();
    } else if (key == "bent") {
        const Section b(body, "seed.bent", {"kappa_expr", "sigma", "u_ref"});
        s.kind = SeedKind::Bent;
        s.kappa_expr = b.text("kappa_expr", "kappa");
        const long long sigma = b.integer("sigma", 1);
        if (sigma != 1 && sigma != -1)
            fail("seed.bent.sigma", "must be +1 or -1");
        s.sigma = static_cast<int>(sigma);
        s.u_ref = b.number("u_ref");
        try {
            (void)Expression::parse(s.kappa_expr);
        } catch (const Error& e) {
            fail("seed.bent.kappa_expr", e.what());
        }
    } else {
        fail("seed." + key, "unknown seed type");
    }
}

json motion_json(const RigidMotion& m)
{
    json R = json::array();
    for (int i = 0; i < 3; ++i)
        R.push_back({m.R(i, 0), m.R(i, 1), m.R(i, 2)});
    return {{"R", R}, {"t", {m.t.x(), m.t.y(), m.t.z()}}};
}

} // namespace

const std::map<std::string, Tolerance>& default_tolerances()
{
    static const std::map<std::string, Tolerance> table = {
        // identities
        {"ivory_length", {1e-10, true}},
        {"ruling_length", {1e-10, true}},
        {"segment_ruling_angle", {1e-10, true}},
        {"ruling_angle", {1e-10, true}},
        {"tangency_symmetry", {1e-10, true}},
        {"gram", {1e-10, true}},
        {"motion_map", {1e-9, true}},
        {"motion_orthogonality", {1e-9, true}},
        {"motion_flip", {1e-9, true}},
        {"reflection", {1e-9, true}},
        {"factorization", {1e-9, true}},
        {"integrability", {1e-9, true}},
        {"control_floor", {1e-3, false}},
        {"wedge", {1e-13, true}},
        {"flatness", {1e-4, true}},
        {"flat_exact", {1e-10, true}},
        {"ratio_band", {0.5, false}},
        // transform
        {"path_gap", {1e-6, true}},
        {"tangency", {1e-9, true}},
        {"inversion", {1e-6, true}},
        {"congruence", {1e-6, true}},
        {"isometry", {1e-6, true}},
        {"leaf_on_ivory", {1e-6, true}},
        {"state_variance", {1e-10, true}},
        {"collinearity", {1e-8, true}},
        {"leaf_on_quadric", {1e-8, true}},
        {"blowup_fraction", {0.1, false}},
    };
    return table;
}

ConfocalFamily RunConfig::family() const
{
    return kind == QuadricKind::HyperboloidOneSheet ? ConfocalFamily::hyperboloid(a1, a2, a3)
                                                    : ConfocalFamily::paraboloid(a1, a2);
}

std::shared_ptr<const Surface> RunConfig::seed_surface() const
{
    const auto quad = std::make_shared<QuadricSurface>(family());
    switch (seed.kind) {
    case SeedKind::Trivial:
        return quad;
    case SeedKind::Rigid:
        return std::make_shared<RigidSurface>(quad, seed.rigid);
    case SeedKind::Bent: {
        RuledBendingSpec spec{family()};
        spec.u_ref = seed.u_ref;
        spec.kappa = Expression::parse(seed.kappa_expr);
        spec.sigma = seed.sigma;
        spec.v_min = grid.v0_min;
        spec.v_max = grid.v0_max;
        return std::make_shared<BentSurface>(spec);
    }
    }
    return quad;
}

TransportOptions RunConfig::transport_options() const
{
    TransportOptions o;
    o.rel_tol = rel_tol;
    o.abs_tol = 1e-2 * rel_tol;
    o.max_step = max_step;
    return o;
}

RunConfig parse_config(const json& j)
{
    const Section root(j, "", {"quadric", "z", "grid", "seed", "epsilon", "ruling_family", "riccati", "sweep",
                               "outputs", "tolerances"});
    RunConfig c;
    if (!root.has("quadric"))
        fail("quadric", "required");
    parse_quadric(root.raw("quadric"), c);

    if (root.has("z")) {
        const double z = root.number("z");
        // z = 0 is left to the commands: it is the spectral zero, not a schema error
        if (z != 0.0 && !c.family().admissible(z)) {
            const auto [lo, hi] = c.family().z_range();
            fail("z", "outside the admissible interval (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
        }
        c.z = z;
    }

    default_grid(c);
    if (root.has("grid"))
        parse_grid(root.raw("grid"), c);

    if (root.has("seed"))
        parse_seed(root.raw("seed"), c);
    if (c.seed.kind == SeedKind::Bent) {
        try {
            (void)c.seed_surface();
        } catch (const Error& e) {
            fail("seed.bent", e.what());
        }
    }

    const long long eps = root.integer("epsilon", 1);
    if (eps != 1 && eps != -1)
        fail("epsilon", "must be +1 or -1");
    c.epsilon = static_cast<int>(eps);

    const std::string fam = root.text("ruling_family", "u");
    if (fam == "u")
        c.flavor = MFamily::M;
    else if (fam == "v")
        c.flavor = MFamily::MPrime;
    else
        fail("ruling_family", "expected \"u\" or \"v\"");

    if (root.has("riccati")) {
        const Section r(root.raw("riccati"), "riccati", {"v1_init", "rel_tol", "max_step"});
        c.v1_init = r.number("v1_init", c.v1_init);
        c.rel_tol = r.number("rel_tol", c.rel_tol);
        c.max_step = r.number("max_step", c.max_step);
        if (!(c.rel_tol > 0 && c.rel_tol <= 1e-3))
            fail("riccati.rel_tol", "must lie in (0, 1e-3]");
        if (c.max_step < 0)
            fail("riccati.max_step", "must be non-negative (0 lets the controller choose)");
    }

    if (root.has("sweep")) {
        const Section s(root.raw("sweep"), "sweep", {"samples", "rng_seed"});
        const long long n = s.integer("samples", c.samples);
        if (n < 1 || n > 10000000)
            fail("sweep.samples", "must lie in [1, 1e7]");
        c.samples = static_cast<int>(n);
        if (s.has("rng_seed")) {
            const json& v = s.raw("rng_seed");
            if (!v.is_number_unsigned())
                fail("sweep.rng_seed", "expected an unsigned 64-bit integer");
            c.rng_seed = v.get<std::uint64_t>();
        }
    }

    if (root.has("outputs")) {
        const Section o(root.raw("outputs"), "outputs", {"report_path", "mesh_path"});
        c.report_path = o.text("report_path", "");
        c.mesh_path = o.text("mesh_path", "");
    }

    if (root.has("tolerances")) {
        const json& t = root.raw("tolerances");
        if (!t.is_object())
            fail("tolerances", "expected an object");
        for (const auto& [k, v] : t.items()) {
            if (!default_tolerances().count(k))
                fail("tolerances." + k, "unknown tolerance");
            if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0)
                fail("tolerances." + k, "expected a finite non-negative number");
            c.tolerances[k] = v.get<double>();
        }
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c)
{
    json q = {{"kind", c.kind == QuadricKind::HyperboloidOneSheet ? "hyperboloid" : "paraboloid"},
              {"a1", c.a1},
              {"a2", c.a2}};
    if (c.kind == QuadricKind::HyperboloidOneSheet)
        q["a3"] = c.a3;
    json seed;
    switch (c.seed.kind) {
    case SeedKind::Trivial:
        seed = "trivial";
        break;
    case SeedKind::Rigid:
        seed = {{"rigid", motion_json(c.seed.rigid)}};
        break;
    case SeedKind::Bent:
        seed = {{"bent", {{"kappa_expr", c.seed.kappa_expr}, {"sigma", c.seed.sigma}, {"u_ref", c.seed.u_ref}}}};
        break;
    }
    json j = {
        {"quadric", q},
        {"grid",
         {{"u0_min", c.grid.u0_min},
          {"u0_max", c.grid.u0_max},
          {"v0_min", c.grid.v0_min},
          {"v0_max", c.grid.v0_max},
          {"nu", c.grid.nu},
          {"nv", c.grid.nv}}},
        {"seed", seed},
        {"epsilon", c.epsilon},
        {"ruling_family", c.flavor == MFamily::M ? "u" : "v"},
        {"riccati", {{"v1_init", c.v1_init}, {"rel_tol", c.rel_tol}, {"max_step", c.max_step}}},
        {"sweep", {{"samples", c.samples}, {"rng_seed", c.rng_seed}}},
        {"outputs", {{"report_path", c.report_path}, {"mesh_path", c.mesh_path}}},
        {"tolerances", json(c.tolerances)},
    };
    j["z"] = c.z ? json(*c.z) : json(nullptr);
    return j;
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace bianchi::cli
