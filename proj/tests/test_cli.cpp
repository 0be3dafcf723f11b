#include "doctest.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "commands.hpp"
#include "run_config.hpp"

using namespace bianchi;
using namespace bianchi::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json trivial_config()
{
    return json::parse(R"({
      "quadric": {"kind": "hyperboloid", "a1": 4.0, "a2": -1.0, "a3": 1.0},
      "z": 0.3,
      "grid": {"u0_min": 1.75, "u0_max": 2.25, "v0_min": -0.25, "v0_max": 0.25, "nu": 11, "nv": 11},
      "seed": "trivial",
      "riccati": {"v1_init": 0.5},
      "sweep": {"samples": 200, "rng_seed": 5},
      "outputs": {"report_path": "r.json", "mesh_path": "m"}
    })");
}

json bent_config()
{
    json j = trivial_config();
    j["seed"] = {{"bent", {{"kappa_expr", "kappa + 0.1"}, {"u_ref", 2.8}}}};
    j["riccati"]["v1_init"] = -1.0;
    return j;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("bianchi_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string field_error(json j)
{
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("config validation names the field")
{
    CHECK(field_error(trivial_config()).empty());
    json j = trivial_config();
    j["quadric"]["a2"] = 0.5;
    CHECK(field_error(j).rfind("quadric.a2:", 0) == 0);
    j = trivial_config();
    j["quadric"]["kind"] = "ellipsoid";
    CHECK(field_error(j).rfind("quadric.kind:", 0) == 0);
    j = trivial_config();
    j["grid"]["nu"] = 2;
    CHECK(field_error(j).rfind("grid.nu:", 0) == 0);
    j = trivial_config();
    j["grid"]["nu"] = 11.5;
    CHECK(field_error(j).rfind("grid.nu:", 0) == 0);
    j = trivial_config();
    j["grid"]["v0_max"] = 2.0;
    CHECK(field_error(j).rfind("grid:", 0) == 0);
    j = trivial_config();
    j["epsilon"] = 0;
    CHECK(field_error(j).rfind("epsilon:", 0) == 0);
    j = trivial_config();
    j["z"] = 1.5;
    CHECK(field_error(j).rfind("z:", 0) == 0);
    j = trivial_config();
    j["extra"] = 1;
    CHECK(field_error(j).rfind("extra:", 0) == 0);
    j = trivial_config();
    j["seed"] = {{"rigid", {{"R", {{1, 0, 0}, {0, 2, 0}, {0, 0, 1}}}}}};
    CHECK(field_error(j).rfind("seed.rigid.R:", 0) == 0);
    j = bent_config();
    j["seed"]["bent"]["kappa_expr"] = "kappa +";
    CHECK(field_error(j).rfind("seed.bent.kappa_expr:", 0) == 0);
    j = bent_config();
    j["seed"]["bent"]["u_ref"] = 0.0; // inside the v-range
    CHECK(field_error(j).rfind("seed.bent:", 0) == 0);
    j = trivial_config();
    j["tolerances"] = {{"no_such_check", 1.0}};
    CHECK(field_error(j).rfind("tolerances.no_such_check:", 0) == 0);
    j = trivial_config();
    j["sweep"]["rng_seed"] = -3;
    CHECK(field_error(j).rfind("sweep.rng_seed:", 0) == 0);
    j = trivial_config();
    j["riccati"]["rel_tol"] = 0.0;
    CHECK(field_error(j).rfind("riccati.rel_tol:", 0) == 0);
}

TEST_CASE("effective config round-trips and hashes stably")
{
    const RunConfig c = parse_config(bent_config());
    const json e = to_json(c);
    const RunConfig back = parse_config(e);
    CHECK(to_json(back).dump() == e.dump());
    CHECK(e["grid"]["nu"] == 11);
    CHECK(e["epsilon"] == 1);
    // FNV-1a reference vectors
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("numbers print in shortest round-trip form")
{
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1e-16}) {
        const std::string s = format_double(x);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("identities: pass, forced failure, determinism")
{
    const fs::path dir = scratch("identities");
    Overrides o;
    o.out_dir = dir.string();
    std::ostringstream log;
    const RunConfig c = parse_config(trivial_config());
    CHECK(cmd_identities(c, o, log) == kExitOk);
    const std::string first = slurp(dir / "r.json");
    const json rep = json::parse(first);
    CHECK(rep["pass"] == true);
    CHECK(rep["metadata"]["config_hash"].get<std::string>().size() == 16);
    CHECK(cmd_identities(c, o, log) == kExitOk);
    CHECK(slurp(dir / "r.json") == first);

    o.seed = 6;
    CHECK(cmd_identities(c, o, log) == kExitOk);
    CHECK(slurp(dir / "r.json") != first);

    // tolerance zero forces the failure path, and the report still lands
    json j = trivial_config();
    j["tolerances"] = {{"gram", 0.0}};
    fs::remove(dir / "r.json");
    CHECK(cmd_identities(parse_config(j), o, log) == kExitTolerance);
    CHECK(json::parse(slurp(dir / "r.json"))["pass"] == false);
    Overrides zero = o;
    zero.tol_scale = 0.0;
    CHECK(cmd_identities(c, zero, log) == kExitTolerance);
}

TEST_CASE("transform: trivial seed gives a degenerate, collinear leaf")
{
    const fs::path dir = scratch("trivial");
    Overrides o;
    o.out_dir = dir.string();
    std::ostringstream log;
    CHECK(cmd_transform(parse_config(trivial_config()), o, log) == kExitOk);
    const json rep = json::parse(slurp(dir / "r.json"));
    CHECK(rep["leaf"]["degenerate"] == true);
    CHECK(rep["leaf"]["collinearity"].get<double>() <= 1e-8);
    CHECK(rep["leaf"].contains("note"));

    std::istringstream leaf(slurp(dir / "m.leaf.csv"));
    std::string line;
    std::getline(leaf, line);
    CHECK(line == "u0,v0,x,y,z,u1,v1");
    int rows = 0;
    while (std::getline(leaf, line))
        ++rows;
    CHECK(rows == 121);
    CHECK(fs::exists(dir / "m.seed.csv"));
}

TEST_CASE("transform: bent seed passes and reports path independence")
{
    const fs::path dir = scratch("bent");
    Overrides o;
    o.out_dir = dir.string();
    std::ostringstream log;
    json j = bent_config();
    j["epsilon"] = -1;
    CHECK(cmd_transform(parse_config(j), o, log) == kExitOk);
    const json rep = json::parse(slurp(dir / "r.json"));
    CHECK(rep["pass"] == true);
    CHECK(rep["transport"]["path_state_gap"].get<double>() <= 1e-6);
    CHECK(rep["leaf"]["degenerate"] == false);
    CHECK(rep.contains("convergence"));
}

TEST_CASE("transform error paths")
{
    const fs::path dir = scratch("errors");
    Overrides o;
    o.out_dir = dir.string();
    std::ostringstream log;
    json j = trivial_config();
    j["z"] = 0.0;
    CHECK_THROWS_AS(cmd_transform(parse_config(j), o, log), SpectralZeroError);
    j.erase("z");
    CHECK_THROWS_AS(cmd_transform(parse_config(j), o, log), ConfigError);

    // a pole at every node
    j = trivial_config();
    j["riccati"]["v1_init"] = 1e12;
    CHECK(cmd_transform(parse_config(j), o, log) == kExitTolerance);
    const json rep = json::parse(slurp(dir / "r.json"));
    CHECK(rep["error"]["kind"] == "BlowupError");
}

TEST_CASE("archimedes report")
{
    const fs::path dir = scratch("archimedes");
    Overrides o;
    o.out_dir = dir.string();
    std::ostringstream log;
    CHECK(cmd_archimedes(1000, o, log) == kExitOk);
    const json rep = json::parse(slurp(dir / "archimedes.json"));
    CHECK(std::abs(rep["segment_ratio"]["error"].get<double>()) <= 1e-5);
    CHECK(rep["convergence"]["area_error_ratio"].get<double>() == doctest::Approx(4.0).epsilon(0.125));
    CHECK(rep["ledger"]["max_slice_residual"].get<double>() <= 1e-14);
    CHECK(cmd_archimedes(2, o, log) == kExitOk);
    CHECK_THROWS_AS(cmd_archimedes(1, o, log), DomainError);
}

TEST_CASE("output directory resolution")
{
    Overrides o;
    ::setenv(kOutDirEnv, "/tmp/from_env", 1);
    CHECK(resolve_out_dir(o) == "/tmp/from_env");
    o.out_dir = "/tmp/from_flag";
    CHECK(resolve_out_dir(o) == "/tmp/from_flag");
    ::unsetenv(kOutDirEnv);
    CHECK(resolve_out_dir(Overrides{}) == ".");
}
