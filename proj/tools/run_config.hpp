#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "bianchi/backlund.hpp"
#include "bianchi/confocal.hpp"
#include "bianchi/surface.hpp"

namespace bianchi::cli {

enum class SeedKind { Trivial, Rigid, Bent };

struct SeedConfig {
    SeedKind kind = SeedKind::Trivial;
    RigidMotion rigid;
    std::string kappa_expr = "kappa";
    int sigma = 1;
    double u_ref = 0.0;
};

struct GridConfig {
    double u0_min = 0, u0_max = 1, v0_min = 0, v0_max = 1;
    int nu = 41, nv = 41;

    Grid2D grid() const { return Grid2D::make(u0_min, u0_max, v0_min, v0_max, nu, nv); }
};

struct RunConfig {
    QuadricKind kind = QuadricKind::HyperboloidOneSheet;
    double a1 = 0, a2 = 0, a3 = 0;
    std::optional<double> z;
    GridConfig grid;
    SeedConfig seed;
    int epsilon = 1;
    MFamily flavor = MFamily::M;
    double v1_init = -1.0;
    double rel_tol = 1e-10;
    double max_step = 0.0;
    int samples = 10000;
    std::uint64_t rng_seed = 2024;
    std::string report_path;
    std::string mesh_path;
    std::map<std::string, double> tolerances;

    ConfocalFamily family() const;
    /// Surface for the seed; the bent one is integrated over the grid's v-range.
    std::shared_ptr<const Surface> seed_surface() const;
    TransportOptions transport_options() const;
};

/// Validates `j` against the schema and the numeric constraints of the domain
/// types. Throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Effective configuration with every default filled in; keys sorted.
nlohmann::json to_json(const RunConfig& c);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct Tolerance {
    double value;
    bool scaled; // multiplied by --tol-scale; floors and bands are not
};

/// Declared tolerances by name. A config may override any of them.
const std::map<std::string, Tolerance>& default_tolerances();

} // namespace bianchi::cli
