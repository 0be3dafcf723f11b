#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"

#include "run_config.hpp"

namespace bianchi::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,     // invalid configuration, spectral zero, bad arguments
    kExitTolerance = 2,  // a check failed, or poles cover too many nodes
    kExitDegenerate = 3, // the configuration admits no leaf
};

/// Command-line settings layered over the config.
struct Overrides {
    std::optional<std::string> out_dir; // --out, then $BIANCHI_OUT_DIR, then "."
    std::optional<std::uint64_t> seed;
    double tol_scale = 1.0;
};

inline constexpr const char* kOutDirEnv = "BIANCHI_OUT_DIR";

/// Output directory after applying --out and the environment.
std::string resolve_out_dir(const Overrides& o);

/// Each command writes its report (and meshes) and returns the exit code.
/// Progress lines go to `log`.
int cmd_identities(const RunConfig& config, const Overrides& o, std::ostream& log);
int cmd_transform(const RunConfig& config, const Overrides& o, std::ostream& log);
int cmd_archimedes(int n, const Overrides& o, std::ostream& log, const std::string& report_path = "");

/// Shortest round-trip text for a double ("nan", "inf" for non-finite).
std::string format_double(double x);

} // namespace bianchi::cli
