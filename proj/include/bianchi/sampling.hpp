#pragma once

#include <cstdint>
#include <random>

#include "bianchi/confocal.hpp"

namespace bianchi {

/// Portable sampler: std::mt19937_64 (bit-exact across standard libraries) with
/// uniforms built from the top 53 bits, avoiding implementation-defined distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

struct SampleDomain {
    double param_min = -3.0;
    double param_max = 3.0;
    double min_gap = 0.1;        // |u - v| on the hyperboloid
    double z_fraction = 0.8;     // middle fraction of the admissible z interval
};

ConfocalFamily random_family(Rng& rng, QuadricKind kind);
double random_z(Rng& rng, const ConfocalFamily& family, double fraction = 0.8);
ParamPoint random_point(Rng& rng, const ConfocalFamily& family, const SampleDomain& domain = {});

} // namespace bianchi
