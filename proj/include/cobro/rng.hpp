#pragma once

#include <array>
#include <cstdint>

namespace cobro {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).  A block of
// four 32-bit outputs is a pure function of (seed, stream, block index), so
// any path / replication can be generated independently of all others and
// results do not depend on thread scheduling.
std::array<uint32_t, 4> philox4x32(uint64_t seed, uint64_t stream, uint64_t block);

// Sequential view of one Philox stream.  uniform() yields 53-bit doubles in
// the open interval (0,1); normal() applies the inverse normal CDF to one
// uniform.  Draw counters track requested variates by kind.
class RngStream {
public:
    RngStream(uint64_t seed, uint64_t stream)
        : seed_(seed), stream_(stream) {}

    double uniform() { ++n_uniform_; return next_unit(); }
    double normal();

    uint64_t uniforms_drawn() const { return n_uniform_; }
    uint64_t normals_drawn() const { return n_normal_; }
    uint64_t total_drawn() const { return n_uniform_ + n_normal_; }

private:
    uint32_t next_u32();
    double next_unit();

    uint64_t seed_;
    uint64_t stream_;
    uint64_t block_ = 0;
    std::array<uint32_t, 4> buf_{};
    int idx_ = 4;
    uint64_t n_uniform_ = 0;
    uint64_t n_normal_ = 0;
};

// Inverse of the standard normal CDF (Acklam's rational approximation with
// one Halley correction; ~1e-15 absolute error away from the extreme tails).
double inverse_normal_cdf(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

} // namespace cobro
