#pragma once

#include <cstdint>

namespace spotsim {

/// Seed-reproducible random stream: xoshiro256++ with the state derived from
/// (master_seed, stream_id) through SplitMix64.
///
/// Two streams built from the same pair produce bit-identical sequences; streams
/// with distinct ids are decorrelated by the seeding hash. Simulations assign one
/// stream per path so results do not depend on how paths are distributed over
/// worker threads.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    /// Uniform draw on [0, 1).
    double uniform();
    /// Uniform draw on (0, 1]; safe as a log() argument.
    double uniform_pos();
    /// Standard normal via the Marsaglia polar method (second draw cached).
    double normal();
    /// Exponential with the given rate (inverse CDF).
    double exponential(double rate);

private:
    std::uint64_t state_[4];
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

}  // namespace spotsim
