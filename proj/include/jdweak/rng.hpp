#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace jdweak {

/// Philox4x32-10 block function: maps (counter, key) to four 32-bit words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream identifiers; each realization owns one stream of each kind.
enum class StreamId : std::uint32_t { wiener = 0, jump_times = 1, marks = 2 };

/// Counter-based random stream keyed by (seed, realization index, stream id).
///
/// Two streams constructed with the same triple produce identical sequences
/// regardless of which thread builds them or in which order, which is what
/// makes parallel batches reproduce serial ones bit for bit.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t realization, StreamId stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();
    /// Uniform in the open interval (0, 1).
    double uniform();
    /// Standard normal (Box-Muller, second variate cached).
    double normal();
    /// Unit-rate exponential.
    double exponential();

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace jdweak
