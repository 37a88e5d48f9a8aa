#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lossq {

// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

enum class StreamRole : std::uint32_t { interarrival = 0, service = 1, zeta = 2, marking = 3 };

// Keyed by the run seed; the counter space is partitioned by (replication, role)
// in its upper two words, so distinct substreams never share a counter value.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint32_t replication, StreamRole role);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on the open interval (0, 1).
    double uniform();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t replication_;
    std::uint32_t role_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace lossq
