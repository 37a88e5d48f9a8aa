#pragma once

#include <utility>
#include <vector>

namespace lossq {

// Law of nu, the number of packets per message, on a bounded integer support.
class PacketLaw {
public:
    // Explicit (value, prob) pairs; values >= 1, probabilities summing to 1.
    static PacketLaw from_pairs(const std::vector<std::pair<int, double>>& pairs);
    static PacketLaw constant(int packets);

    int lower() const noexcept { return lower_; }
    int upper() const noexcept { return lower_ + static_cast<int>(probs_.size()) - 1; }
    double prob(int packets) const;
    double mean() const;
    // P{nu > x}
    double survival(int x) const;

    // Every message carries k extra packets.
    PacketLaw shifted(int k) const;

    // Nonzero (value, prob) pairs in increasing order.
    std::vector<std::pair<int, double>> pairs() const;

    bool operator==(const PacketLaw&) const = default;

private:
    int lower_ = 1;
    std::vector<double> probs_{1.0};
};

// Distribution of zeta(N) = sup{m : nu_1 + ... + nu_m <= N}.
struct ZetaPmf {
    int buffer = 0;  // N; 0 when built directly from a capacity
    int lower = 0;
    std::vector<double> probs;  // probs[j] = P{zeta = lower + j}
    double mean = 0.0;

    static ZetaPmf point(int capacity);

    int upper() const noexcept { return lower + static_cast<int>(probs.size()) - 1; }
    double prob(int k) const;
    // E phi^zeta
    double generating(double phi) const;
    bool degenerate() const;
};

ZetaPmf zeta_pmf(const PacketLaw& nu, int buffer);

// (floor(N / nu_upper), floor(N / nu_lower))
std::pair<int, int> zeta_bounds(const PacketLaw& nu, int buffer);

}  // namespace lossq
