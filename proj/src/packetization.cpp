#include "lossq/packetization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "lossq/error.hpp"

namespace lossq {

PacketLaw PacketLaw::from_pairs(const std::vector<std::pair<int, double>>& pairs) {
    if (pairs.empty()) throw ValidationError("packet law needs at least one (value, prob) pair");
    std::map<int, double> merged;
    long double total = 0.0L;
    for (const auto& [v, p] : pairs) {
        if (v < 1) throw ValidationError("packet counts must be >= 1");
        if (!(std::isfinite(p) && p >= 0.0)) throw ValidationError("packet probabilities must be >= 0");
        merged[v] += p;
        total += p;
    }
    if (std::abs(static_cast<double>(total - 1.0L)) > 1e-12)
        throw ValidationError("packet probabilities must sum to 1 (got " + std::to_string(static_cast<double>(total)) +
                              ")");
    std::erase_if(merged, [](const auto& kv) { return kv.second == 0.0; });
    if (merged.empty()) throw ValidationError("packet law has no positive mass");
    PacketLaw law;
    law.lower_ = merged.begin()->first;
    law.probs_.assign(static_cast<std::size_t>(merged.rbegin()->first - law.lower_ + 1), 0.0);
    for (const auto& [v, p] : merged) law.probs_[static_cast<std::size_t>(v - law.lower_)] = p;
    return law;
}

PacketLaw PacketLaw::constant(int packets) { return from_pairs({{packets, 1.0}}); }

double PacketLaw::prob(int packets) const {
    if (packets < lower_ || packets > upper()) return 0.0;
    return probs_[static_cast<std::size_t>(packets - lower_)];
}

double PacketLaw::mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < probs_.size(); ++j) m += (lower_ + static_cast<double>(j)) * probs_[j];
    return m;
}

double PacketLaw::survival(int x) const {
    if (x < lower_) return 1.0;
    double s = 0.0;
    for (int v = std::max(x + 1, lower_); v <= upper(); ++v) s += prob(v);
    return s;
}

PacketLaw PacketLaw::shifted(int k) const {
    if (k < 0) throw ValidationError("packet shift must be >= 0");
    PacketLaw out = *this;
    out.lower_ += k;
    return out;
}

std::vector<std::pair<int, double>> PacketLaw::pairs() const {
    std::vector<std::pair<int, double>> out;
    for (std::size_t j = 0; j < probs_.size(); ++j)
        if (probs_[j] > 0.0) out.emplace_back(lower_ + static_cast<int>(j), probs_[j]);
    return out;
}

ZetaPmf ZetaPmf::point(int capacity) {
    if (capacity < 0) throw ValidationError("capacity must be >= 0");
    return ZetaPmf{0, capacity, {1.0}, static_cast<double>(capacity)};
}

double ZetaPmf::prob(int k) const {
    if (k < lower || k > upper()) return 0.0;
    return probs[static_cast<std::size_t>(k - lower)];
}

double ZetaPmf::generating(double phi) const {
    double v = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j)
        if (probs[j] > 0.0) v += probs[j] * std::pow(phi, lower + static_cast<double>(j));
    return v;
}

bool ZetaPmf::degenerate() const {
    return std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }) == 1;
}

std::pair<int, int> zeta_bounds(const PacketLaw& nu, int buffer) {
    if (buffer < nu.lower())
        throw ValidationError("buffer of " + std::to_string(buffer) + " packets cannot hold a message of " +
                              std::to_string(nu.lower()) + " packets");
    return {buffer / nu.upper(), buffer / nu.lower()};
}

ZetaPmf zeta_pmf(const PacketLaw& nu, int buffer) {
    const auto [zlo, zhi] = zeta_bounds(nu, buffer);
    const auto n = static_cast<std::size_t>(buffer);

    // f[s] = P{nu_1 + ... + nu_m = s}, restricted to s <= N; live entries lie in [m*lower, m*upper].
    std::vector<double> f(n + 1, 0.0), g(n + 1, 0.0);
    f[0] = 1.0;
    std::vector<double> tail(n + 1);
    for (std::size_t r = 0; r <= n; ++r) tail[r] = nu.survival(static_cast<int>(r));

    ZetaPmf out;
    out.buffer = buffer;
    out.lower = zlo;
    out.probs.assign(static_cast<std::size_t>(zhi - zlo + 1), 0.0);
    for (int m = 0; m <= zhi; ++m) {
        const std::size_t lo = static_cast<std::size_t>(m) * static_cast<std::size_t>(nu.lower());
        const std::size_t hi = std::min(n, static_cast<std::size_t>(m) * static_cast<std::size_t>(nu.upper()));
        // P{zeta = m} = sum_s f_m(s) P{nu_{m+1} > N - s}
        double pm = 0.0;
        for (std::size_t s = lo; s <= hi; ++s) pm += f[s] * tail[n - s];
        if (m >= zlo) out.probs[static_cast<std::size_t>(m - zlo)] = pm;
        else if (pm > 1e-15) throw ValidationError("zeta mass below its lower bound");  // unreachable for valid laws

        if (m == zhi) break;
        // Only [lo + lower, hi + upper] is written here and read next round.
        const std::size_t next_lo = std::min(n + 1, lo + static_cast<std::size_t>(nu.lower()));
        const std::size_t next_hi = std::min(n + 1, hi + static_cast<std::size_t>(nu.upper()) + 1);
        std::fill(g.begin() + static_cast<std::ptrdiff_t>(next_lo), g.begin() + static_cast<std::ptrdiff_t>(next_hi),
                  0.0);
        for (std::size_t s = lo; s <= hi; ++s) {
            if (f[s] == 0.0) continue;
            for (int v = nu.lower(); v <= nu.upper(); ++v) {
                const std::size_t t = s + static_cast<std::size_t>(v);
                if (t > n) break;
                g[t] += f[s] * nu.prob(v);
            }
        }
        std::swap(f, g);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < out.probs.size(); ++j) {
        total += out.probs[j];
        out.mean += (zlo + static_cast<double>(j)) * out.probs[j];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("zeta pmf lost mass; check the packet law");
    return out;
}

}  // namespace lossq
