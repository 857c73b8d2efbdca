#pragma once

// Generative-model sampling: n i.i.d. next states per (s, a) from the nominal
// kernel, and the empirical kernel counts / n.

#include "drmdp/errors.hpp"
#include "drmdp/mdp.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace drmdp {

struct SampleBatch {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::uint64_t n_per_sa = 0;
    std::vector<std::uint64_t> counts; // (s, a, s') row-major, like TabularMDP

    std::uint64_t count(std::size_t s, std::size_t a, std::size_t next) const {
        return counts[(s * n_actions + a) * n_states + next];
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based stream keyed by (seed, s, a): draw i is a hash of (key, i),
/// so any (s, a) can be generated independently of the others.
class SubStream {
public:
    SubStream(std::uint64_t seed, std::uint64_t s, std::uint64_t a)
        : key_(splitmix64(splitmix64(splitmix64(seed) ^ s) ^ (a + 0x632be59bd9b4e019ULL))) {}

    /// Uniform in (0, 1) from the top 53 bits.
    double uniform(std::uint64_t i) const noexcept {
        const std::uint64_t x = splitmix64(key_ + i * 0x9e3779b97f4a7c15ULL);
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
};

} // namespace detail

/// n categorical draws per (s, a) by inverse CDF (first index with cumulative >= u).
inline SampleBatch draw_samples(const TabularMDP& mdp, std::uint64_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("draw_samples: n must be at least 1");
    const std::size_t ns = mdp.n_states();
    const std::size_t na = mdp.n_actions();
    SampleBatch batch{ns, na, n, std::vector<std::uint64_t>(ns * na * ns, 0)};

    std::vector<std::size_t> support;
    std::vector<double> cumulative;
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t a = 0; a < na; ++a) {
            const auto row = mdp.kernel_row(s, a);
            support.clear();
            cumulative.clear();
            double acc = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                if (row[j] > 0.0) {
                    acc += row[j];
                    support.push_back(j);
                    cumulative.push_back(acc);
                }
            }
            if (support.empty()) throw std::invalid_argument("draw_samples: kernel row with no support");
            // Rounding could leave the last cumulative just under 1.
            cumulative.back() = 1.0;

            const detail::SubStream stream(seed, s, a);
            std::uint64_t* out = batch.counts.data() + (s * na + a) * ns;
            for (std::uint64_t i = 0; i < n; ++i) {
                const double u = stream.uniform(i);
                std::size_t k = 0;
                while (cumulative[k] < u) ++k;
                ++out[support[k]];
            }
        }
    }
    return batch;
}

/// counts / n, row by row.
inline std::vector<double> empirical_kernel(const SampleBatch& batch) {
    std::vector<double> kernel(batch.counts.size());
    const double n = static_cast<double>(batch.n_per_sa);
    for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] = static_cast<double>(batch.counts[i]) / n;
    return kernel;
}

/// The model with its kernel replaced by the empirical one.
inline TabularMDP empirical_mdp(const TabularMDP& mdp, const SampleBatch& batch) {
    if (batch.n_states != mdp.n_states() || batch.n_actions != mdp.n_actions())
        throw DimensionError("empirical_mdp: batch shape does not match the model");
    return mdp.with_kernel(empirical_kernel(batch));
}

} // namespace drmdp
