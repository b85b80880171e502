#pragma once

#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "varsel/fourier.hpp"
#include "varsel/rng.hpp"

namespace varsel {

// Observed coefficients y_k = theta_k + n^{-1/2} xi_k over a declared finite
// index set. Only the requested indices are materialized.
struct WhiteNoiseSample {
    int d = 1;
    long n = 1;
    std::map<MultiIndex, double> observations;

    double at(const MultiIndex& k) const {
        auto it = observations.find(k);
        if (it == observations.end()) throw ComputeError("sample: observation missing (mis-built index set)");
        return it->second;
    }
};

// Every index with ||k||_2^2 <= sq_bound and 1 <= ||k||_0 <= max_weight:
// the union of all statistic windows a selector with these limits can touch.
inline std::vector<MultiIndex> observation_index_set_sq(int d, std::int64_t sq_bound,
                                                        int max_weight,
                                                        std::size_t size_limit = 5'000'000) {
    require(d >= 1, "observation set: d must be >= 1");
    require(sq_bound >= 1, "observation set: bound must be >= 1");
    require(max_weight >= 1 && max_weight <= d, "observation set: weight budget out of range");
    const std::int64_t bound = sq_bound;
    std::vector<MultiIndex> out;
    for (int w = 1; w <= std::min<std::int64_t>(max_weight, bound); ++w) {
        lattice::for_each_subset(d, w, [&](const std::vector<int>& T) {
            std::vector<std::int32_t> cur(T.size(), 0);
            struct Rec {
                const std::vector<int>& T;
                int d;
                std::vector<MultiIndex>& out;
                std::vector<std::int32_t>& cur;
                void operator()(std::size_t pos, std::int64_t remaining) const {
                    if (pos == T.size()) {
                        MultiIndex k = MultiIndex::zero(d);
                        for (std::size_t i = 0; i < T.size(); ++i)
                            k.entries[static_cast<std::size_t>(T[i])] = cur[i];
                        out.push_back(std::move(k));
                        return;
                    }
                    const std::int64_t r = lattice::isqrt_floor(remaining);
                    for (std::int64_t v = -r; v <= r; ++v) {
                        if (v == 0) continue;
                        cur[pos] = static_cast<std::int32_t>(v);
                        (*this)(pos + 1, remaining - v * v);
                    }
                }
            };
            Rec{T, d, out, cur}(0, bound);
            if (out.size() > size_limit)
                throw ValidationError("observation set: size limit exceeded");
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<MultiIndex> observation_index_set(int d, double max_radius, int max_weight,
                                                     std::size_t size_limit = 5'000'000) {
    require(max_radius > 0.0, "observation set: radius must be positive");
    return observation_index_set_sq(d, lattice::squared_radius_bound(max_radius), max_weight,
                                    size_limit);
}

// y_k = theta_k + n^{-1/2} xi_k with xi_k standard normal, each deviate
// derived from (seed, canonical index hash) so the sample is independent of
// enumeration order and reproducible byte for byte.
inline WhiteNoiseSample sample_white_noise(const SparseFourierFunction& f, long n,
                                           std::span<const MultiIndex> index_set,
                                           std::uint64_t seed) {
    require(n >= 1, "white noise: n must be >= 1");
    require(!index_set.empty(), "white noise: empty index set");
    WhiteNoiseSample s;
    s.d = f.dim;
    s.n = n;
    const double noise = 1.0 / std::sqrt(static_cast<double>(n));
    for (const auto& k : index_set) {
        require(k.dim() == f.dim, "white noise: index dimension mismatch");
        const double xi = rng::gaussian_at(rng::mix(seed, rng::hash_index(k)));
        s.observations[k] = f.coefficient(k) + noise * xi;
    }
    return s;
}

}  // namespace varsel
