#pragma once

// Monte-Carlo check that the normal-approximation capital requirement really
// delivers the 0.5% ruin bound on simulated Bernoulli claim portfolios.
//
// Trials are drawn in fixed blocks of 65536; each block seeds its own
// mt19937_64 from a splitmix64 stream over the user seed, so the estimate is
// identical no matter how blocks are distributed over workers.  The claim
// count per trial comes from std::binomial_distribution (rejection sampling,
// O(1) per draw), constructed fresh per block.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <random>

#include "insol/market.hpp"

namespace insol {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::size_t sim_block_size = 65536;

struct simulation_spec {
    market_params params;
    std::size_t n = 1;         // policies in the portfolio
    double premium = 0.0;
    double capital = 0.0;
    std::size_t trials = 1;
    std::uint64_t seed = 0;

    void validate() const {
        params.validate();
        if (n < 1) throw std::invalid_argument("simulation_spec: need at least one policy");
        if (trials < 1) throw std::invalid_argument("simulation_spec: need at least one trial");
        if (!std::isfinite(premium) || !std::isfinite(capital))
            throw std::invalid_argument("simulation_spec: premium and capital must be finite");
    }
};

struct ruin_estimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    std::size_t ruined = 0;
    std::string generator;  // algorithm identification for reproducibility notes
};

inline ruin_estimate estimate_ruin_probability(const simulation_spec& spec, unsigned jobs = 1) {
    spec.validate();
    if (jobs < 1) throw std::invalid_argument("estimate_ruin_probability: need at least one worker");

    // ruin when total claims exceed capital plus premium income
    const double barrier = spec.capital + static_cast<double>(spec.n) * spec.premium;
    const std::size_t blocks = (spec.trials + sim_block_size - 1) / sim_block_size;
    std::vector<std::uint64_t> block_seeds(blocks);
    std::uint64_t stream = spec.seed;
    for (std::size_t b = 0; b < blocks; ++b) {
        block_seeds[b] = splitmix64(stream);
        stream = block_seeds[b];
    }

    auto run_block = [&](std::size_t b) -> std::size_t {
        const std::size_t lo = b * sim_block_size;
        const std::size_t hi = std::min(lo + sim_block_size, spec.trials);
        std::mt19937_64 engine(block_seeds[b]);
        std::binomial_distribution<long long> claims(static_cast<long long>(spec.n),
                                                     spec.params.q);
        std::size_t ruined = 0;
        for (std::size_t t = lo; t < hi; ++t) {
            const double total = static_cast<double>(claims(engine)) * spec.params.K;
            if (total > barrier) ++ruined;
        }
        return ruined;
    };

    std::size_t ruined = 0;
    const std::size_t workers = std::min<std::size_t>(jobs, blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) ruined += run_block(b);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::atomic<std::size_t> hits{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                std::size_t local = 0;
                for (std::size_t b; (b = cursor.fetch_add(1)) < blocks;) local += run_block(b);
                hits.fetch_add(local);
            });
        for (auto& t : pool) t.join();
        ruined = hits.load();
    }

    ruin_estimate out;
    out.trials = spec.trials;
    out.ruined = ruined;
    out.estimate = static_cast<double>(ruined) / static_cast<double>(spec.trials);
    out.std_error =
        std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(spec.trials));
    out.generator = "splitmix64-block-seeds/mt19937_64/std::binomial_distribution";
    return out;
}

struct profile_row {
    std::size_t n = 0;
    double premium = 0.0;
    double capital = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double abs_error = 0.0;  // |estimate - 0.005|
};

// How the normal approximation behaves across portfolio sizes: capital is set
// to the requirement at the rule's premium, so the target ruin level is 0.5%.
// Small n degrades visibly; the rows document by how much.
inline std::vector<profile_row> approximation_error_profile(
    const market_params& params, const std::vector<std::size_t>& n_list,
    const std::function<double(std::size_t)>& premium_rule, std::size_t trials,
    std::uint64_t seed, unsigned jobs = 1) {
    if (n_list.empty())
        throw std::invalid_argument("approximation_error_profile: empty portfolio list");
    std::vector<profile_row> rows;
    rows.reserve(n_list.size());
    for (std::size_t n : n_list) {
        simulation_spec spec;
        spec.params = params;
        spec.n = n;
        spec.premium = premium_rule ? premium_rule(n) : params.net_premium();
        spec.capital = mcr(params, static_cast<double>(n), spec.premium);
        spec.trials = trials;
        spec.seed = seed;
        const ruin_estimate est = estimate_ruin_probability(spec, jobs);
        rows.push_back({n, spec.premium, spec.capital, est.estimate, est.std_error,
                        std::fabs(est.estimate - 0.005)});
    }
    return rows;
}

}  // namespace insol
