#pragma once

// Grid evaluation over the simulation parameter ranges: viability screen,
// MPR-branch filter, then per-tuple equilibrium enumeration and type counts.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "insol/bimatrix.hpp"
#include "insol/exante.hpp"
#include "insol/market.hpp"

namespace insol {

struct param_range {
    double min = 0;
    double max = 0;
    double step = 1;
};

enum class branch_filter { all_increasing, all_decreasing, any };

struct sweep_config {
    param_range alpha{90.0, 190.0, 20.0};
    param_range q{0.01, 0.17, 0.04};
    param_range K{100.0, 900.0, 200.0};
    param_range r{0.01, 0.26, 0.05};
    std::size_t grid_levels = 20;
    branch_filter filter = branch_filter::all_increasing;
    double solver_tolerance = 1e-8;
    unsigned jobs = 1;

    void validate() const {
        for (const auto* pr : {&alpha, &q, &K, &r}) {
            if (!(pr->min <= pr->max)) throw std::invalid_argument("sweep_config: min > max");
            if (!(pr->step > 0.0)) throw std::invalid_argument("sweep_config: step must be positive");
        }
        if (grid_levels < 2) throw std::invalid_argument("sweep_config: need at least two capital levels");
        if (!(solver_tolerance > 0.0))
            throw std::invalid_argument("sweep_config: solver tolerance must be positive");
        if (jobs < 1) throw std::invalid_argument("sweep_config: need at least one worker");
    }
};

// inclusive of min, stepping until the value passes max
inline std::vector<double> grid_values(const param_range& pr) {
    std::vector<double> vals;
    const double slack = pr.step * 1e-9 + std::fabs(pr.max) * 1e-12;
    for (std::size_t k = 0;; ++k) {
        const double v = pr.min + static_cast<double>(k) * pr.step;
        if (v > pr.max + slack) break;
        vals.push_back(v);
    }
    return vals;
}

enum class tuple_status { passed, filtered, skipped, failed };

struct sweep_record {
    market_params params;
    tuple_status status = tuple_status::skipped;
    double c_1z = 0.0;               // 0 when never computed
    bool all_increasing = false;     // every positive level's MPR meets demand rising
    bool all_decreasing = false;
    std::size_t eq_total = 0;
    std::size_t eq_type1 = 0, eq_type2 = 0, eq_type3 = 0;
    std::string diagnostic;
};

struct sweep_result {
    sweep_config config;
    std::vector<sweep_record> records;  // canonical order: alpha, q, K, r ascending
    std::size_t total = 0, passed = 0, filtered = 0, skipped = 0, failed = 0;
    std::size_t eq_type1 = 0, eq_type2 = 0, eq_type3 = 0, eq_total = 0;
};

struct type_counts {
    std::size_t type1 = 0, type2 = 0, type3 = 0, total = 0;
};

inline type_counts type_distribution(const sweep_result& res) {
    return {res.eq_type1, res.eq_type2, res.eq_type3, res.eq_total};
}

namespace detail {

inline sweep_record evaluate_tuple(const market_params& p, const sweep_config& cfg) {
    sweep_record rec;
    rec.params = p;
    exante_thresholds th;
    try {
        th = thresholds(p);
    } catch (const std::exception& ex) {
        rec.status = tuple_status::skipped;
        rec.diagnostic = ex.what();
        return rec;
    }
    rec.c_1z = th.c_1z;
    if (!(th.c_1z > 0.0)) {
        rec.status = tuple_status::skipped;
        rec.diagnostic = "no profitable entry capital";
        return rec;
    }

    std::vector<double> grid;
    try {
        grid = uniform_capital_grid(p, cfg.grid_levels);
        rec.all_increasing = rec.all_decreasing = true;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const branch b = branch_of_intersection(p, grid[k]);
            (b == branch::increasing ? rec.all_decreasing : rec.all_increasing) = false;
        }
    } catch (const std::exception& ex) {
        rec.status = tuple_status::failed;
        rec.diagnostic = ex.what();
        return rec;
    }

    const bool keep = cfg.filter == branch_filter::any ||
                      (cfg.filter == branch_filter::all_increasing && rec.all_increasing) ||
                      (cfg.filter == branch_filter::all_decreasing && rec.all_decreasing);
    if (!keep) {
        rec.status = tuple_status::filtered;
        return rec;
    }

    try {
        const payoff_matrix m = build_payoff_matrix(p, grid);
        solve_options opt;
        opt.tolerance = cfg.solver_tolerance;
        const enumeration_report rep = enumerate_equilibria(make_symmetric_game(m), opt);
        rec.eq_total = rep.equilibria.size();
        for (const auto& eq : rep.equilibria) {
            switch (classify_type(eq, 0)) {
                case eq_type::type1: ++rec.eq_type1; break;
                case eq_type::type2: ++rec.eq_type2; break;
                case eq_type::type3: ++rec.eq_type3; break;
            }
        }
        rec.status = tuple_status::passed;
    } catch (const std::exception& ex) {
        rec.status = tuple_status::failed;
        rec.diagnostic = ex.what();
    }
    return rec;
}

}  // namespace detail

inline sweep_result run_sweep(const sweep_config& cfg) {
    cfg.validate();
    sweep_result res;
    res.config = cfg;

    std::vector<market_params> tuples;
    for (double a : grid_values(cfg.alpha))
        for (double q : grid_values(cfg.q))
            for (double K : grid_values(cfg.K))
                for (double r : grid_values(cfg.r)) tuples.push_back({q, K, a, r});
    res.records.resize(tuples.size());
    res.total = tuples.size();

    const std::size_t workers =
        std::min<std::size_t>(std::max<unsigned>(cfg.jobs, 1u), std::max<std::size_t>(tuples.size(), 1));
    std::atomic<std::size_t> cursor{0};
    auto drain = [&] {
        for (std::size_t idx; (idx = cursor.fetch_add(1)) < tuples.size();)
            res.records[idx] = detail::evaluate_tuple(tuples[idx], cfg);
    };
    if (workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (auto& t : pool) t.join();
    }

    for (const auto& rec : res.records) {
        switch (rec.status) {
            case tuple_status::passed: ++res.passed; break;
            case tuple_status::filtered: ++res.filtered; break;
            case tuple_status::skipped: ++res.skipped; break;
            case tuple_status::failed: ++res.failed; break;
        }
        res.eq_type1 += rec.eq_type1;
        res.eq_type2 += rec.eq_type2;
        res.eq_type3 += rec.eq_type3;
        res.eq_total += rec.eq_total;
    }
    return res;
}

}  // namespace insol
