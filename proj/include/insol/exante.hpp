#pragma once

// Two-period game: firms first choose founding capital, then compete in
// premiums.  Closed-form thresholds for the capital stage, the Appendix-style
// payoff matrix over a discrete capital grid, and pure-equilibrium
// classification.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "insol/market.hpp"

namespace insol {

struct exante_thresholds {
    double c_mc = 0;    // monopoly founding capital
    double p_mc = 0;    // monopoly premium
    double p_mcl = 0;   // half-market floor at monopoly capital
    double c_1z = 0;    // capital where whole-market entry just breaks even
    double p_1zu = 0;   // premium at that break-even point
    double p_1zl = 0;   // half-market floor at c_1z
    double c_2z = 0;    // capital where half-market entry just breaks even
    double p_2zl = 0;   // premium at that break-even point
    double r_max = 0;   // interest ceiling for a viable market
};

inline double r_max_of(const market_params& p) {
    p.validate();
    const double s = p.sigma();
    return s > p.alpha ? p.alpha / (s - p.alpha) : std::numeric_limits<double>::infinity();
}

struct monopoly_plan {
    double c_mc = 0;
    double p_mc = 0;
};

inline monopoly_plan monopoly_capital(const market_params& p) {
    p.validate();
    if (p.r >= r_max_of(p)) throw std::runtime_error("monopoly_capital: market not viable at this interest rate");
    const double qk = p.net_premium();
    const double s = p.sigma();
    const double e = s - p.alpha;
    const double s_disc = s / (1.0 + p.r);  // discounted loss dispersion
    return {(s_disc * s_disc - e * e) / (4.0 * qk),
            2.0 * p.alpha * qk / (p.alpha - s * p.r / (1.0 + p.r))};
}

namespace detail {

// founding a firm with capital C from scratch: break-even premium on the MPR
inline double p_zmpr(const market_params& p, double capital) {
    const double s = p.sigma();
    const double v = 1.0 + p.r;
    return p.net_premium() + s * s * p.r / (v * v * capital);
}

// capital solving full-demand break-even for a firm serving alpha_eff's hyperbola
inline double c_break_even(const market_params& p, double alpha_eff) {
    const double s = p.sigma();
    const double v = 1.0 + p.r;
    return s * (alpha_eff - s * p.r / v) / (v * p.net_premium());
}

// limit of the two-firm floor as capital goes to zero
inline double p_l_vanishing_capital(const market_params& p) {
    const double a = p.alpha / std::sqrt(2.0);
    const double s = p.sigma();
    if (a > s) return a * p.net_premium() / (a - s);
    return std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline exante_thresholds thresholds(const market_params& p) {
    p.validate();
    exante_thresholds t;
    t.r_max = r_max_of(p);
    if (p.r >= t.r_max) throw std::runtime_error("thresholds: market not viable at this interest rate");

    const monopoly_plan mono = monopoly_capital(p);
    t.c_mc = mono.c_mc;
    t.p_mc = mono.p_mc;
    t.c_1z = detail::c_break_even(p, p.alpha);
    t.p_1zu = detail::p_zmpr(p, t.c_1z);
    t.p_1zl = p_l(p, t.c_1z, 2).premium;
    t.c_2z = detail::c_break_even(p, p.alpha / std::sqrt(2.0));
    // a duopolist that can never break even poses no pricing threat
    t.p_2zl = t.c_2z > 0.0 ? detail::p_zmpr(p, t.c_2z) : std::numeric_limits<double>::infinity();
    // the unconstrained monopoly capital can go negative in capital-light
    // markets; the floor is then the vanishing-capital limit
    t.p_mcl = t.c_mc > 0.0 ? p_l(p, t.c_mc, 2).premium : detail::p_l_vanishing_capital(p);
    return t;
}

// Premium floors in the matrix follow the worst-case second period: the shared
// floor applies even below the net premium and shares come off the raw
// hyperbola (this is what the published matrices use).  The clamped variant
// instead floors prices at the net premium and caps demand.
enum class floor_convention { worst_case, clamped };

inline std::pair<double, double> second_period_payoffs(
    const market_params& p, double capital_row, double capital_col,
    floor_convention conv = floor_convention::worst_case) {
    p.validate();
    if (capital_row < 0.0 || capital_col < 0.0)
        throw std::domain_error("second_period_payoffs: capitals must be nonnegative");
    const double qk = p.net_premium();
    auto share = [&](double premium) {
        if (conv == floor_convention::clamped) return demand(p, premium);
        return p.alpha * p.alpha / (premium * premium);
    };
    auto floor_at = [&](double premium) {
        return conv == floor_convention::clamped ? std::max(qk, premium) : premium;
    };

    if (capital_row == 0.0 && capital_col == 0.0) return {0.0, 0.0};
    if (capital_col == 0.0) {
        const double prem = std::max(p_m(p), p_u(p, capital_row).premium);
        return {share(prem) * (prem - qk) - p.r * capital_row, 0.0};
    }
    if (capital_row == 0.0) {
        const double prem = std::max(p_m(p), p_u(p, capital_col).premium);
        return {0.0, share(prem) * (prem - qk) - p.r * capital_col};
    }
    if (capital_row == capital_col) {
        const double prem = floor_at(p_l(p, capital_row, 2).premium);
        const double half = share(prem) / 2.0;
        const double each = half * (prem - qk) - p.r * capital_row;
        return {each, each};
    }
    const double c_small = std::min(capital_row, capital_col);
    const double c_big = std::max(capital_row, capital_col);
    const double sp_l = p_l(p, c_small, 2).premium;
    const double hp_u = p_u(p, c_big).premium;
    if (sp_l <= hp_u) {
        // the small firm can hold the shared floor; both price there
        const double prem = floor_at(sp_l);
        const double half = share(prem) / 2.0;
        return {half * (prem - qk) - p.r * capital_row,
                half * (prem - qk) - p.r * capital_col};
    }
    // small firm's floor is out of reach: the large firm undercuts it and
    // keeps the whole market at its own floor
    const double prem = floor_at(hp_u);
    const double big_profit = share(prem) * (prem - qk) - p.r * c_big;
    if (capital_row == c_big) return {big_profit, -p.r * capital_col};
    return {-p.r * capital_row, big_profit};
}

struct payoff_matrix {
    std::vector<double> capital_levels;  // increasing, starts at 0
    std::vector<double> cells;           // row-major; row player's profit
    std::size_t size() const { return capital_levels.size(); }
    double at(std::size_t i, std::size_t j) const { return cells[i * size() + j]; }
};

inline payoff_matrix build_payoff_matrix(const market_params& p,
                                         const std::vector<double>& capital_levels,
                                         floor_convention conv = floor_convention::worst_case) {
    if (capital_levels.size() < 2 || capital_levels.front() != 0.0)
        throw std::invalid_argument("build_payoff_matrix: levels must start at 0");
    for (std::size_t i = 1; i < capital_levels.size(); ++i)
        if (capital_levels[i] <= capital_levels[i - 1])
            throw std::invalid_argument("build_payoff_matrix: levels must be strictly increasing");
    payoff_matrix m;
    m.capital_levels = capital_levels;
    const std::size_t n = capital_levels.size();
    m.cells.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.cells[i * n + j] =
                second_period_payoffs(p, capital_levels[i], capital_levels[j], conv).first;
    return m;
}

// {0} plus evenly spaced levels ending exactly at the break-even capital
inline std::vector<double> uniform_capital_grid(const market_params& p, std::size_t levels = 20) {
    if (levels < 2) throw std::invalid_argument("uniform_capital_grid: need at least two levels");
    const double top = thresholds(p).c_1z;
    std::vector<double> grid;
    grid.reserve(levels);
    for (std::size_t k = 0; k < levels; ++k)
        grid.push_back(top * static_cast<double>(k) / static_cast<double>(levels - 1));
    return grid;
}

enum class pure_ne_kind { monopoly_entry_ne, no_pure_ne_p2zl, no_pure_ne_p1zu };

struct pure_ne_result {
    pure_ne_kind kind;
    exante_thresholds marks;  // the witness premiums behind the call
};

inline pure_ne_result pure_ne_classification(const market_params& p) {
    const exante_thresholds t = thresholds(p);
    if (t.p_mc >= t.p_2zl) return {pure_ne_kind::no_pure_ne_p2zl, t};
    if (t.p_mcl >= t.p_1zu) return {pure_ne_kind::no_pure_ne_p1zu, t};
    return {pure_ne_kind::monopoly_entry_ne, t};
}

// founding-mix taxonomy: type 1 = both enter surely, type 2 = exactly one
// does, type 3 = both keep mass on staying out
enum class eq_type { type1, type2, type3 };

struct mixed_equilibrium {
    std::vector<double> strategy_row, strategy_col;
    double payoff_row = 0.0, payoff_col = 0.0;
    eq_type type = eq_type::type1;
};

inline eq_type classify_strategies(const std::vector<double>& strategy_row,
                                   const std::vector<double>& strategy_col,
                                   std::size_t zero_index, double tol = 1e-9) {
    const bool row_out = strategy_row.at(zero_index) > tol;
    const bool col_out = strategy_col.at(zero_index) > tol;
    if (row_out && col_out) return eq_type::type3;
    if (!row_out && !col_out) return eq_type::type1;
    return eq_type::type2;
}

}  // namespace insol
