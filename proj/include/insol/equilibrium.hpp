// Nash-equilibrium characterization for firms with fixed capital: symmetric
// oligopoly continua, comparative statics, monopoly comparison, and the
// two-firm asymmetric-capital taxonomy (cases I/a..II/c).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "insol/market.hpp"

namespace insol {

enum class eq_kind {
    interval_continuum,
    single_leader_continuous,
    discrete_ladder,
    asymmetric_split,
    none,
};

enum class regime_tag {
    symmetric,
    case_ia,
    case_ib,
    case_ic,
    case_iia,
    case_iib,
    case_iic,
};

struct firm_assignment {
    double premium;
    double share;  // fraction of demand served at that premium
};

// Relative epsilon used to represent "strictly above" witnesses for open-set
// equilibria in continuous mode.
inline constexpr double strict_eps = 1e-9;

struct equilibrium_set {
    eq_kind kind = eq_kind::none;
    std::optional<std::array<double, 2>> interval;  // present iff interval_continuum
    std::vector<firm_assignment> assignments;       // representative premiums/shares
    regime_tag tag = regime_tag::symmetric;
    // Discrete mode: all adjacent grid pairs (leader premium, follower premium)
    // that survive the undercut/deterrence provisos.
    std::vector<std::pair<double, double>> ladder_pairs;
    std::vector<std::string> notes;
};

struct premium_grid {
    std::vector<double> premiums;

    void validate() const {
        if (premiums.empty()) throw std::invalid_argument("premium_grid: empty");
        for (std::size_t i = 0; i < premiums.size(); ++i) {
            if (!(premiums[i] > 0.0)) throw std::invalid_argument("premium_grid: premiums must be positive");
            if (i && !(premiums[i] > premiums[i - 1]))
                throw std::invalid_argument("premium_grid: premiums must be strictly increasing");
        }
    }
};

// Symmetric oligopoly with I identical firms at capital C each.
inline equilibrium_set symmetric_equilibrium(const market_params& p, double capital, unsigned firms) {
    if (!(capital > 0.0)) throw std::domain_error("symmetric_equilibrium: capital must be positive");
    if (firms < 2) throw std::domain_error("symmetric_equilibrium: needs at least two firms");
    const double qk = p.net_premium();
    const double pu = p_u(p, capital).premium;
    const double pl = p_l(p, capital, firms).premium;
    const double pm = p_m(p);

    equilibrium_set out;
    out.tag = regime_tag::symmetric;
    if (pu <= qk) {
        // so much capital that even whole-market pricing at net premium is
        // solvent: ordinary Bertrand competition to marginal cost
        out.kind = eq_kind::interval_continuum;
        out.interval = {{qk, qk}};
        out.notes.push_back("capital-requirement-non-binding");
        return out;
    }
    if (pl <= pu) {
        out.kind = eq_kind::interval_continuum;
        out.interval = {{std::max(qk, pl), pu}};
        if (pl < qk) out.notes.push_back("lower-endpoint-clamped-to-net-premium");
        return out;
    }
    if (pm <= pu) {
        // one firm alone at the whole-market floor, the rest strictly above
        out.kind = eq_kind::single_leader_continuous;
        out.assignments.push_back({pu, 1.0});
        for (unsigned i = 1; i < firms; ++i) out.assignments.push_back({pu * (1.0 + strict_eps), 0.0});
        out.notes.push_back("followers-strictly-above");
        return out;
    }
    out.kind = eq_kind::none;
    out.notes.push_back("no-pure-NE-continuous");
    out.notes.push_back("discrete-grid-variant-available");
    return out;
}

struct statics_row {
    unsigned firms;
    double p_u_fixed;   // per-firm capital held fixed
    double p_l_fixed;
    double p_u_split;   // total capital split across firms
    double p_l_split;
};

// P_U / P_L across firm counts, holding either per-firm or total capital fixed.
inline std::vector<statics_row> comparative_statics_report(const market_params& p, double capital,
                                                           unsigned max_firms) {
    if (!(capital > 0.0)) throw std::domain_error("comparative_statics_report: capital must be positive");
    if (max_firms < 1) throw std::domain_error("comparative_statics_report: max_firms must be >= 1");
    std::vector<statics_row> rows;
    rows.reserve(max_firms);
    for (unsigned i = 1; i <= max_firms; ++i) {
        const double split = capital / static_cast<double>(i);
        rows.push_back({i, p_u(p, capital).premium, p_l(p, capital, i).premium,
                        p_u(p, split).premium, p_l(p, split, i).premium});
    }
    return rows;
}

inline double monopoly_premium(const market_params& p, double capital) {
    if (!(capital > 0.0)) throw std::domain_error("monopoly_premium: capital must be positive");
    return std::max(p_u(p, capital).premium, p_m(p));
}

struct monopoly_duopoly_result {
    bool monopoly_cheaper;
    double monopoly_prem;  // max(P_1, P_M) for the whole capital
    double duopoly_floor;  // P_L with the capital split between two firms
};

// Does a monopolist holding all capital price below any equal-split duopoly?
inline monopoly_duopoly_result monopoly_vs_duopoly_check(const market_params& p, double total_capital) {
    if (!(total_capital > 0.0)) throw std::domain_error("monopoly_vs_duopoly_check: capital must be positive");
    const double floor2 = p_l(p, total_capital / 2.0, 2).premium;
    const bool holds = p.net_premium() < floor2 && p_m(p) < floor2;
    return {holds, monopoly_premium(p, total_capital), floor2};
}

namespace detail {

// Deterrence proviso for a discrete leader/follower pair: serving the whole
// market at the lower premium must beat a half share one grid step up,
// and must not be worse than staying out of the market.
inline bool ladder_pair_viable(const market_params& p, double lower, double upper) {
    const double whole = demand(p, lower) * (lower - p.net_premium());
    const double half = demand(p, upper) / 2.0 * (upper - p.net_premium());
    return whole >= half && whole >= 0.0;
}

inline void collect_ladder(const market_params& p, const premium_grid& grid, double lo, double hi,
                           bool hi_strict, equilibrium_set& out) {
    const auto& g = grid.premiums;
    for (std::size_t j = 0; j + 1 < g.size(); ++j) {
        if (g[j] < lo) continue;
        if (hi_strict ? g[j] >= hi : g[j] > hi) break;
        if (!ladder_pair_viable(p, g[j], g[j + 1])) {
            out.notes.push_back("pair-dropped-grid-too-coarse");
            continue;
        }
        out.ladder_pairs.emplace_back(g[j], g[j + 1]);
    }
}

}  // namespace detail

// Two firms with different capital. capital_small <= capital_high. The paper's
// taxonomy covers both intersections on the same MPR branch only; anything
// else is rejected rather than guessed.
inline equilibrium_set asymmetric_duopoly(const market_params& p, double capital_small,
                                          double capital_high, const premium_grid* grid = nullptr) {
    if (!(capital_small > 0.0) || !(capital_small <= capital_high))
        throw std::domain_error("asymmetric_duopoly: need 0 < capital_small <= capital_high");
    if (grid) grid->validate();

    const branch bs = branch_of_intersection(p, capital_small, 1);
    const branch bh = branch_of_intersection(p, capital_high, 1);
    if (bs != bh)
        throw std::runtime_error("asymmetric_duopoly: mixed-branch configuration outside paper taxonomy");

    const double qk = p.net_premium();
    const double pm = p_m(p);
    const double hpu = p_u(p, capital_high).premium;  // large firm's whole-market floor
    const double spu = p_u(p, capital_small).premium;
    const double spl = p_l(p, capital_small, 2).premium;  // small firm's half-market floor

    equilibrium_set out;
    if (bs == branch::decreasing) {
        // Case I: P_U < P_L for each firm, undercutting is blocked by the
        // small firm's own whole-market floor spu.
        if (pm <= hpu) {
            out.kind = eq_kind::asymmetric_split;
            out.tag = regime_tag::case_ia;
            out.assignments.push_back({hpu, 1.0});
            out.assignments.push_back({hpu * (1.0 + strict_eps), 0.0});
            out.notes.push_back("single-pure-NE");
            return out;
        }
        const bool sub_b = pm <= spu;
        out.tag = sub_b ? regime_tag::case_ib : regime_tag::case_ic;
        if (!grid) {
            if (sub_b) {
                out.kind = eq_kind::asymmetric_split;
                out.assignments.push_back({pm, 1.0});
                out.assignments.push_back({pm * (1.0 + strict_eps), 0.0});
                out.notes.push_back("large-at-monopoly-premium");
            } else {
                out.kind = eq_kind::none;
                out.notes.push_back("no-pure-NE-continuous");
            }
            return out;
        }
        out.kind = eq_kind::discrete_ladder;
        detail::collect_ladder(p, *grid, hpu, std::min(pm, spu), false, out);
        if (out.ladder_pairs.empty()) out.notes.push_back("no-viable-grid-pair");
        return out;
    }

    // Case II: increasing branch, P_L < P_U per firm; shared floor must exceed
    // the net premium for the taxonomy to apply.
    if (!(qk < spl))
        throw std::runtime_error("asymmetric_duopoly: shared floor at/below net premium, outside paper taxonomy");
    if (spl <= hpu) {
        out.kind = eq_kind::interval_continuum;
        out.tag = regime_tag::case_iic;
        out.interval = {{spl, hpu}};
        out.assignments.push_back({spl, 0.5});
        out.assignments.push_back({spl, 0.5});
        out.notes.push_back("both-at-any-common-premium-in-interval");
        return out;
    }
    if (pm < spl) {
        out.kind = eq_kind::asymmetric_split;
        out.tag = regime_tag::case_iia;
        const double lead = std::max(hpu, pm);
        out.assignments.push_back({lead, 1.0});
        out.assignments.push_back({lead * (1.0 + strict_eps), 0.0});
        out.notes.push_back("small-cannot-undercut-solvently");
        return out;
    }
    out.tag = regime_tag::case_iib;
    if (!grid) {
        out.kind = eq_kind::none;
        out.notes.push_back("no-pure-NE-continuous");
        return out;
    }
    out.kind = eq_kind::discrete_ladder;
    detail::collect_ladder(p, *grid, hpu, spl, true, out);
    if (out.ladder_pairs.empty()) out.notes.push_back("no-viable-grid-pair");
    return out;
}

}  // namespace insol
