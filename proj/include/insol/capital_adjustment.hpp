#pragma once

// Ex-post capital adjustment: once premiums are set, a firm whose solvency
// requirement overshoots its capital can top it up at cost B + r*dC.  This
// module locates the premium at which topping up just breaks even (the
// demand / zero-profit / MPR triple intersection) and classifies the
// resulting premium game.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "insol/equilibrium.hpp"
#include "insol/market.hpp"

namespace insol {

enum class expost_regime { no_adjustment, no_pure_ne_continuous, discrete_leader_ne };

struct adjustment_outcome {
    std::optional<double> p_1z;            // absent = break-even premium is unbounded
    std::optional<double> delta_c_at_p1z;  // capital raise at the triple intersection
    expost_regime regime = expost_regime::no_adjustment;
    std::optional<double> leader_premium;  // discrete mode only
    std::vector<std::string> notes;
};

// zero-profit locus of a firm that raised capital by delta_c: n = (B + r*dC)/(P - qK)
inline double zp_curve(const market_params& p, double delta_c, double premium) {
    p.validate();
    if (delta_c < 0.0) throw std::domain_error("zp_curve: delta_c must be nonnegative");
    if (premium <= p.net_premium())
        throw std::domain_error("zp_curve: premium must exceed the net premium");
    return (p.adjust_cost_B + p.r * delta_c) / (premium - p.net_premium());
}

inline curve_point zp_mpr_intersection(const market_params& p, double capital, double delta_c) {
    p.validate();
    if (capital <= 0.0) throw std::domain_error("zp_mpr_intersection: capital must be positive");
    if (delta_c < 0.0) throw std::domain_error("zp_mpr_intersection: delta_c must be nonnegative");
    const double root_n = (p.adjust_cost_B + capital + (1.0 + p.r) * delta_c) / p.sigma();
    const double n = root_n * root_n;
    const double premium = p.net_premium() + (p.adjust_cost_B + p.r * delta_c) / n;
    return {premium, n};
}

// profit including the sunk holding cost r*C; the top-up fee B + r*(MCR - C)
// kicks in only once the requirement overshoots, so the function jumps by B there
inline double adjusted_profit(const market_params& p, double capital, double premium, double n) {
    p.validate();
    if (n < 0.0) throw std::domain_error("adjusted_profit: negative exposure");
    double value = n * (premium - p.net_premium()) - p.r * capital;
    const double req = mcr(p, n, premium);
    if (req > capital) value -= p.adjust_cost_B + p.r * (req - capital);
    return value;
}

inline adjustment_outcome solve_p1z(const market_params& p, double capital) {
    p.validate();
    if (capital <= 0.0) throw std::domain_error("solve_p1z: capital must be positive");
    adjustment_outcome out;

    // substitute the ZP/MPR intersection into the demand hyperbola; since both
    // sqrt(n) and P are positive this collapses to a quadratic in delta_c
    const double qk = p.net_premium();
    const double s = p.sigma();
    const double u = p.adjust_cost_B + capital;
    const double v = 1.0 + p.r;
    const double a2 = qk * v * v / (s * s);
    const double a1 = 2.0 * qk * u * v / (s * s) + p.r - p.alpha * v / s;
    const double a0 = qk * u * u / (s * s) + p.adjust_cost_B - p.alpha * u / s;
    const double disc = a1 * a1 - 4.0 * a2 * a0;

    std::optional<double> root;
    if (std::fabs(disc) <= 1e-10 * std::max(1.0, a1 * a1)) {
        const double r0 = -a1 / (2.0 * a2);
        if (r0 >= 0.0) {
            root = r0;
            out.notes.push_back("tangency-treated-as-single-root");
        }
    } else if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double w = -0.5 * (a1 + std::copysign(sq, a1 == 0.0 ? 1.0 : a1));
        double r1 = w / a2;
        double r2 = a0 / w;
        if (r1 > r2) std::swap(r1, r2);
        if (r1 >= 0.0) {
            root = r1;
            if (r2 >= 0.0) out.notes.push_back("two-nonnegative-roots-smaller-taken");
        } else if (r2 >= 0.0) {
            root = r2;
        }
    }
    if (!root) return out;

    // cross-check the algebra with a bisection on the raw crossing condition
    auto gap = [&](double dc) {
        const curve_point pt = zp_mpr_intersection(p, capital, dc);
        return pt.n - p.alpha * p.alpha / (pt.premium * pt.premium);
    };
    const double width = std::max(1.0, *root);
    double lo = std::max(0.0, *root - width);
    double hi = *root + width;
    if (gap(lo) * gap(hi) < 0.0) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (gap(lo) * gap(mid) <= 0.0 ? hi : lo) = mid;
        }
        const double bis = 0.5 * (lo + hi);
        if (std::fabs(bis - *root) > 1e-7 * std::max(1.0, std::fabs(*root)))
            out.notes.push_back("quadratic-bisection-mismatch");
    }

    out.delta_c_at_p1z = *root;
    out.p_1z = zp_mpr_intersection(p, capital, *root).premium;
    return out;
}

// Prop-style classification: adjustment is irrelevant while the break-even
// premium sits above the solvency floors; below them the continuous game has
// no pure equilibrium, and on a grid a single leader serves the whole market.
inline adjustment_outcome expost_equilibrium(const market_params& p, double capital, int firms,
                                             const premium_grid* grid = nullptr) {
    if (firms < 2) throw std::domain_error("expost_equilibrium: need at least two firms");
    adjustment_outcome out = solve_p1z(p, capital);
    const double floor_whole = p_u(p, capital).premium;
    const double floor_split = p_l(p, capital, static_cast<unsigned>(firms)).premium;
    const double threshold = std::min(floor_whole, floor_split);
    if (!out.p_1z || *out.p_1z >= threshold * (1.0 - strict_eps)) {
        out.regime = expost_regime::no_adjustment;
        return out;
    }
    if (grid == nullptr) {
        out.regime = expost_regime::no_pure_ne_continuous;
        return out;
    }
    grid->validate();
    std::size_t lead = grid->premiums.size();
    for (std::size_t i = 0; i < grid->premiums.size(); ++i) {
        if (grid->premiums[i] >= *out.p_1z) {
            lead = i;
            break;
        }
    }
    if (lead + 1 >= grid->premiums.size())
        throw std::invalid_argument(
            "expost_equilibrium: grid must contain p_1z and a rival premium above it");
    out.regime = expost_regime::discrete_leader_ne;
    out.leader_premium = grid->premiums[lead];
    return out;
}

}  // namespace insol
