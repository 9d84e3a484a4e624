// Closed-form market primitives: demand, solvency capital/premium requirements
// (MCR/MPR), their intersections with demand, and expected profit.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace insol {

// 99.5% standard-normal quantile used by the solvency constraint.
inline constexpr double default_phi = 2.5758293035489004;

struct market_params {
    double q;      // claim probability per policy, 0 < q < 1
    double K;      // loss size per claim, > 0
    double alpha;  // demand scale, > 0
    double r = 0.0;          // interest on held capital
    double phi = default_phi;
    // Regulatory penalty for operating below MCR. Empty means "dominates any
    // achievable profit": comparisons treat the penalized payoff as -inf.
    std::optional<double> penalty_A{};
    double adjust_cost_B = 0.0;  // fixed cost of an ex-post capital raise

    void validate() const {
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
        if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
        if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
        if (!(r >= 0.0)) throw std::invalid_argument("r must be nonnegative");
        if (!(phi > 0.0)) throw std::invalid_argument("phi must be positive");
        if (penalty_A && !(*penalty_A >= 0.0)) throw std::invalid_argument("penalty_A must be nonnegative");
        if (!(adjust_cost_B >= 0.0)) throw std::invalid_argument("adjust_cost_B must be nonnegative");
    }

    double net_premium() const { return q * K; }
    // sigma = phi * sqrt(q(1-q)) * K, the one-policy normal risk margin scale.
    double sigma() const { return phi * std::sqrt(q * (1.0 - q)) * K; }
};

struct curve_point {
    double premium;
    double n;
};

// Demand D(P) = alpha^2 / P^2, capped at its maximum for P at/below net premium.
inline double n_max(const market_params& p) {
    const double qk = p.net_premium();
    return p.alpha * p.alpha / (qk * qk);
}

inline double demand(const market_params& p, double premium) {
    if (!(premium > 0.0)) throw std::domain_error("demand: premium must be positive");
    if (premium <= p.net_premium()) return n_max(p);
    return p.alpha * p.alpha / (premium * premium);
}

inline double inverse_demand(const market_params& p, double n) {
    if (!(n > 0.0)) throw std::domain_error("inverse_demand: n must be positive");
    if (n > n_max(p) * (1.0 + 1e-12)) throw std::domain_error("inverse_demand: n above demand maximum");
    return p.alpha / std::sqrt(n);
}

// Minimum capital requirement for writing n policies at premium P.
// May be negative: a large book at high premium finances itself.
inline double mcr(const market_params& p, double n, double premium) {
    if (n < 0.0) throw std::domain_error("mcr: n must be nonnegative");
    return n * (p.net_premium() - premium) + std::sqrt(n) * p.sigma();
}

struct mpr_value {
    double premium;
    bool above_loss_size;  // premium > K is economically meaningless
};

// Minimum premium requirement: lowest solvent premium for (n, C).
inline mpr_value mpr(const market_params& p, double n, double capital) {
    if (!(n > 0.0)) throw std::domain_error("mpr: n must be positive");
    const double v = p.net_premium() - capital / n + p.sigma() / std::sqrt(n);
    return {v, v > p.K};
}

// Interior maximum of the MPR curve.
inline curve_point mpr_max(const market_params& p, double capital) {
    if (!(capital > 0.0)) throw std::domain_error("mpr_max: capital must be positive");
    const double s = p.sigma();
    const double n_star = 4.0 * capital * capital / (s * s);
    const double p_star = p.net_premium() + s * s / (4.0 * capital);
    return {p_star, n_star};
}

struct intersection_point {
    double premium;
    double n;
};

namespace detail {
// Intersection of the (scaled) inverse demand a/sqrt(n) with the MPR curve:
// positive root of the quadratic from Appendix-style substitution,
//   P = 2 a qK / (-E + sqrt(E^2 + 4 qK C)),  E = sigma - a.
inline intersection_point demand_mpr_intersection(const market_params& p, double capital, double a) {
    const double qk = p.net_premium();
    const double e = p.sigma() - a;
    const double disc = e * e + 4.0 * qk * capital;
    const double denom = -e + std::sqrt(disc);
    const double premium = 2.0 * a * qk / denom;
    const double n = a * a / (premium * premium);
    return {premium, n};
}
}  // namespace detail

// Premium (and policy count) where full demand meets the MPR curve: the lowest
// premium at which one firm can solvently serve the whole market.
inline intersection_point p_u(const market_params& p, double capital) {
    if (!(capital > 0.0)) throw std::domain_error("p_u: capital must be positive");
    return detail::demand_mpr_intersection(p, capital, p.alpha);
}

// Same intersection against a 1/I share of demand (alpha -> alpha/sqrt(I)).
inline intersection_point p_l(const market_params& p, double capital, unsigned firms) {
    if (!(capital > 0.0)) throw std::domain_error("p_l: capital must be positive");
    if (firms < 1) throw std::domain_error("p_l: firms must be >= 1");
    return detail::demand_mpr_intersection(p, capital, p.alpha / std::sqrt(static_cast<double>(firms)));
}

// Unconstrained technical-result maximizer.
inline double p_m(const market_params& p) { return 2.0 * p.net_premium(); }

enum class branch { increasing, decreasing };

// Which side of the MPR maximum the (1/I-share) demand intersection lands on.
inline branch branch_of_intersection(const market_params& p, double capital, unsigned firms = 1) {
    if (!(capital > 0.0)) throw std::domain_error("branch_of_intersection: capital must be positive");
    const double a = p.alpha / std::sqrt(static_cast<double>(firms));
    const double n_int = detail::demand_mpr_intersection(p, capital, a).n;
    const double n_star = mpr_max(p, capital).n;
    return n_int < n_star ? branch::increasing : branch::decreasing;
}

inline double technical_result(const market_params& p, double premium, double n) {
    return n * (premium - p.net_premium());
}

// Expected profit with the solvency penalty applied when capital is short.
// With no finite penalty_A configured the penalized payoff is -inf (the
// penalty dominates by assumption; no arithmetic on A is meaningful then).
inline double expected_profit(const market_params& p, double capital, double premium, double n,
                              bool capital_ok) {
    const double base = technical_result(p, premium, n) - p.r * capital;
    if (capital_ok) return base;
    if (p.penalty_A) return base - *p.penalty_A;
    return -std::numeric_limits<double>::infinity();
}

inline double expected_profit(const market_params& p, double capital, double premium, double n) {
    if (n < 0.0) throw std::domain_error("expected_profit: n must be nonnegative");
    // tolerant comparison: prices at P_U / P_L sit exactly on the MCR boundary
    const double slack = 1e-9 * std::max(1.0, std::fabs(capital));
    const bool ok = mcr(p, n, premium) <= capital + slack;
    return expected_profit(p, capital, premium, n, ok);
}

// Profit when pricing exactly at MPR(n, C): -(1+r)C + sqrt(n) sigma.
// Strictly increasing in n, which is what makes undercutting races stop
// only at demand-curve intersections.
inline double profit_along_mpr(const market_params& p, double capital, double n) {
    if (!(n > 0.0)) throw std::domain_error("profit_along_mpr: n must be positive");
    if (!(capital > 0.0)) throw std::domain_error("profit_along_mpr: capital must be positive");
    return -(1.0 + p.r) * capital + std::sqrt(n) * p.sigma();
}

}  // namespace insol
