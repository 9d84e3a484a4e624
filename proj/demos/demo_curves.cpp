// Walkthrough of the core objects on one worked market: demand and minimum
// premium curves, the premium interval competition can sustain, founding
// thresholds, and the ex-post capital top-up point.  Prints plain text tables
// to stdout; build and run with no arguments.

#include <insol/capital_adjustment.hpp>
#include <insol/equilibrium.hpp>
#include <insol/exante.hpp>
#include <insol/market.hpp>

#include <cstdio>
#include <exception>

using namespace insol;

int main() {
    try {
        market_params p{0.1, 100.0, 110.0, 0.01};
        const double capital = 300.0;

        std::printf("market: q=%g K=%g alpha=%g r=%g  (net premium %g, sigma %g)\n\n",
                    p.q, p.K, p.alpha, p.r, p.net_premium(), p.sigma());

        // demand hyperbola vs the premium each book size needs to stay solvent
        std::printf("%10s %16s %16s %16s\n", "n", "demand premium", "min premium",
                    "zero-profit");
        for (double n : {5.0, 10.0, 20.0, 40.0, 80.0}) {
            std::printf("%10.0f %16.4f %16.4f %16.4f\n", n, inverse_demand(p, n),
                        mpr(p, n, capital).premium, p.net_premium() + p.r * capital / n);
        }

        // premiums a symmetric oligopoly with this capital can sustain
        for (unsigned firms : {2u, 5u}) {
            const auto eq = symmetric_equilibrium(p, capital, firms);
            if (eq.kind == eq_kind::interval_continuum && eq.interval)
                std::printf("\n%u firms, C=%g each: equilibrium premiums [%.4f, %.4f]\n",
                            firms, capital, (*eq.interval)[0], (*eq.interval)[1]);
        }

        // founding thresholds for this market
        const auto th = thresholds(p);
        std::printf("\nfounding thresholds: c_mc=%.4f (monopoly) c_1z=%.4f (break-even)\n"
                    "premium marks: p_mc=%.4f p_1zu=%.4f p_1zl=%.4f p_2zl=%.4f\n",
                    th.c_mc, th.c_1z, th.p_mc, th.p_1zu, th.p_1zl, th.p_2zl);

        // cheapest capital raise that restores zero profit at full demand
        market_params pb = p;
        pb.adjust_cost_B = 5.0;
        const auto adj = solve_p1z(pb, capital);
        if (adj.p_1z)
            std::printf("\ntop-up (B=%g): raise %.4f of fresh capital, premium %.4f\n",
                        pb.adjust_cost_B, *adj.delta_c_at_p1z, *adj.p_1z);

        // concentrated entry can undercut a split market with the same capital
        const market_params pm{0.2, 100.0, 90.0, 0.03};
        const auto cmp = monopoly_vs_duopoly_check(pm, 100.0);
        std::printf("\nsame total capital, q=%g K=%g alpha=%g r=%g: monopoly %.2f %s "
                    "duopoly floor %.2f\n",
                    pm.q, pm.K, pm.alpha, pm.r, cmp.monopoly_prem,
                    cmp.monopoly_cheaper ? "<" : ">=", cmp.duopoly_floor);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
