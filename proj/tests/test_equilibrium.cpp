#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "insol/equilibrium.hpp"

using namespace insol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

market_params fig2_params() { return {0.1, 100.0, 110.0, 0.01}; }
market_params fig3_params() { return {0.2, 100.0, 90.0, 0.03}; }
market_params fig6c_params() { return {0.2, 100.0, 90.0, 0.03}; }
market_params table3_params() { return {0.05, 900.0, 90.0, 0.01}; }

// Bertrand allocation: lowest-price firms split demand at the low price.
double profile_payoff(const market_params& p, const std::vector<double>& premiums,
                      const std::vector<double>& capitals, std::size_t i) {
    double pmin = *std::min_element(premiums.begin(), premiums.end());
    std::size_t ties = 0;
    for (double pr : premiums) ties += pr <= pmin * (1.0 + 1e-12);
    bool lowest = premiums[i] <= pmin * (1.0 + 1e-12);
    double n_i = lowest ? demand(p, pmin) / static_cast<double>(ties) : 0.0;
    return expected_profit(p, capitals[i], premiums[i], n_i);
}

// Samples unilateral deviations for every firm; true if any one improves
// strictly on the profile payoff.
bool profitable_deviation_exists(const market_params& p, const std::vector<double>& premiums,
                                 const std::vector<double>& capitals) {
    std::mt19937 rng(4047);
    for (std::size_t i = 0; i < premiums.size(); ++i) {
        const double base = profile_payoff(p, premiums, capitals, i);
        const double tol = 1e-9 * std::max(1.0, std::fabs(base));
        std::vector<double> cand;
        for (double other : premiums) {
            cand.push_back(other);  // tie exactly
            for (double d : {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.3}) {
                cand.push_back(other * (1.0 - d));
                cand.push_back(other * (1.0 + d));
            }
        }
        std::uniform_real_distribution<double> u(0.5 * p.net_premium(), 3.0 * premiums[i]);
        while (cand.size() < 220) cand.push_back(u(rng));
        auto trial = premiums;
        for (double pr : cand) {
            if (!(pr > 0.0)) continue;
            trial[i] = pr;
            if (profile_payoff(p, trial, capitals, i) > base + tol) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("symmetric oligopoly: interval continuum", "[equilibrium]") {
    auto eq = symmetric_equilibrium(fig2_params(), 300.0, 5);
    REQUIRE(eq.kind == eq_kind::interval_continuum);
    REQUIRE(eq.interval.has_value());
    REQUIRE_THAT((*eq.interval)[0], WithinAbs(11.574, 1e-3));
    REQUIRE_THAT((*eq.interval)[1], WithinAbs(14.961, 1e-3));

    // adding firms only widens the continuum downward
    auto eq50 = symmetric_equilibrium(fig2_params(), 300.0, 50);
    REQUIRE(eq50.kind == eq_kind::interval_continuum);
    REQUIRE((*eq50.interval)[0] <= (*eq.interval)[0]);
}

TEST_CASE("symmetric duopoly at high capital clamps to net premium", "[equilibrium]") {
    auto eq = symmetric_equilibrium(table3_params(), 943.5, 2);
    REQUIRE(eq.kind == eq_kind::interval_continuum);
    REQUIRE_THAT((*eq.interval)[0], WithinRel(45.0, 1e-9));  // max(qK, P_L) = qK
    REQUIRE_THAT((*eq.interval)[1], WithinAbs(47.71, 0.01));
    REQUIRE(std::find(eq.notes.begin(), eq.notes.end(), "lower-endpoint-clamped-to-net-premium") != eq.notes.end());
}

TEST_CASE("symmetric regime boundaries", "[equilibrium]") {
    // abundant capital: requirement not binding, classic Bertrand at cost
    market_params rich{0.5, 100.0, 50.0, 0.0};
    auto eq = symmetric_equilibrium(rich, 10000.0, 3);
    REQUIRE(eq.kind == eq_kind::interval_continuum);
    REQUIRE((*eq.interval)[0] == (*eq.interval)[1]);
    REQUIRE_THAT((*eq.interval)[0], WithinRel(rich.net_premium(), 1e-12));
    REQUIRE(std::find(eq.notes.begin(), eq.notes.end(), "capital-requirement-non-binding") != eq.notes.end());

    // P_L > P_U with P_M below P_U: lone leader at the whole-market floor
    auto leader = symmetric_equilibrium(fig2_params(), 120.0, 2);
    REQUIRE(leader.kind == eq_kind::single_leader_continuous);
    REQUIRE_THAT(leader.assignments.at(0).premium, WithinAbs(20.12, 0.01));
    REQUIRE(leader.assignments.at(1).premium > leader.assignments.at(0).premium);

    // P_M above P_U too: nothing survives in continuous premiums
    auto none = symmetric_equilibrium(fig2_params(), 130.0, 2);
    REQUIRE(none.kind == eq_kind::none);
    REQUIRE(std::find(none.notes.begin(), none.notes.end(), "no-pure-NE-continuous") != none.notes.end());

    REQUIRE_THROWS_AS(symmetric_equilibrium(fig2_params(), 300.0, 1), std::domain_error);
    REQUIRE_THROWS_AS(symmetric_equilibrium(fig2_params(), 0.0, 2), std::domain_error);
}

TEST_CASE("comparative statics across firm counts", "[equilibrium]") {
    auto rows = comparative_statics_report(table3_params(), 900.0, 10);
    REQUIRE(rows.size() == 10);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].p_u_fixed == rows[0].p_u_fixed);       // P_U has no I
        REQUIRE(rows[i].p_l_fixed < rows[i - 1].p_l_fixed);    // more rivals, lower floor
        REQUIRE(rows[i].p_u_split > rows[i - 1].p_u_split);    // thinner capital, higher floor
        REQUIRE(rows[i].p_l_split > rows[i - 1].p_l_split);
    }
}

TEST_CASE("monopoly premium", "[equilibrium]") {
    REQUIRE_THAT(monopoly_premium(fig3_params(), 100.0), WithinAbs(46.54, 0.01));
    REQUIRE_THAT(monopoly_premium(table3_params(), 943.5), WithinRel(90.0, 1e-12));  // P_M wins
    REQUIRE_THAT(monopoly_premium(table3_params(), 1e9), WithinRel(90.0, 1e-12));
}

TEST_CASE("monopoly can undercut the duopoly floor", "[equilibrium]") {
    auto res = monopoly_vs_duopoly_check(fig3_params(), 100.0);
    REQUIRE(res.monopoly_cheaper);
    REQUIRE_THAT(res.monopoly_prem, WithinAbs(46.54, 0.05));
    REQUIRE_THAT(res.duopoly_floor, WithinAbs(72.49, 0.05));
    REQUIRE(res.monopoly_prem < res.duopoly_floor);

    REQUIRE_FALSE(monopoly_vs_duopoly_check(fig3_params(), 1e8).monopoly_cheaper);

    market_params non_binding{0.9, 10.0, 1.0, 0.0};
    REQUIRE_FALSE(monopoly_vs_duopoly_check(non_binding, 100.0).monopoly_cheaper);
}

TEST_CASE("asymmetric duopoly, decreasing branch (case I)", "[equilibrium]") {
    market_params p = fig2_params();

    SECTION("I/a: monopoly premium below the large firm's floor") {
        auto eq = asymmetric_duopoly(p, 80.0, 120.0);
        REQUIRE(eq.tag == regime_tag::case_ia);
        REQUIRE(eq.kind == eq_kind::asymmetric_split);
        REQUIRE_THAT(eq.assignments.at(0).premium, WithinAbs(20.12, 0.01));
        REQUIRE(eq.assignments.at(0).share == 1.0);
        REQUIRE(eq.assignments.at(1).premium > eq.assignments.at(0).premium);
    }

    SECTION("I/b: large firm parks at the monopoly premium") {
        auto eq = asymmetric_duopoly(p, 80.0, 150.0);
        REQUIRE(eq.tag == regime_tag::case_ib);
        REQUIRE(eq.kind == eq_kind::asymmetric_split);
        REQUIRE_THAT(eq.assignments.at(0).premium, WithinRel(20.0, 1e-12));

        premium_grid grid{{18.5, 19.0, 19.5, 20.0, 20.5}};
        auto ladder = asymmetric_duopoly(p, 80.0, 150.0, &grid);
        REQUIRE(ladder.kind == eq_kind::discrete_ladder);
        REQUIRE(ladder.ladder_pairs.size() == 3);  // 19.0/19.5, 19.5/20.0, 20.0/20.5
        REQUIRE(ladder.ladder_pairs.front().first == 19.0);
        REQUIRE(ladder.ladder_pairs.back().first == 20.0);
    }

    SECTION("I/c: no continuous equilibrium, ladder on a grid") {
        auto eq = asymmetric_duopoly(p, 130.0, 150.0);
        REQUIRE(eq.tag == regime_tag::case_ic);
        REQUIRE(eq.kind == eq_kind::none);

        premium_grid grid{{18.5, 19.0, 19.5, 20.0}};
        auto ladder = asymmetric_duopoly(p, 130.0, 150.0, &grid);
        REQUIRE(ladder.kind == eq_kind::discrete_ladder);
        REQUIRE(ladder.ladder_pairs.size() == 2);  // 19.0/19.5, 19.5/20.0
    }
}

TEST_CASE("asymmetric duopoly, increasing branch (case II)", "[equilibrium]") {
    SECTION("II/a: large firm takes the whole market") {
        auto eq = asymmetric_duopoly(table3_params(), 52.5, 102.0);
        REQUIRE(eq.tag == regime_tag::case_iia);
        REQUIRE(eq.kind == eq_kind::asymmetric_split);
        REQUIRE_THAT(eq.assignments.at(0).premium, WithinAbs(375.9, 0.05));
        REQUIRE(eq.assignments.at(0).share == 1.0);
    }

    SECTION("II/b: ladder only") {
        auto eq = asymmetric_duopoly(table3_params(), 600.0, 900.0);
        REQUIRE(eq.tag == regime_tag::case_iib);
        REQUIRE(eq.kind == eq_kind::none);

        premium_grid grid{{49.0, 50.0, 51.0, 52.0, 53.0}};
        auto ladder = asymmetric_duopoly(table3_params(), 600.0, 900.0, &grid);
        REQUIRE(ladder.kind == eq_kind::discrete_ladder);
        REQUIRE(ladder.ladder_pairs.size() == 3);  // 50/51, 51/52, 52/53
    }

    SECTION("II/c: continuum at a common premium") {
        auto eq = asymmetric_duopoly(fig6c_params(), 150.0, 160.0);
        REQUIRE(eq.tag == regime_tag::case_iic);
        REQUIRE(eq.kind == eq_kind::interval_continuum);
        REQUIRE_THAT((*eq.interval)[0], WithinAbs(33.05, 0.05));
        REQUIRE_THAT((*eq.interval)[1], WithinAbs(35.69, 0.05));
    }

    SECTION("mixed branches rejected") {
        REQUIRE_THROWS_AS(asymmetric_duopoly(fig2_params(), 80.0, 300.0), std::runtime_error);
    }
}

TEST_CASE("deviation-proofness of returned equilibria", "[equilibrium][property]") {
    market_params p = fig2_params();

    SECTION("symmetric continuum points are deviation-proof") {
        auto eq = symmetric_equilibrium(p, 300.0, 5);
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            double prem = (*eq.interval)[0] + t * ((*eq.interval)[1] - (*eq.interval)[0]);
            std::vector<double> prems(5, prem), caps(5, 300.0);
            REQUIRE_FALSE(profitable_deviation_exists(p, prems, caps));
        }
    }

    SECTION("premiums outside the continuum are not equilibria") {
        auto eq = symmetric_equilibrium(p, 300.0, 5);
        std::vector<double> caps(5, 300.0);
        std::vector<double> above(5, (*eq.interval)[1] * 1.01);
        REQUIRE(profitable_deviation_exists(p, above, caps));
    }

    SECTION("single leader profile is deviation-proof") {
        auto eq = symmetric_equilibrium(p, 120.0, 2);
        std::vector<double> prems{eq.assignments[0].premium, eq.assignments[0].premium * 1.02};
        std::vector<double> caps(2, 120.0);
        REQUIRE_FALSE(profitable_deviation_exists(p, prems, caps));
    }

    SECTION("case II/c common-premium points are deviation-proof") {
        auto eq = asymmetric_duopoly(fig6c_params(), 150.0, 160.0);
        for (double t : {0.0, 0.5, 1.0}) {
            double prem = (*eq.interval)[0] + t * ((*eq.interval)[1] - (*eq.interval)[0]);
            std::vector<double> prems(2, prem);
            std::vector<double> caps{150.0, 160.0};
            REQUIRE_FALSE(profitable_deviation_exists(fig6c_params(), prems, caps));
        }
        std::vector<double> caps{150.0, 160.0};
        std::vector<double> above(2, (*eq.interval)[1] * 1.02);
        REQUIRE(profitable_deviation_exists(fig6c_params(), above, caps));
    }

    SECTION("case II/a split is deviation-proof") {
        auto eq = asymmetric_duopoly(table3_params(), 52.5, 102.0);
        std::vector<double> prems{eq.assignments[1].premium, eq.assignments[0].premium};
        std::vector<double> caps{52.5, 102.0};  // small first
        REQUIRE_FALSE(profitable_deviation_exists(table3_params(), prems, caps));
    }
}

TEST_CASE("case II/c solvency along the interval", "[equilibrium][property]") {
    auto eq = asymmetric_duopoly(fig6c_params(), 150.0, 160.0);
    for (int k = 0; k <= 20; ++k) {
        double prem = (*eq.interval)[0] + k / 20.0 * ((*eq.interval)[1] - (*eq.interval)[0]);
        double half = demand(fig6c_params(), prem) / 2.0;
        REQUIRE(mcr(fig6c_params(), half, prem) <= 150.0 + 1e-7);
        REQUIRE(mcr(fig6c_params(), half, prem) <= 160.0 + 1e-7);
    }
}
