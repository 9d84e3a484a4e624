#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "insol/bimatrix.hpp"
#include "insol/exante.hpp"

using namespace insol;
using Catch::Matchers::WithinAbs;

namespace {

market_params table3_params() { return {0.05, 900.0, 90.0, 0.01}; }
market_params table4_params() { return {0.025, 600.0, 150.0, 0.2}; }

std::vector<double> table3_levels() {
    std::vector<double> lv{0.0};
    for (int k = 0; k < 19; ++k) lv.push_back(52.5 + 49.5 * k);
    return lv;
}

bimatrix_game small_game(std::size_t m, std::size_t n, std::vector<double> a,
                         std::vector<double> b) {
    bimatrix_game g;
    g.rows = m;
    g.cols = n;
    g.payoff_row = std::move(a);
    g.payoff_col = std::move(b);
    return g;
}

// direct best-response check on the raw (unscaled) matrices
bool raw_certificate(const bimatrix_game& g, const mixed_equilibrium& eq, double tol) {
    double val_r = 0.0, best_r = -1e300;
    for (std::size_t i = 0; i < g.rows; ++i) {
        double a = 0.0;
        for (std::size_t j = 0; j < g.cols; ++j) a += g.at_row(i, j) * eq.strategy_col[j];
        best_r = std::max(best_r, a);
        val_r += eq.strategy_row[i] * a;
    }
    if (best_r - val_r > tol) return false;
    double val_c = 0.0, best_c = -1e300;
    for (std::size_t j = 0; j < g.cols; ++j) {
        double b = 0.0;
        for (std::size_t i = 0; i < g.rows; ++i) b += g.at_col(i, j) * eq.strategy_row[i];
        best_c = std::max(best_c, b);
        val_c += eq.strategy_col[j] * b;
    }
    return best_c - val_c <= tol;
}

bool same_point(const mixed_equilibrium& a, const mixed_equilibrium& b, double tol) {
    for (std::size_t k = 0; k < a.strategy_row.size(); ++k)
        if (std::fabs(a.strategy_row[k] - b.strategy_row[k]) > tol) return false;
    for (std::size_t k = 0; k < a.strategy_col.size(); ++k)
        if (std::fabs(a.strategy_col[k] - b.strategy_col[k]) > tol) return false;
    return true;
}

bool lin_solve(std::vector<std::vector<double>> a, std::vector<double>& b) {
    const int n = static_cast<int>(a.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (std::fabs(a[piv][c]) < 1e-12) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            if (f == 0.0) continue;
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (int c = 0; c < n; ++c) b[c] /= a[c][c];
    return true;
}

// equal-size support enumeration; complete for generic (nondegenerate) games
std::vector<mixed_equilibrium> brute_equilibria(const bimatrix_game& g) {
    const int m = static_cast<int>(g.rows), n = static_cast<int>(g.cols);
    std::vector<mixed_equilibrium> found;
    for (int mr = 1; mr < (1 << m); ++mr) {
        for (int mc = 1; mc < (1 << n); ++mc) {
            std::vector<int> sr, sc;
            for (int i = 0; i < m; ++i)
                if (mr & (1 << i)) sr.push_back(i);
            for (int j = 0; j < n; ++j)
                if (mc & (1 << j)) sc.push_back(j);
            if (sr.size() != sc.size()) continue;
            const int k = static_cast<int>(sr.size());

            // y on sc and the row value u from row indifference
            std::vector<std::vector<double>> ay(k + 1, std::vector<double>(k + 1, 0.0));
            std::vector<double> by(k + 1, 0.0);
            for (int r = 0; r < k; ++r) {
                for (int c = 0; c < k; ++c) ay[r][c] = g.at_row(sr[r], sc[c]);
                ay[r][k] = -1.0;
            }
            for (int c = 0; c < k; ++c) ay[k][c] = 1.0;
            by[k] = 1.0;
            if (!lin_solve(ay, by)) continue;

            std::vector<std::vector<double>> ax(k + 1, std::vector<double>(k + 1, 0.0));
            std::vector<double> bx(k + 1, 0.0);
            for (int c = 0; c < k; ++c) {
                for (int r = 0; r < k; ++r) ax[c][r] = g.at_col(sr[r], sc[c]);
                ax[c][k] = -1.0;
            }
            for (int r = 0; r < k; ++r) ax[k][r] = 1.0;
            bx[k] = 1.0;
            if (!lin_solve(ax, bx)) continue;

            bool ok = true;
            for (int t = 0; t < k; ++t)
                if (by[t] < -1e-9 || bx[t] < -1e-9) ok = false;
            if (!ok) continue;

            mixed_equilibrium eq;
            eq.strategy_row.assign(m, 0.0);
            eq.strategy_col.assign(n, 0.0);
            double sx = 0.0, sy = 0.0;
            for (int t = 0; t < k; ++t) {
                eq.strategy_row[sr[t]] = std::max(0.0, bx[t]);
                eq.strategy_col[sc[t]] = std::max(0.0, by[t]);
                sx += eq.strategy_row[sr[t]];
                sy += eq.strategy_col[sc[t]];
            }
            for (auto& v : eq.strategy_row) v /= sx;
            for (auto& v : eq.strategy_col) v /= sy;
            if (!raw_certificate(g, eq, 1e-7)) continue;
            bool dup = false;
            for (auto& f : found)
                if (same_point(eq, f, 1e-6)) dup = true;
            if (dup) continue;
            for (std::size_t i = 0; i < g.rows; ++i)
                for (std::size_t j = 0; j < g.cols; ++j) {
                    eq.payoff_row += eq.strategy_row[i] * g.at_row(i, j) * eq.strategy_col[j];
                    eq.payoff_col += eq.strategy_row[i] * g.at_col(i, j) * eq.strategy_col[j];
                }
            found.push_back(std::move(eq));
        }
    }
    return found;
}

}  // namespace

TEST_CASE("matching pennies has the unique uniform equilibrium") {
    auto g = small_game(2, 2, {1, -1, -1, 1}, {-1, 1, 1, -1});
    auto rep = enumerate_equilibria(g);
    REQUIRE(rep.equilibria.size() == 1);
    const auto& eq = rep.equilibria.front();
    REQUIRE_THAT(eq.strategy_row[0], WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(eq.strategy_row[1], WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(eq.strategy_col[0], WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(eq.payoff_row, WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(eq.payoff_col, WithinAbs(0.0, 1e-9));
    REQUIRE(rep.nodes > 0);
    REQUIRE(rep.lp_calls >= rep.nodes);
}

TEST_CASE("prisoners dilemma has the single defect-defect equilibrium") {
    auto g = small_game(2, 2, {3, 0, 5, 1}, {3, 5, 0, 1});
    auto rep = enumerate_equilibria(g);
    REQUIRE(rep.equilibria.size() == 1);
    const auto& eq = rep.equilibria.front();
    REQUIRE_THAT(eq.strategy_row[1], WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(eq.strategy_col[1], WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(eq.payoff_row, WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(eq.payoff_col, WithinAbs(1.0, 1e-9));
}

TEST_CASE("battle of the sexes yields two pure and one mixed equilibrium in order") {
    auto g = small_game(2, 2, {2, 0, 0, 1}, {1, 0, 0, 2});
    auto rep = enumerate_equilibria(g);
    REQUIRE(rep.equilibria.size() == 3);
    // sorted by row support: {0}, {0,1}, {1}
    REQUIRE_THAT(rep.equilibria[0].strategy_row[0], WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(rep.equilibria[0].payoff_row, WithinAbs(2.0, 1e-9));
    REQUIRE_THAT(rep.equilibria[0].payoff_col, WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(rep.equilibria[1].strategy_row[0], WithinAbs(2.0 / 3.0, 1e-7));
    REQUIRE_THAT(rep.equilibria[1].strategy_col[0], WithinAbs(1.0 / 3.0, 1e-7));
    REQUIRE_THAT(rep.equilibria[1].payoff_row, WithinAbs(2.0 / 3.0, 1e-7));
    REQUIRE_THAT(rep.equilibria[2].strategy_row[1], WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(rep.equilibria[2].payoff_col, WithinAbs(2.0, 1e-9));
}

TEST_CASE("random 3x3 games match the support-enumeration oracle") {
    std::mt19937 rng(923);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(9), b(9);
        for (auto& v : a) v = unif(rng);
        for (auto& v : b) v = unif(rng);
        auto g = small_game(3, 3, a, b);
        auto rep = enumerate_equilibria(g);
        auto brute = brute_equilibria(g);
        INFO("trial " << trial << ": solver " << rep.equilibria.size() << " oracle "
                      << brute.size());
        REQUIRE(rep.equilibria.size() == brute.size());
        for (const auto& want : brute) {
            bool matched = false;
            for (const auto& got : rep.equilibria)
                if (same_point(want, got, 1e-5)) matched = true;
            REQUIRE(matched);
        }
        for (const auto& got : rep.equilibria) REQUIRE(raw_certificate(g, got, 1e-6));
    }
}

TEST_CASE("fully indifferent game reports extreme points with a degeneracy diagnostic") {
    // identical rows for one player, identical columns for the other: every
    // strategy pair is an equilibrium, the solution set is the whole square
    auto g = small_game(2, 2, {1, 0, 1, 0}, {1, 1, 0, 0});
    auto rep = enumerate_equilibria(g);
    REQUIRE(rep.equilibria.size() >= 2);
    REQUIRE(rep.degenerate_faces >= 1);
    for (const auto& eq : rep.equilibria) REQUIRE(raw_certificate(g, eq, 1e-6));
}

TEST_CASE("tie-breaking perturbation still returns certified equilibria") {
    auto g = small_game(2, 2, {1, 0, 1, 0}, {1, 1, 0, 0});
    solve_options opt;
    opt.lexicographic_perturbation = true;
    auto rep = enumerate_equilibria(g, opt);
    REQUIRE(!rep.equilibria.empty());
    for (const auto& eq : rep.equilibria) REQUIRE(raw_certificate(g, eq, 1e-5));
}

TEST_CASE("capital game at the first reference parameter set has three equilibria") {
    auto m = build_payoff_matrix(table3_params(), table3_levels());
    auto g = make_symmetric_game(m);
    REQUIRE(g.row_labels.size() == 20);
    REQUIRE(g.row_labels[0] == "0");
    auto rep = enumerate_equilibria(g);
    REQUIRE(rep.equilibria.size() == 3);
    REQUIRE(rep.leaf_faces >= 1);

    int symmetric = 0, asymmetric = 0;
    for (const auto& eq : rep.equilibria) {
        REQUIRE(raw_certificate(g, eq, 1e-5));
        bool sym = same_point(eq, {eq.strategy_col, eq.strategy_row}, 1e-6);
        if (sym) {
            ++symmetric;
            REQUIRE_THAT(eq.payoff_row, WithinAbs(9.051, 0.02));
            REQUIRE_THAT(eq.payoff_col, WithinAbs(9.051, 0.02));
        } else {
            ++asymmetric;
            const double hi = std::max(eq.payoff_row, eq.payoff_col);
            const double lo = std::min(eq.payoff_row, eq.payoff_col);
            REQUIRE_THAT(hi, WithinAbs(11.073, 0.02));
            REQUIRE_THAT(lo, WithinAbs(8.461, 0.02));
        }
    }
    REQUIRE(symmetric == 1);
    REQUIRE(asymmetric == 2);

    // symmetric payoff matrix: the set is closed under swapping roles
    for (const auto& eq : rep.equilibria) {
        mixed_equilibrium swapped;
        swapped.strategy_row = eq.strategy_col;
        swapped.strategy_col = eq.strategy_row;
        bool present = false;
        for (const auto& other : rep.equilibria)
            if (same_point(swapped, other, 1e-6)) present = true;
        REQUIRE(present);
    }
}

TEST_CASE("capital game at the second reference parameter set has nine typed equilibria") {
    auto grid = uniform_capital_grid(table4_params());
    auto m = build_payoff_matrix(table4_params(), grid);
    auto g = make_symmetric_game(m);
    auto rep = enumerate_equilibria(g);
    REQUIRE(rep.equilibria.size() == 9);

    int n_type2 = 0, n_type3 = 0;
    std::vector<double> in_pays;
    const mixed_equilibrium* sym_t3 = nullptr;
    for (const auto& eq : rep.equilibria) {
        REQUIRE(raw_certificate(g, eq, 1e-5));
        switch (classify_type(eq, 0)) {
            case eq_type::type2: {
                ++n_type2;
                // the player mixing onto zero capital nets exactly the
                // outside payoff of zero; the other player can always exit,
                // so their payoff is nonnegative
                const bool row_out = eq.strategy_row[0] > 1e-9;
                const double out_pay = row_out ? eq.payoff_row : eq.payoff_col;
                const double in_pay = row_out ? eq.payoff_col : eq.payoff_row;
                REQUIRE_THAT(out_pay, WithinAbs(0.0, 1e-6));
                REQUIRE(in_pay >= -1e-6);
                in_pays.push_back(in_pay);
                break;
            }
            case eq_type::type3:
                ++n_type3;
                REQUIRE_THAT(eq.payoff_row, WithinAbs(0.0, 1e-6));
                REQUIRE_THAT(eq.payoff_col, WithinAbs(0.0, 1e-6));
                if (same_point(eq, {eq.strategy_col, eq.strategy_row}, 1e-6)) sym_t3 = &eq;
                break;
            default:
                FAIL("no all-in equilibrium expected at these parameters");
        }
    }
    REQUIRE(n_type2 == 6);
    REQUIRE(n_type3 == 3);
    REQUIRE(std::any_of(in_pays.begin(), in_pays.end(),
                        [](double p) { return std::fabs(p - 3.006) < 0.05; }));
    REQUIRE(sym_t3 != nullptr);
    REQUIRE_THAT(sym_t3->strategy_row[0], WithinAbs(0.132, 0.02));
    REQUIRE_THAT(sym_t3->strategy_row[13], WithinAbs(0.271, 0.03));
}

TEST_CASE("enumeration is deterministic across repeated runs") {
    auto m = build_payoff_matrix(table3_params(), table3_levels());
    auto g = make_symmetric_game(m);
    auto first = enumerate_equilibria(g);
    auto second = enumerate_equilibria(g);
    REQUIRE(first.equilibria.size() == second.equilibria.size());
    REQUIRE(first.nodes == second.nodes);
    REQUIRE(first.lp_calls == second.lp_calls);
    for (std::size_t k = 0; k < first.equilibria.size(); ++k) {
        REQUIRE(first.equilibria[k].strategy_row == second.equilibria[k].strategy_row);
        REQUIRE(first.equilibria[k].strategy_col == second.equilibria[k].strategy_col);
        REQUIRE(first.equilibria[k].payoff_row == second.equilibria[k].payoff_row);
    }
}

TEST_CASE("game validation rejects malformed input") {
    auto good = small_game(2, 2, {1, 0, 0, 1}, {1, 0, 0, 1});
    REQUIRE_NOTHROW(enumerate_equilibria(good));

    auto bad_dim = good;
    bad_dim.payoff_col.pop_back();
    REQUIRE_THROWS_AS(enumerate_equilibria(bad_dim), std::invalid_argument);

    auto bad_val = good;
    bad_val.payoff_row[2] = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(enumerate_equilibria(bad_val), std::invalid_argument);

    bimatrix_game huge;
    huge.rows = huge.cols = 26;
    huge.payoff_row.assign(26 * 26, 0.0);
    huge.payoff_col.assign(26 * 26, 0.0);
    REQUIRE_THROWS_AS(enumerate_equilibria(huge), std::invalid_argument);

    solve_options opt;
    opt.tolerance = 0.0;
    REQUIRE_THROWS_AS(enumerate_equilibria(good, opt), std::invalid_argument);
}
