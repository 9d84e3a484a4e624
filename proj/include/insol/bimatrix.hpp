#pragma once

// All extreme mixed Nash equilibria of small bimatrix games.  The capital
// games are tiny (<= 25 strategies a side) but heavily degenerate: whole
// blocks of tied cells.  Plain support enumeration drowns at this size, so
// the search runs as a complementarity branch-and-bound: each index is free,
// forced to zero probability, or forced payoff-tight; LP feasibility prunes
// patterns, leaf solution faces are probed with a few seeded objectives for
// their extreme points, and every candidate must pass the best-response
// certificate before it is reported.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "insol/exante.hpp"

namespace insol {

struct bimatrix_game {
    std::size_t rows = 0, cols = 0;
    std::vector<double> payoff_row;  // row-major rows x cols
    std::vector<double> payoff_col;
    std::vector<std::string> row_labels, col_labels;  // may be empty

    double at_row(std::size_t i, std::size_t j) const { return payoff_row[i * cols + j]; }
    double at_col(std::size_t i, std::size_t j) const { return payoff_col[i * cols + j]; }

    void validate() const {
        if (rows == 0 || cols == 0) throw std::invalid_argument("bimatrix_game: empty game");
        if (rows > 25 || cols > 25)
            throw std::invalid_argument("bimatrix_game: more than 25 strategies a side");
        if (payoff_row.size() != rows * cols || payoff_col.size() != rows * cols)
            throw std::invalid_argument("bimatrix_game: matrix sizes do not match dimensions");
        for (double v : payoff_row)
            if (!std::isfinite(v)) throw std::invalid_argument("bimatrix_game: non-finite payoff");
        for (double v : payoff_col)
            if (!std::isfinite(v)) throw std::invalid_argument("bimatrix_game: non-finite payoff");
        if (!row_labels.empty() && row_labels.size() != rows)
            throw std::invalid_argument("bimatrix_game: row label count mismatch");
        if (!col_labels.empty() && col_labels.size() != cols)
            throw std::invalid_argument("bimatrix_game: column label count mismatch");
    }
};

// the symmetric first-period game induced by a capital payoff matrix
inline bimatrix_game make_symmetric_game(const payoff_matrix& m) {
    bimatrix_game g;
    g.rows = g.cols = m.size();
    g.payoff_row = m.cells;
    g.payoff_col.resize(m.cells.size());
    for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t j = 0; j < g.cols; ++j)
            g.payoff_col[i * g.cols + j] = m.at(j, i);
    char buf[32];
    for (double c : m.capital_levels) {
        std::snprintf(buf, sizeof buf, "%g", c);
        g.row_labels.emplace_back(buf);
    }
    g.col_labels = g.row_labels;
    return g;
}

struct solve_options {
    double tolerance = 1e-8;        // best-response certificate, normalized payoffs
    double merge_tolerance = 1e-6;  // strategy-space dedup
    bool lexicographic_perturbation = false;  // tiny deterministic tie-breaking offsets
    int face_probes = 6;            // extra objectives per leaf face
    long max_nodes = 2000000;       // search budget; blown only by pathological games
};

struct enumeration_report {
    std::vector<mixed_equilibrium> equilibria;
    long nodes = 0;
    long lp_calls = 0;
    long leaf_faces = 0;
    long degenerate_faces = 0;  // leaves whose solution face held several extreme points
};

namespace detail {

struct lp_solution {
    bool feasible = false;
    std::vector<double> z;
};

// minimize obj over {z >= 0, eq/ineq constraint rows}; dense two-phase
// simplex.  Dantzig entering with a permanent switch to Bland's rule after a
// degenerate stretch, so cycling cannot happen; fully deterministic.
class small_lp {
public:
    small_lp(int nv) : nv_(nv) {}

    void add_row(std::vector<double> coef, double rhs, bool is_eq) {
        coef_.push_back(std::move(coef));
        rhs_.push_back(rhs);
        is_eq_.push_back(is_eq);
    }

    void forbid(int var) { forbidden_.push_back(var); }

    lp_solution solve(const std::vector<double>& objective) {
        const int R = static_cast<int>(coef_.size());
        int n_slack = 0, n_art = 0;
        for (bool e : is_eq_) (e ? n_art : n_slack)++;
        const int total = nv_ + n_slack + n_art;
        const int art0 = nv_ + n_slack;

        T_.assign(R, std::vector<double>(total + 1, 0.0));
        basis_.assign(R, -1);
        int sl = nv_, ar = art0;
        for (int r = 0; r < R; ++r) {
            for (int j = 0; j < nv_; ++j) T_[r][j] = coef_[r][j];
            T_[r][total] = rhs_[r];  // all rhs nonnegative here by construction
            if (is_eq_[r]) {
                T_[r][ar] = 1.0;
                basis_[r] = ar++;
            } else {
                T_[r][sl] = 1.0;
                basis_[r] = sl++;
            }
        }

        std::vector<uint8_t> allowed(total, 1);
        for (int v : forbidden_) allowed[v] = 0;

        // phase 1: price out the artificial basis
        std::vector<double> obj1(total + 1, 0.0);
        for (int j = art0; j < total; ++j) obj1[j] = 1.0;
        for (int r = 0; r < R; ++r)
            if (basis_[r] >= art0)
                for (int j = 0; j <= total; ++j) obj1[j] -= T_[r][j];
        if (!optimize(obj1, allowed, total)) return {};
        if (-obj1[total] > 1e-7) return {};  // infeasible

        // pivot leftover artificials out of the basis where possible
        for (int r = 0; r < R; ++r) {
            if (basis_[r] < art0) continue;
            for (int j = 0; j < art0; ++j) {
                if (allowed[j] && std::fabs(T_[r][j]) > 1e-9) {
                    pivot(r, j, obj1, total);
                    break;
                }
            }
        }
        for (int j = art0; j < total; ++j) allowed[j] = 0;

        bool want_phase2 = false;
        for (double c : objective)
            if (c != 0.0) want_phase2 = true;
        if (want_phase2) {
            std::vector<double> obj2(total + 1, 0.0);
            for (int j = 0; j < nv_; ++j) obj2[j] = objective[j];
            for (int r = 0; r < R; ++r)
                if (std::fabs(obj2[basis_[r]]) > 1e-13) {
                    const double f = obj2[basis_[r]];
                    for (int j = 0; j <= total; ++j) obj2[j] -= f * T_[r][j];
                }
            if (!optimize(obj2, allowed, total)) return {};
        }

        lp_solution out;
        out.feasible = true;
        out.z.assign(nv_, 0.0);
        for (int r = 0; r < R; ++r)
            if (basis_[r] < nv_) out.z[basis_[r]] = std::max(0.0, T_[r][total]);
        return out;
    }

private:
    void pivot(int pr, int pc, std::vector<double>& obj, int total) {
        const int R = static_cast<int>(T_.size());
        const double pv = T_[pr][pc];
        for (int j = 0; j <= total; ++j) T_[pr][j] /= pv;
        for (int r = 0; r < R; ++r) {
            if (r == pr || std::fabs(T_[r][pc]) < 1e-13) continue;
            const double f = T_[r][pc];
            for (int j = 0; j <= total; ++j) T_[r][j] -= f * T_[pr][j];
        }
        if (std::fabs(obj[pc]) > 1e-13) {
            const double f = obj[pc];
            for (int j = 0; j <= total; ++j) obj[j] -= f * T_[pr][j];
        }
        basis_[pr] = pc;
    }

    bool optimize(std::vector<double>& obj, const std::vector<uint8_t>& allowed, int total) {
        const int R = static_cast<int>(T_.size());
        bool bland = false;
        int degen_run = 0;
        for (int iter = 0; iter < 100000; ++iter) {
            int pc = -1;
            if (bland) {
                for (int j = 0; j < total; ++j)
                    if (allowed[j] && obj[j] < -1e-9) {
                        pc = j;
                        break;
                    }
            } else {
                double best = -1e-9;
                for (int j = 0; j < total; ++j)
                    if (allowed[j] && obj[j] < best) {
                        best = obj[j];
                        pc = j;
                    }
            }
            if (pc < 0) return true;

            int pr = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < R; ++r) {
                if (T_[r][pc] <= 1e-9) continue;
                const double ratio = T_[r][total] / T_[r][pc];
                if (pr < 0 || ratio < best_ratio - 1e-12) {
                    pr = r;
                    best_ratio = ratio;
                } else if (ratio <= best_ratio + 1e-12 && basis_[r] < basis_[pr]) {
                    pr = r;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
            if (pr < 0) return false;  // unbounded
            if (best_ratio < 1e-12) {
                if (++degen_run > 200) bland = true;
            } else {
                degen_run = 0;
            }
            pivot(pr, pc, obj, total);
        }
        return false;
    }

    int nv_;
    std::vector<std::vector<double>> coef_;
    std::vector<double> rhs_;
    std::vector<uint8_t> is_eq_;
    std::vector<int> forbidden_;
    std::vector<std::vector<double>> T_;
    std::vector<int> basis_;
};

class nash_enumerator {
public:
    nash_enumerator(const bimatrix_game& game, const solve_options& opt)
        : g_(game), opt_(opt), m_(static_cast<int>(game.rows)), n_(static_cast<int>(game.cols)) {
        an_ = normalize(game.payoff_row);
        bn_ = normalize(game.payoff_col);
        if (opt_.lexicographic_perturbation) {
            const double d = 1e-9;
            for (int i = 0; i < m_; ++i)
                for (int j = 0; j < n_; ++j) {
                    an_[i * n_ + j] += d * (i * n_ + j) / (m_ * n_);
                    bn_[i * n_ + j] += d * (j * m_ + i) / (m_ * n_);
                }
        }
    }

    enumeration_report run() {
        std::vector<uint8_t> rs(m_, 0), cs(n_, 0);
        recurse(rs, cs);

        // dedup across faces, then attach original-scale payoffs
        std::vector<std::pair<std::vector<double>, std::vector<double>>> kept;
        for (auto& pt : raw_) {
            bool dup = false;
            for (auto& k : kept)
                if (close(pt.first, k.first) && close(pt.second, k.second)) {
                    dup = true;
                    break;
                }
            if (!dup) kept.push_back(pt);
        }
        for (auto& [x, y] : kept) {
            mixed_equilibrium eq;
            eq.strategy_row = x;
            eq.strategy_col = y;
            eq.payoff_row = bilinear(g_.payoff_row, x, y);
            eq.payoff_col = bilinear(g_.payoff_col, x, y);
            report_.equilibria.push_back(std::move(eq));
        }
        std::sort(report_.equilibria.begin(), report_.equilibria.end(),
                  [this](const mixed_equilibrium& a, const mixed_equilibrium& b) {
                      auto ka = sort_key(a), kb = sort_key(b);
                      return ka < kb;
                  });
        return std::move(report_);
    }

private:
    using pattern = std::vector<uint8_t>;  // 0 free, 1 zero-prob, 2 payoff-tight

    std::vector<double> normalize(const std::vector<double>& mat) const {
        double lo = mat[0], hi = mat[0];
        for (double v : mat) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        std::vector<double> out(mat.size(), 0.0);
        if (hi - lo > 1e-300)
            for (std::size_t k = 0; k < mat.size(); ++k) out[k] = (mat[k] - lo) / (hi - lo);
        return out;
    }

    double bilinear(const std::vector<double>& mat, const std::vector<double>& x,
                    const std::vector<double>& y) const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (x[i] == 0.0) continue;
            double row = 0.0;
            for (int j = 0; j < n_; ++j) row += mat[i * n_ + j] * y[j];
            s += x[i] * row;
        }
        return s;
    }

    bool close(const std::vector<double>& a, const std::vector<double>& b) const {
        for (std::size_t k = 0; k < a.size(); ++k)
            if (std::fabs(a[k] - b[k]) >= opt_.merge_tolerance) return false;
        return true;
    }

    using key_type = std::tuple<std::vector<int>, std::vector<int>, std::vector<double>,
                                std::vector<double>>;

    key_type sort_key(const mixed_equilibrium& e) const {
        std::vector<int> supp_r, supp_c;
        for (int i = 0; i < m_; ++i)
            if (e.strategy_row[i] > 1e-9) supp_r.push_back(i);
        for (int j = 0; j < n_; ++j)
            if (e.strategy_col[j] > 1e-9) supp_c.push_back(j);
        return {supp_r, supp_c, e.strategy_row, e.strategy_col};
    }

    lp_solution solve_pattern(const pattern& rs, const pattern& cs, const double* objective) {
        const int nv = m_ + n_ + 2;  // x, y, row value u, column value v
        small_lp lp(nv);
        std::vector<double> row(nv, 0.0);
        for (int i = 0; i < m_; ++i) row[i] = 1.0;
        lp.add_row(row, 1.0, true);
        std::fill(row.begin(), row.end(), 0.0);
        for (int j = 0; j < n_; ++j) row[m_ + j] = 1.0;
        lp.add_row(row, 1.0, true);
        for (int i = 0; i < m_; ++i) {
            std::fill(row.begin(), row.end(), 0.0);
            for (int j = 0; j < n_; ++j) row[m_ + j] = an_[i * n_ + j];
            row[m_ + n_] = -1.0;
            lp.add_row(row, 0.0, rs[i] == 2);
        }
        for (int j = 0; j < n_; ++j) {
            std::fill(row.begin(), row.end(), 0.0);
            for (int i = 0; i < m_; ++i) row[i] = bn_[i * n_ + j];
            row[m_ + n_ + 1] = -1.0;
            lp.add_row(row, 0.0, cs[j] == 2);
        }
        for (int i = 0; i < m_; ++i)
            if (rs[i] == 1) lp.forbid(i);
        for (int j = 0; j < n_; ++j)
            if (cs[j] == 1) lp.forbid(m_ + j);
        ++report_.lp_calls;
        std::vector<double> obj(nv, 0.0);
        if (objective) obj.assign(objective, objective + nv);
        return lp.solve(obj);
    }

    void recurse(const pattern& rs, const pattern& cs) {
        if (++report_.nodes > opt_.max_nodes)
            throw std::runtime_error("enumerate_equilibria: search budget exceeded");
        lp_solution sol = solve_pattern(rs, cs, nullptr);
        if (!sol.feasible) return;
        const double* x = sol.z.data();
        const double* y = sol.z.data() + m_;
        const double u = sol.z[m_ + n_];
        const double v = sol.z[m_ + n_ + 1];

        std::vector<double> sr(m_), sc(n_);
        for (int i = 0; i < m_; ++i) {
            double a = 0.0;
            for (int j = 0; j < n_; ++j) a += an_[i * n_ + j] * y[j];
            sr[i] = a - u;  // <= 0 when feasible
        }
        for (int j = 0; j < n_; ++j) {
            double b = 0.0;
            for (int i = 0; i < m_; ++i) b += bn_[i * n_ + j] * x[i];
            sc[j] = b - v;
        }

        // branch on the worst complementarity violation among free indices
        int viol_i = -1, side = 0;
        double viol = 1e-7;
        for (int i = 0; i < m_; ++i)
            if (rs[i] == 0 && x[i] * (-sr[i]) > viol) {
                viol = x[i] * (-sr[i]);
                viol_i = i;
                side = 0;
            }
        for (int j = 0; j < n_; ++j)
            if (cs[j] == 0 && y[j] * (-sc[j]) > viol) {
                viol = y[j] * (-sc[j]);
                viol_i = j;
                side = 1;
            }
        if (viol_i >= 0) {
            pattern r2 = rs, c2 = cs;
            if (side == 0) {
                r2[viol_i] = 1;
                recurse(r2, cs);
                r2[viol_i] = 2;
                recurse(r2, cs);
            } else {
                c2[viol_i] = 1;
                recurse(rs, c2);
                c2[viol_i] = 2;
                recurse(rs, c2);
            }
            return;
        }

        // no violation at the LP point: keep splitting free indices until the
        // pattern is complete, taking genuinely ambiguous ones (probability
        // and slack both near zero) first so infeasibility pruning stays
        // sharp.  Every feasible point of a complete pattern is an
        // equilibrium, so harvesting only complete faces cannot miss any.
        int split = -1;
        side = 0;
        for (int i = 0; i < m_ && split < 0; ++i)
            if (rs[i] == 0 && x[i] <= 1e-7 && -sr[i] <= 1e-7) split = i;
        if (split < 0)
            for (int j = 0; j < n_ && split < 0; ++j)
                if (cs[j] == 0 && y[j] <= 1e-7 && -sc[j] <= 1e-7) {
                    split = j;
                    side = 1;
                }
        if (split < 0)
            for (int i = 0; i < m_ && split < 0; ++i)
                if (rs[i] == 0) split = i;
        if (split < 0)
            for (int j = 0; j < n_ && split < 0; ++j)
                if (cs[j] == 0) {
                    split = j;
                    side = 1;
                }
        if (split >= 0) {
            if (side == 0) {
                pattern r2 = rs;
                r2[split] = 1;
                recurse(r2, cs);
                r2[split] = 2;
                recurse(r2, cs);
            } else {
                pattern c2 = cs;
                c2[split] = 1;
                recurse(rs, c2);
                c2[split] = 2;
                recurse(rs, c2);
            }
            return;
        }

        ++report_.leaf_faces;
        harvest(rs, cs, sol.z);
    }

    void harvest(const pattern& rs, const pattern& cs, const std::vector<double>& first) {
        std::vector<std::vector<double>> pts{first};
        std::mt19937 rng(12345);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int nv = m_ + n_ + 2;
        for (int probe = 0; probe < opt_.face_probes; ++probe) {
            std::vector<double> obj(nv, 0.0);
            for (int k = 0; k < m_ + n_; ++k) obj[k] = gauss(rng);
            lp_solution sol = solve_pattern(rs, cs, obj.data());
            if (sol.feasible) pts.push_back(sol.z);
        }
        std::vector<std::pair<std::vector<double>, std::vector<double>>> face_pts;
        for (auto& z : pts) {
            std::vector<double> x(z.begin(), z.begin() + m_);
            std::vector<double> y(z.begin() + m_, z.begin() + m_ + n_);
            if (!certify(x, y)) continue;
            bool dup = false;
            for (auto& fp : face_pts)
                if (close(x, fp.first) && close(y, fp.second)) {
                    dup = true;
                    break;
                }
            if (!dup) face_pts.push_back({x, y});
        }
        if (face_pts.size() > 1) ++report_.degenerate_faces;
        for (auto& fp : face_pts) raw_.push_back(std::move(fp));
    }

    // best-response certificate on the normalized game; renormalizes the
    // probabilities in place
    bool certify(std::vector<double>& x, std::vector<double>& y) const {
        double sx = 0.0, sy = 0.0;
        for (double v : x) sx += v;
        for (double v : y) sy += v;
        if (sx < 0.5 || sy < 0.5) return false;
        for (double& v : x) v /= sx;
        for (double& v : y) v /= sy;
        double val_r = 0.0, best_r = -1.0;
        for (int i = 0; i < m_; ++i) {
            double a = 0.0;
            for (int j = 0; j < n_; ++j) a += an_[i * n_ + j] * y[j];
            best_r = std::max(best_r, a);
            val_r += x[i] * a;
        }
        if (best_r - val_r > opt_.tolerance) return false;
        double val_c = 0.0, best_c = -1.0;
        for (int j = 0; j < n_; ++j) {
            double b = 0.0;
            for (int i = 0; i < m_; ++i) b += bn_[i * n_ + j] * x[i];
            best_c = std::max(best_c, b);
            val_c += y[j] * b;
        }
        return best_c - val_c <= opt_.tolerance;
    }

    const bimatrix_game& g_;
    solve_options opt_;
    int m_, n_;
    std::vector<double> an_, bn_;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> raw_;
    enumeration_report report_;
};

}  // namespace detail

inline enumeration_report enumerate_equilibria(const bimatrix_game& game,
                                               const solve_options& opt = {}) {
    game.validate();
    if (opt.tolerance <= 0.0) throw std::invalid_argument("enumerate_equilibria: tolerance must be positive");
    detail::nash_enumerator en(game, opt);
    return en.run();
}

inline eq_type classify_type(const mixed_equilibrium& eq, std::size_t zero_index,
                             double tol = 1e-9) {
    return classify_strategies(eq.strategy_row, eq.strategy_col, zero_index, tol);
}

}  // namespace insol
