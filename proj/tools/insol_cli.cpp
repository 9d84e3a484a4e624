// Command-line front end: curves, equilibria, payoff matrices, the solver,
// parameter sweeps and Monte Carlo checks, with machine-readable outputs and
// a run manifest next to every file written.

#include <CLI11.hpp>
#include <json.hpp>

#include <insol/bimatrix.hpp>
#include <insol/capital_adjustment.hpp>
#include <insol/equilibrium.hpp>
#include <insol/exante.hpp>
#include <insol/io.hpp>
#include <insol/market.hpp>
#include <insol/simulate.hpp>
#include <insol/sweep.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct market_flags {
    double q = 0.1;
    double K = 100.0;
    double alpha = 110.0;
    double r = 0.0;
    double phi = insol::default_phi;
    double penalty_b = 0.0;
};

// Plain key=value parameter files ('#' comments). Values fill in any option
// the command line did not set explicitly, so flags always win.
struct config_file {
    std::string path;
    std::map<std::string, std::function<void(const std::string&)>> setters;

    template <class T>
    void add(const std::string& key, T& target) {
        setters[key] = [&target, key](const std::string& value) {
            std::istringstream is(value);
            T parsed{};
            is >> parsed;
            if (!is || !(is >> std::ws).eof())
                throw std::invalid_argument("config: bad value for " + key + ": '" + value + "'");
            target = parsed;
        };
    }

    void apply(const CLI::App* sub) const {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config file: " + path);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": expected key=value");
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            const auto it = setters.find(key);
            if (it == setters.end())
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": unknown key '" + key + "'");
            if (sub->count("--" + key) == 0) it->second(value);
        }
    }
};

void add_market_flags(CLI::App* sub, market_flags& f, config_file& cf) {
    sub->add_option("--q", f.q, "claim probability per policy");
    sub->add_option("--K", f.K, "claim size");
    sub->add_option("--alpha", f.alpha, "demand scale");
    sub->add_option("--r", f.r, "cost of capital");
    sub->add_option("--phi", f.phi, "solvency quantile factor");
    sub->add_option("--penalty-B", f.penalty_b, "fixed cost of an ex-post capital raise");
    sub->add_option("--config", cf.path, "key=value parameter file (flags override)");
    cf.add("q", f.q);
    cf.add("K", f.K);
    cf.add("alpha", f.alpha);
    cf.add("r", f.r);
    cf.add("phi", f.phi);
    cf.add("penalty-B", f.penalty_b);
}

insol::market_params to_params(const market_flags& f) {
    insol::market_params p{f.q, f.K, f.alpha, f.r, f.phi};
    p.adjust_cost_B = f.penalty_b;
    p.validate();
    return p;
}

json market_json(const market_flags& f) {
    return json{{"q", f.q},      {"K", f.K},     {"alpha", f.alpha},
                {"r", f.r},      {"phi", f.phi}, {"penalty_B", f.penalty_b}};
}

const char* kind_name(insol::eq_kind k) {
    switch (k) {
        case insol::eq_kind::interval_continuum: return "interval_continuum";
        case insol::eq_kind::single_leader_continuous: return "single_leader_continuous";
        case insol::eq_kind::discrete_ladder: return "discrete_ladder";
        case insol::eq_kind::asymmetric_split: return "asymmetric_split";
        case insol::eq_kind::none: return "none";
    }
    return "unknown";
}

const char* tag_name(insol::regime_tag t) {
    switch (t) {
        case insol::regime_tag::symmetric: return "symmetric";
        case insol::regime_tag::case_ia: return "case_ia";
        case insol::regime_tag::case_ib: return "case_ib";
        case insol::regime_tag::case_ic: return "case_ic";
        case insol::regime_tag::case_iia: return "case_iia";
        case insol::regime_tag::case_iib: return "case_iib";
        case insol::regime_tag::case_iic: return "case_iic";
    }
    return "unknown";
}

const char* regime_name(insol::expost_regime r) {
    switch (r) {
        case insol::expost_regime::no_adjustment: return "no_adjustment";
        case insol::expost_regime::no_pure_ne_continuous: return "no_pure_ne_continuous";
        case insol::expost_regime::discrete_leader_ne: return "discrete_leader_ne";
    }
    return "unknown";
}

json equilibrium_set_json(const insol::equilibrium_set& eq) {
    json out;
    out["kind"] = kind_name(eq.kind);
    out["regime"] = tag_name(eq.tag);
    if (eq.interval) out["interval"] = {(*eq.interval)[0], (*eq.interval)[1]};
    json firms = json::array();
    for (const auto& a : eq.assignments)
        firms.push_back(json{{"premium", a.premium}, {"share", a.share}});
    out["assignments"] = firms;
    if (!eq.ladder_pairs.empty()) {
        json ladder = json::array();
        for (const auto& [c, p] : eq.ladder_pairs) ladder.push_back(json{{"capital", c}, {"premium", p}});
        out["ladder"] = ladder;
    }
    out["notes"] = eq.notes;
    return out;
}

void write_with_manifest(const std::string& stem, const std::string& csv_name,
                         const std::string& csv_body, const std::string& command,
                         const json& parameters, std::optional<std::uint64_t> seed = {},
                         const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    std::vector<std::string> outputs{csv_name};
    insol::write_text_file(csv_name, csv_body);
    for (const auto& [name, body] : extra) {
        insol::write_text_file(name, body);
        outputs.push_back(name);
    }
    const json manifest = insol::make_manifest(command, parameters, outputs, seed);
    insol::write_text_file(insol::manifest_path_for(stem), manifest.dump(2) + "\n");
}

// Vector of capital levels, either given explicitly or a uniform grid
// from zero to the single-firm break-even capital.
std::vector<double> resolve_levels(const insol::market_params& p,
                                   const std::vector<double>& explicit_levels,
                                   int grid_size) {
    if (!explicit_levels.empty()) return explicit_levels;
    return insol::uniform_capital_grid(p, static_cast<std::size_t>(grid_size));
}

int find_zero_level(const std::vector<double>& levels) {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == 0.0) return static_cast<int>(i);
    throw std::invalid_argument("capital grid must include a zero level for equilibrium typing");
}

// ---------------------------------------------------------------- curves ---

void setup_curves(CLI::App& app) {
    struct opts {
        market_flags mf;
        config_file cf;
        std::vector<double> capital{300.0};
        double n_min = 1.0;
        double n_max = 0.0;  // 0: span the whole demand curve
        int n_steps = 200;
        double iso_level = 0.0;
        std::string out = "curves";
        bool human = false;
    };
    auto o = std::make_shared<opts>();
    CLI::App* sub = app.add_subcommand("curves", "tabulate demand, MPR, zero-profit and iso-profit curves");
    add_market_flags(sub, o->mf, o->cf);
    sub->add_option("--capital", o->capital, "capital level(s), one MPR column each")->delimiter(',');
    sub->add_option("--n-min", o->n_min, "smallest book size");
    sub->add_option("--n-max", o->n_max, "largest book size (0: demand maximum)");
    sub->add_option("--n-steps", o->n_steps, "number of rows")->check(CLI::PositiveNumber);
    sub->add_option("--iso-level", o->iso_level, "profit level for the iso-profit column");
    sub->add_option("--out", o->out, "output stem");
    sub->add_flag("--human", o->human, "2-decimal output instead of full precision");

    sub->callback([o, sub] {
        o->cf.apply(sub);
        const insol::market_params p = to_params(o->mf);
        const double hi = o->n_max > 0.0 ? o->n_max : insol::n_max(p);
        if (!(o->n_min > 0.0) || hi < o->n_min)
            throw std::invalid_argument("curves: need 0 < n-min <= n-max");
        auto fmt = o->human ? insol::fmt_human : insol::fmt_machine;

        std::vector<std::string> header{"n", "demand_premium"};
        for (double c : o->capital) {
            header.push_back("mpr_C" + fmt(c));
            header.push_back("mpr_C" + fmt(c) + "_above_loss");
            header.push_back("zero_profit_C" + fmt(c));
            header.push_back("iso_profit_C" + fmt(c));
        }
        std::ostringstream body;
        insol::write_csv_row(body, header);
        const int steps = std::max(1, o->n_steps);
        for (int k = 0; k < steps; ++k) {
            const double n = steps == 1 ? o->n_min
                                        : o->n_min + k * (hi - o->n_min) / (steps - 1);
            std::vector<std::string> row{fmt(n), fmt(insol::inverse_demand(p, n))};
            for (double c : o->capital) {
                const auto m = insol::mpr(p, n, c);
                row.push_back(fmt(m.premium));
                row.push_back(m.above_loss_size ? "1" : "0");
                // break-even and iso-profit premiums for a book of n at capital c
                row.push_back(fmt(p.net_premium() + p.r * c / n));
                row.push_back(fmt(p.net_premium() + (o->iso_level + p.r * c) / n));
            }
            insol::write_csv_row(body, row);
        }
        json params = market_json(o->mf);
        params["capital"] = o->capital;
        params["n_min"] = o->n_min;
        params["n_max"] = hi;
        params["n_steps"] = steps;
        params["iso_level"] = o->iso_level;
        write_with_manifest(o->out, o->out + ".csv", body.str(), "curves", params);
        std::printf("wrote %s.csv: %d rows, %zu capital level(s)\n", o->out.c_str(), steps,
                    o->capital.size());
    });
}

// ----------------------------------------------------------- equilibrium ---

void setup_equilibrium(CLI::App& app) {
    struct opts {
        market_flags mf;
        config_file cf;
        bool symmetric = false, asymmetric = false, expost = false;
        std::vector<double> capital{300.0};
        int firms = 2;
        std::vector<double> grid;
        std::string out;
    };
    auto o = std::make_shared<opts>();
    CLI::App* sub = app.add_subcommand("equilibrium", "solve the premium game for a fixed capital structure");
    add_market_flags(sub, o->mf, o->cf);
    auto* fs = sub->add_flag("--symmetric", o->symmetric, "all firms hold the same capital (default)");
    auto* fa = sub->add_flag("--asymmetric", o->asymmetric, "two firms with different capital");
    auto* fe = sub->add_flag("--expost", o->expost, "firms may raise capital after premiums are set");
    fa->excludes(fs)->excludes(fe);
    fe->excludes(fs);
    sub->add_option("--capital", o->capital, "capital per firm (two values with --asymmetric)")->delimiter(',');
    sub->add_option("-I,--firms", o->firms, "number of firms")->check(CLI::PositiveNumber);
    sub->add_option("--grid", o->grid, "restrict premiums to this ascending grid")->delimiter(',');
    sub->add_option("--out", o->out, "write the JSON report here instead of stdout");

    sub->callback([o, sub] {
        o->cf.apply(sub);
        const insol::market_params p = to_params(o->mf);
        std::optional<insol::premium_grid> grid;
        if (!o->grid.empty()) {
            grid = insol::premium_grid{o->grid};
            grid->validate();
        }
        json report;
        report["parameters"] = market_json(o->mf);
        if (o->asymmetric) {
            if (o->capital.size() != 2)
                throw std::invalid_argument("equilibrium --asymmetric needs exactly two --capital values");
            double lo = std::min(o->capital[0], o->capital[1]);
            double hi = std::max(o->capital[0], o->capital[1]);
            const auto eq = insol::asymmetric_duopoly(p, lo, hi, grid ? &*grid : nullptr);
            report["mode"] = "asymmetric";
            report["capital"] = {lo, hi};
            report["equilibrium"] = equilibrium_set_json(eq);
        } else if (o->expost) {
            if (o->capital.size() != 1)
                throw std::invalid_argument("equilibrium --expost needs exactly one --capital value");
            const auto out = insol::expost_equilibrium(p, o->capital[0], o->firms,
                                                       grid ? &*grid : nullptr);
            report["mode"] = "expost";
            report["capital"] = o->capital[0];
            report["firms"] = o->firms;
            report["regime"] = regime_name(out.regime);
            if (out.p_1z) report["p_1z"] = *out.p_1z;
            if (out.delta_c_at_p1z) report["delta_c_at_p1z"] = *out.delta_c_at_p1z;
            if (out.leader_premium) report["leader_premium"] = *out.leader_premium;
            report["notes"] = out.notes;
        } else {
            if (o->capital.size() != 1)
                throw std::invalid_argument("equilibrium --symmetric needs exactly one --capital value");
            const auto eq = insol::symmetric_equilibrium(p, o->capital[0],
                                                         static_cast<unsigned>(o->firms));
            report["mode"] = "symmetric";
            report["capital"] = o->capital[0];
            report["firms"] = o->firms;
            report["equilibrium"] = equilibrium_set_json(eq);
        }
        const std::string text = report.dump(2) + "\n";
        if (o->out.empty()) {
            std::fputs(text.c_str(), stdout);
        } else {
            json params = report["parameters"];
            params["mode"] = report["mode"];
            insol::write_text_file(o->out, text);
            const json manifest = insol::make_manifest("equilibrium", params, {o->out}, {});
            insol::write_text_file(insol::manifest_path_for(o->out), manifest.dump(2) + "\n");
            std::printf("wrote %s\n", o->out.c_str());
        }
    });
}

// --------------------------------------------------------- payoff-matrix ---

void setup_payoff_matrix(CLI::App& app) {
    struct opts {
        market_flags mf;
        config_file cf;
        std::vector<double> levels;
        int grid_size = 20;
        std::string convention = "worst";
        bool human = false;
        std::string out = "payoff_matrix";
    };
    auto o = std::make_shared<opts>();
    CLI::App* sub = app.add_subcommand("payoff-matrix",
                                       "expected profits of the capital-choice game, one row per own level");
    add_market_flags(sub, o->mf, o->cf);
    o->cf.add("grid-size", o->grid_size);
    sub->add_option("--levels", o->levels, "explicit capital levels, ascending from 0")->delimiter(',');
    sub->add_option("--grid-size", o->grid_size, "uniform grid size when --levels is absent")
        ->check(CLI::Range(2, 1000));
    sub->add_option("--convention", o->convention, "demand floor at the loss-size premium: worst | clamped")
        ->check(CLI::IsMember({"worst", "clamped"}));
    sub->add_flag("--human", o->human, "2-decimal output instead of full precision");
    sub->add_option("--out", o->out, "output stem");

    sub->callback([o, sub] {
        o->cf.apply(sub);
        const insol::market_params p = to_params(o->mf);
        const auto levels = resolve_levels(p, o->levels, o->grid_size);
        const auto conv = o->convention == "clamped" ? insol::floor_convention::clamped
                                                     : insol::floor_convention::worst_case;
        const auto matrix = insol::build_payoff_matrix(p, levels, conv);
        std::ostringstream os;
        insol::write_payoff_matrix_csv(os, matrix, !o->human);
        const std::string body = os.str();
        json params = market_json(o->mf);
        params["levels"] = levels;
        params["convention"] = o->convention;
        write_with_manifest(o->out, o->out + ".csv", body, "payoff-matrix", params);
        std::printf("wrote %s.csv: %zu x %zu payoff matrix, top level %.2f\n", o->out.c_str(),
                    matrix.size(), matrix.size(), levels.back());
    });
}

// ------------------------------------------------------------------ solve ---

void setup_solve(CLI::App& app) {
    struct opts {
        market_flags mf;
        config_file cf;
        std::string game;
        std::vector<double> levels;
        int grid_size = 20;
        std::string convention = "worst";
        double tolerance = 1e-8;
        bool human = false;
        std::string out = "equilibria";
    };
    auto o = std::make_shared<opts>();
    CLI::App* sub = app.add_subcommand("solve", "enumerate mixed equilibria of the capital-choice game");
    add_market_flags(sub, o->mf, o->cf);
    o->cf.add("grid-size", o->grid_size);
    o->cf.add("tolerance", o->tolerance);
    sub->add_option("--game", o->game, "payoff matrix CSV to solve (skips the model build)");
    sub->add_option("--levels", o->levels, "explicit capital levels, ascending from 0")->delimiter(',');
    sub->add_option("--grid-size", o->grid_size, "uniform grid size when --levels is absent")
        ->check(CLI::Range(2, 1000));
    sub->add_option("--convention", o->convention, "demand floor: worst | clamped")
        ->check(CLI::IsMember({"worst", "clamped"}));
    sub->add_option("--tolerance", o->tolerance, "equilibrium certificate tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--human", o->human, "2-decimal output instead of full precision");
    sub->add_option("--out", o->out, "output stem");

    sub->callback([o, sub] {
        o->cf.apply(sub);
        insol::payoff_matrix matrix;
        json params = market_json(o->mf);
        if (!o->game.empty()) {
            std::ifstream in(o->game);
            if (!in) throw std::invalid_argument("solve: cannot open " + o->game);
            try {
                matrix = insol::read_payoff_matrix_csv(in);
            } catch (const std::runtime_error& e) {
                throw std::invalid_argument("solve: bad game file: " + std::string(e.what()));
            }
            params["game"] = o->game;
        } else {
            const insol::market_params p = to_params(o->mf);
            const auto levels = resolve_levels(p, o->levels, o->grid_size);
            const auto conv = o->convention == "clamped" ? insol::floor_convention::clamped
                                                         : insol::floor_convention::worst_case;
            matrix = insol::build_payoff_matrix(p, levels, conv);
            params["levels"] = levels;
            params["convention"] = o->convention;
        }
        const int zero = find_zero_level(matrix.capital_levels);
        insol::solve_options sopt;
        sopt.tolerance = o->tolerance;
        auto game = insol::make_symmetric_game(matrix);
        auto report = insol::enumerate_equilibria(game, sopt);
        for (auto& eq : report.equilibria)
            eq.type = insol::classify_type(eq, static_cast<std::size_t>(zero));

        std::ostringstream csv_os;
        insol::write_equilibria_csv(csv_os, matrix.capital_levels, report.equilibria, !o->human);
        const std::string csv = csv_os.str();
        json jeqs = json::array();
        for (const auto& eq : report.equilibria)
            jeqs.push_back(json{{"strategy_row", eq.strategy_row},
                                {"strategy_col", eq.strategy_col},
                                {"payoff_row", eq.payoff_row},
                                {"payoff_col", eq.payoff_col},
                                {"type", insol::type_name(eq.type)}});
        const json diag{{"nodes", report.nodes},
                        {"lp_calls", report.lp_calls},
                        {"leaf_faces", report.leaf_faces},
                        {"degenerate_faces", report.degenerate_faces}};
        const json jreport{{"capital_levels", matrix.capital_levels},
                           {"equilibria", jeqs},
                           {"diagnostics", diag}};
        params["tolerance"] = o->tolerance;
        write_with_manifest(o->out, o->out + ".csv", csv, "solve", params, {},
                            {{o->out + ".json", jreport.dump(2) + "\n"}});
        std::printf("wrote %s.csv and %s.json: %zu equilibria\n", o->out.c_str(), o->out.c_str(),
                    report.equilibria.size());
        for (const auto& eq : report.equilibria)
            std::printf("  %s payoffs (%.2f, %.2f)\n", insol::type_name(eq.type), eq.payoff_row,
                        eq.payoff_col);
    });
}

// ------------------------------------------------------------------ sweep ---

void setup_sweep(CLI::App& app) {
    struct opts {
        insol::sweep_config cfg;
        config_file cf;
        std::string filter = "all-increasing";
        std::string out = "sweep";
    };
    auto o = std::make_shared<opts>();
    CLI::App* sub = app.add_subcommand("sweep", "classify equilibria over a parameter grid");
    sub->add_option("--alpha-min", o->cfg.alpha.min);
    sub->add_option("--alpha-max", o->cfg.alpha.max);
    sub->add_option("--alpha-step", o->cfg.alpha.step);
    sub->add_option("--q-min", o->cfg.q.min);
    sub->add_option("--q-max", o->cfg.q.max);
    sub->add_option("--q-step", o->cfg.q.step);
    sub->add_option("--K-min", o->cfg.K.min);
    sub->add_option("--K-max", o->cfg.K.max);
    sub->add_option("--K-step", o->cfg.K.step);
    sub->add_option("--r-min", o->cfg.r.min);
    sub->add_option("--r-max", o->cfg.r.max);
    sub->add_option("--r-step", o->cfg.r.step);
    sub->add_option("--grid-size", o->cfg.grid_levels, "capital grid size per tuple")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
    sub->add_option("--filter", o->filter, "branch filter: all-increasing | all-decreasing | any")
        ->check(CLI::IsMember({"all-increasing", "all-decreasing", "any"}));
    sub->add_option("--tolerance", o->cfg.solver_tolerance)->check(CLI::PositiveNumber);
    sub->add_option("--jobs", o->cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "output stem");
    sub->add_option("--config", o->cf.path, "key=value parameter file (flags override)");
    o->cf.add("alpha-min", o->cfg.alpha.min);
    o->cf.add("alpha-max", o->cfg.alpha.max);
    o->cf.add("alpha-step", o->cfg.alpha.step);
    o->cf.add("q-min", o->cfg.q.min);
    o->cf.add("q-max", o->cfg.q.max);
    o->cf.add("q-step", o->cfg.q.step);
    o->cf.add("K-min", o->cfg.K.min);
    o->cf.add("K-max", o->cfg.K.max);
    o->cf.add("K-step", o->cfg.K.step);
    o->cf.add("r-min", o->cfg.r.min);
    o->cf.add("r-max", o->cfg.r.max);
    o->cf.add("r-step", o->cfg.r.step);
    o->cf.add("grid-size", o->cfg.grid_levels);
    o->cf.add("filter", o->filter);
    o->cf.add("tolerance", o->cfg.solver_tolerance);
    o->cf.add("jobs", o->cfg.jobs);

    sub->callback([o, sub] {
        o->cf.apply(sub);
        if (o->filter != "any" && o->filter != "all-decreasing" && o->filter != "all-increasing")
            throw std::invalid_argument("sweep: unknown filter '" + o->filter + "'");
        o->cfg.filter = o->filter == "any"            ? insol::branch_filter::any
                        : o->filter == "all-decreasing" ? insol::branch_filter::all_decreasing
                                                        : insol::branch_filter::all_increasing;
        const auto result = insol::run_sweep(o->cfg);

        std::ostringstream records;
        insol::write_csv_row(records, {"alpha", "q", "K", "r", "status", "c_1z", "all_increasing",
                                       "all_decreasing", "eq_total", "eq_type1", "eq_type2",
                                       "eq_type3", "diagnostic"});
        auto status_name = [](insol::tuple_status s) {
            switch (s) {
                case insol::tuple_status::passed: return "passed";
                case insol::tuple_status::filtered: return "filtered";
                case insol::tuple_status::skipped: return "skipped";
                case insol::tuple_status::failed: return "failed";
            }
            return "unknown";
        };
        for (const auto& rec : result.records) {
            insol::write_csv_row(
                records,
                {insol::fmt_machine(rec.params.alpha), insol::fmt_machine(rec.params.q),
                 insol::fmt_machine(rec.params.K), insol::fmt_machine(rec.params.r),
                 status_name(rec.status), insol::fmt_machine(rec.c_1z),
                 rec.all_increasing ? "1" : "0", rec.all_decreasing ? "1" : "0",
                 std::to_string(rec.eq_total), std::to_string(rec.eq_type1),
                 std::to_string(rec.eq_type2), std::to_string(rec.eq_type3), rec.diagnostic});
        }

        auto range_json = [](const insol::param_range& pr) {
            return json{{"min", pr.min}, {"max", pr.max}, {"step", pr.step}};
        };
        const json summary{
            {"config",
             {{"alpha", range_json(o->cfg.alpha)},
              {"q", range_json(o->cfg.q)},
              {"K", range_json(o->cfg.K)},
              {"r", range_json(o->cfg.r)},
              {"grid_levels", o->cfg.grid_levels},
              {"filter", o->filter},
              {"tolerance", o->cfg.solver_tolerance}}},
            {"tuples",
             {{"total", result.total},
              {"passed", result.passed},
              {"filtered", result.filtered},
              {"skipped", result.skipped},
              {"failed", result.failed}}},
            {"equilibria",
             {{"type1", result.eq_type1},
              {"type2", result.eq_type2},
              {"type3", result.eq_type3},
              {"total", result.eq_total}}}};

        json params = summary["config"];
        params["jobs"] = o->cfg.jobs;
        write_with_manifest(o->out, o->out + "_records.csv", records.str(), "sweep", params, {},
                            {{o->out + "_summary.json", summary.dump(2) + "\n"}});
        std::printf(
            "wrote %s_records.csv and %s_summary.json\n"
            "tuples: %zu total, %zu passed, %zu filtered, %zu skipped, %zu failed\n"
            "equilibria: %zu (type1 %zu, type2 %zu, type3 %zu)\n",
            o->out.c_str(), o->out.c_str(), result.total, result.passed, result.filtered,
            result.skipped, result.failed, result.eq_total, result.eq_type1, result.eq_type2,
            result.eq_type3);
    });
}

// --------------------------------------------------------------- simulate ---

void setup_simulate(CLI::App& app) {
    struct opts {
        market_flags mf;
        config_file cf;
        long long n = 10000;
        double premium = -1.0;  // <0: net premium
        double capital = std::nan("");  // NaN: the minimum capital requirement
        long long trials = 1000000;
        std::uint64_t seed = 12345;
        unsigned jobs = 1;
        std::vector<long long> profile;
        std::string out = "simulate";
    };
    auto o = std::make_shared<opts>();
    CLI::App* sub = app.add_subcommand("simulate", "Monte Carlo ruin probability for a binomial claim book");
    add_market_flags(sub, o->mf, o->cf);
    o->cf.add("n", o->n);
    o->cf.add("trials", o->trials);
    o->cf.add("seed", o->seed);
    sub->add_option("--n", o->n, "book size (policies)")->check(CLI::PositiveNumber);
    sub->add_option("--premium", o->premium, "premium per policy (default: net premium)");
    sub->add_option("--capital", o->capital, "capital held (default: minimum requirement)");
    sub->add_option("--trials", o->trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o->seed, "RNG seed");
    sub->add_option("--jobs", o->jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--profile", o->profile, "book sizes for an approximation-error profile")
        ->delimiter(',');
    sub->add_option("--out", o->out, "output stem");

    sub->callback([o, sub] {
        o->cf.apply(sub);
        const insol::market_params p = to_params(o->mf);
        std::ostringstream body;
        insol::write_csv_row(body, {"n", "premium", "capital", "trials", "estimate", "std_error",
                                    "seed"});
        json params = market_json(o->mf);
        params["trials"] = o->trials;
        if (!o->profile.empty()) {
            std::vector<std::size_t> sizes(o->profile.begin(), o->profile.end());
            const auto rows = insol::approximation_error_profile(
                p, sizes, nullptr, static_cast<std::size_t>(o->trials), o->seed, o->jobs);
            for (const auto& row : rows) {
                insol::write_csv_row(
                    body, {std::to_string(row.n), insol::fmt_machine(row.premium),
                           insol::fmt_machine(row.capital), std::to_string(o->trials),
                           insol::fmt_machine(row.estimate), insol::fmt_machine(row.std_error),
                           std::to_string(o->seed)});
                std::printf("n=%lld  ruin=%.4f  se=%.5f  |ruin-0.005|=%.4f\n",
                            static_cast<long long>(row.n), row.estimate, row.std_error,
                            row.abs_error);
            }
            params["profile"] = o->profile;
        } else {
            insol::simulation_spec spec;
            spec.params = p;
            spec.n = static_cast<std::size_t>(o->n);
            spec.premium = o->premium < 0.0 ? p.net_premium() : o->premium;
            spec.capital = std::isnan(o->capital)
                               ? insol::mcr(p, static_cast<double>(o->n), spec.premium)
                               : o->capital;
            spec.trials = static_cast<std::size_t>(o->trials);
            spec.seed = o->seed;
            const auto est = insol::estimate_ruin_probability(spec, o->jobs);
            insol::write_csv_row(body, {std::to_string(o->n), insol::fmt_machine(spec.premium),
                                        insol::fmt_machine(spec.capital),
                                        std::to_string(o->trials), insol::fmt_machine(est.estimate),
                                        insol::fmt_machine(est.std_error),
                                        std::to_string(o->seed)});
            params["n"] = o->n;
            params["premium"] = spec.premium;
            params["capital"] = spec.capital;
            std::printf("ruin probability %.5f (se %.6f) from %lld trials\n", est.estimate,
                        est.std_error, o->trials);
        }
        write_with_manifest(o->out, o->out + ".csv", body.str(), "simulate", params, o->seed);
        std::printf("wrote %s.csv\n", o->out.c_str());
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"insolvency-constrained insurance market toolkit"};
    app.set_version_flag("--version", std::string(insol::version_string));
    app.require_subcommand(1);
    setup_curves(app);
    setup_equilibrium(app);
    setup_payoff_matrix(app);
    setup_solve(app);
    setup_sweep(app);
    setup_simulate(app);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForVersion& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return std::string(e.what()).find("not viable") != std::string::npos ? 3 : 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}
