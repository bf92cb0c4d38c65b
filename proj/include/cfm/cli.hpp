#pragma once

// Command-line front end: `solve` runs a convergence study for one case.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfm/harness.hpp"

namespace cfm {

struct RunConfig {
    std::string case_name = "ex1";
    int order = 4;
    std::string basis;     // empty: bicubic for order 4, mb for order 2
    std::string strategy;  // empty: compact for order 4, free for order 2
    double penalty = 50.0;
    std::vector<int> grids{33, 65, 97, 129, 193};
    std::string out;
    std::string dump_fields;  // finest grid
    std::string dump_boxes;   // finest grid
    bool timing = true;
    bool gradient = true;

    SolveOptions options() const {
        SolveOptions o = SolveOptions::defaults(order);
        if (!basis.empty()) {
            o.cauchy.basis = basis == "bicubic" ? BasisKind::Bicubic12
                             : basis == "mb"    ? BasisKind::ModifiedBilinear5
                                                : BasisKind::StandardBilinear4;
            const auto s = o.cauchy.strategy;
            o.cauchy = CauchyConfig::defaults(o.cauchy.basis, s);
        }
        if (!strategy.empty())
            o.cauchy.strategy = strategy == "naive"     ? OmegaStrategy::Naive
                                : strategy == "compact" ? OmegaStrategy::Compact
                                : strategy == "free"    ? OmegaStrategy::Free
                                                        : OmegaStrategy::NodeCentered;
        o.cauchy.penalty = penalty;
        o.gradient = gradient;
        return o;
    }
};

namespace cli_detail {

inline bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot open " << path << " for writing\n";
        return false;
    }
    f << text;
    return static_cast<bool>(f);
}

}  // namespace cli_detail

/// Exit codes: 0 ok, 1 solver or I/O failure, 2 usage error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Poisson problems with interface jumps: convergence studies"};
    app.require_subcommand(1);
    RunConfig cfg;
    auto* solve = app.add_subcommand("solve", "run a convergence study");
    std::vector<std::string> case_names;
    for (const auto& [name, c] : builtin_cases()) case_names.push_back(name);
    solve->add_option("--case", cfg.case_name, "benchmark case")->check(CLI::IsMember(case_names));
    solve->add_option("--order", cfg.order, "scheme order")->check(CLI::IsMember({2, 4}));
    solve->add_option("--basis", cfg.basis, "local basis for D")->check(CLI::IsMember({"bicubic", "mb", "sb"}));
    solve->add_option("--strategy", cfg.strategy, "construction of the local boxes")
        ->check(CLI::IsMember({"naive", "compact", "free", "node"}));
    solve->add_option("--cp", cfg.penalty, "penalty coefficient")->check(CLI::PositiveNumber);
    solve->add_option("--grids", cfg.grids, "nodes per axis, refining")->delimiter(',')->check(CLI::Range(3, 100000));
    solve->add_option("--out", cfg.out, "convergence CSV (stdout if omitted)");
    solve->add_option("--dump-fields", cfg.dump_fields, "nodal fields on the finest grid");
    solve->add_option("--dump-boxes", cfg.dump_boxes, "local box diagnostics on the finest grid");
    solve->add_flag("!--no-timing", cfg.timing, "write 0 in the seconds column");
    solve->add_flag("!--no-gradient", cfg.gradient, "skip gradient recovery");
    // config is read by the top-level app; keys go under a [solve] section
    app.set_config("--config", "", "INI/TOML file, keys of `solve` under [solve]");
    solve->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    const auto cases = builtin_cases();
    const CaseDefinition& c = cases.at(cfg.case_name);
    SolveOptions opt;
    try {
        opt = cfg.options();
        opt.cauchy.validate();
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    const int finest = cfg.grids.empty() ? 0 : *std::max_element(cfg.grids.begin(), cfg.grids.end());
    std::string fields_text, boxes_text;
    std::size_t elongated = 0;
    auto capture = [&](const Solution& s) {
        elongated += count_elongated(s.corrections.boxes);
        if (s.grid.nx() != finest) return;
        if (!cfg.dump_fields.empty()) {
            std::ostringstream os;
            write_fields(os, s, c);
            fields_text = os.str();
        }
        if (!cfg.dump_boxes.empty()) {
            std::ostringstream os;
            write_box_diagnostics(os, s.corrections.boxes);
            boxes_text = os.str();
        }
    };

    ConvergenceReport rep, partial;
    try {
        rep = convergence_study(c, cfg.grids, opt, &partial, capture);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const SingularSystem& e) {
        err << "solver failure: " << e.what() << " (condition " << e.condition() << ")\n";
        partial.write_csv(err, cfg.timing);
        return 1;
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        partial.write_csv(err, cfg.timing);
        return 1;
    } catch (const GeometryFailure& e) {
        err << "geometry failure: " << e.what() << '\n';
        partial.write_csv(err, cfg.timing);
        return 1;
    }

    std::ostringstream csv;
    rep.write_csv(csv, cfg.timing);
    if (cfg.out.empty()) out << csv.str();
    else if (!cli_detail::write_file(cfg.out, csv.str(), err)) return 1;
    if (!cfg.dump_fields.empty() && !cli_detail::write_file(cfg.dump_fields, fields_text, err)) return 1;
    if (!cfg.dump_boxes.empty() && !cli_detail::write_file(cfg.dump_boxes, boxes_text, err)) return 1;
    rep.write_slopes(out);
    if (elongated > 0)
        err << "warning: " << elongated << " local boxes with aspect ratio above " << kElongatedAspect
            << "; consider --strategy free or node\n";
    return 0;
}

}  // namespace cfm
