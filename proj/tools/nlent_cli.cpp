// nlent_cli.cpp: command-line front end: sweep, check, plotdata

#include "nlent/errors.hpp"
#include "nlent/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Overrides {
    std::string config_path;
    std::string out;
    std::string dims;
    std::string hierarchy;
    double xi_max = -1.0;
    double alpha_p = -1.0;
    int k = 0;
    int l = 0;
    bool with_nz = false;
    unsigned workers = 0;
};

void add_config_options(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--xi-max", o.xi_max, "largest xi of the uniform grid");
    cmd->add_option("--alpha-p", o.alpha_p, "pump coherent amplitude");
    cmd->add_option("--dims", o.dims, "truncation dimensions P,A,B");
    cmd->add_option("--hierarchy", o.hierarchy, "hierarchy indices, e.g. 1,2,3");
    cmd->add_option("--k", o.k, "power of a in the interaction");
    cmd->add_option("--l", o.l, "power of b in the interaction");
    cmd->add_option("--workers", o.workers, "evaluation threads (0: all cores)");
    cmd->add_flag("--with-nz", o.with_nz, "also evaluate the Nha-Zubairy comparator");
}

nlent::SweepConfig resolve(const Overrides& o)
{
    nlent::SweepConfig c;
    if (!o.config_path.empty()) c = nlent::load_config(o.config_path, c);
    if (o.k > 0) c.k = o.k;
    if (o.l > 0) c.l = o.l;
    if (o.xi_max >= 0.0) {
        c.xi_max = o.xi_max;
        c.xi_grid.clear();
    }
    if (o.alpha_p > 0.0) c.alpha_p = o.alpha_p;
    if (!o.dims.empty()) nlent::apply_setting(c, "dims", o.dims);
    if (!o.hierarchy.empty()) nlent::apply_setting(c, "hierarchy", o.hierarchy);
    if (o.with_nz) c.with_nz = true;
    if (o.workers > 0) c.workers = o.workers;
    if (!o.out.empty()) c.output = o.out;
    c.validate();
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Higher-order covariance entanglement criteria for nonlinear down-conversion"};
    app.require_subcommand(1);

    Overrides sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "evolve and evaluate every (xi, n) point, write CSV");
    add_config_options(sweep, sweep_opts);
    sweep->add_option("--out", sweep_opts.out, "CSV output path");

    Overrides check_opts;
    auto* check = app.add_subcommand("check", "rerun a subsample with larger truncation and compare witnesses");
    add_config_options(check, check_opts);
    check->add_option("--out", check_opts.out, "report path (default: stdout)");

    std::string plot_in;
    std::string plot_out;
    std::vector<std::string> series;
    auto* plot = app.add_subcommand("plotdata", "extract (xi, value) series from a sweep CSV");
    plot->add_option("--in", plot_in, "sweep CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "series output path (default: stdout)");
    plot->add_option("--series", series, "column[:n], e.g. nu_minus:2 nz")->delimiter(',')->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            const nlent::SweepConfig config = resolve(sweep_opts);
            const auto rows = nlent::run_sweep(config);
            nlent::write_csv(rows, config, config.output);
            std::size_t flagged = 0;
            for (const auto& r : rows) flagged += r.flagged() ? 1 : 0;
            std::cerr << "wrote " << rows.size() << " rows to " << config.output;
            if (flagged) std::cerr << " (" << flagged << " flagged)";
            std::cerr << '\n';
            return nlent::exit_code(rows);
        }
        if (*check) {
            Overrides o = check_opts;
            const std::string report_path = o.out;
            o.out.clear();
            const nlent::SweepConfig config = resolve(o);
            const auto report = nlent::convergence_check(config);
            if (report_path.empty()) {
                nlent::print_report(report, std::cout);
            } else {
                std::ofstream out(report_path);
                if (!out) throw nlent::ConfigError("cannot write '" + report_path + "'");
                nlent::print_report(report, out);
            }
            return report.passed ? 0 : 1;
        }
        if (*plot) {
            std::vector<nlent::SeriesSpec> specs;
            for (const auto& s : series) specs.push_back(nlent::parse_series(s));
            const auto rows = nlent::read_csv(plot_in);
            if (plot_out.empty()) {
                nlent::emit_plot_data(rows, specs, std::cout);
            } else {
                std::ofstream out(plot_out);
                if (!out) throw nlent::ConfigError("cannot write '" + plot_out + "'");
                nlent::emit_plot_data(rows, specs, out);
            }
            return 0;
        }
    } catch (const nlent::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
