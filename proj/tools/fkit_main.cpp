// Command-line front end: spec-file ingestion, classification reports, defect
// tables and boundary-value solves. All reports are deterministic JSON
// (schema_version "1"); --format text renders the same data as aligned text.

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fkit/classification.hpp"
#include "fkit/defect.hpp"
#include "fkit/errors.hpp"
#include "fkit/report.hpp"
#include "fkit/solver.hpp"
#include "fkit/spec_io.hpp"

namespace {

struct CommonOptions {
    std::string spec_path;
    std::string format = "json";
    std::string out_path;
    std::optional<int> grid;
    std::optional<double> rank_tol;
    std::optional<double> psd_tol;
    std::optional<double> ode_rtol;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--spec", opt.spec_path, "spec file (JSON)")->required();
    cmd->add_option("--format", opt.format, "output format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--out", opt.out_path, "write the report to a file instead of stdout");
    cmd->add_option("--grid", opt.grid, "validation sample count (default 4096)");
    cmd->add_option("--rank-tol", opt.rank_tol, "relative rank threshold (default 1e-8)");
    cmd->add_option("--psd-tol", opt.psd_tol, "relative cone threshold (default 1e-8)");
    cmd->add_option("--ode-rtol", opt.ode_rtol, "integrator relative tolerance (default 1e-10)");
}

fkit::FriedrichsSpec load_spec(const CommonOptions& opt) {
    fkit::FriedrichsSpec spec = fkit::load_spec_file(opt.spec_path);
    if (opt.grid) spec.tol.grid = *opt.grid;
    if (opt.rank_tol) spec.tol.rank_tol = *opt.rank_tol;
    if (opt.psd_tol) spec.tol.psd_tol = *opt.psd_tol;
    if (opt.ode_rtol) spec.tol.ode_rtol = *opt.ode_rtol;
    return spec;
}

void emit(const fkit::Report& report, const CommonOptions& opt) {
    std::string text =
        opt.format == "text" ? fkit::render_text(report) : report.dump(2) + "\n";
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path);
    if (!out) throw fkit::UsageError("cannot write to " + opt.out_path);
    out << text;
}

std::string read_block_argument(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw fkit::UsageError("cannot open " + arg.substr(1));
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return arg;
}

std::vector<fkit::AlphaValue> parse_alpha_grid(const std::string& list) {
    std::vector<fkit::AlphaValue> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t b = tok.find_first_not_of(" \t");
        size_t e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) throw fkit::UsageError("empty alpha token");
        tok = tok.substr(b, e - b + 1);
        if (tok == "inf") {
            out.push_back(fkit::AlphaValue::inf());
        } else {
            try {
                size_t used = 0;
                double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                out.push_back(fkit::AlphaValue::finite(v));
            } catch (const std::exception&) {
                throw fkit::UsageError("cannot parse alpha value '" + tok + "'");
            }
        }
    }
    if (out.empty()) throw fkit::UsageError("alpha grid is empty");
    return out;
}

// alpha_beta is only meaningful for scalar non-degenerate systems
std::optional<std::complex<double>> scalar_alpha_beta(const fkit::FriedrichsSpec& spec) {
    if (spec.n != 1 || spec.degenerate()) return std::nullopt;
    return fkit::fundamental_matrix(spec, fkit::OperatorVariant::maximal).at_end()(0, 0);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Friedrichs kit: boundary classification of first-order systems"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string bc_arg;
    std::string samples_path;
    std::string rhs_arg;
    std::string alpha_list = "-2,-1,-0.5,0,0.3,0.9,1,2,inf";
    std::string csv_path;
    int csv_samples = 1001;

    CLI::App* c_validate = app.add_subcommand("validate", "check the axioms and report mu, lambda");
    add_common(c_validate, opt);

    CLI::App* c_kernels = app.add_subcommand("kernels", "kernel trace bases and deficiency indices");
    add_common(c_kernels, opt);

    CLI::App* c_classify = app.add_subcommand("classify", "classify a boundary subspace");
    add_common(c_classify, opt);
    c_classify->add_option("--bc", bc_arg, "boundary condition (JSON or @file)")->required();

    CLI::App* c_sweep = app.add_subcommand("sweep-alpha", "classify V_alpha over an alpha grid");
    add_common(c_sweep, opt);
    c_sweep->add_option("--alphas", alpha_list, "comma-separated alphas, 'inf' allowed");

    CLI::App* c_defect = app.add_subcommand("defect", "deficiency-index invariance table");
    add_common(c_defect, opt);
    c_defect->add_option("--samples", samples_path, "JSON file with C_samples")->required();

    CLI::App* c_count = app.add_subcommand("count", "count mutually adjoint bijective realisations");
    add_common(c_count, opt);

    CLI::App* c_solve = app.add_subcommand("solve", "solve T u = f for a bijective realisation");
    add_common(c_solve, opt);
    c_solve->add_option("--bc", bc_arg, "boundary condition (JSON or @file)")->required();
    c_solve->add_option("--rhs", rhs_arg, "right-hand side expressions, comma separated")
        ->required();
    c_solve->add_option("--csv", csv_path, "write the trajectory as CSV (alias of --out here)");
    c_solve->add_option("--csv-samples", csv_samples, "CSV sample count (default 1001)");

    CLI::App* c_report = app.add_subcommand("report", "full dossier: validate, kernels, count, sweep");
    add_common(c_report, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 3;
    }

    try {
        if (c_validate->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            fkit::PartsDecomposition parts = fkit::validate_spec(spec);
            fkit::TraceForm tf = fkit::build_trace_form(spec);
            emit(fkit::validate_report(spec, parts, tf), opt);
        } else if (c_kernels->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            fkit::validate_spec(spec);
            fkit::TraceForm tf = fkit::build_trace_form(spec);
            fkit::KernelBases kb = fkit::kernel_traces(spec, tf);
            emit(fkit::kernels_report(spec, tf, kb), opt);
        } else if (c_classify->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            fkit::validate_spec(spec);
            fkit::TraceForm tf = fkit::build_trace_form(spec);
            fkit::KernelBases kb = fkit::kernel_traces(spec, tf);
            fkit::BoundaryCondition bc =
                fkit::parse_boundary_condition_text(read_block_argument(bc_arg), spec.n);
            fkit::TraceSubspace v = fkit::realize_boundary_condition(bc, tf, spec.tol.rank_tol);
            fkit::RealisationReport rep = fkit::classify(v, kb, tf, spec.tol);
            emit(fkit::classify_report(rep, kb, tf, scalar_alpha_beta(spec)), opt);
        } else if (c_sweep->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            fkit::validate_spec(spec);
            fkit::TraceForm tf = fkit::build_trace_form(spec);
            fkit::KernelBases kb = fkit::kernel_traces(spec, tf);
            fkit::AlphaSweepResult sweep = fkit::sweep_alpha(spec, parse_alpha_grid(alpha_list));
            emit(fkit::sweep_report(sweep, kb, tf), opt);
        } else if (c_defect->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            std::vector<fkit::CoefficientField> samples =
                fkit::load_samples_file(samples_path, spec.n);
            fkit::InvarianceVerdict verdict = fkit::invariance_harness(spec, samples);
            emit(fkit::defect_report(verdict), opt);
        } else if (c_count->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            fkit::validate_spec(spec);
            fkit::TraceForm tf = fkit::build_trace_form(spec);
            fkit::KernelBases kb = fkit::kernel_traces(spec, tf);
            emit(fkit::count_report(kb, spec.field), opt);
        } else if (c_solve->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            fkit::BvpSolver solver(spec);
            fkit::BoundaryCondition bc =
                fkit::parse_boundary_condition_text(read_block_argument(bc_arg), spec.n);
            fkit::TraceSubspace v =
                fkit::realize_boundary_condition(bc, solver.trace_form(), spec.tol.rank_tol);
            fkit::Trajectory f = fkit::trajectory_from_expressions(
                fkit::parse_rhs_list(rhs_arg, spec.n), spec.a, spec.b);
            fkit::BoundaryValueSolution sol = solver.solve(v, f.value);
            // for solve, --out names the CSV trajectory; the summary goes to stdout
            if (csv_path.empty()) csv_path = opt.out_path;
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv) throw fkit::UsageError("cannot write to " + csv_path);
                csv << fkit::trajectory_csv(sol.u, csv_samples);
            }
            CommonOptions stdout_opt = opt;
            stdout_opt.out_path.clear();
            emit(fkit::solve_report(sol, csv_path), stdout_opt);
        } else if (c_report->parsed()) {
            fkit::FriedrichsSpec spec = load_spec(opt);
            fkit::PartsDecomposition parts = fkit::validate_spec(spec);
            fkit::TraceForm tf = fkit::build_trace_form(spec);
            fkit::KernelBases kb = fkit::kernel_traces(spec, tf);
            fkit::Report dossier;
            dossier["schema_version"] = "1";
            dossier["command"] = "report";
            dossier["validate"] = fkit::validate_report(spec, parts, tf);
            dossier["kernels"] = fkit::kernels_report(spec, tf, kb);
            dossier["count"] = fkit::count_report(kb, spec.field);
            if (spec.n == 1 && !spec.degenerate()) {
                fkit::AlphaSweepResult sweep =
                    fkit::sweep_alpha(spec, parse_alpha_grid(alpha_list));
                dossier["sweep_alpha"] = fkit::sweep_report(sweep, kb, tf);
            } else {
                dossier["sweep_alpha"] = nullptr;
            }
            emit(dossier, opt);
        }
    } catch (const fkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.error_class()) {
            case fkit::ErrorClass::validation: return 1;
            case fkit::ErrorClass::numerical: return 2;
            case fkit::ErrorClass::usage: return 3;
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
