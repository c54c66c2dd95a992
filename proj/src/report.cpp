#include "fkit/report.hpp"

#include <charconv>
#include <sstream>

namespace fkit {

namespace {

const char* cone_name(ConeClass c) {
    switch (c) {
        case ConeClass::nonneg: return "nonneg";
        case ConeClass::nonpos: return "nonpos";
        case ConeClass::neutral: return "neutral";
        case ConeClass::neither: return "neither";
    }
    return "?";
}

Report header(const char* command) {
    Report r;
    r["schema_version"] = "1";
    r["command"] = command;
    return r;
}

Report flags_json(const RealisationReport& rep) {
    Report r;
    r["bijective"] = rep.bijective;
    r["in_w_plus"] = rep.in_w_plus;
    r["signed_boundary_map"] = rep.signed_boundary_map;
    r["symmetric"] = rep.symmetric;
    r["selfadjoint_type"] = rep.selfadjoint_type;
    return r;
}

Report u_json(const RealisationReport& rep, const KernelBases& kb) {
    if (!rep.U) return Report(nullptr);
    Report u;
    u["domain_dim"] = rep.U->domain_dim();
    // image coordinates in the orthonormal basis of ker T1 traces
    u["matrix"] = matrix_json(kb.K.basis.adjoint() * rep.U->images);
    u["norm_indefinite"] = rep.U->norm_indefinite;
    return u;
}

}  // namespace

Report complex_json(std::complex<double> z) {
    Report r;
    r["re"] = z.real();
    r["im"] = z.imag();
    return r;
}

Report matrix_json(const Eigen::MatrixXcd& m) {
    Report rows = Report::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Report row = Report::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Report validate_report(const FriedrichsSpec& spec, const PartsDecomposition& parts,
                       const TraceForm& tf) {
    Report r = header("validate");
    r["valid"] = true;
    r["field"] = spec.field == ScalarField::real ? "real" : "complex";
    r["interval"] = {spec.a, spec.b};
    r["dimension"] = spec.n;
    r["effective_trace_dimension"] = tf.eff_dim();
    r["mu"] = parts.mu;
    r["lambda"] = parts.lambda;
    r["mu_margin"] = parts.mu_margin;
    r["grid_points"] = parts.grid_points;
    return r;
}

Report kernels_report(const FriedrichsSpec& spec, const TraceForm& tf, const KernelBases& kb) {
    Report r = header("kernels");
    r["dimension"] = spec.n;
    r["effective_trace_dimension"] = tf.eff_dim();
    auto [pos, neg] = tf.signature();
    r["signature"] = {pos, neg};
    r["d_plus"] = kb.d_plus();
    r["d_minus"] = kb.d_minus();
    r["K"] = matrix_json(kb.K.basis);
    r["Kt"] = matrix_json(kb.Kt.basis);
    return r;
}

Report classify_report(const RealisationReport& rep, const KernelBases& kb, const TraceForm& tf,
                       const std::optional<std::complex<double>>& alpha_beta) {
    Report r = header("classify");
    r.update(flags_json(rep));
    r["U"] = u_json(rep, kb);
    r["alpha_beta"] = alpha_beta ? complex_json(*alpha_beta) : Report(nullptr);
    r["m_count"] = to_string(count_mutually_adjoint(kb.d_plus(), kb.d_minus(), tf.field));
    Report diag;
    diag["dim_v"] = rep.V.dim();
    diag["dim_v_perp"] = rep.V_perp.dim();
    diag["cone_v"] = cone_name(rep.cone_v);
    diag["cone_v_perp"] = cone_name(rep.cone_v_perp);
    diag["min_compressed_eigenvalue"] = rep.min_compressed_eigenvalue;
    diag["isometry_defect"] = rep.isometry_defect;
    diag["perp_distance"] = rep.perp_distance;
    diag["stacked_rank"] = rep.bij.stacked_rank;
    r["diagnostics"] = diag;
    return r;
}

Report sweep_report(const AlphaSweepResult& sweep, const KernelBases& kb, const TraceForm& tf) {
    Report r = header("sweep-alpha");
    r["alpha_beta"] = complex_json(sweep.alpha_beta);
    r["m_count"] = to_string(count_mutually_adjoint(kb.d_plus(), kb.d_minus(), tf.field));
    Report entries = Report::array();
    for (const AlphaSweepEntry& e : sweep.entries) {
        Report row;
        row["alpha"] = e.alpha.infinite ? Report("inf") : complex_json(e.alpha.value);
        row.update(flags_json(e.report));
        entries.push_back(row);
    }
    r["entries"] = entries;
    return r;
}

Report defect_report(const InvarianceVerdict& verdict) {
    Report r = header("defect");
    Report table = Report::array();
    for (const InvarianceRow& row : verdict.table) {
        Report t;
        t["sample"] = row.sample;
        t["d_plus"] = row.d_plus;
        t["d_minus"] = row.d_minus;
        table.push_back(t);
    }
    r["table"] = table;
    r["verdict"] = verdict.pass ? "PASS" : "FAIL";
    return r;
}

Report count_report(const KernelBases& kb, ScalarField field) {
    Report r = header("count");
    r["d_plus"] = kb.d_plus();
    r["d_minus"] = kb.d_minus();
    r["m"] = to_string(count_mutually_adjoint(kb.d_plus(), kb.d_minus(), field));
    return r;
}

Report solve_report(const BoundaryValueSolution& sol, const std::string& csv_path) {
    Report r = header("solve");
    r["residual_l2"] = sol.residual_l2;
    r["trace_distance"] = sol.trace_distance;
    r["norm_u"] = sol.norm_u;
    r["norm_t1u"] = sol.norm_t1u;
    r["bound_ratio"] = sol.bound_ratio;
    r["condition"] = sol.condition;
    r["mu"] = sol.mu;
    r["trace"] = matrix_json(sol.trace);
    if (!csv_path.empty()) r["csv"] = csv_path;
    return r;
}

namespace {

void render_lines(const Report& r, const std::string& prefix, std::ostringstream& out) {
    if (r.is_object()) {
        for (const auto& item : r.items()) {
            std::string key = prefix.empty() ? item.key() : prefix + "." + item.key();
            render_lines(item.value(), key, out);
        }
        return;
    }
    if (r.is_array()) {
        bool scalar_only = true;
        for (const auto& v : r)
            scalar_only = scalar_only && !v.is_object() && !v.is_array();
        if (scalar_only) {
            out << prefix << " = " << r.dump() << "\n";
            return;
        }
        int idx = 0;
        for (const auto& v : r) render_lines(v, prefix + "[" + std::to_string(idx++) + "]", out);
        return;
    }
    out << prefix << " = " << r.dump() << "\n";
}

}  // namespace

std::string render_text(const Report& r) {
    std::ostringstream out;
    render_lines(r, "", out);
    return out.str();
}

std::string trajectory_csv(const Trajectory& u, int samples) {
    std::ostringstream out;
    out << "x";
    for (int k = 1; k <= u.n; ++k) out << ",Re u" << k << ",Im u" << k;
    out << "\n";
    char buf[40];
    auto put = [&out, &buf](double v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.write(buf, res.ptr - buf);
    };
    for (int s = 0; s < samples; ++s) {
        double x = u.lo + (u.hi - u.lo) * s / (samples - 1);
        put(x);
        Eigen::VectorXcd v = u.value(x);
        for (int k = 0; k < u.n; ++k) {
            out << ",";
            put(v[k].real());
            out << ",";
            put(v[k].imag());
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace fkit
