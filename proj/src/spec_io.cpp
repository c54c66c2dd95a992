#include "fkit/spec_io.hpp"

#include <fstream>
#include <set>

#include "fkit/errors.hpp"

namespace fkit {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& ctx) {
    if (!j.is_object()) throw SpecFormatError(ctx + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (!required.count(item.key()) && !optional.count(item.key()))
            throw SpecFormatError("unknown field '" + item.key() + "' in " + ctx);
    }
    for (const std::string& key : required)
        if (!j.contains(key)) throw SpecFormatError("missing field '" + key + "' in " + ctx);
}

ExprPtr expression_from(const json& v, const std::string& ctx) {
    if (v.is_string()) return parse_expression(v.get<std::string>());
    if (v.is_number()) return make_number(v.get<double>());
    throw SpecFormatError(ctx + " must be an expression string or a number");
}

ExprEntry entry_from(const json& v, const std::string& ctx) {
    if (v.is_string() || v.is_number()) return {expression_from(v, ctx), make_number(0.0)};
    if (v.is_object()) {
        require_keys(v, {"re", "im"}, {}, ctx);
        return {expression_from(v.at("re"), ctx + ".re"), expression_from(v.at("im"), ctx + ".im")};
    }
    throw SpecFormatError(ctx + " must be an expression or {\"re\",\"im\"}");
}

std::complex<double> complex_from(const json& v, const std::string& ctx) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_object()) {
        require_keys(v, {"re", "im"}, {}, ctx);
        if (!v.at("re").is_number() || !v.at("im").is_number())
            throw SpecFormatError(ctx + ".re/.im must be numbers");
        return {v.at("re").get<double>(), v.at("im").get<double>()};
    }
    throw SpecFormatError(ctx + " must be a number or {\"re\",\"im\"}");
}

CoefficientField field_from(const json& j, int n, const std::string& ctx) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw SpecFormatError(ctx + " must be an " + std::to_string(n) + " x " +
                              std::to_string(n) + " array");
    std::vector<ExprEntry> entries(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const json& row = j.at(static_cast<size_t>(i));
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw SpecFormatError(ctx + " row " + std::to_string(i) + " has the wrong length");
        for (int k = 0; k < n; ++k)
            entries[static_cast<size_t>(i) * n + k] =
                entry_from(row.at(static_cast<size_t>(k)),
                           ctx + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return CoefficientField(n, std::move(entries));
}

Eigen::MatrixXcd matrix_from(const json& j, int cols, const std::string& ctx) {
    if (!j.is_array() || j.empty()) throw SpecFormatError(ctx + " must be a nonempty array");
    int rows = static_cast<int>(j.size());
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j.at(static_cast<size_t>(i));
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw SpecFormatError(ctx + " row " + std::to_string(i) + " has the wrong length");
        for (int k = 0; k < cols; ++k)
            m(i, k) = complex_from(row.at(static_cast<size_t>(k)),
                                   ctx + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

}  // namespace

FriedrichsSpec load_spec_json(const json& j) {
    require_keys(j, {"field", "interval", "dimension", "A", "C"}, {"degeneracy", "tolerances"},
                 "spec");

    FriedrichsSpec spec;
    std::string field = j.at("field").get<std::string>();
    if (field == "real")
        spec.field = ScalarField::real;
    else if (field == "complex")
        spec.field = ScalarField::cplx;
    else
        throw SpecFormatError("field must be \"real\" or \"complex\"");

    const json& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2 || !iv.at(0).is_number() || !iv.at(1).is_number())
        throw SpecFormatError("interval must be [a, b]");
    spec.a = iv.at(0).get<double>();
    spec.b = iv.at(1).get<double>();
    if (!(spec.a < spec.b)) throw SpecFormatError("interval must satisfy a < b");

    if (!j.at("dimension").is_number_integer() || j.at("dimension").get<int>() < 1)
        throw SpecFormatError("dimension must be a positive integer");
    spec.n = j.at("dimension").get<int>();

    spec.A = field_from(j.at("A"), spec.n, "A");
    spec.C = field_from(j.at("C"), spec.n, "C");

    if (j.contains("degeneracy")) {
        const json& dg = j.at("degeneracy");
        if (!dg.is_array()) throw SpecFormatError("degeneracy must be an array");
        for (const json& f : dg) {
            require_keys(f, {"block", "endpoint"}, {}, "degeneracy entry");
            DegeneracyFlag flag;
            if (!f.at("block").is_number_integer())
                throw SpecFormatError("degeneracy block must be an integer");
            flag.block = f.at("block").get<int>();
            std::string ep = f.at("endpoint").get<std::string>();
            if (ep == "left")
                flag.endpoint = Endpoint::left;
            else if (ep == "right")
                flag.endpoint = Endpoint::right;
            else
                throw SpecFormatError("degeneracy endpoint must be \"left\" or \"right\"");
            spec.degeneracy.push_back(flag);
        }
    }

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        require_keys(t, {}, {"grid", "rank_tol", "psd_tol", "ode_rtol"}, "tolerances");
        if (t.contains("grid")) spec.tol.grid = t.at("grid").get<int>();
        if (t.contains("rank_tol")) spec.tol.rank_tol = t.at("rank_tol").get<double>();
        if (t.contains("psd_tol")) spec.tol.psd_tol = t.at("psd_tol").get<double>();
        if (t.contains("ode_rtol")) spec.tol.ode_rtol = t.at("ode_rtol").get<double>();
        if (spec.tol.grid < 2 || spec.tol.rank_tol <= 0 || spec.tol.psd_tol <= 0 ||
            spec.tol.ode_rtol <= 0)
            throw SpecFormatError("tolerances out of range");
    }
    return spec;
}

FriedrichsSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open spec file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SpecFormatError("spec file is not valid JSON: " + std::string(e.what()));
    }
    return load_spec_json(j);
}

BoundaryCondition parse_boundary_condition(const json& j, int n) {
    require_keys(j, {"kind"}, {"vectors", "Ma", "Mb", "alpha"}, "boundary condition");
    std::string kind = j.at("kind").get<std::string>();
    BoundaryCondition bc;
    if (kind == "span") {
        require_keys(j, {"kind", "vectors"}, {}, "span boundary condition");
        const json& vecs = j.at("vectors");
        if (!vecs.is_array()) throw SpecFormatError("vectors must be an array");
        if (vecs.empty()) {
            bc.vectors = Eigen::MatrixXcd(2 * n, 0);
        } else {
            Eigen::MatrixXcd rows = matrix_from(vecs, 2 * n, "vectors");
            bc.vectors = rows.transpose();  // entries listed per vector
        }
        bc.kind = BoundaryCondition::Kind::span;
        return bc;
    }
    if (kind == "matrices") {
        require_keys(j, {"kind", "Ma", "Mb"}, {}, "matrices boundary condition");
        bc.Ma = matrix_from(j.at("Ma"), n, "Ma");
        bc.Mb = matrix_from(j.at("Mb"), n, "Mb");
        if (bc.Ma.rows() != bc.Mb.rows())
            throw SpecFormatError("Ma and Mb must have the same number of rows");
        bc.kind = BoundaryCondition::Kind::matrices;
        return bc;
    }
    if (kind == "alpha") {
        require_keys(j, {"kind", "alpha"}, {}, "alpha boundary condition");
        const json& a = j.at("alpha");
        bc.kind = BoundaryCondition::Kind::alpha;
        if (a.is_string()) {
            if (a.get<std::string>() != "inf")
                throw SpecFormatError("alpha must be a number, {\"re\",\"im\"}, or \"inf\"");
            bc.alpha_infinite = true;
        } else {
            bc.alpha = complex_from(a, "alpha");
        }
        return bc;
    }
    throw SpecFormatError("boundary condition kind must be span, matrices, or alpha");
}

BoundaryCondition parse_boundary_condition_text(const std::string& text, int n) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SpecFormatError("boundary condition is not valid JSON: " + std::string(e.what()));
    }
    return parse_boundary_condition(j, n);
}

TraceSubspace realize_boundary_condition(const BoundaryCondition& bc, const TraceForm& tf,
                                         double rank_tol) {
    switch (bc.kind) {
        case BoundaryCondition::Kind::span:
            return subspace_from_full_vectors(bc.vectors, tf, rank_tol);
        case BoundaryCondition::Kind::matrices:
            return subspace_from_constraints(bc.Ma, bc.Mb, tf, rank_tol);
        case BoundaryCondition::Kind::alpha:
            return subspace_from_alpha(bc.alpha, bc.alpha_infinite, tf);
    }
    throw SpecFormatError("invalid boundary condition");
}

CoefficientField load_coefficient_json(const json& j, int n) {
    return field_from(j, n, "coefficient");
}

std::vector<CoefficientField> load_samples_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open samples file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SpecFormatError("samples file is not valid JSON: " + std::string(e.what()));
    }
    require_keys(j, {"C_samples"}, {}, "samples file");
    const json& arr = j.at("C_samples");
    if (!arr.is_array() || arr.empty())
        throw SpecFormatError("C_samples must be a nonempty array");
    std::vector<CoefficientField> out;
    for (const json& c : arr) out.push_back(field_from(c, n, "C_samples entry"));
    return out;
}

std::vector<ExprEntry> parse_rhs_list(const std::string& text, int n) {
    std::vector<std::string> pieces;
    std::string current;
    for (char ch : text) {
        if (ch == ',') {
            pieces.push_back(current);
            current.clear();
        } else {
            current += ch;
        }
    }
    pieces.push_back(current);
    if (static_cast<int>(pieces.size()) != n)
        throw UsageError("expected " + std::to_string(n) + " comma-separated expressions, got " +
                         std::to_string(pieces.size()));
    std::vector<ExprEntry> out;
    for (const std::string& p : pieces) out.push_back({parse_expression(p), make_number(0.0)});
    return out;
}

}  // namespace fkit
