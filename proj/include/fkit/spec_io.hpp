#ifndef FKIT_SPEC_IO_HPP
#define FKIT_SPEC_IO_HPP

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkit/spec.hpp"
#include "fkit/trace_space.hpp"

namespace fkit {

// Spec files are strict JSON: unknown fields are errors and a malformed file
// never yields a partial spec. See README for the format.
FriedrichsSpec load_spec_json(const nlohmann::json& j);
FriedrichsSpec load_spec_file(const std::string& path);

// Boundary-condition block:
//   {"kind":"span","vectors":[[...], ...]}     trace vectors of length 2n
//   {"kind":"matrices","Ma":[...],"Mb":[...]}  V = { t : Ma t_a + Mb t_b = 0 }
//   {"kind":"alpha","alpha": number|"inf"|{"re":..,"im":..}}
struct BoundaryCondition {
    enum class Kind { span, matrices, alpha };
    Kind kind = Kind::alpha;

    Eigen::MatrixXcd vectors;  // span: columns are full trace vectors
    Eigen::MatrixXcd Ma, Mb;   // matrices
    std::complex<double> alpha{0.0, 0.0};
    bool alpha_infinite = false;
};

BoundaryCondition parse_boundary_condition(const nlohmann::json& j, int n);
BoundaryCondition parse_boundary_condition_text(const std::string& text, int n);

TraceSubspace realize_boundary_condition(const BoundaryCondition& bc, const TraceForm& tf,
                                         double rank_tol = 1e-8);

// Coefficient matrix in the A/C entry convention (used by defect sample files).
CoefficientField load_coefficient_json(const nlohmann::json& j, int n);

// {"C_samples": [ <n x n matrix>, ... ]}
std::vector<CoefficientField> load_samples_file(const std::string& path, int n);

// Comma-separated expression list ("1-x, exp(-x)") into n components.
std::vector<ExprEntry> parse_rhs_list(const std::string& text, int n);

}  // namespace fkit

#endif
