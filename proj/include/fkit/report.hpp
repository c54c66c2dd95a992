#ifndef FKIT_REPORT_HPP
#define FKIT_REPORT_HPP

#include <complex>
#include <optional>
#include <string>

#include <json.hpp>

#include "fkit/classification.hpp"
#include "fkit/defect.hpp"
#include "fkit/solver.hpp"
#include "fkit/spec.hpp"
#include "fkit/trace_space.hpp"

namespace fkit {

// All reports are nlohmann ordered JSON with a fixed key order, so identical
// runs serialize byte-identically. schema_version "1".
using Report = nlohmann::ordered_json;

Report complex_json(std::complex<double> z);
Report matrix_json(const Eigen::MatrixXcd& m);

Report validate_report(const FriedrichsSpec& spec, const PartsDecomposition& parts,
                       const TraceForm& tf);
Report kernels_report(const FriedrichsSpec& spec, const TraceForm& tf, const KernelBases& kb);
Report classify_report(const RealisationReport& rep, const KernelBases& kb, const TraceForm& tf,
                       const std::optional<std::complex<double>>& alpha_beta = std::nullopt);
Report sweep_report(const AlphaSweepResult& sweep, const KernelBases& kb, const TraceForm& tf);
Report defect_report(const InvarianceVerdict& verdict);
Report count_report(const KernelBases& kb, ScalarField field);
Report solve_report(const BoundaryValueSolution& sol, const std::string& csv_path);

// Aligned-text view of any report (same data as the JSON).
std::string render_text(const Report& r);

// Trajectory samples as CSV: x, Re u1, Im u1, ...
std::string trajectory_csv(const Trajectory& u, int samples);

}  // namespace fkit

#endif
