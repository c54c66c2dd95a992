#ifndef FKIT_CLASSIFICATION_HPP
#define FKIT_CLASSIFICATION_HPP

#include <complex>
#include <optional>
#include <vector>

#include "fkit/spec.hpp"
#include "fkit/trace_space.hpp"

namespace fkit {

// Classifying operator U : Gt -> ker T1 with Gt <= ker Tt1, defined by sending
// the Kt-component of each element of V to its K-component.
struct ClassifyingMap {
    Eigen::MatrixXcd domain_basis;  // eff x g, orthonormal basis of Gt
    Eigen::MatrixXcd images;        // eff x g, image of each domain column
    // operator norm between the kernel Hilbert norms sqrt([.|.]) on Kt and
    // sqrt(-[.|.]) on K (largest generalized singular value)
    double norm_indefinite = 0.0;

    int domain_dim() const { return static_cast<int>(domain_basis.cols()); }
};

struct BijectivityCheck {
    bool bijective = false;
    bool trivial_intersection = false;  // V cap ker T1 = {0}
    bool complements_kernel = false;    // dim V + dim K = effective dim
    int stacked_rank = 0;
};

struct RealisationReport {
    TraceSubspace V;
    TraceSubspace V_perp;

    bool bijective = false;
    bool in_w_plus = false;
    bool signed_boundary_map = false;
    bool symmetric = false;         // V <= V^[perp]
    bool selfadjoint_type = false;  // V  = V^[perp]

    std::optional<ClassifyingMap> U;  // absent when V cap ker T1 != {0}

    // diagnostics
    ConeClass cone_v = ConeClass::neither;
    ConeClass cone_v_perp = ConeClass::neither;
    double min_compressed_eigenvalue = 0.0;
    double isometry_defect = 0.0;   // ||images^H(-Q)images - D^H Q D|| (relative)
    double perp_distance = 1.0;     // subspace distance between V and V^[perp]
    BijectivityCheck bij;
};

BijectivityCheck is_bijective(const TraceSubspace& v, const KernelBases& kb, const TraceForm& tf,
                              double rank_tol = 1e-8);

// Throws WellDefinednessError when V cap ker T1 != {0}.
ClassifyingMap build_U(const TraceSubspace& v, const KernelBases& kb, const TraceForm& tf,
                       double rank_tol = 1e-8);

// Trace span of { U nu + nu : nu in Gt }.
TraceSubspace build_V_from_U(const ClassifyingMap& u, const KernelBases& kb,
                             double rank_tol = 1e-8);

// All category flags, decided by subspace geometry and cross-validated against
// the U-based criteria; a clear disagreement raises InternalInconsistency.
RealisationReport classify(const TraceSubspace& v, const KernelBases& kb, const TraceForm& tf,
                           const Tolerances& tol = {});

enum class AdjointCount { zero, one, two, infinite };

AdjointCount count_mutually_adjoint(int d_plus, int d_minus, ScalarField field);
const char* to_string(AdjointCount c);

// A subspace with V = V^[perp], built from an indefinite-Gram unitary between
// the kernels; exists exactly when d+ = d-.
TraceSubspace make_neutral_realisation(const KernelBases& kb, const TraceForm& tf);

struct AlphaValue {
    std::complex<double> value{0.0, 0.0};
    bool infinite = false;

    static AlphaValue finite(std::complex<double> v) { return {v, false}; }
    static AlphaValue inf() { return {{0.0, 0.0}, true}; }
};

struct AlphaSweepEntry {
    AlphaValue alpha;
    RealisationReport report;
};

struct AlphaSweepResult {
    std::vector<AlphaSweepEntry> entries;
    std::complex<double> alpha_beta{0.0, 0.0};  // scalar Phi(b), the non-bijective alpha
};

// Scalar systems only: classifies V_alpha = {u(b) = alpha u(a)} over the grid
// (entries in grid order; grid points may be evaluated concurrently).
// alpha_beta is the scalar fundamental value Phi(b), cross-checked against
// exp(-int C/A).
AlphaSweepResult sweep_alpha(const FriedrichsSpec& spec, const std::vector<AlphaValue>& alphas);

// Encodes the symmetric operator A = -i (M d/dx + M'/2) together with bounded
// Hermitian S1 and strictly positive Hermitian S2 as the first-order system
// T0 = iA - iS1 + S2, whose classification reproduces the extension theory of A.
FriedrichsSpec symmetric_adapter(const CoefficientField& m_field, const CoefficientField& s1,
                                 const CoefficientField& s2, double lo, double hi);

}  // namespace fkit

#endif
