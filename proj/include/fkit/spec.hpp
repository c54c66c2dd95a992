#ifndef FKIT_SPEC_HPP
#define FKIT_SPEC_HPP

#include <Eigen/Dense>
#include <vector>

#include "fkit/expr.hpp"

namespace fkit {

enum class ScalarField { real, cplx };

struct Tolerances {
    int grid = 4096;        // validation samples per spec (at least 64 per unit length)
    double rank_tol = 1e-8;   // relative to the largest singular value
    double psd_tol = 1e-8;    // relative to ||Q||
    double ode_rtol = 1e-10;  // adaptive integrator relative tolerance
};

// One matrix entry as a pair of real closed forms.
struct ExprEntry {
    ExprPtr re;
    ExprPtr im;
};

// Matrix-valued coefficient field x -> M(x) on an interval, entries closed-form.
class CoefficientField {
public:
    CoefficientField() = default;
    CoefficientField(int n, std::vector<ExprEntry> entries);

    static CoefficientField constant_identity(int n, double scale = 1.0);

    int dim() const { return n_; }
    const ExprEntry& entry(int i, int j) const { return entries_[static_cast<size_t>(i) * n_ + j]; }
    ExprEntry& entry(int i, int j) { return entries_[static_cast<size_t>(i) * n_ + j]; }

    Eigen::MatrixXcd value(double x) const;

    CoefficientField derivative() const;       // entrywise d/dx
    CoefficientField adjoint() const;          // conjugate transpose at expression level
    CoefficientField submatrix(const std::vector<int>& keep) const;

private:
    int n_ = 0;
    std::vector<ExprEntry> entries_;  // row-major
};

CoefficientField add_fields(const CoefficientField& a, const CoefficientField& b);
CoefficientField sub_fields(const CoefficientField& a, const CoefficientField& b);
CoefficientField scale_field(const CoefficientField& a, double s);
// a + s*b with real s, at expression level
CoefficientField axpy_field(const CoefficientField& a, double s, const CoefficientField& b);

enum class Endpoint { left, right };

struct DegeneracyFlag {
    int block = 0;  // diagonal index of the scalar block
    Endpoint endpoint = Endpoint::right;
};

// First-order system T0 u = A u' + C u with formal adjoint partner
// Tt0 u = -A u' + (C* - A') u on the interval (a, b).
struct FriedrichsSpec {
    ScalarField field = ScalarField::real;
    double a = 0.0;
    double b = 1.0;
    int n = 1;
    CoefficientField A;
    CoefficientField C;
    std::vector<DegeneracyFlag> degeneracy;
    Tolerances tol;

    double length() const { return b - a; }
    bool degenerate() const { return !degeneracy.empty(); }
    bool is_flagged(int block) const;
    // coefficient of the partner operator's zero-order term, C* - A'
    CoefficientField partner_C() const;
};

// Skew/bounded-symmetric split: A u' + C u = [A u' + skew_bounded u] + S u,
// with S Hermitian by construction, S >= mu > 0 and ||S|| <= lambda on the grid.
struct PartsDecomposition {
    CoefficientField S;             // (C + C* - A') / 2
    CoefficientField skew_bounded;  // (C - C* + A') / 2
    double mu = 0.0;                // grid minimum of lambda_min(S(x))
    double lambda = 0.0;            // grid maximum of ||S(x)||_2
    double mu_margin = 0.0;         // Lipschitz safety margin, max ||S'|| * h/2
    int grid_points = 0;
};

// Checks realness (for real-field specs), Hermiticity of A, smoothness of A,
// boundedness of C, degeneracy structure, invertibility of the non-degenerate
// part, and strict positivity of the symmetric part. Throws on violation.
PartsDecomposition validate_spec(const FriedrichsSpec& spec);

// The split is the post-state of validate_spec; exposed separately for reuse.
PartsDecomposition split_parts(const FriedrichsSpec& spec);

// Convenience constructors used by tests and the symmetric-case adapter.
FriedrichsSpec make_scalar_spec(const std::string& a_expr, const std::string& c_expr,
                                double lo, double hi, ScalarField field = ScalarField::real);

}  // namespace fkit

#endif
