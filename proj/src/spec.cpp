#include "fkit/spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fkit/errors.hpp"

namespace fkit {

using Eigen::MatrixXcd;

CoefficientField::CoefficientField(int n, std::vector<ExprEntry> entries)
    : n_(n), entries_(std::move(entries)) {
    if (n_ < 1 || entries_.size() != static_cast<size_t>(n_) * n_)
        throw SpecFormatError("coefficient field shape mismatch");
}

CoefficientField CoefficientField::constant_identity(int n, double scale) {
    std::vector<ExprEntry> es(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            es[static_cast<size_t>(i) * n + j] = {make_number(i == j ? scale : 0.0),
                                                  make_number(0.0)};
    return CoefficientField(n, std::move(es));
}

MatrixXcd CoefficientField::value(double x) const {
    MatrixXcd m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const ExprEntry& e = entry(i, j);
            m(i, j) = std::complex<double>(eval(e.re, x).real(), eval(e.im, x).real());
        }
    return m;
}

CoefficientField CoefficientField::derivative() const {
    std::vector<ExprEntry> es(entries_.size());
    for (size_t k = 0; k < entries_.size(); ++k)
        es[k] = {differentiate(entries_[k].re), differentiate(entries_[k].im)};
    return CoefficientField(n_, std::move(es));
}

CoefficientField CoefficientField::adjoint() const {
    std::vector<ExprEntry> es(entries_.size());
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const ExprEntry& e = entry(j, i);
            es[static_cast<size_t>(i) * n_ + j] = {e.re, make_neg(e.im)};
        }
    return CoefficientField(n_, std::move(es));
}

CoefficientField CoefficientField::submatrix(const std::vector<int>& keep) const {
    int m = static_cast<int>(keep.size());
    std::vector<ExprEntry> es(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            es[static_cast<size_t>(i) * m + j] = entry(keep[i], keep[j]);
    return CoefficientField(m, std::move(es));
}

namespace {

CoefficientField combine(const CoefficientField& a, const CoefficientField& b,
                         ExprPtr (*op)(ExprPtr, ExprPtr)) {
    if (a.dim() != b.dim()) throw SpecFormatError("coefficient field dimension mismatch");
    int n = a.dim();
    std::vector<ExprEntry> es(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            es[static_cast<size_t>(i) * n + j] = {op(a.entry(i, j).re, b.entry(i, j).re),
                                                  op(a.entry(i, j).im, b.entry(i, j).im)};
    return CoefficientField(n, std::move(es));
}

}  // namespace

CoefficientField add_fields(const CoefficientField& a, const CoefficientField& b) {
    return combine(a, b, make_add);
}

CoefficientField sub_fields(const CoefficientField& a, const CoefficientField& b) {
    return combine(a, b, make_sub);
}

CoefficientField scale_field(const CoefficientField& a, double s) {
    int n = a.dim();
    std::vector<ExprEntry> es(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            es[static_cast<size_t>(i) * n + j] = {make_mul(make_number(s), a.entry(i, j).re),
                                                  make_mul(make_number(s), a.entry(i, j).im)};
    return CoefficientField(n, std::move(es));
}

CoefficientField axpy_field(const CoefficientField& a, double s, const CoefficientField& b) {
    return add_fields(a, scale_field(b, s));
}

bool FriedrichsSpec::is_flagged(int block) const {
    return std::any_of(degeneracy.begin(), degeneracy.end(),
                       [block](const DegeneracyFlag& f) { return f.block == block; });
}

CoefficientField FriedrichsSpec::partner_C() const {
    return sub_fields(C.adjoint(), A.derivative());
}

// ------------------------------------------------------------- validation --

namespace {

std::vector<double> sample_grid(const FriedrichsSpec& spec) {
    int per_unit = static_cast<int>(std::ceil(64.0 * spec.length()));
    int count = std::max({spec.tol.grid, per_unit, 65});
    std::vector<double> xs(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k)
        xs[static_cast<size_t>(k)] = spec.a + spec.length() * k / (count - 1);
    return xs;
}

void check_real_field(const FriedrichsSpec& spec, const std::vector<double>& xs) {
    if (spec.field != ScalarField::real) return;
    for (const CoefficientField* f : {&spec.A, &spec.C}) {
        for (double x : xs) {
            MatrixXcd m = f->value(x);
            double imax = m.imag().cwiseAbs().maxCoeff();
            if (imax > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
                throw ValidationError("real-field spec has nonzero imaginary part at x = " +
                                      std::to_string(x));
        }
    }
}

void check_finite(const MatrixXcd& m, double x, const char* which) {
    if (!m.allFinite())
        throw ValidationError(std::string(which) + " is not finite at x = " + std::to_string(x));
}

void check_hermitian_A(const FriedrichsSpec& spec, const std::vector<double>& xs) {
    for (double x : xs) {
        MatrixXcd a = spec.A.value(x);
        check_finite(a, x, "A");
        double defect = (a - a.adjoint()).cwiseAbs().maxCoeff();
        if (defect > 1e-10 * (1.0 + a.cwiseAbs().maxCoeff())) throw NotHermitian("A", x, defect);
    }
}

// Symbolic A' is exact for the tree; the finite-difference probe guards against
// entries that are not actually C^1 on the closed interval (kinks, |x - c|, ...).
void check_smoothness_A(const FriedrichsSpec& spec) {
    CoefficientField dA = spec.A.derivative();
    const double h = 1e-6 * std::max(1.0, spec.length());
    const int probes = 64;
    for (int k = 1; k < probes; ++k) {
        double x = spec.a + spec.length() * k / probes;
        MatrixXcd sym = dA.value(x);
        MatrixXcd fd = (spec.A.value(x + h) - spec.A.value(x - h)) / (2.0 * h);
        check_finite(sym, x, "A'");
        double err = (sym - fd).cwiseAbs().maxCoeff();
        if (err > 1e-4 * (1.0 + sym.cwiseAbs().maxCoeff()))
            throw ValidationError("A entry fails the smoothness probe at x = " + std::to_string(x));
    }
}

void check_bounded_C(const FriedrichsSpec& spec, const std::vector<double>& xs) {
    for (double x : xs) check_finite(spec.C.value(x), x, "C");
}

void check_degeneracy_structure(const FriedrichsSpec& spec, const std::vector<double>& xs) {
    std::set<int> seen;
    for (const DegeneracyFlag& f : spec.degeneracy) {
        if (f.block < 0 || f.block >= spec.n)
            throw SpecFormatError("degeneracy flag block index out of range");
        if (!seen.insert(f.block).second)
            throw SpecFormatError("duplicate degeneracy flag for block " + std::to_string(f.block));
    }

    // flagged blocks must be scalar and decoupled in both A and C
    for (const DegeneracyFlag& f : spec.degeneracy) {
        for (double x : xs) {
            MatrixXcd a = spec.A.value(x);
            MatrixXcd c = spec.C.value(x);
            double scale = 1.0 + a.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff();
            for (int j = 0; j < spec.n; ++j) {
                if (j == f.block) continue;
                double off = std::abs(a(f.block, j)) + std::abs(a(j, f.block)) +
                             std::abs(c(f.block, j)) + std::abs(c(j, f.block));
                if (off > 1e-12 * scale)
                    throw ValidationError("degenerate block " + std::to_string(f.block) +
                                          " is coupled to the rest of the system");
            }
        }

        double end = f.endpoint == Endpoint::left ? spec.a : spec.b;
        double other = f.endpoint == Endpoint::left ? spec.b : spec.a;
        auto a_kk = [&](double x) { return std::abs(spec.A.value(x)(f.block, f.block)); };
        if (a_kk(end) > 1e-8)
            throw ValidationError("flagged block " + std::to_string(f.block) +
                                  " does not vanish at the flagged endpoint");
        if (a_kk(other) < 1e-9)
            throw ValidationError("flagged block " + std::to_string(f.block) +
                                  " vanishes at the unflagged endpoint as well");
        for (double x : xs) {
            if (x == end) continue;
            // interior zeros are outside the declared degeneracy model
            double dist = std::abs(x - end) / spec.length();
            if (a_kk(x) < 1e-10 && dist > 1e-3)
                throw DegenerateOutsideFlags(x, a_kk(x));
        }
    }
}

void check_invertibility(const FriedrichsSpec& spec, const std::vector<double>& xs) {
    std::vector<int> keep;
    for (int k = 0; k < spec.n; ++k)
        if (!spec.is_flagged(k)) keep.push_back(k);
    if (keep.empty()) return;
    CoefficientField sub = spec.A.submatrix(keep);
    // det A is real for Hermitian A; a sign change between samples pins an
    // interior zero even when no sample lands near it
    double prev_det = 0.0;
    bool have_prev = false;
    for (double x : xs) {
        MatrixXcd a = sub.value(x);
        double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        double det = a.determinant().real();
        if (std::abs(det) < 1e-9 * std::pow(scale, keep.size()))
            throw DegenerateOutsideFlags(x, std::abs(det));
        if (have_prev && std::signbit(det) != std::signbit(prev_det))
            throw DegenerateOutsideFlags(x, std::abs(det));
        prev_det = det;
        have_prev = true;
    }
}

// S entries are built for the upper triangle and mirrored with conjugated
// trees, so S(x) = S(x)* holds to the bit at every x.
CoefficientField build_S(const FriedrichsSpec& spec, const CoefficientField& dA) {
    int n = spec.n;
    std::vector<ExprEntry> es(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const ExprEntry& cij = spec.C.entry(i, j);
            const ExprEntry& cji = spec.C.entry(j, i);
            const ExprEntry& aij = dA.entry(i, j);
            ExprPtr half = make_number(0.5);
            ExprPtr re = make_mul(half, make_sub(make_add(cij.re, cji.re), aij.re));
            ExprPtr im = make_mul(half, make_sub(make_sub(cij.im, cji.im), aij.im));
            es[static_cast<size_t>(i) * n + j] = {re, im};
            if (i != j) es[static_cast<size_t>(j) * n + i] = {re, make_neg(im)};
        }
    return CoefficientField(n, std::move(es));
}

CoefficientField build_skew_bounded(const FriedrichsSpec& spec, const CoefficientField& dA) {
    // (C - C* + A') / 2
    return scale_field(add_fields(sub_fields(spec.C, spec.C.adjoint()), dA), 0.5);
}

}  // namespace

PartsDecomposition validate_spec(const FriedrichsSpec& spec) {
    if (spec.n < 1) throw SpecFormatError("dimension must be positive");
    if (!(spec.a < spec.b)) throw SpecFormatError("interval endpoints must satisfy a < b");
    if (spec.A.dim() != spec.n || spec.C.dim() != spec.n)
        throw SpecFormatError("A and C must be n x n");

    std::vector<double> xs = sample_grid(spec);
    check_real_field(spec, xs);
    check_hermitian_A(spec, xs);
    check_smoothness_A(spec);
    check_bounded_C(spec, xs);
    check_degeneracy_structure(spec, xs);
    check_invertibility(spec, xs);

    CoefficientField dA = spec.A.derivative();
    PartsDecomposition parts;
    parts.S = build_S(spec, dA);
    parts.skew_bounded = build_skew_bounded(spec, dA);
    parts.grid_points = static_cast<int>(xs.size());

    double mu = std::numeric_limits<double>::infinity();
    double lambda = 0.0;
    double mu_x = spec.a;
    for (double x : xs) {
        MatrixXcd s = parts.S.value(x);
        double defect = (s - s.adjoint()).cwiseAbs().maxCoeff();
        if (defect > 1e-14 * (1.0 + s.cwiseAbs().maxCoeff())) throw NotHermitian("S", x, defect);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(s, Eigen::EigenvaluesOnly);
        double lo = eig.eigenvalues().minCoeff();
        double hi = std::max(std::abs(eig.eigenvalues().minCoeff()),
                             std::abs(eig.eigenvalues().maxCoeff()));
        if (lo < mu) {
            mu = lo;
            mu_x = x;
        }
        lambda = std::max(lambda, hi);
    }
    if (!(mu > 0.0)) throw NotStrictlyPositive(mu_x, mu);

    CoefficientField dS = parts.S.derivative();
    double slope = 0.0;
    for (double x : xs) slope = std::max(slope, dS.value(x).norm());
    double h = spec.length() / (static_cast<double>(xs.size()) - 1.0);
    parts.mu = mu;
    parts.lambda = lambda;
    parts.mu_margin = 0.5 * slope * h;
    return parts;
}

PartsDecomposition split_parts(const FriedrichsSpec& spec) { return validate_spec(spec); }

FriedrichsSpec make_scalar_spec(const std::string& a_expr, const std::string& c_expr, double lo,
                                double hi, ScalarField field) {
    FriedrichsSpec spec;
    spec.field = field;
    spec.a = lo;
    spec.b = hi;
    spec.n = 1;
    spec.A = CoefficientField(1, {{parse_expression(a_expr), make_number(0.0)}});
    spec.C = CoefficientField(1, {{parse_expression(c_expr), make_number(0.0)}});
    return spec;
}

}  // namespace fkit
