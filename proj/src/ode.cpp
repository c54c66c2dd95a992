#include "fkit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fkit/errors.hpp"

namespace fkit {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order difference coefficients
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output coefficients (order-4 continuous extension)
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(const VectorXcd& err, const VectorXcd& y0, const VectorXcd& y1, double atol,
                  double rtol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double q = std::abs(err[i]) / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

int DenseOdeSolution::locate(double x) const {
    // steps are ordered along the direction of integration
    bool fwd = x1_ >= x0_;
    int lo = 0, hi = static_cast<int>(steps_.size()) - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        double right = steps_[static_cast<size_t>(mid)].x + steps_[static_cast<size_t>(mid)].h;
        bool below = fwd ? (x > right) : (x < right);
        if (below)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

VectorXcd DenseOdeSolution::value(double x) const {
    const Step& s = steps_[static_cast<size_t>(locate(x))];
    double th = (x - s.x) / s.h;
    double th1 = 1.0 - th;
    return s.rcont[0] +
           th * (s.rcont[1] + th1 * (s.rcont[2] + th * (s.rcont[3] + th1 * s.rcont[4])));
}

VectorXcd DenseOdeSolution::derivative(double x) const {
    const Step& s = steps_[static_cast<size_t>(locate(x))];
    double th = (x - s.x) / s.h;
    double th1 = 1.0 - th;
    // d/dtheta of the continuous extension, divided by h
    VectorXcd d = s.rcont[1] + (1.0 - 2.0 * th) * s.rcont[2] + th * (2.0 - 3.0 * th) * s.rcont[3] +
                  2.0 * th * th1 * (1.0 - 2.0 * th) * s.rcont[4];
    return d / s.h;
}

DenseOdeSolution integrate_dense(const OdeRhs& rhs, double x0, double x1, VectorXcd y0,
                                 const OdeOptions& opts) {
    DenseOdeSolution out;
    out.x0_ = x0;
    out.x1_ = x1;
    out.dim_ = static_cast<int>(y0.size());

    const double span = x1 - x0;
    if (span == 0.0) throw ValidationError("integration range is empty");
    const double dir = span > 0 ? 1.0 : -1.0;
    const double hmax =
        opts.max_step > 0 ? std::min(opts.max_step, std::abs(span)) : std::abs(span);

    double x = x0;
    VectorXcd y = y0;
    VectorXcd k1 = rhs(x, y);

    out.nodes_.push_back(x);
    out.node_values_.push_back(y);
    out.node_derivs_.push_back(k1);

    // initial step from the first derivative, refined by the controller
    double h;
    {
        double dy = k1.norm() / std::sqrt(static_cast<double>(y.size()));
        double sy = 1.0 + y.norm();
        h = std::min(hmax, 0.01 * sy / (1.0 + dy));
        h = std::max(h, 1e-10 * std::abs(span));
        h *= dir;
    }

    double errold = 1e-4;
    bool last = false;
    bool just_rejected = false;
    const double safety = 0.9;
    const int max_steps = 2000000;

    VectorXcd k2, k3, k4, k5, k6, k7, ynew, yerr;
    for (int iter = 0;; ++iter) {
        if (iter > max_steps) throw StepSizeUnderflow(x);
        if ((x - x1) * dir >= 0.0) break;
        if (std::abs(h) < 16.0 * std::numeric_limits<double>::epsilon() * std::abs(span))
            throw StepSizeUnderflow(x);
        if ((x + h - x1) * dir >= 0.0) {
            h = x1 - x;
            last = true;
        } else {
            last = false;
        }

        k2 = rhs(x + c2 * h, y + h * (a21 * k1));
        k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(x + h, ynew);
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = error_norm(yerr, y, ynew, opts.atol, opts.rtol);
        if (!std::isfinite(err)) err = 1e10;  // non-finite stages force a hard rejection
        if (err <= 1.0) {
            DenseOdeSolution::Step st;
            st.x = x;
            st.h = h;
            VectorXcd ydiff = ynew - y;
            st.rcont[0] = y;
            st.rcont[1] = ydiff;
            st.rcont[2] = h * k1 - ydiff;
            st.rcont[3] = ydiff - h * k7 - st.rcont[2];
            st.rcont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            out.steps_.push_back(std::move(st));

            x += h;
            y = ynew;
            k1 = k7;
            out.nodes_.push_back(x);
            out.node_values_.push_back(y);
            out.node_derivs_.push_back(k1);
            out.achieved_error_ = std::max(out.achieved_error_, err);

            double fac = std::pow(err, 0.17) / std::pow(errold, 0.04) / safety;
            fac = std::clamp(fac, 0.2, just_rejected ? 1.0 : 10.0);
            errold = std::max(err, 1e-4);
            just_rejected = false;
            if (!last) {
                h /= fac;
                if (std::abs(h) > hmax) h = dir * hmax;
            }
        } else {
            double fac = std::min(std::pow(err, 0.17) / safety, 10.0);
            h /= fac;
            just_rejected = true;
            last = false;
        }
    }
    return out;
}

Trajectory trajectory_from_solution(std::shared_ptr<const DenseOdeSolution> sol) {
    Trajectory t;
    t.lo = std::min(sol->x_begin(), sol->x_end());
    t.hi = std::max(sol->x_begin(), sol->x_end());
    t.n = sol->dim();
    t.value = [sol](double x) { return sol->value(x); };
    t.derivative = [sol](double x) { return sol->derivative(x); };
    return t;
}

Trajectory trajectory_from_expressions(const std::vector<ExprEntry>& components, double lo,
                                       double hi) {
    auto comps = std::make_shared<std::vector<ExprEntry>>(components);
    auto derivs = std::make_shared<std::vector<ExprEntry>>();
    for (const ExprEntry& e : components)
        derivs->push_back({differentiate(e.re), differentiate(e.im)});
    int n = static_cast<int>(components.size());
    auto eval_vec = [n](const std::vector<ExprEntry>& es, double x) {
        VectorXcd v(n);
        for (int k = 0; k < n; ++k)
            v[k] = std::complex<double>(eval(es[static_cast<size_t>(k)].re, x).real(),
                                        eval(es[static_cast<size_t>(k)].im, x).real());
        return v;
    };
    Trajectory t;
    t.lo = lo;
    t.hi = hi;
    t.n = n;
    t.value = [comps, eval_vec](double x) { return eval_vec(*comps, x); };
    t.derivative = [derivs, eval_vec](double x) { return eval_vec(*derivs, x); };
    return t;
}

// ------------------------------------------------------ system right sides --

namespace {

// Solves A(x) w = r, throwing SingularA if A(x) is numerically singular.
struct CoefficientSystem {
    CoefficientField A;
    CoefficientField B;  // zero-order coefficient of the variant's equation
    double sign;         // y' = sign * A^{-1} (B y)

    VectorXcd apply_inverse(double x, const VectorXcd& r) const {
        MatrixXcd a = A.value(x);
        Eigen::PartialPivLU<MatrixXcd> lu(a);
        double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        if (std::abs(lu.determinant()) <
            1e-12 * std::pow(scale, static_cast<double>(a.rows())))
            throw SingularA(x);
        return lu.solve(r);
    }
};

CoefficientSystem make_system(const FriedrichsSpec& spec, OperatorVariant variant) {
    if (variant == OperatorVariant::maximal) return {spec.A, spec.C, -1.0};
    return {spec.A, spec.partner_C(), +1.0};
}

}  // namespace

FundamentalMatrix::FundamentalMatrix(std::shared_ptr<const DenseOdeSolution> sol, int n,
                                     double anchor)
    : sol_(std::move(sol)), n_(n), anchor_(anchor) {}

MatrixXcd FundamentalMatrix::value(double x) const {
    VectorXcd flat = sol_->value(x);
    return Eigen::Map<const MatrixXcd>(flat.data(), n_, n_);
}

MatrixXcd FundamentalMatrix::at_end() const { return value(sol_->x_end()); }

double FundamentalMatrix::min_abs_det() const {
    double best = std::numeric_limits<double>::infinity();
    for (const VectorXcd& v : sol_->node_values()) {
        MatrixXcd m = Eigen::Map<const MatrixXcd>(v.data(), n_, n_);
        best = std::min(best, std::abs(m.determinant()));
    }
    return best;
}

FundamentalMatrix fundamental_matrix(const FriedrichsSpec& spec, OperatorVariant variant) {
    return fundamental_matrix(spec, variant, spec.a, spec.b, spec.tol.ode_rtol);
}

FundamentalMatrix fundamental_matrix(const FriedrichsSpec& spec, OperatorVariant variant,
                                     double x_from, double x_to, double rtol) {
    CoefficientSystem sys = make_system(spec, variant);
    int n = spec.n;
    OdeRhs rhs = [sys, n](double x, const VectorXcd& flat) {
        Eigen::Map<const MatrixXcd> y(flat.data(), n, n);
        MatrixXcd by = sys.B.value(x) * y;
        MatrixXcd dy(n, n);
        for (int j = 0; j < n; ++j) dy.col(j) = sys.sign * sys.apply_inverse(x, by.col(j));
        return VectorXcd(Eigen::Map<const VectorXcd>(dy.data(), n * n));
    };
    MatrixXcd eye = MatrixXcd::Identity(n, n);
    VectorXcd y0 = Eigen::Map<const VectorXcd>(eye.data(), n * n);
    OdeOptions opts;
    opts.rtol = rtol;
    auto sol = std::make_shared<DenseOdeSolution>(integrate_dense(rhs, x_from, x_to, y0, opts));
    return FundamentalMatrix(sol, n, x_from);
}

double max_node_residual(const FriedrichsSpec& spec, OperatorVariant variant,
                         const DenseOdeSolution& sol) {
    CoefficientSystem sys = make_system(spec, variant);
    double worst = 0.0;
    const auto& xs = sol.nodes();
    for (size_t k = 0; k < xs.size(); ++k) {
        double x = xs[k];
        const VectorXcd& y = sol.node_values()[k];
        const VectorXcd& dy = sol.node_derivatives()[k];
        // residual of A y' - sign * B y = 0, column-wise over the flattened state
        int n = spec.n;
        MatrixXcd a = sys.A.value(x);
        MatrixXcd b = sys.B.value(x);
        Eigen::Map<const MatrixXcd> ym(y.data(), n, y.size() / n);
        Eigen::Map<const MatrixXcd> dym(dy.data(), n, dy.size() / n);
        double r = (a * dym - sys.sign * b * ym).norm() / (1.0 + ym.norm());
        worst = std::max(worst, r);
    }
    return worst;
}

Trajectory particular_solution(const FriedrichsSpec& spec,
                               const std::function<VectorXcd(double)>& f,
                               OperatorVariant variant) {
    return particular_solution(spec, f, variant, spec.tol.ode_rtol);
}

Trajectory particular_solution(const FriedrichsSpec& spec,
                               const std::function<VectorXcd(double)>& f, OperatorVariant variant,
                               double rtol) {
    CoefficientSystem sys = make_system(spec, variant);
    // maximal:  A u' + C u = f         -> u' = A^{-1}(f - C u)
    // adjoint: -A v' + (C*-A') v = g   -> v' = A^{-1}((C*-A') v - g)
    double fsign = sys.sign;
    OdeRhs rhs = [sys, f, fsign](double x, const VectorXcd& u) {
        VectorXcd r = sys.sign * (sys.B.value(x) * u) - fsign * f(x);
        return VectorXcd(sys.apply_inverse(x, r));
    };
    OdeOptions opts;
    opts.rtol = rtol;
    auto sol = std::make_shared<DenseOdeSolution>(
        integrate_dense(rhs, spec.a, spec.b, VectorXcd::Zero(spec.n), opts));
    return trajectory_from_solution(sol);
}

// -------------------------------------------------------------- quadrature --

namespace {

using cplx = std::complex<double>;

struct SimpsonWork {
    const std::function<cplx(double)>* f;
    double floor;
    int max_depth = 48;

    cplx recurse(double a, double m, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol,
                 int depth, double& err_acc) const {
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        cplx flm = (*f)(lm), frm = (*f)(rm);
        double h6 = (b - a) / 12.0;
        cplx left = h6 * (fa + 4.0 * flm + fm);
        cplx right = h6 * (fm + 4.0 * frm + fb);
        cplx delta = left + right - whole;
        if (depth >= max_depth || std::abs(delta) <= 15.0 * std::max(tol, floor)) {
            err_acc += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1, err_acc) +
               recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1, err_acc);
    }
};

cplx simpson(const std::function<cplx(double)>& f, double a, double b, double tol, double floor,
             int initial_panels, double& err_acc) {
    SimpsonWork w{&f, floor};
    cplx total = 0.0;
    double h = (b - a) / initial_panels;
    for (int p = 0; p < initial_panels; ++p) {
        double pa = a + p * h, pb = a + (p + 1) * h, pm = 0.5 * (pa + pb);
        cplx fa = f(pa), fm = f(pm), fb = f(pb);
        cplx whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += w.recurse(pa, pm, pb, fa, fm, fb, whole, tol / initial_panels, 0, err_acc);
    }
    return total;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                    double rel_tol) {
    const double floor = 1e-14;
    double err1 = 0.0, err2 = 0.0;
    // coarse pass fixes the scale; fine pass (doubled initial resolution and
    // tighter tolerance) is the reported value
    cplx coarse = simpson(f, a, b, floor, floor, 4, err1);
    double tol = std::max(floor, rel_tol * std::abs(coarse));
    cplx fine = simpson(f, a, b, 0.25 * tol, floor, 8, err2);
    QuadratureResult r;
    r.value = fine;
    r.error_estimate = 2.0 * std::abs(fine - coarse) + err2 + floor;
    return r;
}

QuadratureResult l2_inner(const Trajectory& u, const Trajectory& v) {
    double span = std::max(u.hi - u.lo, v.hi - v.lo);
    if (std::abs(u.lo - v.lo) > 1e-12 * span || std::abs(u.hi - v.hi) > 1e-12 * span)
        throw IntervalMismatch();
    auto f = [&u, &v](double x) -> cplx { return v.value(x).dot(u.value(x)); };
    return integrate_adaptive(f, u.lo, u.hi);
}

double l2_norm(const Trajectory& u) {
    auto f = [&u](double x) -> cplx { return cplx(u.value(x).squaredNorm(), 0.0); };
    return std::sqrt(std::max(0.0, integrate_adaptive(f, u.lo, u.hi).value.real()));
}

}  // namespace fkit
