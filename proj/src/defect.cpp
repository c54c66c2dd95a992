#include "fkit/defect.hpp"

#include <cmath>

#include "fkit/errors.hpp"
#include "fkit/ode.hpp"
#include "fkit/trace_space.hpp"

namespace fkit {

namespace {

using cplx = std::complex<double>;

constexpr int kLevels = 20;         // dyadic collars 2^-1 .. 2^-kLevels
constexpr int kDecisionWindow = 5;  // ratios examined at the deepest levels
constexpr int kFitWindow = 8;       // levels used for the growth-exponent fit

// mass increments shrinking at least geometrically certify L2; increments
// bounded below certify divergence (the constant-kernel boundary case has
// ratio exactly 1/2, hence the slack above it)
constexpr double kConvergedRatio = 0.52;
constexpr double kDivergentRatio = 0.95;

struct DirectionEvidence {
    std::vector<double> masses;        // partial masses at collars 1..kLevels
    std::vector<double> amplitudes;    // |u| at the collars
    double growth_exponent = 0.0;
    bool in_l2 = false;
};

// Integrates the scalar kernel equation u' = g(x) u from the non-degenerate
// endpoint (u = 1) toward the flagged one, mass m' = |u|^2 carried along.
DirectionEvidence run_direction(const std::function<cplx(double)>& g, Endpoint endpoint, double lo,
                                double hi, double rtol, const char* label) {
    double len = hi - lo;
    double anchor = endpoint == Endpoint::right ? lo : hi;
    double target = endpoint == Endpoint::right ? hi - len * std::ldexp(1.0, -kLevels)
                                                : lo + len * std::ldexp(1.0, -kLevels);

    OdeRhs rhs = [&g](double x, const Eigen::VectorXcd& y) {
        Eigen::VectorXcd dy(2);
        dy[0] = g(x) * y[0];
        dy[1] = cplx(std::norm(y[0]), 0.0);
        return dy;
    };
    Eigen::VectorXcd y0(2);
    y0 << 1.0, 0.0;
    OdeOptions opts;
    opts.rtol = std::max(rtol, 1e-10);
    DenseOdeSolution sol = integrate_dense(rhs, anchor, target, y0, opts);

    DirectionEvidence ev;
    for (int j = 1; j <= kLevels; ++j) {
        double x = endpoint == Endpoint::right ? hi - len * std::ldexp(1.0, -j)
                                               : lo + len * std::ldexp(1.0, -j);
        Eigen::VectorXcd y = sol.value(x);
        ev.amplitudes.push_back(std::abs(y[0]));
        ev.masses.push_back(y[1].real());
    }

    // growth fit: log|u| against log(distance to the endpoint)
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int j = kLevels - kFitWindow + 1; j <= kLevels; ++j) {
            double dist = len * std::ldexp(1.0, -j);
            double amp = ev.amplitudes[static_cast<size_t>(j - 1)];
            if (!(amp > 0.0) || !std::isfinite(amp)) continue;
            double X = std::log(dist), Y = std::log(amp);
            sx += X;
            sy += Y;
            sxx += X * X;
            sxy += X * Y;
            ++m;
        }
        if (m >= 2) ev.growth_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }

    // increments between consecutive collars at the deepest levels; masses are
    // signed by the direction of integration, so compare magnitudes
    std::vector<double> ratios;
    for (int j = kLevels - kDecisionWindow - 1; j + 1 < kLevels; ++j) {
        double d0 =
            std::abs(ev.masses[static_cast<size_t>(j)] - ev.masses[static_cast<size_t>(j - 1)]);
        double d1 =
            std::abs(ev.masses[static_cast<size_t>(j + 1)] - ev.masses[static_cast<size_t>(j)]);
        double scale = std::abs(ev.masses.back());
        if (d0 <= 1e-14 * scale && d1 <= 1e-14 * scale) {
            ratios.push_back(0.0);  // mass has stalled; trivially summable
            continue;
        }
        ratios.push_back(d1 / d0);
    }
    bool conv = true, div = true;
    for (double r : ratios) {
        conv = conv && r <= kConvergedRatio;
        div = div && r >= kDivergentRatio;
    }
    if (conv) {
        ev.in_l2 = true;
        return ev;
    }
    if (div) {
        ev.in_l2 = false;
        return ev;
    }
    throw UndecidableIntegrability(std::string("dyadic mass evidence inconclusive for the ") +
                                   label + " kernel direction after " + std::to_string(kLevels) +
                                   " levels");
}

}  // namespace

SingularBlockReport analyze_singular_block(const ExprEntry& a, const ExprEntry& c, int block,
                                           Endpoint endpoint, double lo, double hi,
                                           double ode_rtol) {
    auto val = [](const ExprEntry& e, double x) {
        return cplx(eval(e.re, x).real(), eval(e.im, x).real());
    };
    ExprEntry da{differentiate(a.re), differentiate(a.im)};

    // T1 direction:  a u' + c u = 0
    auto g_t1 = [&, val](double x) { return -val(c, x) / val(a, x); };
    // Tt1 direction: -a u' + (conj(c) - a') u = 0
    auto g_tt1 = [&, val](double x) {
        return (std::conj(val(c, x)) - val(da, x)) / val(a, x);
    };

    SingularBlockReport rep;
    rep.block = block;
    rep.endpoint = endpoint;

    DirectionEvidence e1 = run_direction(g_t1, endpoint, lo, hi, ode_rtol, "T1");
    DirectionEvidence e2 = run_direction(g_tt1, endpoint, lo, hi, ode_rtol, "Tt1");
    rep.t1_in_l2 = e1.in_l2;
    rep.tt1_in_l2 = e2.in_l2;
    rep.t1_growth_exponent = e1.growth_exponent;
    rep.tt1_growth_exponent = e2.growth_exponent;
    rep.t1_partial_masses = std::move(e1.masses);
    rep.tt1_partial_masses = std::move(e2.masses);
    return rep;
}

std::pair<int, int> deficiency_indices(const FriedrichsSpec& spec) {
    TraceForm tf = build_trace_form(spec);
    KernelBases kb = kernel_traces(spec, tf);
    return {kb.d_plus(), kb.d_minus()};
}

InvarianceVerdict invariance_harness(const FriedrichsSpec& skeleton,
                                     const std::vector<CoefficientField>& c_samples) {
    InvarianceVerdict v;
    for (size_t i = 0; i < c_samples.size(); ++i) {
        FriedrichsSpec sample = skeleton;
        sample.C = c_samples[i];
        validate_spec(sample);  // throws unless the symmetric part stays strictly positive
        auto [dp, dm] = deficiency_indices(sample);
        v.table.push_back({static_cast<int>(i), dp, dm});
    }
    v.pass = !v.table.empty();
    for (const InvarianceRow& row : v.table)
        v.pass = v.pass && row.d_plus == v.table.front().d_plus &&
                 row.d_minus == v.table.front().d_minus;
    return v;
}

}  // namespace fkit
