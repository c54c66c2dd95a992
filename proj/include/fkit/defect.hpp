#ifndef FKIT_DEFECT_HPP
#define FKIT_DEFECT_HPP

#include <utility>
#include <vector>

#include "fkit/spec.hpp"

namespace fkit {

// Square-integrability analysis of a flagged scalar block near its vanishing
// endpoint, by partial L2 masses on dyadically shrinking collars.
struct SingularBlockReport {
    int block = 0;
    Endpoint endpoint = Endpoint::right;

    bool t1_in_l2 = false;   // kernel of  a u' + c u = 0
    bool tt1_in_l2 = false;  // kernel of -a u' + (conj(c) - a') u = 0

    // fitted slope of log|u| against log(distance to the endpoint)
    double t1_growth_exponent = 0.0;
    double tt1_growth_exponent = 0.0;

    // partial masses from the anchor up to each dyadic collar
    std::vector<double> t1_partial_masses;
    std::vector<double> tt1_partial_masses;
};

// Both kernel directions of the scalar block with coefficient a(x) (vanishing
// exactly at `endpoint`) and zero-order term c(x). Throws
// UndecidableIntegrability when the dyadic evidence stays inconclusive.
SingularBlockReport analyze_singular_block(const ExprEntry& a, const ExprEntry& c, int block,
                                           Endpoint endpoint, double lo, double hi,
                                           double ode_rtol);

// (dim ker T1, dim ker Tt1) from trace bases; degenerate blocks contribute per
// analyze_singular_block.
std::pair<int, int> deficiency_indices(const FriedrichsSpec& spec);

struct InvarianceRow {
    int sample = 0;
    int d_plus = 0;
    int d_minus = 0;
};

struct InvarianceVerdict {
    std::vector<InvarianceRow> table;
    bool pass = false;
};

// Deficiency indices across a family of bounded parts C sharing the skeleton's
// A (and with it the unbounded skew structure). Every sample must validate.
InvarianceVerdict invariance_harness(const FriedrichsSpec& skeleton,
                                     const std::vector<CoefficientField>& c_samples);

}  // namespace fkit

#endif
