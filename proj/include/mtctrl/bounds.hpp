#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mtctrl/trainer.hpp"

namespace mtctrl {

/// Block-diagonal stack of the desired systems: (diag A_i, [B_i], diag C_i),
/// with output dimension M p.
StateSpace parallel_system(const MultiTaskProblem& problem);

enum class UpperCase { RgtN, RleN };

/// Upper bound on the optimal multi-task cost and the intermediate terms it
/// was built from.  `balanced` is the minimal balanced realization of the
/// parallel system; R = balanced.order().
struct UpperBound {
    double value = 0.0;
    UpperCase which = UpperCase::RleN;
    Eigen::Index R = 0;
    Vector sigma;
    double truncation_term = 0.0;  // J^B, zero when R <= N
    double aux_hinf = 0.0;         // ||Sigma_aux||_inf, zero when R <= N
    double deltaC_fro = 0.0;
    BalancedRealization balanced;
};

UpperBound upper_bound(const MultiTaskProblem& problem, int N, double rank_tol = 1e-10);

/// The controller used to prove the upper bound: one shared D = 0.5 I,
/// -I + D W equal to the leading N x N balanced block (padded with -I when
/// R < N), B the leading balanced input rows and C the block-row average of
/// the balanced output matrix.  Its cost never exceeds upper_bound().
ControllerParams constructive_controller(const MultiTaskProblem& problem, const UpperBound& ub,
                                         int N);

/// sqrt( sum_i ||C_i B_i - mean_j C_j B_j||_F^2 / min(p, m) ).
double lower_bound_sup(const MultiTaskProblem& problem);

/// Lower real branch of Lambert W on (-1/e, 0); values <= -1.
double lambert_w_neg1(double x);

/// Scalar system (a, b, c) reduced to (a, r = b c).
struct ScalarSystem {
    double a;
    double r;
};

std::vector<ScalarSystem> scalar_systems(const MultiTaskProblem& problem);

/// A(j, l) = r_j/a_j - (r_l/a_j) (ln(r_l/r_j) / W_{-1}(-1/(2e)) + 1).
double A_function(const std::vector<ScalarSystem>& systems, std::size_t j, std::size_t l);

struct L1Bound {
    double value = 0.0;
    std::size_t j = 0;  // indices into the caller's list
    std::size_t l = 1;
};

/// L1 multi-task lower bound for N = 1 and scalar systems with a < 0, r > 0.
/// Systems are ordered by r internally; sharpen = false uses the two smallest,
/// sharpen = true maximizes over all pairs.  The bound is clamped at 0.
L1Bound lower_bound_l1(const std::vector<ScalarSystem>& systems, bool sharpen = false);

struct BoundsReport {
    UpperBound upper;
    double lower_sup = 0.0;
    std::optional<L1Bound> lower_l1;
};

/// All bounds that apply to the problem; the L1 bound only for scalar
/// systems satisfying its sign conditions.
BoundsReport compute_bounds(const MultiTaskProblem& problem, int N, bool sharpen = false);

}  // namespace mtctrl
