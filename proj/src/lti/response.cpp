#include <cmath>

#include <Eigen/Eigenvalues>

#include "mtctrl/lti.hpp"

namespace mtctrl {

std::vector<Matrix> impulse_response(const StateSpace& sys, const std::vector<double>& times) {
    sys.validate();
    std::vector<Matrix> out;
    out.reserve(times.size());
    if (times.empty()) return out;
    if (times.front() < 0.0) throw Error(ErrorCode::DomainError, "impulse_response: negative time");

    // Substep at most 1/200 time units and well inside the RK4 stability region.
    double rho = 0.0;
    if (sys.states() > 0) {
        Eigen::EigenSolver<Matrix> es(sys.A, false);
        rho = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    const double h_max = std::min(0.005, 0.05 / std::max(rho, 1e-12));

    Matrix X = sys.B;
    Matrix next(X.rows(), X.cols());
    double t = 0.0;
    for (double target : times) {
        if (target < t) throw Error(ErrorCode::DomainError, "impulse_response: times not ascending");
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / h_max));
            const Matrix phi = rk4_propagator(sys.A, span / static_cast<double>(steps));
            for (long k = 0; k < steps; ++k) {
                next.noalias() = phi * X;
                X.swap(next);
            }
            t = target;
        }
        out.push_back(sys.C * X);
    }
    return out;
}

}  // namespace mtctrl
