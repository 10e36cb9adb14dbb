#include <cmath>
#include <string>

#include "mtctrl/bounds.hpp"

namespace mtctrl {

double lambert_w_neg1(double x) {
    const double branch_point = -std::exp(-1.0);
    if (!(x > branch_point && x < 0.0)) {
        throw Error(ErrorCode::DomainError,
                    "lambert_w_neg1 argument " + std::to_string(x) + " not in (-1/e, 0)");
    }
    // w e^w decreases from 0- to -1/e on (-inf, -1].
    auto f = [x](double w) { return w * std::exp(w) - x; };
    double lo = -745.0;  // f(lo) > 0
    double hi = -1.0;    // f(hi) < 0
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::abs(lo); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid; else hi = mid;
    }
    double w = 0.5 * (lo + hi);

    // Halley polish; skipped near the branch point where w + 1 -> 0.
    for (int iter = 0; iter < 4 && std::abs(w + 1.0) > 1e-6; ++iter) {
        const double ew = std::exp(w);
        const double fw = w * ew - x;
        if (fw == 0.0) break;
        const double denom = ew * (w + 1.0) - (w + 2.0) * fw / (2.0 * w + 2.0);
        const double next = w - fw / denom;
        if (!std::isfinite(next) || next > -1.0 || std::abs(f(next)) >= std::abs(fw)) break;
        w = next;
    }
    return w;
}

}  // namespace mtctrl
