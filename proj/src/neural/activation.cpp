#include <cmath>
#include <string>

#include "mtctrl/neural.hpp"

namespace mtctrl {

double softplus(double x) {
    if (x > 30.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double y) {
    if (!(y > 0.0 && y < 1.0)) {
        throw Error(ErrorCode::DomainError, "logit argument " + std::to_string(y) + " not in (0, 1)");
    }
    return std::log(y) - std::log1p(-y);
}

Vector softplus(const Vector& x) { return x.unaryExpr([](double v) { return softplus(v); }); }
Vector sigmoid(const Vector& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }
Vector logit(const Vector& y) { return y.unaryExpr([](double v) { return logit(v); }); }

}  // namespace mtctrl
