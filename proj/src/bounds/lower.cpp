#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtctrl/bounds.hpp"

namespace mtctrl {

double lower_bound_sup(const MultiTaskProblem& problem) {
    problem.validate();
    const auto M = problem.tasks();
    Matrix mean = Matrix::Zero(problem.outputs(), problem.inputs());
    for (const auto& sys : problem.systems) mean += sys.C * sys.B;
    mean /= static_cast<double>(M);
    double sum = 0.0;
    for (const auto& sys : problem.systems) sum += (sys.C * sys.B - mean).squaredNorm();
    return std::sqrt(sum / static_cast<double>(std::min(problem.outputs(), problem.inputs())));
}

std::vector<ScalarSystem> scalar_systems(const MultiTaskProblem& problem) {
    std::vector<ScalarSystem> out;
    out.reserve(problem.systems.size());
    for (std::size_t i = 0; i < problem.systems.size(); ++i) {
        const auto& sys = problem.systems[i];
        if (sys.states() != 1 || sys.inputs() != 1 || sys.outputs() != 1) {
            throw Error(ErrorCode::NotScalar, "systems[" + std::to_string(i) + "] is not scalar");
        }
        out.push_back({sys.A(0, 0), sys.B(0, 0) * sys.C(0, 0)});
    }
    return out;
}

namespace {

void check_signs(const std::vector<ScalarSystem>& systems) {
    for (std::size_t i = 0; i < systems.size(); ++i) {
        if (!(systems[i].a < 0.0) || !(systems[i].r > 0.0)) {
            throw Error(ErrorCode::SignError, "systems[" + std::to_string(i) +
                                                  "] needs a < 0 and r = b c > 0");
        }
    }
}

double pair_bound(const std::vector<ScalarSystem>& s, std::size_t j, std::size_t l) {
    return std::min({A_function(s, j, l), -A_function(s, l, j), -s[j].r / s[j].a});
}

}  // namespace

double A_function(const std::vector<ScalarSystem>& systems, std::size_t j, std::size_t l) {
    if (j >= systems.size() || l >= systems.size() || j == l) {
        throw Error(ErrorCode::DomainError, "A_function needs two distinct valid indices");
    }
    const ScalarSystem& sj = systems[j];
    const ScalarSystem& sl = systems[l];
    if (!(sj.a < 0.0) || !(sl.a < 0.0) || !(sj.r > 0.0) || !(sl.r > 0.0)) {
        throw Error(ErrorCode::DomainError, "A_function needs a < 0 and r > 0");
    }
    static const double w = lambert_w_neg1(-1.0 / (2.0 * std::exp(1.0)));
    return sj.r / sj.a - (sl.r / sj.a) * (std::log(sl.r / sj.r) / w + 1.0);
}

L1Bound lower_bound_l1(const std::vector<ScalarSystem>& systems, bool sharpen) {
    if (systems.size() < 2) throw Error(ErrorCode::DomainError, "lower_bound_l1 needs M >= 2");
    check_signs(systems);

    std::vector<std::size_t> order(systems.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return systems[a].r < systems[b].r; });
    std::vector<ScalarSystem> sorted;
    for (auto k : order) sorted.push_back(systems[k]);

    L1Bound best{pair_bound(sorted, 0, 1), order[0], order[1]};
    if (sharpen) {
        for (std::size_t j = 0; j < sorted.size(); ++j) {
            for (std::size_t l = j + 1; l < sorted.size(); ++l) {
                const double v = pair_bound(sorted, j, l);
                if (v > best.value) best = {v, order[j], order[l]};
            }
        }
    }
    best.value = std::max(0.0, best.value);
    return best;
}

}  // namespace mtctrl
