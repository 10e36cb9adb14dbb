#include <random>

#include <Eigen/Eigenvalues>

#include "mtctrl/benchmarks.hpp"

namespace mtctrl {

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
    // splitmix64 finalizer over a combined key
    std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + trial + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

StateSpace random_siso(int n, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorCode::DomainError, "random_siso: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> real_part(-2.0, -0.2);
    std::uniform_real_distribution<double> imag_part(0.0, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix A = Matrix::Zero(n, n);
        int k = 0;
        while (k < n) {
            if (k + 1 < n && coin(rng) < 0.5) {
                const double re = real_part(rng);
                const double im = imag_part(rng);
                A(k, k) = re;
                A(k, k + 1) = im;
                A(k + 1, k) = -im;
                A(k + 1, k + 1) = re;
                k += 2;
            } else {
                A(k, k) = real_part(rng);
                k += 1;
            }
        }
        Matrix B(n, 1), C(1, n);
        for (int i = 0; i < n; ++i) B(i, 0) = normal(rng);
        for (int i = 0; i < n; ++i) C(0, i) = normal(rng);
        StateSpace sys = StateSpace::make(A, B, C);

        const Gramians g = gramians(sys);
        const double p_min = Eigen::SelfAdjointEigenSolver<Matrix>(g.P).eigenvalues().minCoeff();
        const double q_min = Eigen::SelfAdjointEigenSolver<Matrix>(g.Q).eigenvalues().minCoeff();
        if (p_min > 1e-8 && q_min > 1e-8) return sys;
    }
    throw Error(ErrorCode::GenerationFailure, "random_siso: 100 draws without a minimal system");
}

}  // namespace mtctrl
