#include <gtest/gtest.h>

#include "mtctrl/benchmarks.hpp"

using namespace mtctrl;

// Long training runs, registered only under `ctest -C Acceptance`.

TEST(Train, RandomSisoLargeN) {
    // M = 5 random SISO (n = 2), N = 8, 3000 iterations, the 20 default
    // trials of the dimension sweep: below 1e-1 in the median
    const ExperimentConfig cfg;
    ASSERT_EQ(cfg.trials, 20);
    ASSERT_EQ(cfg.iters, 3000);
    const ExperimentRecord rec = experiment_cost_vs_dim(cfg, 5, {8});
    EXPECT_LT(rec.summary(8).median, 1e-1);
}
