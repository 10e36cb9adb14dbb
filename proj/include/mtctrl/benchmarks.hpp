#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mtctrl/bounds.hpp"
#include "mtctrl/trainer.hpp"

namespace mtctrl {

/// Physical constants of the four example plants.
struct PlantParameters {
    double g = 9.8;
    double J_p = 0.006;
    double m = 0.2;
    double l = 0.3;
    double gamma = 0.01;
    double J = 0.0475;
    double r = 25.0;
    double D = 4.8;
    double v0 = 2.5;
    double M_mass = 8.0;
    double h = 1.0;
    double b = 1.2;
    double J_b = 8.0;

    /// Pendulum inertia about the pivot, J_p + m l^2.
    double J_t() const { return J_p + m * l * l; }
};

struct PlantCatalog {
    StateSpace aircraft;
    StateSpace pendulum;
    StateSpace pendulum_friction;
    StateSpace bicycle;

    std::array<const StateSpace*, 4> all() const {
        return {&aircraft, &pendulum, &pendulum_friction, &bicycle};
    }
    static constexpr std::array<const char*, 4> names{"aircraft", "pendulum", "pendulum_friction",
                                                      "bicycle"};
};

PlantCatalog plant_catalog(const PlantParameters& params = {});

/// Observer-based output-feedback controller with identity-weight LQR state
/// gain K and dual-designed observer gain L: (A - B K - L C, L, K).
StateSpace lqg_controller(const StateSpace& plant);

/// Random stable SISO system.  Poles uniform in [-2, -0.2] (a conjugate pair
/// with probability 1/2 per pair, imaginary part uniform in [0, 2]); b, c
/// standard normal; resampled until both Gramians have min eigenvalue > 1e-8.
StateSpace random_siso(int n, std::uint64_t seed);

/// Independent per-trial seed; does not depend on execution order.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial);

struct Quartiles {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};
/// Linear-interpolation quartiles of the finite values.
Quartiles quartiles(std::vector<double> values);

struct TrialRecord {
    int sweep = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double final_cost = 0.0;
    double upper_bound = -1.0;  // only for count sweeps
    std::string status;
};

struct ExperimentRecord {
    std::string sweep_name;  // "N" or "M"
    std::vector<int> sweep_values;
    int trials = 0;
    std::vector<TrialRecord> rows;

    std::vector<double> costs_at(int sweep_value) const;
    Quartiles summary(int sweep_value) const;
};

struct ExperimentConfig {
    int trials = 20;
    int iters = 3000;
    std::uint64_t seed = 1;
    int workers = 0;  // <= 0: OpenMP default
    TrainConfig train;
};

/// M random SISO (n = 2) systems per trial, trained for every N in n_range.
ExperimentRecord experiment_cost_vs_dim(const ExperimentConfig& config, int M = 5,
                                        std::vector<int> n_range = {1, 2, 3, 4, 5, 6, 7, 8});

/// Nested subsets of ten random SISO systems, M in m_range, fixed N.  Also
/// records the upper bound of every (trial, M) problem.
ExperimentRecord experiment_cost_vs_count(const ExperimentConfig& config, int N = 4,
                                          std::vector<int> m_range = {3, 4, 5, 6, 7, 8, 9, 10});

/// The systems used by trial `trial` of the count sweep (first M of them).
std::vector<StateSpace> count_sweep_systems(std::uint64_t base_seed, int trial, int count = 10);

struct BoundGapRow {
    int M = 0;
    double mean_cost = 0.0;
    double mean_bound = 0.0;
    int violations = 0;
    int trials = 0;
};
std::vector<BoundGapRow> experiment_bound_gap(const ExperimentRecord& count_record);

struct ImpulseComparison {
    std::vector<double> t;
    Matrix desired;  // rows: time, cols: outputs
    Matrix neural;
    double max_gap() const;
};

/// Closed-loop impulse responses (input channel `input`) of the plant with
/// the desired controller and with the linearized neural controller.
ImpulseComparison impulse_comparison(const StateSpace& plant, const StateSpace& desired,
                                     const StateSpace& neural_linear, double t_max, double dt,
                                     Eigen::Index input = 0);

struct FourPlantDemo {
    PlantCatalog plants;
    MultiTaskProblem problem;  // the four LQG controllers, N = 3
    TrainResult result;
    std::vector<ImpulseComparison> responses;
    std::vector<double> closed_loop_abscissa;
};

FourPlantDemo four_plant_demo(const TrainConfig& config, int N = 3, double t_max = 10.0,
                              double dt = 0.01);

}  // namespace mtctrl
