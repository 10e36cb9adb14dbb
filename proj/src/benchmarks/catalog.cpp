#include "mtctrl/benchmarks.hpp"

namespace mtctrl {

namespace {

StateSpace second_order(double a21, double a22, double b1, double b2) {
    Matrix A(2, 2), B(2, 1), C(1, 2);
    A << 0.0, 1.0, a21, a22;
    B << b1, b2;
    C << 1.0, 0.0;
    return StateSpace::make(A, B, C);
}

}  // namespace

PlantCatalog plant_catalog(const PlantParameters& k) {
    const double Jt = k.J_t();
    PlantCatalog cat;
    // Roll dynamics J theta'' = r u with the angle measured.  Read as a double
    // integrator: the all-zero A with a rate output is neither stabilizable
    // nor detectable, so no LQG design would exist for it.
    cat.aircraft = second_order(0.0, 0.0, 0.0, k.r / k.J);
    cat.pendulum = second_order(k.m * k.g * k.l / Jt, 0.0, 0.0, 1.0 / Jt);
    cat.pendulum_friction = second_order(k.m * k.g * k.l / Jt, k.gamma / Jt, 0.0, 1.0 / Jt);
    cat.bicycle = second_order(k.M_mass * k.g * k.h / k.J_b, 0.0, k.D * k.v0 / (k.b * k.J_b),
                               k.M_mass * k.v0 * k.v0 * k.h / (k.b * k.J_b));
    return cat;
}

StateSpace lqg_controller(const StateSpace& plant) {
    plant.validate();
    const auto n = plant.states();
    const Matrix Qx = Matrix::Identity(n, n);
    const LqrSolution state = lqr(plant.A, plant.B, Qx, Matrix::Identity(plant.inputs(), plant.inputs()));
    LqrSolution observer;
    try {
        observer = lqr(plant.A.transpose(), plant.C.transpose(), Qx,
                       Matrix::Identity(plant.outputs(), plant.outputs()));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotStabilizable) {
            throw Error(ErrorCode::NotDetectable, "lqg_controller: plant is not detectable");
        }
        throw;
    }
    const Matrix L = observer.K.transpose();
    return StateSpace::make(plant.A - plant.B * state.K - L * plant.C, L, state.K);
}

}  // namespace mtctrl
