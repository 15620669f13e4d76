#pragma once

#include <cmath>
#include <stdexcept>

namespace pxp {

inline constexpr double kPi = 3.14159265358979323846;

/// Wrap an angle into the principal range [-pi, pi).
inline double wrap_angle(double x) {
    double y = std::remainder(x, 2.0 * kPi);
    if (y >= kPi) y -= 2.0 * kPi;
    if (y < -kPi) y += 2.0 * kPi;
    return y;
}

/// Two-sublattice variational angles. Index 0 is sublattice A, 1 is B.
struct VariationalParams {
    double theta[2] = {0.0, 0.0};
    double phi[2] = {0.0, 0.0};

    VariationalParams() = default;
    VariationalParams(double theta_a, double theta_b, double phi_a = 0.0, double phi_b = 0.0) {
        theta[0] = wrap_angle(theta_a);
        theta[1] = wrap_angle(theta_b);
        phi[0] = phi_a;
        phi[1] = phi_b;
    }

    /// Params with the sublattice roles exchanged.
    VariationalParams swapped() const {
        return VariationalParams(theta[1], theta[0], phi[1], phi[0]);
    }
};

/// Hamiltonian couplings for the generalized PXP model. Omega is fixed to 1.
struct ModelParams {
    double delta = 0.0;   // detuning, units of Omega
    double v = 0.0;       // next-nearest-neighbour coupling
    int dim = 1;

    ModelParams() = default;
    ModelParams(int d, double delta_, double v_) : delta(delta_), v(v_), dim(d) {
        if (d < 1 || d > 3) throw std::invalid_argument("ModelParams: dimension must be 1, 2 or 3");
        if (!std::isfinite(delta_) || !std::isfinite(v_))
            throw std::invalid_argument("ModelParams: couplings must be finite");
    }
};

} // namespace pxp
