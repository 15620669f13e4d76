#pragma once

#include <vector>

#include "pxp/observables.hpp"
#include "pxp/params.hpp"

namespace pxp {

struct Velocity {
    double a = 0.0, b = 0.0;
};

struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<double> theta_a, theta_b; // wrapped to [-pi, pi)
    std::vector<double> gamma;
    double integrated_leakage = 0.0;
    double period = 0.0;  // 0 when no closure was detected
    bool closed = false;
    bool truncated = false; // left the backend validity region
};

class Tdvp {
  public:
    Tdvp(int dim, Backend backend, int cylinder_L = 10, int order = 0);

    int dim() const { return dim_; }
    const ObsEngine& engine() const { return eng_; }

    /// Equations of motion at phi = 0. Falls back to the exact product-state
    /// expressions on the axes where the generic ratio degenerates to 0/0.
    Velocity eom(double theta_a, double theta_b) const;

    /// Per-site leakage rate gamma >= 0.
    double leakage(double theta_a, double theta_b) const;
    double leakage(double theta_a, double theta_b, const Velocity& v) const;

    /// Fixed-step fourth-order integration; gamma recorded every sample_stride
    /// steps and integrated by the trapezoid rule.
    TrajectoryRecord integrate(double theta_a0, double theta_b0, double dt, double t_max,
                               bool record_gamma = true, int sample_stride = 5) const;

    /// Full-cycle Z2 -> Z2' -> Z2 orbit with nearest-approach closure
    /// interpolation. Also integrates the leakage along the orbit.
    TrajectoryRecord z2_orbit(double dt = 1e-3) const;

    /// Origin -> (pi, pi) diagonal path; stops within `corner_margin` of the
    /// corner where the transfer spectrum degenerates.
    TrajectoryRecord diagonal_path(double dt = 1e-3, double corner_margin = 1e-4) const;

  private:
    int dim_;
    ObsEngine eng_;
};

/// Closed-form 1D equation of motion (general point).
double eom_1d_closed_form(double theta_a, double theta_b);

/// Axis form in any dimension.
Velocity eom_axis_theta_a(double theta_a, int dim); // point (theta_a, 0)

} // namespace pxp
