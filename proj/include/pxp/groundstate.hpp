#pragma once

#include <vector>

#include "pxp/observables.hpp"
#include "pxp/params.hpp"

namespace pxp {

enum class TransitionOrder { none, second, first };

struct PhasePoint {
    double delta = 0.0, v = 0.0;
    double theta_a = 0.0, theta_b = 0.0; // ordered theta_a >= theta_b
    double energy = 0.0;                 // per site
    double order_parameter = 0.0;        // <sz_A> - <sz_B>
    bool degenerate_pair = false;        // symmetry-broken doublet
    bool in_regime = true;               // series mask at the minimum
};

struct TransitionScan {
    double delta_c = 0.0;
    TransitionOrder order = TransitionOrder::none;
    std::vector<PhasePoint> points;
    bool found = false;
};

struct TricriticalPoint {
    double v_c = 0.0;
    double delta_tc = 0.0;
    bool found = false;
};

struct ExponentFit {
    double beta = 0.0;
    double r2 = 0.0;
    double delta_c = 0.0;
    bool ok = false;
};

class GroundState {
  public:
    GroundState(ModelParams model, Backend backend = Backend::series, int cylinder_L = 10, int order = 0);

    const ModelParams& model() const { return model_; }
    const ObsEngine& engine() const { return eng_; }

    /// Variational energy per site at phi_A = phi_B = pi/2.
    double energy_per_site(double theta_a, double theta_b) const;

    /// Global minimum over the square, coarse grid + simplex refinement.
    /// Symmetric pairs are deduplicated by ordering theta_a >= theta_b.
    PhasePoint minimize(int grid = 60) const;

    double order_parameter(const PhasePoint& pt) const;

  private:
    ModelParams model_;
    ObsEngine eng_;
};

/// Scan a detuning interval at fixed V; locates the symmetry-breaking onset
/// and classifies the transition (first order when the refined ground-state
/// angles jump by more than 0.05 rad across one 1e-3 detuning step).
TransitionScan transition_scan(int dim, double v, double delta_lo, double delta_hi, double coarse_step,
                               Backend backend);

/// Boundary between second- and first-order behaviour on a V grid.
TricriticalPoint tricritical_scan(int dim, double v_lo, double v_hi, double v_tol, Backend backend);

/// Power-law fit |theta_a - theta_b| ~ (delta - delta_c)^beta above the
/// transition at V = 0.
ExponentFit critical_exponent(int dim, Backend backend, int points = 10, double window = 0.1);

Backend default_gs_backend(int dim);

} // namespace pxp
