#pragma once

#include <memory>
#include <optional>

#include "pxp/blocks.hpp"
#include "pxp/chain.hpp"
#include "pxp/cylinder.hpp"
#include "pxp/params.hpp"
#include "pxp/series.hpp"

namespace pxp {

enum class Backend { chain1d, cylinder, series };

const char* backend_name(Backend b);
Backend backend_from_name(const std::string& s);

/// Observable layer dispatching insertions to a contraction backend.
/// Sublattice argument 0 anchors on A (params slot 0), 1 on B.
class ObsEngine {
  public:
    ObsEngine(int dim, Backend backend, int cylinder_L = 10, int order = 0);

    int dim() const { return dim_; }
    Backend backend() const { return backend_; }
    int order() const { return order_; }
    int cylinder_circumference() const { return cyl_L_; }

    /// Raw insertion expectation value with the block anchored on `subl`.
    cplx expect(const BlockSpec& spec, int subl, const VariationalParams& p) const;

    double one_point_n(int subl, const VariationalParams& p) const;
    /// <sigma^x> on the given sublattice; uses the phi angles in `p`.
    double one_point_sx(int subl, const VariationalParams& p) const;
    /// F(theta_anchor, theta_opp) = <sigma^x>/sin(phi) evaluated at phi = pi/2.
    double f_pxp(int subl, const VariationalParams& p) const;

    double two_point_nn(int subl, const Coord& separation, const VariationalParams& p) const;
    double two_point_nn_connected(int subl, const Coord& separation, const VariationalParams& p) const;

    double gram(int subl, const VariationalParams& p) const;     // <d psi|d psi> per site
    cplx k_term(int subl, const VariationalParams& p) const;     // <d_a psi|sx_a|psi>
    cplx s_term(int subl, const VariationalParams& p) const;     // <d_a psi|sx_b|psi>, b upstream
    double proj_ring(int subl, const VariationalParams& p) const;
    double sx_proj_sx(int subl, const VariationalParams& p) const;
    double sxsx_diag(int subl, const VariationalParams& p) const;

    /// Reuse cached cylinder environments across calls at the same parameters.
    void warm_start(bool enable) { warm_ = enable; }

  private:
    const CylinderEnv& env_for(const VariationalParams& p, int slot) const;
    double real_checked(cplx v, const char* what) const;

    int dim_;
    Backend backend_;
    int cyl_L_;
    int order_;
    bool warm_ = true;
    mutable std::optional<CylinderEnv> env_[2]; // one per anchor sublattice
};

struct CorrelationFit {
    double xi = 0.0;
    double amplitude = 0.0;
    double r2 = 0.0;       // fit quality of log|f| vs r
    int points = 0;
    bool ok = false;
    bool monotonic = true;
};

/// Exponential fit f(r) = A exp(-r/xi) of connected density-density
/// correlations along the +x axis, separations r in [2, max_r].
CorrelationFit correlation_length(const ObsEngine& eng, const VariationalParams& p, int max_r);

} // namespace pxp
