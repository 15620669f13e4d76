#pragma once

#include <vector>

#include "pxp/lattice.hpp"
#include "pxp/params.hpp"
#include "pxp/site_tensors.hpp"

namespace pxp {

/// Exact amplitudes of the tensor-network state on a small lattice by
/// brute-force contraction over all virtual bond configurations.
/// Intended as a validation oracle; guarded to <= 24 bonds.
class FiniteState {
  public:
    /// Per-site angles indexed by sublattice, the usual two-site unit cell.
    FiniteState(const Lattice& lattice, const VariationalParams& p);
    /// Arbitrary per-site angles (thetas[i], phis[i]).
    FiniteState(const Lattice& lattice, std::vector<double> thetas, std::vector<double> phis);

    const Lattice& lattice() const { return lat_; }

    /// Amplitude of one spin configuration (bit i = site i up), unnormalized.
    cplx amplitude(uint64_t config) const;

    /// Full unnormalized state vector over all 2^N configurations.
    std::vector<cplx> state_vector() const;
    /// Normalized state vector.
    std::vector<cplx> state_vector_normalized() const;

  private:
    Lattice lat_;
    std::vector<double> thetas_, phis_;
    std::vector<std::pair<int, int>> bonds_; // directed edges u -> u+e
    std::vector<SiteTensor> site_tensors_;
    // derivative replacement used by derivative_vector
    friend std::vector<cplx> derivative_vector(const FiniteState&, int site);
};

/// |d_i psi>: the state vector with dM/dtheta inserted at one site.
std::vector<cplx> derivative_vector(const FiniteState& st, int site);

/// All blockade-satisfying configurations of a small lattice (N <= 20).
std::vector<uint64_t> blockade_configs(const Lattice& lattice);

/// Unnormalized ansatz amplitudes for the listed configurations. Uses the
/// transfer-matrix trace in 1D and a column transfer in 2D, falling back to
/// the brute-force contraction elsewhere.
std::vector<cplx> ansatz_amplitudes(const Lattice& lattice, const VariationalParams& p,
                                    const std::vector<uint64_t>& configs);

/// Projected product state (blockade projector applied to a product of spin
/// coherent states), normalized. Amplitude of config c is the product of
/// single-site coherent amplitudes if c satisfies the blockade, else zero.
std::vector<cplx> projected_product_state(const Lattice& lattice, const std::vector<double>& vartheta,
                                          const std::vector<double>& varphi);

cplx overlap(const std::vector<cplx>& a, const std::vector<cplx>& b);

struct OverlapOpt {
    double best = 0.0;           // max |<target|psi(params)>| over the manifold
    VariationalParams argmax;
    bool converged = false;
    int restarts = 0;
};

/// Maximize |<target|psi(theta_A,theta_B,phi_A,phi_B)>| over the manifold on
/// the given lattice (multi-start Nelder-Mead).
OverlapOpt maximize_manifold_overlap(const Lattice& lattice, const std::vector<cplx>& target,
                                     int restarts = 24, uint64_t seed = 1234);

// --- small numeric helpers shared by the optimizers -------------------------

/// Nelder-Mead minimizer; returns best point. f: R^n -> R.
std::vector<double> nelder_mead(const std::vector<double>& start, double step,
                                double (*f)(const std::vector<double>&, void*), void* ctx,
                                int max_iter = 4000, double tol = 1e-12);

} // namespace pxp
