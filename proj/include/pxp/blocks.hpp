#pragma once

#include <string>
#include <vector>

#include "pxp/lattice.hpp"
#include "pxp/params.hpp"
#include "pxp/site_tensors.hpp"

namespace pxp {

/// One site of an operator insertion. Layers select M or dM/dtheta.
struct BlockSite {
    Coord pos{0, 0, 0};
    bool ket_deriv = false;
    bool bra_deriv = false;
};

/// One product term of the inserted operator: coeff * (x) per-site 2x2 factors.
struct OpTerm {
    cplx coeff{1.0, 0.0};
    std::vector<Mat2> ops;
};

/// Operator insertion descriptor. Sites are relative to the anchor at the
/// origin, whose sublattice maps to argument slot 0 at evaluation time.
struct BlockSpec {
    int dim = 1;
    std::string id; // stable identifier, used as cache key
    std::vector<BlockSite> sites;
    std::vector<OpTerm> terms;
};

/// Per-site factor of a resolved product term, dense over the reduced
/// external legs (in index runs over 2^{#ext in legs}, likewise out).
struct SiteFactor {
    int nin = 0, nout = 0;
    std::vector<cplx> a;
    cplx at(int i, int o) const { return a[(static_cast<size_t>(i) << nout) + o]; }
    cplx& at(int i, int o) { return a[(static_cast<size_t>(i) << nout) + o]; }
};

struct BlockTerm {
    cplx coeff{1.0, 0.0};
    std::vector<SiteFactor> factors; // aligned with ReducedBlock::sites
};

struct BlockSiteMeta {
    Coord pos{0, 0, 0};
    int parity = 0;                 // coordinate-sum parity relative to the anchor
    std::vector<int> ext_in_axes;   // ascending
    std::vector<int> ext_out_axes;
};

struct LegRef {
    int site = 0;
    int axis = 0;
};

/// Insertion after fusion with downstream T tensors, internal-leg resolution
/// into product terms, and bond-dimension reduction of all external legs.
struct ReducedBlock {
    int dim = 1;
    std::string id;
    std::vector<BlockSiteMeta> sites;
    std::vector<BlockTerm> terms;

    std::vector<LegRef> in_legs;    // global external in-leg table
    std::vector<LegRef> out_legs;
    std::vector<char> in_accepts_one;  // structural: a 1 on this leg can be nonzero
    std::vector<char> out_emits_zero;  // structural: this leg can emit 0

    int site_at(const Coord& c) const; // -1 if absent
    int in_leg_id(int site, int axis) const;
    int out_leg_id(int site, int axis) const;

    /// Contract the block with in-legs set to the bits of `pmask` (by in-leg id),
    /// out-legs in `omask` projected onto emission 0, and remaining out-legs
    /// summed over both emissions.
    cplx value(uint32_t pmask, uint32_t omask) const;
};

/// Build the reduced block at the given angles. theta/phi are indexed by
/// parity relative to the anchor (slot 0 = anchor sublattice).
ReducedBlock build_block(const BlockSpec& spec, const VariationalParams& p);

// ---- Insertion spec factory -------------------------------------------------

BlockSpec spec_identity(int dim);
BlockSpec spec_n(int dim);
BlockSpec spec_sigma_x(int dim);
/// n_0 n_r two-point insertion at the given separation.
BlockSpec spec_nn(int dim, const Coord& separation);
BlockSpec spec_gram(int dim);                  // <d_a psi | d_a psi> insertion
BlockSpec spec_k_term(int dim);                // <d_a psi | sx_a | psi>
BlockSpec spec_s_term(int dim);                // <d_a psi | sx_b | psi>, b upstream of a
BlockSpec spec_proj_ring(int dim);             // (x)_{i in N(a)} P_i
BlockSpec spec_sx_proj_sx(int dim);            // sx_a P_{a,a+x} sx_{a+x}
BlockSpec spec_sxsx_diag(int dim);             // sx_a sx_{a'}, a' = a + x - y (D >= 2)

} // namespace pxp
