#pragma once

#include "pxp/blocks.hpp"
#include "pxp/params.hpp"

namespace pxp {

/// Expectation value of an insertion on the infinite 1D chain via the 2x2
/// transfer matrix. The block anchor sits on the sublattice of slot 0.
/// Throws if the dominant transfer eigenvalue is (near-)degenerate.
cplx chain_expect(const ReducedBlock& block, const VariationalParams& p);
cplx chain_expect(const BlockSpec& spec, const VariationalParams& p);

/// Same insertion evaluated on a finite periodic ring of N sites by transfer
/// traces, with explicit finite-size normalization. N must be even.
cplx chain_expect_finite(const ReducedBlock& block, const VariationalParams& p, int n_sites);

/// Second transfer eigenvalue |lambda_2| of the two-site unit cell (the
/// dominant one is exactly 1); controls the correlation length.
double chain_second_eigenvalue(const VariationalParams& p);

} // namespace pxp
