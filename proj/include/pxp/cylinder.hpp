#pragma once

#include <vector>

#include "pxp/blocks.hpp"
#include "pxp/params.hpp"

namespace pxp {

/// Row tensor of a cylinder column: legs (in_x, in_y, out_x, out_y) with
/// per-leg dimensions of 1 or 2. Dimension-1 legs are internally resolved
/// block edges.
struct RowTensor {
    int dix = 2, diy = 2, dox = 2, doy = 2;
    std::vector<cplx> a;

    RowTensor() = default;
    RowTensor(int a_, int b_, int c_, int d_) : dix(a_), diy(b_), dox(c_), doy(d_), a(static_cast<size_t>(a_) * b_ * c_ * d_, cplx(0)) {}
    cplx& at(int ix, int iy, int ox, int oy) { return a[((static_cast<size_t>(ix) * diy + iy) * dox + ox) * doy + oy]; }
    cplx at(int ix, int iy, int ox, int oy) const { return a[((static_cast<size_t>(ix) * diy + iy) * dox + ox) * doy + oy]; }
};

struct ColumnSpec {
    int L = 0;
    std::vector<RowTensor> rows; // y = 0 .. L-1, periodic ring
    size_t in_size() const;
    size_t out_size() const;
};

/// Contract one ring column into a boundary vector (left-to-right transfer).
std::vector<cplx> apply_column(const ColumnSpec& col, const std::vector<cplx>& vec);
/// Transposed application (right-to-left absorption).
std::vector<cplx> apply_column_transposed(const ColumnSpec& col, const std::vector<cplx>& vec);
/// Reference implementation without the OpenMP split, for testing.
std::vector<cplx> apply_column_serial(const ColumnSpec& col, const std::vector<cplx>& vec);

/// Dominant boundary environments of the infinite cylinder at circumference L.
struct CylinderEnv {
    int L = 0;
    VariationalParams params;
    double lambda_pair = 0.0;         // dominant eigenvalue of the two-column unit
    std::vector<cplx> left[2];        // left environment for a cut at even/odd column
    std::vector<cplx> right[2];       // right environment for a cut at even/odd column
};

/// Build environments by power iteration (Rayleigh tolerance 1e-13, at most
/// 1e5 sweeps). `warm` seeds the iteration with a previous environment.
CylinderEnv cylinder_env(const VariationalParams& p, int L, const CylinderEnv* warm = nullptr);

/// <psi|O|psi> on the infinite cylinder for a reduced insertion block.
cplx cylinder_expect(const ReducedBlock& block, const VariationalParams& p, const CylinderEnv& env);
cplx cylinder_expect(const BlockSpec& spec, const VariationalParams& p, int L = 10);

} // namespace pxp
