#pragma once

#include <array>
#include <complex>
#include <vector>

namespace pxp {

using cplx = std::complex<double>;

/// Rank-2 physical-space operator (spin-1/2), row = bra index, col = ket index.
/// Basis order: 0 = down, 1 = up.
using Mat2 = std::array<std::array<cplx, 2>, 2>;

Mat2 op_identity();
Mat2 op_sigma_x();
Mat2 op_number();       // |1><1|
Mat2 op_projector();    // |0><0|
Mat2 op_sigma_z();
Mat2 mat_mul(const Mat2& a, const Mat2& b);

/// Single-layer site tensor with one physical leg and D in / D out virtual legs
/// of dimension 2. Virtual leg groups are packed as bit strings (bit k = axis k).
struct SiteTensor {
    int dim = 1;
    // a[s][in][out], in/out in [0, 2^D)
    std::vector<cplx> a;

    SiteTensor() = default;
    explicit SiteTensor(int d) : dim(d), a(2u << (2 * d), cplx(0)) {}
    cplx& at(int s, int in, int out) { return a[(static_cast<size_t>(s) << (2 * dim)) + (static_cast<size_t>(in) << dim) + out]; }
    cplx at(int s, int in, int out) const { return a[(static_cast<size_t>(s) << (2 * dim)) + (static_cast<size_t>(in) << dim) + out]; }
};

/// The ansatz tensor:
///   M(theta, phi) = |down> ( cos(theta/2) |0><0| + |beta><0| )
///                   - i e^{i phi} sin(theta/2) |up> |0><1|
/// with |beta> the sum over all nonzero in-strings.
SiteTensor site_tensor(double theta, double phi, int dim);

/// dM/dtheta of the tensor above.
SiteTensor site_tensor_deriv(double theta, double phi, int dim);

/// Double-layer tensor with D in / D out legs of dimension 4. A leg value packs
/// the ket and bra layers as 2*ket + bra; index groups are packed base-4
/// (digit k = axis k).
struct DoubleTensor {
    int dim = 1;
    std::vector<cplx> a; // a[in4][out4], in4/out4 in [0, 4^D)

    DoubleTensor() = default;
    explicit DoubleTensor(int d) : dim(d), a(1u << (4 * d), cplx(0)) {}
    cplx& at(int in4, int out4) { return a[(static_cast<size_t>(in4) << (2 * dim)) + out4]; }
    cplx at(int in4, int out4) const { return a[(static_cast<size_t>(in4) << (2 * dim)) + out4]; }
};

/// Reduced (bond-dimension-2) tensor with D in / D out legs.
struct ReducedTensor {
    int dim = 1;
    std::vector<cplx> a; // a[in][out], in/out in [0, 2^D)

    ReducedTensor() = default;
    explicit ReducedTensor(int d) : dim(d), a(1u << (2 * d), cplx(0)) {}
    cplx& at(int in, int out) { return a[(static_cast<size_t>(in) << dim) + out]; }
    cplx at(int in, int out) const { return a[(static_cast<size_t>(in) << dim) + out]; }
};

/// Sandwich <bra| op |ket> of two site tensors around a physical operator:
///   B[in4][out4] = sum_{s,s'} op[s][s'] ket[s'] conj(bra[s]).
DoubleTensor sandwich(const Mat2& op, const SiteTensor& ket, const SiteTensor& bra);

/// T = <M|M> for the identity operator.
DoubleTensor double_tensor(double theta, double phi, int dim);

/// Diagonal-pair slice t[a][b] = T[(aa)...][(bb)...].
ReducedTensor reduce(const DoubleTensor& T);

ReducedTensor tensor_p(int dim); // |alpha><0|
ReducedTensor tensor_q(int dim); // |0><0| - |0><1|
ReducedTensor reduced_t(double theta, int dim); // p - sin^2(theta/2) q

/// Pack a bit string into the pair string with every leg diagonal: 0 -> (00), 1 -> (11).
int diag_pairs(int bits, int dim);

} // namespace pxp
