#include "pxp/site_tensors.hpp"

#include <cmath>
#include <stdexcept>

namespace pxp {

Mat2 op_identity() { return {{{cplx(1), cplx(0)}, {cplx(0), cplx(1)}}}; }
Mat2 op_sigma_x() { return {{{cplx(0), cplx(1)}, {cplx(1), cplx(0)}}}; }
Mat2 op_number() { return {{{cplx(0), cplx(0)}, {cplx(0), cplx(1)}}}; }
Mat2 op_projector() { return {{{cplx(1), cplx(0)}, {cplx(0), cplx(0)}}}; }
Mat2 op_sigma_z() { return {{{cplx(-1), cplx(0)}, {cplx(0), cplx(1)}}}; }

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

static void check_dim(int dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("site tensor: dimension must be 1, 2 or 3");
}

SiteTensor site_tensor(double theta, double phi, int dim) {
    check_dim(dim);
    SiteTensor m(dim);
    const int n = 1 << dim;
    const cplx up_amp = -cplx(0, 1) * std::exp(cplx(0, phi)) * std::sin(theta / 2);
    m.at(0, 0, 0) = std::cos(theta / 2);
    for (int in = 1; in < n; ++in) m.at(0, in, 0) = 1.0; // |beta><0|
    m.at(1, 0, n - 1) = up_amp;
    return m;
}

SiteTensor site_tensor_deriv(double theta, double phi, int dim) {
    check_dim(dim);
    SiteTensor m(dim);
    const int n = 1 << dim;
    m.at(0, 0, 0) = -0.5 * std::sin(theta / 2);
    m.at(1, 0, n - 1) = -cplx(0, 0.5) * std::exp(cplx(0, phi)) * std::cos(theta / 2);
    return m;
}

DoubleTensor sandwich(const Mat2& op, const SiteTensor& ket, const SiteTensor& bra) {
    const int dim = ket.dim;
    const int n = 1 << dim;
    DoubleTensor out(dim);
    for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp) {
            const cplx w = op[s][sp];
            if (w == cplx(0)) continue;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const cplx kv = ket.at(sp, a, b);
                    if (kv == cplx(0)) continue;
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) {
                            const cplx bv = bra.at(s, c, d);
                            if (bv == cplx(0)) continue;
                            // pair digit on axis k: 2*ket_bit + bra_bit
                            int in4 = 0, out4 = 0;
                            for (int k = 0; k < dim; ++k) {
                                in4 |= ((((a >> k) & 1) << 1) | ((c >> k) & 1)) << (2 * k);
                                out4 |= ((((b >> k) & 1) << 1) | ((d >> k) & 1)) << (2 * k);
                            }
                            out.at(in4, out4) += w * kv * std::conj(bv);
                        }
                }
        }
    return out;
}

DoubleTensor double_tensor(double theta, double phi, int dim) {
    SiteTensor m = site_tensor(theta, phi, dim);
    return sandwich(op_identity(), m, m);
}

int diag_pairs(int bits, int dim) {
    int p = 0;
    for (int k = 0; k < dim; ++k)
        if ((bits >> k) & 1) p |= 3 << (2 * k);
    return p;
}

ReducedTensor reduce(const DoubleTensor& T) {
    const int dim = T.dim;
    ReducedTensor r(dim);
    const int n = 1 << dim;
    for (int i = 0; i < n; ++i)
        for (int o = 0; o < n; ++o) r.at(i, o) = T.at(diag_pairs(i, dim), diag_pairs(o, dim));
    return r;
}

ReducedTensor tensor_p(int dim) {
    check_dim(dim);
    ReducedTensor p(dim);
    for (int i = 0; i < (1 << dim); ++i) p.at(i, 0) = 1.0;
    return p;
}

ReducedTensor tensor_q(int dim) {
    check_dim(dim);
    ReducedTensor q(dim);
    q.at(0, 0) = 1.0;
    q.at(0, (1 << dim) - 1) = -1.0;
    return q;
}

ReducedTensor reduced_t(double theta, int dim) {
    check_dim(dim);
    ReducedTensor t = tensor_p(dim);
    const double s2 = std::sin(theta / 2) * std::sin(theta / 2);
    const ReducedTensor q = tensor_q(dim);
    for (size_t i = 0; i < t.a.size(); ++i) t.a[i] -= s2 * q.a[i];
    return t;
}

} // namespace pxp
