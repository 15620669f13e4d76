#include "pxp/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace pxp {

namespace {

using Mat = std::array<cplx, 4>; // row-major 2x2

Mat mul(const Mat& a, const Mat& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat t_matrix(double theta) {
    const double s = std::sin(theta / 2) * std::sin(theta / 2);
    return {cplx(1.0 - s), cplx(s), cplx(1.0), cplx(0.0)};
}

// dominant right/left eigenvectors of a real-spectrum 2x2 matrix
struct EigPair {
    double lam1, lam2;
    std::array<cplx, 2> right, left;
};

EigPair dominant_eig(const Mat& m) {
    const cplx tr = m[0] + m[3];
    // (a-d)^2 + 4bc equals tr^2 - 4det without the catastrophic cancellation
    // that sets in when the transfer gap closes near the (pi, pi) corner
    const cplx ad = m[0] - m[3];
    const cplx disc = std::sqrt(ad * ad + 4.0 * m[1] * m[2]);
    cplx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
    EigPair e;
    e.lam1 = std::abs(l1);
    e.lam2 = std::abs(l2);
    if (e.lam1 - e.lam2 < 1e-12 * std::max(1.0, e.lam1))
        throw std::runtime_error("chain transfer matrix: degenerate dominant eigenvalue, |l1|=" +
                                 std::to_string(e.lam1) + " |l2|=" + std::to_string(e.lam2));
    // right: (m - l2 I) column with largest norm
    Mat r{m[0] - l2, m[1], m[2], m[3] - l2};
    if (std::abs(r[0]) + std::abs(r[2]) >= std::abs(r[1]) + std::abs(r[3]))
        e.right = {r[0], r[2]};
    else
        e.right = {r[1], r[3]};
    Mat lt{m[0] - l2, m[2], m[1], m[3] - l2}; // transpose shifted
    if (std::abs(lt[0]) + std::abs(lt[2]) >= std::abs(lt[1]) + std::abs(lt[3]))
        e.left = {lt[0], lt[2]};
    else
        e.left = {lt[1], lt[3]};
    return e;
}

// The per-site matrix of a block site, padded back to 2x2 index space. Fed
// legs have dimension one; absent indices are pinned to slot 0.
Mat factor_matrix(const SiteFactor& f) {
    Mat m{cplx(0), cplx(0), cplx(0), cplx(0)};
    for (int i = 0; i < (1 << f.nin); ++i)
        for (int o = 0; o < (1 << f.nout); ++o) m[2 * (f.nin ? i : 0) + (f.nout ? o : 0)] = f.at(i, o);
    return m;
}

} // namespace

cplx chain_expect(const ReducedBlock& block, const VariationalParams& p) {
    if (block.dim != 1) throw std::invalid_argument("chain_expect: block must be one-dimensional");

    int x0 = 0, x1 = -1; // empty block -> identity insertion
    if (!block.sites.empty()) {
        x0 = x1 = block.sites.front().pos[0];
        for (const auto& s : block.sites) {
            x0 = std::min(x0, s.pos[0]);
            x1 = std::max(x1, s.pos[0]);
        }
    }

    auto par = [](int x) { return ((x % 2) + 2) % 2; };
    const Mat tA = t_matrix(p.theta[0]);
    const Mat tB = t_matrix(p.theta[1]);
    auto t_of = [&](int x) { return par(x) == 0 ? tA : tB; };

    // environments: left eigvec of the cell starting at parity(x0), right
    // eigvec of the cell starting at parity(x1+1)
    const Mat cell0 = par(x0) == 0 ? mul(tA, tB) : mul(tB, tA);
    const Mat cell1 = par(x1 + 1) == 0 ? mul(tA, tB) : mul(tB, tA);
    EigPair el = dominant_eig(cell0);
    EigPair er = dominant_eig(cell1);
    const auto& l = el.left;
    const auto& r = er.right;

    auto span_value = [&](bool plain, const BlockTerm* term) {
        std::array<cplx, 2> v = {r[0], r[1]};
        for (int x = x1; x >= x0; --x) {
            Mat m = t_of(x);
            if (!plain) {
                int si = block.site_at({x, 0, 0});
                if (si >= 0) m = factor_matrix(term->factors[si]);
            }
            v = {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
        }
        return l[0] * v[0] + l[1] * v[1];
    };

    cplx den = span_value(true, nullptr);
    if (std::abs(den) < 1e-300) throw std::runtime_error("chain_expect: vanishing environment overlap");
    cplx num(0.0);
    for (const auto& term : block.terms) num += term.coeff * span_value(false, &term);
    return num / den;
}

cplx chain_expect(const BlockSpec& spec, const VariationalParams& p) {
    return chain_expect(build_block(spec, p), p);
}

cplx chain_expect_finite(const ReducedBlock& block, const VariationalParams& p, int n_sites) {
    if (block.dim != 1) throw std::invalid_argument("chain_expect_finite: 1D block required");
    if (n_sites < 2 || n_sites % 2 != 0) throw std::invalid_argument("chain_expect_finite: even N required");
    int x0 = 0, x1 = -1;
    for (const auto& s : block.sites) {
        x0 = std::min(x0, s.pos[0]);
        x1 = std::max(x1, s.pos[0]);
    }
    if (x1 - x0 >= n_sites) throw std::invalid_argument("chain_expect_finite: block larger than ring");

    auto par = [](int x) { return ((x % 2) + 2) % 2; };
    const Mat tA = t_matrix(p.theta[0]);
    const Mat tB = t_matrix(p.theta[1]);

    auto ring = [&](bool plain, const BlockTerm* term) {
        Mat m{cplx(1), cplx(0), cplx(0), cplx(1)};
        for (int x = x0; x < x0 + n_sites; ++x) {
            Mat site = par(x) == 0 ? tA : tB;
            if (!plain) {
                int si = block.site_at({x, 0, 0});
                if (si >= 0) site = factor_matrix(term->factors[si]);
            }
            m = mul(m, site);
        }
        return m[0] + m[3];
    };

    cplx den = ring(true, nullptr);
    cplx num(0.0);
    for (const auto& term : block.terms) num += term.coeff * ring(false, &term);
    return num / den;
}

double chain_second_eigenvalue(const VariationalParams& p) {
    const double sa = std::pow(std::sin(p.theta[0] / 2), 2);
    const double sb = std::pow(std::sin(p.theta[1] / 2), 2);
    return sa * sb;
}

} // namespace pxp
