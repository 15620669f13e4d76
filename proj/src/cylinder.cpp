#include "pxp/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pxp {

namespace {

RowTensor plain_row(double theta) {
    ReducedTensor t = reduced_t(theta, 2);
    RowTensor r(2, 2, 2, 2);
    for (int ix = 0; ix < 2; ++ix)
        for (int iy = 0; iy < 2; ++iy)
            for (int ox = 0; ox < 2; ++ox)
                for (int oy = 0; oy < 2; ++oy)
                    r.at(ix, iy, ox, oy) = t.at(ix | (iy << 1), ox | (oy << 1));
    return r;
}

RowTensor factor_row(const SiteFactor& f, const BlockSiteMeta& meta) {
    auto has = [](const std::vector<int>& v, int a) { return std::find(v.begin(), v.end(), a) != v.end(); };
    const bool ix2 = has(meta.ext_in_axes, 0), iy2 = has(meta.ext_in_axes, 1);
    const bool ox2 = has(meta.ext_out_axes, 0), oy2 = has(meta.ext_out_axes, 1);
    RowTensor r(ix2 ? 2 : 1, iy2 ? 2 : 1, ox2 ? 2 : 1, oy2 ? 2 : 1);
    for (int ix = 0; ix < r.dix; ++ix)
        for (int iy = 0; iy < r.diy; ++iy)
            for (int ox = 0; ox < r.dox; ++ox)
                for (int oy = 0; oy < r.doy; ++oy) {
                    int ib = 0, ob = 0, bit = 0;
                    for (int axis : meta.ext_in_axes) {
                        ib |= (axis == 0 ? ix : iy) << bit;
                        ++bit;
                    }
                    bit = 0;
                    for (int axis : meta.ext_out_axes) {
                        ob |= (axis == 0 ? ox : oy) << bit;
                        ++bit;
                    }
                    r.at(ix, iy, ox, oy) = f.at(ib, ob);
                }
    return r;
}

void check_bonds(const ColumnSpec& col) {
    for (int y = 0; y < col.L; ++y)
        if (col.rows[y].doy != col.rows[(y + 1) % col.L].diy)
            throw std::logic_error("cylinder column: mismatched ring bond dimensions");
}

std::vector<cplx> apply_impl(const ColumnSpec& col, const std::vector<cplx>& vec, bool transposed) {
    const int L = col.L;
    check_bonds(col);
    size_t in_size = 1, out_size = 1;
    for (const auto& r : col.rows) {
        in_size *= transposed ? r.dox : r.dix;
        out_size *= transposed ? r.dix : r.dox;
    }
    if (vec.size() != in_size) throw std::invalid_argument("apply_column: vector size mismatch");

    const int dcut = col.rows[L - 1].doy;
    std::vector<cplx> out(out_size, cplx(0));
    std::vector<cplx> w, w2;
    for (int b0 = 0; b0 < dcut; ++b0) {
        // w indexed by (acc * rest_size + rest) * db + b
        size_t acc_size = 1, rest_size = in_size;
        int db = dcut;
        w.assign(acc_size * rest_size * db, cplx(0));
        for (size_t i = 0; i < in_size; ++i) w[i * db + b0] = vec[i];
        for (int y = 0; y < L; ++y) {
            const RowTensor& t = col.rows[y];
            const int di = transposed ? t.dox : t.dix;
            const int dout = transposed ? t.dix : t.dox;
            const int dbn = t.doy;
            const size_t rest2 = rest_size / di;
            const size_t acc2 = acc_size * dout;
            w2.assign(acc2 * rest2 * dbn, cplx(0));
            for (size_t acc = 0; acc < acc_size; ++acc)
                for (int o = 0; o < dout; ++o)
                    for (size_t rest = 0; rest < rest2; ++rest)
                        for (int bn = 0; bn < dbn; ++bn) {
                            cplx s(0);
                            for (int i = 0; i < di; ++i)
                                for (int b = 0; b < db; ++b) {
                                    const cplx tv = transposed ? t.at(o, b, i, bn) : t.at(i, b, o, bn);
                                    if (tv == cplx(0)) continue;
                                    s += tv * w[(acc * rest_size + (rest * di + i)) * db + b];
                                }
                            w2[((acc + acc_size * o) * rest2 + rest) * dbn + bn] = s;
                        }
            w.swap(w2);
            acc_size = acc2;
            rest_size = rest2;
            db = dbn;
        }
        for (size_t a = 0; a < out_size; ++a) out[a] += w[a * db + b0];
    }
    return out;
}

} // namespace

size_t ColumnSpec::in_size() const {
    size_t s = 1;
    for (const auto& r : rows) s *= r.dix;
    return s;
}

size_t ColumnSpec::out_size() const {
    size_t s = 1;
    for (const auto& r : rows) s *= r.dox;
    return s;
}

std::vector<cplx> apply_column(const ColumnSpec& col, const std::vector<cplx>& vec) {
    return apply_impl(col, vec, false);
}

std::vector<cplx> apply_column_transposed(const ColumnSpec& col, const std::vector<cplx>& vec) {
    return apply_impl(col, vec, true);
}

std::vector<cplx> apply_column_serial(const ColumnSpec& col, const std::vector<cplx>& vec) {
    return apply_impl(col, vec, false);
}

namespace {

ColumnSpec plain_column(const VariationalParams& p, int L, int col_parity) {
    ColumnSpec c;
    c.L = L;
    for (int y = 0; y < L; ++y) c.rows.push_back(plain_row(p.theta[(col_parity + y) & 1]));
    return c;
}

double vec_norm(const std::vector<cplx>& v) {
    double s = 0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

void normalize(std::vector<cplx>& v) {
    double n = vec_norm(v);
    if (n == 0) throw std::runtime_error("cylinder power iteration: zero vector");
    for (auto& x : v) x /= n;
}

double diff_norm(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

// Fixed point of the pair map, with the eigenvalue of the two-column unit.
double power_iterate(std::vector<cplx>& v, const ColumnSpec& first, const ColumnSpec& second, bool transposed) {
    const int max_iter = 100000;
    const double tol = 1e-13;
    double lambda = 0;
    normalize(v);
    for (int it = 0; it < max_iter; ++it) {
        std::vector<cplx> w = transposed ? apply_column_transposed(first, v) : apply_column(first, v);
        w = transposed ? apply_column_transposed(second, w) : apply_column(second, w);
        double n = vec_norm(w);
        if (n == 0) throw std::runtime_error("cylinder power iteration: collapsed to zero");
        for (auto& x : w) x /= n;
        const double d = diff_norm(w, v);
        v.swap(w);
        lambda = n;
        if (d < tol) return lambda;
    }
    throw std::runtime_error("cylinder power iteration: no convergence (degenerate dominant eigenvalue?)");
}

} // namespace

CylinderEnv cylinder_env(const VariationalParams& p, int L, const CylinderEnv* warm) {
    if (L < 4 || L > 14 || L % 2 != 0)
        throw std::invalid_argument("cylinder_env: circumference must be even and within [4, 14]");
    CylinderEnv env;
    env.L = L;
    env.params = p;
    ColumnSpec c0 = plain_column(p, L, 0);
    ColumnSpec c1 = plain_column(p, L, 1);
    const size_t n = static_cast<size_t>(1) << L;

    for (int par = 0; par < 2; ++par) {
        // Left environment for a cut left of a column with parity `par`:
        // absorb columns of parity par, then par+1.
        std::vector<cplx> v = (warm && warm->L == L && !warm->left[par].empty()) ? warm->left[par]
                                                                                 : std::vector<cplx>(n, cplx(1));
        double lam = power_iterate(v, par == 0 ? c0 : c1, par == 0 ? c1 : c0, false);
        env.left[par] = std::move(v);
        env.lambda_pair = lam;

        // Right environment for a cut right of column x: absorb column x+1
        // last; parity argument refers to parity(x+1).
        std::vector<cplx> r = (warm && warm->L == L && !warm->right[par].empty()) ? warm->right[par]
                                                                                  : std::vector<cplx>(n, cplx(1));
        power_iterate(r, par == 0 ? c1 : c0, par == 0 ? c0 : c1, true);
        env.right[par] = std::move(r);
    }
    return env;
}

namespace {

cplx dot_plain(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

cplx cylinder_expect(const ReducedBlock& block, const VariationalParams& p, const CylinderEnv& env) {
    if (block.dim != 2) throw std::invalid_argument("cylinder_expect: block must be two-dimensional");
    const int L = env.L;

    int x0 = 0, x1 = -1;
    if (!block.sites.empty()) {
        x0 = x1 = block.sites.front().pos[0];
        for (const auto& s : block.sites) {
            x0 = std::min(x0, s.pos[0]);
            x1 = std::max(x1, s.pos[0]);
        }
        int ymin = 0, ymax = 0;
        for (const auto& s : block.sites) {
            ymin = std::min(ymin, s.pos[1]);
            ymax = std::max(ymax, s.pos[1]);
        }
        if (ymax - ymin >= L - 1) throw std::invalid_argument("cylinder_expect: block does not fit on the ring");
    }
    const int p0 = ((x0 % 2) + 2) % 2;
    const int p_end = (((x1 + 1) % 2) + 2) % 2;
    const auto& lenv = env.left[p0];
    const auto& renv = env.right[p_end];

    auto run_span = [&](const BlockTerm* term) {
        std::vector<cplx> v = lenv;
        for (int x = x0; x <= x1; ++x) {
            ColumnSpec col = plain_column(p, L, ((x % 2) + 2) % 2);
            if (term) {
                for (size_t si = 0; si < block.sites.size(); ++si) {
                    const auto& meta = block.sites[si];
                    if (meta.pos[0] != x) continue;
                    int row = ((meta.pos[1] % L) + L) % L;
                    col.rows[row] = factor_row(term->factors[si], meta);
                }
            }
            v = apply_column(col, v);
        }
        return dot_plain(v, renv);
    };

    cplx den = run_span(nullptr);
    if (std::abs(den) < 1e-300) throw std::runtime_error("cylinder_expect: vanishing environment overlap");
    cplx num(0);
    for (const auto& term : block.terms) num += term.coeff * run_span(&term);
    return num / den;
}

cplx cylinder_expect(const BlockSpec& spec, const VariationalParams& p, int L) {
    CylinderEnv env = cylinder_env(p, L);
    return cylinder_expect(build_block(spec, p), p, env);
}

} // namespace pxp
