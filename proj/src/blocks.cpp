#include "pxp/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pxp {

namespace {

constexpr double kStructTol = 1e-13;

// Generic angles used for the structure pass. Irrational-ish so that no
// tensor entry vanishes accidentally.
const VariationalParams kGenericParams(0.7366429, 2.0191233, 0.4133521, 1.1170384);

int coord_sum(const Coord& c) { return c[0] + c[1] + c[2]; }

Coord shifted(const Coord& c, int axis, int delta) {
    Coord r = c;
    r[axis] += delta;
    return r;
}

int pair_digit(int packed, int k) { return (packed >> (2 * k)) & 3; }

struct SiteWork {
    Coord pos;
    bool ket_deriv = false;
    bool bra_deriv = false;
    std::vector<int> internal_in;   // axes fed by another block site
    std::vector<int> internal_out;  // axes feeding another block site
    std::vector<int> ext_in;        // remaining axes, ascending
    std::vector<int> ext_out;
};

SiteTensor layer_tensor(bool deriv, double theta, double phi, int dim) {
    return deriv ? site_tensor_deriv(theta, phi, dim) : site_tensor(theta, phi, dim);
}

} // namespace

int ReducedBlock::site_at(const Coord& c) const {
    for (size_t i = 0; i < sites.size(); ++i)
        if (sites[i].pos == c) return static_cast<int>(i);
    return -1;
}

int ReducedBlock::in_leg_id(int site, int axis) const {
    for (size_t i = 0; i < in_legs.size(); ++i)
        if (in_legs[i].site == site && in_legs[i].axis == axis) return static_cast<int>(i);
    return -1;
}

int ReducedBlock::out_leg_id(int site, int axis) const {
    for (size_t i = 0; i < out_legs.size(); ++i)
        if (out_legs[i].site == site && out_legs[i].axis == axis) return static_cast<int>(i);
    return -1;
}

cplx ReducedBlock::value(uint32_t pmask, uint32_t omask) const {
    // per-site local masks
    const int ns = static_cast<int>(sites.size());
    std::vector<int> in_bits(ns, 0), out_forced(ns, 0);
    for (size_t l = 0; l < in_legs.size(); ++l) {
        if (!(pmask & (1u << l))) continue;
        const auto& ref = in_legs[l];
        const auto& ax = sites[ref.site].ext_in_axes;
        int b = static_cast<int>(std::find(ax.begin(), ax.end(), ref.axis) - ax.begin());
        in_bits[ref.site] |= 1 << b;
    }
    for (size_t l = 0; l < out_legs.size(); ++l) {
        if (!(omask & (1u << l))) continue;
        const auto& ref = out_legs[l];
        const auto& ax = sites[ref.site].ext_out_axes;
        int b = static_cast<int>(std::find(ax.begin(), ax.end(), ref.axis) - ax.begin());
        out_forced[ref.site] |= 1 << b;
    }

    cplx total(0.0);
    for (const auto& term : terms) {
        cplx prod = term.coeff;
        for (int s = 0; s < ns && prod != cplx(0); ++s) {
            const SiteFactor& f = term.factors[s];
            cplx sv(0.0);
            for (int o = 0; o < (1 << f.nout); ++o) {
                if (o & out_forced[s]) continue; // leg feeding a q must emit 0
                sv += f.at(in_bits[s], o);
            }
            prod *= sv;
        }
        total += prod;
    }
    return total;
}

namespace {

struct Builder {
    const BlockSpec& spec;
    int dim;
    VariationalParams params;

    std::vector<SiteWork> sites;
    std::vector<std::vector<Mat2>> term_ops; // [term][site]
    std::vector<cplx> term_coeffs;

    // per site, double tensors at structure (generic) and actual angles, per term
    std::vector<std::vector<DoubleTensor>> dbl_gen, dbl_act;

    explicit Builder(const BlockSpec& sp, const VariationalParams& p) : spec(sp), dim(sp.dim), params(p) {
        for (const auto& s : spec.sites) sites.push_back({s.pos, s.ket_deriv, s.bra_deriv, {}, {}, {}, {}});
        for (const auto& t : spec.terms) {
            if (t.ops.size() != spec.sites.size())
                throw std::invalid_argument("block spec: term arity mismatch");
            term_ops.push_back(t.ops);
            term_coeffs.push_back(t.coeff);
        }
    }

    int find_site(const Coord& c) const {
        for (size_t i = 0; i < sites.size(); ++i)
            if (sites[i].pos == c) return static_cast<int>(i);
        return -1;
    }

    int parity_of(const Coord& c) const { return ((coord_sum(c) % 2) + 2) % 2; }

    DoubleTensor make_dbl(int site, int term, const VariationalParams& p) const {
        const auto& s = sites[site];
        int par = parity_of(s.pos);
        SiteTensor ket = layer_tensor(s.ket_deriv, p.theta[par], p.phi[par], dim);
        SiteTensor bra = layer_tensor(s.bra_deriv, p.theta[par], p.phi[par], dim);
        return sandwich(term_ops[term][site], ket, bra);
    }

    void rebuild_tensors() {
        const size_t nt = term_coeffs.size();
        dbl_gen.assign(sites.size(), {});
        dbl_act.assign(sites.size(), {});
        for (size_t s = 0; s < sites.size(); ++s)
            for (size_t t = 0; t < nt; ++t) {
                dbl_gen[s].push_back(make_dbl(static_cast<int>(s), static_cast<int>(t), kGenericParams));
                dbl_act[s].push_back(make_dbl(static_cast<int>(s), static_cast<int>(t), params));
            }
    }

    // An out leg needs fusing when some structurally nonzero entry carries an
    // off-diagonal pair on it.
    bool offdiag_out(int site, int axis) const {
        for (const auto& B : dbl_gen[site]) {
            const int n4 = 1 << (2 * dim);
            for (int i = 0; i < n4; ++i)
                for (int o = 0; o < n4; ++o) {
                    if (std::abs(B.at(i, o)) <= kStructTol) continue;
                    int d = pair_digit(o, axis);
                    if (d == 1 || d == 2) return true;
                }
        }
        return false;
    }

    void fuse() {
        rebuild_tensors();
        bool changed = true;
        while (changed) {
            changed = false;
            const size_t ns = sites.size();
            for (size_t s = 0; s < ns; ++s)
                for (int k = 0; k < dim; ++k) {
                    Coord v = shifted(sites[s].pos, k, +1);
                    if (find_site(v) >= 0) continue;
                    if (!offdiag_out(static_cast<int>(s), k)) continue;
                    sites.push_back({v, false, false, {}, {}, {}, {}});
                    for (auto& ops : term_ops) ops.push_back(op_identity());
                    changed = true;
                }
            if (changed) rebuild_tensors();
        }
    }

    void classify_legs() {
        for (size_t s = 0; s < sites.size(); ++s) {
            auto& w = sites[s];
            w.internal_in.clear();
            w.internal_out.clear();
            w.ext_in.clear();
            w.ext_out.clear();
            for (int k = 0; k < dim; ++k) {
                (find_site(shifted(w.pos, k, -1)) >= 0 ? w.internal_in : w.ext_in).push_back(k);
                (find_site(shifted(w.pos, k, +1)) >= 0 ? w.internal_out : w.ext_out).push_back(k);
            }
        }
    }

    std::vector<int> topo_order() const {
        std::vector<int> order(sites.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            int sa = coord_sum(sites[a].pos), sb = coord_sum(sites[b].pos);
            if (sa != sb) return sa < sb;
            return sites[a].pos < sites[b].pos;
        });
        return order;
    }

    // Resolution of internal legs into product terms. Enumerates assignments of
    // pair digits on internal edges, pruning branches with no structural weight.
    struct Resolved {
        cplx coeff;
        std::vector<SiteFactor> factors; // by site index
    };
    std::vector<Resolved> resolved;

    // digit assignment per (site, axis) for the site's OUT legs
    std::map<std::pair<int, int>, int> edge_digit;

    bool slice_nonzero(const DoubleTensor& B, const SiteWork& w, const std::vector<int>& out_digits) const {
        // any entry consistent with assigned internal in/out digits?
        const int n4 = 1 << (2 * dim);
        for (int i = 0; i < n4; ++i) {
            bool ok = true;
            for (int k : w.internal_in) {
                int src = find_site(shifted(w.pos, k, -1));
                if (pair_digit(i, k) != edge_digit.at({src, k})) { ok = false; break; }
            }
            if (!ok) continue;
            for (int o = 0; o < n4; ++o) {
                bool oko = true;
                for (size_t j = 0; j < w.internal_out.size(); ++j)
                    if (pair_digit(o, w.internal_out[j]) != out_digits[j]) { oko = false; break; }
                if (!oko) continue;
                if (std::abs(B.at(i, o)) > kStructTol) return true;
            }
        }
        return false;
    }

    SiteFactor extract_factor(const DoubleTensor& B, int site) const {
        const SiteWork& w = sites[site];
        SiteFactor f;
        f.nin = static_cast<int>(w.ext_in.size());
        f.nout = static_cast<int>(w.ext_out.size());
        f.a.assign(1u << (f.nin + f.nout), cplx(0));
        const int nin = 1 << f.nin, nout = 1 << f.nout;
        for (int ib = 0; ib < nin; ++ib)
            for (int ob = 0; ob < nout; ++ob) {
                int i4 = 0, o4 = 0;
                for (int k : w.internal_in) {
                    int src = find_site(shifted(w.pos, k, -1));
                    i4 |= edge_digit.at({src, k}) << (2 * k);
                }
                for (size_t j = 0; j < w.ext_in.size(); ++j)
                    if ((ib >> j) & 1) i4 |= 3 << (2 * w.ext_in[j]);
                for (size_t j = 0; j < w.internal_out.size(); ++j)
                    o4 |= edge_digit.at({site, w.internal_out[j]}) << (2 * w.internal_out[j]);
                for (size_t j = 0; j < w.ext_out.size(); ++j)
                    if ((ob >> j) & 1) o4 |= 3 << (2 * w.ext_out[j]);
                f.at(ib, ob) = B.at(i4, o4);
            }
        return f;
    }

    void resolve_term(int term, const std::vector<int>& order, size_t pos) {
        if (pos == order.size()) {
            Resolved r;
            r.coeff = term_coeffs[term];
            r.factors.resize(sites.size());
            for (size_t s = 0; s < sites.size(); ++s)
                r.factors[s] = extract_factor(dbl_act[s][term], static_cast<int>(s));
            resolved.push_back(std::move(r));
            return;
        }
        int s = order[pos];
        const SiteWork& w = sites[s];
        const int nout_int = static_cast<int>(w.internal_out.size());
        std::vector<int> digits(nout_int, 0);
        const int combos = 1 << (2 * nout_int);
        for (int c = 0; c < combos; ++c) {
            for (int j = 0; j < nout_int; ++j) digits[j] = (c >> (2 * j)) & 3;
            if (!slice_nonzero(dbl_gen[s][term], w, digits)) continue;
            for (int j = 0; j < nout_int; ++j) edge_digit[{s, w.internal_out[j]}] = digits[j];
            resolve_term(term, order, pos + 1);
        }
        for (int j = 0; j < nout_int; ++j) edge_digit.erase({s, w.internal_out[j]});
    }
};

} // namespace

ReducedBlock build_block(const BlockSpec& spec, const VariationalParams& p) {
    if (spec.dim < 1 || spec.dim > 3) throw std::invalid_argument("build_block: bad dimension");
    Builder b(spec, p);
    b.fuse();
    b.classify_legs();

    // External out legs must be pair-diagonal now; fusion guarantees it.
    for (size_t s = 0; s < b.sites.size(); ++s)
        for (int k : b.sites[s].ext_out)
            if (b.offdiag_out(static_cast<int>(s), k))
                throw std::logic_error("build_block: fusion left an off-diagonal external leg");

    auto order = b.topo_order();
    for (size_t t = 0; t < b.term_coeffs.size(); ++t) b.resolve_term(static_cast<int>(t), order, 0);

    ReducedBlock blk;
    blk.dim = spec.dim;
    blk.id = spec.id;
    for (const auto& w : b.sites)
        blk.sites.push_back({w.pos, ((coord_sum(w.pos) % 2) + 2) % 2, w.ext_in, w.ext_out});
    for (auto& r : b.resolved) blk.terms.push_back({r.coeff, std::move(r.factors)});

    for (size_t s = 0; s < blk.sites.size(); ++s) {
        for (int k : blk.sites[s].ext_in_axes) blk.in_legs.push_back({static_cast<int>(s), k});
        for (int k : blk.sites[s].ext_out_axes) blk.out_legs.push_back({static_cast<int>(s), k});
    }
    if (blk.in_legs.size() > 31 || blk.out_legs.size() > 31)
        throw std::logic_error("build_block: too many external legs");

    // Structural leg flags from a generic-angle build of the same geometry.
    Builder g(spec, kGenericParams);
    g.fuse();
    g.classify_legs();
    auto gorder = g.topo_order();
    for (size_t t = 0; t < g.term_coeffs.size(); ++t) g.resolve_term(static_cast<int>(t), gorder, 0);

    blk.in_accepts_one.assign(blk.in_legs.size(), 0);
    blk.out_emits_zero.assign(blk.out_legs.size(), 0);
    for (size_t l = 0; l < blk.in_legs.size(); ++l) {
        const auto& ref = blk.in_legs[l];
        const auto& ax = blk.sites[ref.site].ext_in_axes;
        int bit = static_cast<int>(std::find(ax.begin(), ax.end(), ref.axis) - ax.begin());
        for (const auto& r : g.resolved) {
            const SiteFactor& f = r.factors[ref.site];
            for (int i = 0; i < (1 << f.nin); ++i) {
                if (!((i >> bit) & 1)) continue;
                for (int o = 0; o < (1 << f.nout); ++o)
                    if (std::abs(f.at(i, o)) > kStructTol) { blk.in_accepts_one[l] = 1; break; }
                if (blk.in_accepts_one[l]) break;
            }
            if (blk.in_accepts_one[l]) break;
        }
    }
    for (size_t l = 0; l < blk.out_legs.size(); ++l) {
        const auto& ref = blk.out_legs[l];
        const auto& ax = blk.sites[ref.site].ext_out_axes;
        int bit = static_cast<int>(std::find(ax.begin(), ax.end(), ref.axis) - ax.begin());
        for (const auto& r : g.resolved) {
            const SiteFactor& f = r.factors[ref.site];
            for (int o = 0; o < (1 << f.nout); ++o) {
                if ((o >> bit) & 1) continue;
                for (int i = 0; i < (1 << f.nin); ++i)
                    if (std::abs(f.at(i, o)) > kStructTol) { blk.out_emits_zero[l] = 1; break; }
                if (blk.out_emits_zero[l]) break;
            }
            if (blk.out_emits_zero[l]) break;
        }
    }
    return blk;
}

// ---- factory ----------------------------------------------------------------

BlockSpec spec_identity(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "id";
    s.terms.push_back({cplx(1.0), {}});
    return s;
}

BlockSpec spec_n(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "n";
    s.sites.push_back({{0, 0, 0}, false, false});
    s.terms.push_back({cplx(1.0), {op_number()}});
    return s;
}

BlockSpec spec_sigma_x(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "sx";
    s.sites.push_back({{0, 0, 0}, false, false});
    s.terms.push_back({cplx(1.0), {op_sigma_x()}});
    return s;
}

BlockSpec spec_nn(int dim, const Coord& sep) {
    BlockSpec s;
    s.dim = dim;
    s.id = "nn_" + std::to_string(sep[0]) + "_" + std::to_string(sep[1]) + "_" + std::to_string(sep[2]);
    s.sites.push_back({{0, 0, 0}, false, false});
    s.sites.push_back({sep, false, false});
    s.terms.push_back({cplx(1.0), {op_number(), op_number()}});
    return s;
}

BlockSpec spec_gram(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "gram";
    s.sites.push_back({{0, 0, 0}, true, true});
    s.terms.push_back({cplx(1.0), {op_identity()}});
    return s;
}

BlockSpec spec_k_term(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "kterm";
    s.sites.push_back({{0, 0, 0}, false, true});
    s.terms.push_back({cplx(1.0), {op_sigma_x()}});
    return s;
}

BlockSpec spec_s_term(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "sterm";
    s.sites.push_back({{-1, 0, 0}, false, false}); // sigma_x on the upstream B site
    s.sites.push_back({{0, 0, 0}, false, true});   // derivative on the anchor
    s.terms.push_back({cplx(1.0), {op_sigma_x(), op_identity()}});
    return s;
}

BlockSpec spec_proj_ring(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "projring";
    OpTerm t;
    t.coeff = cplx(1.0);
    for (int k = 0; k < dim; ++k)
        for (int d : {-1, 1}) {
            Coord c{0, 0, 0};
            c[k] = d;
            s.sites.push_back({c, false, false});
            t.ops.push_back(op_projector());
        }
    s.terms.push_back(t);
    return s;
}

BlockSpec spec_sx_proj_sx(int dim) {
    BlockSpec s;
    s.dim = dim;
    s.id = "sxpsx";
    s.sites.push_back({{0, 0, 0}, false, false});
    s.sites.push_back({{1, 0, 0}, false, false});
    // sx_i P_ij sx_j = sx (x) sx - (sx n) (x) (n sx)
    s.terms.push_back({cplx(1.0), {op_sigma_x(), op_sigma_x()}});
    s.terms.push_back({cplx(-1.0), {mat_mul(op_sigma_x(), op_number()), mat_mul(op_number(), op_sigma_x())}});
    return s;
}

BlockSpec spec_sxsx_diag(int dim) {
    if (dim < 2) throw std::invalid_argument("spec_sxsx_diag: requires D >= 2");
    BlockSpec s;
    s.dim = dim;
    s.id = "sxsxdiag";
    s.sites.push_back({{0, 0, 0}, false, false});
    s.sites.push_back({{1, -1, 0}, false, false});
    s.terms.push_back({cplx(1.0), {op_sigma_x(), op_sigma_x()}});
    return s;
}

} // namespace pxp
