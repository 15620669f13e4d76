#include "pxp/finite_state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace pxp {

namespace {

bool blockade_ok(uint64_t config, const std::vector<std::pair<int, int>>& edges) {
    for (auto [i, j] : edges)
        if (((config >> i) & 1) && ((config >> j) & 1)) return false;
    return true;
}

} // namespace

FiniteState::FiniteState(const Lattice& lattice, const VariationalParams& p) : lat_(lattice) {
    thetas_.resize(lat_.num_sites());
    phis_.resize(lat_.num_sites());
    for (int i = 0; i < lat_.num_sites(); ++i) {
        int s = lat_.sublattice_of(i);
        thetas_[i] = p.theta[s];
        phis_[i] = p.phi[s];
    }
    if (lat_.boundary() != Boundary::periodic)
        throw std::invalid_argument("FiniteState: periodic lattices only");
    if (static_cast<int>(lat_.edges().size()) > 24)
        throw std::invalid_argument("FiniteState: more than 24 bonds, brute force refused");
    for (int i = 0; i < lat_.num_sites(); ++i)
        site_tensors_.push_back(site_tensor(thetas_[i], phis_[i], lat_.dim()));
}

FiniteState::FiniteState(const Lattice& lattice, std::vector<double> thetas, std::vector<double> phis)
    : lat_(lattice), thetas_(std::move(thetas)), phis_(std::move(phis)) {
    if (lat_.boundary() != Boundary::periodic)
        throw std::invalid_argument("FiniteState: periodic lattices only");
    if (static_cast<int>(lat_.edges().size()) > 24)
        throw std::invalid_argument("FiniteState: more than 24 bonds, brute force refused");
    if (static_cast<int>(thetas_.size()) != lat_.num_sites() || thetas_.size() != phis_.size())
        throw std::invalid_argument("FiniteState: one angle pair per site required");
    for (int i = 0; i < lat_.num_sites(); ++i)
        site_tensors_.push_back(site_tensor(thetas_[i], phis_[i], lat_.dim()));
}

cplx FiniteState::amplitude(uint64_t config) const {
    const int dim = lat_.dim();
    const int n = lat_.num_sites();
    // directed bond id: site * dim + axis, from site to its +axis neighbour
    auto bond_target = [&](int site, int axis) {
        Coord c = lat_.site_coord(site);
        c[axis] = (c[axis] + 1) % lat_.extent(axis);
        return lat_.site_index(c);
    };
    auto bond_source = [&](int site, int axis) {
        Coord c = lat_.site_coord(site);
        c[axis] = (c[axis] - 1 + lat_.extent(axis)) % lat_.extent(axis);
        return lat_.site_index(c);
    };

    std::vector<int> frontier; // open bond ids
    std::vector<cplx> table{cplx(1.0)};
    for (int i = 0; i < n; ++i) {
        // legs of site i: in (source*dim + axis), out (i*dim + axis)
        struct Leg {
            int bond;
            bool is_in;
            int axis;
            int fpos; // position in frontier, -1 if newly opened
        };
        std::vector<Leg> legs;
        for (int k = 0; k < dim; ++k) {
            int bin = bond_source(i, k) * dim + k;
            int bout = i * dim + k;
            auto fpos = [&](int b) {
                auto it = std::find(frontier.begin(), frontier.end(), b);
                return it == frontier.end() ? -1 : static_cast<int>(it - frontier.begin());
            };
            legs.push_back({bin, true, k, fpos(bin)});
            legs.push_back({bout, false, k, fpos(bout)});
        }
        std::vector<int> closed, opened;
        for (auto& l : legs) (l.fpos >= 0 ? closed : opened).push_back(l.bond);

        std::vector<int> new_frontier;
        std::vector<int> keep_pos; // positions of surviving old-frontier bonds
        for (size_t fp = 0; fp < frontier.size(); ++fp)
            if (std::find(closed.begin(), closed.end(), frontier[fp]) == closed.end()) {
                keep_pos.push_back(static_cast<int>(fp));
                new_frontier.push_back(frontier[fp]);
            }
        const size_t nkeep = keep_pos.size();
        for (int b : opened) new_frontier.push_back(b);
        if (new_frontier.size() > 22) throw std::runtime_error("FiniteState: frontier too large");

        const SiteTensor& m = site_tensors_[i];
        const int s = static_cast<int>((config >> i) & 1);
        std::vector<cplx> next(static_cast<size_t>(1) << new_frontier.size(), cplx(0));
        const size_t nclosed = closed.size();
        for (size_t a = 0; a < next.size(); ++a) {
            cplx acc(0);
            for (size_t cval = 0; cval < (static_cast<size_t>(1) << nclosed); ++cval) {
                // reconstruct the old frontier index
                size_t old_idx = 0;
                for (size_t kpos = 0; kpos < nkeep; ++kpos)
                    if ((a >> kpos) & 1) old_idx |= static_cast<size_t>(1) << keep_pos[kpos];
                for (size_t cb = 0; cb < nclosed; ++cb)
                    if ((cval >> cb) & 1) {
                        int fp = static_cast<int>(std::find(frontier.begin(), frontier.end(), closed[cb]) -
                                                  frontier.begin());
                        old_idx |= static_cast<size_t>(1) << fp;
                    }
                // assemble the in/out strings of this site
                int in_str = 0, out_str = 0;
                bool fail = false;
                for (auto& l : legs) {
                    int v;
                    if (l.fpos >= 0) {
                        size_t cb = std::find(closed.begin(), closed.end(), l.bond) - closed.begin();
                        v = static_cast<int>((cval >> cb) & 1);
                    } else {
                        size_t op = nkeep + (std::find(opened.begin(), opened.end(), l.bond) - opened.begin());
                        v = static_cast<int>((a >> op) & 1);
                    }
                    (void)fail;
                    if (l.is_in)
                        in_str |= v << l.axis;
                    else
                        out_str |= v << l.axis;
                }
                cplx mv = m.at(s, in_str, out_str);
                if (mv == cplx(0)) continue;
                acc += mv * table[old_idx];
            }
            next[a] = acc;
        }
        table.swap(next);
        frontier.swap(new_frontier);
    }
    if (!frontier.empty()) throw std::logic_error("FiniteState: bonds left open");
    return table[0];
}

std::vector<cplx> FiniteState::state_vector() const {
    const int n = lat_.num_sites();
    if (n > 20) throw std::invalid_argument("FiniteState: state vector limited to 20 sites");
    std::vector<cplx> v(static_cast<size_t>(1) << n, cplx(0));
    for (uint64_t c = 0; c < v.size(); ++c) {
        if (!blockade_ok(c, lat_.edges())) continue; // tested to vanish identically
        v[c] = amplitude(c);
    }
    return v;
}

std::vector<cplx> FiniteState::state_vector_normalized() const {
    std::vector<cplx> v = state_vector();
    double n2 = 0;
    for (auto& x : v) n2 += std::norm(x);
    if (n2 <= 0) throw std::runtime_error("FiniteState: zero norm");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& x : v) x *= inv;
    return v;
}

std::vector<cplx> derivative_vector(const FiniteState& st, int site) {
    FiniteState d = st;
    d.site_tensors_[site] = site_tensor_deriv(d.thetas_[site], d.phis_[site], d.lat_.dim());
    return d.state_vector();
}

std::vector<cplx> projected_product_state(const Lattice& lattice, const std::vector<double>& vartheta,
                                          const std::vector<double>& varphi) {
    const int n = lattice.num_sites();
    if (n > 20) throw std::invalid_argument("projected_product_state: limited to 20 sites");
    std::vector<cplx> v(static_cast<size_t>(1) << n, cplx(0));
    double norm2 = 0;
    for (uint64_t c = 0; c < v.size(); ++c) {
        if (!blockade_ok(c, lattice.edges())) continue;
        cplx amp(1.0);
        for (int i = 0; i < n; ++i) {
            if ((c >> i) & 1)
                amp *= -cplx(0, 1) * std::exp(cplx(0, varphi[i])) * std::sin(vartheta[i] / 2);
            else
                amp *= std::cos(vartheta[i] / 2);
        }
        v[c] = amp;
        norm2 += std::norm(amp);
    }
    if (norm2 <= 0) throw std::runtime_error("projected_product_state: zero norm");
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

cplx overlap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("overlap: size mismatch");
    cplx s(0);
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

std::vector<uint64_t> blockade_configs(const Lattice& lattice) {
    const int n = lattice.num_sites();
    if (n > 20) throw std::invalid_argument("blockade_configs: limited to 20 sites");
    std::vector<uint64_t> out;
    for (uint64_t c = 0; c < (static_cast<uint64_t>(1) << n); ++c)
        if (blockade_ok(c, lattice.edges())) out.push_back(c);
    return out;
}

namespace {

std::vector<cplx> amplitudes_1d(const Lattice& lat, const VariationalParams& p,
                                const std::vector<uint64_t>& configs) {
    const int n = lat.num_sites();
    std::vector<SiteTensor> m(2);
    m[0] = site_tensor(p.theta[0], p.phi[0], 1);
    m[1] = site_tensor(p.theta[1], p.phi[1], 1);
    std::vector<cplx> out;
    out.reserve(configs.size());
    for (uint64_t c : configs) {
        std::array<cplx, 4> acc{cplx(1), cplx(0), cplx(0), cplx(1)};
        for (int i = 0; i < n; ++i) {
            const SiteTensor& t = m[i % 2];
            const int s = static_cast<int>((c >> i) & 1);
            std::array<cplx, 4> site{t.at(s, 0, 0), t.at(s, 0, 1), t.at(s, 1, 0), t.at(s, 1, 1)};
            acc = {acc[0] * site[0] + acc[1] * site[2], acc[0] * site[1] + acc[1] * site[3],
                   acc[2] * site[0] + acc[3] * site[2], acc[2] * site[1] + acc[3] * site[3]};
        }
        out.push_back(acc[0] + acc[3]);
    }
    return out;
}

std::vector<cplx> amplitudes_2d(const Lattice& lat, const VariationalParams& p,
                                const std::vector<uint64_t>& configs) {
    const int lx = lat.extent(0), ly = lat.extent(1);
    const int nb = 1 << ly;
    // column transfer matrices per parity and per column spin configuration
    std::vector<std::vector<cplx>> colmat(2 * nb, std::vector<cplx>(static_cast<size_t>(nb) * nb, cplx(0)));
    for (int par = 0; par < 2; ++par) {
        SiteTensor ms[2] = {site_tensor(p.theta[par % 2], p.phi[par % 2], 2),
                            site_tensor(p.theta[(par + 1) % 2], p.phi[(par + 1) % 2], 2)};
        for (int cfg = 0; cfg < nb; ++cfg)
            for (int xin = 0; xin < nb; ++xin)
                for (int xout = 0; xout < nb; ++xout) {
                    // trace over the y ring
                    std::array<cplx, 4> acc{cplx(1), cplx(0), cplx(0), cplx(1)};
                    for (int y = 0; y < ly; ++y) {
                        const SiteTensor& t = ms[y % 2];
                        const int s = (cfg >> y) & 1;
                        const int bx_in = (xin >> y) & 1, bx_out = (xout >> y) & 1;
                        std::array<cplx, 4> site;
                        for (int yin = 0; yin < 2; ++yin)
                            for (int yout = 0; yout < 2; ++yout)
                                site[2 * yin + yout] = t.at(s, bx_in | (yin << 1), bx_out | (yout << 1));
                        acc = {acc[0] * site[0] + acc[1] * site[2], acc[0] * site[1] + acc[1] * site[3],
                               acc[2] * site[0] + acc[3] * site[2], acc[2] * site[1] + acc[3] * site[3]};
                    }
                    colmat[par * nb + cfg][static_cast<size_t>(xin) * nb + xout] = acc[0] + acc[3];
                }
    }
    std::vector<cplx> out;
    out.reserve(configs.size());
    std::vector<cplx> prod, next(static_cast<size_t>(nb) * nb);
    for (uint64_t c : configs) {
        for (int x = 0; x < lx; ++x) {
            int cfg = 0;
            for (int y = 0; y < ly; ++y) cfg |= static_cast<int>((c >> (x + static_cast<uint64_t>(lx) * y)) & 1) << y;
            const auto& m = colmat[(x % 2) * nb + cfg];
            if (x == 0) {
                prod = m;
                continue;
            }
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) {
                    cplx s(0);
                    for (int k = 0; k < nb; ++k) s += prod[static_cast<size_t>(i) * nb + k] * m[static_cast<size_t>(k) * nb + j];
                    next[static_cast<size_t>(i) * nb + j] = s;
                }
            prod.swap(next);
        }
        cplx tr(0);
        for (int i = 0; i < nb; ++i) tr += prod[static_cast<size_t>(i) * nb + i];
        out.push_back(tr);
    }
    return out;
}

} // namespace

std::vector<cplx> ansatz_amplitudes(const Lattice& lattice, const VariationalParams& p,
                                    const std::vector<uint64_t>& configs) {
    if (lattice.boundary() != Boundary::periodic)
        throw std::invalid_argument("ansatz_amplitudes: periodic lattices only");
    if (lattice.dim() == 1) return amplitudes_1d(lattice, p, configs);
    if (lattice.dim() == 2) return amplitudes_2d(lattice, p, configs);
    FiniteState st(lattice, p);
    std::vector<cplx> out;
    out.reserve(configs.size());
    for (uint64_t c : configs) out.push_back(st.amplitude(c));
    return out;
}

namespace {

// minimal Nelder-Mead on std::function
std::vector<double> nm_minimize(std::vector<double> start, double step,
                                const std::function<double(const std::vector<double>&)>& f, int max_iter,
                                double tol, double* best_val) {
    const size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fv(n + 1);
    for (size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    for (size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);
    for (int it = 0; it < max_iter; ++it) {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        if (fv[idx[n]] - fv[idx[0]] < tol) break;
        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t d = 0; d < n; ++d) centroid[d] += simplex[idx[i]][d] / n;
        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (simplex[idx[n]][d] - centroid[d]);
            return p;
        };
        auto refl = blend(-1.0);
        double fr = f(refl);
        if (fr < fv[idx[0]]) {
            auto exp_p = blend(-2.0);
            double fe = f(exp_p);
            if (fe < fr) {
                simplex[idx[n]] = exp_p;
                fv[idx[n]] = fe;
            } else {
                simplex[idx[n]] = refl;
                fv[idx[n]] = fr;
            }
        } else if (fr < fv[idx[n - 1]]) {
            simplex[idx[n]] = refl;
            fv[idx[n]] = fr;
        } else {
            auto con = blend(0.5);
            double fc = f(con);
            if (fc < fv[idx[n]]) {
                simplex[idx[n]] = con;
                fv[idx[n]] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t d = 0; d < n; ++d)
                        simplex[idx[i]][d] = 0.5 * (simplex[idx[i]][d] + simplex[idx[0]][d]);
                    fv[idx[i]] = f(simplex[idx[i]]);
                }
            }
        }
    }
    size_t best = 0;
    for (size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    if (best_val) *best_val = fv[best];
    return simplex[best];
}

} // namespace

OverlapOpt maximize_manifold_overlap(const Lattice& lattice, const std::vector<cplx>& target, int restarts,
                                     uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    OverlapOpt result;
    result.restarts = restarts;
    // restrict to the blockade-satisfying sector; both states vanish outside it
    std::vector<uint64_t> configs = blockade_configs(lattice);
    std::vector<cplx> tgt;
    tgt.reserve(configs.size());
    for (uint64_t c : configs) tgt.push_back(target[c]);
    auto objective = [&](const std::vector<double>& x) {
        VariationalParams p(x[0], x[1], x[2], x[3]);
        std::vector<cplx> amps = ansatz_amplitudes(lattice, p, configs);
        double n2 = 0;
        cplx ov(0);
        for (size_t i = 0; i < amps.size(); ++i) {
            n2 += std::norm(amps[i]);
            ov += std::conj(tgt[i]) * amps[i];
        }
        if (n2 <= 0) return 0.0;
        return -std::abs(ov) / std::sqrt(n2);
    };
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> start = {ang(rng), ang(rng), ang(rng), ang(rng)};
        double val = 0;
        auto best = nm_minimize(start, 0.4, objective, 2500, 1e-14, &val);
        // polish
        best = nm_minimize(best, 0.02, objective, 2500, 1e-15, &val);
        if (-val > result.best) {
            result.best = -val;
            result.argmax = VariationalParams(best[0], best[1], best[2], best[3]);
            result.converged = true;
        }
        if (result.best > 1.0 - 1e-10) break; // cannot do better
    }
    return result;
}

std::vector<double> nelder_mead(const std::vector<double>& start, double step,
                                double (*f)(const std::vector<double>&, void*), void* ctx, int max_iter,
                                double tol) {
    return nm_minimize(start, step, [&](const std::vector<double>& x) { return f(x, ctx); }, max_iter, tol,
                       nullptr);
}

} // namespace pxp
