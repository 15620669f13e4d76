#include "pxp/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pxp {

namespace {

int coord_sum(const Coord& c) { return c[0] + c[1] + c[2]; }

using Key = std::tuple<int, int, uint32_t, uint32_t>;
using Accum = std::map<Key, long long>;

struct QSite {
    Coord pos;
    int parity;        // relative to anchor
    uint32_t pbits;    // block in-legs this q feeds
    bool forced;       // cannot take the 1-branch
};

struct Enumerator {
    const ReducedBlock& blk;
    int dim;
    int order;

    std::vector<Coord> block_sites;
    int sum_min = 0, sum_max = 0;

    explicit Enumerator(const ReducedBlock& b, int ord) : blk(b), dim(b.dim), order(ord) {
        for (const auto& s : blk.sites) block_sites.push_back(s.pos);
        if (!block_sites.empty()) {
            sum_min = sum_max = coord_sum(block_sites[0]);
            for (const auto& c : block_sites) {
                sum_min = std::min(sum_min, coord_sum(c));
                sum_max = std::max(sum_max, coord_sum(c));
            }
        }
    }

    int block_index(const Coord& c) const {
        for (size_t i = 0; i < block_sites.size(); ++i)
            if (block_sites[i] == c) return static_cast<int>(i);
        return -1;
    }

    // Candidate q position for the current layer, with its leg couplings.
    struct Candidate {
        Coord pos;
        int parity;
        uint32_t pbits;
        uint32_t obits;    // block out-legs feeding this q
        bool forced_by_block;
        bool allowed;
    };

    Candidate probe(const Coord& u) const {
        Candidate c{u, ((coord_sum(u) % 2) + 2) % 2, 0, 0, false, true};
        for (int k = 0; k < dim; ++k) {
            Coord v = u;
            v[k] += 1;
            int bi = block_index(v);
            if (bi >= 0) {
                int leg = blk.in_leg_id(bi, k);
                if (leg < 0) throw std::logic_error("enumerate: missing block in-leg");
                c.pbits |= 1u << leg;
                if (!blk.in_accepts_one[leg]) c.forced_by_block = true;
            }
            Coord w = u;
            w[k] -= 1;
            int wi = block_index(w);
            if (wi >= 0) {
                int leg = blk.out_leg_id(wi, k);
                if (leg < 0) throw std::logic_error("enumerate: missing block out-leg");
                if (!blk.out_emits_zero[leg]) c.allowed = false;
                c.obits |= 1u << leg;
            }
        }
        return c;
    }

    std::vector<Coord> layer_candidates(const std::vector<Coord>& support_layer, int ell) const {
        std::set<Coord> cands;
        auto consider = [&](const Coord& s) {
            for (int k = 0; k < dim; ++k) {
                Coord u = s;
                u[k] -= 1;
                if (block_index(u) < 0) cands.insert(u);
            }
        };
        for (const auto& s : support_layer) consider(s);
        for (const auto& c : block_sites)
            if (coord_sum(c) == ell + 1) consider(c);
        return {cands.begin(), cands.end()};
    }

    // Record the configuration currently on the stack.
    void accumulate(Accum& acc, const std::vector<QSite>& config, uint32_t omask, int na, int nb) const {
        std::vector<uint32_t> unforced;
        for (const auto& q : config)
            if (!q.forced) unforced.push_back(q.pbits);
        const int u = static_cast<int>(unforced.size());
        for (int m = 0; m < (1 << u); ++m) {
            uint32_t p = 0;
            int ones = 0;
            for (int i = 0; i < u; ++i)
                if ((m >> i) & 1) {
                    p |= unforced[i];
                    ++ones;
                }
            acc[{na, nb, p, omask}] += (ones % 2) ? -1 : 1;
        }
    }

    // Depth-first over layers; S_next is the set chosen at layer ell+1.
    void recurse_layer(Accum& acc, int ell, const std::vector<Coord>& s_next,
                       std::vector<QSite>& config, uint32_t omask, int na, int nb) const {
        const int used = static_cast<int>(config.size());
        if (used >= order) return;
        if (s_next.empty() && ell + 1 < sum_min) return;

        auto cands = layer_candidates(s_next, ell);
        if (cands.empty()) {
            if (ell >= sum_min) recurse_layer(acc, ell - 1, {}, config, omask, na, nb);
            return;
        }
        std::vector<Candidate> probed;
        for (const auto& u : cands) {
            Candidate c = probe(u);
            if (c.allowed) probed.push_back(c);
        }
        std::vector<Coord> chosen;
        choose_subset(acc, ell, probed, 0, chosen, config, omask, na, nb);
    }

    void choose_subset(Accum& acc, int ell, const std::vector<Candidate>& cands, size_t idx,
                       std::vector<Coord>& chosen, std::vector<QSite>& config, uint32_t omask,
                       int na, int nb) const {
        if (idx == cands.size()) {
            recurse_layer(acc, ell - 1, chosen, config, omask, na, nb);
            return;
        }
        // skip candidate idx
        choose_subset(acc, ell, cands, idx + 1, chosen, config, omask, na, nb);
        if (static_cast<int>(config.size()) >= order) return;
        // take candidate idx: a q with a downstream q in chosen-at-ell+1? No ---
        // downstream sits in the layer above, already fixed in config via s_next.
        const Candidate& c = cands[idx];
        bool forced = c.forced_by_block;
        if (!forced) {
            for (int k = 0; k < dim; ++k) {
                Coord v = c.pos;
                v[k] += 1;
                for (const auto& q : config)
                    if (q.pos == v) { forced = true; break; }
                if (forced) break;
            }
        }
        config.push_back({c.pos, c.parity, c.pbits, forced});
        chosen.push_back(c.pos);
        accumulate(acc, config, omask | c.obits, na + (c.parity == 0), nb + (c.parity == 1));
        choose_subset(acc, ell, cands, idx + 1, chosen, config, omask | c.obits,
                      na + (c.parity == 0), nb + (c.parity == 1));
        chosen.pop_back();
        config.pop_back();
    }

    CountingTable run(int num_threads) const {
        Accum acc;
        // empty configuration
        acc[{0, 0, 0u, 0u}] = 1;

        std::vector<QSite> config;
        const int top = block_sites.empty() ? -1 : sum_max - 1;
        if (!block_sites.empty() && order > 0) {
            // First layer expanded by hand so the branches can run in parallel.
            auto cands = layer_candidates({}, top);
            std::vector<Candidate> probed;
            for (const auto& u : cands) {
                Candidate c = probe(u);
                if (c.allowed) probed.push_back(c);
            }
            const int nc = static_cast<int>(probed.size());
            const int nsub = 1 << nc;
            std::vector<Accum> partials(nsub);
#ifdef _OPENMP
            int nt = num_threads > 0 ? num_threads : omp_get_max_threads();
#else
            int nt = 1;
            (void)num_threads;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(nt)
            for (int m = 1; m < nsub; ++m) {
                if (__builtin_popcount(static_cast<unsigned>(m)) > order) continue;
                std::vector<QSite> cfg;
                std::vector<Coord> chosen;
                uint32_t omask = 0;
                int na = 0, nb = 0;
                for (int i = 0; i < nc; ++i)
                    if ((m >> i) & 1) {
                        const Candidate& c = probed[i];
                        cfg.push_back({c.pos, c.parity, c.pbits, c.forced_by_block});
                        chosen.push_back(c.pos);
                        omask |= c.obits;
                        (c.parity == 0 ? na : nb) += 1;
                    }
                accumulate(partials[m], cfg, omask, na, nb);
                recurse_layer(partials[m], top - 1, chosen, cfg, omask, na, nb);
            }
            for (int m = 1; m < nsub; ++m)
                for (const auto& [k, v] : partials[m]) acc[k] += v;
            // the branch with an empty first layer
            recurse_layer(acc, top - 1, {}, config, 0, 0, 0);
        }

        CountingTable t;
        t.dim = dim;
        t.order = order;
        t.op_id = blk.id;
        t.leg_hash = block_leg_hash(blk);
        for (const auto& [k, v] : acc) {
            if (v == 0) continue;
            auto [na, nb, p, o] = k;
            t.entries.push_back({na, nb, p, o, v});
        }
        return t;
    }
};

} // namespace

long long CountingTable::fnm(int n_opp, int n_anchor) const {
    for (const auto& e : entries)
        if (e.n_anchor == n_anchor && e.n_opp == n_opp && e.pmask == 0 && e.omask == 0) return e.coef;
    return 0;
}

std::vector<long long> CountingTable::diagonal_sums() const {
    std::vector<long long> f(order + 1, 0);
    for (const auto& e : entries)
        if (e.pmask == 0 && e.omask == 0 && e.n_anchor + e.n_opp <= order) f[e.n_anchor + e.n_opp] += e.coef;
    return f;
}

uint64_t block_leg_hash(const ReducedBlock& block) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<uint64_t>(block.dim));
    mix(block.in_legs.size());
    mix(block.out_legs.size());
    for (size_t i = 0; i < block.in_legs.size(); ++i) {
        mix(static_cast<uint64_t>(block.in_legs[i].site * 8 + block.in_legs[i].axis));
        mix(static_cast<uint64_t>(block.in_accepts_one[i]));
    }
    for (size_t i = 0; i < block.out_legs.size(); ++i) {
        mix(static_cast<uint64_t>(block.out_legs[i].site * 8 + block.out_legs[i].axis));
        mix(static_cast<uint64_t>(block.out_emits_zero[i]));
    }
    for (const auto& s : block.sites) {
        mix(static_cast<uint64_t>(s.pos[0] + 100));
        mix(static_cast<uint64_t>(s.pos[1] + 100));
        mix(static_cast<uint64_t>(s.pos[2] + 100));
    }
    return h;
}

CountingTable enumerate_counting(const ReducedBlock& geometry, int order, int num_threads) {
    if (order < 0) throw std::invalid_argument("enumerate_counting: negative order");
    Enumerator e(geometry, order);
    return e.run(num_threads);
}

std::string series_cache_dir() {
    if (const char* env = std::getenv("PXP_CACHE_DIR")) return env;
    return "pxp_cache";
}

void save_table(const CountingTable& t, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream name;
    name << dir << "/table_" << t.dim << "d_" << t.op_id << "_N" << t.order << ".txt";
    std::ofstream f(name.str());
    f << "pxp-counting-table v1\n";
    f << "dim " << t.dim << "\norder " << t.order << "\nop " << t.op_id << "\n";
    f << "leghash " << t.leg_hash << "\nentries " << t.entries.size() << "\n";
    for (const auto& e : t.entries)
        f << e.n_anchor << " " << e.n_opp << " " << e.pmask << " " << e.omask << " " << e.coef << "\n";
}

bool load_table(CountingTable& t, const std::string& dir, int dim, const std::string& op_id, int order) {
    std::ostringstream name;
    name << dir << "/table_" << dim << "d_" << op_id << "_N" << order << ".txt";
    std::ifstream f(name.str());
    if (!f) return false;
    std::string header, tok;
    std::getline(f, header);
    if (header != "pxp-counting-table v1") return false;
    size_t count = 0;
    t = CountingTable{};
    while (f >> tok) {
        if (tok == "dim") f >> t.dim;
        else if (tok == "order") f >> t.order;
        else if (tok == "op") f >> t.op_id;
        else if (tok == "leghash") f >> t.leg_hash;
        else if (tok == "entries") { f >> count; break; }
        else return false;
    }
    for (size_t i = 0; i < count; ++i) {
        TableEntry e;
        if (!(f >> e.n_anchor >> e.n_opp >> e.pmask >> e.omask >> e.coef)) return false;
        t.entries.push_back(e);
    }
    return t.dim == dim && t.op_id == op_id && t.order == order;
}

const CountingTable& get_table(const ReducedBlock& geometry, int order) {
    static std::map<std::tuple<int, std::string, int>, CountingTable> registry;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(geometry.dim, geometry.id, order);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;

    CountingTable t;
    const std::string dir = series_cache_dir();
    bool ok = load_table(t, dir, geometry.dim, geometry.id, order) && t.leg_hash == block_leg_hash(geometry);
    if (!ok) {
        t = enumerate_counting(geometry, order);
        save_table(t, dir);
    }
    return registry.emplace(key, std::move(t)).first->second;
}

SeriesResult series_eval(const CountingTable& table, const ReducedBlock& block,
                         const VariationalParams& p, int order) {
    if (order > table.order) throw std::invalid_argument("series_eval: table order too low, need " +
                                                         std::to_string(order));
    const double sa = std::pow(std::sin(p.theta[0] / 2), 2);
    const double sb = std::pow(std::sin(p.theta[1] / 2), 2);

    std::map<std::pair<uint32_t, uint32_t>, cplx> vals;
    std::vector<cplx> by_order(order + 1, cplx(0));
    for (const auto& e : table.entries) {
        const int k = e.n_anchor + e.n_opp;
        if (k > order) continue;
        auto key = std::make_pair(e.pmask, e.omask);
        auto it = vals.find(key);
        if (it == vals.end()) it = vals.emplace(key, block.value(e.pmask, e.omask)).first;
        const double sign = (k % 2) ? -1.0 : 1.0;
        by_order[k] += sign * static_cast<double>(e.coef) * std::pow(sa, e.n_anchor) *
                       std::pow(sb, e.n_opp) * it->second;
    }
    SeriesResult r;
    r.partial.resize(order + 1);
    cplx run(0.0);
    for (int k = 0; k <= order; ++k) {
        run += by_order[k];
        r.partial[k] = run;
    }
    r.value = run;
    return r;
}

int default_order(int dim) { return dim == 3 ? 9 : 12; }

double series_increment_n(int dim, const VariationalParams& p, int order) {
    ReducedBlock blk = build_block(spec_n(dim), p);
    const CountingTable& t = get_table(blk, order);
    SeriesResult r = series_eval(t, blk, p, order);
    return std::abs(r.partial[order] - r.partial[order - 1]);
}

bool in_perturbative_regime(int dim, const VariationalParams& p, int order, double threshold) {
    return series_increment_n(dim, p, order) < threshold;
}

bool superexponential_check(const CountingTable& table) {
    auto f = table.diagonal_sums();
    for (size_t k = 1; k + 1 < f.size(); ++k) {
        if (f[k] == 0 || f[k + 1] == 0) continue;
        if (static_cast<double>(f[k + 1]) <= std::sqrt(static_cast<double>(k)) * static_cast<double>(f[k]))
            return false;
    }
    return true;
}

} // namespace pxp
