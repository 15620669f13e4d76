#include "pxp/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace pxp {

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::chain1d: return "exact_1d";
        case Backend::cylinder: return "cylinder";
        case Backend::series: return "series";
    }
    return "?";
}

Backend backend_from_name(const std::string& s) {
    if (s == "exact_1d" || s == "chain" || s == "1d") return Backend::chain1d;
    if (s == "cylinder") return Backend::cylinder;
    if (s == "series") return Backend::series;
    throw std::invalid_argument("unknown backend '" + s + "'");
}

ObsEngine::ObsEngine(int dim, Backend backend, int cylinder_L, int order)
    : dim_(dim), backend_(backend), cyl_L_(cylinder_L), order_(order ? order : default_order(dim)) {
    if (backend == Backend::chain1d && dim != 1)
        throw std::invalid_argument("exact_1d backend requires D = 1");
    if (backend == Backend::cylinder && dim != 2)
        throw std::invalid_argument("cylinder backend requires D = 2 (no exact 3D contraction)");
}

const CylinderEnv& ObsEngine::env_for(const VariationalParams& p, int slot) const {
    auto& env = env_[slot];
    auto same = [&](const VariationalParams& q) {
        return q.theta[0] == p.theta[0] && q.theta[1] == p.theta[1];
    };
    if (!env || !same(env->params)) {
        const CylinderEnv* warm = (warm_ && env) ? &*env : nullptr;
        env = cylinder_env(p, cyl_L_, warm);
    }
    return *env;
}

cplx ObsEngine::expect(const BlockSpec& spec, int subl, const VariationalParams& p) const {
    const VariationalParams q = subl == 0 ? p : p.swapped();
    ReducedBlock blk = build_block(spec, q);
    switch (backend_) {
        case Backend::chain1d:
            return chain_expect(blk, q);
        case Backend::cylinder:
            return cylinder_expect(blk, q, env_for(q, subl));
        case Backend::series: {
            const CountingTable& t = get_table(blk, order_);
            return series_eval(t, blk, q, order_).value;
        }
    }
    throw std::logic_error("unreachable");
}

double ObsEngine::real_checked(cplx v, const char* what) const {
    if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error(std::string(what) + ": non-real expectation value, imag = " +
                                 std::to_string(v.imag()));
    return v.real();
}

double ObsEngine::one_point_n(int subl, const VariationalParams& p) const {
    return real_checked(expect(spec_n(dim_), subl, p), "one_point_n");
}

double ObsEngine::one_point_sx(int subl, const VariationalParams& p) const {
    return real_checked(expect(spec_sigma_x(dim_), subl, p), "one_point_sx");
}

double ObsEngine::f_pxp(int subl, const VariationalParams& p) const {
    VariationalParams q = p;
    q.phi[0] = q.phi[1] = kPi / 2;
    return real_checked(expect(spec_sigma_x(dim_), subl, q), "f_pxp");
}

double ObsEngine::two_point_nn(int subl, const Coord& sep, const VariationalParams& p) const {
    int r = std::abs(sep[0]) + std::abs(sep[1]) + std::abs(sep[2]);
    if (backend_ == Backend::series && r > order_)
        throw std::invalid_argument("two_point_nn: separation needs series order >= " + std::to_string(r));
    return real_checked(expect(spec_nn(dim_, sep), subl, p), "two_point_nn");
}

double ObsEngine::two_point_nn_connected(int subl, const Coord& sep, const VariationalParams& p) const {
    const double nn = two_point_nn(subl, sep, p);
    int ssum = sep[0] + sep[1] + sep[2];
    const int subl2 = (subl + ((ssum % 2) + 2) % 2) % 2;
    return nn - one_point_n(subl, p) * one_point_n(subl2, p);
}

double ObsEngine::gram(int subl, const VariationalParams& p) const {
    return real_checked(expect(spec_gram(dim_), subl, p), "gram");
}

cplx ObsEngine::k_term(int subl, const VariationalParams& p) const {
    return expect(spec_k_term(dim_), subl, p);
}

cplx ObsEngine::s_term(int subl, const VariationalParams& p) const {
    return expect(spec_s_term(dim_), subl, p);
}

double ObsEngine::proj_ring(int subl, const VariationalParams& p) const {
    return real_checked(expect(spec_proj_ring(dim_), subl, p), "proj_ring");
}

double ObsEngine::sx_proj_sx(int subl, const VariationalParams& p) const {
    return real_checked(expect(spec_sx_proj_sx(dim_), subl, p), "sx_proj_sx");
}

double ObsEngine::sxsx_diag(int subl, const VariationalParams& p) const {
    return real_checked(expect(spec_sxsx_diag(dim_), subl, p), "sxsx_diag");
}

CorrelationFit correlation_length(const ObsEngine& eng, const VariationalParams& p, int max_r) {
    CorrelationFit fit;
    std::vector<double> rs, logf;
    double prev = 0;
    // even separations only: same-sublattice correlations decay as a single
    // exponential, odd ones carry an alternating amplitude
    for (int r = 2; r <= max_r; r += 2) {
        double f = eng.two_point_nn_connected(0, {r, 0, 0}, p);
        double af = std::abs(f);
        if (af < 1e-12) continue;
        if (!rs.empty() && af > prev) fit.monotonic = false;
        rs.push_back(r);
        logf.push_back(std::log(af));
        prev = af;
    }
    fit.points = static_cast<int>(rs.size());
    if (fit.points < 4) return fit; // insufficient signal
    // least squares log|f| = log A - r / xi
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < fit.points; ++i) {
        sx += rs[i];
        sy += logf[i];
        sxx += rs[i] * rs[i];
        sxy += rs[i] * logf[i];
        syy += logf[i] * logf[i];
    }
    const double n = fit.points;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    if (slope >= 0) return fit;
    fit.xi = -1.0 / slope;
    fit.amplitude = std::exp(intercept);
    const double sstot = syy - sy * sy / n;
    double ssres = 0;
    for (int i = 0; i < fit.points; ++i) {
        const double e = logf[i] - (intercept + slope * rs[i]);
        ssres += e * e;
    }
    fit.r2 = sstot > 0 ? 1.0 - ssres / sstot : 1.0;
    fit.ok = true;
    return fit;
}

} // namespace pxp
