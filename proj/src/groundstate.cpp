#include "pxp/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "pxp/lattice.hpp"

namespace pxp {

namespace {

// per-site NNN pair coefficient in front of (<nn>_AA + <nn>_BB)
double nnn_coeff(int dim) { return Lattice::nnn_pairs_per_site(dim) / 2.0; }

Coord nnn_separation(int dim) {
    return dim == 1 ? Coord{2, 0, 0} : Coord{1, 1, 0};
}

// simplex refinement of the energy surface
std::vector<double> refine(const std::function<double(double, double)>& e, double ta, double tb) {
    auto obj = [&](const std::vector<double>& x) { return e(x[0], x[1]); };
    // hand-rolled Nelder-Mead, tolerance 1e-9 in energy spread
    std::vector<std::vector<double>> sx = {{ta, tb}, {ta + 0.05, tb}, {ta, tb + 0.05}};
    std::vector<double> fv(3);
    for (int i = 0; i < 3; ++i) fv[i] = obj(sx[i]);
    for (int it = 0; it < 600; ++it) {
        int lo = 0, hi = 0;
        for (int i = 1; i < 3; ++i) {
            if (fv[i] < fv[lo]) lo = i;
            if (fv[i] > fv[hi]) hi = i;
        }
        if (fv[hi] - fv[lo] < 1e-13) break;
        int mid = 3 - lo - hi;
        std::vector<double> c = {(sx[lo][0] + sx[mid][0]) / 2, (sx[lo][1] + sx[mid][1]) / 2};
        std::vector<double> r = {2 * c[0] - sx[hi][0], 2 * c[1] - sx[hi][1]};
        double fr = obj(r);
        if (fr < fv[lo]) {
            std::vector<double> ex = {3 * c[0] - 2 * sx[hi][0], 3 * c[1] - 2 * sx[hi][1]};
            double fe = obj(ex);
            if (fe < fr) {
                sx[hi] = ex;
                fv[hi] = fe;
            } else {
                sx[hi] = r;
                fv[hi] = fr;
            }
        } else if (fr < fv[mid]) {
            sx[hi] = r;
            fv[hi] = fr;
        } else {
            std::vector<double> co = {(sx[hi][0] + c[0]) / 2, (sx[hi][1] + c[1]) / 2};
            double fc = obj(co);
            if (fc < fv[hi]) {
                sx[hi] = co;
                fv[hi] = fc;
            } else {
                for (int i = 0; i < 3; ++i) {
                    if (i == lo) continue;
                    sx[i] = {(sx[i][0] + sx[lo][0]) / 2, (sx[i][1] + sx[lo][1]) / 2};
                    fv[i] = obj(sx[i]);
                }
            }
        }
    }
    int lo = 0;
    for (int i = 1; i < 3; ++i)
        if (fv[i] < fv[lo]) lo = i;
    return {sx[lo][0], sx[lo][1], fv[lo]};
}

} // namespace

Backend default_gs_backend(int dim) { return dim == 1 ? Backend::chain1d : Backend::series; }

GroundState::GroundState(ModelParams model, Backend backend, int cylinder_L, int order)
    : model_(model), eng_(model.dim, backend, cylinder_L, order) {}

double GroundState::energy_per_site(double theta_a, double theta_b) const {
    VariationalParams p(theta_a, theta_b, kPi / 2, kPi / 2);
    const double f_ab = eng_.f_pxp(0, p);
    const double f_ba = eng_.f_pxp(1, p);
    const double na = eng_.one_point_n(0, p);
    const double nb = eng_.one_point_n(1, p);
    double e = 0.5 * (f_ab + f_ba) - 0.5 * model_.delta * (na + nb);
    if (model_.v != 0.0) {
        const Coord sep = nnn_separation(model_.dim);
        const double nn_aa = eng_.two_point_nn(0, sep, p);
        const double nn_bb = eng_.two_point_nn(1, sep, p);
        e += model_.v * nnn_coeff(model_.dim) * (nn_aa + nn_bb);
    }
    return e;
}

PhasePoint GroundState::minimize(int grid) const {
    auto wrapped_energy = [&](double ta, double tb) -> double {
        ta = wrap_angle(ta);
        tb = wrap_angle(tb);
        if (eng_.backend() == Backend::series &&
            !in_perturbative_regime(model_.dim, VariationalParams(ta, tb), eng_.order()))
            return 1e30;
        try {
            return energy_per_site(ta, tb);
        } catch (const std::exception&) {
            return 1e30; // degenerate transfer point
        }
    };

    // coarse grid seeds
    double best[8][3];
    int nbest = 0;
    for (int i = 0; i < 8; ++i) best[i][2] = 1e30;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double ta = -kPi + (2 * kPi * (i + 0.5)) / grid;
            const double tb = -kPi + (2 * kPi * (j + 0.5)) / grid;
            if (tb > ta) continue; // exchange symmetry: search theta_a >= theta_b
            const double e = wrapped_energy(ta, tb);
            if (e < best[7][2]) {
                best[7][0] = ta;
                best[7][1] = tb;
                best[7][2] = e;
                for (int k = 7; k > 0 && best[k][2] < best[k - 1][2]; --k)
                    std::swap(best[k], best[k - 1]);
                nbest = std::min(nbest + 1, 8);
            }
        }
    if (nbest == 0 || best[0][2] > 1e29)
        throw std::runtime_error("minimize: no admissible point found on the grid");

    PhasePoint pt;
    pt.delta = model_.delta;
    pt.v = model_.v;
    pt.energy = 1e30;
    for (int k = 0; k < nbest; ++k) {
        if (best[k][2] > 1e29) continue;
        auto r = refine(wrapped_energy, best[k][0], best[k][1]);
        if (r[2] < pt.energy) {
            pt.energy = r[2];
            pt.theta_a = wrap_angle(r[0]);
            pt.theta_b = wrap_angle(r[1]);
        }
    }
    if (pt.theta_a < pt.theta_b) std::swap(pt.theta_a, pt.theta_b);
    pt.degenerate_pair = std::abs(pt.theta_a - pt.theta_b) > 1e-6;
    pt.in_regime = eng_.backend() != Backend::series ||
                   in_perturbative_regime(model_.dim, VariationalParams(pt.theta_a, pt.theta_b), eng_.order());
    pt.order_parameter = order_parameter(pt);
    return pt;
}

double GroundState::order_parameter(const PhasePoint& pt) const {
    VariationalParams p(pt.theta_a, pt.theta_b, kPi / 2, kPi / 2);
    // sigma_z = 2n - 1
    return 2.0 * (eng_.one_point_n(0, p) - eng_.one_point_n(1, p));
}

TransitionScan transition_scan(int dim, double v, double delta_lo, double delta_hi, double coarse_step,
                               Backend backend) {
    TransitionScan scan;
    const double op_tol = 1e-4;
    auto solve = [&](double delta) {
        GroundState gs(ModelParams(dim, delta, v), backend);
        return gs.minimize();
    };

    double prev_delta = delta_lo;
    PhasePoint prev = solve(delta_lo);
    scan.points.push_back(prev);
    if (std::abs(prev.order_parameter) > op_tol)
        throw std::invalid_argument("transition_scan: grid does not bracket the transition from below");

    bool bracketed = false;
    double lo = delta_lo, hi = delta_hi;
    for (double d = delta_lo + coarse_step; d <= delta_hi + 1e-12; d += coarse_step) {
        PhasePoint pt = solve(d);
        scan.points.push_back(pt);
        if (!bracketed && std::abs(pt.order_parameter) > op_tol) {
            lo = prev_delta;
            hi = d;
            bracketed = true;
        }
        prev_delta = d;
    }
    if (!bracketed) return scan; // no transition in range

    while (hi - lo > 1e-5) {
        double mid = 0.5 * (lo + hi);
        (std::abs(solve(mid).order_parameter) > op_tol ? hi : lo) = mid;
    }
    scan.delta_c = 0.5 * (lo + hi);
    scan.found = true;

    // order classification: angle jump across one refined step of 1e-3
    PhasePoint below = solve(scan.delta_c - 5e-4);
    PhasePoint above = solve(scan.delta_c + 5e-4);
    const double jump = std::hypot(above.theta_a - below.theta_a, above.theta_b - below.theta_b);
    scan.order = jump > 0.05 ? TransitionOrder::first : TransitionOrder::second;
    return scan;
}

namespace {

TransitionScan scan_at_v(int dim, double v, Backend backend) {
    // detuning windows generous enough for all dimensions and V in [-2, 1]
    double lo = -3.5 + 2.0 * std::min(v, 0.0), hi = 2.5;
    if (dim == 1) hi = 3.0;
    return transition_scan(dim, v, lo, hi, 0.25, backend);
}

} // namespace

TricriticalPoint tricritical_scan(int dim, double v_lo, double v_hi, double v_tol, Backend backend) {
    TricriticalPoint out;
    auto order_at = [&](double v) { return scan_at_v(dim, v, backend); };
    TransitionScan at_hi = order_at(v_hi);
    TransitionScan at_lo = order_at(v_lo);
    if (at_hi.order != TransitionOrder::second || at_lo.order != TransitionOrder::first)
        throw std::invalid_argument("tricritical_scan: [v_lo, v_hi] must bracket the tricritical point");
    double lo = v_lo, hi = v_hi;
    TransitionScan last = at_lo;
    while (hi - lo > v_tol) {
        double mid = 0.5 * (lo + hi);
        TransitionScan s = order_at(mid);
        if (s.order == TransitionOrder::first) {
            lo = mid;
            last = s;
        } else {
            hi = mid;
        }
    }
    out.v_c = 0.5 * (lo + hi);
    out.delta_tc = order_at(out.v_c).delta_c;
    out.found = true;
    return out;
}

ExponentFit critical_exponent(int dim, Backend backend, int points, double window) {
    ExponentFit fit;
    TransitionScan scan = scan_at_v(dim, 0.0, backend);
    if (!scan.found || scan.order != TransitionOrder::second) return fit;
    fit.delta_c = scan.delta_c;

    std::vector<double> xs, ys;
    for (int i = 0; i < points; ++i) {
        // log-spaced window above the transition
        const double frac = std::pow(10.0, -2.0 + 2.0 * i / (points - 1.0)); // 1e-2 .. 1
        const double delta = scan.delta_c + window * frac;
        GroundState gs(ModelParams(dim, delta, 0.0), backend);
        PhasePoint pt = gs.minimize();
        const double split = std::abs(pt.theta_a - pt.theta_b);
        if (split < 1e-6) continue;
        xs.push_back(std::log(delta - scan.delta_c));
        ys.push_back(std::log(split));
    }
    if (xs.size() < 6) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    fit.beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - fit.beta * sx) / n;
    double ssres = 0;
    const double sstot = syy - sy * sy / n;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (intercept + fit.beta * xs[i]);
        ssres += e * e;
    }
    fit.r2 = sstot > 0 ? 1 - ssres / sstot : 0;
    fit.ok = fit.r2 >= 0.99;
    return fit;
}

} // namespace pxp
