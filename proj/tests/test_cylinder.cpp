#include "doctest.h"

#include <cmath>
#include <random>

#include "pxp/cylinder.hpp"
#include "pxp/observables.hpp"
#include "pxp/series.hpp"

using namespace pxp;

namespace {
double s2(double th) { return std::sin(th / 2) * std::sin(th / 2); }

// brute-force contraction of a small ring column for validation
std::vector<cplx> apply_brute(const ColumnSpec& col, const std::vector<cplx>& vec) {
    const int L = col.L;
    size_t in_size = col.in_size(), out_size = col.out_size();
    std::vector<cplx> out(out_size, cplx(0));
    std::vector<int> dix(L), dox(L), dy(L);
    for (int y = 0; y < L; ++y) {
        dix[y] = col.rows[y].dix;
        dox[y] = col.rows[y].dox;
        dy[y] = col.rows[y].doy;
    }
    auto unpack = [&](size_t idx, const std::vector<int>& dims) {
        std::vector<int> bits(L);
        for (int y = 0; y < L; ++y) {
            bits[y] = static_cast<int>(idx % dims[y]);
            idx /= dims[y];
        }
        return bits;
    };
    size_t nbond = 1;
    for (int y = 0; y < L; ++y) nbond *= dy[y];
    for (size_t o = 0; o < out_size; ++o) {
        auto ob = unpack(o, dox);
        for (size_t i = 0; i < in_size; ++i) {
            auto ib = unpack(i, dix);
            cplx sum(0);
            for (size_t bidx = 0; bidx < nbond; ++bidx) {
                auto bb = unpack(bidx, dy);
                cplx prod(1);
                for (int y = 0; y < L && prod != cplx(0); ++y)
                    prod *= col.rows[y].at(ib[y], bb[(y + L - 1) % L], ob[y], bb[y]);
                sum += prod;
            }
            out[o] += sum * vec[i];
        }
    }
    return out;
}
} // namespace

TEST_CASE("ring sweep matches brute-force contraction") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ColumnSpec col;
    col.L = 4;
    for (int y = 0; y < 4; ++y) {
        RowTensor r(2, 2, 2, 2);
        for (auto& x : r.a) x = cplx(dist(rng), dist(rng));
        col.rows.push_back(r);
    }
    std::vector<cplx> v(col.in_size());
    for (auto& x : v) x = cplx(dist(rng), dist(rng));
    auto a = apply_column(col, v);
    auto b = apply_brute(col, v);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);

    // transposed application against the brute-force transpose
    std::vector<cplx> w(col.out_size());
    for (auto& x : w) x = cplx(dist(rng), dist(rng));
    auto at = apply_column_transposed(col, w);
    // (C^T w)_i = sum_o C[o][i] w_o: brute force via full matrix
    std::vector<cplx> bt(col.in_size(), cplx(0));
    for (size_t i = 0; i < col.in_size(); ++i) {
        std::vector<cplx> e(col.in_size(), cplx(0));
        e[i] = 1;
        auto ce = apply_brute(col, e);
        for (size_t o = 0; o < ce.size(); ++o) bt[i] += ce[o] * w[o];
    }
    for (size_t i = 0; i < bt.size(); ++i) CHECK(std::abs(at[i] - bt[i]) < 1e-12);
}

TEST_CASE("mixed bond dimensions contract correctly") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ColumnSpec col;
    col.L = 4;
    std::vector<std::array<int, 4>> dims = {{2, 2, 1, 2}, {1, 2, 2, 1}, {2, 1, 2, 2}, {2, 2, 2, 2}};
    for (auto [a, b, c, d] : dims) {
        RowTensor r(a, b, c, d);
        for (auto& x : r.a) x = cplx(dist(rng), dist(rng));
        col.rows.push_back(r);
    }
    std::vector<cplx> v(col.in_size());
    for (auto& x : v) x = cplx(dist(rng), dist(rng));
    auto fast = apply_column(col, v);
    auto slow = apply_brute(col, v);
    REQUIRE(fast.size() == slow.size());
    for (size_t i = 0; i < fast.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
}

TEST_CASE("cylinder state is normalized") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-2.6, 2.6);
    for (int i = 0; i < 12; ++i) {
        VariationalParams p(dist(rng), dist(rng));
        if (s2(p.theta[0]) * s2(p.theta[1]) > 0.9) continue;
        cplx norm = cylinder_expect(spec_identity(2), p, 8);
        CHECK(std::abs(norm - cplx(1.0)) < 1e-8);
    }
}

TEST_CASE("cylinder densities on product states") {
    VariationalParams z2(kPi, 0.0);
    CHECK(cylinder_expect(spec_n(2), z2, 10).real() == doctest::Approx(1.0).epsilon(1e-10));
    VariationalParams half(kPi / 2, 0.0);
    CHECK(cylinder_expect(spec_n(2), half, 10).real() == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("series and cylinder agree inside the perturbative regime") {
    ObsEngine cyl(2, Backend::cylinder, 10);
    ObsEngine ser(2, Backend::series, 10, 12);
    for (auto [ta, tb] : {std::pair{0.6, 0.6}, {1.0, 0.3}, {0.2, 1.3}}) {
        VariationalParams p(ta, tb, kPi / 2, kPi / 2);
        REQUIRE(in_perturbative_regime(2, p, 12));
        CHECK(std::abs(cyl.one_point_n(0, p) - ser.one_point_n(0, p)) < 1e-3);
        CHECK(std::abs(cyl.one_point_n(1, p) - ser.one_point_n(1, p)) < 1e-3);
        CHECK(std::abs(cyl.f_pxp(0, p) - ser.f_pxp(0, p)) < 1e-3);
        CHECK(std::abs(cyl.gram(0, p) - ser.gram(0, p)) < 1e-3);
        CHECK(std::abs(cyl.k_term(0, p).imag() - ser.k_term(0, p).imag()) < 1e-3);
        CHECK(std::abs(cyl.s_term(0, p).imag() - ser.s_term(0, p).imag()) < 1e-3);
    }
}

TEST_CASE("cylinder circumferences L = 8 and L = 10 agree to high accuracy") {
    VariationalParams p(0.8, 0.5, kPi / 2, kPi / 2);
    ObsEngine a(2, Backend::cylinder, 8);
    ObsEngine b(2, Backend::cylinder, 10);
    CHECK(std::abs(a.one_point_n(0, p) - b.one_point_n(0, p)) < 1e-6);
    CHECK(std::abs(a.f_pxp(0, p) - b.f_pxp(0, p)) < 1e-6);
}

TEST_CASE("gram axis formulas hold on the cylinder") {
    ObsEngine eng(2, Backend::cylinder, 8);
    for (double ta : {0.5, 1.3}) {
        VariationalParams p(ta, 0.0);
        CHECK(eng.gram(0, p) == doctest::Approx(0.25).epsilon(1e-9));
        const double c = std::cos(ta / 2);
        CHECK(eng.gram(1, p) == doctest::Approx(0.25 * std::pow(c, 4)).epsilon(1e-9));
        CHECK(eng.k_term(0, p).imag() == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(eng.k_term(1, p).imag() == doctest::Approx(0.5 * std::pow(c, 6)).epsilon(1e-9));
    }
}

TEST_CASE("invalid circumference is rejected") {
    VariationalParams p(0.5, 0.5);
    CHECK_THROWS(static_cast<void>(cylinder_expect(spec_n(2), p, 7)));
    CHECK_THROWS(static_cast<void>(cylinder_expect(spec_n(2), p, 16)));
}
