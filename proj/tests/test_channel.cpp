#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "csim/channel.hpp"
#include "csim/eig.hpp"

using namespace csim;
using namespace csim::channel;

TEST_SUITE("channel") {

TEST_CASE("uncorrelated perfect-csi draws are standard complex gaussian") {
    ChannelModel model({2, 2, 0.0, 0.0});
    RandomStream rs(1001, 0, 0, StreamTag::channel);
    std::vector<double> reals;
    reals.reserve(100000 * 4);
    for (int t = 0; t < 100000; ++t) {
        const ChannelRealization ch = model.draw(rs);
        for (const cd& v : ch.H_true.a) reals.push_back(v.real());
        for (size_t i = 0; i < ch.H_true.a.size(); ++i)
            CHECK(ch.H_est.a[i] == ch.H_true.a[i]); // sigma_e = 0
    }
    // Kolmogorov-Smirnov against N(0, 1/2)
    std::sort(reals.begin(), reals.end());
    const double n = static_cast<double>(reals.size());
    double dmax = 0.0;
    for (size_t i = 0; i < reals.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-reals[i] / std::sqrt(2.0 * 0.5));
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        dmax = std::max({dmax, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    const double crit_1pct = 1.628 / std::sqrt(n);
    CHECK(dmax < crit_1pct);
}

TEST_CASE("full correlation collapses the antennas") {
    const CMat s = correlation_sqrt(2, 1.0);
    // sqrt of the all-ones 2x2 matrix
    CHECK(s(0, 0).real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(s(0, 1).real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    ChannelModel model({2, 2, 1.0, 0.0});
    RandomStream rs(1002, 0, 0, StreamTag::channel);
    const ChannelRealization ch = model.draw(rs);
    CHECK(std::abs(ch.H_true(0, 0) - ch.H_true(0, 1)) < 1e-12);
    CHECK(std::abs(ch.H_true(1, 0) - ch.H_true(1, 1)) < 1e-12);
}

TEST_CASE("correlation matrix square root reproduces the toeplitz profile") {
    for (const double r : {0.0, 0.3, 0.7, 0.95}) {
        const CMat s = correlation_sqrt(4, r);
        const CMat back = matmul(s, hermitian_transpose(s));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                CHECK(back(i, j).real() ==
                      doctest::Approx(std::pow(r, std::abs(i - j))).epsilon(1e-10));
                CHECK(std::abs(back(i, j).imag()) < 1e-12);
                CHECK(std::abs(s(i, j) - std::conj(s(j, i))) < 1e-12);
            }
    }
}

TEST_CASE("sample covariance of vec(H) matches the kronecker model") {
    const int nr = 2, nt = 2, draws = 100000;
    const double r = 0.5;
    ChannelModel model({nr, nt, r, 0.0});
    RandomStream rs(1003, 0, 0, StreamTag::channel);
    const int dim = nr * nt;
    std::vector<std::vector<cd>> cov(static_cast<size_t>(dim),
                                     std::vector<cd>(static_cast<size_t>(dim), cd(0, 0)));
    for (int t = 0; t < draws; ++t) {
        const ChannelRealization ch = model.draw(rs);
        std::vector<cd> v(static_cast<size_t>(dim));
        for (int c = 0; c < nt; ++c) // column-major vec
            for (int rr = 0; rr < nr; ++rr) v[static_cast<size_t>(c * nr + rr)] = ch.H_true(rr, c);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                cov[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                    v[static_cast<size_t>(i)] * std::conj(v[static_cast<size_t>(j)]);
    }
    double err2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const cd sample = cov[static_cast<size_t>(i)][static_cast<size_t>(j)] / static_cast<double>(draws);
            // Rt (x) Rr with exponential profiles
            const int it = i / nr, ir = i % nr;
            const int jt = j / nr, jr = j % nr;
            const double expect = std::pow(r, std::abs(it - jt)) * std::pow(r, std::abs(ir - jr));
            err2 += std::norm(sample - expect);
            ref2 += expect * expect;
        }
    CHECK(std::sqrt(err2 / ref2) < 0.02);
}

TEST_CASE("adjacent antenna correlation converges to r") {
    for (const double r : {0.3, 0.6, 0.9}) {
        ChannelModel model({2, 2, r, 0.0});
        RandomStream rs(1004 + static_cast<uint64_t>(r * 10), 0, 0, StreamTag::channel);
        cd cross(0, 0);
        double p0 = 0, p1 = 0;
        const int draws = 100000;
        for (int t = 0; t < draws; ++t) {
            const ChannelRealization ch = model.draw(rs);
            cross += ch.H_true(0, 0) * std::conj(ch.H_true(0, 1));
            p0 += std::norm(ch.H_true(0, 0));
            p1 += std::norm(ch.H_true(0, 1));
        }
        const double corr = (cross / static_cast<double>(draws)).real() /
                            std::sqrt(p0 / draws * p1 / draws);
        CHECK(std::abs(corr - r) < 0.02);
    }
}

TEST_CASE("csi error is independent of the channel") {
    ChannelModel model({2, 2, 0.0, 0.25});
    RandomStream rs(1005, 0, 0, StreamTag::channel);
    cd cross(0, 0);
    double ph = 0, pe = 0;
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) {
        const ChannelRealization ch = model.draw(rs);
        for (size_t i = 0; i < ch.H_true.a.size(); ++i) {
            const cd err = ch.H_est.a[i] - ch.H_true.a[i];
            cross += ch.H_true.a[i] * std::conj(err);
            ph += std::norm(ch.H_true.a[i]);
            pe += std::norm(err);
        }
    }
    const double total = static_cast<double>(draws) * 4;
    CHECK(std::abs(cross) / total / std::sqrt(ph / total * pe / total) < 0.01);
    CHECK(pe / total == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("awgn variance and circular symmetry") {
    RandomStream rs(1006, 0, 0, StreamTag::noise);
    CMat m(1000, 1000);
    add_awgn(m, 2.0, rs);
    double vr = 0, vi = 0;
    for (const cd& v : m.a) {
        vr += v.real() * v.real();
        vi += v.imag() * v.imag();
    }
    const double n = static_cast<double>(m.a.size());
    CHECK((vr + vi) / n == doctest::Approx(2.0).epsilon(0.01));
    CHECK(vr / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(vi / n == doctest::Approx(1.0).epsilon(0.01));

    CMat z(3, 3);
    add_awgn(z, 0.0, rs); // N0 = 0 leaves the input untouched
    for (const cd& v : z.a) CHECK(v == cd(0, 0));
}

TEST_CASE("spreading gain in decibels") {
    CHECK(spreading_gain_db(252) == doctest::Approx(24.01).epsilon(0.0005));
    CHECK(spreading_gain_db(1) == 0.0);
    CHECK(spreading_gain_db(100) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)spreading_gain_db(0), std::invalid_argument);
}

TEST_CASE("channel model rejects invalid configuration") {
    CHECK_THROWS_AS(ChannelModel({0, 2, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ChannelModel({2, 2, 1.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ChannelModel({2, 2, 0.0, -0.1}), std::invalid_argument);
}

} // TEST_SUITE
