#include <doctest.h>

#include <bit>
#include <cmath>

#include "csim/analysis.hpp"
#include "csim/eig.hpp"
#include "csim/rng.hpp"
#include "csim/tables.hpp"

using namespace csim;
using namespace csim::analysis;

namespace {

modem::SchemeConfig cfg_for(modem::Scheme s, int nt, int nr, int nc, int m) {
    int sf = 1;
    while ((1 << sf) < nc) ++sf;
    return modem::SchemeConfig::make(s, nt, nr, nc, m, codebook::gen_cyclic_chirp(sf, 2, nc));
}

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("despreading error closed form at D=1, Nc=2") {
    for (const double g : {0.0, 1.0, 10.0, 100.0}) {
        CHECK(despreading_error(g, 1, 2) == doctest::Approx(1.0 / (2.0 + g)).epsilon(1e-9));
    }
}

TEST_CASE("despreading error at zero snr is the random-pick probability") {
    for (const int d : {1, 2, 4, 8})
        for (const int nc : {2, 4, 8, 16})
            CHECK(despreading_error(0.0, d, nc) ==
                  doctest::Approx(1.0 - 1.0 / nc).epsilon(1e-8));
}

TEST_CASE("despreading error decays at high snr") {
    CHECK(despreading_error(1e6, 2, 4) < 1e-6);
}

TEST_CASE("despreading error is monotone in snr and code count") {
    const double grid[] = {0.1, 0.5, 2.0, 10.0, 40.0, 100.0};
    for (const int d : {1, 2, 4, 8}) {
        for (const int nc : {2, 4, 8, 16}) {
            double prev = 2.0;
            for (const double g : grid) {
                const double pe = despreading_error(g, d, nc);
                CHECK(pe <= prev + 1e-12);
                prev = pe;
            }
        }
        for (const double g : grid) {
            double prev = -1.0;
            for (const int nc : {2, 4, 8, 16}) {
                const double pe = despreading_error(g, d, nc);
                CHECK(pe >= prev - 1e-12);
                prev = pe;
            }
        }
    }
}

TEST_CASE("despreading bit weighting") {
    CHECK(abep_despreading_bits(0.1, 2) == doctest::Approx(0.1));
    CHECK(abep_despreading_bits(0.3, 4) == doctest::Approx(0.2));
    CHECK(abep_despreading_bits(0.0, 8) == 0.0);
    CHECK_THROWS_AS((void)abep_despreading_bits(0.5, 1), std::invalid_argument);
}

TEST_CASE("sm union bound limits and monotonicity") {
    const modem::SchemeConfig cfg = cfg_for(modem::Scheme::sm_cim, 2, 4, 2, 2);
    CHECK(abep_sm_union_bound(cfg, 1e-9) == doctest::Approx(0.5)); // clamped maximum
    double prev = 1.0;
    for (double db = -10.0; db <= 25.0; db += 1.0) {
        const double v = abep_sm_union_bound(cfg, std::pow(10.0, db / 10.0));
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 0.5);
        prev = v;
    }
    CHECK(prev < 1e-4); // vanishes at high snr
}

TEST_CASE("gram spectrum closed form agrees with a dense eigensolver") {
    const spacetime::StbcSmCodebook sp = spacetime::build_stbc_sm_codebook(4, 4);

    const CMat xa = spacetime::make_codeword(sp, 1, cd(1, 0), cd(0, 1)).matrix;
    CHECK(gram_spectrum(xa, xa).rank == 0);

    // same-pair difference is itself an Alamouti block: twin eigenvalues
    const CMat xb = spacetime::make_codeword(sp, 1, cd(0, 1), cd(-1, 0)).matrix;
    const PepSpectrum twin = gram_spectrum(xa, xb);
    const double expect = std::norm(cd(1, 0) - cd(0, 1)) + std::norm(cd(0, 1) - cd(-1, 0));
    CHECK(twin.rank == 2);
    CHECK(twin.eigenvalues[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(twin.eigenvalues[1] == doctest::Approx(expect).epsilon(1e-12));

    RandomStream rs(2024, 0, 0, StreamTag::payload_bits);
    for (int trial = 0; trial < 1000; ++trial) {
        const int nza = 1 + static_cast<int>(rs.next_u64() % 4);
        const int nzb = 1 + static_cast<int>(rs.next_u64() % 4);
        const int k1 = static_cast<int>(rs.next_u64() % 4), k2 = static_cast<int>(rs.next_u64() % 4);
        const int k3 = static_cast<int>(rs.next_u64() % 4), k4 = static_cast<int>(rs.next_u64() % 4);
        const CMat a = spacetime::make_codeword(sp, nza, modem::psk_symbol(k1, 4),
                                                modem::psk_symbol(k2, 4)).matrix;
        const CMat b = spacetime::make_codeword(sp, nzb, modem::psk_symbol(k3, 4),
                                                modem::psk_symbol(k4, 4)).matrix;
        const PepSpectrum s = gram_spectrum(a, b);
        // dense oracle over the Nt x Nt Gram
        const CMat d = a - b;
        HermitianEig dense = hermitian_eig(matmul(d, hermitian_transpose(d)));
        std::vector<double> nz;
        for (const double lam : dense.eigenvalues)
            if (lam > 1e-12) nz.push_back(lam);
        REQUIRE(static_cast<int>(nz.size()) == s.rank);
        for (int i = 0; i < s.rank; ++i)
            CHECK(s.eigenvalues[static_cast<size_t>(i)] == doctest::Approx(nz[static_cast<size_t>(i)]).epsilon(1e-10));
    }
}

TEST_CASE("exact pep reduces to the single-branch closed form") {
    PepSpectrum s;
    s.rank = 1;
    for (double c = 0.01; c <= 1e4; c *= 3.7) {
        s.eigenvalues[0] = 1.0;
        // es/N0 chosen so that es*lambda/4 = c
        const double es = 4.0 * c;
        const double closed = 0.5 * (1.0 - std::sqrt(c / (1.0 + c)));
        CHECK(pep_exact(s, es, 1) == doctest::Approx(closed).epsilon(1e-9));
    }
}

TEST_CASE("exact pep limits and diversity monotonicity") {
    PepSpectrum s;
    s.rank = 1;
    s.eigenvalues[0] = 1e-12;
    CHECK(pep_exact(s, 1e-9, 2) == doctest::Approx(0.5).epsilon(1e-6));

    s.eigenvalues[0] = 2.0;
    double prev = 1.0;
    for (const int nr : {1, 2, 4, 8}) {
        const double v = pep_exact(s, 5.0, nr);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    PepSpectrum zero;
    zero.rank = 0;
    CHECK_THROWS_AS((void)pep_exact(zero, 1.0, 1), std::invalid_argument);
}

TEST_CASE("approximate pep matches its defining expression") {
    PepSpectrum s;
    s.rank = 1;
    s.eigenvalues[0] = 1e-14;
    CHECK(pep_approx(s, 1e-12, 3) == doctest::Approx(1.0 / 12 + 1.0 / 4).epsilon(1e-9));

    // the two-exponential surrogate of Q at x = 3
    const double approx_q3 = std::exp(-4.5) / 12.0 + std::exp(-6.0) / 4.0;
    CHECK(approx_q3 == doctest::Approx(1.54e-3).epsilon(0.01));
    CHECK(std::abs(approx_q3 - qfunc(3.0)) / qfunc(3.0) < 0.15);

    for (const int nr : {1, 2, 4}) {
        for (double esl = 10.0; esl <= 1e4; esl *= 10.0) {
            PepSpectrum sp;
            sp.rank = 1;
            sp.eigenvalues[0] = 1.0;
            const double ex = pep_exact(sp, esl, nr);
            const double ap = pep_approx(sp, esl, nr);
            CHECK(ap >= 0.0);
            CHECK(ap <= 1.5 * ex);
        }
    }
}

TEST_CASE("codeword union bound is monotone and capped") {
    const modem::SchemeConfig cfg = cfg_for(modem::Scheme::stbc_sm_cim, 4, 4, 4, 4);
    double prev = 1.0;
    for (double db = 0.0; db <= 20.0; db += 2.0) {
        const double v = abep_stbc_sm_union_bound(cfg, std::pow(10.0, db / 10.0), true);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    // the full dual-sequence space at (4,*,4,4) has 2^12 hypotheses: refused
    const modem::SchemeConfig big = cfg_for(modem::Scheme::estbc_sm_cim, 4, 4, 4, 4);
    CHECK_THROWS_AS((void)abep_stbc_sm_union_bound(big, 10.0, true), HypothesisCapExceeded);
    // but fits under a raised cap or for a small configuration
    const modem::SchemeConfig small = cfg_for(modem::Scheme::estbc_sm_cim, 3, 4, 3, 2);
    const double v = abep_stbc_sm_union_bound(small, std::pow(10.0, 1.0), true);
    CHECK(v >= 0.0);
    CHECK(v <= 0.5);
}

TEST_CASE("bit-error weights match a bitvector-difference oracle") {
    // labels are positional bit patterns; popcount distance is the oracle
    const int bits = 6;
    for (uint64_t i = 0; i < (1u << bits); ++i)
        for (uint64_t q = 0; q < (1u << bits); ++q) {
            const BitVec bi = uint_to_bits(i, bits);
            const BitVec bq = uint_to_bits(q, bits);
            CHECK(hamming_distance(bi, bq) == static_cast<size_t>(std::popcount(i ^ q)));
        }
}

TEST_CASE("total abep is the bit-weighted combination") {
    const AbepBreakdown even = abep_total(0.2, 0.2, 4, 2);
    CHECK(even.pb_total == doctest::Approx(0.2));
    const AbepBreakdown only_detect = abep_total(0.3, 0.9, 4, 0);
    CHECK(only_detect.pb_total == doctest::Approx(0.3));
    const AbepBreakdown sm = abep_total(0.12, 0.06, 4, 2); // (4,*,4,4) weights
    CHECK(sm.weight_detection == doctest::Approx(4.0 / 6.0));
    CHECK(sm.weight_despreading == doctest::Approx(2.0 / 6.0));
    CHECK(sm.pb_total == doctest::Approx(0.12 * 4 / 6 + 0.06 * 2 / 6));
}

TEST_CASE("full analytic abep is finite and monotone for both split schemes") {
    for (const modem::Scheme s : {modem::Scheme::sm_cim, modem::Scheme::stbc_sm_cim}) {
        const modem::SchemeConfig cfg = cfg_for(s, 4, 4, 4, 4);
        double prev = 1.0;
        for (double db = 0.0; db <= 16.0; db += 2.0) {
            const AbepBreakdown b = abep(cfg, db);
            CHECK(b.pb_total <= prev + 1e-12);
            CHECK(b.pb_total >= 0.0);
            CHECK(b.pb_total <= 0.5);
            prev = b.pb_total;
        }
    }
}

TEST_CASE("data rate law") {
    CHECK(data_rate(6.0, 0.0, 1.0) == doctest::Approx(6.0));
    CHECK(data_rate(6.0, 1.0, 1.0) == 0.0);
    CHECK(data_rate(11.0, 0.0, 1.0) == doctest::Approx(11.0));
    CHECK(data_rate(4.0, 0.5, 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)data_rate(4.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("energy saving law") {
    CHECK(energy_saving(3.0, 7.0) == doctest::Approx(57.142857).epsilon(1e-6));
    CHECK(energy_saving(9.0, 14.0) == doctest::Approx(35.714285).epsilon(1e-6));
    CHECK(energy_saving(5.0, 5.0) == 0.0);
    CHECK_THROWS_AS((void)energy_saving(8.0, 7.0), std::invalid_argument);
}

TEST_CASE("complexity counts evaluate the published formulas") {
    ComplexityParams p;
    p.L = 252;
    p.Nc = 4;
    p.Nr = 4;
    p.Nt = 4;
    p.Nz = 4;
    p.M = 4;
    p.bt = 6.0;
    CHECK(complexity_count(modem::Scheme::sm_cim, modem::Detector::lc, p) == 33776);
    CHECK(complexity_count(modem::Scheme::sm_cim, modem::Detector::ml, p) ==
          4 * 252 + (4 * 252 * 4 * 4 + 4 * 252 * 4) * 64);
    p.bt = 4.0;
    CHECK(complexity_count(modem::Scheme::stbc_sm_cim, modem::Detector::lc, p) ==
          8 * 252 + 4 * 252 * 4 * 4 + 4 * 4 * 4 + 16 * 4 * 4 * 4);
    p.bt = 6.0;
    CHECK(complexity_count(modem::Scheme::estbc_sm_cim, modem::Detector::lc, p) ==
          16 * 252 + 4 * 252 * 4 * 4 + 4 * 4 * 4 + 32 * 4 * 4 * 4);
    CHECK(complexity_formula(modem::Scheme::sm_cim, modem::Detector::lc) ==
          "4L + 8LNcNr + 8NrNtM");
}

TEST_CASE("published rate and energy tables") {
    const auto rate = tables::rate_table();
    REQUIRE(rate.size() == 3);
    CHECK(rate[0].sm_cim == doctest::Approx(6.0));
    CHECK(rate[0].stbc_sm_cim == doctest::Approx(4.0));
    CHECK(rate[0].estbc_sm_cim == doctest::Approx(6.0));
    CHECK(rate[1].sm_cim == doctest::Approx(7.0));
    CHECK(rate[1].stbc_sm_cim == doctest::Approx(4.5));
    CHECK(rate[1].estbc_sm_cim == doctest::Approx(7.0));
    CHECK(rate[2].sm_cim == doctest::Approx(10.0));
    CHECK(rate[2].stbc_sm_cim == doctest::Approx(7.0));
    CHECK(rate[2].estbc_sm_cim == doctest::Approx(11.0));

    const auto energy = tables::energy_table();
    REQUIRE(energy.size() == 3);
    const double expect[3][3] = {{57.14, 28.57, 28.57}, {55.55, 27.77, 33.33}, {50.00, 28.57, 35.71}};
    for (int row = 0; row < 3; ++row) {
        CHECK(std::abs(energy[static_cast<size_t>(row)].sm_cim - expect[row][0]) < 0.01);
        CHECK(std::abs(energy[static_cast<size_t>(row)].stbc_sm_cim - expect[row][1]) < 0.01);
        CHECK(std::abs(energy[static_cast<size_t>(row)].estbc_sm_cim - expect[row][2]) < 0.01);
    }
}

} // TEST_SUITE
