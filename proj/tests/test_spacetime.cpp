#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "csim/eig.hpp"
#include "csim/rng.hpp"
#include "csim/spacetime.hpp"

using namespace csim;
using namespace csim::spacetime;

namespace {

constexpr double kPi = 3.14159265358979323846;

cd rand_psk(RandomStream& rs, int m) {
    const int k = static_cast<int>(rs.next_u64() % static_cast<uint64_t>(m));
    return {std::cos(2.0 * kPi * k / m), std::sin(2.0 * kPi * k / m)};
}

// dense-side oracle: product of nonzero eigenvalues of the Nt x Nt Gram
double dense_cgd_oracle(const CMat& xa, const CMat& xb) {
    const CMat d = xa - xb;
    const CMat gram = matmul(d, hermitian_transpose(d));
    HermitianEig e = hermitian_eig(gram);
    double prod = 1.0;
    int rank = 0;
    for (const double lam : e.eigenvalues)
        if (lam > 1e-12) {
            prod *= lam;
            ++rank;
        }
    return rank >= 2 ? prod : 0.0;
}

} // namespace

TEST_SUITE("spacetime") {

TEST_CASE("published antenna pair tables are reproduced verbatim") {
    using P = std::vector<std::pair<int, int>>;
    const P t3 = {{1, 2}, {2, 3}};
    const P t4 = {{1, 2}, {3, 4}, {2, 3}, {4, 1}};
    const P t5 = {{1, 2}, {3, 4}, {2, 3}, {4, 5}, {1, 3}, {2, 4}, {3, 5}, {4, 1}};
    const P t6 = {{1, 2}, {3, 4}, {5, 6}, {2, 3}, {4, 5}, {6, 1}, {1, 3}, {2, 4}};
    const P t7 = {{1, 2}, {3, 4}, {5, 6}, {2, 3}, {4, 5}, {6, 7}, {1, 3}, {2, 4},
                  {5, 7}, {1, 4}, {2, 5}, {3, 6}, {1, 5}, {2, 6}, {3, 7}, {1, 6}};
    const P t8 = {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {2, 3}, {4, 5}, {6, 7}, {8, 1},
                  {1, 3}, {2, 4}, {5, 7}, {6, 8}, {1, 5}, {2, 6}, {3, 7}, {4, 8}};
    const P* expected[6] = {&t3, &t4, &t5, &t6, &t7, &t8};
    const int nz[6] = {2, 4, 8, 8, 16, 16};
    const int nv[6] = {1, 2, 2, 3, 3, 4};
    const int nb[6] = {2, 2, 4, 3, 6, 4};
    for (int nt = 3; nt <= 8; ++nt) {
        const StbcSmCodebook cb = build_stbc_sm_codebook(nt, 4);
        CHECK(cb.antenna_pairs == *expected[nt - 3]);
        CHECK(cb.codeword_count_Nz == nz[nt - 3]);
        CHECK(cb.per_codebook_Nv == nv[nt - 3]);
        CHECK(cb.codebook_count_Nb == nb[nt - 3]);
    }
    CHECK_THROWS_AS((void)build_stbc_sm_codebook(2, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)build_stbc_sm_codebook(9, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)build_stbc_sm_codebook(4, 32), std::invalid_argument);
}

TEST_CASE("small-array rotation angles come from the lookup") {
    const double expect[4][2] = {{2, 1.57}, {4, 0.61}, {8, 0.30}, {16, 0.15}};
    for (const auto& e : expect) {
        const StbcSmCodebook cb = build_stbc_sm_codebook(4, static_cast<int>(e[0]));
        REQUIRE(cb.rotation_angles_phi.size() == 2);
        CHECK(cb.rotation_angles_phi[0] == 0.0);
        CHECK(cb.rotation_angles_phi[1] == doctest::Approx(e[1]).epsilon(1e-12));
    }
}

TEST_CASE("large-array rotation angles follow the closed-form rule") {
    const StbcSmCodebook cb = build_stbc_sm_codebook(6, 2);
    REQUIRE(cb.codebook_count_Nb == 3);
    CHECK(cb.rotation_angles_phi[0] == doctest::Approx(0.0));
    CHECK(cb.rotation_angles_phi[1] == doctest::Approx(kPi / 3.0).epsilon(1e-15));
    CHECK(cb.rotation_angles_phi[2] == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-15));

    const StbcSmCodebook cb16 = build_stbc_sm_codebook(6, 16);
    CHECK(cb16.rotation_angles_phi[1] == doctest::Approx(kPi / 24.0).epsilon(1e-15));
}

TEST_CASE("codeword construction places the Alamouti block on the pair") {
    const StbcSmCodebook cb = build_stbc_sm_codebook(4, 2);
    const SpaceTimeCodeword cw = make_codeword(cb, 1, cd(1, 0), cd(1, 0));
    CHECK(cw.matrix(0, 0) == cd(1, 0));
    CHECK(cw.matrix(0, 1) == cd(-1, 0));
    CHECK(cw.matrix(1, 0) == cd(1, 0));
    CHECK(cw.matrix(1, 1) == cd(1, 0));
    CHECK(cw.matrix(2, 0) == cd(0, 0));
    CHECK(cw.matrix(3, 1) == cd(0, 0));

    // third pair sits in the second codebook and picks up the rotation
    const SpaceTimeCodeword rot = make_codeword(cb, 3, cd(1, 0), cd(-1, 0));
    const cd theta(std::cos(1.57), std::sin(1.57));
    CHECK(rot.matrix(1, 0).real() == doctest::Approx(theta.real()).epsilon(1e-12));
    CHECK(rot.matrix(1, 0).imag() == doctest::Approx(theta.imag()).epsilon(1e-12));
    CHECK(rot.matrix(2, 0).real() == doctest::Approx(-theta.real()).epsilon(1e-12));
    CHECK(rot.matrix(0, 0) == cd(0, 0));
    CHECK(rot.matrix(3, 0) == cd(0, 0));

    CHECK_THROWS_AS((void)make_codeword(cb, 5, cd(1, 0), cd(1, 0)), std::invalid_argument);
}

TEST_CASE("alamouti block is orthogonal for random symbols") {
    const StbcSmCodebook cb = build_stbc_sm_codebook(4, 8);
    RandomStream rs(77, 0, 0, StreamTag::payload_bits);
    for (int trial = 0; trial < 200; ++trial) {
        const int nz = 1 + static_cast<int>(rs.next_u64() % 4);
        const cd x1 = rand_psk(rs, 8);
        const cd x2 = rand_psk(rs, 8);
        const SpaceTimeCodeword cw = make_codeword(cb, nz, x1, x2);
        const auto [a, b] = cb.antenna_pairs[static_cast<size_t>(nz - 1)];
        CMat block(2, 2);
        block(0, 0) = cw.matrix(a - 1, 0);
        block(0, 1) = cw.matrix(a - 1, 1);
        block(1, 0) = cw.matrix(b - 1, 0);
        block(1, 1) = cw.matrix(b - 1, 1);
        const CMat gram = matmul(block, hermitian_transpose(block));
        const double s = std::norm(x1) + std::norm(x2);
        CHECK(std::abs(gram(0, 0) - s) < 1e-12);
        CHECK(std::abs(gram(1, 1) - s) < 1e-12);
        CHECK(std::abs(gram(0, 1)) < 1e-12);
        CHECK(std::abs(gram(1, 0)) < 1e-12);
        int nonzero_rows = 0;
        for (int r = 0; r < 4; ++r) {
            double rownorm = std::norm(cw.matrix(r, 0)) + std::norm(cw.matrix(r, 1));
            if (rownorm > 0) ++nonzero_rows;
        }
        CHECK(nonzero_rows == 2);
    }
}

TEST_CASE("cgd matches determinant and dense spectra") {
    const StbcSmCodebook cb = build_stbc_sm_codebook(4, 4);
    const SpaceTimeCodeword xa = make_codeword(cb, 1, cd(1, 0), cd(0, 1));
    CHECK(cgd(xa.matrix, xa.matrix) == 0.0);

    // same-pair difference: determinant of the 2x2 Gram is the oracle
    const SpaceTimeCodeword xb = make_codeword(cb, 1, cd(0, -1), cd(1, 0));
    const CMat d = xa.matrix - xb.matrix;
    const CMat g = matmul(hermitian_transpose(d), d);
    const double det = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real();
    CHECK(cgd(xa.matrix, xb.matrix) == doctest::Approx(det).epsilon(1e-10));

    // disjoint pairs, unit symbols
    const SpaceTimeCodeword xc = make_codeword(cb, 2, cd(1, 0), cd(1, 0));
    CHECK(cgd(xa.matrix, xc.matrix) ==
          doctest::Approx(dense_cgd_oracle(xa.matrix, xc.matrix)).epsilon(1e-10));

    RandomStream rs(31, 0, 0, StreamTag::payload_bits);
    for (int trial = 0; trial < 300; ++trial) {
        const int nza = 1 + static_cast<int>(rs.next_u64() % 4);
        const int nzb = 1 + static_cast<int>(rs.next_u64() % 4);
        const SpaceTimeCodeword wa = make_codeword(cb, nza, rand_psk(rs, 4), rand_psk(rs, 4));
        const SpaceTimeCodeword wb = make_codeword(cb, nzb, rand_psk(rs, 4), rand_psk(rs, 4));
        const double v = cgd(wa.matrix, wb.matrix);
        CHECK(v == doctest::Approx(dense_cgd_oracle(wa.matrix, wb.matrix)).epsilon(1e-9));
        CHECK(v == doctest::Approx(cgd(wb.matrix, wa.matrix)).epsilon(1e-12));
    }
}

TEST_CASE("cgd is invariant under a common unit-magnitude factor") {
    const StbcSmCodebook cb = build_stbc_sm_codebook(4, 4);
    const CMat xa = make_codeword(cb, 1, cd(1, 0), cd(0, 1)).matrix;
    const CMat xb = make_codeword(cb, 1, cd(0, 1), cd(1, 0)).matrix;
    const cd phase(std::cos(0.83), std::sin(0.83));
    CMat ya = xa, yb = xb;
    for (auto& v : ya.a) v *= phase;
    for (auto& v : yb.a) v *= phase;
    CHECK(cgd(ya, yb) == doctest::Approx(cgd(xa, xb)).epsilon(1e-12));
}

TEST_CASE("rotation scan dumps an inspectable csv") {
    const auto scan = rotation_scan(3, 2, 0.05);
    CHECK(scan.size() > 60);
    const auto path = std::filesystem::temp_directory_path() / "csim_rotation_scan.csv";
    write_rotation_scan_csv(scan, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "angle_rad,min_cgd");
    size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == scan.size());
}

TEST_CASE("rotation search recovers the published angles") {
    const double phi_bpsk = optimize_rotation(4, 2, 0.005);
    CHECK(std::abs(phi_bpsk - 1.57) < 0.05);
    const double phi_qpsk = optimize_rotation(4, 4, 0.005);
    CHECK(std::abs(phi_qpsk - 0.61) < 0.05);

    CHECK(optimize_rotation_over(4, 2, {0.0}) == 0.0);
    CHECK_THROWS_AS((void)optimize_rotation(4, 2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)min_cross_codebook_cgd(6, 2, 0.3), std::invalid_argument);
}

} // TEST_SUITE
