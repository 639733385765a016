#include <doctest.h>

#include <cmath>

#include "csim/simharness.hpp"

using namespace csim;
using namespace csim::sim;

namespace {

ExperimentSpec make_spec(modem::Scheme s, int nt, int nr, int nc, int m,
                         std::vector<double> grid, long max_blocks = 2000,
                         uint64_t seed = 777) {
    int sf = 1;
    while ((1 << sf) < nc) ++sf;
    ExperimentSpec spec;
    spec.scheme = modem::SchemeConfig::make(s, nt, nr, nc, m, codebook::gen_cyclic_chirp(sf, 2, nc));
    spec.channel = {nr, nt, 0.0, 0.0};
    spec.snr_grid_db = std::move(grid);
    spec.max_blocks = max_blocks;
    spec.target_errors = 1000000; // effectively: run max_blocks
    spec.master_seed = seed;
    spec.detector = DetectorChoice::both;
    return spec;
}

} // namespace

TEST_SUITE("simharness") {

TEST_CASE("spec validation enforces the documented limits") {
    ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 2, 2, 2, 2, {0.0, 5.0});
    CHECK_NOTHROW(spec.validate());
    ExperimentSpec bad_grid = spec;
    bad_grid.snr_grid_db = {5.0, 5.0};
    CHECK_THROWS_AS(bad_grid.validate(), std::invalid_argument);
    ExperimentSpec few = spec;
    few.max_blocks = 10;
    CHECK_THROWS_AS(few.validate(), std::invalid_argument);
    ExperimentSpec loose = spec;
    loose.target_errors = 10;
    CHECK_THROWS_AS(loose.validate(), std::invalid_argument);
}

TEST_CASE("effectively noiseless points decode without error") {
    ExperimentSpec spec = make_spec(modem::Scheme::stbc_sm_cim, 4, 2, 2, 2, {400.0}, 1000);
    const PairedPoint p = run_point(spec, 0, DetectorChoice::both, 2);
    CHECK(p.ml.bit_errors == 0);
    CHECK(p.lc.bit_errors == 0);
    CHECK(p.ml.blocks == 1000);
    CHECK(p.ml.ber == 0.0);
}

TEST_CASE("identical seeds give bit-identical points for any worker count") {
    ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 4, 2, 4, 4, {3.0}, 3000);
    const PairedPoint a = run_point(spec, 0, DetectorChoice::both, 1);
    const PairedPoint b = run_point(spec, 0, DetectorChoice::both, 5);
    const PairedPoint c = run_point(spec, 0, DetectorChoice::both, 1);
    CHECK(a.ml.bit_errors == b.ml.bit_errors);
    CHECK(a.lc.bit_errors == b.lc.bit_errors);
    CHECK(a.ml.stream_digest == b.ml.stream_digest);
    CHECK(a.ml.bit_errors == c.ml.bit_errors);
    CHECK(a.lc.block_errors == b.lc.block_errors);
}

TEST_CASE("digest tracks every spec field") {
    const ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 4, 2, 4, 4, {3.0});
    ExperimentSpec seed_changed = spec;
    seed_changed.master_seed += 1;
    ExperimentSpec grid_changed = spec;
    grid_changed.snr_grid_db = {3.5};
    ExperimentSpec blocks_changed = spec;
    blocks_changed.max_blocks += 1;
    CHECK(spec.digest() != seed_changed.digest());
    CHECK(spec.digest() != grid_changed.digest());
    CHECK(spec.digest() != blocks_changed.digest());
    CHECK(spec.digest() == make_spec(modem::Scheme::sm_cim, 4, 2, 4, 4, {3.0}).digest());
}

TEST_CASE("early stop halts on the error target at chunk granularity") {
    ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 4, 2, 4, 4, {0.0}, 200000);
    spec.target_errors = 200;
    spec.detector = DetectorChoice::lc;
    const PairedPoint p = run_point(spec, 0, DetectorChoice::lc, 2);
    CHECK(p.lc.bit_errors >= 200);
    CHECK(p.lc.blocks < 200000);
    CHECK(p.lc.blocks % 4096 == 0);
    // worker count must not affect where the stop lands
    const PairedPoint q = run_point(spec, 0, DetectorChoice::lc, 7);
    CHECK(q.lc.blocks == p.lc.blocks);
    CHECK(q.lc.bit_errors == p.lc.bit_errors);
}

TEST_CASE("sweep covers every grid point and attaches the analytic overlay") {
    ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 4, 2, 4, 4, {0.0, 6.0, 30.0}, 1000);
    spec.detector = DetectorChoice::lc;
    const SweepResult sweep = run_sweep(spec, 2);
    REQUIRE(sweep.lc.has_value());
    CHECK(!sweep.ml.has_value());
    REQUIRE(sweep.lc->points.size() == 3);
    CHECK(sweep.lc->has_analytic);
    REQUIRE(sweep.lc->analytic_pb.size() == 3);
    CHECK(sweep.lc->points[2].bit_errors == 0); // zero-error point still present
    for (double pb : sweep.lc->analytic_pb) {
        CHECK(pb >= 0.0);
        CHECK(pb <= 0.5);
    }
    // overlay declines politely when the hypothesis space is capped
    ExperimentSpec big = make_spec(modem::Scheme::estbc_sm_cim, 4, 2, 4, 4, {3.0}, 1000);
    big.detector = DetectorChoice::lc;
    const SweepResult sweep2 = run_sweep(big, 2);
    CHECK(!sweep2.lc->has_analytic);
    CHECK(sweep2.lc->points.size() == 1);
}

TEST_CASE("no overlay under correlation or csi error") {
    ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 4, 2, 4, 4, {3.0}, 1000);
    spec.detector = DetectorChoice::lc;
    spec.channel.corr_r = 0.5;
    CHECK(!run_sweep(spec, 2).lc->has_analytic);
}

TEST_CASE("paired comparison shares realizations and ml dominates lc") {
    const struct {
        modem::Scheme scheme;
        int nt, nr, nc, m;
        double snr;
    } cases[] = {
        {modem::Scheme::sm_cim, 2, 2, 2, 2, 2.0},
        {modem::Scheme::stbc_sm_cim, 4, 2, 4, 4, 2.0},
        {modem::Scheme::estbc_sm_cim, 3, 2, 3, 2, 2.0},
    };
    for (const auto& c : cases) {
        ExperimentSpec spec = make_spec(c.scheme, c.nt, c.nr, c.nc, c.m, {c.snr}, 10000);
        const DetectorComparison cmp = compare_detectors(spec, 2);
        REQUIRE(cmp.ml.points.size() == 1);
        CHECK(cmp.ml.points[0].stream_digest == cmp.lc.points[0].stream_digest);
        const long long ml_err = cmp.ml.points[0].block_errors;
        const long long lc_err = cmp.lc.points[0].block_errors;
        // one-sided slack at the 99% level for the paired difference
        const double slack = 2.33 * std::sqrt(static_cast<double>(ml_err + lc_err));
        CHECK(static_cast<double>(ml_err) <= static_cast<double>(lc_err) + slack);
    }

    ExperimentSpec wrong = make_spec(modem::Scheme::sm_cim, 2, 2, 2, 2, {2.0}, 10000);
    wrong.detector = DetectorChoice::lc;
    CHECK_THROWS_AS((void)compare_detectors(wrong, 1), std::invalid_argument);
}

TEST_CASE("simulated ber is monotone in snr up to confidence slack") {
    ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 4, 4, 4, 4, {0.0, 4.0, 8.0, 12.0}, 5000);
    spec.detector = DetectorChoice::lc;
    const SweepResult sweep = run_sweep(spec, 2);
    const auto& pts = sweep.lc->points;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double slack = 2.0 * (pts[i].ci95_halfwidth + pts[i + 1].ci95_halfwidth);
        CHECK(pts[i + 1].ber <= pts[i].ber + slack);
    }
}

TEST_CASE("simulation tracks the analytic curve near its 1e-3 crossing") {
    ExperimentSpec spec = make_spec(modem::Scheme::sm_cim, 2, 4, 2, 2, {10.5}, 100000, 606);
    spec.detector = DetectorChoice::lc;
    double snr_star = -1.0, pb_star = 0.0;
    for (double snr = 0.0; snr <= 20.0; snr += 0.5) {
        const double pb = analysis::abep(spec.scheme, snr).pb_total;
        if (pb < 1e-3) {
            snr_star = snr;
            pb_star = pb;
            break;
        }
    }
    REQUIRE(snr_star > 0.0);
    spec.snr_grid_db = {snr_star};
    const BerPoint p = run_point(spec, 0, DetectorChoice::lc, 2).lc;
    CHECK(p.ber <= 3.0 * pb_star);
    CHECK(p.ber >= pb_star / 3.0);
    CHECK(p.ber <= pb_star); // the analytic value is an upper bound
}

TEST_CASE("log-linear interpolation recovers synthetic gaps") {
    BerCurve a, b;
    for (int i = 0; i <= 6; ++i) {
        BerPoint p;
        p.snr_db = 2.0 * i;
        p.ber = std::pow(10.0, -0.4 * i) * 0.3;
        a.points.push_back(p);
        p.snr_db += 3.0; // same curve shifted right by exactly 3 dB
        b.points.push_back(p);
    }
    CHECK(gap_db_at_ber(a, b, 1e-2) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(gap_db_at_ber(a, a, 1e-2) == doctest::Approx(0.0));
    CHECK_THROWS(snr_at_ber(a, 1e-9)); // not bracketed
}

} // TEST_SUITE
