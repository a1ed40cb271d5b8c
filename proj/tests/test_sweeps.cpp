#include "daa/errors.hpp"
#include "daa/observables.hpp"
#include "daa/sweeps.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <set>
#include <thread>

namespace daa {
namespace {

bool bit_equal(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

ScanGrid small_frequency_grid() {
    ScanGrid g;
    g.axis1 = {axis::disorder, {2.0, 3.0}};
    g.axis2 = Axis{axis::frequency, {4.0, 9.0}};
    g.fixed.n_sites = 10;
    g.phases = uniform_phases(3);
    return g;
}

ScanSettings quick_settings(std::size_t threads = 1) {
    ScanSettings s;
    s.periods = 10;
    s.samples_per_period = 8;
    s.threads = threads;
    return s;
}

TEST(Phases, UniformAndSeeded) {
    const auto u = uniform_phases(20);
    ASSERT_EQ(u.size(), 20u);
    EXPECT_DOUBLE_EQ(u[0], 0.0);
    EXPECT_DOUBLE_EQ(u[5], std::numbers::pi / 2.0);
    const auto r1 = random_phases(8, 42);
    const auto r2 = random_phases(8, 42);
    const auto r3 = random_phases(8, 43);
    EXPECT_EQ(r1, r2);
    EXPECT_NE(r1, r3);
    for (double phi : r1) {
        EXPECT_GE(phi, 0.0);
        EXPECT_LT(phi, 2.0 * std::numbers::pi);
    }
    EXPECT_THROW(uniform_phases(0), InvalidParameter);
}

TEST(ScanGrid, Validation) {
    ScanGrid g = small_frequency_grid();
    EXPECT_NO_THROW(g.validate());
    g.axis1.values = {};
    EXPECT_THROW(g.validate(), InvalidParameter);
    g = small_frequency_grid();
    g.axis2->values = {9.0, 4.0};
    EXPECT_THROW(g.validate(), InvalidParameter);
    g = small_frequency_grid();
    g.phases = {2.0 * std::numbers::pi};
    EXPECT_THROW(g.validate(), InvalidParameter);
}

TEST(RunScan, ResultIndependentOfWorkerCount) {
    const ScanGrid g = small_frequency_grid();
    const ScanResult serial = frequency_disorder_scan(g, quick_settings(1));
    const ScanResult parallel = frequency_disorder_scan(g, quick_settings(3));
    ASSERT_EQ(serial.cells.size(), 4u);
    for (std::size_t c = 0; c < serial.cells.size(); ++c) {
        const CellResult& a = serial.cells[c];
        const CellResult& b = parallel.cells[c];
        EXPECT_FALSE(a.failed);
        EXPECT_EQ(a.n_phases, 3u);
        EXPECT_TRUE(bit_equal(a.mean_imbalance, b.mean_imbalance));
        EXPECT_TRUE(bit_equal(a.std_imbalance, b.std_imbalance));
        EXPECT_TRUE(bit_equal(a.mean_ipr, b.mean_ipr));
        EXPECT_TRUE(bit_equal(a.std_ipr, b.std_ipr));
        EXPECT_GE(a.mean_ipr, 1.0 / 10.0);
        EXPECT_LE(a.mean_ipr, 1.0);
        EXPECT_GE(a.mean_imbalance, -1.0);
        EXPECT_LE(a.mean_imbalance, 1.0);
    }
    // A = lambda, omega from the second axis, row-major layout.
    EXPECT_DOUBLE_EQ(serial.at(1, 0).params.disorder_strength, 3.0);
    EXPECT_DOUBLE_EQ(serial.at(1, 0).params.drive_amplitude, 3.0);
    EXPECT_DOUBLE_EQ(serial.at(1, 0).params.drive_angular_frequency, 4.0);
    EXPECT_EQ(serial.metadata.code_version, code_version());
    EXPECT_GE(serial.metadata.wall_seconds, 0.0);
}

TEST(RunScan, RatioAxisSetsFrequency) {
    ScanGrid g = small_frequency_grid();
    g.axis1.values = {3.0};
    g.axis2 = Axis{axis::disorder_over_frequency, {0.5}};
    g.phases = {0.0};
    const ScanResult r = frequency_disorder_scan(g, quick_settings());
    EXPECT_DOUBLE_EQ(r.at(0, 0).params.drive_angular_frequency, 6.0);
}

TEST(RunScan, FailedCellsAreRecordedNotFatal) {
    ScanGrid g;
    g.axis1 = {axis::disorder, {1.0, 2.0, 3.0}};
    g.fixed.n_sites = 10;
    g.phases = uniform_phases(2);
    std::set<std::size_t> reported;
    ScanSettings s = quick_settings();
    s.on_cell_complete = [&](std::size_t cell, const CellResult&) { reported.insert(cell); };
    const ScanResult r = run_scan(g, s, [](const ModelParams& base, double lambda, double) {
        ModelParams p = base;
        p.disorder_strength = lambda;
        if (lambda == 2.0) p.n_sites = 11; // no even/odd pattern
        if (lambda == 3.0) throw InvalidParameter("unsupported cell");
        return p;
    });
    EXPECT_EQ(r.failed_cells(), 2u);
    EXPECT_FALSE(r.at(0).failed);
    EXPECT_TRUE(r.at(1).failed);
    EXPECT_NE(r.at(1).failure.find("phase 0"), std::string::npos);
    EXPECT_TRUE(r.at(2).failed);
    EXPECT_EQ(r.at(2).failure, "unsupported cell");
    EXPECT_EQ(reported, (std::set<std::size_t>{0, 1, 2}));
}

TEST(RunScan, ScanDriversCheckAxes) {
    ScanGrid g = small_frequency_grid();
    EXPECT_THROW(amplitude_disorder_scan(g, quick_settings()), InvalidParameter);
    EXPECT_THROW(static_disorder_scan(g, quick_settings()), InvalidParameter);
    g.axis2 = Axis{axis::amplitude, {0.0, 1.0}};
    g.fixed.drive_angular_frequency = 5.0;
    g.axis1.values = {1.5, 3.0};
    EXPECT_THROW(amplitude_disorder_scan(g, quick_settings()), InvalidParameter);
    g.axis1.values = {2.0, 3.0};
    g.fixed.drive_angular_frequency = 0.0;
    EXPECT_THROW(amplitude_disorder_scan(g, quick_settings()), InvalidParameter);
}

TEST(EvaluateCell, UndrivenReferenceUsesSameWindow) {
    ModelParams p;
    p.disorder_strength = 3.0;
    p.drive_amplitude = 3.0;
    p.drive_angular_frequency = 20.0;
    ScanSettings s;
    s.undriven_reference = true;
    const CellSample sample = evaluate_cell(p, s);
    ModelParams off = p;
    off.drive_amplitude = 0.0;
    EXPECT_DOUBLE_EQ(sample.reference_imbalance, imbalance_trace(off, 100.0 * p.period(), 2001).time_average);
}

TEST(IprSizeScaling, SingleSizeGivesOneRow) {
    ModelParams cell;
    cell.disorder_strength = 1.0;
    const std::vector<std::size_t> sizes = {50};
    const auto rows = ipr_size_scaling(sizes, cell, uniform_phases(20));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n_sites, 50u);
    EXPECT_EQ(rows[0].n_phases, 20u);
    const std::vector<std::size_t> odd = {51};
    EXPECT_THROW(ipr_size_scaling(odd, cell, uniform_phases(2)), InvalidParameter);
}

TEST(IprSizeScaling, DelocalizedCellScalesInverselyWithSize) {
    ModelParams cell;
    cell.disorder_strength = 1.0;
    const std::vector<std::size_t> sizes = {50, 100};
    const auto rows = ipr_size_scaling(sizes, cell, uniform_phases(20));
    const double ratio = rows[1].mean_ipr / rows[0].mean_ipr;
    EXPECT_NEAR(ratio, 0.5, 0.15);
}

TEST(IprSizeScaling, LocalizedCellIsSizeIndependent) {
    ModelParams cell;
    cell.disorder_strength = 5.0;
    const std::vector<std::size_t> sizes = {50, 500};
    const auto rows = ipr_size_scaling(sizes, cell, uniform_phases(20));
    const double ratio = rows[1].mean_ipr / rows[0].mean_ipr;
    EXPECT_GE(ratio, 0.7);
    EXPECT_LE(ratio, 1.3);
}

TEST(PhaseAverage, StableWhenDoublingRealisations) {
    ScanGrid g;
    g.axis1 = {axis::disorder, {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}};
    g.phases = uniform_phases(20);
    ScanSettings s;
    const ScanResult r20 = static_disorder_scan(g, s);
    g.phases = uniform_phases(40);
    const ScanResult r40 = static_disorder_scan(g, s);

    ScanGrid d;
    d.axis1 = {axis::disorder, {2.0, 3.0}};
    d.axis2 = Axis{axis::frequency, {12.0, 20.0}};
    d.phases = uniform_phases(20);
    const ScanResult d20 = frequency_disorder_scan(d, s);
    d.phases = uniform_phases(40);
    const ScanResult d40 = frequency_disorder_scan(d, s);

    std::size_t stable = 0, total = 0;
    auto tally = [&](const ScanResult& a, const ScanResult& b) {
        for (std::size_t c = 0; c < a.cells.size(); ++c) {
            ++total;
            if (std::abs(b.cells[c].mean_imbalance - a.cells[c].mean_imbalance) <= a.cells[c].std_imbalance) ++stable;
        }
    };
    tally(r20, r40);
    tally(d20, d40);
    EXPECT_GE(static_cast<double>(stable), 0.9 * static_cast<double>(total)) << stable << " of " << total;
}

} // namespace
} // namespace daa
