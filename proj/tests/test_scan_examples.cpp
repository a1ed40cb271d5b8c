// Reference operating points of the scan drivers at production settings
// (N = 50, 20 phases, 100 periods). Several minutes on one core.

#include "daa/sweeps.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <iostream>
#include <thread>

namespace daa {
namespace {

ScanSettings production() {
    ScanSettings s;
    s.threads = std::max(1u, std::thread::hardware_concurrency());
    s.undriven_reference = true;
    return s;
}

ScanResult strong_drive(const std::vector<double>& omegas) {
    ScanGrid g;
    g.axis1 = {axis::disorder, {3.0}};
    g.axis2 = Axis{axis::frequency, omegas};
    g.phases = uniform_phases(20);
    return frequency_disorder_scan(g, production());
}

ScanResult slow_drive(const std::vector<double>& amplitudes) {
    ScanGrid g;
    g.axis1 = {axis::disorder, {4.0}};
    g.axis2 = Axis{axis::amplitude, amplitudes};
    g.fixed.drive_angular_frequency = 2.0 * std::numbers::pi * 0.005;
    g.phases = uniform_phases(20);
    return amplitude_disorder_scan(g, production());
}

TEST(FrequencyScan, FastDriveRecoversUndrivenImbalance) {
    const ScanResult r = strong_drive({18.0, 30.0});
    for (const CellResult& c : r.cells) {
        ASSERT_FALSE(c.failed) << c.failure;
        std::cout << "omega=" << c.params.drive_angular_frequency << " I=" << c.mean_imbalance
                  << " I0=" << c.reference_imbalance << '\n';
        EXPECT_NEAR(c.normalized_imbalance(), 1.0, 0.15);
    }
}

TEST(FrequencyScan, SlowDriveDelocalizes) {
    const ScanResult r = strong_drive({0.1, 0.2});
    for (const CellResult& c : r.cells) {
        ASSERT_FALSE(c.failed) << c.failure;
        std::cout << "omega=" << c.params.drive_angular_frequency << " I=" << c.mean_imbalance
                  << " ipr*N=" << c.mean_ipr * 50.0 << '\n';
        EXPECT_LE(c.mean_imbalance, 0.05);
        EXPECT_LE(c.mean_ipr, 3.0 / 50.0);
    }
}

TEST(FrequencyScan, IprIncreasesAcrossTheFrontier) {
    const ScanResult r = strong_drive({0.5, 6.0, 18.0});
    std::cout << "mean IPR at omega 0.5, 6, 18: " << r.at(0, 0).mean_ipr << ' ' << r.at(0, 1).mean_ipr << ' '
              << r.at(0, 2).mean_ipr << '\n';
    EXPECT_LT(r.at(0, 0).mean_ipr, r.at(0, 1).mean_ipr);
    EXPECT_LT(r.at(0, 1).mean_ipr, r.at(0, 2).mean_ipr);
}

TEST(AmplitudeScan, BelowAndAboveCriticalAmplitude) {
    const ScanResult r = slow_drive({0.5, 3.5});
    const CellResult& below = r.at(0, 0);
    const CellResult& above = r.at(0, 1);
    ASSERT_FALSE(below.failed) << below.failure;
    ASSERT_FALSE(above.failed) << above.failure;
    std::cout << "A=0.5: I=" << below.mean_imbalance << " ipr*N=" << below.mean_ipr * 50.0 << "; A=3.5: I="
              << above.mean_imbalance << '\n';
    EXPECT_GT(below.mean_imbalance, 0.1);
    EXPECT_GT(below.mean_ipr, 5.0 / 50.0);
    EXPECT_LE(above.mean_imbalance, 0.05);
}

} // namespace
} // namespace daa
