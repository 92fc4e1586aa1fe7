#include "reoh/platform.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace reoh;

namespace {

PlatformSpec cpu(std::vector<double> freqs, int cores = 4, int mem = 2) {
    PlatformSpec p;
    p.name = "cpu";
    p.kind = PlatformKind::CPU;
    p.total_cores = cores;
    p.peak_gflops = 100.0;
    p.peak_bandwidth = 50.0;
    p.mem_controllers = mem;
    p.frequencies = std::move(freqs);
    return p;
}

PlatformSpec gpu(std::vector<double> freqs, std::vector<int> wg = {1, 2, 4}) {
    PlatformSpec p;
    p.name = "gpu";
    p.kind = PlatformKind::GPU;
    p.total_cores = 64;
    p.peak_gflops = 320.0;
    p.peak_bandwidth = 40.0;
    p.mem_controllers = 1;
    p.frequencies = std::move(freqs);
    p.workgroup_sizes = std::move(wg);
    return p;
}

const PlatformSpec& e5() {
    static const System s = paper_system();
    return s.platforms[0];
}

const PlatformSpec& k620() {
    static const System s = paper_system();
    return s.platforms[1];
}

} // namespace

TEST(PerCoreFlops, PaperPlatforms) {
    EXPECT_DOUBLE_EQ(per_core_flops(e5()), 4.8);
    EXPECT_NEAR(per_core_flops(k620()), 2.2395833333, 1e-9);
}

TEST(PerCoreFlops, PeakEqualToCoresGivesOne) {
    auto p = cpu({1.0}, 16);
    p.peak_gflops = 16.0;
    EXPECT_DOUBLE_EQ(per_core_flops(p), 1.0);
}

TEST(EquivCores, GpuCoreIsAboutHalfACpuCore) {
    EXPECT_NEAR(equiv_cores(k620(), e5(), 1.0), 0.46666, 1e-4);
    EXPECT_NEAR(equiv_cores(k620(), e5(), 1.0), 0.467, 0.005);
}

TEST(EquivCores, LinearInCount) {
    const double one = equiv_cores(k620(), e5(), 1.0);
    EXPECT_NEAR(equiv_cores(k620(), e5(), 384.0), 179.2, 0.05);  // published value is rounded
    EXPECT_NEAR(equiv_cores(k620(), e5(), 384.0), 384.0 * one, 1e-9);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 100.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), n = u(rng);
        EXPECT_NEAR(equiv_cores(k620(), e5(), a * n), a * equiv_cores(k620(), e5(), n), 1e-9 * a * n);
        EXPECT_NEAR(equiv_mem(k620(), e5(), a * n), a * equiv_mem(k620(), e5(), n), 1e-9 * a * n);
    }
}

TEST(EquivCores, IdentityAndReciprocity) {
    for (double n : {0.5, 1.0, 7.0, 384.0}) {
        EXPECT_EQ(equiv_cores(e5(), e5(), n), n);
        EXPECT_EQ(equiv_mem(k620(), k620(), n), n);
        const double there = equiv_cores(e5(), k620(), n);
        EXPECT_NEAR(equiv_cores(k620(), e5(), there), n, 1e-9 * n);
        EXPECT_NEAR(equiv_mem(k620(), e5(), equiv_mem(e5(), k620(), n)), n, 1e-9 * n);
    }
}

TEST(EquivMem, BandwidthPerController) {
    EXPECT_NEAR(equiv_mem(k620(), e5(), 1.0), 28.8 / 68.0, 1e-12);
    EXPECT_NEAR(equiv_mem(k620(), e5(), 1.0), 0.424, 0.005);
    EXPECT_NEAR(equiv_mem(k620(), e5(), 2.0), 0.847058823, 1e-8);
}

TEST(FrequencyIndex, PaperInterleaving) {
    const auto fidx = build_frequency_index(paper_system());
    ASSERT_EQ(fidx.entries.size(), 9u);
    const std::vector<double> cpu_f{1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.81};
    const std::vector<std::size_t> cpu_idx{0, 1, 2, 3, 4, 5, 7, 8};
    for (std::size_t k = 0; k < cpu_f.size(); ++k) EXPECT_EQ(fidx.lookup(0, cpu_f[k]), cpu_idx[k]) << cpu_f[k];
    EXPECT_EQ(fidx.lookup(1, 1.73), 6u);
    EXPECT_FALSE(fidx.lookup(1, 1.8).has_value());
}

TEST(FrequencyIndex, SortOracle) {
    System s{{cpu({1.0, 2.0}), gpu({1.5})}};
    const auto fidx = build_frequency_index(s);
    EXPECT_EQ(fidx.lookup(0, 1.0), 0u);
    EXPECT_EQ(fidx.lookup(1, 1.5), 1u);
    EXPECT_EQ(fidx.lookup(0, 2.0), 2u);
}

TEST(FrequencyIndex, SinglePlatformIsContiguous) {
    System s{{cpu({0.8, 1.1, 1.9, 2.4, 3.0})}};
    const auto fidx = build_frequency_index(s);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(fidx.entries[k].index, k);
}

TEST(FrequencyIndex, TieGoesToReferencePlatform) {
    // GPU declared first; the CPU is still the reference and wins the tie.
    auto g = gpu({1.5});
    System s{{g, cpu({1.5, 2.0})}};
    const auto fidx = build_frequency_index(s);
    EXPECT_EQ(fidx.lookup(1, 1.5), 0u);
    EXPECT_EQ(fidx.lookup(0, 1.5), 1u);
}

TEST(FrequencyIndex, PermutationWithNonDecreasingFrequency) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 3.5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a, b;
        for (int k = 0; k < 6; ++k) a.push_back(u(rng));
        for (int k = 0; k < 3; ++k) b.push_back(u(rng));
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        System s{{cpu(a), gpu(b)}};
        const auto fidx = build_frequency_index(s);
        ASSERT_EQ(fidx.entries.size(), 9u);
        std::set<std::size_t> seen;
        for (std::size_t k = 0; k < fidx.entries.size(); ++k) {
            EXPECT_EQ(fidx.entries[k].index, k);
            seen.insert(fidx.entries[k].index);
            if (k > 0) { EXPECT_LE(fidx.entries[k - 1].freq_ghz, fidx.entries[k].freq_ghz); }
        }
        EXPECT_EQ(seen.size(), 9u);
    }
}

TEST(FrequencyIndex, EmptySystemRejected) {
    EXPECT_THROW(build_frequency_index(System{}), InvalidArgument);
}

TEST(Unify, CpuIsIdentity) {
    const auto s = paper_system();
    const auto fidx = build_frequency_index(s);
    const auto u = unify(NativeConfig{0, 12, 0, 1.2, 2}, s, fidx);
    EXPECT_EQ(u.equiv_cores, 12.0);
    EXPECT_EQ(u.freq_index, 0u);
    EXPECT_EQ(u.equiv_mem, 2.0);
}

TEST(Unify, GpuWorkgroups) {
    const auto s = paper_system();
    const auto fidx = build_frequency_index(s);
    const auto w2 = unify(NativeConfig{1, 0, 2, 1.73, 2}, s, fidx);
    EXPECT_NEAR(w2.equiv_cores, 2.0 * 860.0 / 384.0 / 4.8, 1e-12);
    EXPECT_EQ(w2.freq_index, 6u);
    EXPECT_NEAR(w2.equiv_mem, 0.847, 0.001);

    UnifyOptions half;
    half.half_core_rounding = true;
    EXPECT_DOUBLE_EQ(unify(NativeConfig{1, 0, 2, 1.73, 2}, s, fidx, half).equiv_cores, 1.0);
    EXPECT_NEAR(unify(NativeConfig{1, 0, 2, 1.73, 2}, s, fidx, half).equiv_mem, 0.847, 0.001);

    const auto w1 = unify(NativeConfig{1, 0, 1, 1.73, 2}, s, fidx);
    EXPECT_EQ(w1.equiv_cores, kMinEquivCores);
    EXPECT_EQ(w1.freq_index, 6u);
}

TEST(Unify, GpuCoresMonotoneInWorkgroup) {
    const auto s = paper_system();
    const auto fidx = build_frequency_index(s);
    double prev = 0.0;
    for (int w : s.platforms[1].workgroup_sizes) {
        const auto u = unify(NativeConfig{1, 0, w, 1.73, 2}, s, fidx);
        EXPECT_GE(u.equiv_cores, prev);
        EXPECT_GT(u.equiv_mem, 0.0);
        prev = u.equiv_cores;
    }
}

TEST(Unify, UnknownFrequencyRejected) {
    const auto s = paper_system();
    const auto fidx = build_frequency_index(s);
    EXPECT_THROW(unify(NativeConfig{0, 4, 0, 1.25, 1}, s, fidx), InvalidArgument);
}

TEST(ValidateConfig, Ranges) {
    const auto s = paper_system();
    EXPECT_NO_THROW(validate_config(NativeConfig{0, 1, 0, 1.2, 1}, s));
    EXPECT_THROW(validate_config(NativeConfig{0, 0, 0, 1.2, 1}, s), InvalidArgument);
    EXPECT_THROW(validate_config(NativeConfig{0, 25, 0, 1.2, 1}, s), InvalidArgument);
    EXPECT_THROW(validate_config(NativeConfig{0, 4, 0, 1.2, 3}, s), InvalidArgument);
    EXPECT_THROW(validate_config(NativeConfig{1, 0, 3, 1.73, 0}, s), InvalidArgument);
    EXPECT_THROW(validate_config(NativeConfig{2, 1, 0, 1.2, 1}, s), InvalidArgument);
}

TEST(Enumerate, PaperCensus) {
    const auto s = paper_system();
    const auto all = enumerate_configs(s);
    EXPECT_EQ(all.size(), 393u);
    EXPECT_EQ(native_settings(s, 0).size(), 384u);
    EXPECT_EQ(native_settings(s, 1).size(), 9u);
    EXPECT_EQ(std::count_if(all.begin(), all.end(), [](const auto& c) { return c.platform == 0; }), 384);
}

TEST(Enumerate, DeterministicOrderWithoutDuplicates) {
    const auto s = paper_system();
    const auto all = enumerate_configs(s);
    std::set<std::string> ids;
    for (const auto& c : all) ids.insert(config_id(c, s));
    EXPECT_EQ(ids.size(), all.size());
    // Platform first, then cores, frequency, memory.
    EXPECT_EQ(config_id(all[0], s), "E5-2650Lv3:c1:f1.2:m1");
    EXPECT_EQ(config_id(all[1], s), "E5-2650Lv3:c1:f1.2:m2");
    EXPECT_EQ(config_id(all[2], s), "E5-2650Lv3:c1:f1.3:m1");
    EXPECT_EQ(config_id(all[16], s), "E5-2650Lv3:c2:f1.2:m1");
    EXPECT_EQ(config_id(all[383], s), "E5-2650Lv3:c24:f1.81:m2");
    EXPECT_EQ(config_id(all[384], s), "QuadroK620:w1:f1.73");
    EXPECT_EQ(config_id(all[392], s), "QuadroK620:w256:f1.73");
}

TEST(Enumerate, SinglePointPlatform) {
    System s{{cpu({1.0}, 1, 1)}};
    EXPECT_EQ(enumerate_configs(s).size(), 1u);
}

TEST(Enumerate, LengthIsSumOfSettingProducts) {
    System s{{cpu({1.0, 1.5, 2.0}, 6, 3), gpu({0.9, 1.2}, {8, 16, 32, 64})}};
    EXPECT_EQ(enumerate_configs(s).size(), 6u * 3u * 3u + 4u * 2u);
}

TEST(ConfigId, RoundTripsEveryConfiguration) {
    for (const auto& s : {paper_system(), ci_system()})
        for (const auto& c : enumerate_configs(s)) EXPECT_EQ(parse_config_id(config_id(c, s), s), c);
}

TEST(ConfigId, Malformed) {
    const auto s = paper_system();
    for (const char* bad : {"", "nope:c1:f1.2:m1", "E5-2650Lv3:c1:f1.2", "E5-2650Lv3:x1:f1.2:m1",
                            "E5-2650Lv3:c1:f1.25:m1", "QuadroK620:w3:f1.73", "E5-2650Lv3:c1z:f1.2:m1"})
        EXPECT_THROW(parse_config_id(bad, s), InvalidArgument) << bad;
}

TEST(PlatformSpec, Invariants) {
    auto p = cpu({1.0, 2.0});
    EXPECT_NO_THROW(p.validate());
    p.frequencies = {2.0, 1.0};
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = cpu({1.0});
    p.total_cores = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = cpu({1.0});
    p.mem_controllers = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    auto g = gpu({1.0});
    g.workgroup_sizes.clear();
    EXPECT_THROW(g.validate(), InvalidArgument);
    System only_gpu{{gpu({1.0})}};
    EXPECT_THROW(only_gpu.validate(), InvalidArgument);
}
