#include "reoh/backend.hpp"
#include "reoh/io.hpp"
#include "reoh/params_io.hpp"
#include "reoh/platform_io.hpp"

#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace reoh;

TEST(Io, ParseNumbersWholeTokenOnly) {
    EXPECT_EQ(io::parse_double("1.81", "x"), 1.81);
    EXPECT_EQ(io::parse_int("-12", "x"), -12);
    EXPECT_THROW(io::parse_double("1.8x", "x"), ParseError);
    EXPECT_THROW(io::parse_double("", "x"), ParseError);
    EXPECT_THROW(io::parse_int("3.5", "x"), ParseError);
    EXPECT_EQ(io::parse_double_list("1, 2 3,4", "x"), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Io, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
        EXPECT_EQ(io::parse_double(io::format_double(v), "x"), v);
    }
    EXPECT_EQ(io::format_double(std::numeric_limits<double>::quiet_NaN()), "NA");
}

TEST(Io, SplitTrims) {
    EXPECT_EQ(io::split(" a , b,,c ", ','), (std::vector<std::string>{"a", "b", "", "c"}));
}

TEST(Csv, SkipsCommentsAndBlankLines) {
    TempDir tmp;
    const auto p = tmp.write("t.csv", "# comment\n\na,b\n1,2\n\n# more\n3,4\n");
    const auto t = io::read_csv(p);
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.line_numbers[0], 4u);
    EXPECT_EQ(t.line_numbers[1], 7u);
}

TEST(Csv, RaggedRowReportsLine) {
    TempDir tmp;
    const auto p = tmp.write("t.csv", "a,b\n1,2\n3\n");
    try {
        io::read_csv(p);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Csv, MissingFileOrHeader) {
    TempDir tmp;
    EXPECT_THROW(io::read_csv(tmp / "absent.csv"), ParseError);
    EXPECT_THROW(io::read_csv(tmp.write("e.csv", "# only a comment\n")), ParseError);
}

TEST(PlatformFile, RoundTrip) {
    TempDir tmp;
    for (const auto& s : {paper_system(), ci_system()}) {
        save_system(tmp / "p.ini", s);
        const auto back = load_system(tmp / "p.ini");
        ASSERT_EQ(back.platforms.size(), s.platforms.size());
        for (std::size_t i = 0; i < s.platforms.size(); ++i) {
            const auto& a = s.platforms[i];
            const auto& b = back.platforms[i];
            EXPECT_EQ(a.name, b.name);
            EXPECT_EQ(a.kind, b.kind);
            EXPECT_EQ(a.total_cores, b.total_cores);
            EXPECT_EQ(a.peak_gflops, b.peak_gflops);
            EXPECT_EQ(a.peak_bandwidth, b.peak_bandwidth);
            EXPECT_EQ(a.mem_controllers, b.mem_controllers);
            EXPECT_EQ(a.frequencies, b.frequencies);
            EXPECT_EQ(a.static_power, b.static_power);
            EXPECT_EQ(a.workgroup_sizes, b.workgroup_sizes);
        }
    }
}

TEST(PlatformFile, HandWritten) {
    TempDir tmp;
    const auto p = tmp.write("p.ini",
                             "; two platforms\n"
                             "[cpu0]\nkind = CPU\ntotal_cores = 8\npeak_gflops = 64\npeak_bandwidth = 25.6\n"
                             "mem_controllers = 1\nfrequencies = 1.0, 2.0\n"
                             "[gpu0]\nkind = GPU\ntotal_cores = 128\npeak_gflops = 256\npeak_bandwidth = 12.8\n"
                             "mem_controllers = 1\nfrequencies = 1.1\nworkgroup_sizes = 32 64\nstatic_power = 4\n");
    const auto s = load_system(p);
    EXPECT_EQ(s.platforms.size(), 2u);
    EXPECT_EQ(s.platforms[0].static_power, 0.0);
    EXPECT_EQ(s.platforms[1].workgroup_sizes, (std::vector<int>{32, 64}));
    EXPECT_EQ(enumerate_configs(s).size(), 8u * 2u + 2u);
}

TEST(PlatformFile, Errors) {
    TempDir tmp;
    EXPECT_THROW(load_system(tmp.write("a.ini", "[c]\nkind = CPU\ntotal_cores = 8\n")), ParseError);
    EXPECT_THROW(load_system(tmp.write("b.ini", "[c]\nkind = TPU\ntotal_cores = 8\npeak_gflops = 1\n"
                                                "peak_bandwidth = 1\nmem_controllers = 1\nfrequencies = 1\n")),
                 ParseError);
    EXPECT_THROW(load_system(tmp.write("c.ini", "[c]\nkind = CPU\ntotal_cores = 8\npeak_gflops = 1\n"
                                                "peak_bandwidth = 1\nmem_controllers = 1\nfrequencies = 2 1\n")),
                 ParseError);
    EXPECT_THROW(load_system(tmp.write("d.ini", "[c\nkind = CPU\n")), ParseError);
}

TEST(ParamsFile, RoundTripAndDefaults) {
    TempDir tmp;
    EstimatorParams p;
    p.latent_dim = 3;
    p.auto_latent_dim = true;
    p.latent_candidates = {2, 3, 4};
    p.tol = 1e-8;
    p.ridge = 0.0;
    p.log_time = false;
    p.unify.half_core_rounding = true;
    save_params(tmp / "p.ini", p);
    const auto q = load_params(tmp / "p.ini");
    EXPECT_EQ(q.latent_dim, 3);
    EXPECT_TRUE(q.auto_latent_dim);
    EXPECT_EQ(q.latent_candidates, (std::vector<int>{2, 3, 4}));
    EXPECT_EQ(q.tol, 1e-8);
    EXPECT_EQ(q.ridge, 0.0);
    EXPECT_FALSE(q.log_time);
    EXPECT_TRUE(q.unify.half_core_rounding);
    EXPECT_EQ(q.min_samples, 10u);

    const auto d = load_params(tmp.write("empty.ini", "[estimator]\n"));
    EXPECT_EQ(d.latent_dim, 5);
    EXPECT_EQ(d.max_iters, 500);
    EXPECT_EQ(d.tol, 1e-6);
    EXPECT_TRUE(d.log_time);
}

TEST(ParamsFile, RejectsInvalid) {
    TempDir tmp;
    EXPECT_THROW(load_params(tmp.write("a.ini", "[estimator]\nmin_samples = 9\n")), ParseError);
    EXPECT_THROW(load_params(tmp.write("b.ini", "[estimator]\nlog_time = maybe\n")), ParseError);
    EXPECT_THROW(load_params(tmp.write("c.ini", "[estimator]\npredictors = both\n")), ParseError);
    EXPECT_NO_THROW(load_params(tmp.write("d.ini", "[estimator]\npredictors = workgroup\nmin_samples = 3\n")));
}

TEST(ExecutableFile, RoundTrip) {
    TempDir tmp;
    ExecutableDescriptor d;
    d.name = "kmeans_1000_34";
    d.app_id = 12;
    d.commands["E5-2650Lv3"] = "./kmeans_omp -i 1000_34";
    d.commands["QuadroK620"] = "./kmeans_ocl -i 1000_34";
    d.workdir = "/opt/rodinia";
    d.env["OMP_PROC_BIND"] = "true";
    save_executable(tmp / "k.ini", d);
    const auto back = load_executable(tmp / "k.ini");
    EXPECT_EQ(back.name, d.name);
    EXPECT_EQ(back.app_id, 12);
    EXPECT_EQ(back.commands, d.commands);
    EXPECT_EQ(back.workdir, d.workdir);
    EXPECT_EQ(back.env, d.env);
}

TEST(ExecutableFile, NeedsACommand) {
    TempDir tmp;
    EXPECT_THROW(load_executable(tmp.write("e.ini", "[executable]\nname = x\n")), ParseError);
    ExecutableDescriptor d;
    EXPECT_THROW(d.validate(), InvalidArgument);
}
