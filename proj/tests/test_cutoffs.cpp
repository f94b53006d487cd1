#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wavegraph/cutoffs.hpp"

using namespace wavegraph;

namespace {

constexpr double fd_step = 1e-5;
constexpr double fd_tol = 1e-6;

template <class F>
void check_derivatives(F&& f, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pick(lo, hi);
    for (int k = 0; k < 1000; ++k) {
        const double r = pick(rng);
        const Jet j = f(r);
        const Jet up = f(r + fd_step), down = f(r - fd_step);
        EXPECT_NEAR(j.d1, (up.value - down.value) / (2 * fd_step), fd_tol) << "r=" << r;
        EXPECT_NEAR(j.d2, (up.d1 - down.d1) / (2 * fd_step), fd_tol) << "r=" << r;
        EXPECT_LE(j.d1, 1e-12) << "r=" << r;
    }
}

} // namespace

TEST(Smoothstep, Values) {
    EXPECT_EQ(smoothstep(0.0), 0.0);
    EXPECT_EQ(smoothstep(1.0), 1.0);
    EXPECT_DOUBLE_EQ(smoothstep(0.5), 0.5);
    EXPECT_DOUBLE_EQ(smoothstep_d1(0.5), 1.875);
    EXPECT_EQ(smoothstep(-3.0), 0.0);
    EXPECT_EQ(smoothstep(7.0), 1.0);
    for (double t : {0.0, 1.0}) {
        EXPECT_NEAR(smoothstep_d1(t), 0.0, 1e-15);
        EXPECT_NEAR(smoothstep_d2(t), 0.0, 1e-15);
    }
}

TEST(Phi, Values) {
    EXPECT_EQ(phi(0.7).value, 1.0);
    EXPECT_EQ(phi(2.3).value, 0.0);
    EXPECT_DOUBLE_EQ(phi(1.5).value, 0.5);
    EXPECT_NEAR(phi(1.0).d1, 0.0, 1e-12);
    EXPECT_NEAR(phi(2.0).d1, 0.0, 1e-12);
    // C^2 junctions: one-sided limits agree.
    for (double r : {1.0, 2.0}) {
        EXPECT_NEAR(phi(r - 1e-9).value, phi(r + 1e-9).value, 1e-12);
        EXPECT_NEAR(phi(r - 1e-9).d1, phi(r + 1e-9).d1, 1e-12);
        EXPECT_NEAR(phi(r - 1e-9).d2, phi(r + 1e-9).d2, 1e-7);
    }
}

TEST(Psi, Values) {
    EXPECT_EQ(psi(0.0, 1.0, 1.0).value, 1.0);
    EXPECT_EQ(psi(-1.0, 1.0, 1.0).value, 1.0);
    EXPECT_NEAR(psi(3.0, 0.5, 1.0).value, 0.22313016014842982, 1e-15);
    EXPECT_NEAR(psi(1.5, 1.0, 1.0).value, 0.4723665527410147, 1e-15);
    EXPECT_NEAR(psi(2.0, 2.0, 0.0).value, std::exp(-4.0), 1e-15);
    EXPECT_THROW(psi(-1.5, 1.0, 1.0), Error);
    EXPECT_THROW(psi(0.0, 0.0, 1.0), Error);
    for (double r : {-1.0, 0.0, 1.0, 1.3, 2.0, 5.0, 40.0}) EXPECT_GT(psi(r, 2.0, 1.0).value, 0.0);
}

TEST(Profiles, FiniteDifferences) {
    check_derivatives([](double r) { return phi(r); }, 0.0, 3.0, 1);
    check_derivatives([](double r) { return eta(r); }, 0.0, 3.0, 2);
    for (double delta : {0.25, 1.0, 3.0})
        check_derivatives([delta](double r) { return psi(r, delta, 1.0); }, -1.0 + 2 * fd_step, 4.0, 3);
}

TEST(Regions, IntervalExamples) {
    const auto E = SpaceTimeRegion::E(10.0, 2.0, 2.0);
    const auto iv = E.time_interval(0.0);
    ASSERT_TRUE(iv);
    EXPECT_DOUBLE_EQ(iv->lo, 10.0);
    EXPECT_DOUBLE_EQ(iv->hi, std::sqrt(200.0));
    EXPECT_FALSE(E.time_interval(15.0));

    const auto F = SpaceTimeRegion::F(10.0, 2.0, 2.0);
    EXPECT_TRUE(F.contains(0.0, 5.0));
    EXPECT_FALSE(F.contains(0.0, 4.99));

    const auto Q = SpaceTimeRegion::Q(4.0, 1.0);
    EXPECT_TRUE(Q.contains(123.0, 6.0));
    EXPECT_FALSE(Q.contains(0.0, 3.9));
    EXPECT_DOUBLE_EQ(Q.time_interval(50.0)->lo, 4.0);
    EXPECT_DOUBLE_EQ(Q.time_interval(50.0)->hi, 8.0);
}

TEST(Regions, EInsideF) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double R : {1.0, 3.0, 10.0})
        for (double th1 : {2.0, 3.0})
            for (double th2 : {2.0, 2.5, 4.0}) {
                const auto E = SpaceTimeRegion::E(R, th1, th2);
                const auto F = SpaceTimeRegion::F(R, th1, th2);
                for (int k = 0; k < 2000; ++k) {
                    const double d = 5.0 * R * u(rng), t = 5.0 * R * u(rng);
                    if (E.contains(d, t)) {
                        EXPECT_TRUE(F.contains(d, t)) << d << ' ' << t;
                    }
                }
            }
}

TEST(Regions, IntervalMatchesMembership) {
    for (double th2 : {2.0, 3.0}) {
        for (auto reg : {SpaceTimeRegion::E(6.0, 2.0, th2), SpaceTimeRegion::F(6.0, 2.0, th2)}) {
            for (double d = 0.0; d <= 30.0; d += 0.37) {
                const auto iv = reg.time_interval(d);
                for (double t = 0.0; t <= 40.0; t += 0.01) {
                    const bool inside = iv && t >= iv->lo && t <= iv->hi;
                    // Grid points within rounding of an endpoint may go either way.
                    if (iv && (std::abs(t - iv->lo) < 1e-9 || std::abs(t - iv->hi) < 1e-9)) continue;
                    EXPECT_EQ(inside, reg.contains(d, t)) << "d=" << d << " t=" << t;
                }
            }
        }
    }
}

TEST(TestFunctions, Sec3Examples) {
    const auto tf = TestFunction::sec3({2.0, 2.0, 10.0, 1.0});
    const auto j = tf.at(0.0, 5.0);
    EXPECT_EQ(j.value, 1.0);
    EXPECT_EQ(j.dt, 0.0);
    EXPECT_EQ(j.dtt, 0.0);
    for (double d : {0.0, 3.0, 9.0, 12.0, 14.0, 20.0}) EXPECT_EQ(tf.at(d, 0.0).dt, 0.0);
    EXPECT_EQ(tf.at(0.0, std::sqrt(200.0) + 1e-9).value, 0.0);
    EXPECT_DOUBLE_EQ(tf.time_support(), std::sqrt(200.0));
    EXPECT_THROW(tf.at(0.0, -1.0), Error);
}

TEST(TestFunctions, Sec4Examples) {
    const auto tf = TestFunction::sec4({2.0, 4.0, 1.0, 1.0, 1.0});
    const auto j = tf.at(0.0, 1.0);
    EXPECT_EQ(j.value, 1.0);
    EXPECT_EQ(j.dt, 0.0);
    EXPECT_DOUBLE_EQ(tf.time_support(), 8.0);
    EXPECT_EQ(tf.at(3.0, 8.0).value, 0.0);
    EXPECT_GT(tf.at(100.0, 1.0).value, 0.0);
}

TEST(TestFunctions, ParameterChecks) {
    EXPECT_THROW(TestFunction::sec3({1.5, 2.0, 1.0, 1.0}), Error);
    EXPECT_THROW(TestFunction::sec3({2.0, 2.0, 0.0, 1.0}), Error);
    EXPECT_THROW(TestFunction::sec3({2.0, 2.0, 1.0, 0.5}), Error);
    EXPECT_THROW(TestFunction::sec4({3.0, 1.0, 1.5, 1.0, 1.0}), Error);
    EXPECT_THROW(TestFunction::sec4({3.0, 1.0, 1.0, 0.0, 1.0}), Error);
}

TEST(TestFunctions, TimeDerivativesMatchFiniteDifferences) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const TestFunction fns[] = {TestFunction::sec3({2.0, 2.0, 3.0, 1.0}), TestFunction::sec3({2.0, 3.0, 2.0, 4.0}),
                                TestFunction::sec4({6.0, 2.0, 1.0, 1.0, 1.0}), TestFunction::sec4({3.5, 3.0, 0.5, 2.0, 1.0})};
    for (const auto& tf : fns) {
        for (int k = 0; k < 1000; ++k) {
            const double d = 8.0 * u(rng), t = fd_step + 1.2 * tf.time_support() * u(rng);
            const auto j = tf.at(d, t);
            const auto up = tf.at(d, t + fd_step), down = tf.at(d, t - fd_step);
            EXPECT_NEAR(j.dt, (up.value - down.value) / (2 * fd_step), fd_tol);
            EXPECT_NEAR(j.dtt, (up.dt - down.dt) / (2 * fd_step), fd_tol);
            EXPECT_GE(j.value, 0.0);
            EXPECT_LE(j.value, 1.0);
        }
    }
}

TEST(TestFunctions, GraphBinding) {
    const auto g = generate_lattice(2, 10);
    const auto m = PseudoMetric::lattice_l2();
    const auto x0 = lattice_origin(g);
    const auto tf = TestFunction::sec3({2.0, 2.0, 4.0, 2.0});
    const GraphTestFunction gtf(tf, g, m, x0);
    const int pt[] = {3, 1};
    const VertexId x = lattice_vertex(g, pt);
    const auto a = gtf.at(x, 2.5);
    const auto b = testfun_eval(tf, g, m, x0, x, 2.5);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.dt, b.dt);

    VertexFunction vals(g.vertex_count());
    gtf.values(2.5, vals);
    const auto lap = laplacian_apply(g, vals);
    EXPECT_NEAR(gtf.laplacian(x, 2.5), lap[x], 1e-15);
}

TEST(TestFunctions, ConvexityOfPowers) {
    const auto g = generate_lattice(2, 14);
    const auto m = PseudoMetric::lattice_l2();
    const auto x0 = lattice_origin(g);
    for (double s : {1.0, 2.0, 3.5, 6.0}) {
        const GraphTestFunction base(TestFunction::sec3({2.0, 2.0, 5.0, 1.0}), g, m, x0);
        const GraphTestFunction power(TestFunction::sec3({2.0, 2.0, 5.0, s}), g, m, x0);
        for (double t = 0.0; t <= 7.5; t += 0.25) {
            for (VertexId x = 0; x < g.vertex_count(); ++x) {
                const double phi_x = base.at(x, t).value;
                const double lhs = -power.laplacian(x, t);
                const double rhs = -s * std::pow(phi_x, s - 1.0) * base.laplacian(x, t);
                EXPECT_LE(lhs, rhs + 1e-10) << "s=" << s << " t=" << t << " x=" << x;
            }
        }
    }
}

TEST(DefaultPower, SmallestAdmissible) {
    for (double p : {1.2, 2.0, 3.0})
        for (double q : {1.1, 2.0, 5.0}) {
            const int s = default_power(p, q);
            EXPECT_GT(p * (q * (s - 2.0) - 2.0), s);
            EXPECT_FALSE(p * (q * (s - 3.0) - 2.0) > s - 1.0);
        }
    EXPECT_EQ(default_power(2.0, 2.0), 5);
    EXPECT_THROW(default_power(1.0, 2.0), Error);
}

TEST(LemmaSec3, OutsideRegionVanishes) {
    const auto g = generate_lattice(2, 70);
    const auto r = verify_lemma_sec3(g, PseudoMetric::lattice_l2(), lattice_origin(g), 2.0, 2.0, 1.0, 16.0);
    EXPECT_LE(r.outside_lap, 1e-10);
    EXPECT_LE(r.outside_violation, 1e-10);
    EXPECT_GT(r.C_lap, 0.0);
    EXPECT_GT(r.C_dt, 0.0);
    EXPECT_GT(r.C_dtt, 0.0);
    EXPECT_GE(r.C_lap_abs, r.C_lap);
    EXPECT_GE(r.time_samples, 16u * 32u);
}

TEST(LemmaSec3, SingleVertex) {
    GraphBuilder b;
    b.add_vertex(1.0);
    const auto g = std::move(b).build();
    const auto r = verify_lemma_sec3(g, PseudoMetric::graph_distance(), 0, 2.0, 2.0, 1.0, 3.0);
    EXPECT_EQ(r.C_lap, 0.0);
    EXPECT_EQ(r.C_lap_abs, 0.0);
}

TEST(LemmaSec3, TruncationTooSmall) {
    const auto g = generate_lattice(2, 20);
    try {
        verify_lemma_sec3(g, PseudoMetric::lattice_l2(), lattice_origin(g), 2.0, 2.0, 1.0, 16.0);
        FAIL() << "expected truncation error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::truncation_too_small);
    }
    EXPECT_THROW(verify_lemma_sec3(g, PseudoMetric::lattice_l2(), lattice_origin(g), 2.0, 4.0, 1.0, 2.0), Error);
}

TEST(LemmaSec4, SupportOnZ1) {
    const auto g = generate_lattice(1, 80);
    const auto r = verify_lemma_sec4(g, PseudoMetric::lattice_l2(), lattice_origin(g), 6.0, 1.0, 1.0, 16.0);
    EXPECT_TRUE(r.support_check);
    EXPECT_TRUE(r.time_support_ok);
    EXPECT_TRUE(r.plateau_laplacian_ok);
    EXPECT_TRUE(r.initial_velocity_ok);
    EXPECT_GT(r.C_dt, 0.0);
    EXPECT_GT(r.C_dtt, 0.0);
    EXPECT_GT(r.C_lap, 0.0);
    EXPECT_THROW(verify_lemma_sec4(g, PseudoMetric::lattice_l2(), lattice_origin(g), 2.0, 1.0, 1.0, 16.0), Error);
    EXPECT_THROW(verify_lemma_sec4(g, PseudoMetric::lattice_l2(), lattice_origin(g), 6.0, 1.0, 1.0, 40.0), Error);
}
