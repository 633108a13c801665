#include <catch_amalgamated.hpp>

#include <cmath>

#include "qcap/errors.hpp"
#include "qcap/pulse.hpp"
#include "test_support.hpp"

using namespace qcap;
using Catch::Approx;

namespace {

CorrelationFn exponential(double t_c, double scale = 1.0) {
    CorrelationFn c;
    c.kind = CorrelationKind::exponential;
    c.t_c = t_c;
    c.scale = scale;
    return c;
}

CorrelationFn delta(double gamma, double t_c) {
    CorrelationFn c;
    c.kind = CorrelationKind::delta_approx;
    c.t_c = t_c;
    c.scale = gamma;
    return c;
}

// 2 Re int_0^t exp(-(t - t1)/t_c) exp(i w (t - t1)) dt1 for a flat unit pulse.
double flat_exponential_rate(double t, double t_c, double w) {
    const cplx k(1.0 / t_c, -w);
    return 2.0 * ((1.0 - std::exp(-k * t)) / k).real();
}

std::vector<double> uniform_grid(double end, int n) {
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = end * i / n;
    return g;
}

}  // namespace

TEST_CASE("zero envelope gives zero rates", "[pulse]") {
    const PulsePair silent = {PulseSpec::silent(), PulseSpec::silent()};
    for (double t : {0.0, 0.5, 3.0}) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) CHECK(compute_rate(j, k, silent, exponential(1.0), t) == 0.0);
        }
    }
}

TEST_CASE("flat pulse under a narrow kernel gives the golden-rule rate", "[pulse]") {
    const double gamma = 0.8;
    const PulsePair flat = {PulseSpec::flat(0.0, 10.0), PulseSpec::flat(0.0, 10.0)};
    for (double t : {0.5, 2.0, 7.0}) {
        CHECK(compute_rate(0, 0, flat, delta(gamma, 0.01), t) == Approx(gamma).epsilon(1e-2));
        CHECK(compute_rate(0, 0, flat, delta(gamma, 0.01), t) == Approx(gamma).epsilon(1e-8));
    }
}

TEST_CASE("rates match the closed form for a flat pulse and exponential kernel", "[pulse]") {
    for (double w : {0.0, 0.5, 50.0}) {
        const PulsePair flat = {PulseSpec::flat(0.0, 10.0, 1.0, 0.0, w), PulseSpec::flat(0.0, 10.0, 1.0, 0.0, w)};
        for (double t : {0.3, 2.0, 5.0}) {
            const double exact = flat_exponential_rate(t, 1.0, w);
            CHECK(compute_rate(0, 0, flat, exponential(1.0), t) == Approx(exact).epsilon(1e-6).margin(1e-12));
        }
    }
}

TEST_CASE("well separated pulses have no memory", "[pulse]") {
    const PulsePair pulses = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(1.0, 5.0, 1.0, 0.0, 0.0, 20.0)};
    const CorrelationFn corr = exponential(0.5);
    for (double t = 3.0; t <= 7.0; t += 0.5) {
        const double r11 = compute_rate(0, 0, pulses, corr, t);
        REQUIRE(r11 > 0.0);
        REQUIRE(std::abs(compute_rate(0, 1, pulses, corr, t)) <= 1e-3 * r11);
    }
    for (double t = 23.0; t <= 27.0; t += 0.5) {
        REQUIRE(std::abs(compute_rate(1, 0, pulses, corr, t)) <= 1e-3 * compute_rate(1, 1, pulses, corr, t));
    }
}

TEST_CASE("rates are real, bilinear and covariant under relabeling", "[pulse][property]") {
    const PulsePair pulses = {PulseSpec::gaussian(1.0, 5.0, 1.0, 0.3, 0.2),
                              PulseSpec::gaussian(0.7, 5.0, 0.8, -0.2, 0.5, 1.0)};
    const PulsePair swapped = {pulses[1], pulses[0]};
    const CorrelationFn corr = exponential(0.8);

    const PulsePair real_pulses = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(0.7, 5.0, 0.8)};
    for (double t : {3.0, 5.0, 6.5}) {
        CHECK(std::abs(rate_integral(0, 0, real_pulses, corr, t).imag()) <= 1e-10);
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                const double r = compute_rate(j, k, pulses, corr, t);
                CHECK(compute_rate(1 - j, 1 - k, swapped, corr, t) == Approx(r).margin(1e-12));
            }
        }
    }

    const double c = 1.7;
    PulsePair scaled = {PulseSpec::gaussian(1.0, 5.0, c, 0.3, 0.2), PulseSpec::gaussian(0.7, 5.0, 0.8 * c, -0.2, 0.5, 1.0)};
    for (double t : {4.0, 6.0}) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                CHECK(compute_rate(j, k, scaled, corr, t) ==
                      Approx(c * c * compute_rate(j, k, pulses, corr, t)).epsilon(1e-9).margin(1e-14));
            }
        }
    }
}

TEST_CASE("compute_rate input checks", "[pulse]") {
    const PulsePair pulses = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(1.0, 5.0)};
    CHECK_THROWS_AS(compute_rate(2, 0, pulses, exponential(1.0), 1.0), DomainError);
    CHECK_THROWS_AS(compute_rate(0, 0, pulses, exponential(1.0), -1.0), DomainError);
    CHECK_THROWS_AS(compute_rate(0, 0, pulses, exponential(0.0), 1.0), DomainError);

    PulsePair broken = pulses;
    broken[1].envelope = [](double) { return std::nan(""); };
    try {
        compute_rate(0, 1, broken, exponential(1.0), 5.0);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("t1 =") != std::string::npos);
    }
}

TEST_CASE("rate_trajectory symmetry and asymmetry", "[pulse]") {
    const auto grid = uniform_grid(10.0, 20);
    const CorrelationFn corr = exponential(1.0);

    const PulsePair twins = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(1.0, 5.0)};
    const RateTrajectory same = rate_trajectory(twins, corr, grid);
    for (const Matrix2& r : same.raw) {
        CHECK(r(0, 0) == Approx(r(1, 1)).margin(1e-14));
        CHECK(r(0, 1) == Approx(r(1, 0)).margin(1e-14));
    }

    const PulsePair shapes = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(0.5, 5.0)};
    const RateTrajectory diff = rate_trajectory(shapes, corr, grid);
    CHECK(std::abs(diff.raw[10](0, 0) - diff.raw[10](1, 1)) > 1e-3);

    const PulsePair lonely = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::silent()};
    const RateTrajectory single = rate_trajectory(lonely, corr, grid);
    for (const Matrix2& r : single.raw) {
        CHECK(r(0, 1) == 0.0);
        CHECK(r(1, 0) == 0.0);
    }

    CHECK_THROWS_AS(rate_trajectory(twins, corr, {0.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("effective_params from pulse shapes", "[pulse]") {
    const auto grid = uniform_grid(10.0, 100);
    CorrelationFn corr = exponential(2.0);
    corr.bias = 0.25;

    const PulsePair twins = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(1.0, 5.0)};
    const EffectiveParams co = effective_params(rate_trajectory(twins, corr, grid), 10.0);
    CHECK(co.params.mu == Approx(1.0).epsilon(1e-9));
    CHECK(co.params.zeta == Approx(0.0).margin(1e-12));
    CHECK(co.params.alpha == Approx(0.75).epsilon(1e-12));

    const auto long_grid = uniform_grid(40.0, 200);
    const PulsePair apart = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(1.0, 5.0, 1.0, 0.0, 0.0, 25.0)};
    const EffectiveParams sep = effective_params(rate_trajectory(apart, exponential(0.5), long_grid), 40.0);
    CHECK(sep.params.mu < 1e-3);

    const PulsePair louder = {PulseSpec::gaussian(1.0, 5.0), PulseSpec::gaussian(1.0, 5.0, 2.0)};
    const EffectiveParams asym = effective_params(rate_trajectory(louder, corr, grid), 10.0);
    CHECK(asym.params.zeta > 0.5);
    CHECK(asym.params.zeta * asym.params.zeta + asym.params.mu * asym.params.mu <= 1.0 + 1e-12);

    const PulsePair silent = {PulseSpec::silent(), PulseSpec::silent()};
    CHECK_THROWS_AS(effective_params(rate_trajectory(silent, corr, grid), 10.0), DomainError);
    CHECK_THROWS_AS(effective_params(rate_trajectory(twins, corr, grid), 11.0), DomainError);
}

TEST_CASE("effective_params inverts a constant trajectory", "[pulse][property]") {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 20; ++i) {
        const ChannelParams p = testing::random_channel(rng);
        const RateTrajectory traj = RateTrajectory::constant(uniform_grid(3.0, 7), rates_from_params(p));
        const ChannelParams q = effective_params(traj, 2.2).params;
        REQUIRE(q.nu1 == Approx(p.nu1).epsilon(1e-9));
        REQUIRE(q.alpha == Approx(p.alpha).margin(1e-9));
        REQUIRE(q.zeta == Approx(p.zeta).margin(1e-9));
        REQUIRE(q.mu == Approx(p.mu).margin(1e-9));
    }
}

TEST_CASE("propagate_with_trajectory consistency", "[pulse]") {
    std::mt19937_64 rng(59);
    const DensityMatrix rho(testing::random_density(rng));
    const RateMatrices r = rates_from_params({0.9, 0.3, 0.5, 0.6});
    const TrajectoryPropagation c = propagate_with_trajectory(rho, RateTrajectory::constant(uniform_grid(2.0, 10), r));
    const DensityMatrix direct = propagate(rho, build_liouvillian(r), 2.0);
    CHECK(testing::max_abs(c.state.matrix() - direct.matrix()) <= 1e-10);
    CHECK_FALSE(c.non_psd_rates);

    const TrajectoryPropagation z = propagate_with_trajectory(rho, RateTrajectory::constant(uniform_grid(2.0, 10), {}));
    CHECK(testing::max_abs(z.state.matrix() - rho.matrix()) <= 1e-15);
}

TEST_CASE("Markov-limit trajectory reproduces the constant-rate channel", "[pulse]") {
    const double gamma = 1.0;
    const CorrelationFn corr = delta(gamma, 1e-3);  // sigma = 1e-5
    const PulsePair flat = {PulseSpec::flat(0.0, 5.0), PulseSpec::flat(0.0, 5.0)};
    std::vector<double> grid = {0.0, 2e-5, 5e-5, 1e-4};
    for (int i = 1; i <= 50; ++i) grid.push_back(0.02 * i);
    const RateTrajectory traj = rate_trajectory(flat, corr, grid);
    CHECK(traj.raw.back()(0, 0) == Approx(gamma).epsilon(1e-6));

    const DensityMatrix rho = pure_to_density(make_basis({0.6, 0.3})[1]);
    const TrajectoryPropagation out = propagate_with_trajectory(rho, traj);
    const RateMatrices markov{Matrix2::Constant(gamma), Matrix2::Constant(gamma)};
    const DensityMatrix expected = propagate(rho, build_liouvillian(markov), 1.0);
    CHECK(testing::max_abs(out.state.matrix() - expected.matrix()) <= 1e-4);
}

TEST_CASE("non-PSD instantaneous rates are flagged", "[pulse]") {
    RateTrajectory traj;
    traj.times = {0.0, 0.1, 0.2};
    Matrix2 bad;
    bad << 0.5, 0.8, 0.8, 0.5;
    const Matrix2 good = Matrix2::Identity();
    traj.r_matrices = {{good, Matrix2::Zero()}, {bad, Matrix2::Zero()}, {good, Matrix2::Zero()}};
    traj.raw = {good, bad, good};
    const TrajectoryPropagation out = propagate_with_trajectory(DensityMatrix(), traj);
    CHECK(out.non_psd_rates);
}
