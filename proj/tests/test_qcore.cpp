#include <catch_amalgamated.hpp>

#include <cmath>

#include "qcap/errors.hpp"
#include "qcap/qcore.hpp"
#include "test_support.hpp"

using namespace qcap;
using Catch::Approx;

namespace {

Vector4c ket(cplx a, cplx b, cplx c, cplx d) {
    Vector4c v;
    v << a, b, c, d;
    return v;
}

DensityMatrix diag(double a, double b, double c, double d) {
    Matrix4c m = Matrix4c::Zero();
    m.diagonal() << a, b, c, d;
    return DensityMatrix(m);
}

}  // namespace

TEST_CASE("make_basis gives the Bell states at m = 1", "[qcore]") {
    const BasisSet s = make_basis(BasisParams::bell());
    const double h = 1.0 / std::sqrt(2.0);
    CHECK((s[0].amplitudes() - ket(h, 0, 0, h)).norm() < 1e-15);
    CHECK((s[1].amplitudes() - ket(h, 0, 0, -h)).norm() < 1e-15);
    CHECK((s[2].amplitudes() - ket(0, h, h, 0)).norm() < 1e-15);
    CHECK((s[3].amplitudes() - ket(0, h, -h, 0)).norm() < 1e-15);
}

TEST_CASE("make_basis gives signed product states at m = 0", "[qcore]") {
    const BasisSet s = make_basis(BasisParams::factorized());
    CHECK((s[0].amplitudes() - ket(1, 0, 0, 0)).norm() == 0.0);
    CHECK((s[1].amplitudes() - ket(0, 0, 0, -1)).norm() == 0.0);
    CHECK((s[2].amplitudes() - ket(0, 1, 0, 0)).norm() == 0.0);
    CHECK((s[3].amplitudes() - ket(0, 0, -1, 0)).norm() == 0.0);
}

TEST_CASE("make_basis normalizes partially entangled states", "[qcore]") {
    const BasisSet s = make_basis({0.5, 0.0});
    const double n = 1.0 / std::sqrt(1.25);
    CHECK((s[0].amplitudes() - ket(n, 0, 0, 0.5 * n)).norm() < 1e-15);
    CHECK((s[1].amplitudes() - ket(0.5 * n, 0, 0, -n)).norm() < 1e-15);
    CHECK((s[2].amplitudes() - ket(0, 1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("make_basis is orthonormal on a 0.1 grid", "[qcore][property]") {
    for (int i = 0; i <= 10; ++i) {
        for (int j = 0; j <= 10; ++j) {
            const BasisSet s = make_basis({i / 10.0, j / 10.0});
            Matrix4c v;
            for (int x = 0; x < 4; ++x) v.col(x) = s[x].amplitudes();
            const Matrix4c gram = v.adjoint() * v;
            REQUIRE(testing::max_abs(gram - Matrix4c::Identity()) <= 1e-12);
        }
    }
}

TEST_CASE("make_basis rejects out-of-range parameters", "[qcore]") {
    CHECK_THROWS_AS(make_basis({-0.1, 0.0}), DomainError);
    CHECK_THROWS_AS(make_basis({0.0, 1.5}), DomainError);
    CHECK_THROWS_AS(make_basis({std::nan(""), 0.0}), DomainError);
}

TEST_CASE("pure_to_density builds projectors", "[qcore]") {
    const DensityMatrix r00 = pure_to_density(PureState(ket(1, 0, 0, 0)));
    CHECK(testing::max_abs(r00.matrix() - diag(1, 0, 0, 0).matrix()) == 0.0);

    const DensityMatrix bell = pure_to_density(make_basis(BasisParams::bell())[0]);
    for (int i : {0, 3}) {
        for (int j : {0, 3}) CHECK(std::abs(bell(i, j) - 0.5) < 1e-15);
    }
    CHECK(std::abs(bell(1, 1)) == 0.0);

    const DensityMatrix r3 = pure_to_density(make_basis({0.0, 0.5})[2]);
    CHECK(std::abs(r3.purity() - 1.0) <= 1e-12);
}

TEST_CASE("DensityMatrix validates its invariants", "[qcore]") {
    Matrix4c m = Matrix4c::Identity() * 0.25;
    m(0, 1) = 1e-3;  // breaks Hermiticity
    CHECK_THROWS_AS(DensityMatrix(m), DomainError);

    Matrix4c trace2 = Matrix4c::Identity() * 0.5;
    CHECK_THROWS_AS(DensityMatrix(trace2), DomainError);

    Matrix4c neg = Matrix4c::Zero();
    neg.diagonal() << 1.2, -0.2, 0.0, 0.0;
    CHECK_THROWS_AS(DensityMatrix(neg), DomainError);

    CHECK_THROWS_AS(PureState(ket(1, 1, 0, 0)), DomainError);
}

TEST_CASE("von_neumann_entropy reference values", "[qcore]") {
    CHECK(von_neumann_entropy(pure_to_density(make_basis({0.3, 0.7})[1])) == Approx(0.0).margin(1e-12));
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed()) == Approx(2.0).epsilon(1e-14));
    CHECK(von_neumann_entropy(diag(0.5, 0.5, 0, 0)) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("von_neumann_entropy is concave", "[qcore][property]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix4c a = testing::random_density(rng);
        const Matrix4c b = testing::random_density(rng);
        for (double l : {0.25, 0.5, 0.75}) {
            const double mixed = von_neumann_entropy(DensityMatrix(l * a + (1 - l) * b));
            const double split = l * von_neumann_entropy(DensityMatrix(a)) +
                                 (1 - l) * von_neumann_entropy(DensityMatrix(b));
            REQUIRE(mixed >= split - 1e-10);
        }
    }
}

TEST_CASE("holevo_chi reference values", "[qcore]") {
    const BasisSet s = make_basis({0.4, 0.9});
    const OutputStates pure = {pure_to_density(s[0]), pure_to_density(s[1]), pure_to_density(s[2]),
                               pure_to_density(s[3])};
    CHECK(holevo_chi(Ensemble({0.25, 0.25, 0.25, 0.25}, pure)) == Approx(2.0).epsilon(1e-12));
    CHECK(holevo_chi(Ensemble({0.5, 0.5, 0.0, 0.0}, pure)) == Approx(1.0).epsilon(1e-12));

    const DensityMatrix r = diag(0.1, 0.2, 0.3, 0.4);
    CHECK(holevo_chi(Ensemble({0.1, 0.2, 0.3, 0.4}, {r, r, r, r})) == Approx(0.0).margin(1e-12));
}

TEST_CASE("holevo_chi rejects invalid ensembles", "[qcore]") {
    const OutputStates mixed = {DensityMatrix(), DensityMatrix(), DensityMatrix(), DensityMatrix()};
    CHECK_THROWS_AS(Ensemble({0.5, 0.5, 0.5, 0.0}, mixed), DomainError);
    CHECK_THROWS_AS(Ensemble({1.2, -0.2, 0.0, 0.0}, mixed), DomainError);
}

TEST_CASE("holevo_chi is invariant under relabeling", "[qcore][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Probabilities p = {u(rng), u(rng), u(rng), u(rng)};
        const double s = p[0] + p[1] + p[2] + p[3];
        for (double& x : p) x /= s;
        const OutputStates st = {DensityMatrix(testing::random_density(rng)), DensityMatrix(testing::random_density(rng)),
                                 DensityMatrix(testing::random_density(rng)), DensityMatrix(testing::random_density(rng))};
        const double base = holevo_chi(Ensemble(p, st));
        const Probabilities q = {p[2], p[0], p[3], p[1]};
        const OutputStates sq = {st[2], st[0], st[3], st[1]};
        REQUIRE(holevo_chi(Ensemble(q, sq)) == Approx(base).margin(1e-12));
        REQUIRE(base >= 0.0);
        REQUIRE(base <= 2.0);
    }
}

TEST_CASE("holevo_chi vanishes only for identical support states", "[qcore][property]") {
    std::mt19937_64 rng(3);
    const Matrix4c a = testing::random_density(rng);
    const Matrix4c b = testing::random_density(rng);
    const DensityMatrix ra(a), rb(b);
    // Zero-probability states do not count.
    CHECK(holevo_chi(Ensemble({0.5, 0.5, 0.0, 0.0}, {ra, ra, rb, rb})) == Approx(0.0).margin(1e-12));
    CHECK(holevo_chi(Ensemble({0.5, 0.0, 0.5, 0.0}, {ra, ra, rb, rb})) > 1e-6);
    const DensityMatrix close(0.999 * a + 0.001 * b);
    CHECK(holevo_chi(Ensemble({0.5, 0.5, 0.0, 0.0}, {ra, close, rb, rb})) > 0.0);
}
