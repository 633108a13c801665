#include "qcap/channel.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qcap/errors.hpp"

namespace qcap {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void check_unit_interval(double v, const char* field) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(field, "must lie in [0, 1], got " + num(v));
    }
}

using Matrix2c = Eigen::Matrix<cplx, 2, 2>;

// Lowering operator |0><1| on qubit `q` (0 = left factor), identity on the other.
Matrix4c lowering(int q) {
    Matrix2c sm = Matrix2c::Zero();
    sm(0, 1) = 1.0;
    const Matrix2c id = Matrix2c::Identity();
    Matrix4c out;
    if (q == 0) {
        out = Eigen::kroneckerProduct(sm, id);
    } else {
        out = Eigen::kroneckerProduct(id, sm);
    }
    return out;
}

// Superoperator of D[A, B] rho = A rho B^dag - 1/2 (B^dag A rho + rho B^dag A)
// under column stacking: vec(X Y Z) = (Z^T kron X) vec(Y).
Matrix16c dissipator(const Matrix4c& a, const Matrix4c& b) {
    const Matrix4c id = Matrix4c::Identity();
    const Matrix4c bda = b.adjoint() * a;
    Matrix16c d = Eigen::kroneckerProduct(b.conjugate(), a);
    d -= 0.5 * Matrix16c(Eigen::kroneckerProduct(id, bda));
    d -= 0.5 * Matrix16c(Eigen::kroneckerProduct(bda.transpose(), id));
    return d;
}

}  // namespace

void ChannelParams::validate() const {
    if (!(nu1 >= 0.0) || !std::isfinite(nu1)) {
        throw DomainError("nu1", "must be finite and >= 0, got " + num(nu1));
    }
    check_unit_interval(alpha, "alpha");
    check_unit_interval(zeta, "zeta");
    check_unit_interval(mu, "mu");
    if (!feasible()) {
        throw ConstraintError("zeta", "zeta^2 + mu^2 = " + num(zeta * zeta + mu * mu) +
                                          " exceeds 1 (rate matrix not positive semidefinite)");
    }
}

bool ChannelParams::feasible() const noexcept {
    return zeta * zeta + mu * mu <= 1.0 + kFeasibilityTol;
}

bool RateMatrices::is_psd(double tol) const {
    for (const Matrix2* m : {&r1, &r0}) {
        const Eigen::SelfAdjointEigenSolver<Matrix2> es(*m, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -tol * scale) return false;
    }
    return true;
}

double Liouvillian::trace_defect() const {
    // vec(I)^dagger G picks out d Tr(rho)/dt for every basis element.
    Vector16c id = Vector16c::Zero();
    for (int i = 0; i < kDim; ++i) id(i * kDim + i) = 1.0;
    return (id.adjoint() * generator).cwiseAbs().maxCoeff();
}

RateMatrices rates_from_params(const ChannelParams& p) {
    p.validate();
    const auto sector = [&](double nu) {
        Matrix2 r;
        r << nu * (1.0 + p.zeta) / 2.0, p.mu * nu / 2.0,
             p.mu * nu / 2.0,           nu * (1.0 - p.zeta) / 2.0;
        return r;
    };
    return {sector(p.nu1), sector(p.nu0())};
}

ChannelParams params_from_rates(const RateMatrices& r) {
    const double nu1 = r.r1(0, 0) + r.r1(1, 1);
    if (!(nu1 > 0.0)) {
        throw DomainError("nu1", "R1_11 + R1_22 must be > 0 to define the rate ratios");
    }
    const double nu0 = r.r0(0, 0) + r.r0(1, 1);
    ChannelParams p;
    p.nu1 = nu1;
    p.alpha = 1.0 - nu0 / nu1;
    p.zeta = std::abs(r.r1(0, 0) - r.r1(1, 1)) / nu1;
    p.mu = std::abs(r.r1(0, 1) + r.r1(1, 0)) / nu1;
    return p;
}

namespace detail {

Liouvillian build_generator(const RateMatrices& r) {
    const std::array<Matrix4c, 2> down = {lowering(0), lowering(1)};
    const std::array<Matrix4c, 2> up = {down[0].adjoint(), down[1].adjoint()};
    Liouvillian l;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            if (r.r1(j, k) != 0.0) l.generator += r.r1(j, k) * dissipator(down[j], down[k]);
            if (r.r0(j, k) != 0.0) l.generator += r.r0(j, k) * dissipator(up[j], up[k]);
        }
    }
    return l;
}

}  // namespace detail

Liouvillian build_liouvillian(const RateMatrices& r) {
    if (!r.r1.allFinite() || !r.r0.allFinite()) {
        throw DomainError("rates", "rate matrices have non-finite entries");
    }
    if (!r.is_psd()) {
        throw ConstraintError("rates", "rate matrices must be positive semidefinite");
    }
    return detail::build_generator(r);
}

Vector16c vectorize(const Matrix4c& m) {
    return Eigen::Map<const Vector16c>(m.data());
}

Matrix4c unvectorize(const Vector16c& v) {
    return Eigen::Map<const Matrix4c>(v.data());
}

Propagator::Propagator(const Liouvillian& l, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("t", "propagation time must be finite and >= 0, got " + num(t));
    }
    if (t == 0.0) {
        map_ = Matrix16c::Identity();
    } else {
        const Matrix16c gt = l.generator * t;
        map_ = gt.exp();
    }
}

Propagator Propagator::identity() {
    Propagator p;
    p.map_ = Matrix16c::Identity();
    return p;
}

Matrix4c Propagator::apply_raw(const Matrix4c& rho) const {
    return unvectorize(map_ * vectorize(rho));
}

DensityMatrix Propagator::apply(const DensityMatrix& rho) const {
    return DensityMatrix(apply_raw(rho.matrix()));
}

Propagator operator*(const Propagator& later, const Propagator& earlier) {
    Propagator p;
    p.map_ = later.map_ * earlier.map_;
    return p;
}

DensityMatrix propagate(const DensityMatrix& rho0, const Liouvillian& l, double t) {
    if (t == 0.0) return rho0;
    return Propagator(l, t).apply(rho0);
}

OutputStates apply_channel(const BasisParams& b, const ChannelParams& p, double t) {
    const BasisSet basis = make_basis(b);
    const Propagator prop(build_liouvillian(rates_from_params(p)), t);
    return {prop.apply(pure_to_density(basis[0])), prop.apply(pure_to_density(basis[1])),
            prop.apply(pure_to_density(basis[2])), prop.apply(pure_to_density(basis[3]))};
}

}  // namespace qcap
