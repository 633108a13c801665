#include "qcap/qcore.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "qcap/errors.hpp"

namespace qcap {

namespace {

Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m) {
    // Only the lower triangle is read, so feed the Hermitian part explicitly.
    const Matrix4c h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

DensityMatrix::DensityMatrix() : m_(Matrix4c::Identity() * 0.25) {}

DensityMatrix::DensityMatrix(const Matrix4c& m) : m_(m) {
    if (!m.allFinite()) {
        throw DomainError("rho", "density matrix has non-finite entries");
    }
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
        throw DomainError("rho", "not Hermitian (max |rho - rho^dagger| = " + fmt_double(herm) + ")");
    }
    const cplx tr = m.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw DomainError("rho", "trace " + fmt_double(tr.real()) + " differs from 1");
    }
    const double lmin = hermitian_eigenvalues(m).minCoeff();
    if (lmin < -kPsdTol) {
        throw DomainError("rho", "not positive semidefinite (smallest eigenvalue " +
                                     fmt_double(lmin) + ")");
    }
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

Eigen::Vector4d DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(m_); }

PureState::PureState(const Vector4c& amplitudes) : a_(amplitudes) {
    const double n = a_.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTol) {
        throw DomainError("psi", "state vector norm " + fmt_double(n) + " is not 1");
    }
}

void BasisParams::validate() const {
    if (!(m_phi >= 0.0 && m_phi <= 1.0)) {
        throw DomainError("m_phi", "must lie in [0, 1], got " + fmt_double(m_phi));
    }
    if (!(m_psi >= 0.0 && m_psi <= 1.0)) {
        throw DomainError("m_psi", "must lie in [0, 1], got " + fmt_double(m_psi));
    }
}

BasisSet make_basis(const BasisParams& params) {
    params.validate();
    const double mf = params.m_phi;
    const double mp = params.m_psi;
    const double nf = 1.0 / std::sqrt(1.0 + mf * mf);
    const double np = 1.0 / std::sqrt(1.0 + mp * mp);

    Vector4c v1, v2, v3, v4;
    v1 << nf, 0.0, 0.0, nf * mf;
    v2 << nf * mf, 0.0, 0.0, -nf;
    v3 << 0.0, np, np * mp, 0.0;
    v4 << 0.0, np * mp, -np, 0.0;
    return {PureState(v1), PureState(v2), PureState(v3), PureState(v4)};
}

DensityMatrix pure_to_density(const PureState& psi) {
    const Vector4c& a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint());
}

namespace detail {

double entropy_bits(const Matrix4c& rho) {
    const Eigen::Vector4d ev = hermitian_eigenvalues(rho);
    double s = 0.0;
    for (int i = 0; i < kDim; ++i) {
        const double l = ev(i);
        if (l > kEigenFloor) s -= l * std::log2(l);
    }
    return s;
}

}  // namespace detail

double von_neumann_entropy(const DensityMatrix& rho) {
    // DensityMatrix construction already rejected non-PSD input.
    return detail::entropy_bits(rho.matrix());
}

void validate_probabilities(std::span<const double, 4> p, const char* field) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw DomainError(field, "probabilities must be finite and non-negative");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw DomainError(field, "probabilities sum to " + fmt_double(sum) + ", not 1");
    }
}

Ensemble::Ensemble(const Probabilities& p, const OutputStates& states)
    : p_(p), states_(states) {
    validate_probabilities(p_);
}

DensityMatrix Ensemble::average() const {
    Matrix4c avg = Matrix4c::Zero();
    for (int x = 0; x < kDim; ++x) avg += p_[x] * states_[x].matrix();
    return DensityMatrix(avg);
}

double holevo_chi(const Ensemble& ensemble) {
    double chi = von_neumann_entropy(ensemble.average());
    for (int x = 0; x < kDim; ++x) {
        const double px = ensemble.probabilities()[x];
        if (px > 0.0) chi -= px * von_neumann_entropy(ensemble.states()[x]);
    }
    return chi < 0.0 ? 0.0 : chi;
}

}  // namespace qcap
