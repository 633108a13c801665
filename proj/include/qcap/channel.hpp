#pragma once

// Noisy two-qubit channel: decoherence parameters, the rate matrices they
// imply, the Lindblad generator built from those rates, and propagation.

#include <Eigen/Dense>

#include "qcap/qcore.hpp"

namespace qcap {

/// Decoherence parameters of the channel.
///   nu1   magnitude of the decay sector, R1_11 + R1_22 (1/time)
///   alpha state bias, 1 - nu0/nu1
///   zeta  asymmetry, |R1_11 - R1_22| / nu1
///   mu    memory (cross-decoherence), |R1_12 + R1_21| / nu1
/// Feasible iff zeta^2 + mu^2 <= 1.
struct ChannelParams {
    double nu1 = 1.0;
    double alpha = 0.0;
    double zeta = 0.0;
    double mu = 0.0;

    double nu0() const { return (1.0 - alpha) * nu1; }

    /// Range checks throw DomainError; zeta^2 + mu^2 > 1 throws ConstraintError.
    void validate() const;
    bool feasible() const noexcept;
};

inline constexpr double kFeasibilityTol = 1e-12;

using Matrix2 = Eigen::Matrix2d;

/// Symmetric 2x2 rate matrices: r1 drives |1> -> |0> jumps, r0 drives |0> -> |1>.
struct RateMatrices {
    Matrix2 r1 = Matrix2::Zero();
    Matrix2 r0 = Matrix2::Zero();

    bool is_psd(double tol = 1e-12) const;
};

using Matrix16c = Eigen::Matrix<cplx, 16, 16>;
using Vector16c = Eigen::Matrix<cplx, 16, 1>;

/// Generator acting on column-stacked density matrices: d vec(rho)/dt = G vec(rho).
struct Liouvillian {
    Matrix16c generator = Matrix16c::Zero();

    /// max |vec(I)^dagger G|, zero for a trace-preserving generator.
    double trace_defect() const;
};

/// R1_11 = nu1 (1 + zeta)/2, R1_22 = nu1 (1 - zeta)/2, R1_12 = R1_21 = mu nu1 / 2;
/// r0 has the same shape scaled by nu0 = (1 - alpha) nu1.
RateMatrices rates_from_params(const ChannelParams& p);

/// Inverse of rates_from_params. Throws DomainError if nu1 = R1_11 + R1_22 <= 0.
ChannelParams params_from_rates(const RateMatrices& r);

/// sum_jk R1_jk D[s-_j, s-_k] + sum_jk R0_jk D[s+_j, s+_k] with
/// D[A, B] rho = A rho B^dagger - 1/2 {B^dagger A, rho}.
/// Throws ConstraintError if either rate matrix is not PSD.
Liouvillian build_liouvillian(const RateMatrices& r);

/// Matrix exponential exp(G t) of a generator, applied to states.
class Propagator {
public:
    Propagator(const Liouvillian& l, double t);

    static Propagator identity();

    /// Validates the result as a DensityMatrix.
    DensityMatrix apply(const DensityMatrix& rho) const;
    /// Unvalidated application, for composing steps.
    Matrix4c apply_raw(const Matrix4c& rho) const;

    const Matrix16c& matrix() const noexcept { return map_; }

    /// Later-applied propagator on the left: (later * earlier).
    friend Propagator operator*(const Propagator& later, const Propagator& earlier);

private:
    Propagator() = default;
    Matrix16c map_;
};

/// rho(t) = exp(G t) rho0. Throws DomainError if t < 0.
DensityMatrix propagate(const DensityMatrix& rho0, const Liouvillian& l, double t);

/// Sends each basis state of `b` through the channel for time t.
OutputStates apply_channel(const BasisParams& b, const ChannelParams& p, double t);

Vector16c vectorize(const Matrix4c& m);
Matrix4c unvectorize(const Vector16c& v);

namespace detail {

/// Generator for arbitrary symmetric rate matrices, PSD or not.
Liouvillian build_generator(const RateMatrices& r);

}  // namespace detail

}  // namespace qcap
