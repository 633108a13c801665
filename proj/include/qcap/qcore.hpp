#pragma once

// Two-qubit states, the (m_phi, m_psi) transmission basis, Von Neumann
// entropy and the Holevo quantity. Basis order is |00>, |01>, |10>, |11>
// everywhere; qubit 1 is the left tensor factor.

#include <array>
#include <complex>
#include <span>

#include <Eigen/Dense>

namespace qcap {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Vector4c = Eigen::Matrix<cplx, 4, 1>;

inline constexpr int kDim = 4;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kNormTol = 1e-12;
/// Eigenvalues at or below this contribute 0 to -lambda log lambda.
inline constexpr double kEigenFloor = 1e-12;

/// Validated 4x4 density matrix (Hermitian, unit trace, PSD within tolerance).
class DensityMatrix {
public:
    /// Identity / 4 (maximally mixed).
    DensityMatrix();

    /// Throws DomainError if `m` is not a valid state within the tolerances.
    explicit DensityMatrix(const Matrix4c& m);

    static DensityMatrix maximally_mixed() { return DensityMatrix(); }

    const Matrix4c& matrix() const noexcept { return m_; }
    cplx operator()(int row, int col) const { return m_(row, col); }

    double purity() const;

    /// Ascending eigenvalues.
    Eigen::Vector4d eigenvalues() const;

private:
    Matrix4c m_;
};

/// Unit-norm two-qubit state vector.
class PureState {
public:
    /// Throws DomainError unless | ||a|| - 1 | <= kNormTol.
    explicit PureState(const Vector4c& amplitudes);

    const Vector4c& amplitudes() const noexcept { return a_; }
    cplx operator[](int i) const { return a_(i); }

private:
    Vector4c a_;
};

/// Entanglement parameters of the transmission basis. Both lie in [0, 1];
/// 0 gives product states and 1 the Bell states.
struct BasisParams {
    double m_phi = 0.0;
    double m_psi = 0.0;

    /// Throws DomainError when either parameter is outside [0, 1].
    void validate() const;

    static BasisParams factorized() { return {0.0, 0.0}; }
    static BasisParams bell() { return {1.0, 1.0}; }
    /// Factorized |00>,|11> pair with the singlet/triplet pair.
    static BasisParams combined() { return {0.0, 1.0}; }

    friend bool operator==(const BasisParams&, const BasisParams&) = default;
};

using BasisSet = std::array<PureState, 4>;
using Probabilities = std::array<double, 4>;
using OutputStates = std::array<DensityMatrix, 4>;

/// psi_1..psi_4:
///   M_phi (|00> + m_phi |11>),  M_phi (m_phi |00> - |11>),
///   M_psi (|01> + m_psi |10>),  M_psi (m_psi |01> - |10>)
/// with M = 1 / sqrt(1 + m^2).
BasisSet make_basis(const BasisParams& params);

DensityMatrix pure_to_density(const PureState& psi);

/// S(rho) = -sum lambda log2 lambda, in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// Input ensemble {p_x, rho_x}. Probabilities are non-negative and sum to 1
/// within 1e-10.
class Ensemble {
public:
    Ensemble(const Probabilities& p, const OutputStates& states);

    const Probabilities& probabilities() const noexcept { return p_; }
    const OutputStates& states() const noexcept { return states_; }

    /// sum_x p_x rho_x
    DensityMatrix average() const;

private:
    Probabilities p_;
    OutputStates states_;
};

/// chi = S(<rho>) - sum_x p_x S(rho_x), bits, clamped at 0 from below.
double holevo_chi(const Ensemble& ensemble);

/// Throws DomainError naming `field` unless p is on the probability simplex.
void validate_probabilities(std::span<const double, 4> p, const char* field = "p");

namespace detail {

/// Entropy of a Hermitian matrix known to be a state; no validation.
double entropy_bits(const Matrix4c& rho);

}  // namespace detail

}  // namespace qcap
