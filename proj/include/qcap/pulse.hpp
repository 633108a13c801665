#pragma once

// Pair decoherence rates induced by temporally shaped qubit pulses:
//
//   R_jk(t) = 2 Re int_0^t dt1 Phi(t - t1) eps_j(t) eps_k^*(t1) e^{i (w_j t - w_k t1)}
//
// with eps_j(t) = env_j(t) e^{i phi_j(t)}, and the effective channel
// parameters obtained from their time averages.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "qcap/channel.hpp"
#include "qcap/qcore.hpp"

namespace qcap {

/// One qubit pulse. `envelope` and `phase` are functions of the local time
/// s = t - delay and are only evaluated for s inside [support_begin, support_end].
struct PulseSpec {
    std::function<double(double)> envelope;
    std::function<double(double)> phase;
    double carrier = 0.0;
    double delay = 0.0;
    double support_begin = 0.0;
    double support_end = 0.0;

    /// eps(t) without the carrier factor; zero outside the support.
    cplx amplitude(double t) const;

    /// [begin, end] of the support in absolute time.
    double begin() const { return delay + support_begin; }
    double end() const { return delay + support_end; }

    /// exp(-(s - center)^2 / (2 width^2)) with phase chirp (s - center)^2,
    /// supported on center +- 8 width.
    static PulseSpec gaussian(double width, double center, double amplitude = 1.0,
                              double chirp = 0.0, double carrier = 0.0, double delay = 0.0);
    /// Constant `amplitude` on [begin, end], phase chirp (s - mid)^2.
    static PulseSpec flat(double begin, double end, double amplitude = 1.0, double chirp = 0.0,
                          double carrier = 0.0, double delay = 0.0);
    static PulseSpec silent();
};

using PulsePair = std::array<PulseSpec, 2>;

enum class CorrelationKind { exponential, gaussian, delta_approx };

std::string_view to_string(CorrelationKind kind);
CorrelationKind parse_correlation_kind(std::string_view s);

/// Bath response Phi(tau), real and even for the provided kinds:
///   exponential   scale exp(-|tau| / t_c)
///   gaussian      scale exp(-(tau / t_c)^2)
///   delta_approx  scale g_sigma(tau), g a unit-area Gaussian of width sigma
///                 (default t_c / 100). A flat unit pulse then sees the
///                 golden-rule rate R = scale.
/// `bias` scales the downward rates into the upward sector: R0 = bias R1.
struct CorrelationFn {
    CorrelationKind kind = CorrelationKind::exponential;
    double t_c = 1.0;
    double scale = 1.0;
    std::string temperature_tag;
    double bias = 1.0;
    double sigma = 0.0;

    cplx operator()(double tau) const;
    /// Width of the kernel: sigma for delta_approx, t_c otherwise.
    double width() const;
    /// |tau| beyond which Phi is negligible (below 1e-20 of its peak).
    double reach() const;
    void validate() const;
};

/// Unsymmetrized int_0^t dt1 ... for qubits j, k in {0, 1}; R_jk = 2 Re of it.
cplx rate_integral(int j, int k, const PulsePair& pulses, const CorrelationFn& corr, double t);

double compute_rate(int j, int k, const PulsePair& pulses, const CorrelationFn& corr, double t);

struct RateTrajectory {
    std::vector<double> times;
    /// Symmetrized downward rates (cross entry (R12 + R21)/2) and bias-scaled
    /// upward rates at each time.
    std::vector<RateMatrices> r_matrices;
    /// R_jk(t) as computed, before symmetrization.
    std::vector<Matrix2> raw;

    /// Throws DomainError unless times are strictly ascending and all entries finite.
    void validate() const;

    static RateTrajectory constant(std::vector<double> times, const RateMatrices& r);
};

RateTrajectory rate_trajectory(const PulsePair& pulses, const CorrelationFn& corr,
                               const std::vector<double>& grid, unsigned threads = 0);

struct EffectiveParams {
    ChannelParams params;
    /// Rates averaged over [times.front(), t].
    RateMatrices averaged;
    /// zeta, mu were rescaled onto zeta^2 + mu^2 = 1 to absorb round-off.
    bool clamped = false;
};

EffectiveParams effective_params(const RateTrajectory& traj, double t);

struct TrajectoryPropagation {
    DensityMatrix state;
    /// Some interpolated rate matrix was not PSD (non-Markovian interval).
    bool non_psd_rates = false;
    /// Substeps per grid interval at convergence.
    int substeps = 1;
};

/// Time-ordered product of exp(G(t_mid) dt) over the trajectory span, with
/// rates interpolated linearly inside each grid interval. The substep count
/// doubles until the result moves by less than 1e-8 (max norm).
TrajectoryPropagation propagate_with_trajectory(const DensityMatrix& rho0, const RateTrajectory& traj);

}  // namespace qcap
