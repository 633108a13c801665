#include "qcap/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "parallel.hpp"
#include "qcap/errors.hpp"

namespace qcap {

namespace {

using boost::math::quadrature::gauss_kronrod;

std::string num(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

constexpr double kQuadratureTol = 1e-10;
// Panels with more oscillation periods than this switch to fixed sampling.
constexpr double kOscillatoryPeriods = 4.0;

void check_qubit(int q, const char* field) {
    if (q != 0 && q != 1) throw DomainError(field, "qubit index must be 0 or 1");
}

// max |d phi / dt| of pulse k over [lo, hi], sampled.
double phase_rate_bound(const PulseSpec& k, double lo, double hi) {
    constexpr int n = 256;
    const double h = (hi - lo) / n;
    double bound = 0.0;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 0; i <= n; ++i) {
        const double t = lo + i * h;
        const double s = t - k.delay;
        if (s < k.support_begin || s > k.support_end) {
            have_prev = false;
            continue;
        }
        const double ph = k.phase(s);
        if (have_prev) bound = std::max(bound, std::abs(ph - prev) / h);
        prev = ph;
        have_prev = true;
    }
    return bound;
}

}  // namespace

cplx PulseSpec::amplitude(double t) const {
    const double s = t - delay;
    if (s < support_begin || s > support_end || !envelope) return 0.0;
    const double a = envelope(s);
    if (a == 0.0) return 0.0;
    const double ph = phase ? phase(s) : 0.0;
    return std::polar(a, ph);
}

PulseSpec PulseSpec::gaussian(double width, double center, double amplitude, double chirp,
                              double carrier, double delay) {
    if (!(width > 0.0)) throw DomainError("width", "pulse width must be > 0");
    PulseSpec p;
    p.envelope = [=](double s) {
        const double u = (s - center) / width;
        return amplitude * std::exp(-0.5 * u * u);
    };
    p.phase = [=](double s) { return chirp * (s - center) * (s - center); };
    p.carrier = carrier;
    p.delay = delay;
    p.support_begin = center - 8.0 * width;
    p.support_end = center + 8.0 * width;
    return p;
}

PulseSpec PulseSpec::flat(double begin, double end, double amplitude, double chirp, double carrier,
                          double delay) {
    if (!(end > begin)) throw DomainError("support", "flat pulse needs end > begin");
    const double mid = 0.5 * (begin + end);
    PulseSpec p;
    p.envelope = [=](double) { return amplitude; };
    p.phase = [=](double s) { return chirp * (s - mid) * (s - mid); };
    p.carrier = carrier;
    p.delay = delay;
    p.support_begin = begin;
    p.support_end = end;
    return p;
}

PulseSpec PulseSpec::silent() {
    PulseSpec p;
    p.envelope = [](double) { return 0.0; };
    p.phase = [](double) { return 0.0; };
    return p;
}

std::string_view to_string(CorrelationKind kind) {
    switch (kind) {
        case CorrelationKind::exponential: return "exponential";
        case CorrelationKind::gaussian: return "gaussian";
        case CorrelationKind::delta_approx: return "delta";
    }
    return "?";
}

CorrelationKind parse_correlation_kind(std::string_view s) {
    if (s == "exponential" || s == "exp") return CorrelationKind::exponential;
    if (s == "gaussian") return CorrelationKind::gaussian;
    if (s == "delta" || s == "delta-approx") return CorrelationKind::delta_approx;
    throw UsageError("corr", "expected exponential, gaussian or delta, got '" + std::string(s) + "'");
}

double CorrelationFn::width() const {
    if (kind == CorrelationKind::delta_approx) return sigma > 0.0 ? sigma : t_c / 100.0;
    return t_c;
}

double CorrelationFn::reach() const {
    switch (kind) {
        case CorrelationKind::exponential: return 46.0 * t_c;   // e^-46 ~ 1e-20
        case CorrelationKind::gaussian: return 6.8 * t_c;       // e^-46
        case CorrelationKind::delta_approx: return 9.6 * width();
    }
    return 0.0;
}

cplx CorrelationFn::operator()(double tau) const {
    const double a = std::abs(tau);
    switch (kind) {
        case CorrelationKind::exponential: return scale * std::exp(-a / t_c);
        case CorrelationKind::gaussian: {
            const double u = a / t_c;
            return scale * std::exp(-u * u);
        }
        case CorrelationKind::delta_approx: {
            const double s = width();
            const double u = a / s;
            return scale * std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * std::numbers::pi));
        }
    }
    return 0.0;
}

void CorrelationFn::validate() const {
    if (!(t_c > 0.0) || !std::isfinite(t_c)) throw DomainError("t_c", "correlation time must be > 0");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("scale", "correlation scale must be > 0");
    if (!(bias >= 0.0 && bias <= 1.0)) throw DomainError("bias", "bias factor must lie in [0, 1]");
    if (!(sigma >= 0.0)) throw DomainError("sigma", "delta width must be >= 0");
}

cplx rate_integral(int j, int k, const PulsePair& pulses, const CorrelationFn& corr, double t) {
    check_qubit(j, "j");
    check_qubit(k, "k");
    corr.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t", "time must be finite and >= 0");
    const PulseSpec& pj = pulses[j];
    const PulseSpec& pk = pulses[k];

    const cplx prefactor = pj.amplitude(t) * std::polar(1.0, pj.carrier * t);
    if (prefactor == 0.0) return 0.0;

    const double lo = std::max({0.0, t - corr.reach(), pk.begin()});
    const double hi = std::min(t, pk.end());
    if (!(hi > lo)) return 0.0;

    const auto integrand = [&](double t1) -> cplx {
        const cplx v = corr(t - t1) * std::conj(pk.amplitude(t1)) * std::polar(1.0, -pk.carrier * t1);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw NumericalError("integrand", "non-finite value at t1 = " + num(t1) + " (t = " + num(t) + ")");
        }
        return v;
    };

    // Panel edges at multiples of the kernel width behind t resolve the peak of
    // narrow kernels sitting at the upper limit.
    std::vector<double> edges = {lo};
    for (double c : {30.0, 10.0, 3.0, 1.0}) {
        const double e = t - c * corr.width();
        if (e > edges.back() && e < hi) edges.push_back(e);
    }
    edges.push_back(hi);

    const double omega = std::abs(pk.carrier) + phase_rate_bound(pk, lo, hi);
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i];
        const double b = edges[i + 1];
        const double periods = omega * (b - a) / (2.0 * std::numbers::pi);
        const auto re = [&](double x) { return integrand(x).real(); };
        const auto im = [&](double x) { return integrand(x).imag(); };
        if (periods > kOscillatoryPeriods) {
            // 61 nodes per panel, one panel per period
            const int panels = static_cast<int>(std::ceil(periods));
            const double h = (b - a) / panels;
            for (int q = 0; q < panels; ++q) {
                const double pa = a + q * h;
                const double pb = (q + 1 == panels) ? b : pa + h;
                total += cplx(gauss_kronrod<double, 61>::integrate(re, pa, pb, 0),
                              gauss_kronrod<double, 61>::integrate(im, pa, pb, 0));
            }
        } else {
            total += cplx(gauss_kronrod<double, 31>::integrate(re, a, b, 15, kQuadratureTol),
                          gauss_kronrod<double, 31>::integrate(im, a, b, 15, kQuadratureTol));
        }
    }
    return prefactor * total;
}

double compute_rate(int j, int k, const PulsePair& pulses, const CorrelationFn& corr, double t) {
    return 2.0 * rate_integral(j, k, pulses, corr, t).real();
}

void RateTrajectory::validate() const {
    if (times.empty()) throw DomainError("grid", "trajectory has no time points");
    if (r_matrices.size() != times.size()) {
        throw DomainError("trajectory", "rate count does not match the time grid");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw DomainError("grid", "non-finite time");
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw DomainError("grid", "times must be strictly ascending");
        }
        if (!r_matrices[i].r1.allFinite() || !r_matrices[i].r0.allFinite()) {
            throw DomainError("trajectory", "non-finite rate at t = " + num(times[i]));
        }
    }
}

RateTrajectory RateTrajectory::constant(std::vector<double> times, const RateMatrices& r) {
    RateTrajectory traj;
    traj.r_matrices.assign(times.size(), r);
    traj.raw.assign(times.size(), r.r1);
    traj.times = std::move(times);
    traj.validate();
    return traj;
}

RateTrajectory rate_trajectory(const PulsePair& pulses, const CorrelationFn& corr,
                               const std::vector<double>& grid, unsigned threads) {
    corr.validate();
    RateTrajectory traj;
    traj.times = grid;
    traj.r_matrices.resize(grid.size());
    traj.raw.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw DomainError("grid", "times must be >= 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("grid", "times must be strictly ascending");
    }
    detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
        Matrix2 raw;
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) raw(j, k) = compute_rate(j, k, pulses, corr, grid[i]);
        }
        Matrix2 r1 = raw;
        r1(0, 1) = r1(1, 0) = 0.5 * (raw(0, 1) + raw(1, 0));
        traj.raw[i] = raw;
        traj.r_matrices[i] = {r1, corr.bias * r1};
    });
    traj.validate();
    return traj;
}

EffectiveParams effective_params(const RateTrajectory& traj, double t) {
    traj.validate();
    const double t0 = traj.times.front();
    if (!(t > t0) || t > traj.times.back() * (1.0 + 1e-12)) {
        throw DomainError("t", "averaging time " + num(t) + " must lie in (" + num(t0) + ", " +
                                   num(traj.times.back()) + "]");
    }

    Matrix2 s1 = Matrix2::Zero();
    Matrix2 s0 = Matrix2::Zero();
    for (std::size_t i = 0; i + 1 < traj.times.size() && traj.times[i] < t; ++i) {
        const double a = traj.times[i];
        const double b = traj.times[i + 1];
        const RateMatrices& ra = traj.r_matrices[i];
        const RateMatrices& rb = traj.r_matrices[i + 1];
        double end = b;
        Matrix2 r1b = rb.r1;
        Matrix2 r0b = rb.r0;
        if (t < b) {
            const double f = (t - a) / (b - a);
            r1b = ra.r1 + f * (rb.r1 - ra.r1);
            r0b = ra.r0 + f * (rb.r0 - ra.r0);
            end = t;
        }
        s1 += 0.5 * (end - a) * (ra.r1 + r1b);
        s0 += 0.5 * (end - a) * (ra.r0 + r0b);
    }

    EffectiveParams out;
    out.averaged = {s1 / (t - t0), s0 / (t - t0)};
    ChannelParams p = params_from_rates(out.averaged);
    const double radius2 = p.zeta * p.zeta + p.mu * p.mu;
    if (radius2 > 1.0 + kFeasibilityTol) {
        if (radius2 > 1.0 + 1e-6) {
            throw ConstraintError("mu", "averaged rates give zeta^2 + mu^2 = " + num(radius2) +
                                            ", beyond round-off of the feasible disk");
        }
        const double k = 1.0 / std::sqrt(radius2);
        p.zeta *= k;
        p.mu *= k;
        out.clamped = true;
    }
    p.alpha = std::clamp(p.alpha, 0.0, 1.0);
    out.params = p;
    return out;
}

TrajectoryPropagation propagate_with_trajectory(const DensityMatrix& rho0, const RateTrajectory& traj) {
    traj.validate();
    TrajectoryPropagation out{rho0, false, 1};
    if (traj.times.size() < 2) return out;

    bool non_psd = false;
    const auto run = [&](int n) {
        Vector16c v = vectorize(rho0.matrix());
        for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
            const double dt = traj.times[i + 1] - traj.times[i];
            const RateMatrices& ra = traj.r_matrices[i];
            const RateMatrices& rb = traj.r_matrices[i + 1];
            if (ra.r1 == rb.r1 && ra.r0 == rb.r0) {
                if (!ra.is_psd()) non_psd = true;
                const Matrix16c g = detail::build_generator(ra).generator * dt;
                v = g.exp() * v;
                continue;
            }
            const double h = dt / n;
            for (int s = 0; s < n; ++s) {
                const double f = (s + 0.5) / n;
                const RateMatrices r{ra.r1 + f * (rb.r1 - ra.r1), ra.r0 + f * (rb.r0 - ra.r0)};
                if (!r.is_psd()) non_psd = true;
                const Matrix16c g = detail::build_generator(r).generator * h;
                v = g.exp() * v;
            }
        }
        return unvectorize(v);
    };

    constexpr int kMaxSubsteps = 4096;
    Matrix4c prev = run(1);
    int n = 1;
    bool converged = false;
    while (n < kMaxSubsteps) {
        n *= 2;
        const Matrix4c cur = run(n);
        const double change = (cur - prev).cwiseAbs().maxCoeff();
        prev = cur;
        if (change < 1e-8) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericalError("trajectory", "step halving did not converge to 1e-8 within " +
                                               std::to_string(kMaxSubsteps) + " substeps");
    }
    try {
        out.state = DensityMatrix(prev);
    } catch (const DomainError& e) {
        throw NumericalError("trajectory", std::string("final state is not a valid density matrix: ") + e.what());
    }
    out.non_psd_rates = non_psd;
    out.substeps = n;
    return out;
}

}  // namespace qcap
