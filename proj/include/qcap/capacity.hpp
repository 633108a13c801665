#pragma once

// Holevo capacity of the two-qubit channel: maximization of chi over input
// probabilities and basis entanglement, the closed-form f(nu t), the
// extreme-limit relations between bases, and parameter sweeps.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcap/channel.hpp"
#include "qcap/nelder_mead.hpp"
#include "qcap/qcore.hpp"

namespace qcap {

/// chi(p) for a fixed set of output states; the output entropies are cached.
class ChiObjective {
public:
    explicit ChiObjective(const OutputStates& outputs);

    /// p must lie on the simplex; not checked.
    double operator()(const Probabilities& p) const;

    const OutputStates& outputs() const noexcept { return outputs_; }

private:
    OutputStates outputs_;
    std::array<double, 4> entropies_{};
};

struct ChiResult {
    double chi_bits = 0.0;
    Probabilities p{};
    int evaluations = 0;
    bool converged = false;
};

/// Maximum of chi over the probability simplex: best point of a step-0.1
/// simplex grid, refined by projected Nelder-Mead.
ChiResult maximize_chi(const OutputStates& outputs);

/// maximize_chi over the channel outputs of basis `b` after time t.
ChiResult chi_for_basis(const ChannelParams& channel, double t, const BasisParams& b);

struct CapacityResult {
    double capacity_bits = 0.0;
    Probabilities p{};
    double m_phi = 0.0;
    double m_psi = 0.0;
    int evaluations = 0;
    bool converged = false;

    BasisParams basis() const { return {m_phi, m_psi}; }
};

struct CapacityOptions {
    double m_grid_step = 0.05;
    /// Number of best grid cells used as starts for the joint refinement.
    int starts = 8;
    /// Candidates within this many bits of the best are ties; the smaller
    /// (m_phi, m_psi) wins.
    double tie_tolerance = 1e-6;
    NelderMeadOptions refine{0.1, 1e-7, 2000};
};

/// C(t) = max over (p, m_phi, m_psi) of chi.
CapacityResult optimize_capacity(const ChannelParams& channel, double t,
                                 const CapacityOptions& options = {});
/// Same, for rate matrices that need not follow the qubit-1-noisier convention.
CapacityResult optimize_capacity(const RateMatrices& rates, double t,
                                 const CapacityOptions& options = {});

/// Smallest nu t accepted by f_closed_form. The expression is 0/0 at nu t = 0.
inline constexpr double kClosedFormCutoff = 1e-4;

/// f(x) = 0.5 - [ (ln(d1 d2/d3) - 2x) + (r ln(d2/d1) + ln(d3^2/(d1 d2)))/w
///                + ln(d1 d2/d3)/w^2 ] / ln 16
/// with w = e^x, d3 = (1-w)^2, r = sqrt(1+d3), d1 = d3 + w(1-r), d2 = d3 + w(1+r).
double f_closed_form(double nu_t);

enum class BasisFamily { factorized, bell, combined };

BasisParams family_basis(BasisFamily family);
std::string_view to_string(BasisFamily family);

/// Extreme limits of the channel, each with one swept parameter p:
///   a: zeta = 0, alpha = 1, mu = p      b: mu = 0, alpha = 1, zeta = p
///   c: zeta = 0, alpha = 0, mu = p      d: mu = 0, alpha = 0, zeta = p
enum class LimitCase { a, b, c, d };

std::string_view to_string(LimitCase c);
std::string_view describe(LimitCase c);
/// Throws UsageError for anything but "a".."d".
LimitCase parse_limit_case(std::string_view s);

ChannelParams limit_channel(LimitCase c, double p, double nu1 = 1.0);

/// One relation chi_lhs^{basis}(p) = chi_rhs^{basis'}(p) + eps(p) [+ f(nu t)].
/// The case names the left-hand side:
///   b: chi_b^fac = chi_a^ent + eps + f     a: chi_a^fac = chi_b^ent + eps + f
///   d: chi_d^fac = chi_c^com + eps         c: chi_c^fac = chi_d^com + eps
struct LimitRelation {
    LimitCase lhs_case;
    BasisFamily lhs_basis;
    LimitCase rhs_case;
    BasisFamily rhs_basis;
    bool includes_f;
};

LimitRelation limit_relation(LimitCase lhs);

struct LimitResidual {
    LimitRelation relation;
    double p = 0.0;
    double nu_t = 0.0;
    double lhs_bits = 0.0;
    double rhs_bits = 0.0;
    double f_term = 0.0;
    double residual_bits = 0.0;
};

/// Evaluates both sides at nu1 = 1, t = nu_t. Throws DomainError for
/// nu_t < kClosedFormCutoff or p outside [0, 1].
LimitResidual evaluate_limit_relation(LimitCase lhs, double p, double nu_t);

double limit_relation_residual(LimitCase lhs, double p, double nu_t);

enum class SweepAxis { mu, zeta, alpha };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view s);

struct AxisRange {
    SweepAxis axis = SweepAxis::mu;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    /// start, start + step, ... up to stop (inclusive within 1e-9 step).
    std::vector<double> values() const;
};

struct SweepGrid {
    std::vector<AxisRange> axes;
};

/// Optimize over the basis (no `fixed`), or evaluate a fixed basis.
struct BasisChoice {
    std::string label = "opt";
    std::optional<BasisParams> fixed;

    static BasisChoice optimize() { return {}; }
    static BasisChoice family(BasisFamily f);
};

struct SweepRow {
    ChannelParams params;
    double nu_t = 0.0;
    std::string basis;
    /// Empty for grid points outside zeta^2 + mu^2 <= 1.
    std::optional<CapacityResult> result;

    bool skipped() const { return !result.has_value(); }
};

/// One row per grid point and basis choice, ordered lexicographically in the
/// swept axes (first axis slowest) and then by basis in the given order.
/// Points are evaluated on `threads` workers (0 = hardware concurrency).
std::vector<SweepRow> sweep_capacity(const SweepGrid& grid, const ChannelParams& fixed, double t,
                                     const std::vector<BasisChoice>& bases = {BasisChoice::optimize()},
                                     unsigned threads = 0);

}  // namespace qcap
