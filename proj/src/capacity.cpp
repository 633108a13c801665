#include "qcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "parallel.hpp"
#include "qcap/errors.hpp"

namespace qcap {

namespace {

constexpr double kProbGridStep = 0.1;

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Euclidean projection onto the probability simplex.
Probabilities project_to_simplex(const Eigen::Vector4d& y) {
    std::array<double, 4> u = {y(0), y(1), y(2), y(3)};
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (int i = 0; i < 4; ++i) {
        cumsum += u[i];
        const double t = (cumsum - 1.0) / (i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    Probabilities p;
    for (int i = 0; i < 4; ++i) p[i] = std::max(0.0, y(i) - theta);
    const double s = p[0] + p[1] + p[2] + p[3];
    for (double& x : p) x /= s;
    return p;
}

Probabilities softmax(double l1, double l2, double l3) {
    const double mx = std::max({l1, l2, l3, 0.0});
    Probabilities p = {std::exp(l1 - mx), std::exp(l2 - mx), std::exp(l3 - mx), std::exp(-mx)};
    const double s = p[0] + p[1] + p[2] + p[3];
    for (double& x : p) x /= s;
    return p;
}

std::vector<double> unit_grid(double step) {
    const int n = static_cast<int>(std::lround(1.0 / step));
    if (n < 1 || std::abs(n * step - 1.0) > 1e-9) {
        throw DomainError("m_grid_step", "must divide 1 evenly, got " + num(step));
    }
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = static_cast<double>(i) / n;
    return g;
}

OutputStates outputs_for(const Propagator& prop, const BasisParams& b) {
    const BasisSet basis = make_basis(b);
    return {prop.apply(pure_to_density(basis[0])), prop.apply(pure_to_density(basis[1])),
            prop.apply(pure_to_density(basis[2])), prop.apply(pure_to_density(basis[3]))};
}

struct Candidate {
    double value;
    Probabilities p;
    double m_phi;
    double m_psi;
    bool converged;
};

CapacityResult optimize_with(const Propagator& prop, const CapacityOptions& options) {
    const std::vector<double> ms = unit_grid(options.m_grid_step);
    const std::size_t n = ms.size();

    // Basis states of each pair depend on one parameter only, so outputs are
    // computed once per grid value and recombined per cell.
    std::vector<OutputStates> per_m;
    per_m.reserve(n);
    for (double m : ms) per_m.push_back(outputs_for(prop, {m, m}));

    int evaluations = 0;
    std::vector<Candidate> cells;
    cells.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const OutputStates out = {per_m[i][0], per_m[i][1], per_m[j][2], per_m[j][3]};
            const ChiResult r = maximize_chi(out);
            evaluations += r.evaluations;
            cells.push_back({r.chi_bits, r.p, ms[i], ms[j], r.converged});
        }
    }

    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cells[a].value > cells[b].value; });

    std::vector<Candidate> candidates = cells;
    const int starts = std::min<int>(options.starts, static_cast<int>(cells.size()));
    for (int s = 0; s < starts; ++s) {
        const Candidate& c0 = cells[order[s]];
        const auto logit = [&](int i) {
            return std::log(std::max(c0.p[i], 1e-4)) - std::log(std::max(c0.p[3], 1e-4));
        };
        Eigen::VectorXd z0(5);
        z0 << logit(0), logit(1), logit(2), c0.m_phi, c0.m_psi;

        const auto objective = [&](const Eigen::VectorXd& z) {
            const double mf = std::clamp(z(3), 0.0, 1.0);
            const double mp = std::clamp(z(4), 0.0, 1.0);
            const double penalty = (z(3) - mf) * (z(3) - mf) + (z(4) - mp) * (z(4) - mp);
            const ChiObjective chi(outputs_for(prop, {mf, mp}));
            return -chi(softmax(z(0), z(1), z(2))) + penalty;
        };
        const NelderMeadResult nm = nelder_mead_minimize(objective, z0, options.refine);
        evaluations += nm.evaluations;

        const BasisParams b{std::clamp(nm.x(3), 0.0, 1.0), std::clamp(nm.x(4), 0.0, 1.0)};
        const ChiResult polished = maximize_chi(outputs_for(prop, b));
        evaluations += polished.evaluations;
        candidates.push_back({polished.chi_bits, polished.p, b.m_phi, b.m_psi,
                              nm.converged && polished.converged});
    }

    double best = -1.0;
    for (const Candidate& c : candidates) best = std::max(best, c.value);
    const Candidate* chosen = nullptr;
    for (const Candidate& c : candidates) {
        if (c.value < best - options.tie_tolerance) continue;
        if (chosen == nullptr || c.m_phi < chosen->m_phi ||
            (c.m_phi == chosen->m_phi && c.m_psi < chosen->m_psi)) {
            chosen = &c;
        }
    }

    CapacityResult result;
    result.capacity_bits = std::clamp(chosen->value, 0.0, 2.0);
    result.p = chosen->p;
    result.m_phi = chosen->m_phi;
    result.m_psi = chosen->m_psi;
    result.evaluations = evaluations;
    result.converged = chosen->converged;
    return result;
}

}  // namespace

ChiObjective::ChiObjective(const OutputStates& outputs) : outputs_(outputs) {
    for (int x = 0; x < kDim; ++x) entropies_[x] = von_neumann_entropy(outputs_[x]);
}

double ChiObjective::operator()(const Probabilities& p) const {
    Matrix4c avg = Matrix4c::Zero();
    double conditional = 0.0;
    for (int x = 0; x < kDim; ++x) {
        if (p[x] == 0.0) continue;
        avg += p[x] * outputs_[x].matrix();
        conditional += p[x] * entropies_[x];
    }
    return detail::entropy_bits(avg) - conditional;
}

ChiResult maximize_chi(const OutputStates& outputs) {
    const ChiObjective chi(outputs);
    ChiResult best;
    best.chi_bits = -1.0;
    int evals = 0;

    const int n = static_cast<int>(std::lround(1.0 / kProbGridStep));
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
            for (int k = 0; i + j + k <= n; ++k) {
                const Probabilities p = {double(i) / n, double(j) / n, double(k) / n,
                                         double(n - i - j - k) / n};
                const double v = chi(p);
                ++evals;
                if (v > best.chi_bits) {
                    best.chi_bits = v;
                    best.p = p;
                }
            }
        }
    }

    // Nelder-Mead on (p1, p2, p3) with p4 = 1 - sum; points off the simplex
    // are projected and pay a quadratic penalty for the distance.
    const auto objective = [&](const Eigen::VectorXd& x) {
        const Eigen::Vector4d y(x(0), x(1), x(2), 1.0 - x(0) - x(1) - x(2));
        const Probabilities p = project_to_simplex(y);
        const Eigen::Vector4d pv(p[0], p[1], p[2], p[3]);
        return -chi(p) + (y - pv).squaredNorm();
    };
    Eigen::VectorXd x0(3);
    x0 << best.p[0], best.p[1], best.p[2];
    const NelderMeadResult nm = nelder_mead_minimize(objective, x0, {0.05, 1e-7, 2000});
    evals += nm.evaluations;

    const Probabilities p_nm = project_to_simplex(
        Eigen::Vector4d(nm.x(0), nm.x(1), nm.x(2), 1.0 - nm.x(0) - nm.x(1) - nm.x(2)));
    const double v_nm = chi(p_nm);
    ++evals;
    if (v_nm >= best.chi_bits) {
        best.chi_bits = v_nm;
        best.p = p_nm;
    }
    best.chi_bits = std::clamp(best.chi_bits, 0.0, 2.0);
    best.evaluations = evals;
    best.converged = nm.converged;
    return best;
}

ChiResult chi_for_basis(const ChannelParams& channel, double t, const BasisParams& b) {
    return maximize_chi(apply_channel(b, channel, t));
}

CapacityResult optimize_capacity(const ChannelParams& channel, double t,
                                 const CapacityOptions& options) {
    return optimize_capacity(rates_from_params(channel), t, options);
}

CapacityResult optimize_capacity(const RateMatrices& rates, double t,
                                 const CapacityOptions& options) {
    const Propagator prop(build_liouvillian(rates), t);
    return optimize_with(prop, options);
}

double f_closed_form(double nu_t) {
    if (!(nu_t >= kClosedFormCutoff) || !std::isfinite(nu_t)) {
        throw DomainError("nu_t", "f(nu t) requires nu t >= " + num(kClosedFormCutoff) +
                                      " (removable 0/0 singularity at nu t = 0), got " + num(nu_t));
    }
    const double x = nu_t;
    const double em1 = std::expm1(x);
    const double w = 1.0 + em1;
    const double d3 = em1 * em1;
    const double r = std::sqrt(1.0 + d3);
    const double d2 = d3 + w * (1.0 + r);
    // d1 d2 = d3 identically; taking d1 from that identity avoids the
    // cancellation in d3 + w(1 - r) at both small and large nu t.
    const double d1 = d3 / d2;

    const double l12_3 = std::log(d1 * d2 / d3);
    const double bracket = (l12_3 - 2.0 * x) +
                           (r * std::log(d2 / d1) + std::log(d3 * d3 / (d1 * d2))) / w +
                           l12_3 / (w * w);
    return 0.5 - bracket / std::log(16.0);
}

BasisParams family_basis(BasisFamily family) {
    switch (family) {
        case BasisFamily::factorized: return BasisParams::factorized();
        case BasisFamily::bell: return BasisParams::bell();
        case BasisFamily::combined: return BasisParams::combined();
    }
    return {};
}

std::string_view to_string(BasisFamily family) {
    switch (family) {
        case BasisFamily::factorized: return "fac";
        case BasisFamily::bell: return "bell";
        case BasisFamily::combined: return "com";
    }
    return "?";
}

std::string_view to_string(LimitCase c) {
    switch (c) {
        case LimitCase::a: return "a";
        case LimitCase::b: return "b";
        case LimitCase::c: return "c";
        case LimitCase::d: return "d";
    }
    return "?";
}

std::string_view describe(LimitCase c) {
    switch (c) {
        case LimitCase::a: return "symmetric, state-biased memory channel (zeta=0, alpha=1, vary mu)";
        case LimitCase::b: return "asymmetric, state-biased memoryless channel (mu=0, alpha=1, vary zeta)";
        case LimitCase::c: return "symmetric, unbiased memory channel (zeta=0, alpha=0, vary mu)";
        case LimitCase::d: return "asymmetric, unbiased memoryless channel (mu=0, alpha=0, vary zeta)";
    }
    return "?";
}

LimitCase parse_limit_case(std::string_view s) {
    if (s == "a") return LimitCase::a;
    if (s == "b") return LimitCase::b;
    if (s == "c") return LimitCase::c;
    if (s == "d") return LimitCase::d;
    throw UsageError("case", "expected one of a, b, c, d, got '" + std::string(s) + "'");
}

ChannelParams limit_channel(LimitCase c, double p, double nu1) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("p", "limit parameter must lie in [0, 1], got " + num(p));
    }
    ChannelParams ch;
    ch.nu1 = nu1;
    switch (c) {
        case LimitCase::a: ch.alpha = 1.0; ch.zeta = 0.0; ch.mu = p; break;
        case LimitCase::b: ch.alpha = 1.0; ch.mu = 0.0; ch.zeta = p; break;
        case LimitCase::c: ch.alpha = 0.0; ch.zeta = 0.0; ch.mu = p; break;
        case LimitCase::d: ch.alpha = 0.0; ch.mu = 0.0; ch.zeta = p; break;
    }
    return ch;
}

LimitRelation limit_relation(LimitCase lhs) {
    switch (lhs) {
        case LimitCase::b: return {LimitCase::b, BasisFamily::factorized, LimitCase::a, BasisFamily::bell, true};
        case LimitCase::a: return {LimitCase::a, BasisFamily::factorized, LimitCase::b, BasisFamily::bell, true};
        case LimitCase::d: return {LimitCase::d, BasisFamily::factorized, LimitCase::c, BasisFamily::combined, false};
        case LimitCase::c: return {LimitCase::c, BasisFamily::factorized, LimitCase::d, BasisFamily::combined, false};
    }
    throw UsageError("case", "unknown limit case");
}

LimitResidual evaluate_limit_relation(LimitCase lhs, double p, double nu_t) {
    LimitResidual out;
    out.relation = limit_relation(lhs);
    out.p = p;
    out.nu_t = nu_t;
    // The cutoff applies to every relation so all four share one domain.
    const double f = f_closed_form(nu_t);
    out.f_term = out.relation.includes_f ? f : 0.0;
    out.lhs_bits = chi_for_basis(limit_channel(out.relation.lhs_case, p), nu_t,
                                 family_basis(out.relation.lhs_basis)).chi_bits;
    out.rhs_bits = chi_for_basis(limit_channel(out.relation.rhs_case, p), nu_t,
                                 family_basis(out.relation.rhs_basis)).chi_bits;
    out.residual_bits = out.lhs_bits - out.rhs_bits - out.f_term;
    return out;
}

double limit_relation_residual(LimitCase lhs, double p, double nu_t) {
    return evaluate_limit_relation(lhs, p, nu_t).residual_bits;
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::mu: return "mu";
        case SweepAxis::zeta: return "zeta";
        case SweepAxis::alpha: return "alpha";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view s) {
    if (s == "mu") return SweepAxis::mu;
    if (s == "zeta") return SweepAxis::zeta;
    if (s == "alpha") return SweepAxis::alpha;
    throw UsageError("axis", "expected mu, zeta or alpha, got '" + std::string(s) + "'");
}

std::vector<double> AxisRange::values() const {
    const std::string field(to_string(axis));
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw DomainError(field, "grid step must be > 0, got " + num(step));
    }
    if (!(start >= 0.0 && stop <= 1.0 && start <= stop)) {
        throw DomainError(field, "grid range must satisfy 0 <= start <= stop <= 1");
    }
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> v(n + 1);
    for (long i = 0; i <= n; ++i) v[i] = std::min(start + static_cast<double>(i) * step, 1.0);
    return v;
}

BasisChoice BasisChoice::family(BasisFamily f) {
    return {std::string(to_string(f)), family_basis(f)};
}

std::vector<SweepRow> sweep_capacity(const SweepGrid& grid, const ChannelParams& fixed, double t,
                                     const std::vector<BasisChoice>& bases, unsigned threads) {
    if (grid.axes.empty() || bases.empty()) throw DomainError("grid", "empty sweep grid");
    if (grid.axes.size() > 2) throw DomainError("grid", "at most two swept axes are supported");
    if (grid.axes.size() == 2 && grid.axes[0].axis == grid.axes[1].axis) {
        throw DomainError("grid", "the two swept axes must differ");
    }
    if (!(t >= 0.0)) throw DomainError("t", "time must be >= 0");
    for (const BasisChoice& b : bases) {
        if (b.fixed) b.fixed->validate();
    }

    std::vector<std::vector<double>> values;
    for (const AxisRange& a : grid.axes) values.push_back(a.values());

    std::vector<ChannelParams> points;
    const auto set = [](ChannelParams& p, SweepAxis axis, double v) {
        switch (axis) {
            case SweepAxis::mu: p.mu = v; break;
            case SweepAxis::zeta: p.zeta = v; break;
            case SweepAxis::alpha: p.alpha = v; break;
        }
    };
    const std::vector<double> one{0.0};
    const auto& inner = values.size() == 2 ? values[1] : one;
    for (double v0 : values[0]) {
        for (double v1 : inner) {
            ChannelParams p = fixed;
            set(p, grid.axes[0].axis, v0);
            if (values.size() == 2) set(p, grid.axes[1].axis, v1);
            points.push_back(p);
        }
    }

    std::vector<SweepRow> rows;
    rows.reserve(points.size() * bases.size());
    for (const ChannelParams& p : points) {
        for (const BasisChoice& b : bases) {
            rows.push_back({p, p.nu1 * t, b.label, std::nullopt});
        }
    }
    // Range errors in the fixed fields are reported before any work starts.
    {
        ChannelParams probe = points.front();
        probe.zeta = 0.0;
        probe.mu = 0.0;
        probe.validate();
    }

    detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        if (!row.params.feasible()) return;
        const BasisChoice& b = bases[i % bases.size()];
        if (b.fixed) {
            const ChiResult r = chi_for_basis(row.params, t, *b.fixed);
            row.result = CapacityResult{r.chi_bits, r.p, b.fixed->m_phi, b.fixed->m_psi,
                                        r.evaluations, r.converged};
        } else {
            row.result = optimize_capacity(row.params, t);
        }
    });
    return rows;
}

}  // namespace qcap
