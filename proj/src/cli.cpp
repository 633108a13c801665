#include "qcap/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "parallel.hpp"
#include "qcap/errors.hpp"

namespace qcap::cli {

namespace {

const std::set<std::string, std::less<>> kCommands = {"capacity", "sweep", "limits", "pulse"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

double parse_double(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(field, "'" + text + "' is not a number");
    }
}

std::string option_name(std::string_view token) {
    std::string name(token.substr(2));
    const auto eq = name.find('=');
    if (eq != std::string::npos) name.resize(eq);
    return name;
}

// Reads key=value lines into "--key value" tokens, skipping keys already
// given as flags. A "command" key supplies the subcommand.
std::vector<std::string> config_tokens(const std::string& path, const std::set<std::string>& present,
                                       std::string& command) {
    std::ifstream in(path);
    if (!in) throw IoError("config", "cannot read '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config", path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(body.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string value = trim(body.substr(eq + 1));
        if (key == "command") {
            if (command.empty()) command = value;
            continue;
        }
        if (key == "config") throw UsageError("config", "config files cannot include other config files");
        if (present.count(key) != 0) continue;
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

AxisRange parse_range(const std::string& text, const std::string& field, SweepAxis axis) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError(field, "expected start:stop:step, got '" + text + "'");
    AxisRange r;
    r.axis = axis;
    r.start = parse_double(parts[0], field);
    r.stop = parse_double(parts[1], field);
    r.step = parse_double(parts[2], field);
    return r;
}

AxisRange parse_axis(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw UsageError("axis", "expected name:start:stop:step, got '" + text + "'");
    }
    const SweepAxis axis = parse_sweep_axis(text.substr(0, colon));
    return parse_range(text.substr(colon + 1), "axis", axis);
}

std::vector<BasisChoice> resolve_bases(const RunConfig& cfg) {
    std::vector<BasisChoice> out;
    if (cfg.m_phi.has_value() != cfg.m_psi.has_value()) {
        throw UsageError(cfg.m_phi ? "m_psi" : "m_phi", "a fixed basis needs both --m-phi and --m-psi");
    }
    if (cfg.m_phi) {
        BasisChoice c{"custom", BasisParams{*cfg.m_phi, *cfg.m_psi}};
        c.fixed->validate();
        out.push_back(c);
    }
    for (const std::string& b : cfg.bases) {
        if (b == "opt") {
            out.push_back(BasisChoice::optimize());
        } else if (b == "fac") {
            out.push_back(BasisChoice::family(BasisFamily::factorized));
        } else if (b == "bell" || b == "ent") {
            out.push_back(BasisChoice::family(BasisFamily::bell));
        } else if (b == "com") {
            out.push_back(BasisChoice::family(BasisFamily::combined));
        } else {
            throw UsageError("basis", "expected opt, fac, bell or com, got '" + b + "'");
        }
    }
    if (out.empty()) out.push_back(BasisChoice::optimize());
    return out;
}

ChannelParams channel_of(const RunConfig& cfg) {
    return ChannelParams{cfg.nu1, cfg.alpha, cfg.zeta, cfg.mu};
}

// Channel-use time that realizes cfg.nu_t at rate nu1.
double time_of(const RunConfig& cfg) {
    if (!(cfg.nu_t >= 0.0)) throw DomainError("nu_t", "must be >= 0");
    return cfg.nu1 > 0.0 ? cfg.nu_t / cfg.nu1 : 0.0;
}

unsigned thread_count(const RunConfig& cfg) {
    if (cfg.threads != 0) return cfg.threads;
    if (const char* env = std::getenv("QCAP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 0;
}

std::vector<SweepRow> evaluate_point(const ChannelParams& params, double t,
                                     const std::vector<BasisChoice>& bases, unsigned threads) {
    params.validate();
    std::vector<SweepRow> rows;
    for (const BasisChoice& b : bases) rows.push_back({params, params.nu1 * t, b.label, std::nullopt});
    detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
        const BasisChoice& b = bases[i];
        if (b.fixed) {
            const ChiResult r = chi_for_basis(params, t, *b.fixed);
            rows[i].result = CapacityResult{r.chi_bits, r.p, b.fixed->m_phi, b.fixed->m_psi,
                                            r.evaluations, r.converged};
        } else {
            rows[i].result = optimize_capacity(params, t);
        }
    });
    return rows;
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
    if (path == "-" || path.empty()) return &std::cout;
    file.open(path, std::ios::out | std::ios::trunc);
    if (!file) throw IoError("output", "cannot open '" + path + "' for writing");
    return &file;
}

void finish_output(const std::string& path, std::ofstream& file) {
    if (file.is_open()) {
        file.close();
        if (!file) throw IoError("output", "failed writing '" + path + "'");
    } else {
        std::cout.flush();
    }
}

void run_capacity(const RunConfig& cfg, std::ostream&) {
    const auto rows = evaluate_point(channel_of(cfg), time_of(cfg), resolve_bases(cfg), thread_count(cfg));
    emit_csv(rows, cfg.output);
}

void run_sweep(const RunConfig& cfg, std::ostream& diag) {
    if (cfg.axes.empty()) throw UsageError("axis", "sweep needs at least one --axis name:start:stop:step");
    if (cfg.axes.size() > 2) throw UsageError("axis", "at most two swept axes are supported");
    SweepGrid grid;
    for (const std::string& a : cfg.axes) grid.axes.push_back(parse_axis(a));
    const auto rows = sweep_capacity(grid, channel_of(cfg), time_of(cfg), resolve_bases(cfg),
                                     thread_count(cfg));
    const auto skipped = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.skipped(); });
    if (skipped > 0) diag << "qcap: " << skipped << " row(s) skipped: zeta^2 + mu^2 > 1\n";
    emit_csv(rows, cfg.output);
}

std::string relation_text(const LimitRelation& r) {
    std::string s = std::string(to_string(r.lhs_case)) + ":" + std::string(to_string(r.lhs_basis)) + "=" +
                    std::string(to_string(r.rhs_case)) + ":" + std::string(to_string(r.rhs_basis)) + "+eps";
    if (r.includes_f) s += "+f";
    return s;
}

void run_limits(const RunConfig& cfg, std::ostream& diag) {
    const std::vector<double> ps = parse_range(cfg.limit_grid, "grid", SweepAxis::mu).values();
    std::vector<LimitCase> cases;
    for (const std::string& c : cfg.limit_cases) cases.push_back(parse_limit_case(c));
    if (cases.empty()) cases = {LimitCase::b, LimitCase::a, LimitCase::d, LimitCase::c};
    f_closed_form(cfg.nu_t);  // rejects nu_t below the cutoff before any work

    std::vector<LimitResidual> results(cases.size() * ps.size());
    detail::parallel_for(results.size(), thread_count(cfg), [&](std::size_t i) {
        results[i] = evaluate_limit_relation(cases[i / ps.size()], ps[i % ps.size()], cfg.nu_t);
    });

    std::ofstream file;
    std::ostream& os = *open_output(cfg.output, file);
    os << kLimitsHeader << '\n';
    double worst = 0.0;
    for (const LimitResidual& r : results) {
        os << to_string(r.relation.lhs_case) << ',' << relation_text(r.relation) << ','
           << format_number(r.p) << ',' << format_number(r.nu_t) << ',' << format_number(r.lhs_bits)
           << ',' << format_number(r.rhs_bits) << ',' << format_number(r.f_term) << ','
           << format_number(r.residual_bits) << '\n';
        worst = std::max(worst, std::abs(r.residual_bits));
    }
    finish_output(cfg.output, file);
    diag << "qcap: max |residual| = " << format_number(worst) << " bits\n";
}

void run_pulse(const RunConfig& cfg, std::ostream& diag) {
    const PulseConfig& pc = cfg.pulse;
    const double w1 = pc.width;
    const double w2 = pc.width2 > 0.0 ? pc.width2 : pc.width;
    if (!(w1 > 0.0)) throw DomainError("width", "pulse width must be > 0");
    if (!(pc.delay >= 0.0)) throw DomainError("delay", "pulse delay must be >= 0");
    if (!(pc.amp2 >= 0.0)) throw DomainError("amp2", "pulse amplitude must be >= 0");
    if (pc.steps < 2) throw DomainError("steps", "need at least 2 time steps");

    PulsePair pulses;
    double duration = pc.duration;
    if (pc.envelope == "gaussian") {
        const double center = 5.0 * std::max(w1, w2);
        pulses = {PulseSpec::gaussian(w1, center, 1.0, pc.chirp, pc.carrier, 0.0),
                  PulseSpec::gaussian(w2, center, pc.amp2, pc.chirp, pc.carrier, pc.delay)};
        if (duration <= 0.0) duration = pc.delay + 2.0 * center;
    } else if (pc.envelope == "flat") {
        pulses = {PulseSpec::flat(0.0, w1, 1.0, pc.chirp, pc.carrier, 0.0),
                  PulseSpec::flat(0.0, w2, pc.amp2, pc.chirp, pc.carrier, pc.delay)};
        if (duration <= 0.0) duration = std::max(w1, pc.delay + w2);
    } else {
        throw UsageError("envelope", "expected gaussian or flat, got '" + pc.envelope + "'");
    }
    if (!(duration > 0.0)) throw DomainError("duration", "must be > 0");

    CorrelationFn corr;
    corr.kind = parse_correlation_kind(pc.corr);
    corr.t_c = pc.t_c;
    corr.scale = pc.scale;
    corr.bias = pc.bias;
    corr.validate();

    std::vector<double> grid(pc.steps + 1);
    for (int i = 0; i <= pc.steps; ++i) grid[i] = duration * i / pc.steps;
    const unsigned threads = thread_count(cfg);
    const RateTrajectory traj = rate_trajectory(pulses, corr, grid, threads);

    if (!pc.trajectory_out.empty()) {
        std::ofstream tf(pc.trajectory_out, std::ios::out | std::ios::trunc);
        if (!tf) throw IoError("trajectory-out", "cannot open '" + pc.trajectory_out + "' for writing");
        tf << kTrajectoryHeader << '\n';
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const Matrix2& r = traj.raw[i];
            tf << format_number(traj.times[i]) << ',' << format_number(r(0, 0)) << ','
               << format_number(r(0, 1)) << ',' << format_number(r(1, 0)) << ','
               << format_number(r(1, 1)) << '\n';
        }
        tf.close();
        if (!tf) throw IoError("trajectory-out", "failed writing '" + pc.trajectory_out + "'");
    }

    const EffectiveParams eff = effective_params(traj, duration);
    if (eff.clamped) diag << "qcap: warning: zeta, mu rescaled onto the feasible disk (round-off)\n";
    diag << "qcap: effective nu1=" << format_number(eff.params.nu1)
         << " alpha=" << format_number(eff.params.alpha) << " zeta=" << format_number(eff.params.zeta)
         << " mu=" << format_number(eff.params.mu) << " nu_t=" << format_number(eff.params.nu1 * duration)
         << '\n';
    const auto rows = evaluate_point(eff.params, duration, resolve_bases(cfg), threads);
    emit_csv(rows, cfg.output);
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kCsvHeader << '\n';
    for (const SweepRow& row : rows) {
        os << format_number(row.params.mu) << ',' << format_number(row.params.zeta) << ','
           << format_number(row.params.alpha) << ',' << format_number(row.nu_t) << ',' << row.basis << ',';
        if (!row.result) {
            os << ",,,,,,,skipped\n";
            continue;
        }
        const CapacityResult& r = *row.result;
        os << format_number(r.m_phi) << ',' << format_number(r.m_psi);
        for (double p : r.p) os << ',' << format_number(p);
        os << ',' << format_number(r.capacity_bits) << ',' << (r.converged ? "ok" : "unconverged") << '\n';
    }
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream file;
    std::ostream& os = *open_output(path, file);
    write_csv(os, rows);
    finish_output(path, file);
}

std::optional<RunConfig> parse_args(const std::vector<std::string>& args_in, std::ostream& out) {
    std::vector<std::string> args = args_in;
    std::string config_path;
    std::set<std::string> present;
    std::string command;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) == 0) {
            const std::string name = option_name(a);
            present.insert(name);
            if (name == "config") {
                if (a.find('=') != std::string::npos) {
                    config_path = a.substr(a.find('=') + 1);
                } else if (i + 1 < args.size()) {
                    config_path = args[i + 1];
                } else {
                    throw UsageError("config", "--config needs a file path");
                }
            }
        } else if (command.empty() && kCommands.count(a) != 0) {
            command = a;
        }
    }
    if (!config_path.empty()) {
        std::string from_file;
        const auto extra = config_tokens(config_path, present, from_file);
        if (command.empty() && !from_file.empty()) {
            if (kCommands.count(from_file) == 0) {
                throw UsageError("command", "unknown command '" + from_file + "' in config");
            }
            args.insert(args.begin(), from_file);
        }
        args.insert(args.end(), extra.begin(), extra.end());
    }

    RunConfig cfg;
    CLI::App app{"Holevo capacity of a two-qubit noisy channel with memory, asymmetry and bias", "qcap"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_unused;
    app.add_option("--config", config_unused, "key=value file; flags take precedence");
    app.add_option("--nu1", cfg.nu1, "decay-sector rate magnitude nu1");
    app.add_option("--alpha", cfg.alpha, "state bias in [0,1]");
    app.add_option("--zeta", cfg.zeta, "asymmetry in [0,1]");
    app.add_option("--mu", cfg.mu, "memory in [0,1]");
    app.add_option("--nu-t", cfg.nu_t, "dimensionless channel time nu1*t");
    app.add_option("--axis", cfg.axes, "swept axis name:start:stop:step (mu, zeta, alpha)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--basis", cfg.bases, "opt | fac | bell | com (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--m-phi", cfg.m_phi, "fixed basis m_phi (with --m-psi)");
    app.add_option("--m-psi", cfg.m_psi, "fixed basis m_psi (with --m-phi)");
    app.add_option("--grid", cfg.limit_grid, "limits: p grid start:stop:step");
    app.add_option("--case", cfg.limit_cases, "limits: relation by left-hand case a|b|c|d (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--envelope", cfg.pulse.envelope, "pulse: gaussian | flat");
    app.add_option("--width", cfg.pulse.width, "pulse: width of the first pulse");
    app.add_option("--width2", cfg.pulse.width2, "pulse: width of the second pulse (default: --width)");
    app.add_option("--delay", cfg.pulse.delay, "pulse: delay of the second pulse");
    app.add_option("--amp2", cfg.pulse.amp2, "pulse: amplitude of the second pulse");
    app.add_option("--chirp", cfg.pulse.chirp, "pulse: quadratic phase coefficient");
    app.add_option("--carrier", cfg.pulse.carrier, "pulse: carrier detuning");
    app.add_option("--corr", cfg.pulse.corr, "pulse: exponential | gaussian | delta");
    app.add_option("--t-c", cfg.pulse.t_c, "pulse: bath correlation time");
    app.add_option("--scale", cfg.pulse.scale, "pulse: correlation amplitude");
    app.add_option("--bias", cfg.pulse.bias, "pulse: upward/downward rate ratio in [0,1]");
    app.add_option("--duration", cfg.pulse.duration, "pulse: channel-use duration (default: both pulses)");
    app.add_option("--steps", cfg.pulse.steps, "pulse: time steps of the rate trajectory");
    app.add_option("--trajectory-out", cfg.pulse.trajectory_out, "pulse: CSV path for R_jk(t)");
    app.add_option("-o,--output", cfg.output, "CSV output path ('-' for stdout)");
    app.add_option("--seed", cfg.seed, "recorded seed (the optimizer is deterministic)");
    app.add_option("--threads", cfg.threads, "worker threads (default: QCAP_THREADS or all cores)");

    for (const auto& [name, help] : {std::pair{"capacity", "optimal capacity at one channel point"},
                                     std::pair{"sweep", "capacity over a 1- or 2-axis parameter grid"},
                                     std::pair{"limits", "residuals of the extreme-limit relations"},
                                     std::pair{"pulse", "effective channel from two shaped pulses"}}) {
        app.add_subcommand(name, help)->fallthrough();
    }
    app.require_subcommand(1);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError("", e.what());
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return cfg;
}

void run(const RunConfig& config, std::ostream& diag) {
    if (config.command == "capacity") {
        run_capacity(config, diag);
    } else if (config.command == "sweep") {
        run_sweep(config, diag);
    } else if (config.command == "limits") {
        run_limits(config, diag);
    } else if (config.command == "pulse") {
        run_pulse(config, diag);
    } else {
        throw UsageError("command", "unknown command '" + config.command + "'");
    }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = parse_args(args, out);
        if (!cfg) return kExitOk;
        run(*cfg, err);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "qcap: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "qcap: error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ConstraintError& e) {
        err << "qcap: error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const NumericalError& e) {
        err << "qcap: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const IoError& e) {
        err << "qcap: i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "qcap: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace qcap::cli
