#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "annealed_ldp/acceptance.hpp"
#include "annealed_ldp/degrees.hpp"
#include "annealed_ldp/edge_ldp.hpp"
#include "annealed_ldp/io.hpp"
#include "annealed_ldp/mc.hpp"
#include "annealed_ldp/oracle.hpp"
#include "annealed_ldp/spin_ldp.hpp"
#include "annealed_ldp/version.hpp"

#include <CLI11.hpp>

namespace annealed_ldp::cli {

// Exit codes: 0 success, 1 validation-suite failure, 2 usage or input error.

struct CommonOpts {
    std::string atoms_spec;
    std::string probs_spec;
    std::string counts_spec;
    std::string output = "-";
    std::string format = "csv";
    bool deterministic = false;
};

namespace detail {

inline WeightModel model_from(const CommonOpts& o) {
    if (o.atoms_spec.empty()) throw validation_error("missing --atoms");
    const auto atoms = parse_grid(o.atoms_spec);
    if (!o.probs_spec.empty() && !o.counts_spec.empty())
        throw validation_error("give either --probs or --counts, not both");
    if (!o.probs_spec.empty()) return make_finite_type(atoms, parse_grid(o.probs_spec));
    if (!o.counts_spec.empty())
        return counts_to_model(parse_longs(o.counts_spec), atoms).first;
    throw validation_error("missing --probs or --counts");
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

inline void base_meta(Table& t, const std::string& command, const CommonOpts& o,
                      const WeightModel& model) {
    t.meta.emplace_back("artifact", std::string("annealed_ldp ") + ANNEALED_LDP_VERSION);
    t.meta.emplace_back("command", command);
    t.meta.emplace_back("atoms", join(model.atoms));
    t.meta.emplace_back("probs", join(model.probs));
    if (!o.deterministic) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        t.meta.emplace_back("timestamp", buf);
    }
}

inline void emit(const Table& t, const CommonOpts& o) {
    atomic_write(o.output, [&](std::ostream& os) {
        if (o.format == "json")
            write_json(os, t);
        else if (o.format == "csv")
            write_csv(os, t);
        else
            throw validation_error("unknown format: " + o.format);
    });
}

inline void add_common(CLI::App* cmd, CommonOpts& o, std::string& config_path,
                       bool with_model = true) {
    if (with_model) {
        cmd->add_option("--atoms", o.atoms_spec, "weight values a_1<...<a_K (comma list)");
        cmd->add_option("--probs", o.probs_spec, "type probabilities (comma list)");
        cmd->add_option("--counts", o.counts_spec, "per-type vertex counts (comma list)");
    }
    cmd->add_option("--output,-o", o.output, "output path ('-' = stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--deterministic", o.deterministic, "suppress the timestamp metadata line");
    cmd->add_option("--config", config_path,
                    "flat key=value file mirroring the flags; flags take precedence");
}

// Expands "--config FILE" into "--key=value" tokens for every key the command
// line does not already carry, so explicit flags always win.
inline void expand_config(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return;
    std::ifstream is(path);
    if (!is) throw validation_error("cannot read config file: " + path);
    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("malformed config line (expected key=value): " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key.empty()) throw validation_error("malformed config line: " + line);
        if (!given(key)) args.push_back("--" + key + "=" + value);
    }
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"annealed Ising thermodynamics and large deviations on rank-1 random graphs"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string config_path;
    std::string beta_spec, B_spec, m_spec, t_spec, y_spec, d_spec, s_spec;
    std::string methods_spec = "contraction";
    double w_value = 0.0;
    bool spin_dist = false;
    long degree_type = -1;
    McConfig mc_cfg;
    std::string suite = "acceptance";
    std::string criteria_spec;

    auto* phase = app.add_subcommand("phase", "pressure, magnetization, susceptibility sweep");
    detail::add_common(phase, o, config_path);
    phase->add_option("--beta", beta_spec, "inverse temperature grid")->required();
    phase->add_option("--B", B_spec, "external field grid")->required();

    auto* rate_spin = app.add_subcommand("rate-spin", "spin large-deviation rate curves");
    detail::add_common(rate_spin, o, config_path);
    rate_spin->add_option("--beta", beta_spec)->required();
    rate_spin->add_option("--B", B_spec)->required();
    rate_spin->add_option("--m", m_spec, "spin-mean grid in (-1,1)")->required();
    rate_spin->add_option("--method", methods_spec,
                          "comma list of contraction|highT|combinatorial");

    auto* rate_edges = app.add_subcommand("rate-edges", "edge-count CGF and rate function");
    detail::add_common(rate_edges, o, config_path);
    rate_edges->add_option("--beta", beta_spec)->required();
    rate_edges->add_option("--B", B_spec)->required();
    rate_edges->add_option("--t", t_spec, "tilt grid (emits the CGF table)");
    rate_edges->add_option("--y", y_spec, "edge-density grid (emits the rate table)");

    auto* degrees_cmd = app.add_subcommand("degrees", "annealed degree MGF / pmf");
    detail::add_common(degrees_cmd, o, config_path);
    degrees_cmd->add_option("--beta", beta_spec)->required();
    degrees_cmd->add_option("--B", B_spec)->required();
    degrees_cmd->add_option("--w", w_value, "vertex weight (omit for a uniform vertex)");
    degrees_cmd->add_option("--t", t_spec, "MGF argument grid");
    degrees_cmd->add_option("--d", d_spec, "degree grid for the pmf (requires --w)");

    auto* oracle_cmd = app.add_subcommand("oracle", "exact finite-n reference quantities");
    detail::add_common(oracle_cmd, o, config_path);
    oracle_cmd->add_option("--beta", beta_spec)->required();
    oracle_cmd->add_option("--B", B_spec)->required();
    oracle_cmd->add_flag("--spin-dist", spin_dist, "emit the exact law of the total spin");
    oracle_cmd->add_option("--t", t_spec, "edge-tilt grid: emit exact edge MGFs");
    oracle_cmd->add_option("--s", s_spec, "degree-tilt grid: emit exact degree MGFs");
    oracle_cmd->add_option("--degree-type", degree_type, "0-based type of the tagged vertex");

    auto* mc_cmd = app.add_subcommand("mc", "Glauber sampler for the equivalent mean-field model");
    detail::add_common(mc_cmd, o, config_path);
    mc_cmd->add_option("--theta", mc_cfg.theta, "mean-field coupling")->required();
    mc_cmd->add_option("--B", mc_cfg.B, "external field")->required();
    mc_cmd->add_option("--sweeps", mc_cfg.sweeps)->required();
    mc_cmd->add_option("--burn-in", mc_cfg.burn_in);
    mc_cmd->add_option("--thin", mc_cfg.thin);
    mc_cmd->add_option("--seed", mc_cfg.seed);

    auto* validate = app.add_subcommand("validate", "run the built-in validation suites");
    validate->add_option("--suite", suite, "suite name (acceptance)");
    validate->add_option("--criteria", criteria_spec, "comma list of criterion ids to run");
    validate->add_option("--config", config_path, "flat key=value file mirroring the flags");

    try {
        detail::expand_config(args);
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const validation_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help and friends
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (phase->parsed()) {
            const auto model = detail::model_from(o);
            const auto betas = parse_grid(beta_spec);
            const auto Bs = parse_grid(B_spec);
            Table t;
            detail::base_meta(t, "phase", o, model);
            t.meta.emplace_back("beta", beta_spec);
            t.meta.emplace_back("B", B_spec);
            t.columns = {"beta", "B", "z_star", "psi_an", "magnetization", "susceptibility",
                         "beta_c"};
            t.rows.resize(betas.size() * Bs.size());
            parallel_for(t.rows.size(), [&](std::size_t i) {
                const double beta = betas[i / Bs.size()];
                const double B = Bs[i % Bs.size()];
                const auto r = thermo_report({beta, B, model});
                t.rows[i] = {beta, B, r.z_star, r.psi_an, r.magnetization, r.susceptibility,
                             r.beta_c};
            });
            detail::emit(t, o);
            return 0;
        }
        if (rate_spin->parsed()) {
            const auto model = detail::model_from(o);
            const auto betas = parse_grid(beta_spec);
            const auto Bs = parse_grid(B_spec);
            if (betas.size() != 1 || Bs.size() != 1)
                throw validation_error("rate-spin expects single --beta and --B values");
            const ModelPoint p{betas[0], Bs[0], model};
            const auto ms = parse_grid(m_spec);
            std::vector<SpinRateMethod> methods;
            {
                std::stringstream ss(methods_spec);
                std::string cell;
                while (std::getline(ss, cell, ',')) {
                    if (cell == "contraction")
                        methods.push_back(SpinRateMethod::contraction);
                    else if (cell == "highT")
                        methods.push_back(SpinRateMethod::highT_legendre);
                    else if (cell == "combinatorial")
                        methods.push_back(SpinRateMethod::combinatorial);
                    else
                        throw validation_error("unknown rate-spin method: " + cell);
                }
            }
            if (methods.empty()) throw validation_error("no rate-spin method given");
            Table t;
            detail::base_meta(t, "rate-spin", o, model);
            t.meta.emplace_back("beta", format_double(p.beta));
            t.meta.emplace_back("B", format_double(p.B));
            t.columns = {"m"};
            std::vector<SpinRateCurve> curves;
            for (auto method : methods) {
                curves.push_back(spin_rate_curve(ms, p, method));
                t.columns.push_back(std::string("rate_") + to_string(method));
            }
            for (std::size_t i = 0; i < ms.size(); ++i) {
                std::vector<double> row{ms[i]};
                for (const auto& c : curves) row.push_back(c.values[i]);
                t.rows.push_back(std::move(row));
            }
            detail::emit(t, o);
            return 0;
        }
        if (rate_edges->parsed()) {
            const auto model = detail::model_from(o);
            const ModelPoint p{parse_grid(beta_spec).at(0), parse_grid(B_spec).at(0), model};
            if (t_spec.empty() == y_spec.empty())
                throw validation_error("rate-edges expects exactly one of --t or --y");
            Table t;
            detail::base_meta(t, "rate-edges", o, model);
            t.meta.emplace_back("beta", format_double(p.beta));
            t.meta.emplace_back("B", format_double(p.B));
            if (!t_spec.empty()) {
                const auto ts = parse_grid(t_spec);
                t.columns = {"t", "cgf", "cgf_derivative", "z_star_t"};
                t.rows.resize(ts.size());
                parallel_for(ts.size(), [&](std::size_t i) {
                    const auto e = edge_cgf(ts[i], p);
                    t.rows[i] = {e.t, e.value, e.derivative, e.z_star_t};
                });
            } else {
                const auto ys = parse_grid(y_spec);
                t.columns = {"y", "rate", "t_star"};
                t.rows.resize(ys.size());
                parallel_for(ys.size(), [&](std::size_t i) {
                    const auto r = edge_rate(ys[i], p);
                    t.rows[i] = {ys[i], r.value, r.t1};
                });
            }
            detail::emit(t, o);
            return 0;
        }
        if (degrees_cmd->parsed()) {
            const auto model = detail::model_from(o);
            const ModelPoint p{parse_grid(beta_spec).at(0), parse_grid(B_spec).at(0), model};
            Table t;
            detail::base_meta(t, "degrees", o, model);
            t.meta.emplace_back("beta", format_double(p.beta));
            t.meta.emplace_back("B", format_double(p.B));
            if (w_value > 0.0) {
                const auto mix = degree_mixture(w_value, p);
                t.meta.emplace_back("w", format_double(w_value));
                t.meta.emplace_back("mixture_rate_plus", format_double(mix.rate_plus));
                t.meta.emplace_back("mixture_rate_minus", format_double(mix.rate_minus));
                t.meta.emplace_back("mixture_weight_plus", format_double(mix.weight_plus));
                t.meta.emplace_back("mixture_valid_pmf", mix.valid_pmf ? "true" : "false");
            }
            if (!d_spec.empty()) {
                if (!(w_value > 0.0)) throw validation_error("--d requires --w");
                const auto ds = parse_grid(d_spec);
                t.columns = {"d", "pmf"};
                for (double d : ds)
                    t.rows.push_back({d, degree_pmf(std::lround(d), w_value, p)});
            } else if (!t_spec.empty()) {
                const auto ts = parse_grid(t_spec);
                t.columns = {"t", "mgf"};
                t.rows.resize(ts.size());
                parallel_for(ts.size(), [&](std::size_t i) {
                    const double v =
                        w_value > 0.0 ? degree_mgf(ts[i], w_value, p) : uniform_degree_mgf(ts[i], p);
                    t.rows[i] = {ts[i], v};
                });
            } else {
                throw validation_error("degrees expects --t (MGF) or --d (pmf)");
            }
            detail::emit(t, o);
            return 0;
        }
        if (oracle_cmd->parsed()) {
            if (o.counts_spec.empty() || o.atoms_spec.empty())
                throw validation_error("oracle expects --counts and --atoms");
            const auto counts = parse_longs(o.counts_spec);
            const auto atoms = parse_grid(o.atoms_spec);
            const double beta = parse_grid(beta_spec).at(0);
            const double B = parse_grid(B_spec).at(0);
            const auto inst = make_exact_instance(counts, atoms, beta, B);
            const auto model = counts_to_model(counts, atoms).first;
            Table t;
            detail::base_meta(t, "oracle", o, model);
            t.meta.emplace_back("counts", o.counts_spec);
            t.meta.emplace_back("beta", format_double(beta));
            t.meta.emplace_back("B", format_double(B));
            if (spin_dist) {
                const auto dist = exact_spin_distribution(inst);
                t.columns = {"s", "prob"};
                for (long u = 0; u <= dist.n; ++u)
                    t.rows.push_back({static_cast<double>(2 * u - dist.n), dist.pmf[u]});
            } else if (!t_spec.empty()) {
                const auto ts = parse_grid(t_spec);
                t.columns = {"t", "log_mgf_per_vertex", "mgf"};
                for (double tv : ts) {
                    const double lm = exact_log_edge_mgf(tv, inst);
                    t.rows.push_back({tv, lm / inst.n, std::exp(lm)});
                }
            } else if (!s_spec.empty()) {
                if (degree_type < 0) throw validation_error("--s requires --degree-type");
                const auto ss = parse_grid(s_spec);
                t.columns = {"s", "mgf"};
                for (double sv : ss)
                    t.rows.push_back(
                        {sv, exact_degree_mgf(sv, static_cast<std::size_t>(degree_type), inst)});
            } else {
                t.columns = {"n", "log_partition", "pressure"};
                const double lz = exact_log_partition(inst);
                t.rows.push_back({static_cast<double>(inst.n), lz, lz / inst.n});
            }
            detail::emit(t, o);
            return 0;
        }
        if (mc_cmd->parsed()) {
            if (o.counts_spec.empty() || o.atoms_spec.empty())
                throw validation_error("mc expects --counts and --atoms");
            mc_cfg.counts = parse_longs(o.counts_spec);
            mc_cfg.atoms = parse_grid(o.atoms_spec);
            if (mc_cfg.burn_in == 0) mc_cfg.burn_in = mc_cfg.sweeps / 5;
            const auto res = glauber_run(mc_cfg);
            const auto model = counts_to_model(mc_cfg.counts, mc_cfg.atoms).first;
            Table t;
            detail::base_meta(t, "mc", o, model);
            t.meta.emplace_back("counts", o.counts_spec);
            t.meta.emplace_back("theta", format_double(mc_cfg.theta));
            t.meta.emplace_back("B", format_double(mc_cfg.B));
            t.meta.emplace_back("algorithm", res.algorithm);
            t.meta.emplace_back("prng", res.prng);
            t.meta.emplace_back("seed", std::to_string(res.seed_echo));
            t.columns = {"mean_magnetization", "std_error", "mean_weighted_magnetization",
                         "samples_used"};
            t.rows.push_back({res.mean_magnetization, res.std_error,
                              res.mean_weighted_magnetization,
                              static_cast<double>(res.samples_used)});
            detail::emit(t, o);
            return 0;
        }
        if (validate->parsed()) {
            if (suite != "acceptance") throw validation_error("unknown suite: " + suite);
            std::set<int> only;
            if (!criteria_spec.empty())
                for (long id : parse_longs(criteria_spec)) only.insert(static_cast<int>(id));
            bool all_pass = true;
            acceptance::run_criteria(only, [&](const acceptance::CriterionResult& r) {
                acceptance::print_result(out, r);
                all_pass = all_pass && r.pass;
            });
            out << (all_pass ? "all criteria passed\n" : "some criteria FAILED\n");
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no command\n";
    return 2;
}

inline int run_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args));
}

}  // namespace annealed_ldp::cli
