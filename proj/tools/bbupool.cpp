// Command-line surface: single-point analysis, latency/savings sweeps, and
// simulator runs, with CSV/JSON outputs suitable for plotting.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bbupool/config.hpp"
#include "bbupool/errors.hpp"
#include "bbupool/latency.hpp"
#include "bbupool/markov.hpp"
#include "bbupool/savings.hpp"
#include "bbupool/simulator.hpp"

namespace {

using bbupool::ConfigError;
using bbupool::SystemConfig;
using json = nlohmann::ordered_json;

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) {
                ++pos;
            }
            if (pos != item.size()) {
                throw std::invalid_argument(item);
            }
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("could not parse '" + item + "' in " + what);
        }
    }
    if (out.empty()) {
        throw ConfigError(what + " must contain at least one value");
    }
    return out;
}

void apply_config_key(SystemConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& where) {
    auto as_int = [&](const std::string& v) {
        try {
            return std::stoi(v);
        } catch (const std::exception&) {
            throw ConfigError(where + ": integer expected for key '" + key + "'");
        }
    };
    auto as_double = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw ConfigError(where + ": number expected for key '" + key + "'");
        }
    };

    if (key == "num_rrh") {
        cfg.num_rrh = as_int(value);
    } else if (key == "max_concurrent") {
        cfg.max_concurrent = as_int(value);
    } else if (key == "frame_duration" || key == "frame") {
        cfg.frame_duration = as_double(value);
    } else if (key == "service_rate") {
        cfg.service_rate = as_double(value);
    } else if (key == "lambda" || key == "arrival_rates") {
        cfg.arrival_rates = parse_double_list(value, where + " key '" + key + "'");
    } else if (key == "queue_truncation") {
        cfg.queue_truncation = as_int(value);
    } else if (key == "quadrature_abs_tol") {
        cfg.tolerances.quadrature_abs_tol = as_double(value);
    } else if (key == "poisson_tail_mass") {
        cfg.tolerances.poisson_tail_mass = as_double(value);
    } else if (key == "power_iter_tol") {
        cfg.tolerances.power_iter_tol = as_double(value);
    } else if (key == "percentile_tol") {
        cfg.tolerances.percentile_tol = as_double(value);
    } else {
        throw ConfigError(where + ": unknown config key '" + key + "'");
    }
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

SystemConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    SystemConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = path + " line " + std::to_string(line_no);
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(where + ": empty key or value");
        }
        apply_config_key(cfg, key, value, where);
    }
    return cfg;
}

std::string format_config(const SystemConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "num_rrh = " << cfg.num_rrh << "\n";
    out << "max_concurrent = " << cfg.max_concurrent << "\n";
    out << "frame_duration = " << cfg.frame_duration << "\n";
    out << "service_rate = " << cfg.service_rate << "\n";
    out << "lambda = ";
    for (std::size_t j = 0; j < cfg.arrival_rates.size(); ++j) {
        out << (j ? "," : "") << cfg.arrival_rates[j];
    }
    out << "\n";
    out << "queue_truncation = " << cfg.queue_truncation << "\n";
    out << "quadrature_abs_tol = " << cfg.tolerances.quadrature_abs_tol << "\n";
    out << "poisson_tail_mass = " << cfg.tolerances.poisson_tail_mass << "\n";
    out << "power_iter_tol = " << cfg.tolerances.power_iter_tol << "\n";
    out << "percentile_tol = " << cfg.tolerances.percentile_tol << "\n";
    return out.str();
}

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string dump_config_path;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
    cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set lambda=5,5");
    cmd->add_option("--dump-config", opts.dump_config_path,
                    "Write the effective config to this path");
}

SystemConfig resolve_config(const CommonOptions& opts) {
    SystemConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = load_config_file(opts.config_path);
    }
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        apply_config_key(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), "--set");
    }
    cfg.validate();
    if (!opts.dump_config_path.empty()) {
        std::ofstream out(opts.dump_config_path);
        if (!out) {
            throw ConfigError("cannot write config dump to '" + opts.dump_config_path + "'");
        }
        out << format_config(cfg);
    }
    return cfg;
}

std::unique_ptr<std::ostream> open_output(const std::string& path) {
    if (path.empty() || path == "-") {
        return nullptr;  // caller uses std::cout
    }
    auto out = std::make_unique<std::ofstream>(path);
    if (!*out) {
        throw ConfigError("cannot open output file '" + path + "'");
    }
    return out;
}

std::string zeta_label(double zeta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "p%g", zeta * 100.0);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Per-RRH analysis summary, chains deduplicated by (share, lambda).
struct RrhAnalysis {
    int index = 0;
    double lambda = 0.0;
    int share = 0;
    bool solved = false;
    std::string note;
    double mean_occupancy = 0.0;
    double tail_mass = 0.0;
    double atom_weight = 0.0;
    std::map<double, double> percentiles;  // zeta -> t2 percentile
    bbupool::LatencyMixture mixture;
};

std::vector<RrhAnalysis> analyze_rrhs(const SystemConfig& cfg, int servers,
                                      const std::vector<double>& zetas) {
    std::map<std::pair<int, double>, RrhAnalysis> cache;
    std::vector<RrhAnalysis> out;
    for (int j = 0; j < cfg.num_rrh; ++j) {
        const double lambda = cfg.arrival_rates[j];
        const int share = bbupool::per_rrh_servers(cfg, servers, j);
        const auto key = std::make_pair(share, lambda);
        auto it = cache.find(key);
        if (it == cache.end()) {
            RrhAnalysis a;
            a.lambda = lambda;
            a.share = share;
            if (share < 1) {
                a.note = "proportional split assigns no server; chain undefined";
            } else {
                const auto tm = bbupool::build_transition_matrix(cfg, j, share);
                const auto pi =
                    bbupool::stationary_distribution(tm, cfg.tolerances.power_iter_tol);
                a.mean_occupancy = 0.0;
                for (int q = 0; q <= tm.q_max; ++q) {
                    a.mean_occupancy += q * pi.probs(q);
                }
                a.tail_mass = pi.probs(tm.q_max);
                a.mixture = bbupool::queuing_time_mixture(pi, lambda, share,
                                                          cfg.service_rate,
                                                          cfg.frame_duration);
                a.atom_weight = a.mixture.atom_weight;
                const auto cdf = bbupool::queuing_cdf(a.mixture);
                for (double z : zetas) {
                    a.percentiles[z] = bbupool::percentile(cdf, z, cfg.frame_duration,
                                                           cfg.tolerances.percentile_tol);
                }
                a.solved = true;
            }
            it = cache.emplace(key, std::move(a)).first;
        }
        RrhAnalysis copy = it->second;
        copy.index = j;
        out.push_back(std::move(copy));
    }
    return out;
}

int cmd_analyze(const CommonOptions& common, int servers, std::vector<double> zetas,
                const std::string& format, const std::string& cdf_out, double cdf_max,
                int cdf_steps, const std::string& out_path) {
    const SystemConfig cfg = resolve_config(common);
    std::sort(zetas.begin(), zetas.end());
    const auto rep = bbupool::stability_check(cfg, servers);

    const bool divergent = rep.rho_bbu >= 1.0;
    bool any_rrh_overloaded = false;
    for (int j = 0; j < cfg.num_rrh; ++j) {
        any_rrh_overloaded = any_rrh_overloaded || rep.rho_rrh[j] >= 1.0;
    }

    std::vector<RrhAnalysis> rrhs;
    if (!divergent && !any_rrh_overloaded) {
        rrhs = analyze_rrhs(cfg, servers, zetas);
    }

    auto sink = open_output(out_path);
    std::ostream& os = sink ? *sink : std::cout;

    if (format == "json") {
        json doc;
        doc["servers"] = servers;
        doc["rho_bbu"] = rep.rho_bbu;
        doc["rho_rrh"] = std::vector<double>(rep.rho_rrh.data(),
                                             rep.rho_rrh.data() + rep.rho_rrh.size());
        doc["stable"] = rep.stable;
        doc["divergent"] = divergent || any_rrh_overloaded;
        doc["rrh"] = json::array();
        for (const auto& a : rrhs) {
            json r;
            r["index"] = a.index;
            r["lambda"] = a.lambda;
            r["share"] = a.share;
            if (!a.note.empty()) {
                r["note"] = a.note;
            }
            if (a.solved) {
                r["mean_occupancy"] = a.mean_occupancy;
                r["tail_mass"] = a.tail_mass;
                r["atom_weight"] = a.atom_weight;
                json p;
                for (const auto& [z, v] : a.percentiles) {
                    p[zeta_label(z)] = v;
                }
                r["t2_percentiles"] = p;
            }
            doc["rrh"].push_back(r);
        }
        os << doc.dump(2) << "\n";
    } else {
        os << "pool: c=" << servers << " rho_bbu=" << fmt(rep.rho_bbu)
           << " stable=" << (rep.stable ? "yes" : "no") << "\n";
        if (divergent || any_rrh_overloaded) {
            os << "utilization >= 1: occupancy chain divergent, latency analysis skipped\n";
        }
        for (const auto& a : rrhs) {
            os << "rrh " << a.index << ": lambda=" << fmt(a.lambda) << " share=" << a.share;
            if (!a.note.empty()) {
                os << " (" << a.note << ")\n";
                continue;
            }
            os << " mean_q=" << fmt(a.mean_occupancy) << " tail_mass=" << fmt(a.tail_mass)
               << " atom=" << fmt(a.atom_weight);
            for (const auto& [z, v] : a.percentiles) {
                os << " " << zeta_label(z) << "(t2)=" << fmt(v);
            }
            os << "\n";
        }
    }

    if (!cdf_out.empty() && !rrhs.empty()) {
        auto file = open_output(cdf_out);
        std::ostream& cs = file ? *file : std::cout;
        cs << "rrh,t,cdf_t2,cdf_system,cdf_total\n";
        for (const auto& a : rrhs) {
            if (!a.solved) {
                continue;
            }
            const auto t2 = bbupool::queuing_cdf(a.mixture);
            const auto sys_cdf = bbupool::system_time_cdf(a.mixture, cfg.service_rate);
            const auto total = bbupool::total_time_cdf(sys_cdf, cfg.frame_duration);
            double tmax = cdf_max;
            if (tmax <= 0.0) {
                const double zmax = zetas.empty() ? 0.99 : zetas.back();
                tmax = 1.5 * bbupool::percentile(total, zmax, cfg.frame_duration,
                                                 cfg.tolerances.percentile_tol);
                tmax = std::max(tmax, cfg.frame_duration);
            }
            for (int s = 0; s <= cdf_steps; ++s) {
                const double t = tmax * s / cdf_steps;
                cs << a.index << "," << fmt_full(t) << "," << fmt_full(t2(t)) << ","
                   << fmt_full(sys_cdf(t)) << "," << fmt_full(total(t)) << "\n";
            }
        }
    }
    return 0;
}

int cmd_sweep_servers(const CommonOptions& common, int from, int to, int step,
                      std::vector<double> zetas, const std::string& lambda_grid,
                      const std::string& out_path) {
    SystemConfig base = resolve_config(common);
    std::sort(zetas.begin(), zetas.end());

    std::vector<SystemConfig> curves;
    std::vector<double> labels;
    if (!lambda_grid.empty()) {
        for (double lam : parse_double_list(lambda_grid, "--lambda-grid")) {
            SystemConfig cfg = base;
            cfg.arrival_rates.assign(cfg.num_rrh, lam);
            curves.push_back(cfg);
            labels.push_back(lam);
        }
    } else {
        curves.push_back(base);
        labels.push_back(base.total_arrival_rate() / base.num_rrh);
    }

    const int cap = base.max_concurrent * base.num_rrh;
    if (to <= 0) {
        to = cap;
    }
    if (from < 1 || from > to || step < 1) {
        throw ConfigError("sweep-servers: invalid range");
    }

    auto sink = open_output(out_path);
    std::ostream& os = sink ? *sink : std::cout;
    os << "c,lambda,zeta,percentile_t2\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const SystemConfig& cfg = curves[ci];
        std::map<std::pair<int, double>, bbupool::LatencyMixture> cache;
        for (int c = from; c <= std::min(to, cap); c += step) {
            // Worst RRH percentile per zeta; failures leave the value empty.
            std::vector<std::optional<double>> values(zetas.size());
            try {
                std::vector<const bbupool::LatencyMixture*> mixes;
                for (int j = 0; j < cfg.num_rrh; ++j) {
                    const int share = bbupool::per_rrh_servers(cfg, c, j);
                    const auto key = std::make_pair(share, cfg.arrival_rates[j]);
                    auto it = cache.find(key);
                    if (it == cache.end()) {
                        it = cache.emplace(key, bbupool::rrh_queuing_mixture(cfg, c, j))
                                 .first;
                    }
                    mixes.push_back(&it->second);
                }
                for (std::size_t zi = 0; zi < zetas.size(); ++zi) {
                    double worst = 0.0;
                    for (const auto* mix : mixes) {
                        worst = std::max(
                            worst, bbupool::percentile(bbupool::queuing_cdf(*mix), zetas[zi],
                                                       cfg.frame_duration,
                                                       cfg.tolerances.percentile_tol));
                    }
                    values[zi] = worst;
                }
            } catch (const std::exception&) {
                // divergent or otherwise unsolvable point; keep values empty
            }
            for (std::size_t zi = 0; zi < zetas.size(); ++zi) {
                os << c << "," << fmt_full(labels[ci]) << "," << fmt_full(zetas[zi]) << ",";
                if (values[zi]) {
                    os << fmt_full(*values[zi]);
                }
                os << "\n";
            }
        }
    }
    return 0;
}

int cmd_sweep_savings(const CommonOptions& common, const std::string& rho_list,
                      const std::string& tau_list, const std::string& zeta_list,
                      const std::string& frame_list, bool sim_lt, long frames,
                      std::uint64_t seed, const std::string& out_path) {
    const SystemConfig base = resolve_config(common);
    const auto rhos = parse_double_list(rho_list, "--rho");
    const auto taus = parse_double_list(tau_list, "--tau");
    const auto zetas = parse_double_list(zeta_list, "--zeta");
    const auto frames_f =
        frame_list.empty() ? std::vector<double>{base.frame_duration}
                           : parse_double_list(frame_list, "--frame");
    for (double rho : rhos) {
        if (!(rho > 0.0 && rho < 1.0)) {
            throw ConfigError("sweep-savings: every rho must lie in (0, 1)");
        }
    }

    auto sink = open_output(out_path);
    std::ostream& os = sink ? *sink : std::cout;
    os << "policy,lambda_total,rho_bbu,tau,zeta,frame,servers,normalized_cost,savings,"
          "upper_bound\n";

    const double pool = static_cast<double>(base.max_concurrent) * base.num_rrh;
    for (double rho : rhos) {
        SystemConfig cfg = base;
        const double lambda_total = rho * pool * cfg.mu_f();
        cfg.arrival_rates.assign(cfg.num_rrh, lambda_total / cfg.num_rrh);

        auto emit = [&](const std::string& policy, const std::string& tau,
                        const std::string& zeta, double frame, const std::string& servers,
                        const std::string& cost, const std::string& savings,
                        double upper) {
            os << policy << "," << fmt_full(lambda_total) << "," << fmt_full(rho) << ","
               << tau << "," << zeta << "," << fmt_full(frame) << "," << servers << ","
               << cost << "," << savings << "," << fmt_full(upper) << "\n";
        };
        const double upper = 1.0 - rho;

        for (double tau : taus) {
            for (double zeta : zetas) {
                try {
                    const auto rep = bbupool::long_term_savings(cfg, tau, zeta);
                    emit("long_term", fmt_full(tau), fmt_full(zeta), cfg.frame_duration,
                         std::to_string(rep.servers_provisioned),
                         fmt_full(rep.normalized_cost), fmt_full(rep.savings),
                         rep.upper_bound);
                } catch (const std::exception&) {
                    emit("long_term", fmt_full(tau), fmt_full(zeta), cfg.frame_duration, "",
                         "", "", upper);
                }
            }
        }
        for (double f : frames_f) {
            try {
                const SystemConfig cfg_f = bbupool::rescaled_frame(cfg, f);
                const auto rep = bbupool::short_term_expected_savings(cfg_f);
                emit("short_term", "", "", f, "", fmt_full(rep.normalized_cost),
                     fmt_full(rep.savings), rep.upper_bound);
            } catch (const std::exception&) {
                emit("short_term", "", "", f, "", "", "", upper);
            }
        }
        if (sim_lt) {
            for (double tau : taus) {
                for (double zeta : zetas) {
                    try {
                        const int c = bbupool::required_servers_by_simulation(cfg, tau, zeta,
                                                                              frames, seed);
                        emit("sim_long_term", fmt_full(tau), fmt_full(zeta),
                             cfg.frame_duration, std::to_string(c), fmt_full(c / pool),
                             fmt_full(1.0 - c / pool), upper);
                    } catch (const std::exception&) {
                        emit("sim_long_term", fmt_full(tau), fmt_full(zeta),
                             cfg.frame_duration, "", "", "", upper);
                    }
                }
            }
        }
    }
    return 0;
}

int cmd_simulate(const CommonOptions& common, const std::string& policy, int servers,
                 long frames, long warmup, std::uint64_t seed, const std::string& out_path,
                 const std::string& samples_csv) {
    bbupool::SimulationConfig sim;
    sim.system = resolve_config(common);
    sim.policy = policy == "st" ? bbupool::Policy::short_term : bbupool::Policy::long_term;
    sim.servers = servers;
    sim.num_frames = frames;
    sim.warmup_frames = warmup >= 0 ? warmup : std::min<long>(frames / 10, 10000);
    sim.seed = seed;
    sim.collect_rrh = !samples_csv.empty();
    if (sim.policy == bbupool::Policy::long_term && servers <= 0) {
        throw ConfigError("simulate: --servers is required for the long-term policy");
    }

    const auto res = bbupool::simulate(sim);

    json doc;
    doc["policy"] = policy == "st" ? "short_term" : "long_term";
    if (sim.policy == bbupool::Policy::long_term) {
        doc["servers"] = servers;
    }
    doc["frames"] = frames;
    doc["warmup_frames"] = sim.warmup_frames;
    doc["seed"] = seed;
    json cfg_doc;
    cfg_doc["num_rrh"] = sim.system.num_rrh;
    cfg_doc["max_concurrent"] = sim.system.max_concurrent;
    cfg_doc["frame_duration"] = sim.system.frame_duration;
    cfg_doc["service_rate"] = sim.system.service_rate;
    cfg_doc["lambda"] = sim.system.arrival_rates;
    cfg_doc["queue_truncation"] = sim.system.queue_truncation;
    doc["config"] = cfg_doc;
    doc["frames_observed"] = res.frames_observed;
    doc["transfers"] = {{"arrived", res.transfers_arrived},
                        {"completed", res.transfers_completed},
                        {"blocked", res.transfers_blocked},
                        {"in_system_at_end", res.transfers_in_system_end}};
    doc["server_frames"] = {{"active", res.active_server_frames},
                            {"offered", res.offered_server_frames}};
    doc["empirical_savings"] = res.empirical_savings();
    doc["stability_warning"] = res.stability_warning;

    auto stats = [](const std::vector<double>& v) {
        json s;
        s["count"] = v.size();
        if (!v.empty()) {
            double mean = 0.0;
            for (double x : v) {
                mean += x;
            }
            s["mean"] = mean / static_cast<double>(v.size());
        }
        return s;
    };
    doc["t1"] = stats(res.t1_samples);
    json t2 = stats(res.t2_samples);
    if (!res.t2_samples.empty()) {
        t2["p50"] = bbupool::empirical_percentile(res.t2_samples, 0.5);
        t2["p99"] = bbupool::empirical_percentile(res.t2_samples, 0.99);
        t2["p99.9"] = bbupool::empirical_percentile(res.t2_samples, 0.999);
    }
    doc["t2"] = t2;
    doc["t3"] = stats(res.t3_samples);

    auto sink = open_output(out_path);
    (sink ? *sink : std::cout) << doc.dump(2) << "\n";

    if (!samples_csv.empty()) {
        auto file = open_output(samples_csv);
        std::ostream& cs = file ? *file : std::cout;
        cs << "transfer_id,rrh,t1,t2,t3\n";
        for (std::size_t i = 0; i < res.t2_samples.size(); ++i) {
            cs << i << "," << res.sample_rrh[i] << "," << fmt_full(res.t1_samples[i]) << ","
               << fmt_full(res.t2_samples[i]) << "," << fmt_full(res.t3_samples[i]) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BBU-pool multiplexing toolkit: frame-based queuing analysis, "
                 "savings sweeps, and discrete-event simulation"};
    app.require_subcommand(1);

    // analyze
    CommonOptions an_common;
    int an_servers = 0;
    std::vector<double> an_zetas;
    std::string an_format = "text";
    std::string an_cdf_out, an_out;
    double an_cdf_max = 0.0;
    int an_cdf_steps = 256;
    auto* an = app.add_subcommand("analyze", "Stability, chain, and latency report for one c");
    add_common(an, an_common);
    an->add_option("--servers", an_servers, "Total BBU servers c")->required();
    an->add_option("--zeta", an_zetas, "Percentile levels (repeatable)");
    an->add_option("--format", an_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
    an->add_option("--cdf-out", an_cdf_out, "Write CDF grid CSV to this path");
    an->add_option("--cdf-max", an_cdf_max, "CDF grid upper end (default: auto)");
    an->add_option("--cdf-steps", an_cdf_steps, "CDF grid steps");
    an->add_option("--out", an_out, "Report destination (default: stdout)");

    // sweep-servers
    CommonOptions sw_common;
    int sw_from = 1, sw_to = 0, sw_step = 1;
    std::vector<double> sw_zetas;
    std::string sw_lambda_grid, sw_out;
    auto* sw = app.add_subcommand("sweep-servers", "Queuing percentile vs. server count CSV");
    add_common(sw, sw_common);
    sw->add_option("--from", sw_from, "First server count");
    sw->add_option("--to", sw_to, "Last server count (default: L*N)");
    sw->add_option("--step", sw_step, "Stride");
    sw->add_option("--zeta", sw_zetas, "Percentile levels (repeatable)");
    sw->add_option("--lambda-grid", sw_lambda_grid,
                   "Comma list of per-RRH rates, one curve each (default: config rates)");
    sw->add_option("--out", sw_out, "CSV destination (default: stdout)");

    // sweep-savings
    CommonOptions sv_common;
    std::string sv_rho = "0.2,0.4,0.6,0.8";
    std::string sv_tau = "1,10";
    std::string sv_zeta = "0.99";
    std::string sv_frames_list, sv_out;
    bool sv_sim = false;
    long sv_sim_frames = 1000000;
    std::uint64_t sv_seed = 1;
    auto* sv = app.add_subcommand("sweep-savings",
                                  "Long/short-term savings vs. pool utilization CSV");
    add_common(sv, sv_common);
    sv->add_option("--rho", sv_rho, "Comma list of baseline pool utilizations");
    sv->add_option("--tau", sv_tau, "Comma list of latency targets");
    sv->add_option("--zeta", sv_zeta, "Comma list of percentile levels");
    sv->add_option("--frame", sv_frames_list,
                   "Comma list of frame durations for short-term rows");
    sv->add_flag("--sim-lt", sv_sim, "Add simulation-derived long-term rows");
    sv->add_option("--frames", sv_sim_frames, "Frames per simulation point");
    sv->add_option("--seed", sv_seed, "Simulation seed");
    sv->add_option("--out", sv_out, "CSV destination (default: stdout)");

    // simulate
    CommonOptions si_common;
    std::string si_policy = "lt";
    int si_servers = 0;
    long si_frames = 100000;
    long si_warmup = -1;
    std::uint64_t si_seed = 1;
    std::string si_out, si_samples;
    auto* si = app.add_subcommand("simulate", "Run the discrete-event simulator");
    add_common(si, si_common);
    si->add_option("--policy", si_policy, "lt (fixed c) or st (per-frame budget)")
        ->check(CLI::IsMember({"lt", "st"}));
    si->add_option("--servers", si_servers, "Fixed allocation for lt policy");
    si->add_option("--frames", si_frames, "Total frames, warmup included");
    si->add_option("--warmup", si_warmup, "Warmup frames (default: min(frames/10, 10000))");
    si->add_option("--seed", si_seed, "RNG seed");
    si->add_option("--out", si_out, "JSON destination (default: stdout)");
    si->add_option("--samples-csv", si_samples, "Raw per-transfer CSV destination");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (an->parsed()) {
            return cmd_analyze(an_common, an_servers,
                               an_zetas.empty() ? std::vector<double>{0.99} : an_zetas,
                               an_format, an_cdf_out, an_cdf_max, an_cdf_steps, an_out);
        }
        if (sw->parsed()) {
            return cmd_sweep_servers(sw_common, sw_from, sw_to, sw_step,
                                     sw_zetas.empty() ? std::vector<double>{0.99} : sw_zetas,
                                     sw_lambda_grid, sw_out);
        }
        if (sv->parsed()) {
            return cmd_sweep_savings(sv_common, sv_rho, sv_tau, sv_zeta, sv_frames_list,
                                     sv_sim, sv_sim_frames, sv_seed, sv_out);
        }
        if (si->parsed()) {
            return cmd_simulate(si_common, si_policy, si_servers, si_frames, si_warmup,
                                si_seed, si_out, si_samples);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const bbupool::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const bbupool::DivergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const bbupool::ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const bbupool::NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
