#include "qsc/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsc/covdp.hpp"
#include "qsc/exact.hpp"
#include "qsc/lemmas.hpp"
#include "qsc/plot.hpp"

namespace qsc::cli {

namespace {

using nlohmann::json;

struct GlobalOpts {
    uint64_t seed = 1;
    unsigned jobs = 1;
    bool error_json = false;
};

uint64_t env_default_seed() {
    if (const char* s = std::getenv("QSC_SEED")) {
        try {
            return std::stoull(s);
        } catch (...) {
        }
    }
    return 1;
}

class VerificationFailure : public std::runtime_error {
  public:
    explicit VerificationFailure(const std::string& what) : std::runtime_error(what) {}
};

std::vector<std::string> prefix_labels(const SourceModel& source, size_t depth) {
    std::vector<std::string> labels{"S_"};
    std::vector<std::string> level{""};
    const size_t m = source.alphabet_size();
    const bool chars = source.alphabet().single_char_symbols();
    for (size_t k = 1; k <= depth; ++k) {
        std::vector<std::string> next;
        next.reserve(level.size() * m);
        for (const auto& base : level) {
            for (size_t s = 0; s < m; ++s) {
                std::string name = base;
                if (!chars && !base.empty()) name += '.';
                name += source.alphabet().symbol(s);
                next.push_back(name);
                labels.push_back("S_" + name);
            }
        }
        level = std::move(next);
    }
    return labels;
}

json estimates_json(const SourceModel& source, double t, size_t trie_depth,
                    const std::vector<mc::RunRecord>& records, bool pooled_center) {
    double mean_s = 0;
    std::vector<double> level_means;
    bool exact_center = false;
    if (!pooled_center) {
        mean_s = exact::mean_s_poisson(source, t, 1e-6);
        level_means = exact::mean_s_levels(source, t, trie_depth);
        exact_center = true;
    }
    const auto y = mc::estimate_y(records, t, mean_s, exact_center, source.alphabet_size(),
                                  trie_depth, exact_center ? &level_means : nullptr);

    // all prefixes up to min(trie_depth, 3) for the covariance matrix
    std::vector<Prefix> prefixes;
    const size_t cov_depth = std::min<size_t>(trie_depth, 3);
    std::vector<Prefix> level{Prefix{}};
    prefixes.push_back(Prefix{});
    for (size_t k = 1; k <= cov_depth; ++k) {
        std::vector<Prefix> next;
        for (const auto& p : level) {
            for (uint32_t s = 0; s < source.alphabet_size(); ++s) {
                Prefix q = p;
                q.append(s);
                prefixes.push_back(q);
                next.push_back(std::move(q));
            }
        }
        level = std::move(next);
    }
    json out;
    out["y"] = json::parse(y.to_json());
    if (!records.empty() && cov_depth >= 1) {
        const auto cov = mc::estimate_prefix_covariances(records, prefixes, source.alphabet(),
                                                         trie_depth);
        out["prefix_cov"] = json::parse(cov.to_json());
    }
    return out;
}

int cmd_simulate(const GlobalOpts& g, const std::string& source_spec, double t, uint64_t runs,
                 uint64_t seed, size_t depth, uint32_t depth_cap, const std::string& out_path,
                 const std::string& estimates_path, bool pooled_center) {
    SourceModel source = parse_source_spec(source_spec);
    mc::ExperimentConfig config{source, t, runs, seed, depth, depth_cap, g.jobs};
    const auto records = mc::run_experiment(config);

    json cfg;
    cfg["source_spec"] = source_spec;
    cfg["source"] = json::parse(source.to_json_text());
    cfg["t"] = t;
    cfg["runs"] = runs;
    cfg["seed"] = seed;
    cfg["trie_depth"] = depth;
    cfg["depth_cap"] = depth_cap;
    cfg["pooled_center"] = pooled_center;

    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::invalid_argument("simulate: cannot write " + out_path);
        out << runs_csv_text(cfg.dump(), source, depth, records);
    }
    const json est = estimates_json(source, t, depth, records, pooled_center);
    if (!estimates_path.empty()) {
        std::ofstream out(estimates_path, std::ios::binary);
        if (!out) throw std::invalid_argument("simulate: cannot write " + estimates_path);
        out << est.dump(2) << "\n";
    }
    std::cout << est.dump(2) << "\n";
    return kExitOk;
}

int cmd_exact_stats(bool have_n, int64_t n, bool have_t, double t, bool as_json) {
    json out;
    if (have_n) {
        if (n < 0) throw std::invalid_argument("exact-stats: n must be >= 0");
        const Rational& k = exact::kappa(size_t(n));
        const Rational v = exact::var_k(size_t(n));
        out["n"] = n;
        out["kappa"] = k.to_string();
        out["kappa_float"] = k.to_double();
        out["var_k"] = v.to_string();
        out["var_k_float"] = v.to_double();
        if (n >= 1) out["kappa_asymptotic"] = exact::kappa_asymptotic(size_t(n));
    }
    if (have_t) {
        if (!(t >= 0)) throw std::invalid_argument("exact-stats: t must be >= 0");
        out["t"] = t;
        out["mean_k_poisson"] = exact::mean_k_poisson(t);
        out["var_k_poisson"] = exact::var_k_poisson(t);
        out["sigma_sq"] = exact::sigma_sq();
        if (t > 0) out["var_over_t_sq"] = exact::var_k_poisson(t) / (t * t);
    }
    if (!have_n && !have_t)
        throw std::invalid_argument("exact-stats: pass --n and/or --t");
    if (as_json) {
        std::cout << out.dump(2) << "\n";
    } else {
        for (auto& [key, val] : out.items())
            std::cout << key << " = " << (val.is_string() ? val.get<std::string>() : val.dump())
                      << "\n";
    }
    return kExitOk;
}

int cmd_sweep_lemmas(const GlobalOpts& g, int64_t nmax, const std::string& out_path) {
    const auto report = lemmas::sweep_signs(nmax, g.jobs);
    const std::string text = report.to_json();
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::invalid_argument("sweep-lemmas: cannot write " + out_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
    if (!report.passed()) throw VerificationFailure("sweep-lemmas: sign or identity violation");
    return kExitOk;
}

int cmd_cov_table(int64_t nmax, const std::string& mode, const std::string& out_path) {
    if (mode != "exact" && mode != "float")
        throw std::invalid_argument("cov-table: --mode must be exact or float");
    json out;
    std::string csv;
    bool ok = true;
    if (mode == "exact") {
        const auto table = covdp::CovTable::exact_table(nmax);
        csv = table.to_csv();
        const Rational mn = table.min_value_exact();
        out["min_value"] = mn.to_string();
        ok = mn.sign() >= 0;
    } else {
        const auto table = covdp::CovTable::float_table(nmax);
        csv = table.to_csv();
        const double mn = table.min_value();
        out["min_value"] = mn;
        ok = mn >= -1e-9;
    }
    out["n_max"] = nmax;
    out["mode"] = mode;
    out["nonnegative"] = ok;
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::invalid_argument("cov-table: cannot write " + out_path);
        f << csv;
    }
    std::cout << out.dump(2) << "\n";
    if (!ok) throw VerificationFailure("cov-table: negative covariance value");
    return kExitOk;
}

int cmd_cov_poisson(double pw, double pwminus, double t, double tol, int64_t ncap) {
    const auto res = covdp::cov_k_sw_exact(pw, pwminus, t, tol, ncap);
    json out;
    out["p_w"] = pw;
    out["p_wminus"] = pwminus;
    out["t"] = t;
    out["t_w"] = res.t_w;
    out["v_w"] = res.v_w;
    out["value"] = res.value;
    out["dropped_mass"] = res.dropped_mass;
    out["tail_bound"] = res.tail_bound;
    out["truncation_ok"] = res.truncation_ok;
    std::cout << out.dump(2) << "\n";
    if (!res.truncation_ok)
        throw VerificationFailure("cov-poisson: truncation error exceeds tolerance");
    return kExitOk;
}

int cmd_check_distribution(const GlobalOpts& g, const std::string& source_spec,
                           const std::string& w_text, double t, uint64_t runs, uint64_t seed,
                           uint32_t depth_cap) {
    (void)g;
    SourceModel source = parse_source_spec(source_spec);
    const Prefix w = Prefix::parse(w_text, source.alphabet());
    const auto rep = mc::check_sw_equals_k_scaled(source, w, t, runs, seed, depth_cap);
    std::cout << rep.to_json() << "\n";
    if (!rep.passed()) throw VerificationFailure("check-distribution: identity check failed");
    return kExitOk;
}

int cmd_check_condition(const std::string& source_spec, size_t depth) {
    SourceModel source = parse_source_spec(source_spec);
    json out;
    out["source"] = source_spec;
    out["depth"] = depth;
    out["partial_sum"] = source.condition_partial_sum(depth);
    auto steps = json::array();
    for (size_t k : {size_t(0), depth / 4, depth / 2, depth}) {
        steps.push_back({{"depth", k}, {"partial_sum", source.condition_partial_sum(k)}});
    }
    out["trajectory"] = steps;
    out["sq_mass_decay"] = source.sq_mass_decay();
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_report(const std::string& in_path, const std::string& plot_path) {
    const RunsFile file = read_runs_csv(in_path);
    const json cfg = json::parse(file.config_json);
    SourceModel source = source_from_json_text(cfg.at("source").dump());
    const double t = cfg.at("t").get<double>();
    const size_t depth = cfg.at("trie_depth").get<size_t>();
    const bool pooled = cfg.value("pooled_center", false);

    // integrity checks before computing anything
    for (const auto& rec : file.records) {
        if (rec.total_symbols < rec.key_comparisons)
            throw VerificationFailure("report: corrupt row (total_symbols < key_comparisons)");
        if (!rec.prefix_counts.empty() && rec.prefix_counts[0] != rec.key_comparisons)
            throw VerificationFailure("report: corrupt row (level-0 count != key comparisons)");
    }

    json out;
    const auto started = std::chrono::steady_clock::now();
    out["config"] = cfg;
    out["estimates"] = estimates_json(source, t, depth, file.records, pooled);
    out["meta"] = {{"tool", "qsc 1.0.0"},
                   {"runs_loaded", file.records.size()},
                   {"wall_seconds", std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - started)
                                        .count()}};
    std::cout << out.dump(2) << "\n";

    if (!plot_path.empty()) {
        // running Var Y(t) estimate against runs processed, sigma^2 reference
        plot::PlotSpec spec;
        spec.title = "Var Y(t) running estimate, t = " + std::to_string(t);
        spec.x_label = "runs";
        spec.y_label = "Var Y(t)";
        spec.has_reference = true;
        spec.reference_y = exact::sigma_sq();
        spec.reference_label = "sigma^2";
        plot::Series s;
        s.label = "estimate";
        double sum = 0, sumsq = 0;
        size_t i = 0;
        const size_t step = std::max<size_t>(1, file.records.size() / 64);
        for (const auto& rec : file.records) {
            const double y = double(rec.total_symbols) / t;  // centering cancels in variance
            sum += y;
            sumsq += y * y;
            ++i;
            if (i >= 2 && (i % step == 0 || i == file.records.size())) {
                const double var = (sumsq - sum * sum / double(i)) / double(i - 1);
                s.x.push_back(double(i));
                s.y.push_back(var);
            }
        }
        spec.series.push_back(std::move(s));
        plot::emit_plot(spec, plot_path);
        out["plot"] = plot_path;
    }
    return kExitOk;
}

// --config file: JSON object whose keys are long option names
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end() || it + 1 == args.end()) return args;
    std::ifstream in(*(it + 1));
    if (!in) throw std::invalid_argument("cannot open config file " + *(it + 1));
    json j;
    in >> j;
    std::vector<std::string> out;
    // keep everything except the --config pair, then append config-derived
    // tokens (explicit flags win because CLI11 takes the last occurrence...
    // so append config tokens first, after the subcommand)
    std::vector<std::string> extra;
    for (auto& [key, val] : j.items()) {
        if (val.is_boolean()) {
            if (val.get<bool>()) extra.push_back("--" + key);
        } else {
            extra.push_back("--" + key + "=" +
                            (val.is_string() ? val.get<std::string>() : val.dump()));
        }
    }
    bool placed = false;
    for (auto cur = args.begin(); cur != args.end(); ++cur) {
        if (cur == it || cur == it + 1) continue;
        out.push_back(*cur);
        if (!placed && !cur->starts_with("-") && cur != args.begin()) {
            // first token after argv[0] that is not a flag = subcommand
            out.insert(out.end(), extra.begin(), extra.end());
            placed = true;
        }
    }
    if (!placed) out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

}  // namespace

std::string runs_csv_text(const std::string& config_json, const SourceModel& source,
                          size_t trie_depth, const std::vector<mc::RunRecord>& records) {
    std::ostringstream os;
    os << "# qsc-runs v1\n";
    os << "# config " << config_json << "\n";
    os << "run_index,n_keys,key_comparisons,total_symbols";
    for (const auto& label : prefix_labels(source, trie_depth)) os << ',' << label;
    os << '\n';
    for (const auto& rec : records) {
        os << rec.run_index << ',' << rec.n_keys << ',' << rec.key_comparisons << ','
           << rec.total_symbols;
        for (uint64_t c : rec.prefix_counts) os << ',' << c;
        os << '\n';
    }
    return os.str();
}

RunsFile read_runs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open runs file " + path);
    RunsFile file;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# config ", 0) == 0) {
            file.config_json = line.substr(9);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        // header
        std::stringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) file.columns.push_back(col);
        break;
    }
    if (file.config_json.empty())
        throw std::invalid_argument("runs file missing '# config' header");
    if (file.columns.size() < 4) throw std::invalid_argument("runs file missing header row");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<uint64_t> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(std::stoull(cell));
        if (cells.size() != file.columns.size())
            throw std::invalid_argument("runs file: ragged row");
        mc::RunRecord rec;
        rec.run_index = cells[0];
        rec.n_keys = cells[1];
        rec.key_comparisons = cells[2];
        rec.total_symbols = cells[3];
        rec.prefix_counts.assign(cells.begin() + 4, cells.end());
        file.records.push_back(std::move(rec));
    }
    return file;
}

int cli_main(int argc, const char* const* argv) {
    GlobalOpts g;
    g.seed = env_default_seed();

    CLI::App app{"QuickSort symbol-comparison cost: simulation and exact verification"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand too
    app.add_option("--jobs", g.jobs, "worker threads for parallel sections");
    app.add_flag("--error-json", g.error_json, "emit errors as JSON on stdout");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Poissonized instrumented-sort experiment");
    std::string sim_source = "memoryless:1/2,1/2";
    double sim_t = 50;
    uint64_t sim_runs = 1000;
    uint64_t sim_seed = g.seed;
    size_t sim_depth = 3;
    uint32_t sim_depth_cap = kDefaultDepthCap;
    std::string sim_out, sim_estimates;
    bool sim_pooled = false;
    sim->add_option("--source", sim_source, "source spec");
    sim->add_option("--t", sim_t, "Poisson time")->required();
    sim->add_option("--runs", sim_runs, "number of runs");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--depth", sim_depth, "recorded trie depth");
    sim->add_option("--depth-cap", sim_depth_cap, "comparison depth cap");
    sim->add_option("--out", sim_out, "write runs CSV here");
    sim->add_option("--estimates", sim_estimates, "write estimates JSON here");
    sim->add_flag("--pooled-center", sim_pooled, "center Y by pooled mean instead of the series");

    // exact-stats
    auto* ex = app.add_subcommand("exact-stats", "exact kappa/VarK and Poisson mixes");
    int64_t ex_n = -1;
    double ex_t = -1;
    bool ex_json = false;
    ex->add_option("--n", ex_n, "fixed key count");
    ex->add_option("--t", ex_t, "Poisson time");
    ex->add_flag("--json", ex_json, "JSON output");

    // sweep-lemmas
    auto* sw = app.add_subcommand("sweep-lemmas", "exact sign sweep of the lemma quantities");
    int64_t sw_nmax = 40;
    std::string sw_out;
    sw->add_option("--nmax", sw_nmax, "grid bound")->required();
    sw->add_option("--out", sw_out, "write JSON report here");

    // cov-table
    auto* ct = app.add_subcommand("cov-table", "conditional covariance table");
    int64_t ct_nmax = 30;
    std::string ct_mode = "exact", ct_out;
    ct->add_option("--nmax", ct_nmax, "table cap")->required();
    ct->add_option("--mode", ct_mode, "exact|float");
    ct->add_option("--out", ct_out, "write CSV here");

    // cov-poisson
    auto* cp = app.add_subcommand("cov-poisson", "Poissonized Cov(K(t), S_w(t))");
    double cp_pw = 0.5, cp_pwm = 0.0, cp_t = 20, cp_tol = 1e-9;
    int64_t cp_ncap = -1;
    cp->add_option("--pw", cp_pw, "p_w")->required();
    cp->add_option("--pwminus", cp_pwm, "mass strictly below w");
    cp->add_option("--t", cp_t, "Poisson time")->required();
    cp->add_option("--tol", cp_tol, "truncation tolerance");
    cp->add_option("--ncap", cp_ncap, "Poisson truncation cap");

    // check-distribution
    auto* cd = app.add_subcommand("check-distribution", "S_w(t) =_L K(p_w t) check");
    std::string cd_source = "memoryless:1/2,1/2", cd_w = "0";
    double cd_t = 40;
    uint64_t cd_runs = 4000, cd_seed = g.seed;
    uint32_t cd_cap = kDefaultDepthCap;
    cd->add_option("--w", cd_w, "prefix")->required();
    cd->add_option("--t", cd_t, "Poisson time")->required();
    cd->add_option("--source", cd_source, "source spec");
    cd->add_option("--runs", cd_runs, "runs per experiment");
    cd->add_option("--seed", cd_seed, "seed");
    cd->add_option("--depth-cap", cd_cap, "comparison depth cap");

    // check-condition
    auto* cc = app.add_subcommand("check-condition", "summability condition partial sums");
    std::string cc_source;
    size_t cc_depth = 60;
    cc->add_option("--source", cc_source, "source spec")->required();
    cc->add_option("--depth", cc_depth, "partial sum depth");

    // report
    auto* rp = app.add_subcommand("report", "recompute estimates from a runs CSV");
    std::string rp_in, rp_plot;
    rp->add_option("--in", rp_in, "runs CSV")->required();
    rp->add_option("--plot", rp_plot, "write SVG here");

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = apply_config_file(args);
        std::vector<const char*> cargs;
        cargs.reserve(args.size());
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(int(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        if (g.error_json) {
            json err{{"error", {{"type", "validation"}, {"message", e.what()}}}};
            std::cout << err.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*sim)
            return cmd_simulate(g, sim_source, sim_t, sim_runs, sim_seed, sim_depth,
                                sim_depth_cap, sim_out, sim_estimates, sim_pooled);
        if (*ex) return cmd_exact_stats(ex_n >= 0, ex_n, ex_t >= 0, ex_t, ex_json);
        if (*sw) return cmd_sweep_lemmas(g, sw_nmax, sw_out);
        if (*ct) return cmd_cov_table(ct_nmax, ct_mode, ct_out);
        if (*cp) return cmd_cov_poisson(cp_pw, cp_pwm, cp_t, cp_tol, cp_ncap);
        if (*cd)
            return cmd_check_distribution(g, cd_source, cd_w, cd_t, cd_runs, cd_seed, cd_cap);
        if (*cc) return cmd_check_condition(cc_source, cc_depth);
        if (*rp) return cmd_report(rp_in, rp_plot);
        throw std::invalid_argument("no subcommand");
    } catch (const VerificationFailure& e) {
        if (g.error_json) {
            json err{{"error", {{"type", "verification"}, {"message", e.what()}}}};
            std::cout << err.dump() << "\n";
        } else {
            std::cerr << "verification failure: " << e.what() << "\n";
        }
        return kExitVerification;
    } catch (const std::exception& e) {
        if (g.error_json) {
            json err{{"error", {{"type", "validation"}, {"message", e.what()}}}};
            std::cout << err.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return kExitValidation;
    }
}

}  // namespace qsc::cli
