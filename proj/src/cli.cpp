#include "fio/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "fio/parallel.hpp"

namespace fio {

json default_config() {
    return json::parse(R"({
      "n": 2,
      "J_max": 8,
      "seed": 1,
      "output": "fio_out",
      "svg": true,
      "grid": {"half_width": 6.0, "points": 128},
      "phase": {"name": "phase_halfwave", "eps": 0.1, "z0": []},
      "symbol": {"name": "sigma_order", "m": null, "support_scale": 1.0},
      "check": {"class": "both", "symbol": true, "phase": true, "k_max": 8, "max_order": 2, "slope_ceiling": 0.1},
      "net": {"samples": 100000},
      "decay": {"mode": "plain", "j_min": 3, "j_max": 7, "directions": 8, "M": 8.0, "r": 0.25,
                "tolerance": null, "window_pad": 2.0, "eta_pad": 2.0},
      "atoms": {"half_width": 6.0, "points": 1024, "radii": [1.0, 0.5, 0.25, 0.125, 0.0625],
                "profiles": ["odd"], "growth_ceiling": 3.0},
      "l2": {"m": 0.0, "points": [128, 256], "trials": 8, "band": [0.5, 4.0], "tolerance": 0.2},
      "offdiag": {"mode": "p_to_2", "m": -0.5, "points": [128, 256], "trials": 8, "band": [0.5, 4.0],
                  "tolerance": 0.2},
      "hcheck": {"j_min": 4, "j_max": 8, "samples": 4, "tolerance": 0.3},
      "separation": {"r": 0.25, "levels": [4, 5, 6, 7], "samples": 2000, "M": 8.0, "x_box": 8.0, "floor": 0.1}
    })");
}

namespace {

void check_keys(const json& user, const json& defaults, const std::string& prefix) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!defaults.contains(it.key())) throw ConfigError("config key " + key + ": unknown key");
        const json& d = defaults[it.key()];
        const json& u = it.value();
        if (d.is_object()) {
            if (!u.is_object()) throw ConfigError("config key " + key + ": expected an object");
            check_keys(u, d, key);
            continue;
        }
        // null defaults take a number or stay null
        bool same = d.is_null()      ? (u.is_null() || u.is_number())
                    : d.is_number()  ? u.is_number()
                    : d.is_boolean() ? u.is_boolean()
                    : d.is_string()  ? u.is_string()
                                     : u.is_array();
        if (!same) throw ConfigError("config key " + key + ": wrong type");
    }
}

template <typename T>
T get(const json& cfg, const std::string& path) {
    const json* node = &cfg;
    std::string key;
    std::istringstream is(path);
    while (std::getline(is, key, '.')) node = &node->at(key);
    try {
        return node->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key " + path + ": wrong type");
    }
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config key " + key + ": " + what);
}

}  // namespace

json resolve_config(const json& user) {
    json cfg = default_config();
    if (!user.is_null()) {
        if (!user.is_object()) throw ConfigError("config: top level must be an object");
        check_keys(user, cfg, "");
        cfg.merge_patch(user);
    }
    int n = get<int>(cfg, "n");
    require(n == 2 || n == 3, "n", "unsupported dimension " + std::to_string(n) + " (need 2 or 3)");
    int J = get<int>(cfg, "J_max");
    require(J >= 0 && J <= 10, "J_max", "must be in [0, 10]");
    if (cfg["symbol"]["m"].is_null()) cfg["symbol"]["m"] = -0.5 * (n - 1);
    auto sym = get<std::string>(cfg, "symbol.name");
    const auto& sn = builtin_symbol_names();
    require(std::find(sn.begin(), sn.end(), sym) != sn.end(), "symbol.name", "unknown symbol name " + sym);
    auto ph = get<std::string>(cfg, "phase.name");
    const auto& pn = builtin_phase_names();
    require(std::find(pn.begin(), pn.end(), ph) != pn.end(), "phase.name", "unknown phase name " + ph);
    require(is_power_of_two(get<std::size_t>(cfg, "grid.points")), "grid.points", "must be a power of two");
    require(is_power_of_two(get<std::size_t>(cfg, "atoms.points")), "atoms.points", "must be a power of two");
    require(get<double>(cfg, "grid.half_width") > 0, "grid.half_width", "must be positive");
    auto cls = get<std::string>(cfg, "check.class");
    require(cls == "S" || cls == "product" || cls == "both", "check.class", "must be S, product or both");
    auto mode = get<std::string>(cfg, "decay.mode");
    require(mode == "plain" || mode == "lipschitz" || mode == "offball", "decay.mode", "must be plain, lipschitz or offball");
    require(get<int>(cfg, "decay.j_max") <= J, "decay.j_max", "exceeds J_max");
    require(get<int>(cfg, "hcheck.j_max") <= J, "hcheck.j_max", "exceeds J_max");
    for (int j : get<std::vector<int>>(cfg, "separation.levels")) require(j <= J, "separation.levels", "exceeds J_max");
    auto om = get<std::string>(cfg, "offdiag.mode");
    require(om == "p_to_2" || om == "2_to_q", "offdiag.mode", "must be p_to_2 or 2_to_q");
    for (const char* key : {"l2.points", "offdiag.points"})
        for (auto N : get<std::vector<std::size_t>>(cfg, key)) require(is_power_of_two(N), key, "must be powers of two");
    return cfg;
}

namespace {

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

BuiltinParams builtin_params(const json& cfg) {
    BuiltinParams p;
    p.m = get<double>(cfg, "symbol.m");
    p.support_scale = get<double>(cfg, "symbol.support_scale");
    p.eps = get<double>(cfg, "phase.eps");
    p.z0 = get<std::vector<double>>(cfg, "phase.z0");
    return p;
}

Phase config_phase(const json& cfg) {
    try {
        return make_phase(get<std::string>(cfg, "phase.name"), get<int>(cfg, "n"), builtin_params(cfg));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config key phase: ") + e.what());
    }
}

Symbol config_symbol(const json& cfg, std::optional<double> m = std::nullopt) {
    BuiltinParams p = builtin_params(cfg);
    if (m) p.m = *m;
    return make_symbol(get<std::string>(cfg, "symbol.name"), p);
}

std::filesystem::path output_dir(const json& cfg) {
    std::filesystem::path dir = get<std::string>(cfg, "output");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void emit(const json& cfg, const std::string& name, const json& report, bool pass, std::ostream& out) {
    json doc;
    doc["name"] = name;
    doc["timestamp"] = timestamp();
    doc["config"] = cfg;
    doc["report"] = report;
    doc["verdict"] = pass ? "pass" : "fail";
    auto path = output_dir(cfg) / (name + ".json");
    write_file(path.string(), doc.dump(2) + "\n");
    out << name << ": " << (pass ? "pass" : "fail") << " (" << path.string() << ")\n";
}

void emit_decay(const json& cfg, const DecayReport& r, std::ostream& out) {
    auto dir = output_dir(cfg);
    write_file((dir / (r.name + ".csv")).string(), decay_csv(r));
    if (get<bool>(cfg, "svg")) write_file((dir / (r.name + ".svg")).string(), decay_svg(r));
    if (r.fit) out << "fitted slope " << r.fit->slope << ", target " << r.target << " +- " << r.tolerance << "\n";
    if (!r.note.empty()) out << r.note << "\n";
    emit(cfg, r.name, to_json(r), r.pass, out);
}

RefinementParams refinement_params(const json& cfg, const std::string& sec) {
    RefinementParams p;
    p.points = get<std::vector<std::size_t>>(cfg, sec + ".points");
    p.trials = get<std::size_t>(cfg, sec + ".trials");
    auto band = get<std::vector<double>>(cfg, sec + ".band");
    require(band.size() == 2, sec + ".band", "needs two entries");
    p.band_lo = band[0];
    p.band_hi = band[1];
    p.seed = get<std::uint64_t>(cfg, "seed");
    p.tolerance = get<double>(cfg, sec + ".tolerance");
    return p;
}

int cmd_net(const json& cfg, int j, const std::string& out_path, std::ostream& out) {
    int n = get<int>(cfg, "n");
    if (j < 0 || j > 16) throw ConfigError("config key j: must be in [0, 16]");
    DirectionNet net = build_direction_net(j, n);
    NetValidation v = validate_direction_net(net, get<std::size_t>(cfg, "net.samples"), get<std::uint64_t>(cfg, "seed"));
    std::string path = out_path.empty() ? (output_dir(cfg) / ("net_j" + std::to_string(j) + "_n" + std::to_string(n) + ".txt")).string()
                                        : out_path;
    std::ostringstream os;
    write_net(os, net);
    write_file(path, os.str());
    json summary = to_json(v);
    summary["j"] = j;
    summary["n"] = n;
    summary["size"] = net.size();
    summary["file"] = path;
    write_file(path + ".json", summary.dump(2) + "\n");
    out << "net j=" << j << " n=" << n << ": " << net.size() << " directions, " << (v.pass ? "valid" : "invalid");
    if (!v.pass) out << " (" << v.first_violation << ")";
    out << "\n";
    return v.pass ? kExitPass : kExitFail;
}

int cmd_check(const json& cfg, std::ostream& out) {
    int n = get<int>(cfg, "n");
    json rep = json::object();
    bool pass = true;
    if (get<bool>(cfg, "check.symbol")) {
        Symbol s = config_symbol(cfg);
        ClassCheckOptions o;
        o.k_max = get<int>(cfg, "check.k_max");
        o.max_order = get<int>(cfg, "check.max_order");
        o.slope_ceiling = get<double>(cfg, "check.slope_ceiling");
        double m = get<double>(cfg, "symbol.m");
        auto cls = get<std::string>(cfg, "check.class");
        if (cls != "product") {
            ClassReport r = check_class_S(s, m, n, o);
            rep["S"] = to_json(r);
            pass = pass && r.pass;
            out << "S^" << m << " check for " << s.name << ": " << (r.pass ? "pass" : "fail") << "\n";
            if (r.first_violation) out << "  violation: " << rep["S"]["violation"].dump() << "\n";
        }
        if (cls != "S") {
            ClassReport r = check_class_product(s, m, n, o);
            rep["product"] = to_json(r);
            pass = pass && r.pass;
            out << "product class check for " << s.name << ": " << (r.pass ? "pass" : "fail") << "\n";
            if (r.first_violation) out << "  violation: " << rep["product"]["violation"].dump() << "\n";
        }
    }
    if (get<bool>(cfg, "check.phase")) {
        Phase ph = config_phase(cfg);
        PhaseReport r = check_phase(ph, n, 2.0);
        rep["phase"] = to_json(r);
        pass = pass && r.pass;
        out << "phase check for " << ph.name << ": " << (r.pass ? "pass" : "fail " + r.failed_hypothesis) << "\n";
    }
    emit(cfg, "check", rep, pass, out);
    return pass ? kExitPass : kExitFail;
}

int cmd_experiment(const json& cfg, const std::string& kind, std::ostream& out) {
    const int n = get<int>(cfg, "n");
    const double L = get<double>(cfg, "grid.half_width");
    const auto N = get<std::size_t>(cfg, "grid.points");
    const int J = get<int>(cfg, "J_max");
    if (kind == "decay") {
        DecayParams p;
        p.mode = get<std::string>(cfg, "decay.mode");
        p.j_min = get<int>(cfg, "decay.j_min");
        p.j_max = get<int>(cfg, "decay.j_max");
        p.J_max = J;
        p.directions = get<std::size_t>(cfg, "decay.directions");
        p.M = get<double>(cfg, "decay.M");
        p.r = get<double>(cfg, "decay.r");
        if (!cfg["decay"]["tolerance"].is_null()) p.tolerance = get<double>(cfg, "decay.tolerance");
        p.window_pad = get<double>(cfg, "decay.window_pad");
        p.eta_pad = get<double>(cfg, "decay.eta_pad");
        FioSpec spec = make_spec(n, config_symbol(cfg), config_phase(cfg), L, N, p.j_max);
        DecayReport r = decay_experiment(spec, p);
        emit_decay(cfg, r, out);
        return r.pass ? kExitPass : kExitFail;
    }
    if (kind == "atoms") {
        AtomParams p;
        p.radii = get<std::vector<double>>(cfg, "atoms.radii");
        p.profiles = get<std::vector<std::string>>(cfg, "atoms.profiles");
        p.growth_ceiling = get<double>(cfg, "atoms.growth_ceiling");
        FioSpec spec = make_spec(n, config_symbol(cfg), config_phase(cfg), get<double>(cfg, "atoms.half_width"),
                                 get<std::size_t>(cfg, "atoms.points"), 0);
        BoundednessReport r = atom_uniformity(spec, p);
        out << "max/min of ||F a||_1 = " << r.stability << " (ceiling " << r.threshold << ")\n";
        emit(cfg, r.name, to_json(r), r.pass, out);
        return r.pass ? kExitPass : kExitFail;
    }
    if (kind == "l2" || kind == "offdiag") {
        double m = get<double>(cfg, kind + ".m");
        FioSpec spec = make_spec(n, config_symbol(cfg, m), config_phase(cfg), L, N, 0);
        RefinementParams p = refinement_params(cfg, kind);
        BoundednessReport r;
        if (kind == "l2") {
            r = l2_experiment(spec, p);
        } else {
            auto mode = get<std::string>(cfg, "offdiag.mode") == "p_to_2" ? OffdiagMode::PTo2 : OffdiagMode::TwoToQ;
            r = offdiagonal_experiment(spec, m, mode, p);
            out << "exponent " << r.exponent << "\n";
        }
        out << "max ratio " << r.max_ratio << ", refinement change " << r.stability << " (limit " << r.threshold << ")\n";
        emit(cfg, r.name, to_json(r), r.pass, out);
        return r.pass ? kExitPass : kExitFail;
    }
    if (kind == "hcheck") {
        HCheckParams p;
        p.j_min = get<int>(cfg, "hcheck.j_min");
        p.j_max = get<int>(cfg, "hcheck.j_max");
        p.samples = get<std::size_t>(cfg, "hcheck.samples");
        p.tolerance = get<double>(cfg, "hcheck.tolerance");
        p.seed = get<std::uint64_t>(cfg, "seed");
        HRemainderReport r = h_remainder_check(config_phase(cfg), n, p);
        out << "max |h(eta_1, 0)| = " << r.h_axis_error << "\n";
        for (const auto& f : r.fits)
            out << "  " << f.report.name << ": "
                << (f.identically_zero ? std::string("zero") : f.report.fit ? std::to_string(f.report.fit->slope) : "no fit")
                << " target " << f.report.target << "\n";
        emit(cfg, "hcheck", to_json(r), r.pass, out);
        return r.pass ? kExitPass : kExitFail;
    }
    if (kind == "separation") {
        SeparationParams p;
        p.x0 = Vec(n);
        p.r = get<double>(cfg, "separation.r");
        p.levels = get<std::vector<int>>(cfg, "separation.levels");
        p.samples = get<std::size_t>(cfg, "separation.samples");
        p.M = get<double>(cfg, "separation.M");
        p.x_box = get<double>(cfg, "separation.x_box");
        p.floor = get<double>(cfg, "separation.floor");
        p.seed = get<std::uint64_t>(cfg, "seed");
        SeparationReport r = separation_check(config_phase(cfg), n, p);
        out << "min ratio " << r.min_ratio << " (floor " << r.floor << ")\n";
        emit(cfg, "separation", to_json(r), r.pass, out);
        return r.pass ? kExitPass : kExitFail;
    }
    throw ConfigError("unknown experiment " + kind);
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path, std::ostream& out) {
    std::ostringstream csv;
    csv << "file,name,verdict\n";
    json summary = json::array();
    for (const auto& f : inputs) {
        json doc = read_json_file(f);
        std::string name = doc.value("name", "?"), verdict = doc.value("verdict", "?");
        csv << f << ',' << name << ',' << verdict << '\n';
        summary.push_back({{"file", f}, {"name", name}, {"verdict", verdict}});
        out << std::left << std::setw(24) << name << verdict << "  " << f << "\n";
    }
    if (!out_path.empty()) write_file(out_path, csv.str());
    return kExitPass;
}

extern "C" void on_sigint(int) { request_cancel(); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks for Fourier integral operators on H^1"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    int workers = 0;
    app.add_option("--config", config_path, "JSON config file (comments allowed)");
    app.add_option("--workers", workers, "worker threads, 0 = all cores");
    std::optional<int> n, seed, jmin, jmax;
    std::optional<std::string> output, phase, symbol, mode;
    std::optional<double> m, M, r, tol;
    app.add_option("--n", n, "dimension (2 or 3)");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--output", output, "output directory");
    app.add_option("--phase", phase, "builtin phase name");
    app.add_option("--symbol", symbol, "builtin symbol name");
    app.add_option("--m", m, "symbol order");

    auto* net = app.add_subcommand("net", "build and validate a direction net");
    int net_j = 0;
    std::string net_out;
    net->add_option("--j", net_j, "level")->required();
    net->add_option("--out", net_out, "net file path");

    auto* check = app.add_subcommand("check", "symbol class and phase checks");
    std::optional<std::string> cls;
    bool skip_phase = false, skip_symbol = false;
    check->add_option("--class", cls, "S, product or both");
    check->add_flag("--skip-phase", skip_phase);
    check->add_flag("--skip-symbol", skip_symbol);

    auto* exp = app.add_subcommand("experiment", "run a verification experiment");
    std::string kind;
    exp->add_option("kind", kind, "decay|atoms|l2|offdiag|hcheck|separation")
        ->required()
        ->check(CLI::IsMember({"decay", "atoms", "l2", "offdiag", "hcheck", "separation"}));
    exp->add_option("--mode", mode, "decay: plain|lipschitz|offball, offdiag: p_to_2|2_to_q");
    exp->add_option("--j-min", jmin);
    exp->add_option("--j-max", jmax);
    exp->add_option("--M", M, "rectangle dilation constant");
    exp->add_option("--r", r, "ball radius");
    exp->add_option("--tolerance", tol);
    bool no_svg = false;
    exp->add_flag("--no-svg", no_svg);

    auto* rep = app.add_subcommand("report", "summarise report JSON files");
    std::vector<std::string> inputs;
    std::string rep_out;
    rep->add_option("inputs", inputs, "report files")->required();
    rep->add_option("--out", rep_out, "summary CSV path");

    std::vector<std::string> argv_s{"fio_cli"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (auto& s : argv_s) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (rep->parsed()) return cmd_report(inputs, rep_out, out);
        json user = config_path.empty() ? json(nullptr) : read_json_file(config_path);
        if (user.is_null()) user = json::object();
        if (n) user["n"] = *n;
        if (seed) user["seed"] = *seed;
        if (output) user["output"] = *output;
        if (phase) user["phase"]["name"] = *phase;
        if (symbol) user["symbol"]["name"] = *symbol;
        if (m) {
            user["symbol"]["m"] = *m;
            if (exp->parsed() && (kind == "l2" || kind == "offdiag")) user[kind]["m"] = *m;
        }
        if (cls) user["check"]["class"] = *cls;
        if (skip_phase) user["check"]["phase"] = false;
        if (skip_symbol) user["check"]["symbol"] = false;
        if (exp->parsed()) {
            std::string sec = kind == "offdiag" ? "offdiag" : "decay";
            if (mode) user[sec]["mode"] = *mode;
            std::string jsec = kind == "hcheck" ? "hcheck" : "decay";
            if (jmin) user[jsec]["j_min"] = *jmin;
            if (jmax) user[jsec]["j_max"] = *jmax;
            if (M) user[kind == "separation" ? "separation" : "decay"]["M"] = *M;
            if (r) user[kind == "separation" ? "separation" : "decay"]["r"] = *r;
            if (tol) {
                std::string tsec = kind == "atoms" ? "atoms" : kind;
                user[tsec][kind == "atoms" ? "growth_ceiling" : kind == "separation" ? "floor" : "tolerance"] = *tol;
            }
            if (no_svg) user["svg"] = false;
        }
        json cfg;
        if (net->parsed() && n && *n != 2 && *n != 3) throw ConfigError("config key n: unsupported dimension " + std::to_string(*n) + " (need 2 or 3)");
        cfg = resolve_config(user);
        set_worker_count(workers);
        clear_cancel();
        auto prev = std::signal(SIGINT, on_sigint);
        int code = kExitUsage;
        try {
            if (net->parsed()) code = cmd_net(cfg, net_j, net_out, out);
            else if (check->parsed()) code = cmd_check(cfg, out);
            else code = cmd_experiment(cfg, kind, out);
        } catch (...) {
            std::signal(SIGINT, prev);
            throw;
        }
        std::signal(SIGINT, prev);
        return code;
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kExitUsage;
    } catch (const Cancelled&) {
        err << "cancelled\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        err << "config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace fio
