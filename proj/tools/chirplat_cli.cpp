// chirplat — command-line front end for the chirped-drive lattice toolkit.
//
// Subcommands: single, sweep, threshold, boundaries, rays. Runs are configured
// by a flat key=value file (--config) and/or per-key flags of the same name;
// flags override file values. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "chirplat/chirplat.hpp"

namespace {

using namespace chirplat;
using nlohmann::json;

struct CliState {
    std::string config_path;
    KeyValueMap overrides;
};

SweepAxis parse_axis(const std::string& key, const std::string& spec) {
    // param:min:max:count:lin|log
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 5)
        throw ConfigError("config key '" + key + "': expected param:min:max:count:lin|log");
    SweepAxis ax;
    ax.param = parts[0];
    ax.min = parse_double(key, parts[1]);
    ax.max = parse_double(key, parts[2]);
    ax.count = static_cast<int>(parse_long(key, parts[3]));
    if (parts[4] == "log") ax.log_scale = true;
    else if (parts[4] == "lin" || parts[4] == "linear") ax.log_scale = false;
    else throw ConfigError("config key '" + key + "': scale must be lin or log");
    return ax;
}

bool parse_bool(const std::string& key, const std::string& val) {
    if (val == "true" || val == "1" || val == "yes") return true;
    if (val == "false" || val == "0" || val == "no") return false;
    throw ConfigError("config key '" + key + "': cannot parse '" + val + "' as bool");
}

ExperimentConfig build_config(const CliState& cli) {
    KeyValueMap kv;
    if (!cli.config_path.empty()) kv = parse_config_file(cli.config_path);
    for (const auto& [k, v] : cli.overrides) kv[k] = v;

    ExperimentConfig cfg;
    std::optional<int> window_lo, window_hi;
    for (const auto& [key, val] : kv) {
        if (key == "n_sites") cfg.params.n_sites = static_cast<int>(parse_long(key, val));
        else if (key == "p1") cfg.params.p1 = parse_double(key, val);
        else if (key == "p2") cfg.params.p2 = parse_double(key, val);
        else if (key == "p3") cfg.params.p3 = parse_double(key, val);
        else if (key == "boundary") {
            if (val == "periodic") cfg.boundary = Boundary::periodic;
            else if (val == "zero") cfg.boundary = Boundary::zero;
            else throw ConfigError("boundary must be periodic or zero");
        } else if (key == "drive") {
            if (val == "traveling") cfg.drive_kind = Drive::traveling;
            else if (val == "standing") cfg.drive_kind = Drive::standing;
            else throw ConfigError("drive must be traveling or standing");
        } else if (key == "engine") {
            if (val == "modes") cfg.engine = Engine::modes;
            else if (val == "site") cfg.engine = Engine::site;
            else throw ConfigError("engine must be modes or site");
        } else if (key == "initial") cfg.initial_file = val;
        else if (key == "tau_final") cfg.tau_final = parse_double(key, val);
        else if (key == "target_mode") cfg.target_mode = static_cast<int>(parse_long(key, val));
        else if (key == "sample_every") cfg.sample_every = parse_double(key, val);
        else if (key == "rel_tol") cfg.integ.rel_tol = parse_double(key, val);
        else if (key == "abs_tol") cfg.integ.abs_tol = parse_double(key, val);
        else if (key == "max_step") cfg.integ.max_step = parse_double(key, val);
        else if (key == "window_lo") window_lo = static_cast<int>(parse_long(key, val));
        else if (key == "window_hi") window_hi = static_cast<int>(parse_long(key, val));
        else if (key == "sweep1") cfg.axes.insert(cfg.axes.begin(), parse_axis(key, val));
        else if (key == "sweep2") cfg.axes.push_back(parse_axis(key, val));
        else if (key == "bracket_lo") cfg.bracket_lo = parse_double(key, val);
        else if (key == "bracket_hi") cfg.bracket_hi = parse_double(key, val);
        else if (key == "target_transfer") cfg.target_transfer = parse_double(key, val);
        else if (key == "p1_tol") cfg.p1_tol = parse_double(key, val);
        else if (key == "p1_min") cfg.p1_min = parse_double(key, val);
        else if (key == "p1_max") cfg.p1_max = parse_double(key, val);
        else if (key == "p1_count") cfg.p1_count = static_cast<int>(parse_long(key, val));
        else if (key == "ladder_r") cfg.ladder_r = static_cast<int>(parse_long(key, val));
        else if (key == "p2_min") cfg.p2_min = parse_double(key, val);
        else if (key == "p2_max") cfg.p2_max = parse_double(key, val);
        else if (key == "rays") cfg.ray_count = static_cast<int>(parse_long(key, val));
        else if (key == "phi0") cfg.phi0_rule = val;
        else if (key == "k_init") cfg.k_init = parse_double(key, val);
        else if (key == "out") cfg.out_dir = val;
        else if (key == "format") {
            if (val != "csv" && val != "json") throw ConfigError("format must be csv or json");
            cfg.format = val;
        } else if (key == "jobs") cfg.jobs = static_cast<int>(parse_long(key, val));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, val));
        else if (key == "resume") cfg.resume = parse_bool(key, val);
        else throw ConfigError("unknown config key: " + key);
    }
    if (window_lo || window_hi) {
        EfficiencyWindow w = EfficiencyWindow::default_for(cfg.params.n_sites);
        if (window_lo) w.lo_mode = *window_lo;
        if (window_hi) w.hi_mode = *window_hi;
        cfg.window = w;
    }
    cfg.params.validate();
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
    return cfg;
}

void add_key_flags(CLI::App* cmd, CliState& cli) {
    static const std::vector<std::string> keys = {
        "n_sites", "p1", "p2", "p3", "boundary", "drive", "engine", "initial",
        "tau_final", "target_mode", "sample_every", "rel_tol", "abs_tol", "max_step",
        "window_lo", "window_hi", "sweep1", "sweep2",
        "bracket_lo", "bracket_hi", "target_transfer", "p1_tol",
        "p1_min", "p1_max", "p1_count", "ladder_r", "p2_min", "p2_max",
        "rays", "phi0", "k_init", "out", "format", "jobs", "seed", "resume"};
    cmd->add_option("--config", cli.config_path, "flat key=value config file");
    for (const std::string& key : keys) {
        cmd->add_option_function<std::string>(
            "--" + key, [&cli, key](const std::string& v) { cli.overrides[key] = v; },
            "override config key '" + key + "'");
    }
}

json params_json(const ExperimentConfig& cfg) {
    return json{{"n_sites", cfg.params.n_sites},
                {"p1", cfg.params.p1},
                {"p2", cfg.params.p2},
                {"p3", cfg.params.p3},
                {"boundary", cfg.boundary == Boundary::periodic ? "periodic" : "zero"},
                {"drive", cfg.drive_kind == Drive::traveling ? "traveling" : "standing"}};
}

void write_summary(const ExperimentConfig& cfg, const RunResult& r, const std::string& path) {
    json j{{"params", params_json(cfg)},
           {"tau_final", r.tau_final},
           {"efficiency", r.efficiency},
           {"regime", to_string(r.regime)},
           {"norm_drift", r.norm_drift},
           {"wall_ms", r.wall_ms},
           {"seed", cfg.seed}};
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (cfg.format == "json") std::cout << j.dump(2) << std::endl;
}

void write_mode_history(const std::string& path, const RunResult& r) {
    CsvWriter csv(path);
    std::vector<std::string> header = {"tau"};
    const std::size_t n = r.mode_populations.empty() ? 0 : r.mode_populations.front().size();
    for (std::size_t l = 0; l < n; ++l) header.push_back("pop_" + std::to_string(l));
    csv.row(header);
    for (std::size_t i = 0; i < r.sample_taus.size(); ++i) {
        std::vector<std::string> cells = {fmt_g(r.sample_taus[i])};
        for (double p : r.mode_populations[i]) cells.push_back(fmt_g(p));
        csv.row(cells);
    }
}

void write_histogram(const std::string& path, const RunResult& r, int n_sites) {
    CsvWriter csv(path);
    csv.row({"mode_index_shifted", "population"});
    const auto& pops = r.mode_populations.back();
    // rows ordered by shifted index, ascending
    for (int shifted = -(n_sites - 1) / 2; shifted <= n_sites / 2; ++shifted) {
        const int l = (shifted + n_sites) % n_sites;
        if (l >= static_cast<int>(pops.size())) continue;
        csv.row({std::to_string(shifted), fmt_g(pops[l])});
    }
}

void write_site_trajectory(const std::string& path, const std::vector<LatticeState>& traj) {
    CsvWriter csv(path);
    std::vector<std::string> header = {"tau"};
    const int n = traj.empty() ? 0 : traj.front().n_sites();
    for (int j = 0; j < n; ++j) {
        header.push_back("re_psi_" + std::to_string(j));
        header.push_back("im_psi_" + std::to_string(j));
    }
    csv.row(header);
    for (const LatticeState& s : traj) {
        std::vector<std::string> cells = {fmt_g(s.tau)};
        for (const cxd& a : s.amplitudes) {
            cells.push_back(fmt_g(a.real()));
            cells.push_back(fmt_g(a.imag()));
        }
        csv.row(cells);
    }
}

int cmd_single(const CliState& cli) {
    const ExperimentConfig cfg = build_config(cli);
    const auto drive = DriveSchedule::quadratic_chirp();
    const RunResult r = run_single(cfg, drive);
    ensure_directory(cfg.out_dir);
    write_mode_history(cfg.out_dir + "/mode_history.csv", r);
    write_histogram(cfg.out_dir + "/histogram.csv", r, cfg.params.n_sites);
    if (!r.site_trajectory.empty())
        write_site_trajectory(cfg.out_dir + "/trajectory.csv", r.site_trajectory);
    write_summary(cfg, r, cfg.out_dir + "/summary.json");
    if (cfg.format != "json")
        std::printf("single: efficiency=%s regime=%s norm_drift=%s (tau_f=%s, %.0f ms)\n",
                    fmt_g(r.efficiency).c_str(), to_string(r.regime),
                    fmt_g(r.norm_drift).c_str(), fmt_g(r.tau_final).c_str(), r.wall_ms);
    return 0;
}

std::string sweep_row(const SweepRecord& rec) {
    return fmt_g(rec.p1) + "," + fmt_g(rec.p2) + "," + fmt_g(rec.p3) + "," +
           fmt_g(rec.efficiency) + "," + to_string(rec.regime) + "," + fmt_g(rec.norm_drift) +
           "," + rec.error;
}

int cmd_sweep(const CliState& cli) {
    ExperimentConfig cfg = build_config(cli);
    const auto drive = DriveSchedule::quadratic_chirp();
    ensure_directory(cfg.out_dir);
    const std::string path = cfg.out_dir + "/sweep.csv";
    const std::string header = "p1,p2,p3,efficiency,regime,norm_drift,error";

    // --resume: keep rows already present (they are written in grid order).
    std::vector<std::string> done;
    if (cfg.resume) {
        std::ifstream in(path);
        std::string line;
        bool first = true;
        while (in && std::getline(in, line)) {
            if (first) {
                first = false;
                continue;
            }
            if (!trim(line).empty()) done.push_back(line);
        }
    }

    const auto records = run_sweep(cfg, drive, static_cast<int>(done.size()));

    std::ofstream out(path, std::ios::binary);
    out << header << '\n';
    const std::size_t kept = std::min(done.size(), records.size());
    for (std::size_t i = 0; i < kept; ++i) out << done[i] << '\n';
    for (std::size_t i = kept; i < records.size(); ++i) out << sweep_row(records[i]) << '\n';
    std::printf("sweep: %zu points (%zu resumed) -> %s\n", records.size(), kept, path.c_str());
    return 0;
}

int cmd_threshold(const CliState& cli) {
    const ExperimentConfig cfg = build_config(cli);
    const auto drive = DriveSchedule::quadratic_chirp();
    const ThresholdResult res = bisect_threshold(cfg, drive);
    ensure_directory(cfg.out_dir);
    json j{{"params", params_json(cfg)},
           {"p1_cr", res.p1_cr},
           {"evaluations", res.evaluations},
           {"bracket", {cfg.bracket_lo, cfg.bracket_hi}},
           {"transfer_at_bracket", {res.transfer_lo, res.transfer_hi}},
           {"target_transfer", cfg.target_transfer},
           {"seed", cfg.seed}};
    std::ofstream out(cfg.out_dir + "/threshold.json");
    out << j.dump(2) << '\n';
    if (cfg.format == "json") std::cout << j.dump(2) << std::endl;
    else std::printf("threshold: p1_cr=%s (%d runs)\n", fmt_g(res.p1_cr).c_str(), res.evaluations);
    return 0;
}

int cmd_boundaries(const CliState& cli) {
    const ExperimentConfig cfg = build_config(cli);
    const auto drive = DriveSchedule::quadratic_chirp();
    const BoundaryCurves curves = compute_boundaries(cfg, drive);
    ensure_directory(cfg.out_dir);
    auto write = [&](const std::string& name, const std::vector<BoundaryPoint>& pts,
                     const char* kind) {
        CsvWriter csv(cfg.out_dir + "/boundary_" + name + ".csv");
        csv.row({"p1", "p2_boundary", "line_kind"});
        for (const BoundaryPoint& p : pts)
            csv.row({fmt_g(p.p1), fmt_g(p.p2_boundary), kind});
    };
    write("ar", curves.ar, "ar_threshold");
    write("separation", curves.separation, "separation");
    write("separatrix", curves.separatrix, "large_separatrix");
    write("ladder", curves.ladder, "ladder_threshold");
    std::printf("boundaries: 4 curves -> %s/boundary_*.csv\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_rays(const CliState& cli) {
    const ExperimentConfig cfg = build_config(cli);
    const auto drive = DriveSchedule::quadratic_chirp();
    const RayEnsembleResult res = run_ray_ensemble(cfg, drive);
    ensure_directory(cfg.out_dir);
    {
        CsvWriter csv(cfg.out_dir + "/rays.csv");
        csv.row({"ray_id", "tau", "x", "k", "phi", "captured_flag"});
        for (const RaySample& s : res.samples)
            csv.row({std::to_string(s.ray_id), fmt_g(s.tau), fmt_g(s.x), fmt_g(s.k),
                     fmt_g(s.phi), s.captured ? "1" : "0"});
    }
    json j{{"params", params_json(cfg)},
           {"rays", cfg.ray_count},
           {"phi0", cfg.phi0_rule},
           {"capture_fraction",
            std::isnan(res.capture_fraction) ? json(nullptr) : json(res.capture_fraction)},
           {"seed", cfg.seed}};
    std::ofstream out(cfg.out_dir + "/rays.json");
    out << j.dump(2) << '\n';
    if (cfg.format == "json") std::cout << j.dump(2) << std::endl;
    else if (std::isnan(res.capture_fraction))
        std::printf("rays: empty ensemble, capture fraction undefined\n");
    else
        std::printf("rays: capture fraction %s of %d\n", fmt_g(res.capture_fraction).c_str(),
                    cfg.ray_count);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chirped-drive discrete nonlinear Schrodinger lattice toolkit"};
    app.require_subcommand(1);

    CliState cli;
    int (*runner)(const CliState&) = nullptr;
    for (const auto& [name, desc, fn] :
         {std::tuple{"single", "one run: mode history, final histogram, JSON summary",
                     &cmd_single},
          std::tuple{"sweep", "parameter-grid sweep to sweep.csv", &cmd_sweep},
          std::tuple{"threshold", "bisect the 50%-transfer drive strength", &cmd_threshold},
          std::tuple{"boundaries", "emit regime boundary curves", &cmd_boundaries},
          std::tuple{"rays", "reduced-system ray ensemble and capture fraction", &cmd_rays}}) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_key_flags(cmd, cli);
        cmd->callback([&runner, fn] { runner = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return runner(cli);
    } catch (const chirplat::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
