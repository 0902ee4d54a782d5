// t4: command-line front end.
//
// Exit codes: 0 ok, 1 unexpected error, 2 bad flags or config, 3 solver
// failure, 4 unmet preconditions, 5 muast search exhausted.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "t4/dispersion.hpp"
#include "t4/fd.hpp"
#include "t4/io.hpp"
#include "t4/parallel.hpp"
#include "t4/regions.hpp"
#include "t4/simulate.hpp"
#include "t4/spectrum.hpp"

namespace fs = std::filesystem;
using t4::io::json;
using t4::io::num;

namespace {

enum Exit { Ok = 0, Unexpected = 1, BadFlags = 2, Solver = 3, Precondition = 4, NotFound = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("malformed number '" + s + "' in " + what);
    }
    if (used != s.size()) throw UsageError("malformed number '" + s + "' in " + what);
    return x;
}

int to_int(const std::string& s, const std::string& what) {
    const double x = to_double(s, what);
    if (x != static_cast<int>(x)) throw UsageError("expected an integer in " + what + ", got '" + s + "'");
    return static_cast<int>(x);
}

t4::ReactionParams parse_p(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 5) throw UsageError("--p needs five values fu,fv,gu,gv,k");
    t4::ReactionParams p{to_double(parts[0], "--p"), to_double(parts[1], "--p"), to_double(parts[2], "--p"),
                         to_double(parts[3], "--p"), to_double(parts[4], "--p")};
    try {
        t4::validate(p);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

t4::ReactionParams p_from_json(const json& j) {
    if (!j.is_array() || j.size() != 5) throw UsageError("\"p\" must be an array of five numbers");
    std::ostringstream os;
    for (std::size_t i = 0; i < 5; ++i) os << (i ? "," : "") << num(j[i].get<double>());
    return parse_p(os.str());
}

t4::RegionSpec parse_region(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw UsageError("family must look like EPlus:0, got '" + s + "'");
    const auto f = t4::parse_family(parts[0]);
    if (!f) throw UsageError("unknown region family '" + parts[0] + "'");
    const int l = to_int(parts[1], "--families");
    if (l < 0) throw UsageError("region index must be nonnegative");
    if (t4::parity_of(*f) == t4::Parity::Periodic && l < 1)
        throw UsageError("periodic families start at l = 1");
    return {*f, l};
}

t4::Axis parse_axis(const std::string& s, const std::string& what) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw UsageError(what + " axis must be lo:hi:n");
    t4::Axis a{to_double(parts[0], what), to_double(parts[1], what), to_int(parts[2], what)};
    if (!(a.hi > a.lo) || a.n < 1) throw UsageError(what + " axis needs lo < hi and n >= 1");
    return a;
}

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
    } else {
        t4::io::atomic_write(out, content);
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config parse error: ") + e.what());
    }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw UsageError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw UsageError("unknown key \"" + key + "\" in " + where);
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
    std::string bc = "free";
    double tau = 0.0;
    double radius = 1.0;
    int count = 1;
    std::string method = "param";
    std::string format = "csv";
    int n_grid = 1024;
    std::string out;
};

int cmd_spectrum(const SpectrumArgs& a) {
    const t4::TensionedOperator op{a.tau, a.bc == "free" ? t4::Boundary::Free : t4::Boundary::Periodic};
    if (!(a.radius > 0.0)) throw UsageError("--radius must be positive");
    if (a.count < 1) throw UsageError("--count must be at least 1");
    std::vector<t4::SpectrumPoint> pts;
    if (a.method == "fd") {
        pts = t4::fd_spectrum_points(op, a.radius, a.n_grid, a.count);
    } else {
        const auto m = a.method == "det" ? t4::Method::Determinant : t4::Method::Parameterized;
        pts = t4::spectrum_list(op, a.radius, a.count, op.bc == t4::Boundary::Free ? m : t4::Method::Exact);
    }
    emit(a.out, a.format == "json" ? t4::io::spectrum_json(pts).dump(2) + "\n" : t4::io::spectrum_csv(pts));
    return Ok;
}

struct ClassifyArgs {
    std::string p;
    double tau = 0.0;
    double radius = 1.0;
    std::string bc = "free";
};

int cmd_classify(const ClassifyArgs& a) {
    const auto p = parse_p(a.p);
    if (!(a.radius > 0.0)) throw UsageError("--radius must be positive");
    const auto bc = a.bc == "free" ? t4::Boundary::Free : t4::Boundary::Periodic;
    const auto mus = t4::deciding_spectrum(p, bc, a.radius, a.tau);
    const auto d = t4::in_turing_space(p, a.tau, mus);
    json j = t4::io::to_json(d);
    j["p"] = t4::io::to_json(p);
    j["tau"] = a.tau;
    j["R"] = a.radius;
    j["bc"] = a.bc;
    j["max_growth"] = mus.size() > 1 ? json(t4::max_growth(p, mus)) : json(nullptr);
    std::cout << j.dump(2) << "\n";
    return Ok;
}

struct RegionArgs {
    std::string config;
    std::string p;
    std::string families;
    std::string grid;
    int samples = 200;
    std::string svg;
    std::string out_dir = ".";
};

int cmd_region(RegionArgs a) {
    std::vector<std::string> fams;
    std::optional<t4::ReactionParams> p;
    if (!a.config.empty()) {
        const json c = read_json_file(a.config);
        reject_unknown(c, {"p", "families", "grid", "samples", "svg", "out_dir"}, "region config");
        try {
            if (c.contains("p")) p = p_from_json(c["p"]);
            if (c.contains("families"))
                for (const auto& f : c["families"]) fams.push_back(f.get<std::string>());
            if (c.contains("grid")) {
                reject_unknown(c["grid"], {"R", "tau"}, "grid");
                auto axis = [](const json& v) {
                    if (!v.is_array() || v.size() != 3) throw UsageError("grid axes must be [lo, hi, n]");
                    return num(v[0].get<double>()) + ":" + num(v[1].get<double>()) + ":" +
                           std::to_string(v[2].get<int>());
                };
                a.grid = axis(c["grid"].at("R")) + "," + axis(c["grid"].at("tau"));
            }
            if (c.contains("samples")) a.samples = c["samples"].get<int>();
            if (c.contains("svg")) a.svg = c["svg"].get<std::string>();
            if (c.contains("out_dir")) a.out_dir = c["out_dir"].get<std::string>();
        } catch (const json::exception& e) {
            throw UsageError(std::string("region config: ") + e.what());
        }
    }
    if (!a.p.empty()) p = parse_p(a.p);
    if (!a.families.empty()) fams = split(a.families, ',');
    if (!p) throw UsageError("--p is required");
    if (fams.empty()) throw UsageError("--families is required");
    if (a.grid.empty()) throw UsageError("--grid is required");
    if (fams.size() > 32) throw UsageError("at most 32 families per raster");
    if (a.samples < 2) throw UsageError("--samples must be at least 2");

    std::vector<t4::RegionSpec> specs;
    for (const auto& f : fams) specs.push_back(parse_region(f));
    const auto axes = split(a.grid, ',');
    if (axes.size() != 2) throw UsageError("--grid must be Rmin:Rmax:n,tmin:tmax:n");
    const t4::Axis r_axis = parse_axis(axes[0], "R");
    const t4::Axis tau_axis = parse_axis(axes[1], "tau");
    if (r_axis.lo < 0.0) throw UsageError("R axis must be nonnegative");

    const auto q = t4::quantities(*p);
    for (const auto& s : specs) t4::require_family_conditions(s.family, q);

    const t4::Range r_range{r_axis.lo > 0.0 ? r_axis.lo : r_axis.hi / 500.0, r_axis.hi};
    std::vector<t4::RegionBoundary> curves;
    for (const auto& s : specs)
        for (auto side : {t4::Side::Top, t4::Side::Bottom}) {
            if (t4::kind_of(s.family) == t4::RegionKind::Minus && side == t4::Side::Bottom) continue;
            try {
                curves.push_back(t4::boundary_curve(s, *p, side, a.samples, r_range));
            } catch (const t4::NoSolution&) {
                // Boundary does not enter the R range.
            }
        }
    const auto raster = t4::rasterize(*p, r_axis, tau_axis, specs);

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    t4::io::atomic_write(dir / "curves.csv", t4::io::curves_csv(curves));
    t4::io::atomic_write(dir / "raster.csv", t4::io::raster_csv(raster));
    json header = t4::io::raster_header(raster, *p);
    t4::io::atomic_write(dir / "raster.json", header.dump(2) + "\n");
    if (!a.svg.empty()) t4::io::atomic_write(a.svg, t4::render_svg(raster, curves));

    json fam_counts = json::object();
    for (std::size_t f = 0; f < specs.size(); ++f) {
        std::size_t n = 0;
        for (auto c : raster.cells) n += c >> f & 1u;
        fam_counts[t4::label(specs[f])] = n;
    }
    header["cells_per_family"] = fam_counts;
    std::size_t neg_member = 0;
    for (int j = 0; j < tau_axis.n; ++j)
        if (tau_axis.center(j) >= 0.0)
            for (int i = 0; i < r_axis.n; ++i) neg_member += raster.at(i, j) != 0;
    header["member_cells_tau_nonnegative"] = neg_member;
    header["curve_points"] = [&] {
        std::size_t n = 0;
        for (const auto& c : curves) n += c.curve.size();
        return n;
    }();
    std::cout << header.dump(2) << "\n";
    return Ok;
}

struct SimArgs {
    std::string config;
    std::optional<double> radius, tau, k, dt, t_max, amplitude;
    std::optional<int> n_grid, stride;
    std::optional<std::string> gm;
    std::optional<std::uint64_t> seed;
    int seeds = 1;
    std::string snapshots = "none";
    std::string out_dir = ".";
};

t4::SimConfig sim_config_from_json(const json& c, SimArgs& a) {
    reject_unknown(c, {"R", "tau", "k", "kinetics", "n_grid", "dt", "t_max", "perturbation_amplitude", "seed",
                       "snapshot_stride", "seeds", "snapshots", "out_dir"},
                   "simulate config");
    t4::SimConfig cfg;
    try {
        if (c.contains("R")) cfg.R = c["R"].get<double>();
        if (c.contains("tau")) cfg.tau = c["tau"].get<double>();
        if (c.contains("k")) cfg.k = c["k"].get<double>();
        if (c.contains("kinetics")) {
            const auto& g = c["kinetics"];
            reject_unknown(g, {"k1", "k2", "k3", "k4", "k5"}, "kinetics");
            if (g.contains("k1")) cfg.kinetics.k1 = g["k1"].get<double>();
            if (g.contains("k2")) cfg.kinetics.k2 = g["k2"].get<double>();
            if (g.contains("k3")) cfg.kinetics.k3 = g["k3"].get<double>();
            if (g.contains("k4")) cfg.kinetics.k4 = g["k4"].get<double>();
            if (g.contains("k5")) cfg.kinetics.k5 = g["k5"].get<double>();
        }
        if (c.contains("n_grid")) cfg.n_grid = c["n_grid"].get<int>();
        if (c.contains("dt")) cfg.dt = c["dt"].get<double>();
        if (c.contains("t_max")) cfg.t_max = c["t_max"].get<double>();
        if (c.contains("perturbation_amplitude")) cfg.perturbation_amplitude = c["perturbation_amplitude"].get<double>();
        if (c.contains("snapshot_stride")) cfg.snapshot_stride = c["snapshot_stride"].get<int>();
        if (c.contains("seed") && !a.seed) a.seed = c["seed"].get<std::uint64_t>();
        if (c.contains("seeds")) a.seeds = c["seeds"].get<int>();
        if (c.contains("snapshots")) a.snapshots = c["snapshots"].get<std::string>();
        if (c.contains("out_dir")) a.out_dir = c["out_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("simulate config: ") + e.what());
    }
    return cfg;
}

int cmd_simulate(SimArgs a, const std::set<std::string>& given) {
    t4::SimConfig base;
    if (!a.config.empty()) {
        const bool seeds_flag = given.contains("seeds"), snap_flag = given.contains("snapshots"),
                   out_flag = given.contains("out-dir");
        const SimArgs flags = a;
        base = sim_config_from_json(read_json_file(a.config), a);
        if (seeds_flag) a.seeds = flags.seeds;
        if (snap_flag) a.snapshots = flags.snapshots;
        if (out_flag) a.out_dir = flags.out_dir;
    }
    if (a.radius) base.R = *a.radius;
    if (a.tau) base.tau = *a.tau;
    if (a.k) base.k = *a.k;
    if (a.dt) base.dt = *a.dt;
    if (a.t_max) base.t_max = *a.t_max;
    if (a.amplitude) base.perturbation_amplitude = *a.amplitude;
    if (a.n_grid) base.n_grid = *a.n_grid;
    if (a.stride) base.snapshot_stride = *a.stride;
    if (a.gm) {
        const auto parts = split(*a.gm, ',');
        if (parts.size() != 5) throw UsageError("--gm needs five values k1,k2,k3,k4,k5");
        base.kinetics = {to_double(parts[0], "--gm"), to_double(parts[1], "--gm"), to_double(parts[2], "--gm"),
                         to_double(parts[3], "--gm"), to_double(parts[4], "--gm")};
    }
    if (!a.seed) throw UsageError("--seed is required (flag or \"seed\" in the config)");
    if (a.seeds < 1) throw UsageError("--seeds must be at least 1");
    if (a.snapshots != "none" && a.snapshots != "csv" && a.snapshots != "bin")
        throw UsageError("--snapshots must be none, csv or bin");
    base.seed = *a.seed;
    try {
        t4::validate(base);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    t4::gm_steady_state(base.kinetics);  // NoSteadyState -> exit 4

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    const auto n = static_cast<std::size_t>(a.seeds);
    std::vector<json> reports(n);
    std::vector<int> codes(n, Ok);

    t4::parallel_for(n, [&](std::size_t i) {
        t4::SimConfig cfg = base;
        cfg.seed = base.seed + i;
        const std::string tag = "seed" + std::to_string(cfg.seed);
        json rep;
        try {
            std::vector<double> x(static_cast<std::size_t>(cfg.n_grid));
            for (int j = 0; j < cfg.n_grid; ++j) x[j] = -cfg.R + j * 2.0 * cfg.R / (cfg.n_grid - 1);
            std::optional<t4::io::CsvSnapshots> csv;
            std::optional<t4::io::BinarySnapshots> bin;
            t4::SnapshotSink sink;
            if (a.snapshots == "csv") {
                csv.emplace(x);
                sink = [&](double t, const auto& u, const auto& v) { (*csv)(t, u, v); };
            } else if (a.snapshots == "bin") {
                bin.emplace(static_cast<std::uint64_t>(cfg.n_grid), cfg.R, cfg.tau, cfg.k, cfg.dt);
                sink = [&](double t, const auto& u, const auto& v) { (*bin)(t, u, v); };
            }
            const auto r = t4::run(cfg, sink);
            rep = t4::io::to_json(r);
            if (csv) t4::io::atomic_write(dir / ("snapshots_" + tag + ".csv"), csv->str());
            if (bin) t4::io::atomic_write(dir / ("snapshots_" + tag + ".bin"), bin->str());
        } catch (const t4::Error& e) {
            rep = {{"classification", "SolverFailure"}, {"error", e.what()}, {"seed", cfg.seed}};
            codes[i] = Solver;
        }
        rep["config"] = t4::io::to_json(cfg);
        t4::io::atomic_write(dir / ("report_" + tag + ".json"), rep.dump(2) + "\n");
        reports[i] = std::move(rep);
    });

    int code = Ok;
    for (int c : codes) code = std::max(code, c);
    if (n == 1) {
        std::cout << reports[0].dump(2) << "\n";
        return code;
    }
    json summary;
    std::map<std::string, int> counts;
    json runs = json::array();
    for (const auto& r : reports) {
        const auto cls = r["classification"].get<std::string>();
        ++counts[cls];
        runs.push_back({{"seed", r["config"]["seed"]}, {"classification", cls}, {"final_time", r.value("final_time", 0.0)}});
    }
    summary["runs"] = runs;
    summary["counts"] = counts;
    std::cout << summary.dump(2) << "\n";
    return code;
}

struct MuastArgs {
    double tau = 0.0;
    double c = 1.0;
    double r_min = 1.0 / 1024.0;
    double r_max = 64.0;
};

int cmd_muast(const MuastArgs& a) {
    if (!(a.tau < 0.0)) throw UsageError("--tau must be negative");
    if (!(a.c > 0.0)) throw UsageError("--c must be positive");
    if (!(a.r_min > 0.0 && a.r_max > a.r_min)) throw UsageError("need 0 < --r-min < --r-max");
    const auto s = t4::muast_search(a.tau, a.c, a.r_min, a.r_max);
    json sweep = json::array();
    for (const auto& [R, mu] : s.sweep) sweep.push_back({R, mu});
    json j{{"found", s.found}, {"tau", a.tau},     {"c", a.c},         {"target", s.target},
           {"R", s.found ? json(s.R) : json(nullptr)}, {"mu1", s.found ? json(s.mu1) : json(nullptr)},
           {"r_min", s.r_min}, {"r_max", s.r_max}, {"sweep", sweep}};
    std::cout << j.dump(2) << "\n";
    return s.found ? Ok : NotFound;
}

struct BranchArgs {
    std::string bc = "free";
    double tau_min = -30.0;
    double tau_max = 30.0;
    int n = 241;
    int l_max = 3;
    double radius = 1.0;
    std::string out;
};

int cmd_branches(const BranchArgs& a) {
    if (!(a.tau_max > a.tau_min) || a.n < 2 || a.l_max < 0 || !(a.radius > 0.0))
        throw UsageError("need tau-min < tau-max, n >= 2, l-max >= 0, radius > 0");
    const bool free = a.bc == "free";
    std::vector<std::string> rows(static_cast<std::size_t>(a.n));
    t4::parallel_for(rows.size(), [&](std::size_t i) {
        const double tau = a.tau_min + (a.tau_max - a.tau_min) * static_cast<double>(i) / (a.n - 1);
        std::string s;
        if (free) {
            for (auto par : {t4::Parity::Even, t4::Parity::Odd})
                for (int l = 0; l <= a.l_max; ++l)
                    s += std::string(t4::to_string(par)) + ',' + std::to_string(l) + ',' + num(tau) + ',' +
                         num(a.radius) + ',' + num(t4::free_branch_mu({par, l}, tau, a.radius)) + '\n';
        } else {
            for (int l = 1; l <= a.l_max + 1; ++l)
                s += "periodic," + std::to_string(l) + ',' + num(tau) + ',' + num(a.radius) + ',' +
                     num(t4::periodic_mu(l, tau, a.radius)) + '\n';
        }
        rows[i] = std::move(s);
    });
    std::string out = "branch_parity,l,tau,R,mu\n";
    for (const auto& r : rows) out += r;
    emit(a.out, out);
    return Ok;
}

struct DispersionArgs {
    std::string p;
    double mu_min = -0.5;
    double mu_max = 1.0;
    int n = 301;
    std::string out;
};

int cmd_dispersion(const DispersionArgs& a) {
    const auto p = parse_p(a.p);
    if (!(a.mu_max > a.mu_min) || a.n < 2) throw UsageError("need mu-min < mu-max and n >= 2");
    std::string out = "mu,F,H,lambda_max_real\n";
    for (int i = 0; i < a.n; ++i) {
        const double mu = a.mu_min + (a.mu_max - a.mu_min) * i / (a.n - 1);
        const auto g = t4::growth_rate(p, mu);
        out += num(mu) + ',' + num(g.F) + ',' + num(g.H) + ',' + num(g.lambda_max_real) + '\n';
    }
    emit(a.out, out);
    return Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turing instability for fourth-order reaction-diffusion systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "t4 1.0");

    const std::vector<std::string> bcs{"free", "periodic"};

    SpectrumArgs sa;
    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of u'''' - tau u'' on (-R, R)");
    spectrum->add_option("--bc", sa.bc, "Boundary conditions")->check(CLI::IsMember(bcs));
    spectrum->add_option("--tau", sa.tau, "Tension")->required();
    spectrum->add_option("--radius", sa.radius, "Half-length R")->required();
    spectrum->add_option("--count", sa.count, "Number of eigenvalues")->required();
    spectrum->add_option("--method", sa.method, "param, det or fd")->check(CLI::IsMember({"param", "det", "fd"}));
    spectrum->add_option("--n-grid", sa.n_grid, "Grid size for --method fd");
    spectrum->add_option("--format", sa.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    spectrum->add_option("--out", sa.out, "Output file (default stdout)");

    ClassifyArgs ca;
    auto* classify = app.add_subcommand("classify", "Turing-space membership decision");
    classify->add_option("--p", ca.p, "fu,fv,gu,gv,k")->required();
    classify->add_option("--tau", ca.tau, "Tension")->required();
    classify->add_option("--radius", ca.radius, "Half-length R")->required();
    classify->add_option("--bc", ca.bc, "Boundary conditions")->check(CLI::IsMember(bcs));

    RegionArgs ra;
    auto* region = app.add_subcommand("region", "Instability region curves and raster");
    region->add_option("--config", ra.config, "JSON request");
    region->add_option("--p", ra.p, "fu,fv,gu,gv,k");
    region->add_option("--families", ra.families, "Comma list such as EPlus:0,OMinus:1");
    region->add_option("--grid", ra.grid, "Rmin:Rmax:n,tmin:tmax:n");
    region->add_option("--samples", ra.samples, "Points per boundary curve");
    region->add_option("--svg", ra.svg, "SVG output file");
    region->add_option("--out-dir", ra.out_dir, "Directory for curves.csv, raster.csv, raster.json");

    SimArgs sm;
    double f_radius = 0, f_tau = 0, f_k = 0, f_dt = 0, f_tmax = 0, f_amp = 0;
    int f_n = 0, f_stride = 0;
    std::string f_gm;
    std::uint64_t f_seed = 0;
    auto* simulate = app.add_subcommand("simulate", "Gierer-Meinhardt run from a perturbed steady state");
    simulate->add_option("--config", sm.config, "JSON run configuration");
    simulate->add_option("--radius", f_radius, "Half-length R");
    simulate->add_option("--tau", f_tau, "Tension");
    simulate->add_option("--k", f_k, "Diffusivity ratio");
    simulate->add_option("--gm", f_gm, "k1,k2,k3,k4,k5");
    simulate->add_option("--n-grid", f_n, "Grid nodes");
    simulate->add_option("--dt", f_dt, "Time step");
    simulate->add_option("--t-max", f_tmax, "Final time");
    simulate->add_option("--amplitude", f_amp, "Relative perturbation amplitude");
    simulate->add_option("--stride", f_stride, "Steps between snapshots");
    simulate->add_option("--seed", f_seed, "Random seed (first seed of a batch)");
    simulate->add_option("--seeds", sm.seeds, "Number of consecutive seeds to run");
    simulate->add_option("--snapshots", sm.snapshots, "none, csv or bin");
    simulate->add_option("--out-dir", sm.out_dir, "Directory for reports and snapshots");

    MuastArgs ma;
    auto* muast = app.add_subcommand("muast", "Find R with mu_1((-R,R), tau) <= -c tau^2");
    muast->add_option("--tau", ma.tau, "Tension (negative)")->required();
    muast->add_option("--c", ma.c, "Constant c > 0")->required();
    muast->add_option("--r-min", ma.r_min, "Smallest R swept");
    muast->add_option("--r-max", ma.r_max, "Largest R swept");

    BranchArgs ba;
    auto* branches = app.add_subcommand("branches", "Eigenvalue branches as functions of tau");
    branches->add_option("--bc", ba.bc, "Boundary conditions")->check(CLI::IsMember(bcs));
    branches->add_option("--tau-min", ba.tau_min);
    branches->add_option("--tau-max", ba.tau_max);
    branches->add_option("--n", ba.n, "Tension samples");
    branches->add_option("--l-max", ba.l_max, "Highest branch index");
    branches->add_option("--radius", ba.radius, "Half-length R");
    branches->add_option("--out", ba.out, "Output file (default stdout)");

    DispersionArgs da;
    auto* dispersion = app.add_subcommand("dispersion", "F, H and the growth rate along mu");
    dispersion->add_option("--p", da.p, "fu,fv,gu,gv,k")->required();
    dispersion->add_option("--mu-min", da.mu_min);
    dispersion->add_option("--mu-max", da.mu_max);
    dispersion->add_option("--n", da.n, "Samples");
    dispersion->add_option("--out", da.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return BadFlags;
    }

    try {
        if (spectrum->parsed()) return cmd_spectrum(sa);
        if (classify->parsed()) return cmd_classify(ca);
        if (region->parsed()) return cmd_region(ra);
        if (simulate->parsed()) {
            std::set<std::string> given;
            for (const char* name : {"seeds", "snapshots", "out-dir"})
                if (simulate->get_option(std::string("--") + name)->count() > 0) given.insert(name);
            auto set = [&](const char* name, auto& dst, const auto& v) {
                if (simulate->get_option(name)->count() > 0) dst = v;
            };
            set("--radius", sm.radius, f_radius);
            set("--tau", sm.tau, f_tau);
            set("--k", sm.k, f_k);
            set("--dt", sm.dt, f_dt);
            set("--t-max", sm.t_max, f_tmax);
            set("--amplitude", sm.amplitude, f_amp);
            set("--n-grid", sm.n_grid, f_n);
            set("--stride", sm.stride, f_stride);
            set("--gm", sm.gm, f_gm);
            set("--seed", sm.seed, f_seed);
            return cmd_simulate(sm, given);
        }
        if (muast->parsed()) return cmd_muast(ma);
        if (branches->parsed()) return cmd_branches(ba);
        if (dispersion->parsed()) return cmd_dispersion(da);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return BadFlags;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return BadFlags;
    } catch (const t4::PreconditionError& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return Precondition;
    } catch (const t4::NoSteadyState& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return Precondition;
    } catch (const t4::Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return Solver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Unexpected;
    }
    return Unexpected;
}
