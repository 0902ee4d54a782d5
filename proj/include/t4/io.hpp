#pragma once

// Serialization: CSV and JSON records, binary snapshot frames, atomic writes.
// Every number is written with 17 significant digits.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"

#include "t4/dispersion.hpp"
#include "t4/regions.hpp"
#include "t4/simulate.hpp"
#include "t4/spectrum.hpp"

namespace t4::io {

using json = nlohmann::ordered_json;

inline std::string num(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

/// Writes `content` to a sibling temp file and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Spectrum

inline std::string spectrum_csv(std::span<const SpectrumPoint> pts) {
    std::string s = "branch_parity,l,tau,R,mu,method\n";
    for (const auto& p : pts) {
        s += to_string(p.branch.parity);
        s += ',' + std::to_string(p.branch.index) + ',' + num(p.tau) + ',' + num(p.R) + ',' + num(p.mu) + ',';
        s += to_string(p.method);
        s += '\n';
    }
    return s;
}

inline json to_json(const SpectrumPoint& p) {
    return {{"branch_parity", to_string(p.branch.parity)}, {"l", p.branch.index}, {"tau", p.tau},
            {"R", p.R},                                     {"mu", p.mu},         {"method", to_string(p.method)}};
}

inline json spectrum_json(std::span<const SpectrumPoint> pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(to_json(p));
    return a;
}

// ---------------------------------------------------------------------------
// Dispersion

inline json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline json to_json(const TuringDecision& d) {
    json j;
    j["member"] = d.member;
    j["case"] = d.case_tag ? json(std::string(1, *d.case_tag)) : json(nullptr);
    j["witness_mu"] = opt(d.witness_mu);
    j["conditions"] = {{"13", d.conditions[0]}, {"14", d.conditions[1]}, {"15", d.conditions[2]},
                       {"16", d.conditions[3]}};
    j["A"] = d.A;
    j["a"] = opt(d.a);
    j["b"] = opt(d.b);
    return j;
}

inline json to_json(const ReactionParams& p) {
    return {{"f_u", p.f_u}, {"f_v", p.f_v}, {"g_u", p.g_u}, {"g_v", p.g_v}, {"k", p.k}};
}

// ---------------------------------------------------------------------------
// Regions

inline std::string curves_csv(std::span<const RegionBoundary> curves) {
    std::string s = "family,l,side,R,tau\n";
    for (const auto& c : curves)
        for (const auto& pt : c.curve) {
            s += to_string(c.spec.family);
            s += ',' + std::to_string(c.spec.l) + ',';
            s += to_string(c.side);
            s += ',' + num(pt.R) + ',' + num(pt.tau) + '\n';
        }
    return s;
}

/// One row per cell: indices, center, family bitmask and per-cell flags.
inline std::string raster_csv(const GridRaster& g) {
    std::string s = "i,j,R,tau,mask,turing,negative_mode\n";
    for (int j = 0; j < g.tau.n; ++j)
        for (int i = 0; i < g.R.n; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * g.R.n + i;
            s += std::to_string(i) + ',' + std::to_string(j) + ',' + num(g.R.center(i)) + ',' +
                 num(g.tau.center(j)) + ',' + std::to_string(g.cells[c]) + ',' + std::to_string(g.turing[c]) +
                 ',' + std::to_string(g.negative_mode[c]) + '\n';
        }
    return s;
}

inline json raster_header(const GridRaster& g, const ReactionParams& p) {
    json fam = json::array();
    for (std::size_t f = 0; f < g.families.size(); ++f)
        fam.push_back({{"bit", f}, {"family", to_string(g.families[f].family)}, {"l", g.families[f].l}});
    std::size_t members = 0, gap = 0;
    for (int j = 0; j < g.tau.n; ++j)
        for (int i = 0; i < g.R.n; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * g.R.n + i;
            members += g.cells[c] != 0;
            gap += g.cells[c] == 0 && g.negative_mode[c] && g.tau.center(j) < 0.0;
        }
    return {{"p", to_json(p)},
            {"R", {{"lo", g.R.lo}, {"hi", g.R.hi}, {"n", g.R.n}}},
            {"tau", {{"lo", g.tau.lo}, {"hi", g.tau.hi}, {"n", g.tau.n}}},
            {"families", fam},
            {"member_cells", members},
            {"uncovered_negative_mode_cells", gap},
            {"disagreements", g.disagreements}};
}

// ---------------------------------------------------------------------------
// Simulation

inline json to_json(const SimConfig& c) {
    return {{"R", c.R},
            {"tau", c.tau},
            {"k", c.k},
            {"kinetics",
             {{"k1", c.kinetics.k1}, {"k2", c.kinetics.k2}, {"k3", c.kinetics.k3}, {"k4", c.kinetics.k4},
              {"k5", c.kinetics.k5}}},
            {"n_grid", c.n_grid},
            {"dt", c.dt},
            {"t_max", c.t_max},
            {"perturbation_amplitude", c.perturbation_amplitude},
            {"seed", c.seed},
            {"snapshot_stride", c.snapshot_stride}};
}

inline json to_json(const RunReport& r) {
    json log = json::array();
    for (const auto& e : r.log) log.push_back({{"t", e.t}, {"event", e.what}, {"value", e.value}});
    auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    return {{"classification", to_string(r.classification)},
            {"final_time", r.final_time},
            {"seed", r.seed},
            {"dt", r.dt},
            {"dt_halvings", r.dt_halvings},
            {"steps", r.steps},
            {"steady_state", {{"u0", r.steady.u0}, {"v0", r.steady.v0}}},
            {"mass", {{"u0", r.mass_u0}, {"v0", r.mass_v0}, {"u", r.mass_u}, {"v", r.mass_v}}},
            {"mass_drift_rate", finite(r.mass_drift_rate)},
            {"amplitude", finite(r.amplitude)},
            {"last_relative_change", finite(r.last_relative_change)},
            {"floor_activations", r.floor_activations},
            {"log", log}};
}

/// Long-format CSV snapshots (t, x, u, v), accumulated in memory.
class CsvSnapshots {
public:
    explicit CsvSnapshots(std::vector<double> x) : x_(std::move(x)) { buf_ = "t,x,u,v\n"; }

    void operator()(double t, const std::vector<double>& u, const std::vector<double>& v) {
        const std::string ts = num(t);
        for (std::size_t i = 0; i < x_.size(); ++i) buf_ += ts + ',' + num(x_[i]) + ',' + num(u[i]) + ',' + num(v[i]) + '\n';
    }

    const std::string& str() const { return buf_; }

private:
    std::vector<double> x_;
    std::string buf_;
};

/// Binary frames: "T4SIM", uint64 n_grid, doubles R, tau, k, dt, then per
/// frame t, u[n_grid], v[n_grid]. Little-endian throughout.
class BinarySnapshots {
public:
    BinarySnapshots(std::uint64_t n, double R, double tau, double k, double dt) {
        buf_.append("T4SIM", 5);
        put(n);
        for (double x : {R, tau, k, dt}) put(x);
    }

    void operator()(double t, const std::vector<double>& u, const std::vector<double>& v) {
        put(t);
        for (double x : u) put(x);
        for (double x : v) put(x);
    }

    const std::string& str() const { return buf_; }

private:
    template <class T>
    void put(T x) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(bits >> (8 * i) & 0xff);
        buf_.append(b, 8);
    }

    std::string buf_;
};

struct BinaryFrame {
    double t;
    std::vector<double> u, v;
};

struct BinaryFile {
    std::uint64_t n_grid = 0;
    double R = 0, tau = 0, k = 0, dt = 0;
    std::vector<BinaryFrame> frames;
};

inline BinaryFile read_binary_snapshots(std::string_view data) {
    if (data.size() < 5 + 5 * 8 || data.substr(0, 5) != "T4SIM") throw std::runtime_error("not a T4SIM stream");
    std::size_t pos = 5;
    auto get = [&] {
        if (pos + 8 > data.size()) throw std::runtime_error("truncated T4SIM stream");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 8;
        return bits;
    };
    auto getd = [&] { return std::bit_cast<double>(get()); };
    BinaryFile f;
    f.n_grid = get();
    f.R = getd();
    f.tau = getd();
    f.k = getd();
    f.dt = getd();
    while (pos < data.size()) {
        BinaryFrame fr{getd(), {}, {}};
        for (std::uint64_t i = 0; i < f.n_grid; ++i) fr.u.push_back(getd());
        for (std::uint64_t i = 0; i < f.n_grid; ++i) fr.v.push_back(getd());
        f.frames.push_back(std::move(fr));
    }
    return f;
}

}  // namespace t4::io
