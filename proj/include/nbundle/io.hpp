// Persisted outputs: CSV series, metadata sidecars, run manifests, SVG plots
// and line-delimited trajectory records.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbundle/format.hpp"
#include "nbundle/observables.hpp"
#include "nbundle/timeseries.hpp"
#include "nbundle/trajectories.hpp"

namespace nbundle {

using json = nlohmann::json;

// FNV-1a 64-bit content digest, hex-encoded.
inline std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("digest: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return content_digest(ss.str());
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

// CSV: header row, fixed 12-significant-digit values, newline-terminated.
inline std::string timeseries_csv(const TimeSeries& ts, const std::string& time_name = "t") {
    std::string out = time_name;
    for (const auto& [name, col] : ts.columns) out += "," + name;
    out += "\n";
    for (size_t i = 0; i < ts.grid.size(); ++i) {
        out += format_double(ts.grid[i]);
        for (const auto& [name, col] : ts.columns) out += "," + format_double(col[i]);
        out += "\n";
    }
    return out;
}

inline std::string wigner_csv(const WignerField& f) {
    std::string out = "re_alpha,im_alpha,W\n";
    for (size_t i = 0; i < f.im_axis.size(); ++i)
        for (size_t j = 0; j < f.re_axis.size(); ++j)
            out += format_double(f.re_axis[j]) + "," + format_double(f.im_axis[i]) + "," +
                   format_double(f.values(i, j)) + "\n";
    return out;
}

inline std::string snapshot_csv(const DensitySnapshot& s) {
    std::string out = "row,col,magnitude\n";
    for (long i = 0; i < s.magnitudes.rows(); ++i)
        for (long j = 0; j < s.magnitudes.cols(); ++j)
            out += s.labels[i] + "," + s.labels[j] + "," +
                   format_double(s.magnitudes(i, j)) + "\n";
    return out;
}

// One trajectory record per line: seed, jumps, sampled observables.
inline std::string trajectory_record_line(const TrajectoryRecord& rec) {
    json j;
    j["seed"] = rec.seed;
    json jumps = json::array();
    for (const auto& jp : rec.jumps) jumps.push_back({{"t", jp.time}, {"ch", jp.channel}});
    j["jumps"] = jumps;
    j["grid"] = rec.observables.grid;
    json cols = json::object();
    for (const auto& [name, col] : rec.observables.columns) cols[name] = col;
    j["observables"] = cols;
    return j.dump();
}

inline TrajectoryRecord parse_trajectory_record_line(const std::string& line) {
    const json j = json::parse(line);
    TrajectoryRecord rec;
    rec.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jp : j.at("jumps"))
        rec.jumps.push_back({jp.at("t").get<double>(), jp.at("ch").get<int>()});
    rec.observables.grid = j.at("grid").get<std::vector<double>>();
    for (const auto& [name, col] : j.at("observables").items())
        rec.observables.columns.emplace_back(name, col.get<std::vector<double>>());
    return rec;
}

// Sidecar metadata written next to each CSV.
inline json metadata_sidecar(const std::string& config_snapshot, std::uint64_t seed,
                             const std::string& description) {
    json j;
    j["config"] = config_snapshot;
    j["seed"] = seed;
    j["description"] = description;
    j["wigner_convention"] = "(2/pi) displaced parity; integral over d^2 alpha = 1";
    return j;
}

struct RunManifest {
    std::string config_snapshot;
    std::string code_version = "nbundle 1.0.0";
    std::uint64_t master_seed = 0;
    double wall_time_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> outputs;  // (file, digest)

    void add_output(const std::filesystem::path& path) {
        outputs.emplace_back(path.filename().string(), file_digest(path));
    }

    json to_json() const {
        json j;
        j["config"] = config_snapshot;
        j["code_version"] = code_version;
        j["master_seed"] = master_seed;
        j["wall_time_seconds"] = wall_time_seconds;
        json files = json::array();
        for (const auto& [f, d] : outputs) files.push_back({{"file", f}, {"digest", d}});
        j["outputs"] = files;
        return j;
    }
};

// Minimal SVG line plot: one polyline per column, axes with tick labels.
inline std::string svg_plot(const TimeSeries& ts, const std::vector<std::string>& cols,
                            const std::string& title, double x_scale = 1.0) {
    static const std::vector<std::string> palette = {
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    const double W = 720, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (double t : ts.grid) {
        xmin = std::min(xmin, t * x_scale);
        xmax = std::max(xmax, t * x_scale);
    }
    for (const auto& name : cols)
        for (double v : ts.column(name)) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    auto X = [&](double x) { return ml + (x * x_scale - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    format_double(W, 6) + "\" height=\"" + format_double(H, 6) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + format_double(W / 2, 6) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";
    // axes
    s += "<line x1=\"" + format_double(ml, 6) + "\" y1=\"" + format_double(H - mb, 6) +
         "\" x2=\"" + format_double(W - mr, 6) + "\" y2=\"" + format_double(H - mb, 6) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + format_double(ml, 6) + "\" y1=\"" + format_double(mt, 6) +
         "\" x2=\"" + format_double(ml, 6) + "\" y2=\"" + format_double(H - mb, 6) +
         "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xmin + k * (xmax - xmin) / 5;
        const double yv = ymin + k * (ymax - ymin) / 5;
        s += "<text x=\"" + format_double(ml + k * (W - ml - mr) / 5, 6) + "\" y=\"" +
             format_double(H - mb + 18, 6) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
             format_double(xv, 4) + "</text>\n";
        s += "<text x=\"" + format_double(ml - 8, 6) + "\" y=\"" +
             format_double(Y(yv) + 4, 6) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
             format_double(yv, 4) + "</text>\n";
    }
    for (size_t c = 0; c < cols.size(); ++c) {
        const auto& col = ts.column(cols[c]);
        std::string pts;
        for (size_t i = 0; i < ts.grid.size(); ++i)
            pts += format_double(X(ts.grid[i]), 7) + "," +
                   format_double(Y(col[i]), 7) + " ";
        s += "<polyline fill=\"none\" stroke=\"" + palette[c % palette.size()] +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        s += "<text x=\"" + format_double(W - mr - 10, 6) + "\" y=\"" +
             format_double(mt + 16 * (c + 1), 6) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
             palette[c % palette.size()] + "\">" + cols[c] + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace nbundle
