// Time grid plus named observable columns; the unit of persisted output.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbundle {

struct TimeSeries {
    std::vector<double> grid;
    std::vector<std::pair<std::string, std::vector<double>>> columns;

    std::vector<double>& add_column(const std::string& name) {
        columns.emplace_back(name, std::vector<double>(grid.size(), 0.0));
        return columns.back().second;
    }

    const std::vector<double>& column(const std::string& name) const {
        for (const auto& [n, v] : columns)
            if (n == name) return v;
        throw std::out_of_range("TimeSeries: no column named " + name);
    }

    bool has_column(const std::string& name) const {
        for (const auto& [n, v] : columns)
            if (n == name) return true;
        return false;
    }

    void validate() const {
        for (size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::runtime_error("TimeSeries: grid not strictly increasing");
        for (const auto& [n, v] : columns) {
            if (v.size() != grid.size())
                throw std::runtime_error("TimeSeries: column length mismatch: " + n);
            for (double x : v)
                if (!std::isfinite(x))
                    throw std::runtime_error("TimeSeries: non-finite value in " + n);
        }
    }
};

inline std::vector<double> linspace_grid(double t0, double t1, double dt) {
    std::vector<double> g;
    const int n = static_cast<int>(std::floor((t1 - t0) / dt + 0.5));
    g.reserve(n + 1);
    for (int i = 0; i <= n; ++i) g.push_back(t0 + i * dt);
    if (g.back() < t1 - 1e-9) g.push_back(t1);
    return g;
}

}  // namespace nbundle
