#include "steinbias/score_array.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "steinbias/errors.hpp"
#include "steinbias/rng.hpp"

namespace steinbias {

ScoreArray::ScoreArray(std::size_t n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    if (n_ == 0) throw DimensionError("score array: n must be positive");
    if (entries_.size() != n_ * n_) throw DimensionError("score array: expected n*n entries");
    for (double v : entries_) {
        if (!std::isfinite(v)) throw ValidationError("score array: non-finite entry");
    }
    refresh();
    const double tol = centering_tolerance();
    row_centered_ = true;
    for (std::size_t i = 0; i < n_ && row_centered_; ++i) {
        double s = 0.0;
        for (double v : row(i)) s += v;
        row_centered_ = std::abs(s) <= tol;
    }
}

ScoreArray ScoreArray::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& r : rows) {
        if (r.size() != n) throw DimensionError("score array: rows must all have length n");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return ScoreArray(n, std::move(flat));
}

void ScoreArray::refresh() {
    c_sup_ = 0.0;
    for (double v : entries_) c_sup_ = std::max(c_sup_, std::abs(v));
    transposed_.assign(n_ * n_, 0.0);
    symmetric_ = true;
    zero_diagonal_ = true;
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = entries_[i * n_ + j];
            transposed_[j * n_ + i] = v;
            if (v != entries_[j * n_ + i]) symmetric_ = false;
            total += v;
        }
        if (entries_[i * n_ + i] != 0.0) zero_diagonal_ = false;
    }
    globally_centered_ = std::abs(total) <= centering_tolerance() * static_cast<double>(n_);
}

ScoreArray ScoreArray::scaled(double factor) const {
    std::vector<double> e(entries_);
    for (double& v : e) v *= factor;
    ScoreArray out(n_, std::move(e));
    // Scaling preserves the centering assumptions exactly up to rounding.
    out.row_centered_ = row_centered_;
    return out;
}

std::vector<std::vector<double>> ScoreArray::to_rows() const {
    std::vector<std::vector<double>> rows(n_);
    for (std::size_t i = 0; i < n_; ++i) rows[i].assign(row(i).begin(), row(i).end());
    return rows;
}

ScoreArray center_for_uniform(std::size_t n, std::span<const double> raw) {
    if (n < 2) throw DimensionError("center_for_uniform: n must be at least 2");
    if (raw.size() != n * n) throw DimensionError("center_for_uniform: expected n*n entries");
    std::vector<double> e(raw.begin(), raw.end());
    for (std::size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += e[i * n + j];
        mean /= static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) e[i * n + j] -= mean;
    }
    ScoreArray out(n, std::move(e));
    out.row_centered_ = true;
    return out;
}

ScoreArray center_for_cycle_type(std::size_t n, std::span<const double> raw) {
    if (n < 4) throw DimensionError("center_for_cycle_type: n must be at least 4");
    if (raw.size() != n * n) throw DimensionError("center_for_cycle_type: expected n*n entries");
    std::vector<double> e(n * n, 0.0);
    double off_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = 0.5 * (raw[i * n + j] + raw[j * n + i]);
            e[i * n + j] = s;
            e[j * n + i] = s;
            off_sum += 2.0 * s;
        }
    }
    const double mean = off_sum / static_cast<double>(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) e[i * n + j] -= mean;
        }
    }
    ScoreArray out(n, std::move(e));
    out.row_centered_ = false;
    out.globally_centered_ = true;
    return out;
}

std::vector<double> read_score_csv(const std::filesystem::path& path, std::size_t& n) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open score CSV: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                r.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ConfigError("score CSV " + path.string() + ": bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(r));
    }
    n = rows.size();
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != n) throw DimensionError("score CSV " + path.string() + ": not square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
}

std::vector<double> generate_raw_scores(std::size_t n, const std::string& law, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> e(n * n);
    if (law == "gaussian") {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : e) v = normal(rng);
    } else if (law == "uniform") {
        for (double& v : e) v = rng.uniform();
    } else {
        throw ConfigError("unknown score generator law '" + law + "'");
    }
    return e;
}

}  // namespace steinbias
