#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace steinbias {

/// Dense n x n real array {a_ij} defining Y = sum_i a_{i, pi(i)}.
///
/// Immutable once built. The metadata flags record which standing
/// assumptions the entries satisfy; the constructors that take raw entries
/// detect them, the centering routines set them.
class ScoreArray {
public:
    /// Builds from row-major entries and detects every flag.
    ScoreArray(std::size_t n, std::vector<double> entries);
    static ScoreArray from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t n() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
    std::span<const double> entries() const noexcept { return entries_; }
    std::span<const double> row(std::size_t i) const noexcept { return {entries_.data() + i * n_, n_}; }
    /// Row-major transpose, for column access through the row kernels.
    std::span<const double> transposed() const noexcept { return transposed_; }

    /// C = max |a_ij|.
    double c_sup() const noexcept { return c_sup_; }
    bool row_centered() const noexcept { return row_centered_; }
    bool symmetric() const noexcept { return symmetric_; }
    bool zero_diagonal() const noexcept { return zero_diagonal_; }
    /// sum_{i,j} a_ij = 0 within the centering tolerance.
    bool globally_centered() const noexcept { return globally_centered_; }

    /// Tolerance used for every centering test: 1e-12 * n * C.
    double centering_tolerance() const noexcept { return 1e-12 * static_cast<double>(n_) * c_sup_; }

    ScoreArray scaled(double factor) const;
    std::vector<std::vector<double>> to_rows() const;

private:
    friend ScoreArray center_for_uniform(std::size_t, std::span<const double>);
    friend ScoreArray center_for_cycle_type(std::size_t, std::span<const double>);

    void refresh();

    std::size_t n_ = 0;
    std::vector<double> entries_;
    std::vector<double> transposed_;
    double c_sup_ = 0.0;
    bool row_centered_ = false;
    bool symmetric_ = false;
    bool zero_diagonal_ = false;
    bool globally_centered_ = false;
};

/// Subtracts each row's mean. Requires n >= 2.
ScoreArray center_for_uniform(std::size_t n, std::span<const double> raw);

/// Symmetrizes, zeroes the diagonal, then subtracts the global off-diagonal
/// mean from every off-diagonal entry so that sum_{i,j} a_ij = 0. The result
/// is symmetric with zero diagonal; row_centered is recorded as false.
/// Requires n >= 4.
ScoreArray center_for_cycle_type(std::size_t n, std::span<const double> raw);

inline double sup_norm(const ScoreArray& a) noexcept { return a.c_sup(); }

/// n rows of n comma-separated decimals.
std::vector<double> read_score_csv(const std::filesystem::path& path, std::size_t& n);

/// Raw (uncentered) array with i.i.d. entries; `law` is "gaussian" or "uniform".
std::vector<double> generate_raw_scores(std::size_t n, const std::string& law, std::uint64_t seed);

}  // namespace steinbias
