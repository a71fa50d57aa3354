#pragma once

#include "levyfp/discretization.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace levyfp {

/// O(n log n) Toeplitz matrix-vector product by embedding the matrix in a
/// circulant of 5-smooth length >= 2n - 1 and diagonalizing it with real FFTs.
///
/// Owns its transform plans and scratch buffers; not safe to share between
/// threads, but distinct instances may be used concurrently.
class ToeplitzMultiplier {
public:
    ToeplitzMultiplier();
    /// Throws std::invalid_argument if the lengths differ or col[0] != row[0].
    ToeplitzMultiplier(std::span<const double> first_col, std::span<const double> first_row);
    ~ToeplitzMultiplier();

    ToeplitzMultiplier(ToeplitzMultiplier&&) noexcept;
    ToeplitzMultiplier& operator=(ToeplitzMultiplier&&) noexcept;
    ToeplitzMultiplier(const ToeplitzMultiplier&) = delete;
    ToeplitzMultiplier& operator=(const ToeplitzMultiplier&) = delete;

    /// Recomputes the circulant spectrum for a new matrix.
    void reset(std::span<const double> first_col, std::span<const double> first_row);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    /// Length of the circulant embedding.
    [[nodiscard]] std::size_t padded_size() const noexcept { return padded_; }

    /// out = T v. Throws std::invalid_argument on length mismatch.
    void multiply(std::span<const double> v, std::span<double> out);

    /// True if bound to exactly this first column and first row.
    [[nodiscard]] bool matches(std::span<const double> first_col, std::span<const double> first_row) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t n_ = 0;
    std::size_t padded_ = 0;
};

/// Convenience wrapper around ToeplitzMultiplier for one-off products.
[[nodiscard]] std::vector<double> toeplitz_matvec(std::span<const double> first_col,
                                                  std::span<const double> first_row,
                                                  std::span<const double> v);

/// Same product through a caller-owned multiplier, which is (re)bound to the
/// given matrix only when its size or coefficients differ.
[[nodiscard]] std::vector<double> toeplitz_matvec(std::span<const double> first_col,
                                                  std::span<const double> first_row,
                                                  std::span<const double> v, ToeplitzMultiplier& ws);

/// Per-caller scratch for applying a DiscreteOperator. Caches the circulant
/// spectrum of the operator it was last bound to (keyed on operator id).
class FastWorkspace {
public:
    FastWorkspace() = default;
    explicit FastWorkspace(const DiscreteOperator& op);

    /// Rebinds if op differs from the operator the spectrum was built for.
    void bind(const DiscreteOperator& op);

    [[nodiscard]] std::size_t size() const noexcept { return toeplitz_.size(); }
    [[nodiscard]] std::uint64_t bound_id() const noexcept { return bound_id_; }

    ToeplitzMultiplier& toeplitz() noexcept { return toeplitz_; }

private:
    ToeplitzMultiplier toeplitz_;
    std::uint64_t bound_id_ = 0;
};

enum class ApplyMode { fast, dense };

[[nodiscard]] const char* to_string(ApplyMode mode) noexcept;

/// out = A v with A = B + T_S + D_S. The dense mode sums the Toeplitz part
/// directly in O(n^2); the fast mode uses the circulant embedding.
/// Throws std::invalid_argument if v, out or an already bound workspace
/// differ in size from the operator. A workspace bound to a different
/// operator of the same size is rebound.
void apply_a(const DiscreteOperator& op, std::span<const double> v, std::span<double> out, FastWorkspace& ws,
             ApplyMode mode = ApplyMode::fast);

[[nodiscard]] std::vector<double> apply_a(const DiscreteOperator& op, std::span<const double> v, FastWorkspace& ws,
                                          ApplyMode mode = ApplyMode::fast);

/// Direct O(n^2) Toeplitz product, the reference for the fast path.
void toeplitz_matvec_direct(const Toeplitz& t, std::span<const double> v, std::span<double> out);

/// Dense matrices of the operator pieces. Reference and dense-solver use only.
namespace reference {
[[nodiscard]] Eigen::MatrixXd to_dense(const Tridiagonal& m);
[[nodiscard]] Eigen::MatrixXd to_dense(const Toeplitz& t);
[[nodiscard]] Eigen::MatrixXd to_dense(const DiscreteOperator& op);
}  // namespace reference

}  // namespace levyfp
