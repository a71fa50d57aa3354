#include "levyfp/operator_apply.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace levyfp {

namespace {

// The FFTW planner is not reentrant; plan execution is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Smallest 2^a 3^b 5^c >= n. FFTW's estimated plans for these lengths are
// consistently fast, unlike some estimated power-of-two plans.
std::size_t smooth_length(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t f : {2u, 3u, 5u}) {
            while (r % f == 0) r /= f;
        }
        if (r == 1) return m;
    }
}

}  // namespace

struct ToeplitzMultiplier::Impl {
    std::size_t n = 0;
    std::size_t padded = 0;
    double* real = nullptr;
    fftw_complex* work = nullptr;
    std::vector<std::complex<double>> spectrum;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> col;
    std::vector<double> row;

    Impl(std::span<const double> first_col, std::span<const double> first_row) {
        n = first_col.size();
        padded = smooth_length(std::max<std::size_t>(2 * n - 1, 2));
        const std::size_t half = padded / 2 + 1;
        real = fftw_alloc_real(padded);
        work = fftw_alloc_complex(half);
        if (real == nullptr || work == nullptr) {
            release();
            throw std::bad_alloc();
        }
        {
            std::lock_guard lock(fftw_planner_mutex());
            forward = fftw_plan_dft_r2c_1d(static_cast<int>(padded), real, work, FFTW_ESTIMATE);
            backward = fftw_plan_dft_c2r_1d(static_cast<int>(padded), work, real, FFTW_ESTIMATE);
        }
        spectrum.resize(half);
        set_coefficients(first_col, first_row);
    }

    ~Impl() { release(); }

    void release() {
        {
            std::lock_guard lock(fftw_planner_mutex());
            if (forward != nullptr) fftw_destroy_plan(forward);
            if (backward != nullptr) fftw_destroy_plan(backward);
        }
        forward = backward = nullptr;
        fftw_free(real);
        fftw_free(work);
        real = nullptr;
        work = nullptr;
    }

    void set_coefficients(std::span<const double> first_col, std::span<const double> first_row) {
        col.assign(first_col.begin(), first_col.end());
        row.assign(first_row.begin(), first_row.end());
        std::fill(real, real + padded, 0.0);
        real[0] = first_col[0];
        for (std::size_t k = 1; k < n; ++k) {
            real[k] = first_col[k];
            real[padded - k] = first_row[k];
        }
        fftw_execute(forward);
        const double scale = 1.0 / static_cast<double>(padded);
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
            spectrum[k] = std::complex<double>(work[k][0], work[k][1]) * scale;
        }
    }

    void multiply(std::span<const double> v, std::span<double> out) {
        std::copy(v.begin(), v.end(), real);
        std::fill(real + n, real + padded, 0.0);
        fftw_execute(forward);
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
            const std::complex<double> z = std::complex<double>(work[k][0], work[k][1]) * spectrum[k];
            work[k][0] = z.real();
            work[k][1] = z.imag();
        }
        fftw_execute(backward);
        std::copy(real, real + n, out.begin());
    }
};

namespace {

void check_toeplitz_shape(std::span<const double> first_col, std::span<const double> first_row) {
    if (first_col.size() != first_row.size()) {
        throw std::invalid_argument("Toeplitz: first column and first row differ in length");
    }
    if (first_col.empty()) {
        throw std::invalid_argument("Toeplitz: empty matrix");
    }
    if (first_col[0] != first_row[0]) {
        throw std::invalid_argument("Toeplitz: first_col[0] must equal first_row[0]");
    }
}

}  // namespace

ToeplitzMultiplier::ToeplitzMultiplier() = default;

ToeplitzMultiplier::ToeplitzMultiplier(std::span<const double> first_col, std::span<const double> first_row) {
    reset(first_col, first_row);
}

ToeplitzMultiplier::~ToeplitzMultiplier() = default;
ToeplitzMultiplier::ToeplitzMultiplier(ToeplitzMultiplier&&) noexcept = default;
ToeplitzMultiplier& ToeplitzMultiplier::operator=(ToeplitzMultiplier&&) noexcept = default;

void ToeplitzMultiplier::reset(std::span<const double> first_col, std::span<const double> first_row) {
    check_toeplitz_shape(first_col, first_row);
    if (impl_ && impl_->n == first_col.size()) {
        impl_->set_coefficients(first_col, first_row);
    } else {
        impl_ = std::make_unique<Impl>(first_col, first_row);
    }
    n_ = impl_->n;
    padded_ = impl_->padded;
}

void ToeplitzMultiplier::multiply(std::span<const double> v, std::span<double> out) {
    if (!impl_) {
        throw std::invalid_argument("ToeplitzMultiplier: no matrix bound");
    }
    if (v.size() != n_ || out.size() != n_) {
        throw std::invalid_argument("ToeplitzMultiplier: vector length " + std::to_string(v.size()) +
                                    " does not match matrix size " + std::to_string(n_));
    }
    impl_->multiply(v, out);
}

std::vector<double> toeplitz_matvec(std::span<const double> first_col, std::span<const double> first_row,
                                    std::span<const double> v) {
    ToeplitzMultiplier ws(first_col, first_row);
    std::vector<double> out(v.size());
    ws.multiply(v, out);
    return out;
}

std::vector<double> toeplitz_matvec(std::span<const double> first_col, std::span<const double> first_row,
                                    std::span<const double> v, ToeplitzMultiplier& ws) {
    check_toeplitz_shape(first_col, first_row);
    if (v.size() != first_col.size()) {
        throw std::invalid_argument("toeplitz_matvec: vector length does not match matrix size");
    }
    const bool same = ws.size() == first_col.size() && ws.matches(first_col, first_row);
    if (!same) {
        ws.reset(first_col, first_row);
    }
    std::vector<double> out(v.size());
    ws.multiply(v, out);
    return out;
}

bool ToeplitzMultiplier::matches(std::span<const double> first_col, std::span<const double> first_row) const {
    return impl_ && std::equal(first_col.begin(), first_col.end(), impl_->col.begin(), impl_->col.end()) &&
           std::equal(first_row.begin(), first_row.end(), impl_->row.begin(), impl_->row.end());
}

FastWorkspace::FastWorkspace(const DiscreteOperator& op) { bind(op); }

void FastWorkspace::bind(const DiscreteOperator& op) {
    if (bound_id_ == op.id && toeplitz_.size() == op.size() && op.id != 0) {
        return;
    }
    toeplitz_.reset(op.T.first_col, op.T.first_row);
    bound_id_ = op.id;
}

const char* to_string(ApplyMode mode) noexcept { return mode == ApplyMode::fast ? "fast" : "dense"; }

void toeplitz_matvec_direct(const Toeplitz& t, std::span<const double> v, std::span<double> out) {
    const std::size_t n = t.size();
    if (v.size() != n || out.size() != n) {
        throw std::invalid_argument("toeplitz_matvec_direct: vector length does not match matrix size");
    }
    const double* col = t.first_col.data();
    const double* row = t.first_row.data();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t m = 0; m < i; ++m) {
            acc += col[i - m] * v[m];
        }
        acc += col[0] * v[i];
        for (std::size_t m = i + 1; m < n; ++m) {
            acc += row[m - i] * v[m];
        }
        out[i] = acc;
    }
}

void apply_a(const DiscreteOperator& op, std::span<const double> v, std::span<double> out, FastWorkspace& ws,
             ApplyMode mode) {
    const std::size_t n = op.size();
    if (v.size() != n || out.size() != n) {
        throw std::invalid_argument("apply_a: vector length " + std::to_string(v.size()) +
                                    " does not match operator size " + std::to_string(n));
    }
    if (mode == ApplyMode::fast) {
        if (ws.size() != 0 && ws.size() != n) {
            throw std::invalid_argument("apply_a: workspace size does not match operator");
        }
        ws.bind(op);
        ws.toeplitz().multiply(v, out);
    } else {
        toeplitz_matvec_direct(op.T, v, out);
    }
    op.B.apply_add(v, out);
    op.D.apply_add(v, out);
}

std::vector<double> apply_a(const DiscreteOperator& op, std::span<const double> v, FastWorkspace& ws,
                            ApplyMode mode) {
    std::vector<double> out(op.size());
    apply_a(op, v, out, ws, mode);
    return out;
}

namespace reference {

Eigen::MatrixXd to_dense(const Tridiagonal& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        d(i, i) = m.diag[u];
        if (i > 0) d(i, i - 1) = m.lower[u];
        if (i + 1 < n) d(i, i + 1) = m.upper[u];
    }
    return d;
}

Eigen::MatrixXd to_dense(const Toeplitz& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index m = 0; m < n; ++m) {
            d(i, m) = i >= m ? t.first_col[static_cast<std::size_t>(i - m)] : t.first_row[static_cast<std::size_t>(m - i)];
        }
    }
    return d;
}

Eigen::MatrixXd to_dense(const DiscreteOperator& op) { return to_dense(op.T) + to_dense(op.B) + to_dense(op.D); }

}  // namespace reference

}  // namespace levyfp
