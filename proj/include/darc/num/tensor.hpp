#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace darc::num {

/// Dense row-major tensor of doubles. Most of the library only uses the
/// 2-D case ([rows, cols]); vectors are stored as [n] or [1, n].
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    std::size_t rank() const { return shape_.size(); }

    // 2-D accessors; a rank-1 tensor is treated as a single row.
    std::size_t rows() const;
    std::size_t cols() const;

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }

    bool all_finite() const;
    void fill(double v);

    bool operator==(const Tensor&) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

// out[r, c] = sum_k a[r, k] * b[k, c]
Tensor matmul(const Tensor& a, const Tensor& b);
// out[r, c] = sum_k a[r, k] * b[c, k]
Tensor matmul_transposed_b(const Tensor& a, const Tensor& b);
// out[r, c] = sum_k a[k, r] * b[k, c]
Tensor matmul_transposed_a(const Tensor& a, const Tensor& b);

/// Column-wise concatenation of two matrices with equal row counts.
Tensor hconcat(const Tensor& left, const Tensor& right);
/// Columns [begin, begin + count) of a matrix.
Tensor column_slice(const Tensor& m, std::size_t begin, std::size_t count);

struct NamedTensor {
    std::string name;
    Tensor value;

    bool operator==(const NamedTensor&) const = default;
};

/// Ordered parameters of one network: W0, b0, W1, b1, ...
/// Gradients and optimizer moments reuse the same layout.
struct ParamSet {
    std::vector<NamedTensor> entries;

    std::size_t size() const { return entries.size(); }
    Tensor& operator[](std::size_t i) { return entries[i].value; }
    const Tensor& operator[](std::size_t i) const { return entries[i].value; }

    std::size_t scalar_count() const;
    bool same_layout(const ParamSet& other) const;

    bool operator==(const ParamSet&) const = default;
};

ParamSet zeros_like(const ParamSet& p);

/// Polyak tracking: returns tau * online + (1 - tau) * target elementwise.
/// Throws std::invalid_argument if tau is outside [0, 1] or layouts differ.
ParamSet soft_update(const ParamSet& target, const ParamSet& online, double tau);
void soft_update_inplace(ParamSet& target, const ParamSet& online, double tau);

}  // namespace darc::num
