#include "darc/num/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace darc::num {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void require_matrix(const Tensor& t, const char* what) {
    if (t.rank() != 2) {
        throw std::invalid_argument(std::string(what) + ": expected a matrix, got shape " +
                                    shape_string(t.shape()));
    }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (product(shape_) != data_.size()) {
        throw std::invalid_argument("Tensor: shape " + shape_string(shape_) + " does not match " +
                                    std::to_string(data_.size()) + " values");
    }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
    return Tensor({rows, cols}, fill);
}

std::size_t Tensor::rows() const {
    if (shape_.empty()) return 0;
    return shape_.size() == 1 ? 1 : shape_[0];
}

std::size_t Tensor::cols() const {
    if (shape_.empty()) return 0;
    return shape_.back();
}

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_matrix(a, "matmul");
    require_matrix(b, "matmul");
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions differ " + shape_string(a.shape()) +
                                    " x " + shape_string(b.shape()));
    }
    const std::size_t n = a.rows(), m = b.cols(), inner = a.cols();
    Tensor out = Tensor::matrix(n, m);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* po = out.data().data();
    for (std::size_t r = 0; r < n; ++r) {
        double* orow = po + r * m;
        for (std::size_t k = 0; k < inner; ++k) {
            const double av = pa[r * inner + k];
            if (av == 0.0) continue;
            const double* brow = pb + k * m;
            for (std::size_t c = 0; c < m; ++c) orow[c] += av * brow[c];
        }
    }
    return out;
}

Tensor matmul_transposed_b(const Tensor& a, const Tensor& b) {
    require_matrix(a, "matmul_transposed_b");
    require_matrix(b, "matmul_transposed_b");
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("matmul_transposed_b: inner dimensions differ " +
                                    shape_string(a.shape()) + " x " + shape_string(b.shape()) + "^T");
    }
    const std::size_t n = a.rows(), m = b.rows(), inner = a.cols();
    Tensor out = Tensor::matrix(n, m);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    for (std::size_t r = 0; r < n; ++r) {
        const double* arow = pa + r * inner;
        for (std::size_t c = 0; c < m; ++c) {
            const double* brow = pb + c * inner;
            double acc = 0.0;
            for (std::size_t k = 0; k < inner; ++k) acc += arow[k] * brow[k];
            out(r, c) = acc;
        }
    }
    return out;
}

Tensor matmul_transposed_a(const Tensor& a, const Tensor& b) {
    require_matrix(a, "matmul_transposed_a");
    require_matrix(b, "matmul_transposed_a");
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("matmul_transposed_a: inner dimensions differ " +
                                    shape_string(a.shape()) + "^T x " + shape_string(b.shape()));
    }
    const std::size_t n = a.cols(), m = b.cols(), inner = a.rows();
    Tensor out = Tensor::matrix(n, m);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* po = out.data().data();
    for (std::size_t k = 0; k < inner; ++k) {
        const double* arow = pa + k * n;
        const double* brow = pb + k * m;
        for (std::size_t r = 0; r < n; ++r) {
            const double av = arow[r];
            if (av == 0.0) continue;
            double* orow = po + r * m;
            for (std::size_t c = 0; c < m; ++c) orow[c] += av * brow[c];
        }
    }
    return out;
}

Tensor hconcat(const Tensor& left, const Tensor& right) {
    require_matrix(left, "hconcat");
    require_matrix(right, "hconcat");
    if (left.rows() != right.rows()) {
        throw std::invalid_argument("hconcat: row counts differ " + shape_string(left.shape()) +
                                    " vs " + shape_string(right.shape()));
    }
    Tensor out = Tensor::matrix(left.rows(), left.cols() + right.cols());
    for (std::size_t r = 0; r < left.rows(); ++r) {
        auto dst = out.row(r);
        std::copy(left.row(r).begin(), left.row(r).end(), dst.begin());
        std::copy(right.row(r).begin(), right.row(r).end(), dst.begin() + left.cols());
    }
    return out;
}

Tensor column_slice(const Tensor& m, std::size_t begin, std::size_t count) {
    require_matrix(m, "column_slice");
    if (begin + count > m.cols()) throw std::out_of_range("column_slice: range exceeds columns");
    Tensor out = Tensor::matrix(m.rows(), count);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto src = m.row(r);
        std::copy(src.begin() + begin, src.begin() + begin + count, out.row(r).begin());
    }
    return out;
}

std::size_t ParamSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.value.size();
    return n;
}

bool ParamSet::same_layout(const ParamSet& other) const {
    if (entries.size() != other.entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].value.shape() != other.entries[i].value.shape()) return false;
    }
    return true;
}

ParamSet zeros_like(const ParamSet& p) {
    ParamSet out;
    out.entries.reserve(p.size());
    for (const auto& e : p.entries) out.entries.push_back({e.name, Tensor(e.value.shape(), 0.0)});
    return out;
}

void soft_update_inplace(ParamSet& target, const ParamSet& online, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("soft_update: tau must lie in [0, 1], got " + std::to_string(tau));
    }
    if (!target.same_layout(online)) throw std::invalid_argument("soft_update: parameter layouts differ");
    for (std::size_t i = 0; i < target.size(); ++i) {
        auto dst = target[i].data();
        auto src = online[i].data();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = tau * src[k] + (1.0 - tau) * dst[k];
    }
}

ParamSet soft_update(const ParamSet& target, const ParamSet& online, double tau) {
    ParamSet out = target;
    soft_update_inplace(out, online, tau);
    return out;
}

}  // namespace darc::num
