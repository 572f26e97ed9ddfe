#include "projlab/complex_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "projlab/errors.hpp"
#include "projlab/kernels.hpp"

namespace projlab {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cxd> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw input_error("matrix entry count does not match rows*cols");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cxd>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw input_error("ragged initializer rows");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](cxd z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

double ComplexMatrix::max_abs_entry() const {
    return kernels::active().max_abs(entries_.data(), entries_.size());
}

cxd ComplexMatrix::trace() const {
    cxd t{0.0, 0.0};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw input_error("matrix shape mismatch in addition");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw input_error("matrix shape mismatch in subtraction");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cxd scalar) {
    kernels::active().scale(scalar, entries_.data(), entries_.size());
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cxd scalar, ComplexMatrix a) { return a *= scalar; }

ComplexMatrix compose(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw input_error("matrix shape mismatch in product");
    ComplexMatrix c(a.rows(), b.cols());
    kernels::active().matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    return compose(a, b);
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = std::conj(a(i, j));
    return r;
}

std::vector<cxd> apply(const ComplexMatrix& a, std::span<const cxd> x) {
    if (a.cols() != x.size()) throw input_error("matrix/vector size mismatch");
    std::vector<cxd> y(a.rows());
    kernels::active().matvec(a.data(), x.data(), y.data(), a.rows(), a.cols());
    return y;
}

} // namespace projlab
