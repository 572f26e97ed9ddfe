#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace projlab {

using cxd = std::complex<double>;

/// Dense row-major complex matrix. Every operator in the library is one of
/// these; values are immutable in spirit (operations return new matrices) and
/// safe to share across threads once built.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, cxd{0.0, 0.0}) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cxd> entries);

    /// Build from nested initializer rows, e.g. {{1, 0}, {-1, 0}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<cxd>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zero(std::size_t rows, std::size_t cols) {
        return ComplexMatrix(rows, cols);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cxd& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const cxd& operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }

    cxd* data() { return entries_.data(); }
    const cxd* data() const { return entries_.data(); }
    std::span<const cxd> row(std::size_t i) const {
        return {entries_.data() + i * cols_, cols_};
    }
    std::span<const cxd> flat() const { return entries_; }

    bool all_finite() const;
    double max_abs_entry() const;
    cxd trace() const;

    bool operator==(const ComplexMatrix&) const = default;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cxd scalar);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cxd> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cxd scalar, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Matrix product AB (the composition of operators, applied right to left).
ComplexMatrix compose(const ComplexMatrix& a, const ComplexMatrix& b);

/// Conjugate transpose. In l^p the adjoint acts on the dual space l^q; pair
/// it with SpaceDescriptor::dual().
ComplexMatrix adjoint(const ComplexMatrix& a);

std::vector<cxd> apply(const ComplexMatrix& a, std::span<const cxd> x);

} // namespace projlab
