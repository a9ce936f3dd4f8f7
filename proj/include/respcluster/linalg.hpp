#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace respcluster {

// Dense row-major matrix of doubles. Sized for corpora of a few hundred documents.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    Matrix transposed() const;
    bool is_symmetric(double tol = 0.0) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Eigenvalues in ascending order; eigenvectors.col(j) belongs to values[j].
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
    int sweeps = 0;
};

// Cyclic Jacobi rotations on a dense symmetric matrix. Throws Error if the
// matrix is not square or not symmetric within 1e-12.
SymmetricEigen symmetric_eigen(const Matrix& m, double tol = 1e-14, int max_sweeps = 100);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
// Scales to unit L2 norm; leaves a zero vector untouched. Returns the original norm.
double normalize(std::span<double> a);

} // namespace respcluster
