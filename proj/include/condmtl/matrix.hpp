#ifndef CONDMTL_MATRIX_HPP
#define CONDMTL_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace condmtl {

/// Dense row-major matrix of 64-bit floats; the engine's only tensor type.
struct Matrix {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> values);
    static Matrix identity(std::size_t n);
    static Matrix column(std::span<const double> values);

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
    std::size_t size() const { return data.size(); }
};

bool operator==(const Matrix& a, const Matrix& b);

/// a(n×k) · b(k×m)
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ(k×n) · b(k×m), without materializing the transpose
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);
/// a(n×k) · bᵀ(m×k)
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

/// m[r] += v for every row r.
void add_row_vector(Matrix& m, std::span<const double> v);

/// Sum of each column, length m.cols.
std::vector<double> column_sums(const Matrix& m);

bool all_finite(const Matrix& m);
bool all_finite(std::span<const double> v);

double frobenius_norm(const Matrix& m);

}  // namespace condmtl

#endif  // CONDMTL_MATRIX_HPP
