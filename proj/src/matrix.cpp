#include "condmtl/matrix.hpp"

#include <cmath>
#include <string>

#include "condmtl/error.hpp"

namespace condmtl {

namespace {

[[noreturn]] void throw_shape(const char* op, const Matrix& a, const Matrix& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + " and " + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols));
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> values) {
    Matrix m(values.size(), values.size() == 0 ? 0 : values.begin()->size());
    std::size_t r = 0;
    for (const auto& row : values) {
        if (row.size() != m.cols) {
            throw ShapeError("from_rows: ragged row " + std::to_string(r));
        }
        std::size_t c = 0;
        for (double v : row) {
            m.at(r, c++) = v;
        }
        ++r;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::column(std::span<const double> values) {
    Matrix m(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        m.at(i, 0) = values[i];
    }
    return m;
}

bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw_shape("matmul", a, b);
    }
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols; ++j) {
                out.at(i, j) += aik * b.at(k, j);
            }
        }
    }
    return out;
}

Matrix matmul_transpose_a(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) {
        throw_shape("matmul_transpose_a", a, b);
    }
    Matrix out(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = a.at(k, i);
            if (aki == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols; ++j) {
                out.at(i, j) += aki * b.at(k, j);
            }
        }
    }
    return out;
}

Matrix matmul_transpose_b(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) {
        throw_shape("matmul_transpose_b", a, b);
    }
    Matrix out(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.rows; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) {
                acc += a.at(i, k) * b.at(j, k);
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            out.at(j, i) = m.at(i, j);
        }
    }
    return out;
}

void add_row_vector(Matrix& m, std::span<const double> v) {
    if (v.size() != m.cols) {
        throw ShapeError("add_row_vector: vector length " + std::to_string(v.size()) +
                         " vs cols " + std::to_string(m.cols));
    }
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            m.at(i, j) += v[j];
        }
    }
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> sums(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            sums[j] += m.at(i, j);
        }
    }
    return sums;
}

bool all_finite(const Matrix& m) {
    return all_finite(std::span<const double>(m.data));
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (double x : m.data) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

}  // namespace condmtl
