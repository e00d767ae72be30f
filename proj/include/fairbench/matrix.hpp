#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "fairbench/error.hpp"

namespace fairbench {

/// Dense row-major matrix of doubles. Rows are instances, columns features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        Matrix m;
        if (rows.empty()) return m;
        m.cols_ = rows.front().size();
        m.data_.reserve(rows.size() * m.cols_);
        for (const auto& r : rows) {
            if (r.size() != m.cols_) throw Error("matrix rows have unequal lengths");
            m.data_.insert(m.data_.end(), r.begin(), r.end());
        }
        m.rows_ = rows.size();
        return m;
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw Error("appended row has wrong length");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    void set_column(std::size_t c, std::span<const double> values) {
        if (values.size() != rows_) throw Error("column assignment has wrong length");
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
    }

    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            auto src = row(idx[i]);
            std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
    }

    Matrix select_cols(std::span<const std::size_t> idx) const {
        Matrix out(rows_, idx.size());
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = (*this)(r, idx[j]);
        }
        return out;
    }

    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace fairbench
