// Copyright 2026 The isotns Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "isotns/common.hpp"

namespace isotns {

/// Reorders the axes of a row-major buffer: output axis j is input axis perm[j].
inline std::vector<cplx> permute_axes(std::span<const cplx> in, std::span<const std::size_t> dims,
                                      std::span<const std::size_t> perm) {
    const std::size_t rank = dims.size();
    std::vector<std::size_t> in_strides(rank, 1);
    for (std::size_t k = rank; k-- > 1;) {
        in_strides[k - 1] = in_strides[k] * dims[k];
    }
    std::vector<std::size_t> out_dims(rank), stride_of_out(rank);
    for (std::size_t j = 0; j < rank; ++j) {
        out_dims[j] = dims[perm[j]];
        stride_of_out[j] = in_strides[perm[j]];
    }
    std::vector<cplx> out(in.size());
    std::vector<std::size_t> idx(rank, 0);
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out[flat] = in[src];
        for (std::size_t j = rank; j-- > 0;) {
            if (++idx[j] < out_dims[j]) {
                src += stride_of_out[j];
                break;
            }
            src -= stride_of_out[j] * (out_dims[j] - 1);
            idx[j] = 0;
        }
    }
    return out;
}

/// Complex tensor with named, ordered legs. Entries are row-major over the shape
/// (leftmost leg most significant).
class DenseTensor {
  public:
    DenseTensor() = default;

    DenseTensor(std::vector<std::string> labels, std::vector<std::size_t> shape, std::vector<cplx> data)
        : labels_(std::move(labels)), shape_(std::move(shape)), data_(std::move(data)) {
        require(labels_.size() == shape_.size(), "DenseTensor: one label per leg required");
        for (std::size_t d : shape_) {
            require(d > 0, "DenseTensor: leg dimensions must be positive");
        }
        require(product(shape_) == data_.size(), "DenseTensor: entry count does not match shape");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            for (std::size_t j = i + 1; j < labels_.size(); ++j) {
                require(labels_[i] != labels_[j], "DenseTensor: duplicate leg label '" + labels_[i] + "'");
            }
        }
    }

    static DenseTensor zeros(std::vector<std::string> labels, std::vector<std::size_t> shape) {
        std::vector<cplx> data(product(shape));
        return DenseTensor(std::move(labels), std::move(shape), std::move(data));
    }

    std::size_t rank() const {
        return shape_.size();
    }
    std::size_t size() const {
        return data_.size();
    }
    const std::vector<std::string> &labels() const {
        return labels_;
    }
    const std::vector<std::size_t> &shape() const {
        return shape_;
    }
    const std::vector<cplx> &data() const {
        return data_;
    }
    std::vector<cplx> &data() {
        return data_;
    }

    std::size_t axis(const std::string &label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        require(it != labels_.end(), "DenseTensor: unknown leg label '" + label + "'");
        return static_cast<std::size_t>(it - labels_.begin());
    }

    std::size_t dim(const std::string &label) const {
        return shape_[axis(label)];
    }

    std::size_t offset(std::span<const std::size_t> index) const {
        std::size_t off = 0;
        for (std::size_t k = 0; k < shape_.size(); ++k) {
            off = off * shape_[k] + index[k];
        }
        return off;
    }

    cplx &at(std::initializer_list<std::size_t> index) {
        return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
    }
    const cplx &at(std::initializer_list<std::size_t> index) const {
        return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
    }

    /// Same entries with legs reordered to `order`.
    DenseTensor permuted(const std::vector<std::string> &order) const {
        require(order.size() == labels_.size(), "DenseTensor::permuted: order must name every leg");
        std::vector<std::size_t> perm(order.size());
        std::vector<std::size_t> new_shape(order.size());
        for (std::size_t j = 0; j < order.size(); ++j) {
            perm[j] = axis(order[j]);
            new_shape[j] = shape_[perm[j]];
        }
        std::vector<std::size_t> seen(perm);
        std::sort(seen.begin(), seen.end());
        require(std::adjacent_find(seen.begin(), seen.end()) == seen.end(),
                "DenseTensor::permuted: repeated label");
        return DenseTensor(order, std::move(new_shape), permute_axes(data_, shape_, perm));
    }

    DenseTensor relabeled(const std::string &from, const std::string &to) const {
        DenseTensor out = *this;
        out.labels_[axis(from)] = to;
        return DenseTensor(out.labels_, out.shape_, std::move(out.data_));
    }

    DenseTensor conj() const {
        DenseTensor out = *this;
        for (auto &x : out.data_) {
            x = std::conj(x);
        }
        return out;
    }

    friend DenseTensor operator+(const DenseTensor &a, const DenseTensor &b) {
        require(a.labels_ == b.labels_ && a.shape_ == b.shape_, "DenseTensor: sum needs identical legs");
        DenseTensor out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) {
            out.data_[i] += b.data_[i];
        }
        return out;
    }

    static std::size_t product(const std::vector<std::size_t> &dims) {
        return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    }

  private:
    std::vector<std::string> labels_;
    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

namespace detail {

inline std::vector<std::string> complement(const DenseTensor &t, const std::vector<std::string> &legs) {
    std::vector<std::string> rest;
    for (const auto &l : t.labels()) {
        if (std::find(legs.begin(), legs.end(), l) == legs.end()) {
            rest.push_back(l);
        }
    }
    return rest;
}

inline void require_distinct(const std::vector<std::string> &legs, const char *what) {
    for (std::size_t i = 0; i < legs.size(); ++i) {
        for (std::size_t j = i + 1; j < legs.size(); ++j) {
            require(legs[i] != legs[j], std::string(what) + ": label repeated in pairing list");
        }
    }
}

}  // namespace detail

/// Groups legs into a matrix: rows fuse `row_legs`, columns fuse `col_legs`, both
/// row-major in the listed order.
inline Matrix flatten(const DenseTensor &t, const std::vector<std::string> &row_legs,
                      const std::vector<std::string> &col_legs) {
    require(row_legs.size() + col_legs.size() == t.rank(), "flatten: row and column legs must cover the tensor");
    std::vector<std::string> order = row_legs;
    order.insert(order.end(), col_legs.begin(), col_legs.end());
    DenseTensor p = t.permuted(order);
    std::size_t rows = 1;
    for (const auto &l : row_legs) {
        rows *= t.dim(l);
    }
    const std::size_t cols = t.size() / rows;
    Matrix m(rows, cols);
    std::copy(p.data().begin(), p.data().end(), m.data());
    return m;
}

struct LegSpec {
    std::string label;
    std::size_t dim;
};

/// Inverse of flatten for the given leg order.
inline DenseTensor unflatten(const Matrix &m, const std::vector<LegSpec> &row_legs,
                             const std::vector<LegSpec> &col_legs) {
    std::vector<std::string> labels;
    std::vector<std::size_t> shape;
    std::size_t rows = 1, cols = 1;
    for (const auto &l : row_legs) {
        labels.push_back(l.label);
        shape.push_back(l.dim);
        rows *= l.dim;
    }
    for (const auto &l : col_legs) {
        labels.push_back(l.label);
        shape.push_back(l.dim);
        cols *= l.dim;
    }
    require(static_cast<std::size_t>(m.rows()) == rows && static_cast<std::size_t>(m.cols()) == cols,
            "unflatten: matrix shape does not match legs");
    return DenseTensor(std::move(labels), std::move(shape), std::vector<cplx>(m.data(), m.data() + m.size()));
}

/// Sums over paired legs. The result carries the remaining legs of a, then of b.
inline DenseTensor contract(const DenseTensor &a, const std::vector<std::string> &legs_a, const DenseTensor &b,
                            const std::vector<std::string> &legs_b) {
    require(legs_a.size() == legs_b.size(), "contract: pairing lists differ in length");
    detail::require_distinct(legs_a, "contract");
    detail::require_distinct(legs_b, "contract");
    for (std::size_t k = 0; k < legs_a.size(); ++k) {
        if (a.dim(legs_a[k]) != b.dim(legs_b[k])) {
            throw PreconditionError("contract: dimension mismatch between '" + legs_a[k] + "' and '" + legs_b[k] +
                                    "'");
        }
    }
    const auto free_a = detail::complement(a, legs_a);
    const auto free_b = detail::complement(b, legs_b);
    Matrix ma = flatten(a, free_a, legs_a);
    Matrix mb = flatten(b, legs_b, free_b);
    Matrix prod = ma * mb;
    std::vector<LegSpec> rows, cols;
    for (const auto &l : free_a) {
        rows.push_back({l, a.dim(l)});
    }
    for (const auto &l : free_b) {
        cols.push_back({l, b.dim(l)});
    }
    return unflatten(prod, rows, cols);
}

/// Singular values in descending order (one-sided Jacobi; deterministic).
inline std::vector<double> singular_values(const Matrix &m) {
    require(m.allFinite(), "singular_values: non-finite input");
    if (m.size() == 0) {
        return {};
    }
    Eigen::MatrixXcd cm = m;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cm);
    const auto &s = svd.singularValues();
    std::vector<double> out(s.data(), s.data() + s.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

struct IsometryCheck {
    bool ok = false;
    double deviation = 0.0;
};

/// Max-entry deviation of V†V from the identity.
inline IsometryCheck check_isometry(const Matrix &v, double tol = kDefaultTol) {
    if (v.rows() < v.cols()) {
        throw PreconditionError("check_isometry: fewer rows than columns, cannot be an isometry");
    }
    const Matrix gram = v.adjoint() * v;
    const double dev = max_abs(gram - identity_matrix(static_cast<std::size_t>(v.cols())));
    return {dev <= tol, dev};
}

}  // namespace isotns
