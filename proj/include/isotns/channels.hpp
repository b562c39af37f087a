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
#include <vector>

#include "isotns/site.hpp"

namespace isotns {

/// Completely positive map in Kraus form. `trace_scale` is 1 for channels; a
/// sub-channel such as the residual part of a depolarizing split has
/// sum K^dagger K = trace_scale * identity.
class QuantumChannel {
  public:
    QuantumChannel() = default;

    QuantumChannel(std::size_t dim_in, std::size_t dim_out, std::vector<Matrix> kraus, double trace_scale = 1.0,
                   double tol = 1e-9)
        : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)), trace_scale_(trace_scale) {
        require(dim_in_ > 0 && dim_out_ > 0, "QuantumChannel: dimensions must be positive");
        require(!kraus_.empty(), "QuantumChannel: empty Kraus list");
        for (const auto &k : kraus_) {
            require(static_cast<std::size_t>(k.rows()) == dim_out_ && static_cast<std::size_t>(k.cols()) == dim_in_,
                    "QuantumChannel: Kraus operator has the wrong shape");
        }
        const double dev = tp_deviation();
        if (dev > tol) {
            throw PreconditionError("QuantumChannel: Kraus set is not trace preserving (deviation " +
                                    std::to_string(dev) + ")");
        }
    }

    std::size_t dim_in() const {
        return dim_in_;
    }
    std::size_t dim_out() const {
        return dim_out_;
    }
    const std::vector<Matrix> &kraus() const {
        return kraus_;
    }
    double trace_scale() const {
        return trace_scale_;
    }

    /// Max entry of sum K^dagger K - trace_scale * identity.
    double tp_deviation() const {
        Matrix s = Matrix::Zero(static_cast<Eigen::Index>(dim_in_), static_cast<Eigen::Index>(dim_in_));
        for (const auto &k : kraus_) {
            s.noalias() += k.adjoint() * k;
        }
        return max_abs(s - trace_scale_ * identity_matrix(dim_in_));
    }

    /// Same map rescaled to be trace preserving.
    QuantumChannel normalized() const {
        require(trace_scale_ > 1e-14, "QuantumChannel::normalized: zero trace scale");
        const double f = 1.0 / std::sqrt(trace_scale_);
        std::vector<Matrix> ks;
        ks.reserve(kraus_.size());
        for (const auto &k : kraus_) {
            ks.push_back(k * f);
        }
        return QuantumChannel(dim_in_, dim_out_, std::move(ks));
    }

  private:
    std::size_t dim_in_ = 1;
    std::size_t dim_out_ = 1;
    std::vector<Matrix> kraus_;
    double trace_scale_ = 1.0;
};

inline Matrix apply(const QuantumChannel &c, const Matrix &rho) {
    require(static_cast<std::size_t>(rho.rows()) == c.dim_in() && static_cast<std::size_t>(rho.cols()) == c.dim_in(),
            "apply: state shape does not match channel input");
    require(max_abs(rho - rho.adjoint()) <= kDefaultTol, "apply: state is not Hermitian");
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(c.dim_out()), static_cast<Eigen::Index>(c.dim_out()));
    for (const auto &k : c.kraus()) {
        out.noalias() += k * rho * k.adjoint();
    }
    return out;
}

/// Choi matrix sum_ij |i><j| (x) E(|i><j|), input factor most significant.
inline Matrix choi(const QuantumChannel &c) {
    const auto din = static_cast<Eigen::Index>(c.dim_in());
    const auto dout = static_cast<Eigen::Index>(c.dim_out());
    Matrix j = Matrix::Zero(din * dout, din * dout);
    Vector v(din * dout);
    for (const auto &k : c.kraus()) {
        for (Eigen::Index i = 0; i < din; ++i) {
            for (Eigen::Index o = 0; o < dout; ++o) {
                v(i * dout + o) = k(o, i);
            }
        }
        j.noalias() += v * v.adjoint();
    }
    return j;
}

inline double choi_distance(const QuantumChannel &a, const QuantumChannel &b) {
    require(a.dim_in() == b.dim_in() && a.dim_out() == b.dim_out(), "choi_distance: dimension mismatch");
    return max_abs(choi(a) - choi(b));
}

/// Trace-and-replace map from dim_in to the maximally mixed state on dim_out.
inline QuantumChannel depolarizing_channel_between(std::size_t dim_in, std::size_t dim_out) {
    std::vector<Matrix> ks;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim_out));
    for (std::size_t a = 0; a < dim_out; ++a) {
        for (std::size_t b = 0; b < dim_in; ++b) {
            Matrix k = Matrix::Zero(static_cast<Eigen::Index>(dim_out), static_cast<Eigen::Index>(dim_in));
            k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = amp;
            ks.push_back(std::move(k));
        }
    }
    return QuantumChannel(dim_in, dim_out, std::move(ks));
}

/// rho -> Tr(rho) * identity / dim.
inline QuantumChannel depolarizing_channel(std::size_t dim) {
    require(dim >= 1, "depolarizing_channel: dim must be >= 1");
    return depolarizing_channel_between(dim, dim);
}

inline QuantumChannel unitary_channel(const Matrix &u) {
    require(u.rows() == u.cols(), "unitary_channel: matrix must be square");
    return QuantumChannel(static_cast<std::size_t>(u.cols()), static_cast<std::size_t>(u.rows()), {u});
}

/// Convex combination sum_k w_k E_k over channels with equal dimensions.
inline QuantumChannel mixture(const std::vector<QuantumChannel> &parts, const std::vector<double> &weights) {
    require(!parts.empty() && parts.size() == weights.size(), "mixture: one weight per channel");
    std::vector<Matrix> ks;
    double total = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        require(weights[i] >= 0.0, "mixture: negative weight");
        require(parts[i].dim_in() == parts[0].dim_in() && parts[i].dim_out() == parts[0].dim_out(),
                "mixture: dimension mismatch");
        total += weights[i] * parts[i].trace_scale();
        for (const auto &k : parts[i].kraus()) {
            ks.push_back(std::sqrt(weights[i]) * k);
        }
    }
    return QuantumChannel(parts[0].dim_in(), parts[0].dim_out(), std::move(ks), total);
}

/// second o first.
inline QuantumChannel compose(const QuantumChannel &first, const QuantumChannel &second) {
    require(first.dim_out() == second.dim_in(), "compose: dimension mismatch");
    std::vector<Matrix> ks;
    for (const auto &b : second.kraus()) {
        for (const auto &a : first.kraus()) {
            ks.push_back(b * a);
        }
    }
    return QuantumChannel(first.dim_in(), second.dim_out(), std::move(ks),
                          first.trace_scale() * second.trace_scale());
}

/// Minimal Kraus set recovered from a Choi matrix (eigenvectors with positive weight).
inline QuantumChannel channel_from_choi(const Matrix &j, std::size_t dim_in, std::size_t dim_out,
                                        double trace_scale = 1.0) {
    require(static_cast<std::size_t>(j.rows()) == dim_in * dim_out, "channel_from_choi: shape mismatch");
    Eigen::MatrixXcd jm = j;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(jm);
    std::vector<Matrix> ks;
    for (Eigen::Index e = es.eigenvalues().size(); e-- > 0;) {
        const double lam = es.eigenvalues()(e);
        if (lam <= 1e-14) {
            continue;
        }
        Matrix k(static_cast<Eigen::Index>(dim_out), static_cast<Eigen::Index>(dim_in));
        for (std::size_t i = 0; i < dim_in; ++i) {
            for (std::size_t o = 0; o < dim_out; ++o) {
                k(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) =
                    std::sqrt(lam) * es.eigenvectors()(static_cast<Eigen::Index>(i * dim_out + o), e);
            }
        }
        ks.push_back(std::move(k));
    }
    if (ks.empty()) {
        ks.push_back(Matrix::Zero(static_cast<Eigen::Index>(dim_out), static_cast<Eigen::Index>(dim_in)));
    }
    return QuantumChannel(dim_in, dim_out, std::move(ks), trace_scale);
}

/// Virtual channel rho -> tr_P(V rho V^dagger); its Kraus operators are the slices V^i.
inline QuantumChannel channel_from_isometry(const SiteTensor &v) {
    auto check = check_isometry(v.isometry(), kDefaultTol);
    require(check.ok, "channel_from_isometry: site tensor is not an isometry");
    return QuantumChannel(v.dims().in(), v.dims().out(), v.kraus(), 1.0, kDefaultTol);
}

struct InjectivityReport {
    double delta = 0.0;
    double eta = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::size_t bond_dim = 1;
    std::size_t phys_dim = 1;
    std::size_t dim_in = 1;
    std::size_t dim_out = 1;
    std::vector<double> singular_values;

    /// Largest depolarizing rate the split admits, delta^2 times the output dimension.
    double max_eta() const {
        return eta;
    }

    /// Upper bound on sigma_max implied by the Frobenius norm of an isometry.
    double sigma_max_upper_bound() const {
        const double n = static_cast<double>(dim_in * dim_out);
        return std::sqrt(std::max(0.0, static_cast<double>(dim_in) - delta * delta * (n - 1.0)));
    }
    double sigma_max_lower_bound() const {
        return 1.0 / std::sqrt(static_cast<double>(dim_out));
    }
};

/// Smallest singular value of P flattened as d x (D_l D_d D_r D_u).
inline InjectivityReport injectivity_delta(const SiteTensor &p) {
    const auto &dims = p.dims();
    InjectivityReport r;
    r.phys_dim = dims.phys;
    r.dim_in = dims.in();
    r.dim_out = dims.out();
    r.bond_dim = std::max({dims.left, dims.down, dims.right, dims.up});
    r.singular_values = singular_values(p.peps());
    r.sigma_max = r.singular_values.empty() ? 0.0 : r.singular_values.front();
    const std::size_t virt = dims.in() * dims.out();
    if (dims.phys < virt || r.singular_values.empty()) {
        r.sigma_min = 0.0;
    } else {
        r.sigma_min = r.singular_values.back();
        if (r.sigma_min < 1e-12 * std::max(1.0, r.sigma_max)) {
            r.sigma_min = 0.0;
        }
    }
    r.delta = r.sigma_min;
    r.eta = r.delta * r.delta * static_cast<double>(dims.out());
    return r;
}

/// Split of a site channel into eta * depolarizing + (1 - eta) * E1. `e1` carries
/// the (1 - eta) weight in its Kraus operators; `e1_normalized` is rescaled to be
/// trace preserving.
struct DepolarizingSplit {
    double eta = 0.0;
    QuantumChannel e1;
    QuantumChannel e1_normalized;
    QuantumChannel original;

    /// Max Choi entry error of (1 - eta) E1 + eta depol against the original channel.
    double reconstruction_error() const {
        Matrix rec = (1.0 - eta) * choi(e1_normalized) +
                     eta * choi(depolarizing_channel_between(original.dim_in(), original.dim_out()));
        return max_abs(rec - choi(original));
    }
};

/// E1 Kraus operators K_i = sqrt(lambda_i) <i|U V from 1 - eta M = U^dagger Lambda U,
/// M = (P^+)^dagger P^+ / D_out with P^+ the Moore-Penrose pseudoinverse.
inline DepolarizingSplit depolarizing_split(const SiteTensor &p, double eta) {
    require(eta >= 0.0 && eta <= 1.0, "depolarizing_split: eta must lie in [0, 1]");
    if (eta == 0.0) {
        const QuantumChannel c = channel_from_isometry(p);
        return {0.0, c, c, c};
    }
    const InjectivityReport rep = injectivity_delta(p);
    require(rep.delta > 0.0, "depolarizing_split: site tensor is not injective");
    require(eta <= rep.eta + 1e-12, "depolarizing_split: eta exceeds delta^2 * D^2 = " + std::to_string(rep.eta));
    const auto &dims = p.dims();
    const auto d = static_cast<Eigen::Index>(dims.phys);

    Eigen::MatrixXcd pm = p.peps();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pm, Eigen::ComputeThinU);
    const auto &s = svd.singularValues();
    const Eigen::MatrixXcd &u = svd.matrixU();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        m.noalias() += (1.0 / (s(k) * s(k))) * u.col(k) * u.col(k).adjoint();
    }
    m /= static_cast<double>(dims.out());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(d, d) - eta * m;
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return es.eigenvalues()(x) > es.eigenvalues()(y); });

    std::vector<Matrix> ks;
    for (Eigen::Index e : order) {
        double lam = es.eigenvalues()(e);
        if (lam < -1e-10) {
            throw PreconditionError("depolarizing_split: 1 - eta M is not positive semidefinite");
        }
        lam = std::max(lam, 0.0);
        if (lam == 0.0) {
            continue;
        }
        Matrix k = Matrix::Zero(static_cast<Eigen::Index>(dims.out()), static_cast<Eigen::Index>(dims.in()));
        for (Eigen::Index i = 0; i < d; ++i) {
            const cplx c = std::conj(es.eigenvectors()(i, e));
            if (c != cplx{}) {
                k.noalias() += c * p.kraus(static_cast<std::size_t>(i));
            }
        }
        ks.push_back(std::sqrt(lam) * k);
    }
    if (ks.empty()) {
        ks.push_back(Matrix::Zero(static_cast<Eigen::Index>(dims.out()), static_cast<Eigen::Index>(dims.in())));
    }
    QuantumChannel e1(dims.in(), dims.out(), std::move(ks), 1.0 - eta, 1e-9);
    QuantumChannel e1n = 1.0 - eta > 1e-9 ? e1.normalized() : depolarizing_channel_between(dims.in(), dims.out());
    return {eta, std::move(e1), std::move(e1n), channel_from_isometry(p)};
}

}  // namespace isotns
