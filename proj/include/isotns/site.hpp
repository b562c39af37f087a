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

#include <optional>
#include <string>
#include <vector>

#include "isotns/tensor.hpp"

namespace isotns {

enum class SiteRole { gate, swap, identity, stinespring, w_perturbed, postselect, custom };

inline const char *role_name(SiteRole r) {
    switch (r) {
        case SiteRole::gate:
            return "gate";
        case SiteRole::swap:
            return "swap";
        case SiteRole::identity:
            return "identity";
        case SiteRole::stinespring:
            return "stinespring";
        case SiteRole::w_perturbed:
            return "w_perturbed";
        case SiteRole::postselect:
            return "postselect";
        case SiteRole::custom:
            return "custom";
    }
    return "custom";
}

inline SiteRole role_from_name(const std::string &s) {
    for (SiteRole r : {SiteRole::gate, SiteRole::swap, SiteRole::identity, SiteRole::stinespring,
                       SiteRole::w_perturbed, SiteRole::postselect, SiteRole::custom}) {
        if (s == role_name(r)) {
            return r;
        }
    }
    throw PreconditionError("unknown site role '" + s + "'");
}

/// Leg dimensions of a site: physical, left-in, down-in, right-out, up-out.
struct SiteDims {
    std::size_t phys = 1;
    std::size_t left = 1;
    std::size_t down = 1;
    std::size_t right = 1;
    std::size_t up = 1;

    std::size_t in() const {
        return left * down;
    }
    std::size_t out() const {
        return right * up;
    }
    friend bool operator==(const SiteDims &, const SiteDims &) = default;
};

/// A lattice site's isometry V. Legs are always (p, l, d, r, u); V maps the
/// incoming ancillas (l, d) to physical p and outgoing ancillas (r, u).
class SiteTensor {
  public:
    SiteTensor() = default;

    SiteTensor(DenseTensor t, SiteRole role, double tol = kDefaultTol) : tensor_(std::move(t)), role_(role) {
        require(tensor_.labels() == std::vector<std::string>{"p", "l", "d", "r", "u"},
                "SiteTensor: legs must be (p, l, d, r, u)");
        const auto &s = tensor_.shape();
        dims_ = {s[0], s[1], s[2], s[3], s[4]};
        iso_ = flatten(tensor_, {"p", "r", "u"}, {"l", "d"});
        auto check = check_isometry(iso_, tol);
        if (!check.ok) {
            throw PreconditionError("SiteTensor: not an isometry (deviation " + std::to_string(check.deviation) + ")");
        }
    }

    /// From the (p r u) x (l d) matrix form.
    static SiteTensor from_isometry(const Matrix &v, SiteDims dims, SiteRole role, double tol = kDefaultTol) {
        require(static_cast<std::size_t>(v.rows()) == dims.phys * dims.out() &&
                    static_cast<std::size_t>(v.cols()) == dims.in(),
                "SiteTensor::from_isometry: matrix shape does not match dims");
        DenseTensor t = unflatten(v, {{"p", dims.phys}, {"r", dims.right}, {"u", dims.up}},
                                  {{"l", dims.left}, {"d", dims.down}});
        return SiteTensor(t.permuted({"p", "l", "d", "r", "u"}), role, tol);
    }

    const DenseTensor &tensor() const {
        return tensor_;
    }
    SiteRole role() const {
        return role_;
    }
    const SiteDims &dims() const {
        return dims_;
    }

    /// V as a (d * out) x in matrix, rows ordered (p, r, u).
    const Matrix &isometry() const {
        return iso_;
    }

    /// Slice V^i: the out x in block for physical index i.
    Matrix kraus(std::size_t i) const {
        const auto out = static_cast<Eigen::Index>(dims_.out());
        return iso_.middleRows(static_cast<Eigen::Index>(i) * out, out);
    }

    std::vector<Matrix> kraus() const {
        std::vector<Matrix> ks;
        ks.reserve(dims_.phys);
        for (std::size_t i = 0; i < dims_.phys; ++i) {
            ks.push_back(kraus(i));
        }
        return ks;
    }

    /// PEPS view P: physical index against all four virtual legs (l, d, r, u).
    Matrix peps() const {
        return flatten(tensor_, {"p"}, {"l", "d", "r", "u"});
    }

    /// Strength of the W perturbation for w_perturbed sites.
    std::optional<double> w_delta;

  private:
    DenseTensor tensor_;
    SiteRole role_ = SiteRole::custom;
    SiteDims dims_;
    Matrix iso_;
};

}  // namespace isotns
