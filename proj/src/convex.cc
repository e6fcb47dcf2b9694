// Copyright 2026 The pai Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pai/convex.h"

#include <cmath>
#include <stdexcept>

namespace pai {

ConvexSet::ConvexSet(Kind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("ConvexSet: dim must be >= 1");
}

ConvexSet ConvexSet::Ball(double radius, int dim) {
  return Ball(radius, Vector::Zero(dim));
}

ConvexSet ConvexSet::Ball(double radius, Vector center) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ConvexSet::Ball: radius must be > 0");
  }
  ConvexSet set(Kind::kBall, static_cast<int>(center.size()));
  set.radius_ = radius;
  set.center_ = std::move(center);
  return set;
}

ConvexSet ConvexSet::Box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw std::invalid_argument("ConvexSet::Box: bound length mismatch");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("ConvexSet::Box: requires lower <= upper");
    }
  }
  ConvexSet set(Kind::kBox, static_cast<int>(lower.size()));
  set.lower_ = std::move(lower);
  set.upper_ = std::move(upper);
  return set;
}

ConvexSet ConvexSet::Halfspaces(std::vector<Vector> normals, std::vector<double> offsets) {
  if (normals.empty() || normals.size() != offsets.size()) {
    throw std::invalid_argument("ConvexSet::Halfspaces: need matching nonempty lists");
  }
  ConvexSet set(Kind::kHalfspaces, static_cast<int>(normals[0].size()));
  set.normals_ = std::move(normals);
  set.offsets_ = std::move(offsets);
  return set;
}

double ConvexSet::radius() const {
  if (kind_ != Kind::kBall) throw std::logic_error("ConvexSet::radius: not a ball");
  return radius_;
}

const Vector& ConvexSet::center() const {
  if (kind_ != Kind::kBall) throw std::logic_error("ConvexSet::center: not a ball");
  return center_;
}

Vector ConvexSet::Project(const Vector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("ConvexSet::Project: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("ConvexSet::Project: point must be finite");
  switch (kind_) {
    case Kind::kBall: {
      const Vector offset = x - center_;
      const double norm = offset.norm();
      if (norm <= radius_) return x;
      return center_ + offset * (radius_ / norm);
    }
    case Kind::kBox:
      return x.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::kHalfspaces:
      throw std::invalid_argument(
          "ConvexSet::Project: projection onto halfspace intersections is unsupported");
  }
  throw std::logic_error("ConvexSet::Project: unknown kind");
}

bool ConvexSet::Contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  switch (kind_) {
    case Kind::kBall:
      return (x - center_).norm() <= radius_ * (1.0 + tol) + tol;
    case Kind::kBox:
      return ((x.array() >= lower_.array() - tol) && (x.array() <= upper_.array() + tol)).all();
    case Kind::kHalfspaces: {
      for (size_t i = 0; i < normals_.size(); ++i) {
        if (normals_[i].dot(x) > offsets_[i] + tol) return false;
      }
      return true;
    }
  }
  return false;
}

double ConvexSet::Distance(const Vector& x) const { return (x - Project(x)).norm(); }

Vector ConvexSet::ChainThroughProjection(const Vector& y, const Vector& g) const {
  switch (kind_) {
    case Kind::kBall: {
      const Vector offset = y - center_;
      const double norm = offset.norm();
      if (norm <= radius_) return g;
      // d/dy [R * yhat]: scales by R/|y| and removes the radial component.
      const Vector unit = offset / norm;
      return (radius_ / norm) * (g - unit * unit.dot(g));
    }
    case Kind::kBox: {
      Vector out = g;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] < lower_[i] || y[i] > upper_[i]) out[i] = 0.0;
      }
      return out;
    }
    case Kind::kHalfspaces:
      throw std::invalid_argument("ConvexSet::ChainThroughProjection: unsupported set kind");
  }
  throw std::logic_error("ConvexSet::ChainThroughProjection: unknown kind");
}

Vector Project(const ConvexSet& set, const Vector& x) { return set.Project(x); }

}  // namespace pai
