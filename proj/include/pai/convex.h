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

#ifndef PAI_CONVEX_H_
#define PAI_CONVEX_H_

#include <Eigen/Core>
#include <vector>

namespace pai {

using Vector = Eigen::VectorXd;

// A feasible set with a cheap Euclidean projection. Projection is supported
// for balls (radial clamp) and boxes (coordinate clamp); halfspace
// intersections can be described but not projected onto.
class ConvexSet {
 public:
  enum class Kind { kBall, kBox, kHalfspaces };

  static ConvexSet Ball(double radius, int dim);            // centered at 0
  static ConvexSet Ball(double radius, Vector center);
  static ConvexSet Box(Vector lower, Vector upper);
  // normals[i] . x <= offsets[i]; kept for description only.
  static ConvexSet Halfspaces(std::vector<Vector> normals, std::vector<double> offsets);

  Vector Project(const Vector& x) const;
  bool Contains(const Vector& x, double tol = 1e-12) const;
  double Distance(const Vector& x) const;  // Euclidean distance to the set

  // Pulls a gradient taken at Project(y) back through the projection
  // (transposed Jacobian). Used by the Lipschitz-extension machinery.
  Vector ChainThroughProjection(const Vector& y, const Vector& grad_at_projection) const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const;
  const Vector& center() const;

 private:
  ConvexSet(Kind kind, int dim);
  Kind kind_;
  int dim_;
  double radius_ = 0.0;
  Vector center_;
  Vector lower_, upper_;
  std::vector<Vector> normals_;
  std::vector<double> offsets_;
};

// Euclidean projection onto the set; errors on unsupported set kinds.
Vector Project(const ConvexSet& set, const Vector& x);

}  // namespace pai

#endif  // PAI_CONVEX_H_
