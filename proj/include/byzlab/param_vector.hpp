/*
 * Copyright 2026 The byzlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef BYZLAB_PARAM_VECTOR_HPP_
#define BYZLAB_PARAM_VECTOR_HPP_

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "byzlab/error.hpp"

namespace byzlab {

/// Flattened model parameters or an additive update to them.
///
/// Layout is canonical across the library: layers in order, each layer's
/// weight matrix (n_out x n_in) row-major, then that layer's bias.
class ParamVector {
 public:
  using EigenMap = Eigen::Map<Eigen::VectorXd>;
  using ConstEigenMap = Eigen::Map<const Eigen::VectorXd>;

  ParamVector() = default;
  explicit ParamVector(std::size_t length, double fill = 0.0) : values_(length, fill) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}

  static ParamVector zeros(std::size_t length) { return ParamVector(length); }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  EigenMap vec() { return EigenMap(values_.data(), static_cast<Eigen::Index>(values_.size())); }
  ConstEigenMap vec() const {
    return ConstEigenMap(values_.data(), static_cast<Eigen::Index>(values_.size()));
  }

  ParamVector& operator+=(const ParamVector& other) {
    check_same_length(other, "+=");
    vec() += other.vec();
    return *this;
  }
  ParamVector& operator-=(const ParamVector& other) {
    check_same_length(other, "-=");
    vec() -= other.vec();
    return *this;
  }
  ParamVector& operator*=(double scale) {
    vec() *= scale;
    return *this;
  }
  ParamVector& operator/=(double scale) {
    vec() /= scale;
    return *this;
  }

  /// this += scale * other.
  ParamVector& add_scaled(const ParamVector& other, double scale) {
    check_same_length(other, "add_scaled");
    vec() += scale * other.vec();
    return *this;
  }

  double norm() const { return vec().norm(); }
  double squared_norm() const { return vec().squaredNorm(); }
  double dot(const ParamVector& other) const {
    check_same_length(other, "dot");
    return vec().dot(other.vec());
  }

  bool all_finite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

  void check_same_length(const ParamVector& other, const char* op) const {
    if (other.size() != size()) {
      throw DimensionError(std::string("ParamVector ") + op + ": length " +
                           std::to_string(size()) + " vs " + std::to_string(other.size()));
    }
  }

 private:
  std::vector<double> values_;
};

inline ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
inline ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
inline ParamVector operator*(ParamVector a, double s) { return a *= s; }
inline ParamVector operator*(double s, ParamVector a) { return a *= s; }
inline ParamVector operator/(ParamVector a, double s) { return a /= s; }
inline ParamVector operator-(ParamVector a) { return a *= -1.0; }

/// Euclidean distance ||a - b||_2.
inline double distance(const ParamVector& a, const ParamVector& b) {
  a.check_same_length(b, "distance");
  return (a.vec() - b.vec()).norm();
}

inline double squared_distance(const ParamVector& a, const ParamVector& b) {
  a.check_same_length(b, "squared_distance");
  return (a.vec() - b.vec()).squaredNorm();
}

}  // namespace byzlab

#endif  // BYZLAB_PARAM_VECTOR_HPP_
