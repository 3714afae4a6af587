// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_LEVEL_SET_HPP_
#define AGFEM_LEVEL_SET_HPP_

#include <memory>
#include <string>

#include "agfem/geometry.hpp"

namespace agfem {

// Scalar field whose strictly negative set is the physical domain.
class LevelSet {
 public:
  virtual ~LevelSet() = default;
  virtual double value(const Point& x) const = 0;
  // Defaults to central differences.
  virtual Point gradient(const Point& x) const;
  virtual std::string describe() const = 0;
};

using LevelSetPtr = std::shared_ptr<const LevelSet>;

// psi = a . x - c
class HalfPlane final : public LevelSet {
 public:
  HalfPlane(const Point& normal, double offset);
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::string describe() const override;

 private:
  Point a_;
  double c_;
};

// psi = |x - center| - radius; a circle in 2D, a sphere in 3D.
class Sphere final : public LevelSet {
 public:
  Sphere(const Point& center, double radius);
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::string describe() const override;

 private:
  Point center_;
  double radius_;
};

// Popcorn flake: a sphere of radius 0.6 with twelve Gaussian bumps.
class PopcornFlake final : public LevelSet {
 public:
  PopcornFlake();
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::string describe() const override;

 private:
  static constexpr double kR0 = 0.6;
  static constexpr double kSigma = 0.2;
  static constexpr double kAmplitude = 2.0;
  std::array<Point, 12> bumps_{};
};

// psi(x) = s * inner((x - t) / s): moves the inner geometry by t and scales
// it by s > 0 while keeping psi a length.
class Transformed final : public LevelSet {
 public:
  Transformed(LevelSetPtr inner, const Point& translation, double scale);
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::string describe() const override;

 private:
  Point map(const Point& x) const;
  LevelSetPtr inner_;
  Point t_;
  double s_;
};

}  // namespace agfem

#endif  // AGFEM_LEVEL_SET_HPP_
