// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/level_set.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "agfem/errors.hpp"

namespace agfem {

Point LevelSet::gradient(const Point& x) const {
  constexpr double eps = 1e-7;
  Point g{0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a) {
    Point xp = x;
    Point xm = x;
    xp[a] += eps;
    xm[a] -= eps;
    g[a] = (value(xp) - value(xm)) / (2.0 * eps);
  }
  return g;
}

HalfPlane::HalfPlane(const Point& normal, double offset)
    : a_(normal), c_(offset) {
  if (norm(normal) == 0.0) {
    throw ContractViolation("half-plane normal must be nonzero");
  }
}

double HalfPlane::value(const Point& x) const { return dot(a_, x) - c_; }

Point HalfPlane::gradient(const Point&) const { return a_; }

std::string HalfPlane::describe() const {
  std::ostringstream s;
  s << "half-plane(a=" << a_[0] << ":" << a_[1] << ":" << a_[2] << ",c=" << c_
    << ")";
  return s.str();
}

Sphere::Sphere(const Point& center, double radius)
    : center_(center), radius_(radius) {
  if (!(radius > 0.0)) throw ContractViolation("radius must be positive");
}

double Sphere::value(const Point& x) const {
  return norm(sub(x, center_)) - radius_;
}

Point Sphere::gradient(const Point& x) const {
  const Point d = sub(x, center_);
  const double r = norm(d);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  return scale(1.0 / r, d);
}

std::string Sphere::describe() const {
  std::ostringstream s;
  s << "sphere(c=" << center_[0] << ":" << center_[1] << ":" << center_[2]
    << ",r=" << radius_ << ")";
  return s.str();
}

PopcornFlake::PopcornFlake() {
  const double pi = std::numbers::pi;
  const double f = kR0 / std::sqrt(5.0);
  for (int k = 0; k < 5; ++k) {
    const double t = 2.0 * k * pi / 5.0;
    bumps_[k] = {f * 2.0 * std::cos(t), f * 2.0 * std::sin(t), f};
  }
  for (int k = 5; k < 10; ++k) {
    const double t = (2.0 * (k - 5) - 1.0) * pi / 5.0;
    bumps_[k] = {f * 2.0 * std::cos(t), f * 2.0 * std::sin(t), -f};
  }
  bumps_[10] = {0.0, 0.0, kR0};
  bumps_[11] = {0.0, 0.0, -kR0};
}

double PopcornFlake::value(const Point& x) const {
  double psi = norm(x) - kR0;
  for (const Point& b : bumps_) {
    psi -= kAmplitude * std::exp(-distance_squared(x, b) / (kSigma * kSigma));
  }
  return psi;
}

Point PopcornFlake::gradient(const Point& x) const {
  const double r = norm(x);
  Point g = r > 0.0 ? scale(1.0 / r, x) : Point{0.0, 0.0, 0.0};
  const double s2 = kSigma * kSigma;
  for (const Point& b : bumps_) {
    const double e = kAmplitude * std::exp(-distance_squared(x, b) / s2);
    g = add(g, scale(2.0 * e / s2, sub(x, b)));
  }
  return g;
}

std::string PopcornFlake::describe() const { return "popcorn"; }

Transformed::Transformed(LevelSetPtr inner, const Point& translation,
                         double scale)
    : inner_(std::move(inner)), t_(translation), s_(scale) {
  if (!inner_) throw ContractViolation("transformed level set needs an inner");
  if (!(scale > 0.0)) throw ContractViolation("scale must be positive");
}

Point Transformed::map(const Point& x) const {
  return scale(1.0 / s_, sub(x, t_));
}

double Transformed::value(const Point& x) const {
  return s_ * inner_->value(map(x));
}

Point Transformed::gradient(const Point& x) const {
  return inner_->gradient(map(x));
}

std::string Transformed::describe() const {
  std::ostringstream s;
  s << "transformed(" << inner_->describe() << ",t=" << t_[0] << ":" << t_[1]
    << ":" << t_[2] << ",s=" << s_ << ")";
  return s.str();
}

}  // namespace agfem
