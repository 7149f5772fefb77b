#include "lcarena/curves.hpp"

#include <algorithm>
#include <cmath>

namespace lcarena {

std::string to_string(Round r) { return r == Round::R1 ? "R1" : "R2"; }

Round round_from_string(const std::string& s) {
  if (s == "R1") return Round::R1;
  if (s == "R2") return Round::R2;
  throw ValidationError("unknown round '" + s + "' (expected \"R1\" or \"R2\")");
}

double TimeCurve::value_at(double t) const {
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](double v, const CurvePoint& p) { return v < p.t; });
  if (it == points.begin()) return 0.0;
  return std::prev(it)->s;
}

void TimeCurve::validate(const std::string& context) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.t > 0) || !std::isfinite(p.t)) {
      throw ValidationError(context + ": time must be > 0 at index " +
                            std::to_string(i));
    }
    if (i > 0 && !(points[i - 1].t < p.t)) {
      throw ValidationError(context + ": times not strictly increasing at index " +
                            std::to_string(i));
    }
    if (!(p.s >= 0.0 && p.s <= 1.0)) {
      throw ValidationError(context + ": score outside [0,1] at index " +
                            std::to_string(i));
    }
  }
}

bool is_on_p_grid(double p) {
  const double scaled = p * 10.0;
  const double nearest = std::round(scaled);
  return nearest >= 1.0 && nearest <= 10.0 && std::abs(scaled - nearest) <= 1e-9;
}

int p_grid_index(double p) {
  if (!is_on_p_grid(p)) {
    throw ValidationError("fraction " + std::to_string(p) +
                          " is not on the grid {0.1, ..., 1.0}");
  }
  return static_cast<int>(std::round(p * 10.0));
}

double p_from_index(int index) { return static_cast<double>(index) / 10.0; }

const SizeAnchor* SizeCurve::find(double p) const {
  if (!is_on_p_grid(p)) return nullptr;
  const int idx = p_grid_index(p);
  for (const auto& a : anchors) {
    if (p_grid_index(a.p) == idx) return &a;
  }
  return nullptr;
}

void SizeCurve::validate(const std::string& context) const {
  int prev_idx = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& a = anchors[i];
    if (!is_on_p_grid(a.p)) {
      throw ValidationError(context + ": off-grid fraction at index " +
                            std::to_string(i));
    }
    const int idx = p_grid_index(a.p);
    if (idx <= prev_idx) {
      throw ValidationError(context + ": fractions not strictly increasing at index " +
                            std::to_string(i));
    }
    prev_idx = idx;
    if (!(a.cost > 0) || !std::isfinite(a.cost)) {
      throw ValidationError(context + ": cost must be > 0 at index " +
                            std::to_string(i));
    }
    for (double s : {a.train, a.valid, a.test}) {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw ValidationError(context + ": score outside [0,1] at index " +
                              std::to_string(i));
      }
    }
  }
}

double AgentCurve::value_at(double t) const {
  auto it = std::upper_bound(steps.begin(), steps.end(), t,
                             [](double v, const CurveStep& s) { return v < s.wallclock; });
  if (it == steps.begin()) return 0.0;
  return std::prev(it)->s;
}

namespace {

void check_curve(const AgentCurve& curve) {
  for (std::size_t i = 0; i < curve.steps.size(); ++i) {
    const auto& st = curve.steps[i];
    if (i > 0 && st.wallclock < curve.steps[i - 1].wallclock) {
      throw ValidationError("agent curve: wallclock decreases at step " +
                            std::to_string(i));
    }
    if (st.wallclock < 0 || st.wallclock > curve.horizon) {
      throw ValidationError("agent curve: wallclock outside [0, horizon] at step " +
                            std::to_string(i));
    }
  }
}

}  // namespace

double alc(const AgentCurve& curve, const AlcConfig& cfg) {
  if (!(curve.horizon > 0)) {
    throw ValidationError("alc: horizon must be > 0");
  }
  if (cfg.mode == AlcMode::Log && !(cfg.t0 > 0)) {
    throw ValidationError("alc: t0 must be > 0 in log mode");
  }
  check_curve(curve);
  if (curve.steps.empty()) return 0.0;

  const std::size_t n = curve.steps.size();
  double area = 0.0;
  if (cfg.mode == AlcMode::Linear) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t0 = curve.steps[i].wallclock;
      const double t1 = i + 1 < n ? curve.steps[i + 1].wallclock : curve.horizon;
      if (t1 > t0) area += curve.steps[i].s * (t1 - t0);
    }
    return area / curve.horizon;
  }
  // Log mode: integrate against normalized time log(1+t/t0)/log(1+T/t0).
  const double denom = std::log1p(curve.horizon / cfg.t0);
  const auto warp = [&](double t) { return std::log1p(t / cfg.t0) / denom; };
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = curve.steps[i].wallclock;
    const double t1 = i + 1 < n ? curve.steps[i + 1].wallclock : curve.horizon;
    if (t1 > t0) area += curve.steps[i].s * (warp(t1) - warp(t0));
  }
  return area;
}

}  // namespace lcarena
