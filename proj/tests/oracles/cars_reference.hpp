#pragma once

// Stand-alone integration of the five-car platoon, written directly from the
// equations: the lead car y5 is driven, car k follows car k+1 toward a 10 m
// gap (spring 0.08, damper 0.4). Classic RK4; inputs at the half step are the
// average of the neighbouring samples.

#include <array>
#include <vector>

namespace oracle {

struct CarsState {
  std::array<double, 5> y;
  std::array<double, 5> v;
};

inline CarsState cars_rate(const CarsState& s, double thr, double brk) {
  CarsState r{};
  for (int k = 0; k < 5; ++k) r.y[k] = s.v[k];
  r.v[4] = 5 * thr - 6 * brk - 0.1 * s.v[4];
  for (int k = 0; k < 4; ++k) {
    const double gap = s.y[k + 1] - s.y[k];
    r.v[k] = 0.08 * (gap - 10) + 0.4 * (s.v[k + 1] - s.v[k]);
  }
  return r;
}

inline CarsState cars_step(const CarsState& s, const CarsState& k, double a) {
  CarsState out{};
  for (int i = 0; i < 5; ++i) {
    out.y[i] = s.y[i] + a * k.y[i];
    out.v[i] = s.v[i] + a * k.v[i];
  }
  return out;
}

/// Positions y1..y5 at every sample.
inline std::vector<std::array<double, 5>> simulate_cars(const std::vector<double>& thr,
                                                        const std::vector<double>& brk, double h) {
  CarsState s{{0, 10, 20, 30, 40}, {0, 0, 0, 0, 0}};
  std::vector<std::array<double, 5>> out{s.y};
  for (std::size_t i = 0; i + 1 < thr.size(); ++i) {
    const double tm = (thr[i] + thr[i + 1]) / 2, bm = (brk[i] + brk[i + 1]) / 2;
    const auto k1 = cars_rate(s, thr[i], brk[i]);
    const auto k2 = cars_rate(cars_step(s, k1, h / 2), tm, bm);
    const auto k3 = cars_rate(cars_step(s, k2, h / 2), tm, bm);
    const auto k4 = cars_rate(cars_step(s, k3, h), thr[i + 1], brk[i + 1]);
    for (int j = 0; j < 5; ++j) {
      s.y[j] += h / 6 * (k1.y[j] + 2 * k2.y[j] + 2 * k3.y[j] + k4.y[j]);
      s.v[j] += h / 6 * (k1.v[j] + 2 * k2.v[j] + 2 * k3.v[j] + k4.v[j]);
    }
    out.push_back(s.y);
  }
  return out;
}

}  // namespace oracle
