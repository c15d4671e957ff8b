#include "v2x/mobility.hpp"

#include <cmath>
#include <stdexcept>

namespace v2x {

double ring_delta(double a, double b, double length) {
  double d = std::fmod(a - b, length);
  if (d > length / 2.0) d -= length;
  if (d < -length / 2.0) d += length;
  return d;
}

double ring_distance(double x1, double y1, double x2, double y2, double length) {
  double dx = ring_delta(x1, x2, length);
  double dy = y1 - y2;
  return std::sqrt(dx * dx + dy * dy);
}

std::pair<double, double> scenario_gap_interval(int scenario_id) {
  switch (scenario_id) {
    case 1: return {1.0, 100.0};
    case 2: return {100.0, 200.0};
    case 3: return {200.0, 300.0};
    default: throw std::invalid_argument("scenario_id must be 1, 2 or 3");
  }
}

std::vector<Vehicle> spawn_vehicles(int scenario_id, double highway_length_m,
                                    double video_fraction, std::mt19937_64& rng) {
  auto [lo, hi] = scenario_gap_interval(scenario_id);
  std::uniform_real_distribution<double> gap(lo, hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vehicle> out;
  int next_id = 0;
  for (int lane = 0; lane < kLaneCount; ++lane) {
    double sign = lane < 3 ? 1.0 : -1.0;
    double x = 0.0;
    while (true) {
      x += gap(rng);
      if (x >= highway_length_m) break;
      Vehicle v;
      v.id = next_id++;
      v.lane = lane;
      v.x_m = x;
      v.y_m = kLaneCenterY[lane];
      v.speed_mps = sign * kVehicleSpeedMps;
      v.service_class = (video_fraction >= 1.0 || unit(rng) < video_fraction)
                            ? ServiceClass::video_capable
                            : ServiceClass::safety_only;
      out.push_back(v);
    }
  }
  return out;
}

std::vector<Rsu> place_rsus(int n_rsu) {
  std::vector<Rsu> out(n_rsu);
  for (int i = 0; i < n_rsu; ++i) {
    out[i].id = i;
    out[i].x_m = kInterRsuM / 2.0 + kInterRsuM * i;
  }
  return out;
}

void advance_positions(std::span<Vehicle> vehicles, double dt_s, double highway_length_m) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be > 0");
  for (auto& v : vehicles) {
    double x = std::fmod(v.x_m + v.speed_mps * dt_s, highway_length_m);
    if (x < 0.0) x += highway_length_m;
    v.x_m = x;
  }
}

int nearest_rsu(const Vehicle& v, std::span<const Rsu> rsus, double highway_length_m) {
  if (rsus.empty()) throw std::invalid_argument("rsus must be non-empty");
  int best = rsus[0].id;
  double best_d = ring_distance(v.x_m, v.y_m, rsus[0].x_m, rsus[0].y_m, highway_length_m);
  for (size_t i = 1; i < rsus.size(); ++i) {
    double d = ring_distance(v.x_m, v.y_m, rsus[i].x_m, rsus[i].y_m, highway_length_m);
    if (d < best_d || (d == best_d && rsus[i].id < best)) {
      best_d = d;
      best = rsus[i].id;
    }
  }
  return best;
}

}  // namespace v2x
