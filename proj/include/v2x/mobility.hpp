#pragma once

#include <random>
#include <span>
#include <vector>

namespace v2x {

enum class ServiceClass { video_capable, safety_only };

struct Vehicle {
  int id = 0;
  int lane = 0;        // 0-2 rightbound, 3-5 leftbound
  double x_m = 0.0;    // position along the highway, wraps at highway length
  double y_m = 0.0;    // lateral position, derived from lane
  double speed_mps = 0.0;  // signed by lane group
  ServiceClass service_class = ServiceClass::video_capable;
};

struct Rsu {
  int id = 0;
  double x_m = 0.0;
  double y_m = -35.0;  // lateral offset from the first lane
  double tx_power_dbm = 46.0;
  int resource_pool = 50;  // PRBs
};

inline constexpr int kLaneCount = 6;
inline constexpr double kLaneCenterY[kLaneCount] = {2.0, 6.0, 10.0, 14.0, 18.0, 22.0};
inline constexpr double kVehicleSpeedMps = 140.0 / 3.6;
inline constexpr double kInterRsuM = 1732.0;

/// Shortest signed offset from b to a on a ring of the given length.
double ring_delta(double a, double b, double length);

/// 2-D distance with wrap-around along the highway axis.
double ring_distance(double x1, double y1, double x2, double y2, double length);

/// Returns the scenario's inter-vehicle gap interval [lo, hi] in meters.
std::pair<double, double> scenario_gap_interval(int scenario_id);

/// Places vehicles per lane at cumulative uniform gaps drawn from the
/// scenario interval; positions are strictly increasing per lane.
/// A vehicle is video capable with probability video_fraction.
std::vector<Vehicle> spawn_vehicles(int scenario_id, double highway_length_m,
                                    double video_fraction, std::mt19937_64& rng);

/// RSUs along the highway at 1732 m spacing, first at x = 866 m.
std::vector<Rsu> place_rsus(int n_rsu);

/// x <- (x + v*dt) mod L, lateral position unchanged. dt_s must be > 0.
void advance_positions(std::span<Vehicle> vehicles, double dt_s, double highway_length_m);

/// Id of the RSU minimizing 2-D ring distance; ties go to the lowest id.
int nearest_rsu(const Vehicle& v, std::span<const Rsu> rsus, double highway_length_m);

}  // namespace v2x
