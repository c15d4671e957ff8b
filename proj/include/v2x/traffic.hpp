#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace v2x {

enum class FlowClass { video, safety };

inline constexpr int kVideoBitsPerTti = 1000;
inline constexpr int kSafetyPacketBits = 1280;
inline constexpr int kSafetyPeriodTti = 10;

struct Packet {
  int vehicle_id = 0;
  FlowClass flow_class = FlowClass::safety;
  int size_bits = 0;
  int arrival_tti = 0;
  int bits_remaining = 0;
  int departure_tti = -1;  // set when the last bit is served
};

/// FIFO bit queue with packet boundaries. Service may split a packet across
/// TTIs; a packet departs when its last bit is drained. A queue may carry
/// both traffic classes (a shared bearer without slice isolation), so
/// per-class bit totals are tracked alongside the FIFO.
class PacketQueue {
 public:
  void enqueue(const Packet& p);

  /// Drains up to `bits` FIFO from packet heads; returns packets fully
  /// drained this call with departure_tti set. bits must not exceed
  /// total_bits().
  std::vector<Packet> serve_bits(long long bits, int now_tti);

  /// Same drain arithmetic, but the removed packets are losses, not
  /// departures (departure_tti stays -1).
  std::vector<Packet> drop_bits(long long bits);

  /// Empties the queue without recording departures (ownership handovers).
  long long flush();

  long long total_bits() const { return total_bits_; }
  long long class_bits(FlowClass c) const { return class_bits_[static_cast<int>(c)]; }
  std::size_t packet_count() const { return packets_.size(); }
  bool empty() const { return packets_.empty(); }

 private:
  std::vector<Packet> drain(long long bits, int now_tti, bool departed);

  std::deque<Packet> packets_;
  long long total_bits_ = 0;
  long long class_bits_[2] = {0, 0};
};

/// Deterministic periodic arrivals: video flows emit one 1000-bit packet per
/// TTI; safety flows emit one 1280-bit packet when t mod 10 equals the
/// per-vehicle phase (vehicle_id mod 10).
std::vector<Packet> generate_arrivals(int tti, FlowClass flow_class, int vehicle_id);

/// Enqueues arrivals, then drains served_bits; returns departed packets.
std::vector<Packet> update_queue(PacketQueue& queue, long long served_bits,
                                 const std::vector<Packet>& arrivals, int now_tti);

/// departure - arrival + 1: a packet served in its arrival TTI counts 1 ms.
/// Throws if the packet has not departed.
int packet_latency(const Packet& p);

}  // namespace v2x
