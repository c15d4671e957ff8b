#include "v2x/traffic.hpp"

#include <cassert>
#include <stdexcept>

namespace v2x {

void PacketQueue::enqueue(const Packet& p) {
  assert(p.bits_remaining == p.size_bits && p.size_bits > 0);
  packets_.push_back(p);
  total_bits_ += p.bits_remaining;
  class_bits_[static_cast<int>(p.flow_class)] += p.bits_remaining;
}

std::vector<Packet> PacketQueue::drain(long long bits, int now_tti, bool departed) {
  assert(bits <= total_bits_);
  std::vector<Packet> done;
  while (bits > 0 && !packets_.empty()) {
    Packet& head = packets_.front();
    long long* cls = &class_bits_[static_cast<int>(head.flow_class)];
    if (head.bits_remaining <= bits) {
      bits -= head.bits_remaining;
      total_bits_ -= head.bits_remaining;
      *cls -= head.bits_remaining;
      head.bits_remaining = 0;
      if (departed) head.departure_tti = now_tti;
      done.push_back(head);
      packets_.pop_front();
    } else {
      head.bits_remaining -= static_cast<int>(bits);
      total_bits_ -= bits;
      *cls -= bits;
      bits = 0;
    }
  }
  return done;
}

std::vector<Packet> PacketQueue::serve_bits(long long bits, int now_tti) {
  return drain(bits, now_tti, true);
}

std::vector<Packet> PacketQueue::drop_bits(long long bits) {
  return drain(bits, -1, false);
}

long long PacketQueue::flush() {
  long long bits = total_bits_;
  packets_.clear();
  total_bits_ = 0;
  class_bits_[0] = 0;
  class_bits_[1] = 0;
  return bits;
}

std::vector<Packet> generate_arrivals(int tti, FlowClass flow_class, int vehicle_id) {
  std::vector<Packet> out;
  if (flow_class == FlowClass::video) {
    out.push_back({vehicle_id, flow_class, kVideoBitsPerTti, tti, kVideoBitsPerTti, -1});
  } else {
    int phase = vehicle_id % kSafetyPeriodTti;
    if (tti % kSafetyPeriodTti == phase)
      out.push_back({vehicle_id, flow_class, kSafetyPacketBits, tti, kSafetyPacketBits, -1});
  }
  return out;
}

std::vector<Packet> update_queue(PacketQueue& queue, long long served_bits,
                                 const std::vector<Packet>& arrivals, int now_tti) {
  for (const auto& p : arrivals) queue.enqueue(p);
  assert(served_bits <= queue.total_bits());
  return queue.serve_bits(served_bits, now_tti);
}

int packet_latency(const Packet& p) {
  if (p.departure_tti < 0)
    throw std::invalid_argument("packet_latency: packet has not departed");
  return p.departure_tti - p.arrival_tti + 1;
}

}  // namespace v2x
