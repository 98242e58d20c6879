#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crossdet/network.hpp"

namespace crossdet {

inline constexpr std::int64_t kDefaultMtu = 1500;

/// A periodic unicast time-sensitive application.
struct Application {
  std::string id;
  std::string src;
  std::string dest;
  Nanos e2e = 0;
  std::int64_t msg_len = 0;
  Nanos period = 0;
  std::int64_t mtu = kDefaultMtu;
  friend bool operator==(const Application&, const Application&) = default;
};

struct Message {
  int index = 1;  ///< 1-based within one cycle time
  Nanos arrival_offset = 0;
};

struct Packet {
  int msg = 1;  ///< 1-based message index
  int pkt = 1;  ///< 1-based packet index within the message
  std::int64_t len = 0;
};

/// Identifies p_{app, msg, pkt}; app is the position in the workload.
struct PacketKey {
  std::size_t app = 0;
  int msg = 1;
  int pkt = 1;
  auto operator<=>(const PacketKey&) const = default;
};

/// Messages per cycle time; throws ModelError unless the period divides t_ct.
int messages_per_cycle(const Application& app, const TimeConfig& time);
int packets_per_message(const Application& app);

/// Message-to-packet expansion for every message of one cycle time, ordered
/// by (msg, pkt). All packets but the last of each message carry exactly mtu bytes.
std::vector<Packet> fragment(const Application& app, const TimeConfig& time);

/// Applications bound to a graph, with message arrival offsets and packets.
struct AppTraffic {
  Application app;
  NodeIndex src = 0;
  NodeIndex dest = 0;
  std::vector<Message> messages;
  std::vector<Packet> packets;
  int packets_per_message = 1;

  const Message& message(int index) const { return messages.at(static_cast<std::size_t>(index - 1)); }
  const Packet& packet(int msg, int pkt) const;
  std::size_t packet_slot(int msg, int pkt) const;
};

struct Workload {
  std::vector<AppTraffic> apps;

  std::size_t size() const { return apps.size(); }
  std::size_t packet_count() const;
  std::size_t find_app(std::string_view id) const;  ///< throws ModelError
};

/// First-message offsets drawn uniformly from [0, period) with a seeded RNG;
/// later messages follow at multiples of the period modulo t_ct.
Workload make_workload(const NetworkGraph& graph, std::vector<Application> apps, std::uint64_t seed);
/// Same, with explicit first-message offsets (one per application).
Workload make_workload(const NetworkGraph& graph, std::vector<Application> apps,
                       const std::vector<Nanos>& first_offsets);

std::string to_string(const PacketKey& key, const Workload& workload);

}  // namespace crossdet
