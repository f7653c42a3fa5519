#pragma once

// Random value generators shared by the property tests and the acceptance
// suite.

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mec/int_codec.hpp"

namespace mec::testing {

inline int_codec::WirePacket random_packet(std::mt19937_64& rng) {
  using int_codec::WirePacket;
  WirePacket p;
  p.kind = static_cast<PacketKind>(rng() % 4);
  const bool task = p.kind == PacketKind::TaskUp || p.kind == PacketKind::ResultDown;
  if (task) {
    p.task_class = static_cast<TaskClass>(rng() % 3);
    p.task_id = rng() | 1;
  }
  p.payload_bits = static_cast<std::uint32_t>(rng());
  const std::size_t depth = rng() % (int_codec::kMaxStackDepth + 1);
  Nanos t = rng() >> 8;
  for (std::size_t i = 0; i < depth; ++i) {
    t += rng() % 5'000'000;
    p.int_stack.push_back({static_cast<std::uint16_t>(rng()), t});
  }
  return p;
}

inline std::vector<std::uint8_t> from_hex(const std::string& hex) {
  std::vector<std::uint8_t> out;
  std::string digits;
  for (char c : hex) {
    if (!std::isspace(static_cast<unsigned char>(c))) digits += c;
  }
  for (std::size_t i = 0; i + 1 < digits.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(digits.substr(i, 2), nullptr, 16)));
  }
  return out;
}

// name -> bytes, from a fixture with "name hex..." lines and # comments.
inline std::vector<std::pair<std::string, std::vector<std::uint8_t>>> load_golden(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    std::string rest;
    std::getline(ls, rest);
    out.emplace_back(name, from_hex(rest));
  }
  return out;
}

// Packets the golden fixture encodes, keyed by the same names.
inline std::vector<std::pair<std::string, int_codec::WirePacket>> golden_packets() {
  using int_codec::WirePacket;
  return {
      {"notify_empty", WirePacket{PacketKind::Notify, std::nullopt, 0, 1000, {}}},
      {"taskup_firm_one", WirePacket{PacketKind::TaskUp, TaskClass::Firm, 1, 10'000, {{1, 1000}}}},
      {"result_soft_cloud",
       WirePacket{PacketKind::ResultDown, TaskClass::Soft, 0x0102030405060708ULL, 0,
                  {{3, 5'000'000}, {2, 7'000'000}, {1, 9'500'000}}}},
      {"sync_two_hops",
       WirePacket{PacketKind::Sync, std::nullopt, 0, 10'000, {{2, 600'000'000}, {3, 602'000'000}}}},
      {"taskup_nonrt_equal",
       WirePacket{PacketKind::TaskUp, TaskClass::NonRealTime, 42, 0xFFFFFFFFu, {{1, 0}, {2, 0}}}},
      {"result_firm_maxid",
       WirePacket{PacketKind::ResultDown, TaskClass::Firm, 0xFFFFFFFFFFFFFFFFULL, 1, {}}},
  };
}

}  // namespace mec::testing
