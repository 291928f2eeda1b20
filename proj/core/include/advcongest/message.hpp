#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace advcongest {

enum class Tag : std::uint8_t { Flood = 0, Accept = 1, HeardHeader = 2, HeardEdge = 3, Control = 4 };
enum class ControlKind : std::uint8_t { M = 0, MT = 1, StepDone = 2 };

// One CONGEST message. Field use by tag:
//   Flood:       bit, a = subgraph index
//   Accept:      bit
//   HeardHeader: bit, a = path length
//   HeardEdge:   a, b = endpoints of one path edge
//   Control:     a = ControlKind
// `inst` is a subgraph index carried only in LOCAL mode, where several
// bundles share one edge direction in the same round; it is not encoded.
struct Message {
  Tag tag = Tag::Control;
  std::uint8_t bit = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t inst = 0;

  static Message flood(std::uint8_t bit, std::uint32_t index) { return {Tag::Flood, bit, index, 0, 0}; }
  static Message accept(std::uint8_t bit) { return {Tag::Accept, bit, 0, 0, 0}; }
  static Message header(std::uint8_t bit, std::uint32_t len, std::uint32_t inst = 0) {
    return {Tag::HeardHeader, bit, len, 0, inst};
  }
  static Message heard_edge(std::uint32_t x, std::uint32_t y, std::uint32_t inst = 0) {
    return {Tag::HeardEdge, 0, x, y, inst};
  }
  static Message control(ControlKind k) { return {Tag::Control, 0, static_cast<std::uint32_t>(k), 0, 0}; }

  bool operator==(const Message&) const = default;
};

std::string to_string(Tag t);
Tag tag_from_string(const std::string& s);

// Fixed-width wire format: 3-bit tag, then fields of node_bits (node ids and
// lengths) or index_bits (subgraph indices), one bit for message bits and two
// for control kinds.
class Encoding {
 public:
  Encoding() = default;
  Encoding(std::size_t n, std::size_t ell, std::uint32_t beta);

  std::uint32_t node_bits() const noexcept { return node_bits_; }
  std::uint32_t index_bits() const noexcept { return index_bits_; }
  std::uint32_t budget() const noexcept { return budget_; }

  std::uint32_t size_bits(const Message& m) const {
    switch (m.tag) {
      case Tag::Flood: return 3 + 1 + index_bits_;
      case Tag::Accept: return 3 + 1;
      case Tag::HeardHeader: return 3 + 1 + node_bits_;
      case Tag::HeardEdge: return 3 + 2 * node_bits_;
      case Tag::Control: return 3 + 2;
    }
    return 3;
  }
  bool fits(const Message& m) const {
    const auto t = static_cast<std::size_t>(m.tag);
    return t < kTags ? fits_[t] : size_bits(m) <= budget_;
  }

  std::vector<bool> encode(const Message& m) const;
  Message decode(const std::vector<bool>& bits) const;
  // Keeps only the first budget() bits; missing bits read as zero and
  // field values are masked to their field widths.
  Message truncate(const Message& m) const;

 private:
  std::uint32_t node_bits_ = 1;
  std::uint32_t index_bits_ = 1;
  std::uint32_t budget_ = 64;
  static constexpr std::size_t kTags = 5;
  bool fits_[kTags] = {true, true, true, true, true};
};

std::uint32_t ceil_log2_at_least1(std::size_t x);

nlohmann::json to_json(const Message& m);
Message message_from_json(const nlohmann::json& j);

}  // namespace advcongest
