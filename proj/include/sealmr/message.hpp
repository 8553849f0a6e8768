#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sealmr/common.hpp"

namespace sealmr {

enum class MessageType : uint8_t {
    JOB_OPENING = 0x01,
    JOB_DETAILS = 0x02,
    MAP_CODETYPE = 0x03,
    REDUCE_CODETYPE = 0x04,
    MAP_DATATYPE = 0x05,
    REDUCE_DATATYPE = 0x06,
    EOS = 0x07,
    RESULT = 0x08,
};

// Control-plane tags, outside the MessageType enum. Used between a node and
// the router only; never routed.
constexpr uint8_t kTagHello = 0xE0;
constexpr uint8_t kTagStats = 0xE1;
constexpr uint8_t kTagSubscribe = 0xF0;
constexpr uint8_t kTagUnsubscribe = 0xF1;

bool is_message_type(uint8_t tag);
bool is_control_tag(uint8_t tag);
MessageType message_type_from_tag(uint8_t tag);  // throws UnknownType
const std::string &message_type_name(MessageType t);
MessageType message_type_from_name(const std::string &name);  // throws UnknownType

using AttrValue = std::variant<std::string, int64_t>;

/// Ordered attribute list with unique names; canonical form is sorted by name
/// so equal headers encode identically. `msg_type` is always present.
class Header {
  public:
    Header() = default;
    explicit Header(MessageType t);

    void set(const std::string &name, AttrValue value);
    const AttrValue *find(const std::string &name) const;
    std::optional<std::string> get_str(const std::string &name) const;
    std::optional<int64_t> get_int(const std::string &name) const;

    MessageType msg_type() const;  // throws ParseFailure if absent/unknown

    const std::vector<std::pair<std::string, AttrValue>> &attributes() const { return attrs_; }
    bool operator==(const Header &) const = default;

  private:
    std::vector<std::pair<std::string, AttrValue>> attrs_;  // kept sorted by name
};

Bytes encode_header(const Header &h);
Header decode_header(const Bytes &b);  // throws ParseFailure

struct KeyValue {
    std::string key;
    std::string value;  // JSON text
};

}  // namespace sealmr
