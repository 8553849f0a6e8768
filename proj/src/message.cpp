#include "sealmr/message.hpp"

#include <algorithm>
#include <unordered_map>

namespace sealmr {

std::string hex_encode(const Bytes &b) {
    static const char *digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (uint8_t c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

Bytes hex_decode(const std::string &s) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (s.size() % 2 != 0)
        throw ParseFailure("odd-length hex string");
    Bytes out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = nibble(s[i]), lo = nibble(s[i + 1]);
        if (hi < 0 || lo < 0)
            throw ParseFailure("invalid hex digit");
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return out;
}

namespace {
const std::unordered_map<uint8_t, std::string> kTypeNames = {
    {0x01, "JOB_OPENING"},    {0x02, "JOB_DETAILS"},     {0x03, "MAP_CODETYPE"},
    {0x04, "REDUCE_CODETYPE"}, {0x05, "MAP_DATATYPE"},   {0x06, "REDUCE_DATATYPE"},
    {0x07, "EOS"},            {0x08, "RESULT"},
};
}  // namespace

bool is_message_type(uint8_t tag) { return kTypeNames.count(tag) != 0; }

bool is_control_tag(uint8_t tag) {
    return tag == kTagHello || tag == kTagStats || tag == kTagSubscribe || tag == kTagUnsubscribe;
}

MessageType message_type_from_tag(uint8_t tag) {
    if (!is_message_type(tag))
        throw UnknownType("unknown message type tag " + std::to_string(tag));
    return static_cast<MessageType>(tag);
}

const std::string &message_type_name(MessageType t) {
    return kTypeNames.at(static_cast<uint8_t>(t));
}

MessageType message_type_from_name(const std::string &name) {
    for (const auto &[tag, n] : kTypeNames)
        if (n == name)
            return static_cast<MessageType>(tag);
    throw UnknownType("unknown message type name " + name);
}

Header::Header(MessageType t) { set("msg_type", message_type_name(t)); }

void Header::set(const std::string &name, AttrValue value) {
    auto it = std::lower_bound(attrs_.begin(), attrs_.end(), name,
                               [](const auto &a, const std::string &n) { return a.first < n; });
    if (it != attrs_.end() && it->first == name)
        it->second = std::move(value);
    else
        attrs_.insert(it, {name, std::move(value)});
}

const AttrValue *Header::find(const std::string &name) const {
    auto it = std::lower_bound(attrs_.begin(), attrs_.end(), name,
                               [](const auto &a, const std::string &n) { return a.first < n; });
    if (it != attrs_.end() && it->first == name)
        return &it->second;
    return nullptr;
}

std::optional<std::string> Header::get_str(const std::string &name) const {
    const AttrValue *v = find(name);
    if (v && std::holds_alternative<std::string>(*v))
        return std::get<std::string>(*v);
    return std::nullopt;
}

std::optional<int64_t> Header::get_int(const std::string &name) const {
    const AttrValue *v = find(name);
    if (v && std::holds_alternative<int64_t>(*v))
        return std::get<int64_t>(*v);
    return std::nullopt;
}

MessageType Header::msg_type() const {
    auto n = get_str("msg_type");
    if (!n)
        throw ParseFailure("header missing msg_type");
    return message_type_from_name(*n);
}

namespace {

void put_u16(Bytes &b, uint16_t v) {
    b.push_back(static_cast<uint8_t>(v >> 8));
    b.push_back(static_cast<uint8_t>(v));
}

void put_i64(Bytes &b, int64_t sv) {
    uint64_t v = static_cast<uint64_t>(sv);
    for (int shift = 56; shift >= 0; shift -= 8)
        b.push_back(static_cast<uint8_t>(v >> shift));
}

struct Reader {
    const Bytes &b;
    size_t pos = 0;
    uint8_t u8() {
        if (pos >= b.size()) throw ParseFailure("header truncated");
        return b[pos++];
    }
    uint16_t u16() { return static_cast<uint16_t>(u8() << 8 | u8()); }
    int64_t i64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | u8();
        return static_cast<int64_t>(v);
    }
    std::string str(size_t n) {
        if (pos + n > b.size()) throw ParseFailure("header truncated");
        std::string s(b.begin() + pos, b.begin() + pos + n);
        pos += n;
        return s;
    }
};

}  // namespace

Bytes encode_header(const Header &h) {
    const auto &attrs = h.attributes();
    if (attrs.size() > 255)
        throw ParseFailure("too many header attributes");
    Bytes out;
    out.push_back(static_cast<uint8_t>(attrs.size()));
    for (const auto &[name, value] : attrs) {
        if (name.empty() || name.size() > 255)
            throw ParseFailure("bad attribute name length");
        out.push_back(static_cast<uint8_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        if (std::holds_alternative<std::string>(value)) {
            const auto &s = std::get<std::string>(value);
            if (s.size() > 0xffff)
                throw ParseFailure("attribute value too long");
            out.push_back(0);
            put_u16(out, static_cast<uint16_t>(s.size()));
            out.insert(out.end(), s.begin(), s.end());
        } else {
            out.push_back(1);
            put_i64(out, std::get<int64_t>(value));
        }
    }
    return out;
}

Header decode_header(const Bytes &b) {
    Reader r{b};
    uint8_t count = r.u8();
    Header h;
    std::string prev;
    for (int i = 0; i < count; ++i) {
        uint8_t name_len = r.u8();
        if (name_len == 0)
            throw ParseFailure("empty attribute name");
        std::string name = r.str(name_len);
        if (i > 0 && !(prev < name))
            throw ParseFailure("attributes not in canonical order");
        prev = name;
        uint8_t kind = r.u8();
        if (kind == 0) {
            uint16_t len = r.u16();
            h.set(name, r.str(len));
        } else if (kind == 1) {
            h.set(name, r.i64());
        } else {
            throw ParseFailure("unknown attribute kind");
        }
    }
    if (r.pos != b.size())
        throw ParseFailure("trailing bytes after header");
    return h;
}

}  // namespace sealmr
