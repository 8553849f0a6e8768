#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sealmr {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(const std::string &s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(const Bytes &b) { return std::string(b.begin(), b.end()); }

struct AuthFailure : std::runtime_error {
    explicit AuthFailure(const std::string &what) : std::runtime_error(what) {}
};

struct ParseFailure : std::runtime_error {
    explicit ParseFailure(const std::string &what) : std::runtime_error(what) {}
};

struct UnknownType : ParseFailure {
    explicit UnknownType(const std::string &what) : ParseFailure(what) {}
};

struct ScriptFault : std::runtime_error {
    explicit ScriptFault(const std::string &what) : std::runtime_error(what) {}
};

struct MissingEntryPoint : ScriptFault {
    explicit MissingEntryPoint(const std::string &what) : ScriptFault(what) {}
};

struct ScriptSyntaxError : ScriptFault {
    explicit ScriptSyntaxError(const std::string &what) : ScriptFault(what) {}
};

struct RoleMismatch : std::runtime_error {
    explicit RoleMismatch(const std::string &what) : std::runtime_error(what) {}
};

struct HashOutOfRange : std::runtime_error {
    explicit HashOutOfRange(const std::string &what) : std::runtime_error(what) {}
};

struct RegionFault : std::runtime_error {
    explicit RegionFault(const std::string &what) : std::runtime_error(what) {}
};

struct DuplicateId : std::runtime_error {
    explicit DuplicateId(const std::string &what) : std::runtime_error(what) {}
};

struct RouterUnreachable : std::runtime_error {
    explicit RouterUnreachable(const std::string &what) : std::runtime_error(what) {}
};

struct HiringTimeout : std::runtime_error {
    explicit HiringTimeout(const std::string &what) : std::runtime_error(what) {}
};

struct ResultTimeout : std::runtime_error {
    explicit ResultTimeout(const std::string &what) : std::runtime_error(what) {}
};

struct DuplicateKeyAcrossReducers : std::runtime_error {
    explicit DuplicateKeyAcrossReducers(const std::string &what) : std::runtime_error(what) {}
};

std::string hex_encode(const Bytes &b);
Bytes hex_decode(const std::string &s);  // throws ParseFailure

}  // namespace sealmr
