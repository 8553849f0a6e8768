#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sealmr/message.hpp"

struct lua_State;

namespace sealmr {

enum class Role { MAPPER, REDUCER };

Role role_from_string(const std::string &s);
const std::string &role_name(Role r);

struct CodePackage {
    Role role = Role::MAPPER;
    std::string script_source;
    int64_t peer_count = 1;  // reducers for mappers, mappers for reducers
    std::string job_id;
    std::string shared_state_json;  // empty = none; exposed to scripts as `state`
};

/// Embedded Lua interpreter hosting one user script. Sandboxed: base/string/
/// table/math only, no io/os/package/debug, loaders disabled. The host
/// provides push(key, value), a `json` codec (also via require "json"), and
/// an instruction budget that aborts runaway code.
///
/// Mapper scripts must define map and hash, optionally combine; reducer
/// scripts must define reduce.
class ScriptHost {
  public:
    explicit ScriptHost(const CodePackage &pkg, uint64_t instruction_budget = 50'000'000);
    ~ScriptHost();
    ScriptHost(const ScriptHost &) = delete;
    ScriptHost &operator=(const ScriptHost &) = delete;

    Role role() const { return role_; }
    bool has_combine() const { return has_combine_; }

    /// `value` is the decoded JSON value of the record.
    std::vector<KeyValue> run_map(const std::string &key, const nlohmann::json &value);
    /// `grouped` is passed to the script as JSON text, per the script contract.
    std::vector<KeyValue> run_combine(const std::string &key, const nlohmann::json &grouped);
    std::vector<KeyValue> run_reduce(const std::string &key, const nlohmann::json &grouped);
    int64_t run_hash(const std::string &key, int64_t rcount);  // throws HashOutOfRange

  private:
    friend int host_push(lua_State *);
    friend struct ScriptHostAccess;
    std::vector<KeyValue> call_emitting(const char *fn, const std::string &key,
                                        const std::string &value_text);

    lua_State *L_ = nullptr;
    Role role_;
    bool has_combine_ = false;
    uint64_t budget_;
    int64_t remaining_ = 0;
    std::vector<KeyValue> *sink_ = nullptr;
};

}  // namespace sealmr
