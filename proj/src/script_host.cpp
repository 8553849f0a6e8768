#include "sealmr/script_host.hpp"

extern "C" {
#include <lauxlib.h>
#include <lua.h>
#include <lualib.h>
}

#include <cstring>

namespace sealmr {

Role role_from_string(const std::string &s) {
    if (s == "mapper") return Role::MAPPER;
    if (s == "reducer") return Role::REDUCER;
    throw ParseFailure("unknown role: " + s);
}

const std::string &role_name(Role r) {
    static const std::string names[] = {"mapper", "reducer"};
    return names[r == Role::MAPPER ? 0 : 1];
}

namespace {

constexpr const char *kHostKey = "sealmr.host";
constexpr int kHookStep = 1000;
constexpr int kMaxJsonDepth = 32;

ScriptHost *host_of(lua_State *L) {
    lua_getfield(L, LUA_REGISTRYINDEX, kHostKey);
    auto *host = static_cast<ScriptHost *>(lua_touserdata(L, -1));
    lua_pop(L, 1);
    return host;
}

void json_to_lua(lua_State *L, const nlohmann::json &j, int depth = 0) {
    if (depth > kMaxJsonDepth)
        luaL_error(L, "JSON nesting too deep");
    switch (j.type()) {
        case nlohmann::json::value_t::null: lua_pushnil(L); break;
        case nlohmann::json::value_t::boolean: lua_pushboolean(L, j.get<bool>()); break;
        case nlohmann::json::value_t::number_integer:
        case nlohmann::json::value_t::number_unsigned:
            lua_pushinteger(L, j.get<int64_t>());
            break;
        case nlohmann::json::value_t::number_float: lua_pushnumber(L, j.get<double>()); break;
        case nlohmann::json::value_t::string: {
            const auto &s = j.get_ref<const std::string &>();
            lua_pushlstring(L, s.data(), s.size());
            break;
        }
        case nlohmann::json::value_t::array: {
            lua_createtable(L, static_cast<int>(j.size()), 0);
            int i = 1;
            for (const auto &el : j) {
                json_to_lua(L, el, depth + 1);
                lua_rawseti(L, -2, i++);
            }
            break;
        }
        case nlohmann::json::value_t::object: {
            lua_createtable(L, 0, static_cast<int>(j.size()));
            for (auto it = j.begin(); it != j.end(); ++it) {
                lua_pushlstring(L, it.key().data(), it.key().size());
                json_to_lua(L, it.value(), depth + 1);
                lua_rawset(L, -3);
            }
            break;
        }
        default: luaL_error(L, "unsupported JSON value");
    }
}

nlohmann::json lua_to_json(lua_State *L, int idx, int depth = 0) {
    if (depth > kMaxJsonDepth)
        throw ScriptFault("value nesting too deep");
    idx = lua_absindex(L, idx);
    switch (lua_type(L, idx)) {
        case LUA_TNIL: return nullptr;
        case LUA_TBOOLEAN: return static_cast<bool>(lua_toboolean(L, idx));
        case LUA_TNUMBER:
            if (lua_isinteger(L, idx))
                return lua_tointeger(L, idx);
            return lua_tonumber(L, idx);
        case LUA_TSTRING: {
            size_t len = 0;
            const char *s = lua_tolstring(L, idx, &len);
            return std::string(s, len);
        }
        case LUA_TTABLE: {
            // array iff keys are exactly 1..rawlen
            lua_Unsigned n = lua_rawlen(L, idx);
            size_t key_count = 0;
            bool all_int_keys = true;
            lua_pushnil(L);
            while (lua_next(L, idx) != 0) {
                key_count++;
                if (!(lua_isinteger(L, -2) && lua_tointeger(L, -2) >= 1 &&
                      static_cast<lua_Unsigned>(lua_tointeger(L, -2)) <= n))
                    all_int_keys = false;
                lua_pop(L, 1);
            }
            if (all_int_keys && key_count == n) {
                nlohmann::json arr = nlohmann::json::array();
                for (lua_Unsigned i = 1; i <= n; ++i) {
                    lua_rawgeti(L, idx, static_cast<lua_Integer>(i));
                    arr.push_back(lua_to_json(L, -1, depth + 1));
                    lua_pop(L, 1);
                }
                return arr;
            }
            nlohmann::json obj = nlohmann::json::object();
            lua_pushnil(L);
            while (lua_next(L, idx) != 0) {
                if (lua_type(L, -2) != LUA_TSTRING) {
                    lua_pop(L, 2);
                    throw ScriptFault("table keys must be strings or a dense array");
                }
                size_t len = 0;
                const char *k = lua_tolstring(L, -2, &len);
                obj[std::string(k, len)] = lua_to_json(L, -1, depth + 1);
                lua_pop(L, 1);
            }
            return obj;
        }
        default:
            throw ScriptFault("cannot encode Lua value of type " +
                              std::string(lua_typename(L, lua_type(L, idx))));
    }
}

int json_arg_index(lua_State *L) {
    // support both json.decode(s) and json:decode(s)
    if (lua_gettop(L) >= 2 && lua_istable(L, 1))
        return 2;
    return 1;
}

int l_json_decode(lua_State *L) {
    int idx = json_arg_index(L);
    size_t len = 0;
    const char *s = luaL_checklstring(L, idx, &len);
    nlohmann::json j = nlohmann::json::parse(s, s + len, nullptr, false);
    if (j.is_discarded())
        return luaL_error(L, "invalid JSON");
    json_to_lua(L, j);
    return 1;
}

int l_json_encode(lua_State *L) {
    int idx = json_arg_index(L);
    luaL_checkany(L, idx);
    try {
        std::string out = lua_to_json(L, idx).dump();
        lua_pushlstring(L, out.data(), out.size());
    } catch (const std::exception &e) {
        return luaL_error(L, "%s", e.what());
    }
    return 1;
}

int l_require(lua_State *L) {
    const char *name = luaL_checkstring(L, 1);
    if (std::strcmp(name, "json") == 0) {
        lua_getglobal(L, "json");
        return 1;
    }
    return luaL_error(L, "module '%s' is not available in the sealed region", name);
}

}  // namespace

int host_push(lua_State *L) {
    auto *host = host_of(L);
    if (!host || !host->sink_)
        return luaL_error(L, "push() called outside map/combine/reduce");
    size_t len = 0;
    const char *k = luaL_checklstring(L, 1, &len);
    if (len == 0)
        return luaL_error(L, "push() key must be non-empty");
    luaL_checkany(L, 2);
    try {
        nlohmann::json value = lua_to_json(L, 2);
        host->sink_->push_back({std::string(k, len), value.dump()});
    } catch (const std::exception &e) {
        return luaL_error(L, "%s", e.what());
    }
    return 0;
}

struct ScriptHostAccess {
    static int64_t &remaining(ScriptHost &h) { return h.remaining_; }
};

namespace {
void budget_hook(lua_State *L, lua_Debug *) {
    auto *host = host_of(L);
    if (!host)
        return;
    if ((ScriptHostAccess::remaining(*host) -= kHookStep) <= 0)
        luaL_error(L, "instruction budget exceeded");
}
}  // namespace

ScriptHost::ScriptHost(const CodePackage &pkg, uint64_t instruction_budget)
    : role_(pkg.role), budget_(instruction_budget) {
    if (pkg.peer_count < 1)
        throw ParseFailure("peer_count must be >= 1");
    L_ = luaL_newstate();
    if (!L_)
        throw std::bad_alloc();
    try {
        luaL_requiref(L_, LUA_GNAME, luaopen_base, 1);
        luaL_requiref(L_, LUA_STRLIBNAME, luaopen_string, 1);
        luaL_requiref(L_, LUA_TABLIBNAME, luaopen_table, 1);
        luaL_requiref(L_, LUA_MATHLIBNAME, luaopen_math, 1);
        lua_settop(L_, 0);

        // sandbox: no loaders, no process I/O
        for (const char *name : {"dofile", "loadfile", "load", "print", "collectgarbage"}) {
            lua_pushnil(L_);
            lua_setglobal(L_, name);
        }

        lua_pushlightuserdata(L_, this);
        lua_setfield(L_, LUA_REGISTRYINDEX, kHostKey);

        lua_pushcfunction(L_, host_push);
        lua_setglobal(L_, "push");
        lua_pushcfunction(L_, l_require);
        lua_setglobal(L_, "require");

        lua_createtable(L_, 0, 2);
        lua_pushcfunction(L_, l_json_decode);
        lua_setfield(L_, -2, "decode");
        lua_pushcfunction(L_, l_json_encode);
        lua_setfield(L_, -2, "encode");
        lua_setglobal(L_, "json");

        lua_pushinteger(L_, pkg.peer_count);
        lua_setglobal(L_, "peer_count");

        if (!pkg.shared_state_json.empty()) {
            nlohmann::json st = nlohmann::json::parse(pkg.shared_state_json, nullptr, false);
            if (st.is_discarded())
                throw ParseFailure("shared_state is not valid JSON");
            json_to_lua(L_, st);
            lua_setglobal(L_, "state");
        }

        lua_sethook(L_, budget_hook, LUA_MASKCOUNT, kHookStep);

        if (luaL_loadbuffer(L_, pkg.script_source.data(), pkg.script_source.size(), "script") !=
            LUA_OK) {
            std::string msg = lua_tostring(L_, -1) ? lua_tostring(L_, -1) : "syntax error";
            throw ScriptSyntaxError(msg);
        }
        remaining_ = static_cast<int64_t>(budget_);
        if (lua_pcall(L_, 0, 0, 0) != LUA_OK) {
            std::string msg = lua_tostring(L_, -1) ? lua_tostring(L_, -1) : "load error";
            throw ScriptFault("script load failed: " + msg);
        }

        auto require_fn = [&](const char *name) {
            lua_getglobal(L_, name);
            bool ok = lua_isfunction(L_, -1);
            lua_pop(L_, 1);
            if (!ok)
                throw MissingEntryPoint(std::string("script does not define ") + name);
        };
        if (role_ == Role::MAPPER) {
            require_fn("map");
            require_fn("hash");
            lua_getglobal(L_, "combine");
            has_combine_ = lua_isfunction(L_, -1);
            lua_pop(L_, 1);
        } else {
            require_fn("reduce");
        }
    } catch (...) {
        lua_close(L_);
        L_ = nullptr;
        throw;
    }
}

ScriptHost::~ScriptHost() {
    if (L_)
        lua_close(L_);
}

std::vector<KeyValue> ScriptHost::call_emitting(const char *fn, const std::string &key,
                                                const std::string &value_text) {
    lua_getglobal(L_, fn);
    lua_pushlstring(L_, key.data(), key.size());
    lua_pushlstring(L_, value_text.data(), value_text.size());
    std::vector<KeyValue> emitted;
    sink_ = &emitted;
    remaining_ = static_cast<int64_t>(budget_);
    int rc = lua_pcall(L_, 2, 0, 0);
    sink_ = nullptr;
    if (rc != LUA_OK) {
        std::string msg = lua_tostring(L_, -1) ? lua_tostring(L_, -1) : "error";
        lua_pop(L_, 1);
        throw ScriptFault(std::string(fn) + " failed: " + msg);
    }
    return emitted;
}

std::vector<KeyValue> ScriptHost::run_map(const std::string &key, const nlohmann::json &value) {
    if (role_ != Role::MAPPER)
        throw RoleMismatch("run_map on a reducer host");
    lua_getglobal(L_, "map");
    lua_pushlstring(L_, key.data(), key.size());
    json_to_lua(L_, value);
    std::vector<KeyValue> emitted;
    sink_ = &emitted;
    remaining_ = static_cast<int64_t>(budget_);
    int rc = lua_pcall(L_, 2, 0, 0);
    sink_ = nullptr;
    if (rc != LUA_OK) {
        std::string msg = lua_tostring(L_, -1) ? lua_tostring(L_, -1) : "error";
        lua_pop(L_, 1);
        throw ScriptFault("map failed: " + msg);
    }
    return emitted;
}

std::vector<KeyValue> ScriptHost::run_combine(const std::string &key, const nlohmann::json &grouped) {
    if (role_ != Role::MAPPER)
        throw RoleMismatch("run_combine on a reducer host");
    if (!has_combine_)
        throw MissingEntryPoint("script does not define combine");
    return call_emitting("combine", key, grouped.dump());
}

std::vector<KeyValue> ScriptHost::run_reduce(const std::string &key, const nlohmann::json &grouped) {
    if (role_ != Role::REDUCER)
        throw RoleMismatch("run_reduce on a mapper host");
    return call_emitting("reduce", key, grouped.dump());
}

int64_t ScriptHost::run_hash(const std::string &key, int64_t rcount) {
    if (role_ != Role::MAPPER)
        throw RoleMismatch("run_hash on a reducer host");
    lua_getglobal(L_, "hash");
    lua_pushlstring(L_, key.data(), key.size());
    lua_pushinteger(L_, rcount);
    remaining_ = static_cast<int64_t>(budget_);
    if (lua_pcall(L_, 2, 1, 0) != LUA_OK) {
        std::string msg = lua_tostring(L_, -1) ? lua_tostring(L_, -1) : "error";
        lua_pop(L_, 1);
        throw ScriptFault("hash failed: " + msg);
    }
    if (!lua_isinteger(L_, -1)) {
        lua_pop(L_, 1);
        throw ScriptFault("hash must return an integer");
    }
    int64_t dest = lua_tointeger(L_, -1);
    lua_pop(L_, 1);
    if (dest < 0 || dest >= rcount)
        throw HashOutOfRange("hash(" + key + ", " + std::to_string(rcount) + ") returned " +
                             std::to_string(dest));
    return dest;
}

}  // namespace sealmr
