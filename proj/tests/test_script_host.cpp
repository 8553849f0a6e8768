#include <doctest.h>

#include "helpers.hpp"
#include "sealmr/script_host.hpp"

using namespace sealmr;

namespace {

CodePackage pkg(Role role, std::string src, int64_t peers = 2, std::string state = "") {
    CodePackage p;
    p.role = role;
    p.script_source = std::move(src);
    p.peer_count = peers;
    p.job_id = "j";
    p.shared_state_json = std::move(state);
    return p;
}

std::map<std::string, int64_t> as_counts(const std::vector<KeyValue> &kvs) {
    std::map<std::string, int64_t> out;
    for (const auto &kv : kvs)
        out[kv.key] += std::stoll(kv.value);
    return out;
}

}  // namespace

TEST_CASE("reference word-count mapper emits lowered tokens") {
    ScriptHost host(pkg(Role::MAPPER, testutil::script("wordcount_map.lua")));
    auto kvs = host.run_map("0", "The quick FOX, the fox!");
    CHECK(as_counts(kvs) ==
          std::map<std::string, int64_t>{{"the", 2}, {"quick", 1}, {"fox", 2}});
    CHECK(host.has_combine());
}

TEST_CASE("reference word-count combine and reduce sum grouped values") {
    ScriptHost host(pkg(Role::MAPPER, testutil::script("wordcount_map.lua")));
    auto combined = host.run_combine("fox", nlohmann::json::array({1, 1, 1}));
    REQUIRE(combined.size() == 1);
    CHECK(combined[0].key == "fox");
    CHECK(combined[0].value == "3");

    ScriptHost red(pkg(Role::REDUCER, testutil::script("wordcount_reduce.lua")));
    auto reduced = red.run_reduce("fox", nlohmann::json::array({3, 2}));
    REQUIRE(reduced.size() == 1);
    CHECK(reduced[0].value == "5");
}

TEST_CASE("hash is deterministic and range-checked") {
    ScriptHost host(pkg(Role::MAPPER, testutil::script("wordcount_map.lua")));
    for (const std::string key : {"alpha", "beta", "zebra"}) {
        int64_t d = host.run_hash(key, 5);
        CHECK(d >= 0);
        CHECK(d < 5);
        CHECK(host.run_hash(key, 5) == d);
    }
    // a hash stepping outside [0, rcount) must be rejected, not wrapped
    ScriptHost bad(pkg(Role::MAPPER, "function map(k, v) end\nfunction hash(k, n) return n end"));
    CHECK_THROWS_AS(bad.run_hash("x", 3), HashOutOfRange);
    ScriptHost neg(pkg(Role::MAPPER, "function map(k, v) end\nfunction hash(k, n) return -1 end"));
    CHECK_THROWS_AS(neg.run_hash("x", 3), HashOutOfRange);
}

TEST_CASE("entry points are validated per role at load time") {
    CHECK_THROWS_AS(ScriptHost(pkg(Role::MAPPER, "function map(k, v) end")), MissingEntryPoint);
    CHECK_THROWS_AS(ScriptHost(pkg(Role::MAPPER, "function hash(k, n) return 0 end")),
                    MissingEntryPoint);
    CHECK_THROWS_AS(ScriptHost(pkg(Role::REDUCER, "function map(k, v) end")), MissingEntryPoint);
    CHECK_NOTHROW(ScriptHost(pkg(Role::REDUCER, "function reduce(k, v) end")));
    CHECK_THROWS_AS(ScriptHost(pkg(Role::MAPPER, "function map(")), ScriptSyntaxError);
}

TEST_CASE("runtime script errors surface as faults, not emissions") {
    ScriptHost host(pkg(Role::MAPPER,
                        "function map(k, v) push('a', 1); error('boom') end\n"
                        "function hash(k, n) return 0 end"));
    CHECK_THROWS_AS(host.run_map("0", "x"), ScriptFault);
    // push with an empty key is a host-level contract violation
    ScriptHost empty(pkg(Role::MAPPER,
                         "function map(k, v) push('', 1) end\nfunction hash(k, n) return 0 end"));
    CHECK_THROWS_AS(empty.run_map("0", "x"), ScriptFault);
}

TEST_CASE("sandbox: no io/os/loaders, budget stops runaway scripts") {
    ScriptHost host(pkg(Role::MAPPER,
                        "function map(k, v)\n"
                        "  if io ~= nil or os ~= nil or dofile ~= nil or load ~= nil\n"
                        "     or loadfile ~= nil or package ~= nil or debug ~= nil then\n"
                        "    error('sandbox breached')\n"
                        "  end\n"
                        "  push('clean', 1)\n"
                        "end\n"
                        "function hash(k, n) return 0 end"));
    auto kvs = host.run_map("0", "x");
    REQUIRE(kvs.size() == 1);
    CHECK(kvs[0].key == "clean");

    ScriptHost spin(pkg(Role::MAPPER,
                        "function map(k, v) while true do end end\n"
                        "function hash(k, n) return 0 end"),
                    /*instruction_budget=*/100'000);
    CHECK_THROWS_AS(spin.run_map("0", "x"), ScriptFault);
}

TEST_CASE("json codec and shared state are visible to scripts") {
    ScriptHost host(pkg(Role::MAPPER,
                        "local json = require 'json'\n"
                        "function map(k, v)\n"
                        "  local t = json:decode('[1,2,3]')\n"
                        "  push('sum', t[1] + t[2] + t[3] + state.offset + peer_count)\n"
                        "end\n"
                        "function hash(k, n) return 0 end",
                        /*peers=*/4, /*state=*/R"({"offset":10})"));
    auto kvs = host.run_map("0", "x");
    REQUIRE(kvs.size() == 1);
    CHECK(kvs[0].value == "20");  // 6 + 10 + 4
}

TEST_CASE("reference k-means scripts: assignment, identity combine, centroid") {
    std::string state = R"({"centers":[[0.0,0.0],[10.0,10.0]]})";
    ScriptHost mapper(pkg(Role::MAPPER, testutil::script("kmeans_map.lua"), 2, state));
    auto kvs = mapper.run_map("0", "1.0,1.0");
    REQUIRE(kvs.size() == 1);
    CHECK(kvs[0].key == "0");
    auto far = mapper.run_map("1", "9.0,8.0");
    REQUIRE(far.size() == 1);
    CHECK(far[0].key == "1");
    // equidistant point goes to the lowest index
    auto tie = mapper.run_map("2", "5.0,5.0");
    CHECK(tie[0].key == "0");

    auto combined = mapper.run_combine("0", nlohmann::json::parse("[[1.0,1.0],[3.0,5.0]]"));
    REQUIRE(combined.size() == 2);  // identity combine re-pushes each point

    ScriptHost reducer(pkg(Role::REDUCER, testutil::script("kmeans_reduce.lua"), 2, state));
    auto centers = reducer.run_reduce("0", nlohmann::json::parse("[[1.0,1.0],[3.0,5.0]]"));
    REQUIRE(centers.size() == 1);
    auto c = nlohmann::json::parse(centers[0].value);
    CHECK(c[0].get<double>() == doctest::Approx(2.0));
    CHECK(c[1].get<double>() == doctest::Approx(3.0));
}
