#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sealmr/subscription.hpp"

using namespace sealmr;

namespace {

// small attribute/value pools so constraints actually hit and miss
Header random_pub(std::mt19937_64 &rng) {
    Header h(static_cast<MessageType>(1 + rng() % 8));
    std::uniform_int_distribution<int> n_attrs(0, 4);
    for (int i = 0, n = n_attrs(rng); i < n; ++i) {
        std::string name = "attr" + std::to_string(rng() % 5);
        if (rng() % 2)
            h.set(name, static_cast<int64_t>(rng() % 20));
        else
            h.set(name, "s" + std::to_string(rng() % 6));
    }
    return h;
}

Subscription random_sub(std::mt19937_64 &rng, int64_t id) {
    Subscription s;
    s.sub_id = id;
    s.owner = "node" + std::to_string(rng() % 12);
    std::uniform_int_distribution<int> n_cons(1, 3);
    int n = n_cons(rng);
    for (int i = 0; i < n; ++i) {
        Constraint c;
        if (i == 0 && rng() % 4 != 0) {  // usually anchor on msg_type like real clients
            c.attribute = "msg_type";
            c.op = ConstraintOp::EQ;
            c.value = message_type_name(static_cast<MessageType>(1 + rng() % 8));
        } else {
            c.attribute = "attr" + std::to_string(rng() % 5);
            c.op = static_cast<ConstraintOp>(rng() % 5);
            if (rng() % 2)
                c.value = static_cast<int64_t>(rng() % 20);
            else
                c.value = "s" + std::to_string(rng() % 6);
        }
        s.constraints.push_back(c);
    }
    return s;
}

}  // namespace

TEST_CASE("constraint semantics: missing attribute and kind mismatch never match") {
    Header h(MessageType::RESULT);
    h.set("n", int64_t{5});
    CHECK_FALSE(Constraint{"absent", ConstraintOp::EQ, int64_t{5}}.satisfied_by(h));
    CHECK_FALSE(Constraint{"n", ConstraintOp::EQ, std::string("5")}.satisfied_by(h));
    CHECK(Constraint{"n", ConstraintOp::EQ, int64_t{5}}.satisfied_by(h));
    CHECK(Constraint{"n", ConstraintOp::LE, int64_t{5}}.satisfied_by(h));
    CHECK_FALSE(Constraint{"n", ConstraintOp::LT, int64_t{5}}.satisfied_by(h));
    CHECK(Constraint{"n", ConstraintOp::GT, int64_t{4}}.satisfied_by(h));
    // string ordering is lexicographic
    Header hs(MessageType::RESULT);
    hs.set("s", "banana");
    CHECK(Constraint{"s", ConstraintOp::LT, std::string("cherry")}.satisfied_by(hs));
    CHECK_FALSE(Constraint{"s", ConstraintOp::GE, std::string("cherry")}.satisfied_by(hs));
}

TEST_CASE("store bookkeeping: ids, removal, owner teardown") {
    SubscriptionStore store;
    Subscription a;
    a.sub_id = 1;
    a.owner = "w1";
    a.constraints = {{"msg_type", ConstraintOp::EQ, message_type_name(MessageType::RESULT)}};
    store.add(a);
    CHECK_THROWS_AS(store.add(a), DuplicateId);
    Subscription empty;
    empty.sub_id = 2;
    empty.owner = "w1";
    CHECK_THROWS_AS(store.add(empty), ParseFailure);  // would match everything

    Subscription b = a;
    b.sub_id = 3;
    b.owner = "w2";
    store.add(b);
    CHECK(store.size() == 2);

    Header pub(MessageType::RESULT);
    CHECK(store.match(pub) == std::set<std::string>{"w1", "w2"});

    CHECK(store.remove(1));
    CHECK_FALSE(store.remove(1));
    CHECK(store.match(pub) == std::set<std::string>{"w2"});
    store.remove_owner("w2");
    CHECK(store.size() == 0);
    CHECK(store.match(pub).empty());
}

TEST_CASE("subscription JSON round-trip") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Subscription s = random_sub(rng, i + 1);
        Subscription back = subscription_from_json(subscription_to_json(s));
        CHECK(back.sub_id == s.sub_id);
        CHECK(back.owner == s.owner);
        CHECK(back.constraints == s.constraints);
    }
    CHECK_THROWS_AS(subscription_from_json("not json"), ParseFailure);
    CHECK_THROWS_AS(subscription_from_json("{}"), ParseFailure);
}

TEST_CASE("indexed matcher agrees with the brute-force scan") {
    std::mt19937_64 rng(424242);
    int total_matches = 0;
    for (int round = 0; round < 40; ++round) {
        SubscriptionStore store;
        std::vector<Subscription> subs;
        std::uniform_int_distribution<int> n_subs(1, 60);
        int n = n_subs(rng);
        for (int i = 0; i < n; ++i) {
            Subscription s = random_sub(rng, (round << 16) + i);
            store.add(s);
            subs.push_back(s);
        }
        for (int p = 0; p < 300; ++p) {
            Header pub = random_pub(rng);
            auto got = store.match(pub);
            auto want = testutil::brute_match(subs, pub);
            REQUIRE(got == want);
            total_matches += static_cast<int>(got.size());
        }
    }
    CHECK(total_matches > 0);  // the property isn't vacuous
}
