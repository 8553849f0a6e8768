#include "sealmr/subscription.hpp"

#include <algorithm>

#include <json.hpp>

namespace sealmr {

ConstraintOp constraint_op_from_string(const std::string &s) {
    if (s == "EQ") return ConstraintOp::EQ;
    if (s == "LT") return ConstraintOp::LT;
    if (s == "LE") return ConstraintOp::LE;
    if (s == "GT") return ConstraintOp::GT;
    if (s == "GE") return ConstraintOp::GE;
    throw ParseFailure("unknown constraint operator: " + s);
}

const std::string &constraint_op_name(ConstraintOp op) {
    static const std::string names[] = {"EQ", "LT", "LE", "GT", "GE"};
    return names[static_cast<int>(op)];
}

namespace {
template <typename T>
bool compare(const T &a, ConstraintOp op, const T &b) {
    switch (op) {
        case ConstraintOp::EQ: return a == b;
        case ConstraintOp::LT: return a < b;
        case ConstraintOp::LE: return a <= b;
        case ConstraintOp::GT: return a > b;
        case ConstraintOp::GE: return a >= b;
    }
    return false;
}
}  // namespace

bool Constraint::satisfied_by(const Header &h) const {
    const AttrValue *actual = h.find(attribute);
    if (!actual || actual->index() != value.index())
        return false;
    if (std::holds_alternative<int64_t>(value))
        return compare(std::get<int64_t>(*actual), op, std::get<int64_t>(value));
    return compare(std::get<std::string>(*actual), op, std::get<std::string>(value));
}

bool Subscription::matches(const Header &h) const {
    return std::all_of(constraints.begin(), constraints.end(),
                       [&](const Constraint &c) { return c.satisfied_by(h); });
}

std::string subscription_to_json(const Subscription &sub) {
    nlohmann::json j;
    j["sub_id"] = sub.sub_id;
    j["owner"] = sub.owner;
    auto &cs = j["constraints"] = nlohmann::json::array();
    for (const auto &c : sub.constraints) {
        nlohmann::json jc;
        jc["attr"] = c.attribute;
        jc["op"] = constraint_op_name(c.op);
        if (std::holds_alternative<int64_t>(c.value))
            jc["value"] = std::get<int64_t>(c.value);
        else
            jc["value"] = std::get<std::string>(c.value);
        cs.push_back(std::move(jc));
    }
    return j.dump();
}

Subscription subscription_from_json(const std::string &json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ParseFailure("bad subscription JSON");
    try {
        Subscription sub;
        sub.sub_id = j.at("sub_id").get<int64_t>();
        sub.owner = j.at("owner").get<std::string>();
        for (const auto &jc : j.at("constraints")) {
            Constraint c;
            c.attribute = jc.at("attr").get<std::string>();
            c.op = constraint_op_from_string(jc.at("op").get<std::string>());
            const auto &v = jc.at("value");
            if (v.is_number_integer())
                c.value = v.get<int64_t>();
            else if (v.is_string())
                c.value = v.get<std::string>();
            else
                throw ParseFailure("constraint value must be string or integer");
            sub.constraints.push_back(std::move(c));
        }
        return sub;
    } catch (const nlohmann::json::exception &e) {
        throw ParseFailure(std::string("bad subscription JSON: ") + e.what());
    }
}

int64_t SubscriptionStore::add(Subscription sub) {
    if (sub.constraints.empty())
        throw ParseFailure("subscription with no constraints");
    if (!ids_.insert(sub.sub_id).second)
        throw DuplicateId("subscription id already registered: " + std::to_string(sub.sub_id));
    const Constraint *type_eq = nullptr;
    for (const auto &c : sub.constraints)
        if (c.attribute == "msg_type" && c.op == ConstraintOp::EQ &&
            std::holds_alternative<std::string>(c.value)) {
            type_eq = &c;
            break;
        }
    int64_t id = sub.sub_id;
    if (type_eq)
        by_type_[std::get<std::string>(type_eq->value)].push_back(std::move(sub));
    else
        general_.push_back(std::move(sub));
    count_++;
    return id;
}

bool SubscriptionStore::remove(int64_t sub_id) {
    if (!ids_.erase(sub_id))
        return false;
    auto drop = [&](std::vector<Subscription> &v) {
        auto it = std::remove_if(v.begin(), v.end(),
                                 [&](const Subscription &s) { return s.sub_id == sub_id; });
        bool found = it != v.end();
        v.erase(it, v.end());
        return found;
    };
    for (auto &[_, v] : by_type_)
        if (drop(v)) {
            count_--;
            return true;
        }
    if (drop(general_)) {
        count_--;
        return true;
    }
    return false;
}

void SubscriptionStore::remove_owner(const std::string &owner) {
    auto drop = [&](std::vector<Subscription> &v) {
        auto it = std::remove_if(v.begin(), v.end(), [&](const Subscription &s) {
            if (s.owner != owner)
                return false;
            ids_.erase(s.sub_id);
            count_--;
            return true;
        });
        v.erase(it, v.end());
    };
    for (auto &[_, v] : by_type_)
        drop(v);
    drop(general_);
}

std::set<std::string> SubscriptionStore::match(const Header &h) const {
    std::set<std::string> owners;
    auto scan = [&](const std::vector<Subscription> &v) {
        for (const auto &s : v)
            if (s.matches(h))
                owners.insert(s.owner);
    };
    if (auto t = h.get_str("msg_type")) {
        auto it = by_type_.find(*t);
        if (it != by_type_.end())
            scan(it->second);
    }
    scan(general_);
    return owners;
}

}  // namespace sealmr
