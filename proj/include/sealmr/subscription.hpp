#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sealmr/message.hpp"

namespace sealmr {

enum class ConstraintOp { EQ, LT, LE, GT, GE };

ConstraintOp constraint_op_from_string(const std::string &s);
const std::string &constraint_op_name(ConstraintOp op);

struct Constraint {
    std::string attribute;
    ConstraintOp op = ConstraintOp::EQ;
    AttrValue value;

    /// Missing attribute or mismatched value kind means unsatisfied.
    bool satisfied_by(const Header &h) const;
    bool operator==(const Constraint &) const = default;
};

struct Subscription {
    int64_t sub_id = 0;
    std::string owner;  // node id of the connection that receives matches
    std::vector<Constraint> constraints;

    bool matches(const Header &h) const;
};

std::string subscription_to_json(const Subscription &sub);
Subscription subscription_from_json(const std::string &json_text);  // throws ParseFailure

/// Indexed by the msg_type equality constraint; subscriptions without one land
/// in a catch-all bucket scanned for every publication.
class SubscriptionStore {
  public:
    int64_t add(Subscription sub);  // throws DuplicateId, ParseFailure on empty constraints
    bool remove(int64_t sub_id);
    void remove_owner(const std::string &owner);

    std::set<std::string> match(const Header &h) const;
    size_t size() const { return count_; }

  private:
    std::map<std::string, std::vector<Subscription>> by_type_;
    std::vector<Subscription> general_;
    std::set<int64_t> ids_;
    size_t count_ = 0;
};

}  // namespace sealmr
