#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ordo/expr.hpp"
#include "ordo/machine.hpp"
#include "ordo/typecheck.hpp"

namespace ordo {

// Theta = gamma ; resources ; delta
struct ResourceContext {
    std::vector<std::string> gamma;
    std::vector<std::uint64_t> resources;
    std::vector<std::string> delta;

    friend bool operator==(const ResourceContext&, const ResourceContext&) = default;
    friend auto operator<=>(const ResourceContext&, const ResourceContext&) = default;
};

std::string to_string(const ResourceContext& t);

// Multiset of resources and set of variables, both kept sorted.
struct LinearResourceContext {
    std::vector<std::uint64_t> resources;
    std::vector<std::string> vars;

    friend bool operator==(const LinearResourceContext&, const LinearResourceContext&) = default;
};

class NotComposable : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class NotDerivable : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class AmbiguousDerivation : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class LinearityViolation : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First applicable case in the order: empty left list, empty right list, adjacent lists.
ResourceContext compose_contexts(const ResourceContext& a, const ResourceContext& b);
// Results of every applicable case, deduplicated.
std::vector<ResourceContext> compose_all(const ResourceContext& a, const ResourceContext& b);

// Every Theta with Theta |-o e, sorted.
std::vector<ResourceContext> derive_ordered_all(const Expr& e);
bool ordered_derivable(const Expr& e, const ResourceContext& theta);
// The derivable Theta, with variables moved into gamma when the list is empty.
ResourceContext derive_ordered(const Expr& e);

LinearResourceContext derive_linear(const Expr& e);

// Derivations shared across the commands of one run.
class ResourceMemo {
public:
    ResourceMemo();
    ~ResourceMemo();
    ResourceMemo(const ResourceMemo&) = delete;
    ResourceMemo& operator=(const ResourceMemo&) = delete;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    friend std::vector<std::uint64_t> command_resources(const Command&, Mode, ResourceMemo&);
};

// Ordered: the list L_s ++ L_t ++ l. Linear: the sorted multiset.
std::vector<std::uint64_t> command_resources(const Command& c, Mode mode);
std::vector<std::uint64_t> command_resources(const Command& c, Mode mode, ResourceMemo& memo);
bool check_preservation(const Command& before, const Command& after, Mode mode);

}  // namespace ordo
