#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

namespace ordo {

enum class Polarity : std::uint8_t { Pos, Neg };

char polarity_sign(Polarity p);

// Immutable type tree with cheap copies. Equality is structural.
class Type {
public:
    enum class Kind : std::uint8_t { Res, Unit, Tensor, Sum, LArrow, With };

    static Type res();
    static Type unit();
    static Type tensor(Type a, Type b);
    static Type sum(Type a, Type b);
    static Type larrow(Type domain, Type codomain);
    static Type with(Type a, Type b);

    Kind kind() const;
    bool is(Kind k) const { return kind() == k; }
    // Left/right children; for LArrow these are domain/codomain.
    const Type& left() const;
    const Type& right() const;
    std::size_t hash() const;

    friend bool operator==(const Type& a, const Type& b);
    friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

private:
    struct Node;
    static Type make(Kind k, Type a, Type b);
    explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Polarity polarity(const Type& t);
bool is_central(const Type& t);
bool contains_res(const Type& t);
std::size_t type_size(const Type& t);

// Printed with minimal parentheses; re-parses to the same tree.
std::string to_string(const Type& t);

struct TypeHash {
    std::size_t operator()(const Type& t) const { return t.hash(); }
};

}  // namespace ordo
