#include "ordo/type.hpp"

#include <stdexcept>

namespace ordo {

struct Type::Node {
    Kind kind;
    Type left;
    Type right;
    std::size_t hash;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

char polarity_sign(Polarity p) { return p == Polarity::Pos ? '+' : '-'; }

Type Type::res() {
    static const Type t(std::make_shared<const Node>(Node{Kind::Res, Type(nullptr), Type(nullptr), 11}));
    return t;
}

Type Type::unit() {
    static const Type t(std::make_shared<const Node>(Node{Kind::Unit, Type(nullptr), Type(nullptr), 13}));
    return t;
}

Type Type::make(Kind k, Type a, Type b) {
    std::size_t h = mix(mix(static_cast<std::size_t>(k) * 31 + 7, a.hash()), b.hash());
    return Type(std::make_shared<const Node>(Node{k, std::move(a), std::move(b), h}));
}

Type Type::tensor(Type a, Type b) { return make(Kind::Tensor, std::move(a), std::move(b)); }
Type Type::sum(Type a, Type b) { return make(Kind::Sum, std::move(a), std::move(b)); }
Type Type::larrow(Type a, Type b) { return make(Kind::LArrow, std::move(a), std::move(b)); }
Type Type::with(Type a, Type b) { return make(Kind::With, std::move(a), std::move(b)); }

Type::Kind Type::kind() const { return node_->kind; }

const Type& Type::left() const {
    if (!node_->left.node_) throw std::logic_error("Type::left on a leaf type");
    return node_->left;
}

const Type& Type::right() const {
    if (!node_->right.node_) throw std::logic_error("Type::right on a leaf type");
    return node_->right;
}

std::size_t Type::hash() const { return node_->hash; }

bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind) return false;
    if (a.node_->kind == Type::Kind::Res || a.node_->kind == Type::Kind::Unit) return true;
    return a.node_->left == b.node_->left && a.node_->right == b.node_->right;
}

Polarity polarity(const Type& t) {
    switch (t.kind()) {
        case Type::Kind::LArrow:
        case Type::Kind::With:
            return Polarity::Neg;
        default:
            return Polarity::Pos;
    }
}

bool is_central(const Type& t) {
    switch (t.kind()) {
        case Type::Kind::Unit:
            return true;
        case Type::Kind::Tensor:
        case Type::Kind::Sum:
            return is_central(t.left()) && is_central(t.right());
        default:
            return false;
    }
}

bool contains_res(const Type& t) {
    switch (t.kind()) {
        case Type::Kind::Res:
            return true;
        case Type::Kind::Unit:
            return false;
        default:
            return contains_res(t.left()) || contains_res(t.right());
    }
}

std::size_t type_size(const Type& t) {
    if (t.is(Type::Kind::Res) || t.is(Type::Kind::Unit)) return 1;
    return 1 + type_size(t.left()) + type_size(t.right());
}

namespace {

// 0: -o, 1: &, 2: +, 3: *, 4: atom
int level(Type::Kind k) {
    switch (k) {
        case Type::Kind::LArrow: return 0;
        case Type::Kind::With: return 1;
        case Type::Kind::Sum: return 2;
        case Type::Kind::Tensor: return 3;
        default: return 4;
    }
}

void print(const Type& t, int min_level, std::string& out) {
    int lv = level(t.kind());
    bool paren = lv < min_level;
    if (paren) out += '(';
    switch (t.kind()) {
        case Type::Kind::Res: out += 'R'; break;
        case Type::Kind::Unit: out += '1'; break;
        case Type::Kind::LArrow:
            print(t.left(), 1, out);
            out += " -o ";
            print(t.right(), 0, out);
            break;
        default: {
            const char* op = t.is(Type::Kind::With) ? " & " : t.is(Type::Kind::Sum) ? " + " : " * ";
            print(t.left(), lv, out);
            out += op;
            print(t.right(), lv + 1, out);
            break;
        }
    }
    if (paren) out += ')';
}

}  // namespace

std::string to_string(const Type& t) {
    std::string out;
    print(t, 0, out);
    return out;
}

}  // namespace ordo
