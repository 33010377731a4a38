#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ordo/expr.hpp"
#include "ordo/type.hpp"

namespace ordo {

// Immutable singly linked list; tails are shared between versions.
template <class T>
class PList {
public:
    PList() = default;

    static PList cons(T head, PList tail) {
        PList out;
        out.cell_ = std::make_shared<const Cell>(Cell{std::move(head), std::move(tail.cell_)});
        return out;
    }
    static PList from_vector(const std::vector<T>& xs) {
        PList out;
        for (auto it = xs.rbegin(); it != xs.rend(); ++it) out = cons(*it, out);
        return out;
    }

    bool empty() const { return !cell_; }
    const T& head() const { return cell_->head; }
    PList tail() const {
        PList out;
        out.cell_ = cell_->tail;
        return out;
    }
    std::size_t size() const {
        std::size_t n = 0;
        for (const Cell* c = cell_.get(); c; c = c->tail.get()) ++n;
        return n;
    }
    std::vector<T> to_vector() const {
        std::vector<T> out;
        for (const Cell* c = cell_.get(); c; c = c->tail.get()) out.push_back(c->head);
        return out;
    }

private:
    struct Cell {
        T head;
        std::shared_ptr<const Cell> tail;
    };
    std::shared_ptr<const Cell> cell_;
};

using Freelist = PList<std::uint64_t>;

enum class FrameKind { Arg, Proj, Kont };

struct Frame {
    FrameKind kind = FrameKind::Arg;
    Polarity ann = Polarity::Pos;
    int index = 0;              // Proj
    std::string binder;         // Kont
    std::optional<Expr> term;   // Arg value or Kont body

    static Frame arg(Expr v, Polarity ann);
    static Frame proj(int i, Polarity ann);
    static Frame kont(std::string x, Expr body, Polarity ann);
};

using Stack = PList<Frame>;

struct Command {
    Expr expr;
    Stack stack;
    Freelist freelist;
    Polarity ann;
};

enum class Rule {
    LetNeg,
    LetPos,
    PopKont,
    PushArg,
    Beta,
    PushProj,
    Select,
    MatchPair,
    MatchUnit,
    MatchInl,
    MatchInr,
    NewPop,
    NewEmpty,
    Delete,
};

constexpr int kRuleCount = 14;
const char* rule_name(Rule r);
const std::vector<Rule>& all_rules();

struct StepResult {
    enum class Kind { Stepped, Final, Stuck };
    Kind kind = Kind::Stuck;
    std::optional<Command> next;
    Rule rule = Rule::LetNeg;
    std::optional<Expr> value;
    Freelist freelist;
    std::string diagnostic;
};

class OpenTerm : public std::runtime_error {
public:
    explicit OpenTerm(const std::string& var);
};

// Ascriptions are erased; types recorded by the checker stay on the nodes.
Command load(const Expr& e, Polarity p, const std::vector<std::uint64_t>& l);
StepResult step(const Command& c);
std::set<Rule> classify(const Command& c);

struct TraceEntry {
    Command command;
    std::optional<Rule> rule;  // rule fired from this command, if any
};

struct Outcome {
    enum class Kind { Final, FuelExhausted, Stuck };
    Kind kind = Kind::Stuck;
    std::optional<Expr> value;
    std::vector<std::uint64_t> freelist;
    std::string diagnostic;
};

struct RunResult {
    Outcome outcome;
    std::vector<TraceEntry> trace;
};

struct RunHooks {
    std::function<void(const Command&)> on_command;
    std::function<void(const Command& before, Rule rule, const Command& after)> on_step;
};

constexpr std::size_t kDefaultFuel = 100000;

RunResult run(const Expr& e, const std::vector<std::uint64_t>& l, std::size_t fuel = kDefaultFuel,
              const RunHooks* hooks = nullptr);
RunResult run_command(const Command& c, std::size_t fuel = kDefaultFuel, const RunHooks* hooks = nullptr);

std::string frame_to_string(const Frame& f);
std::string outcome_kind_name(Outcome::Kind k);
nlohmann::json trace_to_json(const std::vector<TraceEntry>& trace);

}  // namespace ordo
