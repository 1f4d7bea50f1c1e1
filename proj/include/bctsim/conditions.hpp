#pragma once

// Belief store and the literal language used by rule and template triggers.
//
// A condition is a conjunction of literals. Literal forms:
//   atom            belief value is "true"
//   !atom           belief absent or not "true"
//   atom=v, atom!=v string comparison
//   atom>n, atom<n, atom>=n, atom<=n   numeric comparison
// Two pseudo-atoms read the agent's affective context instead of beliefs:
//   appraised(label)   some active appraisal carries this label
//   committed(atom)    a commitment exists on this evaluation atom

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bctsim {

struct Belief {
  std::string value;
  std::int64_t changed_tick = 0;
  bool mental = false;  // set by the agent's own preparation, not by perception
  bool operator==(const Belief&) const = default;
};

using BeliefStore = std::map<std::string, Belief>;

struct Literal {
  enum class Op { truthy, falsy, eq, ne, gt, lt, ge, le };
  std::string atom;
  Op op = Op::truthy;
  std::string value;
  bool operator==(const Literal&) const = default;
};

class ConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Literal parse_literal(std::string_view text) {
  Literal lit;
  if (text.empty()) throw ConditionError("empty literal");
  if (text.front() == '!' && text.find_first_of("=<>", 1) == std::string_view::npos) {
    lit.op = Literal::Op::falsy;
    lit.atom = std::string(text.substr(1));
  } else {
    struct OpTok {
      std::string_view tok;
      Literal::Op op;
    };
    static constexpr OpTok ops[] = {{"!=", Literal::Op::ne}, {">=", Literal::Op::ge}, {"<=", Literal::Op::le},
                                    {"=", Literal::Op::eq},  {">", Literal::Op::gt},  {"<", Literal::Op::lt}};
    bool found = false;
    for (const auto& o : ops) {
      auto pos = text.find(o.tok);
      if (pos == std::string_view::npos) continue;
      lit.atom = std::string(text.substr(0, pos));
      lit.value = std::string(text.substr(pos + o.tok.size()));
      lit.op = o.op;
      found = true;
      break;
    }
    if (!found) lit.atom = std::string(text);
    if (found && lit.value.empty()) throw ConditionError("literal without value: " + std::string(text));
  }
  if (lit.atom.empty()) throw ConditionError("literal without atom: " + std::string(text));
  if (lit.op == Literal::Op::gt || lit.op == Literal::Op::lt || lit.op == Literal::Op::ge ||
      lit.op == Literal::Op::le) {
    try {
      std::size_t used = 0;
      std::stod(lit.value, &used);
      if (used != lit.value.size()) throw ConditionError("non-numeric bound in " + std::string(text));
    } catch (const std::logic_error&) {
      throw ConditionError("non-numeric bound in " + std::string(text));
    }
  }
  return lit;
}

inline std::string to_string(const Literal& l) {
  switch (l.op) {
    case Literal::Op::truthy: return l.atom;
    case Literal::Op::falsy: return "!" + l.atom;
    case Literal::Op::eq: return l.atom + "=" + l.value;
    case Literal::Op::ne: return l.atom + "!=" + l.value;
    case Literal::Op::gt: return l.atom + ">" + l.value;
    case Literal::Op::lt: return l.atom + "<" + l.value;
    case Literal::Op::ge: return l.atom + ">=" + l.value;
    case Literal::Op::le: return l.atom + "<=" + l.value;
  }
  return l.atom;
}

using Condition = std::vector<Literal>;

inline Condition parse_condition(const std::vector<std::string>& texts) {
  Condition c;
  c.reserve(texts.size());
  for (const auto& t : texts) c.push_back(parse_literal(t));
  return c;
}

/// Argument of a unary pseudo-atom such as `appraised(calming)`.
inline std::optional<std::string> pseudo_arg(std::string_view atom, std::string_view head) {
  if (atom.size() > head.size() + 2 && atom.substr(0, head.size()) == head && atom[head.size()] == '(' &&
      atom.back() == ')')
    return std::string(atom.substr(head.size() + 1, atom.size() - head.size() - 2));
  return std::nullopt;
}

struct EvalContext {
  const BeliefStore* beliefs = nullptr;
  std::set<std::string> appraisal_labels;
  std::set<std::string> commitment_atoms;
};

inline std::optional<std::string> lookup(const EvalContext& ctx, const std::string& atom) {
  if (auto a = pseudo_arg(atom, "appraised")) {
    return ctx.appraisal_labels.count(*a) ? std::optional<std::string>("true") : std::nullopt;
  }
  if (auto a = pseudo_arg(atom, "committed")) {
    return ctx.commitment_atoms.count(*a) ? std::optional<std::string>("true") : std::nullopt;
  }
  if (!ctx.beliefs) return std::nullopt;
  auto it = ctx.beliefs->find(atom);
  if (it == ctx.beliefs->end()) return std::nullopt;
  return it->second.value;
}

inline bool holds(const Literal& lit, const EvalContext& ctx) {
  auto v = lookup(ctx, lit.atom);
  auto numeric = [&](auto cmp) {
    if (!v) return false;
    try {
      std::size_t used = 0;
      double lhs = std::stod(*v, &used);
      if (used != v->size()) return false;
      return cmp(lhs, std::stod(lit.value));
    } catch (const std::logic_error&) {
      return false;
    }
  };
  switch (lit.op) {
    case Literal::Op::truthy: return v && *v == "true";
    case Literal::Op::falsy: return !v || *v != "true";
    case Literal::Op::eq: return v && *v == lit.value;
    case Literal::Op::ne: return !v || *v != lit.value;
    case Literal::Op::gt: return numeric([](double a, double b) { return a > b; });
    case Literal::Op::lt: return numeric([](double a, double b) { return a < b; });
    case Literal::Op::ge: return numeric([](double a, double b) { return a >= b; });
    case Literal::Op::le: return numeric([](double a, double b) { return a <= b; });
  }
  return false;
}

inline bool holds(const Condition& cond, const EvalContext& ctx) {
  for (const auto& lit : cond)
    if (!holds(lit, ctx)) return false;
  return true;
}

inline bool references(const Condition& cond, std::string_view atom) {
  for (const auto& lit : cond)
    if (lit.atom == atom) return true;
  return false;
}

}  // namespace bctsim
