#pragma once

// Parameterized probability measure spaces for sequential binary games.
//
// A measure space is the set of rules one player uses to generate its moves
// from observed history: a free probability per history class (`param`), or a
// deterministic coupling to an earlier move (`copy`, `flip`, `const`). A joint
// space is the product of one space per player and fixes the outcome
// distribution as a function of the combined parameters.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "varopt/error.hpp"
#include "varopt/game.hpp"
#include "varopt/rational.hpp"

namespace varopt {

using ParamId = std::string;

// Parameter values, each constrained to [0,1].
template <class T>
class BasicParamPoint {
 public:
  using value_type = T;
  using map_type = std::map<ParamId, T>;

  BasicParamPoint() = default;
  BasicParamPoint(std::initializer_list<std::pair<const ParamId, T>> init) {
    for (const auto& [id, v] : init) set(id, v);
  }

  void set(const ParamId& id, T value) {
    if (!in_unit_interval(value))
      throw InvalidModel("parameter '" + id + "' value " + to_text(value) + " outside [0,1]");
    values_[id] = value;
  }
  [[nodiscard]] const T& at(const ParamId& id) const {
    auto it = values_.find(id);
    if (it == values_.end()) throw MissingParameter(id);
    return it->second;
  }
  [[nodiscard]] bool contains(const ParamId& id) const { return values_.contains(id); }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  void erase(const ParamId& id) { values_.erase(id); }

  [[nodiscard]] auto begin() const { return values_.begin(); }
  [[nodiscard]] auto end() const { return values_.end(); }
  [[nodiscard]] const map_type& values() const { return values_; }

  friend bool operator==(const BasicParamPoint&, const BasicParamPoint&) = default;

 private:
  static bool in_unit_interval(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
      return std::isfinite(v) && v >= 0 && v <= 1;
    } else {
      return v >= T(0) && v <= T(1);
    }
  }
  static std::string to_text(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_number(v);
    } else {
      return v.str();
    }
  }

  map_type values_;
};

using ParamPoint = BasicParamPoint<Rational>;
using ParamPointF = BasicParamPoint<double>;

inline ParamPointF to_double(const ParamPoint& point) {
  ParamPointF out;
  for (const auto& [id, v] : point) out.set(id, v.to_double());
  return out;
}

// One history class of a param rule: the move is 1 with probability `param`
// whenever every (variable, bit) pair in `when` matches the history.
struct ParamClass {
  std::vector<std::pair<std::string, Bit>> when;
  ParamId param;

  friend bool operator==(const ParamClass&, const ParamClass&) = default;
};

struct ParamRule {
  std::vector<ParamClass> classes;
  friend bool operator==(const ParamRule&, const ParamRule&) = default;
};
struct CopyRule {
  std::string source;
  friend bool operator==(const CopyRule&, const CopyRule&) = default;
};
struct FlipRule {
  std::string source;
  friend bool operator==(const FlipRule&, const FlipRule&) = default;
};
struct ConstRule {
  Bit bit = 0;
  friend bool operator==(const ConstRule&, const ConstRule&) = default;
};

using RuleBody = std::variant<ParamRule, CopyRule, FlipRule, ConstRule>;

struct Rule {
  std::string target;
  RuleBody body;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct MeasureSpace {
  std::string label;
  PlayerId owner;
  std::vector<Rule> rules;

  // Parameters in order of first appearance.
  [[nodiscard]] std::vector<ParamId> parameters() const {
    std::vector<ParamId> out;
    std::set<ParamId> seen;
    for (const auto& rule : rules)
      if (const auto* pr = std::get_if<ParamRule>(&rule.body))
        for (const auto& cls : pr->classes)
          if (seen.insert(cls.param).second) out.push_back(cls.param);
    return out;
  }

  friend bool operator==(const MeasureSpace&, const MeasureSpace&) = default;
};

// Checks a space against a game; returns the list of violations.
inline std::vector<std::string> validate_space(const OutcomeGame& game, const MeasureSpace& space) {
  std::vector<std::string> errors;
  const std::string where = "space '" + space.label + "': ";
  if (!game.find_player(space.owner)) {
    errors.push_back(where + "unknown owner '" + space.owner + "'");
    return errors;
  }

  std::map<std::string, int> covered;
  std::map<ParamId, int> param_uses;
  for (const auto& rule : space.rules) {
    auto target = game.find_variable(rule.target);
    if (!target) {
      errors.push_back(where + "rule for unknown variable '" + rule.target + "'");
      continue;
    }
    if (game.variables[*target].owner != space.owner) {
      errors.push_back(where + "variable '" + rule.target + "' is owned by '" + game.variables[*target].owner +
                       "', not '" + space.owner + "'");
      continue;
    }
    ++covered[rule.target];

    auto check_earlier = [&](const std::string& source) -> std::optional<std::size_t> {
      auto s = game.find_variable(source);
      if (!s) {
        errors.push_back(where + "rule for '" + rule.target + "' refers to unknown variable '" + source + "'");
        return std::nullopt;
      }
      if (*s >= *target) {
        errors.push_back(where + "rule for '" + rule.target + "' refers to '" + source +
                         "', which is not observed before it");
        return std::nullopt;
      }
      return s;
    };

    std::visit(
        [&](const auto& body) {
          using B = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<B, CopyRule> || std::is_same_v<B, FlipRule>) {
            check_earlier(body.source);
          } else if constexpr (std::is_same_v<B, ConstRule>) {
            if (body.bit > 1) errors.push_back(where + "const rule for '" + rule.target + "' is not a bit");
          } else {
            if (body.classes.empty()) errors.push_back(where + "param rule for '" + rule.target + "' has no classes");
            bool conditions_ok = true;
            for (const auto& cls : body.classes) {
              ++param_uses[cls.param];
              for (const auto& [var, bit] : cls.when) {
                if (!check_earlier(var)) conditions_ok = false;
                if (bit > 1) {
                  errors.push_back(where + "condition on '" + var + "' is not a bit");
                  conditions_ok = false;
                }
              }
            }
            if (!conditions_ok) return;
            // Every history of earlier variables must fall in exactly one class.
            const std::size_t depth = *target;
            for (std::size_t h = 0; h < (std::size_t{1} << depth); ++h) {
              const Outcome history = Outcome::from_index(depth, h);
              int matches = 0;
              for (const auto& cls : body.classes) {
                bool all = true;
                for (const auto& [var, bit] : cls.when)
                  if (history[game.variable_index(var)] != bit) all = false;
                matches += all ? 1 : 0;
              }
              if (matches != 1) {
                std::string hist = depth == 0 ? std::string("(empty history)") : format_outcome(game, history);
                errors.push_back(where + "history classes for '" + rule.target + "' " +
                                 (matches == 0 ? "do not cover " : "overlap at ") + hist);
                break;
              }
            }
          }
        },
        rule.body);
  }

  for (std::size_t i : game.owned_variables(space.owner)) {
    const auto& name = game.variables[i].name;
    auto it = covered.find(name);
    if (it == covered.end()) errors.push_back(where + "no rule for variable '" + name + "'");
    else if (it->second > 1) errors.push_back(where + "more than one rule for variable '" + name + "'");
  }
  for (const auto& [param, uses] : param_uses)
    if (uses > 1) errors.push_back(where + "parameter '" + param + "' used by more than one history class");
  return errors;
}

// Product of one measure space per player, resolved against a game.
class JointSpace {
 public:
  enum class Kind { param, copy, flip, constant };

  struct ResolvedClass {
    std::vector<std::pair<std::size_t, Bit>> when;
    std::size_t param = 0;
  };
  struct ResolvedRule {
    Kind kind = Kind::constant;
    std::size_t source = 0;
    Bit bit = 0;
    std::vector<ResolvedClass> classes;
  };

  JointSpace(const OutcomeGame& game, std::vector<MeasureSpace> spaces) {
    require_valid(game);
    variable_names_.reserve(game.num_variables());
    for (const auto& v : game.variables) variable_names_.push_back(v.name);
    players_ = game.players;

    // Order spaces by player.
    std::vector<std::optional<MeasureSpace>> by_player(game.players.size());
    for (auto& s : spaces) {
      auto errors = validate_space(game, s);
      if (!errors.empty()) {
        std::string msg = "invalid measure space";
        for (const auto& e : errors) msg += "\n  " + e;
        throw InvalidModel(msg);
      }
      auto& slot = by_player[game.player_index(s.owner)];
      if (slot) throw InvalidModel("two spaces for player '" + s.owner + "': " + slot->label + ", " + s.label);
      slot = std::move(s);
    }
    for (std::size_t p = 0; p < by_player.size(); ++p) {
      if (!by_player[p]) throw InvalidModel("no space for player '" + game.players[p] + "'");
      spaces_.push_back(std::move(*by_player[p]));
    }

    std::map<ParamId, std::string> param_owner;
    for (std::size_t p = 0; p < spaces_.size(); ++p) {
      for (const auto& id : spaces_[p].parameters()) {
        if (auto [it, inserted] = param_owner.emplace(id, spaces_[p].label); !inserted)
          throw InvalidModel("parameter '" + id + "' appears in both " + it->second + " and " + spaces_[p].label);
        param_index_[id] = parameters_.size();
        parameters_.push_back(id);
        param_player_.push_back(p);
      }
    }

    rules_.resize(game.num_variables());
    for (const auto& space : spaces_) {
      for (const auto& rule : space.rules) {
        ResolvedRule& r = rules_[game.variable_index(rule.target)];
        std::visit(
            [&](const auto& body) {
              using B = std::decay_t<decltype(body)>;
              if constexpr (std::is_same_v<B, CopyRule>) {
                r.kind = Kind::copy;
                r.source = game.variable_index(body.source);
              } else if constexpr (std::is_same_v<B, FlipRule>) {
                r.kind = Kind::flip;
                r.source = game.variable_index(body.source);
              } else if constexpr (std::is_same_v<B, ConstRule>) {
                r.kind = Kind::constant;
                r.bit = body.bit;
              } else {
                r.kind = Kind::param;
                for (const auto& cls : body.classes) {
                  ResolvedClass rc;
                  rc.param = param_index_.at(cls.param);
                  for (const auto& [var, bit] : cls.when) rc.when.emplace_back(game.variable_index(var), bit);
                  r.classes.push_back(std::move(rc));
                }
              }
            },
            rule.body);
      }
    }
  }

  [[nodiscard]] const std::vector<MeasureSpace>& spaces() const { return spaces_; }
  [[nodiscard]] const std::vector<PlayerId>& players() const { return players_; }
  [[nodiscard]] const std::vector<ParamId>& parameters() const { return parameters_; }
  [[nodiscard]] const std::vector<std::string>& variable_names() const { return variable_names_; }
  [[nodiscard]] const std::vector<ResolvedRule>& rules() const { return rules_; }

  [[nodiscard]] std::size_t player_of_parameter(std::size_t param) const { return param_player_.at(param); }
  [[nodiscard]] std::vector<ParamId> parameters_of(std::size_t player) const {
    std::vector<ParamId> out;
    for (std::size_t i = 0; i < parameters_.size(); ++i)
      if (param_player_[i] == player) out.push_back(parameters_[i]);
    return out;
  }
  [[nodiscard]] std::vector<ParamId> parameters_of(std::string_view player) const {
    for (std::size_t p = 0; p < players_.size(); ++p)
      if (players_[p] == player) return parameters_of(p);
    throw InvalidModel("unknown player '" + std::string(player) + "'");
  }
  [[nodiscard]] std::size_t variable_index(std::string_view name) const {
    for (std::size_t i = 0; i < variable_names_.size(); ++i)
      if (variable_names_[i] == name) return i;
    throw InvalidModel("unknown variable '" + std::string(name) + "'");
  }

  // "X0 x Y0"
  [[nodiscard]] std::string label() const {
    std::string out;
    for (const auto& s : spaces_) out += (out.empty() ? "" : " x ") + s.label;
    return out;
  }

 private:
  std::vector<PlayerId> players_;
  std::vector<std::string> variable_names_;
  std::vector<MeasureSpace> spaces_;
  std::vector<ParamId> parameters_;
  std::vector<std::size_t> param_player_;
  std::map<ParamId, std::size_t> param_index_;
  std::vector<ResolvedRule> rules_;
};

namespace detail {

template <class T>
T move_one_probability(const JointSpace& joint, std::size_t var, std::span<const Bit> history,
                       const BasicParamPoint<T>& point) {
  if (history.size() < var)
    throw InvalidModel("history for '" + joint.variable_names()[var] + "' assigns " +
                       std::to_string(history.size()) + " of " + std::to_string(var) + " earlier variables");
  const auto& rule = joint.rules()[var];
  switch (rule.kind) {
    case JointSpace::Kind::copy:
      return T(history[rule.source] == 1 ? 1 : 0);
    case JointSpace::Kind::flip:
      return T(history[rule.source] == 1 ? 0 : 1);
    case JointSpace::Kind::constant:
      return T(rule.bit);
    case JointSpace::Kind::param:
      for (const auto& cls : rule.classes) {
        bool match = true;
        for (const auto& [v, b] : cls.when)
          if (history[v] != b) match = false;
        if (match) return point.at(joint.parameters()[cls.param]);
      }
      break;
  }
  throw InvalidModel("no rule class matches the history of '" + joint.variable_names()[var] + "'");
}

}  // namespace detail

// Probability that `var` takes move 1 given the history of earlier moves.
template <class T>
T conditional_prob(const JointSpace& joint, std::string_view var, std::span<const Bit> history,
                   const BasicParamPoint<T>& point) {
  return detail::move_one_probability(joint, joint.variable_index(var), history, point);
}

// Probability of every complete outcome, including zeros.
template <class T>
std::map<Outcome, T> outcome_distribution(const JointSpace& joint, const BasicParamPoint<T>& point) {
  const std::size_t n = joint.variable_names().size();
  std::map<Outcome, T> out;
  for (std::size_t idx = 0; idx < (std::size_t{1} << n); ++idx) {
    Outcome o = Outcome::from_index(n, idx);
    T prob(1);
    for (std::size_t v = 0; v < n; ++v) {
      const T one = detail::move_one_probability(joint, v, std::span<const Bit>(o.bits.data(), v), point);
      prob *= o[v] == 1 ? one : T(1) - one;
    }
    out.emplace(std::move(o), prob);
  }
  return out;
}

namespace detail {

// Game-wide canonical names for the independent behavioural parameters:
// p, q, r, ... in (variable, history) order.
inline std::vector<std::vector<ParamId>> behavioural_parameter_names(const OutcomeGame& game) {
  static constexpr std::string_view letters = "pqrstuvw";
  std::size_t total = 0;
  for (std::size_t i = 0; i < game.num_variables(); ++i) total += std::size_t{1} << i;
  std::vector<std::vector<ParamId>> names(game.num_variables());
  std::size_t k = 0;
  for (std::size_t i = 0; i < game.num_variables(); ++i)
    for (std::size_t h = 0; h < (std::size_t{1} << i); ++h, ++k)
      names[i].push_back(total <= letters.size() ? std::string(1, letters[k]) : "p" + std::to_string(k + 1));
  return names;
}

inline Rule behavioural_rule(const OutcomeGame& game, std::size_t var, const std::vector<ParamId>& names) {
  ParamRule pr;
  for (std::size_t h = 0; h < (std::size_t{1} << var); ++h) {
    const Outcome history = Outcome::from_index(var, h);
    ParamClass cls;
    cls.param = names[h];
    for (std::size_t j = 0; j < var; ++j) cls.when.emplace_back(game.variables[j].name, history[j]);
    pr.classes.push_back(std::move(cls));
  }
  return {game.variables[var].name, pr};
}

}  // namespace detail

// The fully independent behavioural space `<P>0`, then one copy space `<P>+`
// and one flip space `<P>-` per observed opponent variable. When several
// opponent variables can be coupled to, the coupled variable is appended to
// the label (`Y+x`).
inline std::vector<MeasureSpace> standard_catalog(const OutcomeGame& game, std::string_view player) {
  require_valid(game);
  static_cast<void>(game.player_index(player));
  const auto names = detail::behavioural_parameter_names(game);
  const auto owned = game.owned_variables(player);
  const std::string p(player);

  MeasureSpace independent{p + "0", p, {}};
  for (std::size_t v : owned) independent.rules.push_back(detail::behavioural_rule(game, v, names[v]));

  std::vector<std::size_t> sources;
  for (std::size_t i = 0; i < game.num_variables(); ++i)
    if (game.variables[i].owner != player && !owned.empty() && i < owned.back()) sources.push_back(i);

  std::vector<MeasureSpace> out{independent};
  for (std::size_t src : sources) {
    const std::string& src_name = game.variables[src].name;
    const std::string suffix = sources.size() == 1 ? "" : src_name;
    for (bool flip : {false, true}) {
      MeasureSpace s{p + (flip ? "-" : "+") + suffix, p, {}};
      for (std::size_t v : owned) {
        if (src < v) {
          s.rules.push_back(flip ? Rule{game.variables[v].name, FlipRule{src_name}}
                                 : Rule{game.variables[v].name, CopyRule{src_name}});
        } else {
          s.rules.push_back(detail::behavioural_rule(game, v, names[v]));
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Pearson correlation of two game variables under the induced distribution.
// Zero when either variable has (numerically) zero variance.
inline double correlation(const JointSpace& joint, const ParamPointF& point, std::string_view var_a,
                          std::string_view var_b) {
  const std::size_t a = joint.variable_index(var_a);
  const std::size_t b = joint.variable_index(var_b);
  double ea = 0, eb = 0, eab = 0;
  for (const auto& [o, prob] : outcome_distribution(joint, point)) {
    ea += o[a] * prob;
    eb += o[b] * prob;
    eab += (o[a] & o[b]) * prob;
  }
  constexpr double zero_variance = 1e-14;
  const double va = ea * (1 - ea);
  const double vb = eb * (1 - eb);
  if (va <= zero_variance || vb <= zero_variance) return 0.0;
  const double rho = (eab - ea * eb) / std::sqrt(va * vb);
  return std::clamp(rho, -1.0, 1.0);
}

namespace detail {

inline std::optional<Rational::int_type> exact_sqrt(Rational::int_type v) {
  if (v < 0) return std::nullopt;
  auto r = static_cast<Rational::int_type>(std::llround(std::sqrt(static_cast<long double>(v))));
  for (auto c : {r - 1, r, r + 1})
    if (c >= 0 && static_cast<__int128>(c) * c == v) return c;
  return std::nullopt;
}

}  // namespace detail

// Exact correlation when it is rational; std::nullopt when the value is irrational.
inline std::optional<Rational> correlation_exact(const JointSpace& joint, const ParamPoint& point,
                                                 std::string_view var_a, std::string_view var_b) {
  const std::size_t a = joint.variable_index(var_a);
  const std::size_t b = joint.variable_index(var_b);
  Rational ea, eb, eab;
  for (const auto& [o, prob] : outcome_distribution(joint, point)) {
    if (o[a]) ea += prob;
    if (o[b]) eb += prob;
    if (o[a] && o[b]) eab += prob;
  }
  const Rational va = ea * (Rational(1) - ea);
  const Rational vb = eb * (Rational(1) - eb);
  if (va.is_zero() || vb.is_zero()) return Rational(0);
  const Rational cov = eab - ea * eb;
  const Rational squared = cov * cov / (va * vb);
  auto n = detail::exact_sqrt(squared.numerator());
  auto d = detail::exact_sqrt(squared.denominator());
  if (!n || !d) return std::nullopt;
  const Rational magnitude(*n, *d);
  return cov.sign() < 0 ? -magnitude : magnitude;
}

}  // namespace varopt
