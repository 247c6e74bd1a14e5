#pragma once

// Finite sequential games over ordered binary decision variables.
//
// Every variable observes all earlier variables, so a game is fully
// described by its variable order, the owner of each variable, and a payoff
// vector for each of the 2^n complete outcomes.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "varopt/error.hpp"
#include "varopt/rational.hpp"

namespace varopt {

using Bit = std::uint8_t;
using PlayerId = std::string;

// Hard limit on the number of variables; outcome tables are enumerated.
inline constexpr std::size_t max_variables = 20;

// Assignment of a bit to every variable, in variable order.
struct Outcome {
  std::vector<Bit> bits;

  [[nodiscard]] std::size_t size() const { return bits.size(); }
  Bit operator[](std::size_t i) const { return bits[i]; }

  // Index in lexicographic order, first variable most significant.
  [[nodiscard]] std::size_t index() const {
    std::size_t idx = 0;
    for (Bit b : bits) idx = (idx << 1U) | b;
    return idx;
  }
  static Outcome from_index(std::size_t n, std::size_t idx) {
    Outcome o;
    o.bits.resize(n);
    for (std::size_t i = 0; i < n; ++i) o.bits[n - 1 - i] = static_cast<Bit>((idx >> i) & 1U);
    return o;
  }

  friend auto operator<=>(const Outcome&, const Outcome&) = default;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct Variable {
  std::string name;
  PlayerId owner;
  int stage = 0;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct OutcomeGame {
  std::string name;
  std::vector<PlayerId> players;
  std::vector<Variable> variables;
  std::map<Outcome, std::vector<Rational>> payoffs;

  [[nodiscard]] std::size_t num_variables() const { return variables.size(); }
  [[nodiscard]] std::size_t num_outcomes() const { return std::size_t{1} << variables.size(); }

  [[nodiscard]] std::optional<std::size_t> find_player(std::string_view id) const {
    auto it = std::find(players.begin(), players.end(), id);
    if (it == players.end()) return std::nullopt;
    return static_cast<std::size_t>(it - players.begin());
  }
  [[nodiscard]] std::size_t player_index(std::string_view id) const {
    if (auto i = find_player(id)) return *i;
    throw InvalidModel("unknown player '" + std::string(id) + "'");
  }
  [[nodiscard]] std::optional<std::size_t> find_variable(std::string_view name_) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i].name == name_) return i;
    return std::nullopt;
  }
  [[nodiscard]] std::size_t variable_index(std::string_view name_) const {
    if (auto i = find_variable(name_)) return *i;
    throw InvalidModel("unknown variable '" + std::string(name_) + "'");
  }

  // Indices of the variables owned by `player`, in variable order.
  [[nodiscard]] std::vector<std::size_t> owned_variables(std::string_view player) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i].owner == player) out.push_back(i);
    return out;
  }

  friend bool operator==(const OutcomeGame&, const OutcomeGame&) = default;
};

// Human-readable "(x,y)=(1,0)" rendering of an outcome.
inline std::string format_outcome(const OutcomeGame& game, const Outcome& outcome) {
  std::string names = "(";
  std::string values = "(";
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (i > 0) {
      names += ',';
      values += ',';
    }
    names += i < game.variables.size() ? game.variables[i].name : "?";
    values += static_cast<char>('0' + outcome[i]);
  }
  return names + ")=" + values + ")";
}

// Returns the list of violations; empty means the game is valid.
inline std::vector<std::string> validate_game(const OutcomeGame& game) {
  std::vector<std::string> errors;

  if (game.players.empty() || game.players.size() > 2)
    errors.push_back("game must have one or two players, found " + std::to_string(game.players.size()));
  std::set<std::string> seen_players;
  for (const auto& p : game.players)
    if (!seen_players.insert(p).second) errors.push_back("duplicate player '" + p + "'");

  if (game.variables.empty()) errors.push_back("game has no variables");
  if (game.variables.size() > max_variables)
    errors.push_back("too many variables (" + std::to_string(game.variables.size()) + " > " +
                     std::to_string(max_variables) + ")");

  std::set<std::string> seen_vars;
  for (std::size_t i = 0; i < game.variables.size(); ++i) {
    const auto& v = game.variables[i];
    if (!seen_vars.insert(v.name).second) errors.push_back("duplicate variable '" + v.name + "'");
    if (!seen_players.contains(v.owner))
      errors.push_back("variable '" + v.name + "' has unknown owner '" + v.owner + "'");
    if (i > 0 && v.stage <= game.variables[i - 1].stage) {
      const auto& prev = game.variables[i - 1];
      errors.push_back("stages must strictly increase: '" + prev.name + "' (stage " + std::to_string(prev.stage) +
                       ") precedes '" + v.name + "' (stage " + std::to_string(v.stage) + ")");
    }
  }
  if (!errors.empty() && game.variables.size() > max_variables) return errors;

  const std::size_t n = game.variables.size();
  for (const auto& [outcome, values] : game.payoffs) {
    if (outcome.size() != n) {
      errors.push_back("payoff entry assigns " + std::to_string(outcome.size()) + " variables, expected " +
                       std::to_string(n));
      continue;
    }
    if (std::any_of(outcome.bits.begin(), outcome.bits.end(), [](Bit b) { return b > 1; }))
      errors.push_back("payoff entry " + format_outcome(game, outcome) + " has a non-binary move");
    if (values.size() != game.players.size())
      errors.push_back("payoff entry " + format_outcome(game, outcome) + " has " + std::to_string(values.size()) +
                       " values, expected " + std::to_string(game.players.size()));
  }
  for (std::size_t idx = 0; idx < game.num_outcomes(); ++idx) {
    const Outcome o = Outcome::from_index(n, idx);
    if (!game.payoffs.contains(o)) errors.push_back("missing payoff entry for outcome " + format_outcome(game, o));
  }
  return errors;
}

inline void require_valid(const OutcomeGame& game) {
  auto errors = validate_game(game);
  if (errors.empty()) return;
  std::string msg = "invalid game";
  for (const auto& e : errors) msg += "\n  " + e;
  throw InvalidModel(msg);
}

inline Rational leaf_payoff(const OutcomeGame& game, const Outcome& outcome, std::string_view player) {
  const std::size_t pi = game.player_index(player);
  if (outcome.size() != game.num_variables())
    throw InvalidModel("incomplete outcome: " + std::to_string(outcome.size()) + " of " +
                       std::to_string(game.num_variables()) + " variables assigned");
  auto it = game.payoffs.find(outcome);
  if (it == game.payoffs.end()) throw InvalidModel("no payoff entry for " + format_outcome(game, outcome));
  return it->second.at(pi);
}

struct BackwardInductionResult {
  Outcome profile;
  std::vector<Rational> payoffs;
};

namespace detail {

// Subgame value and continuation path from a prefix history.
inline BackwardInductionResult solve_subgame(const OutcomeGame& game, std::vector<Bit>& history) {
  const std::size_t i = history.size();
  if (i == game.num_variables()) {
    Outcome leaf{history};
    return {leaf, game.payoffs.at(leaf)};
  }
  const std::size_t owner = game.player_index(game.variables[i].owner);
  history.push_back(0);
  BackwardInductionResult zero = solve_subgame(game, history);
  history.back() = 1;
  BackwardInductionResult one = solve_subgame(game, history);
  history.pop_back();
  // Indifferent owner keeps move 0.
  return one.payoffs[owner] > zero.payoffs[owner] ? one : zero;
}

}  // namespace detail

// Subgame-perfect pure play by backward induction.
inline BackwardInductionResult backward_induction(const OutcomeGame& game) {
  require_valid(game);
  std::vector<Bit> history;
  history.reserve(game.num_variables());
  return detail::solve_subgame(game, history);
}

}  // namespace varopt
