#pragma once

// Test-only oracles and generators. Nothing here calls into the polynomial,
// distribution or equilibrium code it is used to check.

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "varopt/game.hpp"
#include "varopt/measure_space.hpp"

namespace varopt::oracle {

inline OutcomeGame random_game(std::mt19937_64& rng, std::size_t n_vars, int lo = -5, int hi = 5) {
  OutcomeGame g;
  g.name = "random";
  g.players = {"A", "B"};
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> payoff(lo, hi);
  for (std::size_t i = 0; i < n_vars; ++i)
    g.variables.push_back({"v" + std::to_string(i), g.players[coin(rng)], static_cast<int>(i + 1)});
  for (std::size_t idx = 0; idx < (std::size_t{1} << n_vars); ++idx)
    g.payoffs[Outcome::from_index(n_vars, idx)] = {Rational(payoff(rng)), Rational(payoff(rng))};
  return g;
}

template <class T>
BasicParamPoint<T> random_point(std::mt19937_64& rng, const std::vector<ParamId>& ids, int denominator = 1000) {
  std::uniform_int_distribution<int> k(0, denominator);
  BasicParamPoint<T> point;
  for (const auto& id : ids) {
    if constexpr (std::is_floating_point_v<T>) {
      point.set(id, static_cast<double>(k(rng)) / denominator);
    } else {
      point.set(id, Rational(k(rng), denominator));
    }
  }
  return point;
}

inline ParamPointF random_interior_point(std::mt19937_64& rng, const std::vector<ParamId>& ids) {
  std::uniform_real_distribution<double> u(0.01, 0.99);
  ParamPointF point;
  for (const auto& id : ids) point.set(id, u(rng));
  return point;
}

// Probability that `target` moves 1, read straight from the rule text.
template <class T>
T rule_probability(const OutcomeGame& game, const std::vector<MeasureSpace>& spaces, std::size_t target,
                   const std::vector<Bit>& history, const BasicParamPoint<T>& point) {
  const std::string& name = game.variables[target].name;
  for (const auto& space : spaces) {
    for (const auto& rule : space.rules) {
      if (rule.target != name) continue;
      if (const auto* c = std::get_if<CopyRule>(&rule.body)) return T(history[game.variable_index(c->source)]);
      if (const auto* f = std::get_if<FlipRule>(&rule.body)) return T(1 - history[game.variable_index(f->source)]);
      if (const auto* k = std::get_if<ConstRule>(&rule.body)) return T(k->bit);
      for (const auto& cls : std::get<ParamRule>(rule.body).classes) {
        bool match = true;
        for (const auto& [var, bit] : cls.when) match = match && history[game.variable_index(var)] == bit;
        if (match) return point.at(cls.param);
      }
    }
  }
  throw std::logic_error("no rule for " + name);
}

// Expected payoff by recursive descent of the game tree.
template <class T>
T tree_expected_payoff(const OutcomeGame& game, const std::vector<MeasureSpace>& spaces, std::string_view player,
                       const BasicParamPoint<T>& point, std::vector<Bit> history = {}) {
  if (history.size() == game.num_variables()) return T(leaf_payoff(game, Outcome{history}, player));
  const T one = rule_probability(game, spaces, history.size(), history, point);
  T total(0);
  for (Bit b : {Bit{0}, Bit{1}}) {
    const T prob = b == 1 ? one : T(1) - one;
    if (prob == T(0)) continue;
    auto next = history;
    next.push_back(b);
    total += prob * tree_expected_payoff(game, spaces, player, point, next);
  }
  return total;
}

template <>
inline double tree_expected_payoff<double>(const OutcomeGame& game, const std::vector<MeasureSpace>& spaces,
                                           std::string_view player, const ParamPointF& point,
                                           std::vector<Bit> history) {
  if (history.size() == game.num_variables())
    return leaf_payoff(game, Outcome{history}, player).to_double();
  const double one = rule_probability(game, spaces, history.size(), history, point);
  double total = 0;
  for (Bit b : {Bit{0}, Bit{1}}) {
    const double prob = b == 1 ? one : 1 - one;
    if (prob == 0) continue;
    auto next = history;
    next.push_back(b);
    total += prob * tree_expected_payoff(game, spaces, player, point, next);
  }
  return total;
}

// Subgame-perfect continuation payoffs from `history` (ties keep move 0).
inline std::vector<Rational> subgame_value(const OutcomeGame& game, std::vector<Bit> history) {
  if (history.size() == game.num_variables()) return game.payoffs.at(Outcome{history});
  const std::size_t owner = game.player_index(game.variables[history.size()].owner);
  history.push_back(0);
  auto zero = subgame_value(game, history);
  history.back() = 1;
  auto one = subgame_value(game, history);
  return one[owner] > zero[owner] ? one : zero;
}

// All joint spaces formed from one catalog entry per player.
inline std::vector<std::vector<MeasureSpace>> catalog_products(const std::vector<std::vector<MeasureSpace>>& cats) {
  std::vector<std::vector<MeasureSpace>> out{{}};
  for (const auto& cat : cats) {
    std::vector<std::vector<MeasureSpace>> next;
    for (const auto& prefix : out)
      for (const auto& s : cat) {
        auto v = prefix;
        v.push_back(s);
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace varopt::oracle
