#pragma once

// Expected payoffs under a joint measure space: the exact polynomial form,
// a direct outcome-sum evaluation, and a finite-difference gradient built on
// the direct sum.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "varopt/game.hpp"
#include "varopt/measure_space.hpp"
#include "varopt/polynomial.hpp"

namespace varopt {

// Sum over outcomes of payoff times the product of move probabilities, with
// each free move contributing `theta` or `1 - theta`.
inline MultilinearPoly expected_payoff(const OutcomeGame& game, const JointSpace& joint, std::string_view player) {
  const std::size_t pi = game.player_index(player);
  const std::size_t n = game.num_variables();
  MultilinearPoly total;
  for (const auto& [outcome, values] : game.payoffs) {
    if (values[pi].is_zero()) continue;
    MultilinearPoly weight(Rational(1));
    for (std::size_t v = 0; v < n && !weight.is_zero(); ++v) {
      const auto& rule = joint.rules()[v];
      const Bit move = outcome[v];
      switch (rule.kind) {
        case JointSpace::Kind::copy:
          if (move != outcome[rule.source]) weight = MultilinearPoly();
          break;
        case JointSpace::Kind::flip:
          if (move == outcome[rule.source]) weight = MultilinearPoly();
          break;
        case JointSpace::Kind::constant:
          if (move != rule.bit) weight = MultilinearPoly();
          break;
        case JointSpace::Kind::param:
          for (const auto& cls : rule.classes) {
            const bool match = std::all_of(cls.when.begin(), cls.when.end(),
                                           [&](const auto& c) { return outcome[c.first] == c.second; });
            if (!match) continue;
            const auto theta = MultilinearPoly::variable(joint.parameters()[cls.param]);
            weight = weight * (move == 1 ? theta : MultilinearPoly(Rational(1)) - theta);
            break;
          }
          break;
      }
    }
    total += weight * values[pi];
  }
  return total;
}

// Expected payoff evaluated directly from the outcome distribution.
template <class T>
T direct_expected_payoff(const OutcomeGame& game, const JointSpace& joint, std::string_view player,
                         const BasicParamPoint<T>& point) {
  const std::size_t pi = game.player_index(player);
  T total(0);
  for (const auto& [outcome, prob] : outcome_distribution(joint, point)) {
    const Rational& payoff = game.payoffs.at(outcome)[pi];
    if constexpr (std::is_floating_point_v<T>) {
      total += prob * payoff.to_double();
    } else {
      total += prob * payoff;
    }
  }
  return total;
}

// Central-difference gradient of the directly summed payoff, one entry per
// joint parameter. Stencils that would leave [0,1] become one-sided.
inline std::vector<double> fd_gradient(const OutcomeGame& game, const JointSpace& joint, std::string_view player,
                                       const ParamPointF& point, double h = 1e-5) {
  std::vector<double> out;
  out.reserve(joint.parameters().size());
  for (const auto& id : joint.parameters()) {
    const double x = point.at(id);
    const double lo = std::max(0.0, x - h);
    const double hi = std::min(1.0, x + h);
    ParamPointF below = point;
    ParamPointF above = point;
    below.set(id, lo);
    above.set(id, hi);
    const double f_hi = direct_expected_payoff(game, joint, player, above);
    const double f_lo = direct_expected_payoff(game, joint, player, below);
    out.push_back((f_hi - f_lo) / (hi - lo));
  }
  return out;
}

}  // namespace varopt
