#pragma once

// Equilibria within a fixed joint space, the meta-game over choices of
// measure space, and mixed weightings over an opponent's spaces.
//
// Expected payoffs are affine in each of a player's own parameters, so a
// best response is always attained at a vertex of the parameter cube. Search
// is therefore an exact enumeration of vertex profiles.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varopt/error.hpp"
#include "varopt/game.hpp"
#include "varopt/measure_space.hpp"
#include "varopt/payoff.hpp"
#include "varopt/polynomial.hpp"
#include "varopt/rational.hpp"

namespace varopt {

inline constexpr std::size_t max_vertex_parameters = 16;

namespace detail {

// Vertex `index` over `params`; the first parameter is the most significant bit.
inline ParamPoint vertex_point(std::span<const ParamId> params, std::size_t index) {
  ParamPoint point;
  const std::size_t k = params.size();
  for (std::size_t i = 0; i < k; ++i) point.set(params[i], Rational(static_cast<int>((index >> (k - 1 - i)) & 1U)));
  return point;
}

inline std::string format_vector(const std::vector<Rational>& values, NumberStyle style = NumberStyle::exact) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_number(values[i], style);
  return out + ")";
}

}  // namespace detail

// "(p,r)=(1,0)" over the entries of `order` that have a value in `point`.
inline std::string format_point(const ParamPoint& point, std::span<const ParamId> order,
                                NumberStyle style = NumberStyle::exact) {
  std::string names = "(";
  std::string values = "(";
  bool first = true;
  for (const auto& id : order) {
    if (!point.contains(id)) continue;
    names += (first ? "" : ",") + id;
    values += (first ? "" : ",") + format_number(point.at(id), style);
    first = false;
  }
  return names + ")=" + values + ")";
}

struct BestResponse {
  std::vector<ParamId> parameters;     // own parameters, joint order
  std::vector<ParamPoint> maximizers;  // optimal own vertices, lexicographic
  Rational value;
  std::vector<ParamId> indifferent;    // both 0 and 1 optimal somewhere in the maximizer set
};

// Maximizing vertices of `poly` over `params`; any other parameter must
// already be substituted.
inline BestResponse maximize_over_vertices(const MultilinearPoly& poly, std::vector<ParamId> params) {
  BestResponse out;
  out.parameters = std::move(params);
  const std::size_t k = out.parameters.size();
  if (k > max_vertex_parameters) throw InvalidModel("too many parameters for vertex search");
  for (const auto& id : poly.parameters())
    if (std::find(out.parameters.begin(), out.parameters.end(), id) == out.parameters.end())
      throw MissingParameter(id);

  std::vector<Rational> values(std::size_t{1} << k);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    values[idx] = eval(poly, detail::vertex_point(out.parameters, idx));
    if (idx == 0 || values[idx] > out.value) out.value = values[idx];
  }
  std::vector<bool> optimal(values.size());
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    optimal[idx] = values[idx] == out.value;
    if (optimal[idx]) out.maximizers.push_back(detail::vertex_point(out.parameters, idx));
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t mask = std::size_t{1} << (k - 1 - i);
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      if (optimal[idx] && optimal[idx ^ mask]) {
        out.indifferent.push_back(out.parameters[i]);
        break;
      }
    }
  }
  return out;
}

// Optimal own vertices for `player` with every opponent parameter fixed.
inline BestResponse best_response(const OutcomeGame& game, const JointSpace& joint, std::string_view player,
                                  const ParamPoint& fixed) {
  const std::size_t pi = game.player_index(player);
  std::vector<ParamId> own_params = joint.parameters_of(pi);
  const std::set<ParamId> own(own_params.begin(), own_params.end());
  for (const auto& [id, v] : fixed) {
    if (own.contains(id)) throw InvalidModel("fixed point sets '" + id + "', which belongs to " + std::string(player));
    if (std::find(joint.parameters().begin(), joint.parameters().end(), id) == joint.parameters().end())
      throw InvalidModel("fixed point sets '" + id + "', which is not a parameter of " + joint.label());
  }
  for (const auto& id : joint.parameters())
    if (!own.contains(id) && !fixed.contains(id)) throw MissingParameter(id);

  return maximize_over_vertices(substitute(expected_payoff(game, joint, player), fixed), std::move(own_params));
}

struct Equilibrium {
  ParamPoint point;                   // every joint parameter at 0 or 1
  Outcome outcome;                    // the outcome the vertex profile realizes
  std::vector<Rational> payoffs;      // one per player
  std::vector<ParamId> indifferent;   // flipping alone leaves the owner's payoff unchanged
  bool tie_break_consistent = false;  // every indifferent parameter is 0
};

struct EquilibriumReport {
  std::string joint_label;
  std::vector<ParamId> parameters;
  std::vector<ParamId> effective_parameters;  // occur in some player's payoff polynomial
  std::vector<Equilibrium> equilibria;        // lexicographic over `parameters`
  std::optional<std::size_t> selected;
  bool ambiguous = false;  // surviving candidates disagree on payoffs

  [[nodiscard]] const Equilibrium* selected_equilibrium() const {
    return selected ? &equilibria[*selected] : nullptr;
  }
};

// Every vertex profile at which each player's own assignment is a best
// response. Selection prefers profiles whose indifferent parameters are all 0,
// then the lexicographically smallest.
inline EquilibriumReport within_space_equilibria(const OutcomeGame& game, const JointSpace& joint) {
  EquilibriumReport report;
  report.joint_label = joint.label();
  report.parameters = joint.parameters();
  const std::size_t k = report.parameters.size();
  if (k > max_vertex_parameters) throw InvalidModel("too many parameters for vertex search");

  const std::size_t np = game.players.size();
  std::vector<MultilinearPoly> polys;
  std::set<ParamId> effective;
  for (const auto& player : game.players) {
    polys.push_back(expected_payoff(game, joint, player));
    for (const auto& id : polys.back().parameters()) effective.insert(id);
  }
  for (const auto& id : report.parameters)
    if (effective.contains(id)) report.effective_parameters.push_back(id);

  std::vector<std::vector<Rational>> values(std::size_t{1} << k);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const ParamPoint point = detail::vertex_point(report.parameters, idx);
    for (const auto& poly : polys) values[idx].push_back(eval(poly, point));
  }

  std::vector<std::size_t> owner(k);
  for (std::size_t i = 0; i < k; ++i) owner[i] = joint.player_of_parameter(i);
  auto bit_of = [&](std::size_t i) { return std::size_t{1} << (k - 1 - i); };

  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    bool stable = true;
    for (std::size_t z = 0; z < np && stable; ++z) {
      std::size_t own_mask = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (owner[i] == z) own_mask |= bit_of(i);
      // Enumerate every own deviation (submasks of own_mask) from this profile.
      std::size_t sub = own_mask;
      while (true) {
        const std::size_t deviated = (idx & ~own_mask) | sub;
        if (values[deviated][z] > values[idx][z]) {
          stable = false;
          break;
        }
        if (sub == 0) break;
        sub = (sub - 1) & own_mask;
      }
    }
    if (!stable) continue;

    Equilibrium eq;
    eq.point = detail::vertex_point(report.parameters, idx);
    eq.payoffs = values[idx];
    eq.tie_break_consistent = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (values[idx ^ bit_of(i)][owner[i]] == values[idx][owner[i]]) {
        eq.indifferent.push_back(report.parameters[i]);
        if ((idx & bit_of(i)) != 0) eq.tie_break_consistent = false;
      }
    }
    for (const auto& [o, prob] : outcome_distribution(joint, eq.point))
      if (prob == Rational(1)) eq.outcome = o;
    report.equilibria.push_back(std::move(eq));
  }

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < report.equilibria.size(); ++i)
    if (report.equilibria[i].tie_break_consistent) pool.push_back(i);
  if (pool.empty())
    for (std::size_t i = 0; i < report.equilibria.size(); ++i) pool.push_back(i);
  if (!pool.empty()) {
    report.selected = pool.front();
    for (std::size_t i : pool)
      if (report.equilibria[i].payoffs != report.equilibria[pool.front()].payoffs) report.ambiguous = true;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Meta-game over measure-space choices.

struct MetaCell {
  std::vector<std::size_t> choice;  // catalog index per player
  std::vector<Rational> payoffs;    // selected within-space equilibrium payoffs
  bool ambiguous = false;           // no equilibrium, or candidates disagree
  EquilibriumReport report;
};

class MetaGame {
 public:
  MetaGame(std::vector<PlayerId> players, std::vector<std::vector<MeasureSpace>> catalogs)
      : players_(std::move(players)), catalogs_(std::move(catalogs)) {}

  [[nodiscard]] const std::vector<PlayerId>& players() const { return players_; }
  [[nodiscard]] const std::vector<std::vector<MeasureSpace>>& catalogs() const { return catalogs_; }
  [[nodiscard]] const std::vector<MetaCell>& cells() const { return cells_; }

  // Row-major, first player most significant.
  [[nodiscard]] std::size_t index(std::span<const std::size_t> choice) const {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < catalogs_.size(); ++p) idx = idx * catalogs_[p].size() + choice[p];
    return idx;
  }
  [[nodiscard]] std::vector<std::size_t> choice(std::size_t idx) const {
    std::vector<std::size_t> out(catalogs_.size());
    for (std::size_t p = catalogs_.size(); p-- > 0;) {
      out[p] = idx % catalogs_[p].size();
      idx /= catalogs_[p].size();
    }
    return out;
  }
  [[nodiscard]] const MetaCell& cell(std::span<const std::size_t> choice) const { return cells_.at(index(choice)); }
  [[nodiscard]] std::vector<std::string> labels(std::span<const std::size_t> choice) const {
    std::vector<std::string> out;
    for (std::size_t p = 0; p < catalogs_.size(); ++p) out.push_back(catalogs_[p][choice[p]].label);
    return out;
  }
  // "(X0,Y+)"
  [[nodiscard]] std::string cell_name(std::span<const std::size_t> choice) const {
    std::string out = "(";
    const auto l = labels(choice);
    for (std::size_t i = 0; i < l.size(); ++i) out += (i ? "," : "") + l[i];
    return out + ")";
  }

  void add_cell(MetaCell cell) { cells_.push_back(std::move(cell)); }

 private:
  std::vector<PlayerId> players_;
  std::vector<std::vector<MeasureSpace>> catalogs_;
  std::vector<MetaCell> cells_;
};

inline MetaGame build_meta_game(const OutcomeGame& game, std::vector<std::vector<MeasureSpace>> catalogs) {
  if (catalogs.size() != game.players.size())
    throw InvalidModel("need one catalog per player, got " + std::to_string(catalogs.size()));
  for (std::size_t p = 0; p < catalogs.size(); ++p) {
    if (catalogs[p].empty()) throw InvalidModel("empty catalog for player '" + game.players[p] + "'");
    for (const auto& s : catalogs[p])
      if (s.owner != game.players[p])
        throw InvalidModel("space '" + s.label + "' in the catalog of '" + game.players[p] + "' is owned by '" +
                           s.owner + "'");
  }
  MetaGame meta(game.players, std::move(catalogs));
  std::size_t total = 1;
  for (const auto& c : meta.catalogs()) total *= c.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    MetaCell cell;
    cell.choice = meta.choice(idx);
    std::vector<MeasureSpace> spaces;
    for (std::size_t p = 0; p < cell.choice.size(); ++p) spaces.push_back(meta.catalogs()[p][cell.choice[p]]);
    cell.report = within_space_equilibria(game, JointSpace(game, std::move(spaces)));
    if (const auto* sel = cell.report.selected_equilibrium()) cell.payoffs = sel->payoffs;
    cell.ambiguous = cell.report.ambiguous || !cell.report.selected;
    meta.add_cell(std::move(cell));
  }
  return meta;
}

struct MetaEquilibrium {
  std::vector<std::size_t> choice;
  std::vector<std::string> labels;
  std::vector<Rational> payoffs;
};

// Pure Nash equilibria of the simultaneous choice of measure spaces, in cell order.
inline std::vector<MetaEquilibrium> meta_pure_equilibria(const MetaGame& meta) {
  std::vector<MetaEquilibrium> out;
  auto require = [&](const MetaCell& c) -> const MetaCell& {
    if (c.ambiguous) throw AmbiguityError(meta.cell_name(c.choice));
    return c;
  };
  for (const auto& cell : meta.cells()) {
    const MetaCell& here = require(cell);
    bool stable = true;
    for (std::size_t p = 0; p < meta.catalogs().size() && stable; ++p) {
      std::vector<std::size_t> alt = here.choice;
      for (std::size_t j = 0; j < meta.catalogs()[p].size(); ++j) {
        if (j == here.choice[p]) continue;
        alt[p] = j;
        if (require(meta.cell(alt)).payoffs[p] > here.payoffs[p]) {
          stable = false;
          break;
        }
      }
    }
    if (stable) out.push_back({here.choice, meta.labels(here.choice), here.payoffs});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mixed weightings over an opponent's measure spaces.

struct WeightedSpace {
  MeasureSpace space;
  Rational weight;
};

struct MixedSpaceWeighting {
  PlayerId player;
  std::vector<WeightedSpace> branches;

  void validate() const {
    Rational total;
    for (const auto& b : branches) {
      if (b.weight < Rational(0) || b.weight > Rational(1))
        throw InvalidModel("weight of " + b.space.label + " is " + b.weight.str() + ", outside [0,1]");
      if (b.space.owner != player)
        throw InvalidModel("space " + b.space.label + " is not owned by '" + player + "'");
      total += b.weight;
    }
    if (total != Rational(1)) throw InvalidModel("weights sum to " + total.str() + ", not 1");
  }
};

// Convex combination of the player's expected payoff over the opponent's
// weighted spaces. The player's own parameters are shared by every branch;
// opponent parameters are substituted per branch from `opponent_points`
// (keyed by space label). Zero-weight branches are skipped.
inline MultilinearPoly mixed_space_payoff(const OutcomeGame& game, const MeasureSpace& own,
                                          const MixedSpaceWeighting& weighting,
                                          const std::map<std::string, ParamPoint>& opponent_points) {
  weighting.validate();
  if (own.owner == weighting.player) throw InvalidModel("own space and weighting belong to the same player");
  const std::vector<ParamId> own_params = own.parameters();
  const std::set<ParamId> own_set(own_params.begin(), own_params.end());

  MultilinearPoly total;
  for (const auto& branch : weighting.branches) {
    if (branch.weight.is_zero()) continue;
    const JointSpace joint(game, {own, branch.space});
    ParamPoint fixed;
    if (auto it = opponent_points.find(branch.space.label); it != opponent_points.end()) {
      for (const auto& [id, v] : it->second)
        if (!own_set.contains(id)) fixed.set(id, v);
    }
    MultilinearPoly part = substitute(expected_payoff(game, joint, own.owner), fixed);
    for (const auto& id : part.parameters())
      if (!own_set.contains(id)) throw MissingParameter(id);
    total += part * branch.weight;
  }
  return total;
}

// Same, with one point shared by every branch.
inline MultilinearPoly mixed_space_payoff(const OutcomeGame& game, const MeasureSpace& own,
                                          const MixedSpaceWeighting& weighting, const ParamPoint& opponent_point) {
  std::map<std::string, ParamPoint> points;
  for (const auto& b : weighting.branches) points[b.space.label] = opponent_point;
  return mixed_space_payoff(game, own, weighting, points);
}

enum class EntryDecision { enter, stay_out, indifferent };

inline std::string_view to_string(EntryDecision d) {
  switch (d) {
    case EntryDecision::enter: return "enter";
    case EntryDecision::stay_out: return "stay-out";
    case EntryDecision::indifferent: return "indifferent";
  }
  return "?";
}

// Entrant's best response in the chain store when the monopolist plays
// anti-correlated, independent (fight probability r) and correlated spaces with
// weights a, b, c: stay out iff c + b*r > 1/2.
inline EntryDecision chain_store_threshold(const Rational& a, const Rational& b, const Rational& c, const Rational& r) {
  const std::initializer_list<std::pair<const char*, Rational>> inputs{{"a", a}, {"b", b}, {"c", c}, {"r", r}};
  for (const auto& [name, v] : inputs)
    if (v < Rational(0) || v > Rational(1))
      throw InvalidModel(std::string(name) + " = " + v.str() + " outside [0,1]");
  if (a + b + c != Rational(1)) throw InvalidModel("weights a+b+c sum to " + (a + b + c).str() + ", not 1");
  const auto cmp = c + b * r <=> Rational(1, 2);
  if (cmp > 0) return EntryDecision::stay_out;
  if (cmp < 0) return EntryDecision::enter;
  return EntryDecision::indifferent;
}

// ---------------------------------------------------------------------------
// Grid search oracle, independent of the polynomial machinery.

struct GridOptimum {
  ParamPointF point;               // first optimal grid point, lexicographic
  double value = 0;
  std::size_t optimal_points = 0;  // grid points within 1e-12 of the optimum
  std::size_t evaluations = 0;
};

namespace detail {

// Direct outcome-sum evaluation with parameters addressed by joint index.
class DirectEvaluator {
 public:
  DirectEvaluator(const OutcomeGame& game, const JointSpace& joint, std::string_view player) : joint_(joint) {
    const std::size_t pi = game.player_index(player);
    n_ = game.num_variables();
    for (std::size_t idx = 0; idx < (std::size_t{1} << n_); ++idx)
      payoffs_.push_back(game.payoffs.at(Outcome::from_index(n_, idx))[pi].to_double());
  }

  double operator()(std::span<const double> params) const {
    double total = 0;
    std::vector<Bit> bits(n_);
    for (std::size_t idx = 0; idx < payoffs_.size(); ++idx) {
      for (std::size_t v = 0; v < n_; ++v) bits[v] = static_cast<Bit>((idx >> (n_ - 1 - v)) & 1U);
      double prob = 1;
      for (std::size_t v = 0; v < n_ && prob != 0; ++v) {
        const auto& rule = joint_.rules()[v];
        double one = 0;
        switch (rule.kind) {
          case JointSpace::Kind::copy: one = bits[rule.source]; break;
          case JointSpace::Kind::flip: one = 1 - bits[rule.source]; break;
          case JointSpace::Kind::constant: one = rule.bit; break;
          case JointSpace::Kind::param:
            for (const auto& cls : rule.classes) {
              bool match = true;
              for (const auto& [w, b] : cls.when) match = match && bits[w] == b;
              if (match) {
                one = params[cls.param];
                break;
              }
            }
            break;
        }
        prob *= bits[v] ? one : 1 - one;
      }
      total += prob * payoffs_[idx];
    }
    return total;
  }

 private:
  const JointSpace& joint_;
  std::size_t n_ = 0;
  std::vector<double> payoffs_;
};

}  // namespace detail

// Exhaustive maximum of the player's payoff over a regular grid of its own
// parameters, opponent parameters fixed.
inline GridOptimum grid_oracle(const OutcomeGame& game, const JointSpace& joint, std::string_view player,
                               const ParamPointF& fixed, double step = 0.01) {
  const std::size_t pi = game.player_index(player);
  const double cells = std::round(1.0 / step);
  if (!(step > 0) || std::abs(cells * step - 1.0) > 1e-9) throw InvalidModel("grid step must divide 1 evenly");
  const auto n = static_cast<std::size_t>(cells);

  const auto& params = joint.parameters();
  std::vector<double> values(params.size(), 0.0);
  std::vector<std::size_t> own;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (joint.player_of_parameter(i) == pi) own.push_back(i);
    else values[i] = fixed.at(params[i]);
  }
  double total_points = std::pow(static_cast<double>(n + 1), static_cast<double>(own.size()));
  if (total_points > 5e7) throw InvalidModel("grid too large");

  const detail::DirectEvaluator evaluate(game, joint, player);
  GridOptimum best;
  std::vector<std::size_t> counter(own.size(), 0);
  bool have = false;
  while (true) {
    for (std::size_t j = 0; j < own.size(); ++j) values[own[j]] = static_cast<double>(counter[j]) / cells;
    const double v = evaluate(values);
    ++best.evaluations;
    if (!have || v > best.value + 1e-12) {
      have = true;
      best.value = v;
      best.optimal_points = 0;
      best.point = ParamPointF();
      for (std::size_t j = 0; j < own.size(); ++j) best.point.set(params[own[j]], values[own[j]]);
    }
    if (std::abs(v - best.value) <= 1e-12) ++best.optimal_points;
    std::size_t j = own.size();
    while (j > 0 && counter[j - 1] == n) counter[--j] = 0;
    if (j == 0) break;
    ++counter[j - 1];
  }
  return best;
}

}  // namespace varopt
