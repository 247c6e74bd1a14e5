#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "varopt/bundled.hpp"
#include "varopt/equilibria.hpp"

using namespace varopt;

namespace {

JointSpace joint(const GameFile& f, const char* a, const char* b) { return JointSpace(f.game, {f.space(a), f.space(b)}); }

Outcome out(std::initializer_list<Bit> bits) { return Outcome{std::vector<Bit>(bits)}; }

std::vector<Rational> pay(Rational::int_type a, Rational::int_type b) { return {Rational(a), Rational(b)}; }

// Coordination game with two strict equilibria of different value.
GameFile coordination() {
  GameFile f;
  f.game = {"coordination",
            {"X", "Y"},
            {{"x", "X", 1}, {"y", "Y", 2}},
            {{out({0, 0}), pay(1, 1)}, {out({0, 1}), pay(0, 0)}, {out({1, 0}), pay(0, 0)}, {out({1, 1}), pay(2, 2)}}};
  f.spaces = {{"X0", "X", {{"x", ParamRule{{{{}, "p"}}}}}}, {"Yu", "Y", {{"y", ParamRule{{{{}, "q"}}}}}}};
  return f;
}

std::vector<std::pair<GameFile, std::vector<MeasureSpace>>> all_catalog_joints() {
  std::vector<std::pair<GameFile, std::vector<MeasureSpace>>> out;
  for (const auto& f : {bundled::chain_store(), bundled::example_game()}) {
    for (const auto& s : oracle::catalog_products(f.catalogs())) out.emplace_back(f, s);
    std::vector<std::vector<MeasureSpace>> std_cats;
    for (const auto& p : f.game.players) std_cats.push_back(standard_catalog(f.game, p));
    for (const auto& s : oracle::catalog_products(std_cats)) out.emplace_back(f, s);
  }
  return out;
}

// Brute-force grid over own parameters using the tree oracle.
std::pair<double, std::vector<ParamPointF>> tree_grid_best(const GameFile& f, const std::vector<MeasureSpace>& spaces,
                                                           const std::string& player, const std::vector<ParamId>& own,
                                                           const ParamPointF& fixed, int cells) {
  double best = -1e300;
  std::vector<ParamPointF> argmax;
  const std::size_t total = static_cast<std::size_t>(std::pow(cells + 1, own.size()));
  for (std::size_t idx = 0; idx < total; ++idx) {
    ParamPointF point = fixed;
    std::size_t rest = idx;
    for (const auto& id : own) {
      point.set(id, static_cast<double>(rest % (cells + 1)) / cells);
      rest /= cells + 1;
    }
    const double v = oracle::tree_expected_payoff(f.game, spaces, player, point);
    if (v > best + 1e-12) {
      best = v;
      argmax.clear();
    }
    if (std::abs(v - best) <= 1e-12) argmax.push_back(point);
  }
  return {best, argmax};
}

}  // namespace

TEST(BestResponse, ChainStoreExamples) {
  const auto cs = bundled::chain_store();
  const auto j = joint(cs, "X0", "Y0");
  const auto y = best_response(cs.game, j, "Y", ParamPoint{{"p", 1}});
  EXPECT_EQ(y.parameters, (std::vector<ParamId>{"q", "r"}));
  ASSERT_FALSE(y.maximizers.empty());
  for (const auto& m : y.maximizers) EXPECT_EQ(m.at("r"), Rational(0));
  EXPECT_EQ(y.indifferent, std::vector<ParamId>{"q"});
  EXPECT_EQ(y.value, Rational(0));

  const auto x = best_response(cs.game, j, "X", ParamPoint{{"q", Rational(1, 2)}, {"r", 0}});
  ASSERT_EQ(x.maximizers.size(), 1U);
  EXPECT_EQ(x.maximizers[0].at("p"), Rational(1));
  EXPECT_TRUE(x.indifferent.empty());
}

TEST(BestResponse, ExampleGameIndifference) {
  const auto ex = bundled::example_game();
  const auto j = joint(ex, "X0", "Y0");
  const auto spaces = j.spaces();

  const auto at0 = best_response(ex.game, j, "Y", ParamPoint{{"p", 0}});
  for (const auto& m : at0.maximizers) EXPECT_EQ(m.at("q"), Rational(1));
  EXPECT_EQ(at0.indifferent, std::vector<ParamId>{"r"});
  const auto [v0, grid0] = tree_grid_best(ex, spaces, "Y", {"q", "r"}, ParamPointF{{"p", 0.0}}, 100);
  EXPECT_NEAR(v0, at0.value.to_double(), 1e-12);
  EXPECT_EQ(grid0.size(), 101U);  // q = 1, any r
  for (const auto& g : grid0) EXPECT_EQ(g.at("q"), 1.0);

  const auto at1 = best_response(ex.game, j, "Y", ParamPoint{{"p", 1}});
  for (const auto& m : at1.maximizers) EXPECT_EQ(m.at("r"), Rational(0));
  EXPECT_EQ(at1.indifferent, std::vector<ParamId>{"q"});
  const auto [v1, grid1] = tree_grid_best(ex, spaces, "Y", {"q", "r"}, ParamPointF{{"p", 1.0}}, 100);
  EXPECT_NEAR(v1, at1.value.to_double(), 1e-12);
  EXPECT_EQ(grid1.size(), 101U);  // r = 0, any q
  for (const auto& g : grid1) EXPECT_EQ(g.at("r"), 0.0);

  const auto lib1 = grid_oracle(ex.game, j, "Y", ParamPointF{{"p", 1.0}});
  EXPECT_EQ(lib1.optimal_points, 101U);
  EXPECT_EQ(lib1.point.at("r"), 0.0);
  EXPECT_NEAR(lib1.value, 4.0, 1e-12);
}

TEST(BestResponse, Errors) {
  const auto cs = bundled::chain_store();
  const auto j = joint(cs, "X0", "Y0");
  EXPECT_THROW(static_cast<void>(best_response(cs.game, j, "Y", ParamPoint{})), MissingParameter);
  EXPECT_THROW(static_cast<void>(best_response(cs.game, j, "Y", ParamPoint{{"p", 1}, {"q", 0}})), InvalidModel);
  EXPECT_THROW(static_cast<void>(best_response(cs.game, j, "Y", ParamPoint{{"p", 1}, {"s", 0}})), InvalidModel);
  EXPECT_THROW(static_cast<void>(best_response(cs.game, j, "Z", ParamPoint{})), InvalidModel);
}

TEST(WithinSpace, ChainStore) {
  const auto cs = bundled::chain_store();
  struct Want {
    const char* y;
    ParamPoint point;
    std::vector<Rational> payoffs;
    Outcome outcome;
  };
  const std::vector<Want> wants{{"Y0", ParamPoint{{"p", 1}, {"r", 0}}, pay(1, 0), out({1, 0})},
                                {"Y+", ParamPoint{{"p", 0}}, pay(0, 1), out({0, 0})},
                                {"Y-", ParamPoint{{"p", 1}}, pay(1, 0), out({1, 0})}};
  for (const auto& w : wants) {
    const auto report = within_space_equilibria(cs.game, joint(cs, "X0", w.y));
    ASSERT_NE(report.selected_equilibrium(), nullptr) << w.y;
    const auto& sel = *report.selected_equilibrium();
    EXPECT_FALSE(report.ambiguous) << w.y;
    for (const auto& [id, value] : w.point) EXPECT_EQ(sel.point.at(id), value) << w.y << " " << id;
    EXPECT_EQ(sel.payoffs, w.payoffs) << w.y;
    EXPECT_EQ(sel.outcome, w.outcome) << w.y;
    EXPECT_TRUE(sel.tie_break_consistent);
  }
  const auto y0 = within_space_equilibria(cs.game, joint(cs, "X0", "Y0"));
  EXPECT_EQ(format_point(y0.selected_equilibrium()->point, y0.effective_parameters), "(p,r)=(1,0)");
  EXPECT_EQ(y0.effective_parameters, (std::vector<ParamId>{"p", "r"}));
}

TEST(WithinSpace, ExampleGame) {
  const auto ex = bundled::example_game();
  const auto y1 = within_space_equilibria(ex.game, joint(ex, "X0", "Y1"));
  ASSERT_NE(y1.selected_equilibrium(), nullptr);
  EXPECT_EQ(y1.selected_equilibrium()->point.at("p"), Rational(1));
  EXPECT_EQ(y1.selected_equilibrium()->payoffs, pay(4, 3));

  const auto y0 = within_space_equilibria(ex.game, joint(ex, "X0", "Y0"));
  ASSERT_NE(y0.selected_equilibrium(), nullptr);
  EXPECT_EQ(y0.selected_equilibrium()->outcome, out({0, 1}));
  EXPECT_EQ(y0.selected_equilibrium()->payoffs, pay(2, 2));
  EXPECT_FALSE(y0.ambiguous);
}

TEST(WithinSpace, AmbiguousCoordination) {
  const auto f = coordination();
  const auto report = within_space_equilibria(f.game, joint(f, "X0", "Yu"));
  ASSERT_EQ(report.equilibria.size(), 2U);
  EXPECT_TRUE(report.ambiguous);
  EXPECT_EQ(report.equilibria[0].payoffs, pay(1, 1));
  EXPECT_EQ(report.equilibria[1].payoffs, pay(2, 2));
}

TEST(WithinSpace, NoPureEquilibriumIsAFinding) {
  // Matching pennies with simultaneous-style spaces.
  GameFile f = coordination();
  f.game.payoffs = {{out({0, 0}), pay(1, -1)}, {out({0, 1}), pay(-1, 1)}, {out({1, 0}), pay(-1, 1)},
                    {out({1, 1}), pay(1, -1)}};
  const auto report = within_space_equilibria(f.game, joint(f, "X0", "Yu"));
  EXPECT_TRUE(report.equilibria.empty());
  EXPECT_EQ(report.selected_equilibrium(), nullptr);
  const auto meta = build_meta_game(f.game, {{f.space("X0")}, {f.space("Yu")}});
  EXPECT_TRUE(meta.cells()[0].ambiguous);
}

// Every reported point survives a re-check against the tree oracle.
TEST(WithinSpace, EquilibriaAreMutualBestResponses) {
  for (const auto& [f, spaces] : all_catalog_joints()) {
    const JointSpace j(f.game, spaces);
    const auto report = within_space_equilibria(f.game, j);
    ASSERT_FALSE(report.equilibria.empty()) << j.label();
    if (report.selected) {
      const auto& sel = report.equilibria[*report.selected];
      EXPECT_NE(std::find_if(report.equilibria.begin(), report.equilibria.end(),
                             [&](const Equilibrium& e) { return e.point == sel.point; }),
                report.equilibria.end());
    }
    for (const auto& eq : report.equilibria) {
      for (std::size_t pi = 0; pi < f.game.players.size(); ++pi) {
        const auto& player = f.game.players[pi];
        const Rational here = oracle::tree_expected_payoff(f.game, spaces, player, eq.point);
        EXPECT_EQ(here, eq.payoffs[pi]);
        const auto own = j.parameters_of(pi);
        for (std::size_t mask = 0; mask < (std::size_t{1} << own.size()); ++mask) {
          ParamPoint dev = eq.point;
          for (std::size_t i = 0; i < own.size(); ++i) dev.set(own[i], Rational(static_cast<int>((mask >> i) & 1U)));
          EXPECT_LE(oracle::tree_expected_payoff(f.game, spaces, player, dev), here) << j.label();
        }
      }
    }
  }
}

TEST(WithinSpace, MatchesBackwardInductionOnIndependentSpace) {
  for (const auto& f : {bundled::chain_store(), bundled::example_game()}) {
    const auto bi = backward_induction(f.game);
    const auto report = within_space_equilibria(f.game, joint(f, "X0", "Y0"));
    ASSERT_NE(report.selected_equilibrium(), nullptr);
    EXPECT_EQ(report.selected_equilibrium()->payoffs, bi.payoffs) << f.game.name;
    EXPECT_EQ(report.selected_equilibrium()->outcome, bi.profile) << f.game.name;
  }
}

TEST(MetaGame, ChainStore) {
  const auto cs = bundled::chain_store();
  const auto meta = build_meta_game(cs.game, {{cs.space("X0")}, {cs.space("Y-"), cs.space("Y0"), cs.space("Y+")}});
  ASSERT_EQ(meta.cells().size(), 3U);
  EXPECT_EQ(meta.cells()[0].payoffs, pay(1, 0));
  EXPECT_EQ(meta.cells()[1].payoffs, pay(1, 0));
  EXPECT_EQ(meta.cells()[2].payoffs, pay(0, 1));
  const auto eqs = meta_pure_equilibria(meta);
  ASSERT_EQ(eqs.size(), 1U);
  EXPECT_EQ(eqs[0].labels, (std::vector<std::string>{"X0", "Y+"}));
  EXPECT_EQ(eqs[0].payoffs, pay(0, 1));
}

TEST(MetaGame, ExampleGame) {
  const auto ex = bundled::example_game();
  const auto meta = build_meta_game(ex.game, ex.catalogs());
  ASSERT_EQ(meta.cells().size(), 2U);
  EXPECT_EQ(meta.cells()[0].payoffs, pay(2, 2));
  EXPECT_EQ(meta.cells()[1].payoffs, pay(4, 3));
  // Exhaustive comparison: Y picks the column with the larger Y payoff.
  const std::size_t best = meta.cells()[1].payoffs[1] > meta.cells()[0].payoffs[1] ? 1 : 0;
  const auto eqs = meta_pure_equilibria(meta);
  ASSERT_EQ(eqs.size(), 1U);
  EXPECT_EQ(eqs[0].choice, (std::vector<std::size_t>{0, best}));
  EXPECT_EQ(eqs[0].labels, (std::vector<std::string>{"X0", "Y1"}));
  EXPECT_EQ(eqs[0].payoffs, pay(4, 3));
}

TEST(MetaGame, SingletonMatchesWithinSpace) {
  const auto cs = bundled::chain_store();
  const auto meta = build_meta_game(cs.game, {{cs.space("X0")}, {cs.space("Y0")}});
  ASSERT_EQ(meta.cells().size(), 1U);
  const auto report = within_space_equilibria(cs.game, joint(cs, "X0", "Y0"));
  EXPECT_EQ(meta.cells()[0].payoffs, report.selected_equilibrium()->payoffs);
  const auto eqs = meta_pure_equilibria(meta);
  ASSERT_EQ(eqs.size(), 1U);
  EXPECT_EQ(eqs[0].payoffs, pay(1, 0));
}

TEST(MetaGame, PermutationStable) {
  const auto cs = bundled::chain_store();
  std::vector<MeasureSpace> ys{cs.space("Y-"), cs.space("Y0"), cs.space("Y+")};
  std::map<std::string, std::vector<Rational>> reference;
  const auto original = build_meta_game(cs.game, {{cs.space("X0")}, ys});
  for (const auto& c : original.cells())
    reference[ys[c.choice[1]].label] = c.payoffs;
  std::sort(ys.begin(), ys.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  do {
    const auto meta = build_meta_game(cs.game, {{cs.space("X0")}, ys});
    for (const auto& c : meta.cells()) EXPECT_EQ(c.payoffs, reference.at(meta.labels(c.choice)[1]));
    const auto eqs = meta_pure_equilibria(meta);
    ASSERT_EQ(eqs.size(), 1U);
    EXPECT_EQ(eqs[0].labels[1], "Y+");
  } while (std::next_permutation(ys.begin(), ys.end(),
                                 [](const auto& a, const auto& b) { return a.label < b.label; }));
}

TEST(MetaGame, AmbiguousCellBlocks) {
  const auto f = coordination();
  const auto meta = build_meta_game(f.game, {{f.space("X0")}, {f.space("Yu")}});
  EXPECT_TRUE(meta.cells()[0].ambiguous);
  EXPECT_EQ(meta.cells()[0].report.equilibria.size(), 2U);
  try {
    static_cast<void>(meta_pure_equilibria(meta));
    FAIL() << "expected AmbiguityError";
  } catch (const AmbiguityError& e) {
    EXPECT_EQ(e.cell(), "(X0,Yu)");
  }
}

TEST(MetaGame, Errors) {
  const auto cs = bundled::chain_store();
  EXPECT_THROW(static_cast<void>(build_meta_game(cs.game, {{cs.space("X0")}, {}})), InvalidModel);
  EXPECT_THROW(static_cast<void>(build_meta_game(cs.game, {{cs.space("X0")}})), InvalidModel);
  EXPECT_THROW(static_cast<void>(build_meta_game(cs.game, {{cs.space("Y0")}, {cs.space("X0")}})), InvalidModel);
}

namespace {

MixedSpaceWeighting chain_weighting(const GameFile& cs, Rational a, Rational b, Rational c) {
  return {"Y", {{cs.space("Y-"), a}, {cs.space("Y0"), b}, {cs.space("Y+"), c}}};
}

}  // namespace

TEST(MixedSpace, ChainStoreExamples) {
  const auto cs = bundled::chain_store();
  const auto p = MultilinearPoly::variable("p");
  const auto r = MultilinearPoly::variable("r");
  EXPECT_EQ(mixed_space_payoff(cs.game, cs.space("X0"), chain_weighting(cs, 0, 0, 1), ParamPoint{}), -p);
  for (int k = 0; k <= 4; ++k) {
    const Rational rv(k, 4);
    const auto got = mixed_space_payoff(cs.game, cs.space("X0"), chain_weighting(cs, 0, 1, 0), ParamPoint{{"r", rv}});
    EXPECT_EQ(got, substitute(p * (MultilinearPoly(1) - Rational(2) * r), ParamPoint{{"r", rv}}));
  }
}

TEST(MixedSpace, MatchesDirectSummation) {
  const auto cs = bundled::chain_store();
  const auto& x0 = cs.space("X0");
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> k(0, 20);
  for (int i = 0; i < 100; ++i) {
    const Rational a(k(rng), 20);
    const Rational b = (Rational(1) - a) * Rational(k(rng), 20);
    const Rational c = Rational(1) - a - b;
    const Rational r(k(rng), 20);
    const Rational pv(k(rng), 20);
    const auto w = chain_weighting(cs, a, b, c);
    const auto poly = mixed_space_payoff(cs.game, x0, w, ParamPoint{{"q", Rational(1, 3)}, {"r", r}});
    EXPECT_EQ(poly.parameters(), poly.is_zero() ? std::vector<ParamId>{} : std::vector<ParamId>{"p"});
    Rational direct;
    for (const auto& branch : w.branches) {
      const ParamPoint point{{"p", pv}, {"q", Rational(1, 3)}, {"r", r}};
      direct += branch.weight * oracle::tree_expected_payoff(cs.game, {x0, branch.space}, "X", point);
    }
    EXPECT_EQ(eval(poly, ParamPoint{{"p", pv}}), direct);
    EXPECT_EQ(eval(poly, ParamPoint{{"p", pv}}), pv * (Rational(1) - Rational(2) * c - Rational(2) * b * r));
  }
}

TEST(MixedSpace, Errors) {
  const auto cs = bundled::chain_store();
  const auto& x0 = cs.space("X0");
  EXPECT_THROW(static_cast<void>(mixed_space_payoff(cs.game, x0, chain_weighting(cs, Rational(1, 2), 0, 0), ParamPoint{})),
               InvalidModel);
  EXPECT_THROW(static_cast<void>(mixed_space_payoff(cs.game, x0, chain_weighting(cs, 2, -1, 0), ParamPoint{})),
               InvalidModel);
  EXPECT_THROW(static_cast<void>(mixed_space_payoff(cs.game, x0, chain_weighting(cs, 0, 1, 0), ParamPoint{})),
               MissingParameter);
  EXPECT_NO_THROW(static_cast<void>(mixed_space_payoff(cs.game, x0, chain_weighting(cs, 1, 0, 0), ParamPoint{})));
  MixedSpaceWeighting wrong{"X", {{x0, 1}}};
  EXPECT_THROW(static_cast<void>(mixed_space_payoff(cs.game, x0, wrong, ParamPoint{})), InvalidModel);
}

TEST(Threshold, Examples) {
  for (int k = 0; k <= 10; ++k)
    EXPECT_EQ(chain_store_threshold(0, 0, 1, Rational(k, 10)), EntryDecision::stay_out);
  EXPECT_EQ(chain_store_threshold(1, 0, 0, Rational(1, 2)), EntryDecision::enter);
  EXPECT_EQ(chain_store_threshold(0, 1, 0, Rational(1, 2)), EntryDecision::indifferent);
  EXPECT_EQ(to_string(EntryDecision::stay_out), "stay-out");
}

TEST(Threshold, Errors) {
  EXPECT_THROW(static_cast<void>(chain_store_threshold(Rational(1, 2), 0, 0, 0)), InvalidModel);
  EXPECT_THROW(static_cast<void>(chain_store_threshold(2, -1, 0, 0)), InvalidModel);
  EXPECT_THROW(static_cast<void>(chain_store_threshold(1, 0, 0, Rational(3, 2))), InvalidModel);
}

TEST(Threshold, AgreesWithMixedSpaceDerivative) {
  const auto cs = bundled::chain_store();
  for (int ai = 0; ai <= 20; ++ai) {
    for (int bi = 0; ai + bi <= 20; ++bi) {
      const Rational a(ai, 20), b(bi, 20), c(20 - ai - bi, 20);
      for (int ri = 0; ri <= 20; ri += 5) {
        const Rational r(ri, 20);
        const auto poly = mixed_space_payoff(cs.game, cs.space("X0"), chain_weighting(cs, a, b, c), ParamPoint{{"r", r}});
        const Rational slope = partial(poly, "p").constant_term();
        const auto want = slope > Rational(0)   ? EntryDecision::enter
                          : slope < Rational(0) ? EntryDecision::stay_out
                                                : EntryDecision::indifferent;
        EXPECT_EQ(chain_store_threshold(a, b, c, r), want);
      }
    }
  }
}

TEST(GridOracle, ConstantPayoffMakesEveryPointOptimal) {
  auto f = bundled::chain_store();
  f.spaces.push_back({"Xs", "X", {{"x", ConstRule{0}}}});
  const auto g = grid_oracle(f.game, joint(f, "Xs", "Y0"), "Y", ParamPointF{});
  EXPECT_EQ(g.evaluations, 101U * 101U);
  EXPECT_EQ(g.optimal_points, g.evaluations);
  EXPECT_DOUBLE_EQ(g.value, 1.0);
}

TEST(GridOracle, StepMustDivideOne) {
  const auto cs = bundled::chain_store();
  EXPECT_THROW(static_cast<void>(grid_oracle(cs.game, joint(cs, "X0", "Y0"), "X", ParamPointF{{"q", 0}, {"r", 0}}, 0.3)),
               InvalidModel);
  EXPECT_THROW(static_cast<void>(grid_oracle(cs.game, joint(cs, "X0", "Y0"), "X", ParamPointF{{"q", 0}})),
               MissingParameter);
}

TEST(GridOracle, AgreesWithTreeGrid) {
  const auto cs = bundled::chain_store();
  const auto j = joint(cs, "X0", "Y0");
  const ParamPointF fixed{{"p", 0.37}};
  const auto lib = grid_oracle(cs.game, j, "Y", fixed, 0.05);
  const auto [v, argmax] = tree_grid_best(cs, j.spaces(), "Y", {"q", "r"}, fixed, 20);
  EXPECT_NEAR(lib.value, v, 1e-12);
  EXPECT_EQ(lib.optimal_points, argmax.size());
}

// The best vertex is as good as the best grid point.
TEST(GridOracle, VertexSufficiency) {
  std::mt19937_64 rng(13);
  for (const auto& [f, spaces] : all_catalog_joints()) {
    const JointSpace j(f.game, spaces);
    for (std::size_t pi = 0; pi < f.game.players.size(); ++pi) {
      const auto& player = f.game.players[pi];
      std::vector<ParamId> opp;
      for (std::size_t q = 0; q < f.game.players.size(); ++q)
        if (q != pi)
          for (const auto& id : j.parameters_of(q)) opp.push_back(id);
      for (int s = 0; s < 100; ++s) {
        const auto fixed = oracle::random_point<Rational>(rng, opp);
        const auto br = best_response(f.game, j, player, fixed);
        const auto grid = grid_oracle(f.game, j, player, to_double(fixed));
        EXPECT_NEAR(grid.value, br.value.to_double(), 1e-9) << j.label() << " " << player;
      }
    }
  }
}

TEST(GridOracle, RandomGamesVertexSufficiency) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = oracle::random_game(rng, 2 + trial % 2);
    std::vector<std::vector<MeasureSpace>> cats;
    for (const auto& p : g.players) cats.push_back(standard_catalog(g, p));
    for (const auto& spaces : oracle::catalog_products(cats)) {
      const JointSpace j(g, spaces);
      for (std::size_t pi = 0; pi < g.players.size(); ++pi) {
        if (j.parameters_of(pi).size() > 3) continue;
        std::vector<ParamId> opp;
        for (std::size_t q = 0; q < g.players.size(); ++q)
          if (q != pi)
            for (const auto& id : j.parameters_of(q)) opp.push_back(id);
        const auto fixed = oracle::random_point<Rational>(rng, opp, 10);
        const auto br = best_response(g, j, g.players[pi], fixed);
        const auto grid = grid_oracle(g, j, g.players[pi], to_double(fixed), 0.1);
        EXPECT_NEAR(grid.value, br.value.to_double(), 1e-9);
      }
    }
  }
}
