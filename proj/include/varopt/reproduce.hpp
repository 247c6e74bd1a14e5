#pragma once

// Golden checks over the two bundled games: expected-payoff polynomials,
// gradients, correlations, within-space equilibria, the meta-game over
// measure spaces, and the chain-store entry threshold.

#include <string>
#include <string_view>
#include <vector>

#include "varopt/bundled.hpp"
#include "varopt/equilibria.hpp"
#include "varopt/game.hpp"
#include "varopt/measure_space.hpp"
#include "varopt/payoff.hpp"
#include "varopt/polynomial.hpp"

namespace varopt {

struct Check {
  std::string id;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline MultilinearPoly var(const char* id) { return MultilinearPoly::variable(id); }
inline MultilinearPoly num(Rational::int_type v) { return MultilinearPoly(Rational(v)); }

inline JointSpace joint_of(const GameFile& f, std::string_view a, std::string_view b) {
  return JointSpace(f.game, {f.space(a), f.space(b)});
}

inline Check poly_check(std::string id, const MultilinearPoly& got, const MultilinearPoly& want) {
  const bool ok = got == want;
  return {std::move(id), ok, ok ? to_string(got) : "got " + to_string(got) + ", want " + to_string(want)};
}

inline Check equilibrium_check(const GameFile& f, std::string id, std::string_view own, std::string_view opp,
                               const std::string& want_point, const std::string& want_outcome,
                               const std::vector<Rational>& want_payoffs) {
  const auto report = within_space_equilibria(f.game, joint_of(f, own, opp));
  const Equilibrium* sel = report.selected_equilibrium();
  if (!sel) return {std::move(id), false, "no equilibrium"};
  const std::string point = format_point(sel->point, report.effective_parameters);
  const std::string outcome = format_outcome(f.game, sel->outcome);
  const std::string detail = point + " " + outcome + " payoffs " + format_vector(sel->payoffs);
  const bool ok = !report.ambiguous && point == want_point && outcome == want_outcome && sel->payoffs == want_payoffs;
  return {std::move(id), ok, ok ? detail : "got " + detail + ", want " + want_point + " " + want_outcome};
}

inline Check meta_check(const GameFile& f, std::string id, const std::vector<std::vector<Rational>>& want_cells,
                        const std::string& want_profile, const std::vector<Rational>& want_payoffs) {
  const MetaGame meta = build_meta_game(f.game, f.catalogs());
  std::string cells;
  bool ok = meta.cells().size() == want_cells.size();
  for (std::size_t i = 0; i < meta.cells().size(); ++i) {
    const auto& c = meta.cells()[i];
    cells += (i ? " " : "") + meta.cell_name(c.choice) + "=" + format_vector(c.payoffs);
    ok = ok && !c.ambiguous && i < want_cells.size() && c.payoffs == want_cells[i];
  }
  const auto eqs = meta_pure_equilibria(meta);
  ok = ok && eqs.size() == 1 && meta.cell_name(eqs.front().choice) == want_profile &&
       eqs.front().payoffs == want_payoffs;
  std::string found;
  for (const auto& e : eqs) found += " " + meta.cell_name(e.choice) + format_vector(e.payoffs);
  return {std::move(id), ok, cells + "; equilibria:" + found};
}

inline std::vector<Check> chain_store_checks() {
  const GameFile f = bundled::chain_store();
  const auto p = var("p");
  const auto r = var("r");
  std::vector<Check> out;

  out.push_back({"chainstore.validate", validate_game(f.game).empty(),
                 std::to_string(f.game.num_variables()) + " variables, " + std::to_string(f.game.payoffs.size()) +
                     " payoff rows, " + std::to_string(f.spaces.size()) + " spaces"});

  const auto j00 = joint_of(f, "X0", "Y0");
  const auto j0p = joint_of(f, "X0", "Y+");
  const auto j0m = joint_of(f, "X0", "Y-");
  const auto x00 = expected_payoff(f.game, j00, "X");
  const auto y00 = expected_payoff(f.game, j00, "Y");
  const auto x0p = expected_payoff(f.game, j0p, "X");
  const auto x0m = expected_payoff(f.game, j0m, "X");
  out.push_back(poly_check("chainstore.payoff.X.X0xY0", x00, p * (num(1) - Rational(2) * r)));
  out.push_back(poly_check("chainstore.payoff.Y.X0xY0", y00, num(1) - p - p * r));
  out.push_back(poly_check("chainstore.payoff.X.X0xY+", x0p, -p));
  out.push_back(poly_check("chainstore.payoff.Y.X0xY+", expected_payoff(f.game, j0p, "Y"), num(1) - Rational(2) * p));
  out.push_back(poly_check("chainstore.payoff.X.X0xY-", x0m, p));
  out.push_back(poly_check("chainstore.payoff.Y.X0xY-", expected_payoff(f.game, j0m, "Y"), num(1) - p));

  out.push_back(poly_check("chainstore.grad.dX/dp.X0xY0", partial(x00, "p"), num(1) - Rational(2) * r));
  out.push_back(poly_check("chainstore.grad.dY/dr.X0xY0", partial(y00, "r"), -p));
  out.push_back(poly_check("chainstore.grad.dX/dp.X0xY+", partial(x0p, "p"), num(-1)));
  out.push_back(poly_check("chainstore.grad.dX/dp.X0xY-", partial(x0m, "p"), num(1)));

  const auto bi = backward_induction(f.game);
  {
    const std::string got = format_outcome(f.game, bi.profile) + " payoffs " + format_vector(bi.payoffs);
    out.push_back({"chainstore.backward_induction", got == "(x,y)=(1,0) payoffs (1,0)", got});
  }
  out.push_back(equilibrium_check(f, "chainstore.eq.X0xY0", "X0", "Y0", "(p,r)=(1,0)", "(x,y)=(1,0)", {1, 0}));
  out.push_back(equilibrium_check(f, "chainstore.eq.X0xY+", "X0", "Y+", "(p)=(0)", "(x,y)=(0,0)", {0, 1}));
  out.push_back(equilibrium_check(f, "chainstore.eq.X0xY-", "X0", "Y-", "(p)=(1)", "(x,y)=(1,0)", {1, 0}));
  out.push_back(meta_check(f, "chainstore.meta", {{1, 0}, {1, 0}, {0, 1}}, "(X0,Y+)", {0, 1}));

  // Mixed weighting over Y-, Y0, Y+ with weights a, b, c.
  {
    const auto& own = f.space("X0");
    std::size_t agree = 0, total = 0, stay_out = 0, indifferent = 0;
    for (int ai = 0; ai <= 20; ++ai) {
      for (int bi2 = 0; ai + bi2 <= 20; ++bi2) {
        const Rational a(ai, 20), b(bi2, 20), c(20 - ai - bi2, 20);
        MixedSpaceWeighting w{"Y", {{f.space("Y-"), a}, {f.space("Y0"), b}, {f.space("Y+"), c}}};
        for (int ri = 0; ri <= 20; ++ri) {
          const Rational rv(ri, 20);
          const auto slope = eval(partial(mixed_space_payoff(f.game, own, w, ParamPoint{{"r", rv}}), "p"), ParamPoint{});
          const EntryDecision d = chain_store_threshold(a, b, c, rv);
          const EntryDecision by_slope = slope.sign() > 0   ? EntryDecision::enter
                                         : slope.sign() < 0 ? EntryDecision::stay_out
                                                            : EntryDecision::indifferent;
          agree += d == by_slope ? 1 : 0;
          stay_out += d == EntryDecision::stay_out ? 1 : 0;
          indifferent += d == EntryDecision::indifferent ? 1 : 0;
          ++total;
        }
      }
    }
    out.push_back({"chainstore.threshold.grid", agree == total,
                   std::to_string(agree) + "/" + std::to_string(total) + " agree; " + std::to_string(stay_out) +
                       " stay-out, " + std::to_string(indifferent) + " indifferent"});
    const auto c1 = chain_store_threshold(0, 0, 1, Rational(3, 10));
    out.push_back({"chainstore.threshold.c=1", c1 == EntryDecision::stay_out, std::string(to_string(c1))});
    const auto a1 = chain_store_threshold(1, 0, 0, Rational(3, 10));
    out.push_back({"chainstore.threshold.a=1", a1 == EntryDecision::enter, std::string(to_string(a1))});
    const auto b1 = chain_store_threshold(0, 1, 0, Rational(1, 2));
    out.push_back({"chainstore.threshold.b=1,r=1/2", b1 == EntryDecision::indifferent, std::string(to_string(b1))});
  }
  return out;
}

inline std::vector<Check> example_checks() {
  const GameFile f = bundled::example_game();
  const auto p = var("p");
  const auto q = var("q");
  const auto r = var("r");
  std::vector<Check> out;

  out.push_back({"example.validate", validate_game(f.game).empty(),
                 std::to_string(f.game.num_variables()) + " variables, " + std::to_string(f.game.payoffs.size()) +
                     " payoff rows, " + std::to_string(f.spaces.size()) + " spaces"});

  const auto j00 = joint_of(f, "X0", "Y0");
  const auto j01 = joint_of(f, "X0", "Y1");
  const auto x00 = expected_payoff(f.game, j00, "X");
  const auto y00 = expected_payoff(f.game, j00, "Y");
  const auto x01 = expected_payoff(f.game, j01, "X");
  out.push_back(poly_check("example.payoff.X.X0xY0", x00, num(3) - q + p * (q + Rational(3) * r - num(2))));
  out.push_back(poly_check("example.payoff.Y.X0xY0", y00, num(1) + q - p * (q + r - num(3))));
  out.push_back(poly_check("example.payoff.X.X0xY1", x01, num(3) + p));
  out.push_back(poly_check("example.payoff.Y.X0xY1", expected_payoff(f.game, j01, "Y"), num(1) + Rational(2) * p));

  out.push_back(poly_check("example.grad.dX/dp.X0xY0", partial(x00, "p"), q + Rational(3) * r - num(2)));
  out.push_back(poly_check("example.grad.dY/dq.X0xY0", partial(y00, "q"), num(1) - p));
  out.push_back(poly_check("example.grad.dY/dr.X0xY0", partial(y00, "r"), -p));
  out.push_back(poly_check("example.grad.dX/dp.X0xY1", partial(x01, "p"), num(1)));

  {
    bool ok = true;
    std::string detail;
    for (int i = 1; i <= 9; ++i) {
      const Rational pv(i, 10);
      ok = ok && correlation_exact(j00, ParamPoint{{"p", pv}, {"q", 0}, {"r", 1}}, "x", "y") == Rational(1);
      ok = ok && correlation_exact(j00, ParamPoint{{"p", pv}, {"q", 1}, {"r", 0}}, "x", "y") == Rational(-1);
      ok = ok && correlation_exact(j00, ParamPoint{{"p", pv}, {"q", Rational(3, 10)}, {"r", Rational(3, 10)}}, "x",
                                   "y") == Rational(0);
    }
    for (int e : {0, 1})
      ok = ok && correlation_exact(j00, ParamPoint{{"p", e}, {"q", 0}, {"r", 1}}, "x", "y") == Rational(0);
    out.push_back({"example.correlation", ok, "rho(p,0,1)=1, rho(p,1,0)=-1, rho(p,q,q)=0, rho(0|1,q,r)=0"});
  }

  const auto bi = backward_induction(f.game);
  {
    const std::string got = format_outcome(f.game, bi.profile) + " payoffs " + format_vector(bi.payoffs);
    out.push_back({"example.backward_induction", got == "(x,y)=(0,1) payoffs (2,2)", got});
  }
  out.push_back(equilibrium_check(f, "example.eq.X0xY0", "X0", "Y0", "(p,q,r)=(0,1,0)", "(x,y)=(0,1)", {2, 2}));
  out.push_back(equilibrium_check(f, "example.eq.X0xY1", "X0", "Y1", "(p)=(1)", "(x,y)=(1,1)", {4, 3}));
  out.push_back(meta_check(f, "example.meta", {{2, 2}, {4, 3}}, "(X0,Y1)", {4, 3}));
  return out;
}

}  // namespace detail

// `target` is "all", "chainstore" or "example".
inline std::vector<Check> reproduce_checks(std::string_view target) {
  std::vector<Check> out;
  if (target == "all" || target == "chainstore") {
    auto c = detail::chain_store_checks();
    out.insert(out.end(), c.begin(), c.end());
  }
  if (target == "all" || target == "example") {
    auto c = detail::example_checks();
    out.insert(out.end(), c.begin(), c.end());
  }
  if (out.empty()) throw InvalidModel("unknown reproduce target '" + std::string(target) + "'");
  return out;
}

}  // namespace varopt
