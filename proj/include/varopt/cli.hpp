#pragma once

// Command-line front end. `run_command` is the whole program minus main(),
// so tests can drive it with in-memory streams.
//
// Exit codes: 0 success, 1 analysis error (ambiguous meta-game, failed
// check), 2 usage or parse error.

#include <CLI11.hpp>

#include <cstddef>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "varopt/equilibria.hpp"
#include "varopt/game_file.hpp"
#include "varopt/measure_space.hpp"
#include "varopt/payoff.hpp"
#include "varopt/polynomial.hpp"
#include "varopt/reproduce.hpp"
#include "varopt/table.hpp"

namespace varopt {

namespace cli_detail {

// Usage-level failure: bad option values, unknown labels, missing parameters.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string game_path;
  std::string format = "table";
  bool decimal = false;
  std::string spaces;
  std::string at;
  std::string vars;
  std::string weights;
  std::string own_space;
  std::string player;
  double step = 0.01;
  std::size_t samples = 10;
  std::uint64_t seed = 1;
  std::string target = "all";
  bool all = false;

  [[nodiscard]] NumberStyle style() const { return decimal ? NumberStyle::decimal : NumberStyle::exact; }
  [[nodiscard]] OutputFormat output() const { return format == "tsv" ? OutputFormat::tsv : OutputFormat::table; }
};

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

inline GameFile load(const Options& o) {
  std::ifstream in(o.game_path, std::ios::binary);
  if (!in) throw UsageError("cannot open game file '" + o.game_path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_game_file(text.str());
  } catch (const ParseError& e) {
    throw UsageError(o.game_path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                     e.message());
  }
}

// "p=1/2,q=0.1"
inline ParamPoint parse_point(const std::string& text) {
  ParamPoint point;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("expected id=value in '" + item + "'");
    const std::string id = item.substr(0, eq);
    Rational v;
    try {
      v = Rational::parse(item.substr(eq + 1));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    if (v < Rational(0) || v > Rational(1))
      throw UsageError("probability " + id + "=" + v.str() + " outside [0,1]");
    point.set(id, v);
  }
  return point;
}

inline ParamPoint restrict_to(const ParamPoint& point, const std::vector<ParamId>& ids) {
  ParamPoint out;
  for (const auto& id : ids)
    if (point.contains(id)) out.set(id, point.at(id));
  return out;
}

inline void require_covers(const ParamPoint& point, const std::vector<ParamId>& ids) {
  for (const auto& id : ids)
    if (!point.contains(id)) throw UsageError("--at is missing a value for parameter '" + id + "'");
}

inline std::vector<JointSpace> selected_joints(const GameFile& f, const Options& o) {
  std::vector<JointSpace> out;
  if (!o.spaces.empty()) {
    std::vector<MeasureSpace> chosen;
    for (const auto& label : split(o.spaces, ',')) {
      const MeasureSpace* s = f.find_space(label);
      if (!s) {
        for (const auto& player : f.game.players)
          for (const auto& c : standard_catalog(f.game, player))
            if (c.label == label && !s) s = &chosen.emplace_back(c);
        if (!s) throw UsageError("unknown space '" + label + "'");
        continue;
      }
      chosen.push_back(*s);
    }
    try {
      out.emplace_back(f.game, chosen);
    } catch (const InvalidModel& e) {
      throw UsageError(e.what());
    }
    return out;
  }
  const MetaGame shape(f.game.players, f.catalogs());
  std::size_t total = 1;
  for (const auto& c : shape.catalogs()) total *= c.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto choice = shape.choice(idx);
    std::vector<MeasureSpace> spaces;
    for (std::size_t p = 0; p < choice.size(); ++p) spaces.push_back(shape.catalogs()[p][choice[p]]);
    out.emplace_back(f.game, spaces);
  }
  return out;
}

inline std::string payoff_list(const std::vector<Rational>& values, NumberStyle style) {
  std::vector<std::string> parts;
  for (const auto& v : values) parts.push_back(format_number(v, style));
  return join(parts, " ");
}

inline std::string rule_text(const Rule& rule) {
  return std::visit(
      [&](const auto& body) -> std::string {
        using B = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<B, ParamRule>) {
          std::vector<std::string> parts;
          for (const auto& cls : body.classes) {
            std::vector<std::string> cond;
            for (const auto& [v, b] : cls.when) cond.push_back(v + "=" + std::to_string(b));
            parts.push_back((cond.empty() ? "" : join(cond, ",") + ":") + cls.param);
          }
          return rule.target + "~param(" + join(parts, ";") + ")";
        } else if constexpr (std::is_same_v<B, CopyRule>) {
          return rule.target + "=" + body.source;
        } else if constexpr (std::is_same_v<B, FlipRule>) {
          return rule.target + "=1-" + body.source;
        } else {
          return rule.target + "=" + std::to_string(body.bit);
        }
      },
      rule.body);
}

// ---------------------------------------------------------------------------

inline int cmd_validate(const Options& o, std::ostream& out) {
  const GameFile f = load(o);
  Table game{"game", {"field", "value"}, {}};
  game.add({"name", f.game.name.empty() ? "-" : f.game.name});
  game.add({"players", join(f.game.players, " ")});
  std::vector<std::string> vars;
  for (const auto& v : f.game.variables) vars.push_back(v.name + "@" + v.owner);
  game.add({"variables", join(vars, " ")});
  game.add({"payoff rows", std::to_string(f.game.payoffs.size())});
  game.add({"spaces", std::to_string(f.spaces.size())});
  game.add({"status", "ok"});

  Table spaces{"catalogs", {"player", "space", "source", "parameters", "rules"}, {}};
  for (const auto& player : f.game.players) {
    const bool from_file = std::any_of(f.spaces.begin(), f.spaces.end(), [&](const auto& s) { return s.owner == player; });
    for (const auto& s : f.catalog(player)) {
      std::vector<std::string> rules;
      for (const auto& r : s.rules) rules.push_back(rule_text(r));
      const auto params = s.parameters();
      spaces.add({player, s.label, from_file ? "file" : "standard", params.empty() ? "-" : join(params, ","),
                  join(rules, " ")});
    }
  }
  render(out, std::vector<Table>{game, spaces}, o.output());
  return 0;
}

inline int cmd_payoffs(const Options& o, std::ostream& out) {
  const GameFile f = load(o);
  Table t{"expected payoffs", {"joint", "player", "payoff"}, {}};
  for (const auto& joint : selected_joints(f, o))
    for (const auto& player : f.game.players)
      t.add({joint.label(), player, to_string(expected_payoff(f.game, joint, player), o.style())});
  render(out, t, o.output());
  return 0;
}

inline int cmd_grad(const Options& o, std::ostream& out) {
  const GameFile f = load(o);
  const auto joints = selected_joints(f, o);
  const ParamPoint point = parse_point(o.at);
  Table t{"gradients", {"joint", "player", "parameter", "partial", "value", "finite-difference"}, {}};
  for (const auto& joint : joints) {
    require_covers(point, joint.parameters());
    const ParamPoint at = restrict_to(point, joint.parameters());
    for (const auto& player : f.game.players) {
      const auto poly = expected_payoff(f.game, joint, player);
      const auto analytic = gradient(poly, at, joint.parameters());
      const auto fd = fd_gradient(f.game, joint, player, to_double(at));
      for (std::size_t i = 0; i < joint.parameters().size(); ++i) {
        const auto& id = joint.parameters()[i];
        t.add({joint.label(), player, id, to_string(partial(poly, id), o.style()), format_number(analytic[i], o.style()),
               format_number(fd[i])});
      }
    }
  }
  render(out, t, o.output());
  return 0;
}

inline int cmd_corr(const Options& o, std::ostream& out) {
  const GameFile f = load(o);
  const auto vars = split(o.vars, ',');
  if (vars.size() != 2) throw UsageError("--vars needs exactly two variable names");
  for (const auto& v : vars)
    if (!f.game.find_variable(v)) throw UsageError("unknown variable '" + v + "'");
  const ParamPoint point = parse_point(o.at);
  Table t{"correlation", {"joint", "point", "variables", "rho", "rho-decimal"}, {}};
  for (const auto& joint : selected_joints(f, o)) {
    require_covers(point, joint.parameters());
    const ParamPoint at = restrict_to(point, joint.parameters());
    const double rho = correlation(joint, to_double(at), vars[0], vars[1]);
    const auto exact = correlation_exact(joint, at, vars[0], vars[1]);
    const std::string shown = exact && !o.decimal ? exact->str() : format_number(rho);
    t.add({joint.label(), format_point(at, joint.parameters(), o.style()), join(vars, ","), shown, format_number(rho)});
  }
  render(out, t, o.output());
  return 0;
}

inline int cmd_eq(const Options& o, std::ostream& out) {
  const GameFile f = load(o);
  std::vector<Table> tables;
  Table summary{"selected", {"joint", "point", "outcome", "payoffs", "status"}, {}};
  for (const auto& joint : selected_joints(f, o)) {
    const auto report = within_space_equilibria(f.game, joint);
    Table t{"equilibria " + joint.label(), {"point", "outcome", "payoffs", "indifferent", "tie-break", "selected"}, {}};
    for (std::size_t i = 0; i < report.equilibria.size(); ++i) {
      const auto& e = report.equilibria[i];
      t.add({format_point(e.point, report.parameters, o.style()), format_outcome(f.game, e.outcome),
             payoff_list(e.payoffs, o.style()), e.indifferent.empty() ? "-" : join(e.indifferent, ","),
             e.tie_break_consistent ? "yes" : "no", report.selected == i ? "*" : ""});
    }
    tables.push_back(std::move(t));
    if (const auto* sel = report.selected_equilibrium()) {
      summary.add({joint.label(), format_point(sel->point, report.effective_parameters, o.style()),
                   format_outcome(f.game, sel->outcome), payoff_list(sel->payoffs, o.style()),
                   report.ambiguous ? "ambiguous" : "unique"});
    } else {
      summary.add({joint.label(), "-", "-", "-", "none"});
    }
  }
  tables.push_back(std::move(summary));
  render(out, tables, o.output());
  return 0;
}

inline int cmd_meta(const Options& o, std::ostream& out, std::ostream& err) {
  const GameFile f = load(o);
  const MetaGame meta = build_meta_game(f.game, f.catalogs());
  std::vector<MetaEquilibrium> eqs;
  std::string failure;
  try {
    eqs = meta_pure_equilibria(meta);
  } catch (const AmbiguityError& e) {
    failure = e.what();
  }
  std::set<std::size_t> marked;
  for (const auto& e : eqs) marked.insert(meta.index(e.choice));
  auto cell_text = [&](std::span<const std::size_t> choice) {
    const auto& c = meta.cell(choice);
    std::string s = c.ambiguous ? "?" : detail::format_vector(c.payoffs, o.style());
    if (marked.contains(meta.index(choice))) s += " *";
    return s;
  };

  Table matrix{"meta-game", {}, {}};
  const auto& cats = meta.catalogs();
  if (cats.size() == 2) {
    matrix.header.push_back(meta.players()[1] + " \\ " + meta.players()[0]);
    for (const auto& s : cats[0]) matrix.header.push_back(s.label);
    for (std::size_t j = 0; j < cats[1].size(); ++j) {
      std::vector<std::string> row{cats[1][j].label};
      for (std::size_t i = 0; i < cats[0].size(); ++i) row.push_back(cell_text(std::vector<std::size_t>{i, j}));
      matrix.add(std::move(row));
    }
  } else {
    matrix.header = {meta.players()[0], "payoffs"};
    for (std::size_t i = 0; i < cats[0].size(); ++i)
      matrix.add({cats[0][i].label, cell_text(std::vector<std::size_t>{i})});
  }
  Table eq_table{"meta equilibria", {"profile", "payoffs"}, {}};
  for (const auto& e : eqs) eq_table.add({meta.cell_name(e.choice), payoff_list(e.payoffs, o.style())});
  render(out, std::vector<Table>{matrix, eq_table}, o.output());
  if (!failure.empty()) {
    err << "error: " << failure << '\n';
    return 1;
  }
  return 0;
}

inline int cmd_mixed(const Options& o, std::ostream& out) {
  const GameFile f = load(o);
  MixedSpaceWeighting w;
  for (const auto& item : split(o.weights, ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw UsageError("expected label:weight in '" + item + "'");
    const std::string label = item.substr(0, colon);
    const MeasureSpace* s = f.find_space(label);
    if (!s) throw UsageError("unknown space '" + label + "'");
    if (w.player.empty()) w.player = s->owner;
    Rational weight;
    try {
      weight = Rational::parse(item.substr(colon + 1));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    w.branches.push_back({*s, weight});
  }
  if (w.branches.empty()) throw UsageError("--weights is required");

  const MeasureSpace* own = nullptr;
  if (!o.own_space.empty()) {
    own = f.find_space(o.own_space);
    if (!own) throw UsageError("unknown space '" + o.own_space + "'");
  } else {
    for (const auto& s : f.spaces)
      if (s.owner != w.player) {
        own = &s;
        break;
      }
    if (!own) throw UsageError("no space for the opposing player; use --space");
  }
  const ParamPoint point = parse_point(o.at);
  MultilinearPoly payoff;
  try {
    payoff = mixed_space_payoff(f.game, *own, w, point);
  } catch (const MissingParameter& e) {
    throw UsageError(std::string(e.what()) + " (pass it with --at)");
  } catch (const InvalidModel& e) {
    throw UsageError(e.what());
  }

  Table t{"mixed-space payoff", {"field", "value"}, {}};
  std::vector<std::string> weights;
  for (const auto& b : w.branches) weights.push_back(b.space.label + ":" + format_number(b.weight, o.style()));
  t.add({"player", own->owner});
  t.add({"own space", own->label});
  t.add({"weights", join(weights, ",")});
  t.add({"payoff", to_string(payoff, o.style())});
  const auto params = own->parameters();
  for (const auto& id : params) t.add({"d/d" + id, to_string(partial(payoff, id), o.style())});
  const auto br = maximize_over_vertices(payoff, params);
  std::vector<std::string> maxima;
  for (const auto& m : br.maximizers) maxima.push_back(format_point(m, params, o.style()));
  t.add({"best response", join(maxima, " ")});
  t.add({"indifferent", br.indifferent.empty() ? "-" : join(br.indifferent, ",")});
  t.add({"value", format_number(br.value, o.style())});
  render(out, t, o.output());
  return 0;
}

inline int cmd_oracle(const Options& o, std::ostream& out) {
  const GameFile f = load(o);
  const ParamPoint given = o.at.empty() ? ParamPoint() : parse_point(o.at);
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> thousandths(0, 1000);
  Table t{"grid oracle (step " + format_number(o.step) + ")",
          {"joint", "player", "fixed", "vertex-best", "grid-best", "difference", "status"},
          {}};
  bool all_ok = true;
  for (const auto& joint : selected_joints(f, o)) {
    for (std::size_t pi = 0; pi < f.game.players.size(); ++pi) {
      const auto& player = f.game.players[pi];
      if (!o.player.empty() && player != o.player) continue;
      std::vector<ParamId> opponent;
      for (std::size_t i = 0; i < joint.parameters().size(); ++i)
        if (joint.player_of_parameter(i) != pi) opponent.push_back(joint.parameters()[i]);
      std::vector<ParamPoint> fixings;
      if (!o.at.empty()) {
        require_covers(given, opponent);
        fixings.push_back(restrict_to(given, opponent));
      } else {
        for (std::size_t s = 0; s < std::max<std::size_t>(o.samples, 1); ++s) {
          ParamPoint fx;
          for (const auto& id : opponent) fx.set(id, Rational(thousandths(rng), 1000));
          fixings.push_back(std::move(fx));
          if (opponent.empty()) break;
        }
      }
      for (const auto& fx : fixings) {
        const auto br = best_response(f.game, joint, player, fx);
        const auto grid = grid_oracle(f.game, joint, player, to_double(fx), o.step);
        const double diff = std::abs(grid.value - br.value.to_double());
        const bool ok = diff <= 1e-9;
        all_ok = all_ok && ok;
        t.add({joint.label(), player, fx.empty() ? "-" : format_point(fx, opponent, o.style()),
               format_number(br.value, o.style()), format_number(grid.value), format_number(diff), ok ? "ok" : "FAIL"});
      }
    }
  }
  render(out, t, o.output());
  return all_ok ? 0 : 1;
}

inline int cmd_reproduce(const Options& o, std::ostream& out) {
  const std::string target = o.all ? "all" : o.target;
  if (target != "all" && target != "chainstore" && target != "example")
    throw UsageError("reproduce target must be all, chainstore or example");
  const auto checks = reproduce_checks(target);
  Table t{"reproduce " + target, {"status", "check", "detail"}, {}};
  std::size_t passed = 0;
  for (const auto& c : checks) {
    passed += c.pass ? 1 : 0;
    t.add({c.pass ? "PASS" : "FAIL", c.id, c.detail});
  }
  Table total{"summary", {"passed", "total"}, {{std::to_string(passed), std::to_string(checks.size())}}};
  render(out, std::vector<Table>{t, total}, o.output());
  return passed == checks.size() ? 0 : 1;
}

}  // namespace cli_detail

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  Options o;
  CLI::App app{"Equilibria of sequential games over choices of probability measure space", "varopt"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool needs_game) {
    auto* g = sub->add_option("--game", o.game_path, "game definition file");
    if (needs_game) g->required()->check(CLI::ExistingFile);
    sub->add_option("--format", o.format, "table or tsv")->check(CLI::IsMember({"table", "tsv"}));
    sub->add_flag("--decimal", o.decimal, "print numbers with 12 significant digits");
  };

  auto* validate = app.add_subcommand("validate", "parse and check a game file");
  common(validate, true);

  auto* payoffs = app.add_subcommand("payoffs", "expected-payoff polynomials");
  common(payoffs, true);
  payoffs->add_option("--spaces", o.spaces, "one space label per player, comma separated");

  auto* grad = app.add_subcommand("grad", "analytic and finite-difference gradients");
  common(grad, true);
  grad->add_option("--spaces", o.spaces)->required();
  grad->add_option("--at", o.at, "parameter values, e.g. p=1/2,q=0.1")->required();

  auto* corr = app.add_subcommand("corr", "correlation between two variables");
  common(corr, true);
  corr->add_option("--spaces", o.spaces)->required();
  corr->add_option("--vars", o.vars, "two variable names, e.g. x,y")->required();
  corr->add_option("--at", o.at)->required();

  auto* eq = app.add_subcommand("eq", "equilibria within joint spaces");
  common(eq, true);
  eq->add_option("--spaces", o.spaces);

  auto* meta = app.add_subcommand("meta", "meta-game over measure-space choices");
  common(meta, true);

  auto* mixed = app.add_subcommand("mixed", "payoff under a weighting of the opponent's spaces");
  common(mixed, true);
  mixed->add_option("--weights", o.weights, "label:weight list, e.g. Y-:1/4,Y0:1/2,Y+:1/4")->required();
  mixed->add_option("--at", o.at, "opponent parameter values");
  mixed->add_option("--space", o.own_space, "own space (default: first space of the other player)");

  auto* oracle = app.add_subcommand("oracle", "compare vertex best responses with a grid search");
  common(oracle, true);
  oracle->add_option("--spaces", o.spaces);
  oracle->add_option("--player", o.player);
  oracle->add_option("--step", o.step, "grid step dividing 1");
  oracle->add_option("--at", o.at, "opponent parameter values (default: random samples)");
  oracle->add_option("--samples", o.samples, "random opponent fixings per joint space and player");
  oracle->add_option("--seed", o.seed);

  auto* reproduce = app.add_subcommand("reproduce", "run the golden checks on the bundled games");
  reproduce->add_option("target", o.target, "all, chainstore or example");
  reproduce->add_flag("--all", o.all);
  reproduce->add_option("--format", o.format)->check(CLI::IsMember({"table", "tsv"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (payoffs->parsed()) return cmd_payoffs(o, out);
    if (grad->parsed()) return cmd_grad(o, out);
    if (corr->parsed()) return cmd_corr(o, out);
    if (eq->parsed()) return cmd_eq(o, out);
    if (meta->parsed()) return cmd_meta(o, out, err);
    if (mixed->parsed()) return cmd_mixed(o, out);
    if (oracle->parsed()) return cmd_oracle(o, out);
    if (reproduce->parsed()) return cmd_reproduce(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const MissingParameter& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args, out, err);
}

}  // namespace varopt
