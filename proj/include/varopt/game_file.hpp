#pragma once

// Line-oriented game definition files.
//
//   # comment
//   game "chain store"
//   players X Y
//   var x owner=X stage=1
//   var y owner=Y stage=2
//   payoff x=1 y=1 -> X:-1 Y:-1
//   space Y0 owner=Y
//     rule y | x=0 : param q
//     rule y | x=1 : param r
//   space Y+ owner=Y
//     rule y : copy x
//
// One payoff line per complete outcome. Param rules with several history
// classes are written as one `rule` line per class.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varopt/error.hpp"
#include "varopt/game.hpp"
#include "varopt/measure_space.hpp"
#include "varopt/rational.hpp"

namespace varopt {

struct GameFile {
  OutcomeGame game;
  std::vector<MeasureSpace> spaces;

  [[nodiscard]] const MeasureSpace* find_space(std::string_view label) const {
    for (const auto& s : spaces)
      if (s.label == label) return &s;
    return nullptr;
  }
  [[nodiscard]] const MeasureSpace& space(std::string_view label) const {
    if (const auto* s = find_space(label)) return *s;
    throw InvalidModel("no space labelled '" + std::string(label) + "'");
  }

  // Spaces the file defines for `player`, in file order; the standard
  // catalog when it defines none.
  [[nodiscard]] std::vector<MeasureSpace> catalog(std::string_view player) const {
    std::vector<MeasureSpace> out;
    for (const auto& s : spaces)
      if (s.owner == player) out.push_back(s);
    if (out.empty()) return standard_catalog(game, player);
    return out;
  }
  [[nodiscard]] std::vector<std::vector<MeasureSpace>> catalogs() const {
    std::vector<std::vector<MeasureSpace>> out;
    for (const auto& p : game.players) out.push_back(catalog(p));
    return out;
  }

  friend bool operator==(const GameFile&, const GameFile&) = default;
};

namespace detail {

struct Token {
  enum class Kind { word, string, punct } kind = Kind::word;
  std::string text;
  std::size_t column = 1;
};

struct Line {
  std::size_t number = 0;
  bool indented = false;
  std::vector<Token> tokens;
};

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '+' || c == '-' || c == '/' ||
         c == '.';
}

inline Line lex_line(std::string_view text, std::size_t number) {
  Line line;
  line.number = number;
  line.indented = !text.empty() && (text.front() == ' ' || text.front() == '\t');
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const std::size_t col = i + 1;
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '"') {
      const std::size_t close = text.find('"', i + 1);
      if (close == std::string_view::npos) throw ParseError(number, col, "unterminated string");
      line.tokens.push_back({Token::Kind::string, std::string(text.substr(i + 1, close - i - 1)), col});
      i = close + 1;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      line.tokens.push_back({Token::Kind::punct, "->", col});
      i += 2;
    } else if (c == '=' || c == ',' || c == '|' || c == ':') {
      line.tokens.push_back({Token::Kind::punct, std::string(1, c), col});
      ++i;
    } else if (is_word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j]) && !(text[j] == '-' && j + 1 < text.size() && text[j + 1] == '>'))
        ++j;
      line.tokens.push_back({Token::Kind::word, std::string(text.substr(i, j - i)), col});
      i = j;
    } else {
      throw ParseError(number, col, std::string("unexpected character '") + c + "'");
    }
  }
  return line;
}

class LineReader {
 public:
  explicit LineReader(const Line& line) : line_(line) {}

  [[nodiscard]] bool done() const { return pos_ >= line_.tokens.size(); }
  [[nodiscard]] const Token* peek() const { return done() ? nullptr : &line_.tokens[pos_]; }

  [[noreturn]] void fail(const std::string& msg, const Token* at = nullptr) const {
    const Token* t = at ? at : peek();
    const std::size_t col = t ? t->column : end_column();
    throw ParseError(line_.number, col, msg);
  }

  const Token& word(const char* what) {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::word) fail(std::string("expected ") + what);
    ++pos_;
    return *t;
  }
  const Token& any_text(const char* what) {
    const Token* t = peek();
    if (!t || t->kind == Token::Kind::punct) fail(std::string("expected ") + what);
    ++pos_;
    return *t;
  }
  void punct(std::string_view p) {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::punct || t->text != p) fail("expected '" + std::string(p) + "'");
    ++pos_;
  }
  bool accept(std::string_view p) {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::punct || t->text != p) return false;
    ++pos_;
    return true;
  }
  void end() {
    if (!done()) fail("unexpected '" + peek()->text + "'");
  }

  // key=value where key must equal `key`
  const Token& keyed(std::string_view key) {
    const Token& k = word(std::string(key).c_str());
    if (k.text != key) fail("expected '" + std::string(key) + "='", &k);
    punct("=");
    return word("value");
  }

  Bit bit(const Token& t) const {
    if (t.text == "0") return 0;
    if (t.text == "1") return 1;
    fail("expected 0 or 1, got '" + t.text + "'", &t);
  }

 private:
  [[nodiscard]] std::size_t end_column() const {
    if (line_.tokens.empty()) return 1;
    const auto& last = line_.tokens.back();
    return last.column + last.text.size();
  }

  const Line& line_;
  std::size_t pos_ = 0;
};

struct Pos {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct PendingRule {
  Pos target_pos;
  std::string target;
  Rule rule;
  std::vector<std::pair<std::string, Pos>> references;  // sources and condition variables
};

struct PendingSpace {
  Pos pos;
  Pos owner_pos;
  MeasureSpace space;
  std::vector<PendingRule> rules;
};

}  // namespace detail

inline GameFile parse_game_file(std::string_view text) {
  using detail::Pos;
  std::vector<detail::Line> lines;
  {
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t stop = text.find('\n', start);
      if (stop == std::string_view::npos) stop = text.size();
      ++number;
      detail::Line line = detail::lex_line(text.substr(start, stop - start), number);
      if (!line.tokens.empty()) lines.push_back(std::move(line));
      start = stop + 1;
    }
  }
  if (lines.empty()) throw ParseError(1, 1, "empty game file: expected 'players'");

  GameFile file;
  OutcomeGame& game = file.game;
  std::optional<Pos> players_pos;
  std::optional<Pos> first_payoff_pos;
  std::map<std::string, Pos> var_pos;
  std::vector<Pos> var_owner_pos;
  std::vector<detail::PendingSpace> spaces;
  std::set<std::string> labels;
  bool has_name = false;

  for (const auto& line : lines) {
    detail::LineReader in(line);
    const detail::Token& head = in.word("a directive");
    const Pos here{line.number, head.column};

    if (head.text == "rule") {
      if (spaces.empty()) in.fail("'rule' outside a space definition", &head);
      if (!line.indented) in.fail("rule lines must be indented under their space", &head);
      detail::PendingRule pr;
      const detail::Token& target = in.word("target variable");
      pr.target = target.text;
      pr.target_pos = {line.number, target.column};
      std::vector<std::pair<std::string, Bit>> when;
      if (in.accept("|")) {
        do {
          const detail::Token& v = in.word("condition variable");
          in.punct("=");
          when.emplace_back(v.text, in.bit(in.word("bit")));
          pr.references.emplace_back(v.text, Pos{line.number, v.column});
        } while (in.accept(","));
      }
      in.punct(":");
      const detail::Token& kind = in.word("param, copy, flip or const");
      if (kind.text == "param") {
        pr.rule = {pr.target, ParamRule{{ParamClass{when, in.word("parameter id").text}}}};
      } else {
        if (!when.empty()) in.fail("only param rules take history conditions", &kind);
        if (kind.text == "copy" || kind.text == "flip") {
          const detail::Token& src = in.word("source variable");
          pr.references.emplace_back(src.text, Pos{line.number, src.column});
          pr.rule = kind.text == "copy" ? Rule{pr.target, CopyRule{src.text}} : Rule{pr.target, FlipRule{src.text}};
        } else if (kind.text == "const") {
          pr.rule = {pr.target, ConstRule{in.bit(in.word("bit"))}};
        } else {
          in.fail("unknown rule kind '" + kind.text + "'", &kind);
        }
      }
      in.end();
      spaces.back().rules.push_back(std::move(pr));
      continue;
    }
    if (line.indented) in.fail("unexpected indentation before '" + head.text + "'", &head);

    if (head.text == "game") {
      if (has_name) in.fail("duplicate 'game' directive", &head);
      game.name = in.any_text("game name").text;
      has_name = true;
      in.end();
    } else if (head.text == "players") {
      if (players_pos) in.fail("duplicate 'players' directive", &head);
      players_pos = here;
      while (!in.done()) {
        const detail::Token& p = in.word("player id");
        if (std::find(game.players.begin(), game.players.end(), p.text) != game.players.end())
          in.fail("duplicate player '" + p.text + "'", &p);
        game.players.push_back(p.text);
      }
      if (game.players.empty() || game.players.size() > 2) in.fail("expected one or two players", &head);
    } else if (head.text == "var") {
      if (!players_pos) in.fail("'var' before 'players'", &head);
      if (first_payoff_pos || !spaces.empty()) in.fail("'var' after payoffs or spaces", &head);
      const detail::Token& name = in.word("variable name");
      if (var_pos.contains(name.text)) in.fail("duplicate variable '" + name.text + "'", &name);
      const detail::Token& owner = in.keyed("owner");
      if (!game.find_player(owner.text)) in.fail("unknown player '" + owner.text + "'", &owner);
      const detail::Token& stage = in.keyed("stage");
      int stage_value = 0;
      try {
        std::size_t used = 0;
        stage_value = std::stoi(stage.text, &used);
        if (used != stage.text.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        in.fail("stage must be an integer", &stage);
      }
      if (!game.variables.empty() && stage_value <= game.variables.back().stage)
        in.fail("stage " + std::to_string(stage_value) + " of '" + name.text + "' does not exceed stage " +
                    std::to_string(game.variables.back().stage) + " of '" + game.variables.back().name + "'",
                &stage);
      in.end();
      var_pos[name.text] = here;
      game.variables.push_back({name.text, owner.text, stage_value});
      if (game.variables.size() > max_variables) in.fail("too many variables", &name);
    } else if (head.text == "payoff") {
      if (game.variables.empty()) in.fail("'payoff' before any 'var'", &head);
      if (!first_payoff_pos) first_payoff_pos = here;
      Outcome outcome;
      outcome.bits.assign(game.num_variables(), 2);
      while (!in.accept("->")) {
        const detail::Token& v = in.word("variable assignment or '->'");
        auto idx = game.find_variable(v.text);
        if (!idx && game.find_player(v.text)) in.fail("expected '->' before payoffs", &v);
        if (!idx) in.fail("unknown variable '" + v.text + "'", &v);
        if (outcome.bits[*idx] != 2) in.fail("variable '" + v.text + "' assigned twice", &v);
        in.punct("=");
        outcome.bits[*idx] = in.bit(in.word("bit"));
      }
      for (std::size_t i = 0; i < outcome.size(); ++i)
        if (outcome.bits[i] == 2) in.fail("payoff row does not assign '" + game.variables[i].name + "'", &head);
      std::vector<std::optional<Rational>> values(game.players.size());
      while (!in.done()) {
        const detail::Token& p = in.word("player id");
        auto pi = game.find_player(p.text);
        if (!pi) in.fail("unknown player '" + p.text + "'", &p);
        if (values[*pi]) in.fail("payoff for '" + p.text + "' given twice", &p);
        in.punct(":");
        const detail::Token& num = in.word("rational payoff");
        try {
          values[*pi] = Rational::parse(num.text);
        } catch (const std::exception& e) {
          in.fail(e.what(), &num);
        }
      }
      std::vector<Rational> row;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i]) in.fail("payoff row has no value for '" + game.players[i] + "'", &head);
        row.push_back(*values[i]);
      }
      if (game.payoffs.contains(outcome)) in.fail("duplicate payoff row for " + format_outcome(game, outcome), &head);
      game.payoffs.emplace(std::move(outcome), std::move(row));
    } else if (head.text == "space") {
      if (!players_pos) in.fail("'space' before 'players'", &head);
      const detail::Token& label = in.word("space label");
      if (!labels.insert(label.text).second) in.fail("duplicate space '" + label.text + "'", &label);
      const detail::Token& owner = in.keyed("owner");
      if (!game.find_player(owner.text)) in.fail("unknown player '" + owner.text + "'", &owner);
      in.end();
      detail::PendingSpace ps;
      ps.pos = here;
      ps.owner_pos = {line.number, owner.column};
      ps.space.label = label.text;
      ps.space.owner = owner.text;
      spaces.push_back(std::move(ps));
    } else {
      in.fail("unknown directive '" + head.text + "'", &head);
    }
  }

  if (!players_pos) throw ParseError(lines.front().number, 1, "missing 'players' directive");
  if (game.variables.empty()) throw ParseError(players_pos->line, 1, "no variables declared");
  const Pos table_pos = first_payoff_pos.value_or(Pos{lines.back().number, 1});
  if (auto errors = validate_game(game); !errors.empty()) throw ParseError(table_pos.line, table_pos.column, errors.front());

  for (auto& ps : spaces) {
    std::map<std::string, std::size_t> rule_of_target;
    for (auto& pr : ps.rules) {
      auto target = game.find_variable(pr.target);
      if (!target) throw ParseError(pr.target_pos.line, pr.target_pos.column, "unknown variable '" + pr.target + "'");
      if (game.variables[*target].owner != ps.space.owner)
        throw ParseError(pr.target_pos.line, pr.target_pos.column,
                         "variable '" + pr.target + "' is not owned by '" + ps.space.owner + "'");
      for (const auto& [name, pos] : pr.references) {
        auto ref = game.find_variable(name);
        if (!ref) throw ParseError(pos.line, pos.column, "unknown variable '" + name + "'");
        if (*ref >= *target)
          throw ParseError(pos.line, pos.column,
                           "'" + name + "' is not observed before '" + pr.target + "' (stage " +
                               std::to_string(game.variables[*ref].stage) + " >= " +
                               std::to_string(game.variables[*target].stage) + ")");
      }
      auto it = rule_of_target.find(pr.target);
      if (it == rule_of_target.end()) {
        rule_of_target[pr.target] = ps.space.rules.size();
        ps.space.rules.push_back(pr.rule);
        continue;
      }
      auto* existing = std::get_if<ParamRule>(&ps.space.rules[it->second].body);
      const auto* incoming = std::get_if<ParamRule>(&pr.rule.body);
      if (!existing || !incoming)
        throw ParseError(pr.target_pos.line, pr.target_pos.column, "second rule for '" + pr.target + "'");
      existing->classes.push_back(incoming->classes.front());
    }
    if (auto errors = validate_space(game, ps.space); !errors.empty())
      throw ParseError(ps.pos.line, ps.pos.column, errors.front());
    file.spaces.push_back(std::move(ps.space));
  }
  return file;
}

// Canonical text; parse_game_file(format_game_file(f)) == f.
inline std::string format_game_file(const GameFile& file) {
  const OutcomeGame& game = file.game;
  std::string out;
  if (!game.name.empty()) out += "game \"" + game.name + "\"\n";
  out += "players";
  for (const auto& p : game.players) out += " " + p;
  out += "\n";
  for (const auto& v : game.variables)
    out += "var " + v.name + " owner=" + v.owner + " stage=" + std::to_string(v.stage) + "\n";
  for (const auto& [outcome, values] : game.payoffs) {
    out += "payoff";
    for (std::size_t i = 0; i < outcome.size(); ++i)
      out += " " + game.variables[i].name + "=" + static_cast<char>('0' + outcome[i]);
    out += " ->";
    for (std::size_t i = 0; i < values.size(); ++i) out += " " + game.players[i] + ":" + values[i].str();
    out += "\n";
  }
  for (const auto& space : file.spaces) {
    out += "\nspace " + space.label + " owner=" + space.owner + "\n";
    for (const auto& rule : space.rules) {
      std::visit(
          [&](const auto& body) {
            using B = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<B, ParamRule>) {
              for (const auto& cls : body.classes) {
                out += "  rule " + rule.target;
                for (std::size_t i = 0; i < cls.when.size(); ++i)
                  out += (i == 0 ? " | " : ",") + cls.when[i].first + "=" + static_cast<char>('0' + cls.when[i].second);
                out += " : param " + cls.param + "\n";
              }
            } else if constexpr (std::is_same_v<B, CopyRule>) {
              out += "  rule " + rule.target + " : copy " + body.source + "\n";
            } else if constexpr (std::is_same_v<B, FlipRule>) {
              out += "  rule " + rule.target + " : flip " + body.source + "\n";
            } else {
              out += "  rule " + rule.target + " : const " + static_cast<char>('0' + body.bit) + "\n";
            }
          },
          rule.body);
    }
  }
  return out;
}

}  // namespace varopt
