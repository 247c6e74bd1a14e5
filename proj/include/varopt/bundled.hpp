#pragma once

// Game files shipped with the library. The same text lives in games/*.game.

#include <string_view>

#include "varopt/game_file.hpp"

namespace varopt::bundled {

inline constexpr std::string_view chain_store_text = R"game(# Minimal chain store game.
# The entrant X stays out (x=0) or enters (x=1). After an entry the
# monopolist Y acquiesces (y=0) or fights (y=1). When X stays out the
# payoffs do not depend on y.
game "chain store"
players X Y
var x owner=X stage=1
var y owner=Y stage=2
payoff x=0 y=0 -> X:0 Y:1
payoff x=0 y=1 -> X:0 Y:1
payoff x=1 y=0 -> X:1 Y:0
payoff x=1 y=1 -> X:-1 Y:-1

space X0 owner=X
  rule x : param p

# anti-correlated: y = 1 - x
space Y- owner=Y
  rule y : flip x

# independent behavioural strategy
space Y0 owner=Y
  rule y | x=0 : param q
  rule y | x=1 : param r

# correlated: y = x
space Y+ owner=Y
  rule y : copy x
)game";

inline constexpr std::string_view example_game_text = R"game(# Two-stage perfect information game: X moves, then Y moves having
# observed x.
game "two-stage example"
players X Y
var x owner=X stage=1
var y owner=Y stage=2
payoff x=0 y=0 -> X:3 Y:1
payoff x=0 y=1 -> X:2 Y:2
payoff x=1 y=0 -> X:1 Y:4
payoff x=1 y=1 -> X:4 Y:3

space X0 owner=X
  rule x : param p

# independent behavioural strategy
space Y0 owner=Y
  rule y | x=0 : param q
  rule y | x=1 : param r

# y = x
space Y1 owner=Y
  rule y : copy x
)game";

inline GameFile chain_store() { return parse_game_file(chain_store_text); }
inline GameFile example_game() { return parse_game_file(example_game_text); }

}  // namespace varopt::bundled
