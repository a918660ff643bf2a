"""Full system/user prompts wrapped around each game's state observation."""

from __future__ import annotations

from .base import GameId, GameState
from .hanabi import COLOR_NAMES, HanabiState

_RESPONSE = (
    "RESPONSE INSTRUCTIONS:\n"
    "Always choose only one action from the legal actions and output `<answer>{{your chosen {what}}}</answer>` "
    "with no extra text after you finish the thinking process. For example, `<answer>{example}</answer>`. "
    "Strictly follow the above format and keep your thinking process concise. "
    "Responses that do not follow the format will result in {penalty}."
)
_TURN = (
    "Information of Turn-{turn}:\n"
    "This is your turn. The game state and legal actions for this turn are provided below. "
    "Please choose your action and strictly follow the given output format in the response instructions."
)

_TICTACTOE = """GAME RULES:
1. Tic-Tac-Toe is a two-player board game played on a three-by-three grid. The grid is 0-indexed, where (0,0) is the top-left corner and (2,2) is the bottom-right corner.
2. Two players take turns placing their marks X and O in empty cells of the grid.
3. The player who first places three of their marks in a horizontal, vertical, or diagonal line wins.
4. If all cells are filled and no player wins, the game ends in a draw.

PLAYER INFORMATION:
1. Your mark is {mark}. You are competing with another player controlling the mark {other}.
2. In each of your turns:
   a. The game state demonstrates the current board with a three-line text grid, where 'X' and 'O' are the marks of the two players, and '_' represents empty cells.
   b. You need to chose an action to place your mark in an empty cell, based on the given game state and the history of your decisions.
   c. All legal actions for the current turn are provided in the format of `<{mark}({{row}},{{column}})>`, where `{mark}` is your mark, and {{row}} and {{column}} are integers indicating the row and column of the cell to place your mark."""

_CONNECT4 = """GAME RULES:
1. Connect Four is a two-player board game played on a 6x7 grid. Players take turns dropping their pieces into columns.
2. The goal is to connect four of your pieces horizontally, vertically, or diagonally.
3. Pieces fall to the bottom of the column or stack on top of existing pieces.
4. The first player to connect four pieces wins. If the board fills up without a winner, it's a draw.

PLAYER INFORMATION:
1. Your mark is {mark}. You are competing with another player controlling the mark {other}.
2. In each of your turns:
   a. The game state shows the current board as a 6x7 grid.
   b. You need to choose a column (0-6) to drop your piece, where 0 denotes the leftmost column, 6 denotes the rightmost column.
   c. All legal actions are provided as `<{mark}({{column}})>`, where `{mark}` is your mark, and {{column}} is the column number."""

_KUHN = """GAME RULES:
1. Kuhn Poker is a two-player card game. The deck includes only three cards: King (K) > Queen (Q) > Jack (J).
2. At the start of each game, both player_0 and player_1 place 1 chip into the pot as a blind ante.
3. Each player is dealt a private card, and the third card is set aside unseen.
4. The two players take turns acting, starting with player_0. A player can choose to:
    a. <PASS>: place no additional chips into the pot.
    b. <BET>: place 1 additional chip into the pot.
5. If a player chooses to <PASS> after the other player's <BET>, the betting player wins the pot.
6. If both players choose to <PASS> or both players choose to <BET>, the player with the higher card wins the pot.

PLAYER INFORMATION:
1. You are player_{me}. You are competing with player_{other}.
2. In each of your turns:
   a. The game state shows your private card and the betting history.
   b. You need to choose an action based on your card and the current game state.
   c. All legal actions for the current turn are provided in the format of `<PASS>` or `<BET>`."""

_LEDUC = """GAME RULES:
1. Leduc poker is a two-player card game. The deck includes only six cards: two pairs of King (K), Queen (Q), and Jack (J).
2. At the start of each game, both player_0 and player_1 place 1 chip into the pot as a blind ante.
3. Each player is dealt one private card from the deck, and the remaining cards are set aside unseen.
4. The game has two betting rounds. When the first round ends, one public card from the remaining cards of the deck is revealed to both players.
5. The two players take turns acting in the betting rounds, both starting with player_0. A player can choose to:
    a. <FOLD>: stop betting and the other player wins the pot.
    b. <CALL>: match the current bet. If no bet has been made in the current round, this is equivalent to checking.
    c. <RAISE>: first match the current bet and then add `n` chips to the bet, where `n=2` in the first round and `n=4` in the second round. If no bet has been made in the current round, this is equivalent to betting `n` chips.
6. A maximum of two <RAISE>s are allowed in each round. Each round ends when both players have acted and their bets are equal.
7. If a player chooses to <FOLD>, the other player wins the pot.
8. If neither player chooses to <FOLD>, the second round ends with a showdown:
    a. If a player has a pair (private card = public card), the player wins the pot.
    b. If neither player has a pair, the player with the higher card (K > Q > J) wins the pot.
    c. If two players have the same card, the players split the pot.

PLAYER INFORMATION:
1. You are player_{me}. You are competing with player_{other}.
2. In each of your turns:
   a. The game state shows your private card, public card (if revealed), and the betting history.
   b. You need to choose an action based on your cards and the current game state.
   c. All legal actions for the current turn are provided in the format of `<FOLD>`, `<CALL>`, or `<RAISE>`."""

_HANABI = """GAME RULES:
1. Hanabi is a cooperative card game for 2 players, player 0 and player 1.
2. The deck consists of {n_colors} colors: {color_list}, with ranks ranging from 1 to {max_rank}. Each color contains {per_color} cards: three of rank 1, and one of rank 2, for a total of {deck_size} cards.
3. Each player holds {hand_size} cards in hand. Players can observe the hand of the other player, but not their own.
4. There are {max_info} information tokens and {max_lives} life tokens shared by both players.
5. The objective is to play cards in ascending order of rank, from 1 to {max_rank}, to their corresponding color stacks, hence achieving the 'Fireworks'.
6. The players take turns to take one of the following actions:
    a. <Play `i`>: play the i-th card from the player's own hand (0-indexed). If the card is sequential to the top card of its corresponding color stack, the move is valid and the card is added to the top of the stack, then both players receive 1 point. Otherwise, a life token is lost.
    b. <Discard `i`>: discard the i-th card from the player's own hand and gain one information token.
    c. <Reveal player +1 color `c`>: spend one information token to reveal all cards of color `c` in the other player's hand.
    d. <Reveal player +1 rank `r`>: spend one information token to reveal all cards of rank `r` in the other player's hand.
7. After playing or discarding, the player receives a new card from the deck (if remaining).
8. The game ends when:
    a. If all color stacks are completed (i.e., all cards of rank {max_rank} are played to their corresponding color stacks), then both players finish the game with the highest possible total score of {max_score}.
    b. If deck is depleted, both players finish the game with a total score which equals the sum of the highest ranks of each color stack.
    c. If all life tokens are lost before the above two conditions are met, then both players lose all points they have earned so far, and finish the game with a total score of 0.

PLAYER INFORMATION:
1. You will be playing as the player {me}.
2. In each of your turns, you will be provided with the current game state information, including the remaining life tokens and information tokens, the current color stacks, the remaining deck size, the discard pile, the hand of the other player, and the revealed information on your own hand.
3. Known cards are denoted by their color and rank. For example, 'R2' means a red card of rank 2. 4. The current color stacks are represented by the top card of each color stack. In particular, rank 0 denotes an empty stack. For example, 'Y0' means the yellow stack is still empty."""

_SYSTEM = {
    GameId.TICTACTOE: "You are an AI agent that makes optimal decisions to win in the game of Tic-Tac-Toe.",
    GameId.CONNECT4: "You are an AI agent that makes optimal decisions to win in the game of Connect Four.",
    GameId.KUHN: "You are an AI agent that makes optimal decisions to win in the game of Kuhn Poker.",
    GameId.LEDUC: "You are an AI agent that makes optimal decisions to win in the game of Leduc Poker.",
    GameId.MINI_HANABI: "You are an AI agent that makes optimal decisions to achieve the highest score in the game of Hanabi.",
    GameId.SIMPLE_HANABI: "You are an AI agent that makes optimal decisions to achieve the highest score in the game of Hanabi.",
}

_LOSS = "immediate loss of the game"


def _rules(state: GameState, player: int) -> tuple[str, str]:
    game = state.game
    mark, other = ("X", "O") if player == 0 else ("O", "X")
    if game == GameId.TICTACTOE:
        return _TICTACTOE.format(mark=mark, other=other), _RESPONSE.format(
            what="action", example=f"<{mark}(0,0)>", penalty=_LOSS)
    if game == GameId.CONNECT4:
        return _CONNECT4.format(mark=mark, other=other), _RESPONSE.format(
            what="column", example=f"<{mark}(3)>", penalty=_LOSS)
    if game == GameId.KUHN:
        return _KUHN.format(me=player, other=1 - player), _RESPONSE.format(
            what="action", example="<PASS>", penalty=_LOSS)
    if game == GameId.LEDUC:
        return _LEDUC.format(me=player, other=1 - player), _RESPONSE.format(
            what="action", example="<CALL>", penalty=_LOSS)
    assert isinstance(state, HanabiState)
    r = state.rules
    per_color = sum(r.copies)
    text = _HANABI.format(
        n_colors=len(r.colors),
        color_list=", ".join(f"{COLOR_NAMES[c]}(denoted by {c})" for c in r.colors),
        max_rank=max(r.ranks),
        per_color=per_color,
        deck_size=per_color * len(r.colors),
        hand_size=r.hand_size,
        max_info=r.max_info,
        max_lives=r.max_lives,
        max_score=r.max_score,
        me=player,
    )
    return text, _RESPONSE.format(what="action", example="<Discard Card 0>",
                                  penalty="immediate loss of all life tokens and end of the game")


def render_prompt(state: GameState, player: int | None = None) -> tuple[str, str]:
    """``(system_prompt, user_prompt)`` for ``player`` (default: the player to act)."""
    player = state.player if player is None else player
    rules, response = _rules(state, player)
    legal = ", ".join(state.legal_actions()) + "."
    user = "\n\n".join([
        rules,
        response,
        _TURN.format(turn=state.turn),
        "GAME STATE:\n" + state.observe(player),
        "LEGAL ACTIONS:\n" + legal,
    ])
    return _SYSTEM[state.game], user


def render_listing(state: GameState, player: int | None = None) -> str:
    """Prompt pair laid out as ``system_prompt:``/``user_prompt:`` blocks."""
    system, user = render_prompt(state, player)
    return f"system_prompt:\n{system}\n\nuser_prompt:\n{user}"
