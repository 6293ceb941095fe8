"""Bundled worked machines: the gait CPG controller and the word-rewriting TM."""

from __future__ import annotations

from .automata import FSM, TM
from .godel import GammaMap, PlainEncoding, RefinedEncoding, RefinedGammaMap

LO = "<lo>"
HI = "<hi>"


def cpg_fsm() -> FSM:
    """Four-state gait controller: <lo> drives the walk cycle (1, 3, 2, 4),
    <hi> the gallop cycle (1, 2, 3, 4)."""
    delta = {
        ("q1", LO): "q3",
        ("q2", LO): "q4",
        ("q3", LO): "q2",
        ("q4", LO): "q1",
        ("q1", HI): "q2",
        ("q2", HI): "q3",
        ("q3", HI): "q4",
        ("q4", HI): "q1",
    }
    return FSM(states=("q1", "q2", "q3", "q4"), input_symbols=(LO, HI),
               start="q1", accepting=frozenset(), delta=delta)


def cpg_encodings():
    """gamma_q enumerates q1..q4 as 0..3; gamma_s maps <lo> to 0 and <hi> to 1,
    putting every <hi>-driven configuration at or above y = 1/2."""
    gq = GammaMap(("q1", "q2", "q3", "q4"))
    gs = GammaMap((LO, HI))
    return RefinedEncoding(RefinedGammaMap(gq, gs)), PlainEncoding(gs)

WALK_CYCLE = ("q1", "q3", "q2", "q4")
GALLOP_CYCLE = ("q1", "q2", "q3", "q4")


def word_tm() -> TM:
    """Two-transition machine for the w-o-r-d rewriting trace."""
    delta = {
        ("q0", "o"): ("q1", "a", "R"),
        ("q1", "r"): ("q1", "n", "L"),
    }
    return TM(states=("q0", "q1"), tape_symbols=("_", "w", "o", "r", "d", "a", "n"),
              input_symbols=("w", "o", "r", "d", "a", "n"), start="q0", blank="_",
              halting=frozenset(), delta=delta)


def tm_shape(n_states: int, n_symbols: int) -> TM:
    """A total cycling machine with the requested state and tape alphabet sizes.

    Unit counts of the compiled network depend only on these sizes, so any
    total table does for size checks.
    """
    states = tuple(f"q{i}" for i in range(n_states))
    symbols = ("_",) + tuple(f"s{i}" for i in range(1, n_symbols))
    delta = {}
    for i, q in enumerate(states):
        for j, d in enumerate(symbols):
            delta[(q, d)] = (states[(i + 1) % n_states],
                             symbols[(j + 1) % n_symbols],
                             "R" if (i + j) % 2 == 0 else "L")
    return TM(states=states, tape_symbols=symbols,
              input_symbols=symbols[1:], start=states[0], blank="_",
              halting=frozenset(), delta=delta)
