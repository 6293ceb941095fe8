"""Machine definitions, their direct simulators, and compilers to versatile shifts.

Four machine kinds are supported: finite-state machines, deterministic
push-down automata, top-down recognizers derived from non-left-recursive
locally unambiguous context-free grammars, and Turing machines. Each kind has

* an immutable definition dataclass,
* a configuration dataclass and a one-step simulator (the symbolic oracle),
* a lossless codec between configurations and dotted sequences,
* a compiler emitting an equivalent versatile shift that simulates the
  machine in real time (one shift application per machine step).

Configuration layouts on dotted sequences:

    FSM   q . d0 d1 ... dn           (state at index -1, input right of dot)
    PDA   sm ... s0 q . d0 ... dn    (stack reversed, top s0 next to the state)
    TDR   sm ... s0 . d0 ... dn      (single state elided)
    TM    l q . r                    (tape left of head, state, head symbol at 0)

The empty string "" acts as the epsilon marker in PDA transition tables; it is
never a symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

from .errors import (
    AmbiguousGrammarError,
    EmptyInputError,
    Halted,
    LeftRecursiveGrammarError,
    MalformedConfigurationError,
    NondeterministicMachineError,
    UndefinedTransitionError,
)
from .godel import GammaMap, PlainEncoding, RefinedEncoding, RefinedGammaMap
from .symbolic import DoD, DottedSequence, Rule, VersatileShift, Word

EPSILON = ""

DEFAULT_BLANK = "_"


# --- machine definitions ------------------------------------------------------


@dataclass(frozen=True)
class FSM:
    """Finite-state machine with a partial transition table (q, d) -> q'."""

    states: Tuple[str, ...]
    input_symbols: Tuple[str, ...]
    start: str
    accepting: frozenset = frozenset()
    delta: Mapping[Tuple[str, str], str] = field(default_factory=dict)
    blank: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "input_symbols", tuple(self.input_symbols))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta", dict(self.delta))
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} not in states")
        for (q, d), q2 in self.delta.items():
            if q not in self.states or q2 not in self.states:
                raise ValueError(f"transition ({q!r}, {d!r}) -> {q2!r} uses unknown state")
            if d not in self.input_symbols:
                raise ValueError(f"transition symbol {d!r} not in input alphabet")
        if self.blank is not None and self.blank not in self.input_symbols:
            raise ValueError("blank must be a member of the input alphabet")


@dataclass(frozen=True)
class PDA:
    """Deterministic push-down automaton.

    Transition table entries map (state, input symbol or EPSILON, top of
    stack) to (new state, pushed symbol or EPSILON). A pop removes the top, a
    push stacks the new symbol above the old top. Epsilon-input entries leave
    the input untouched. With no accepting states the machine accepts by empty
    stack.
    """

    states: Tuple[str, ...]
    stack_symbols: Tuple[str, ...]
    input_symbols: Tuple[str, ...]
    start: str
    accepting: frozenset = frozenset()
    delta: Mapping[Tuple[str, str, str], Tuple[str, str]] = field(default_factory=dict)
    blank: str = DEFAULT_BLANK

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "stack_symbols", tuple(self.stack_symbols))
        object.__setattr__(self, "input_symbols", tuple(self.input_symbols))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta", dict(self.delta))
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} not in states")
        for (q, d, s), (q2, push) in self.delta.items():
            if q not in self.states or q2 not in self.states:
                raise ValueError("transition uses unknown state")
            if d != EPSILON and d not in self.input_symbols:
                raise ValueError(f"input symbol {d!r} not in alphabet")
            if s not in self.stack_symbols:
                raise ValueError(f"stack symbol {s!r} not in stack alphabet")
            if push != EPSILON and push not in self.stack_symbols:
                raise ValueError(f"pushed symbol {push!r} not in stack alphabet")
        # determinism: an epsilon-input entry for (q, s) excludes symbol entries
        for (q, d, s) in self.delta:
            if d == EPSILON:
                for d2 in self.input_symbols:
                    if (q, d2, s) in self.delta:
                        raise NondeterministicMachineError(
                            f"state {q!r} top {s!r} has both an epsilon move and "
                            f"a move on {d2!r}"
                        )


@dataclass(frozen=True)
class CFG:
    """Context-free grammar, non-left-recursive and locally unambiguous.

    Local unambiguity (no two rules share a left-hand side) is what lets the
    derived top-down recognizer run with a single state and no lookahead
    conflicts; both properties are checked at construction.
    """

    nonterminals: Tuple[str, ...]
    terminals: Tuple[str, ...]
    rules: Mapping[str, Word]
    start: str

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", tuple(self.nonterminals))
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "rules", dict(self.rules))
        if set(self.nonterminals) & set(self.terminals):
            raise ValueError("nonterminals and terminals overlap")
        if self.start not in self.nonterminals:
            raise ValueError(f"start symbol {self.start!r} not a nonterminal")
        for lhs, rhs in self.rules.items():
            if lhs not in self.nonterminals:
                raise ValueError(f"rule LHS {lhs!r} not a nonterminal")
            for sym in rhs:
                if sym not in self.nonterminals and sym not in self.terminals:
                    raise ValueError(f"rule symbol {sym!r} undeclared")
        self._check_left_recursion()

    @classmethod
    def from_rules(cls, rule_list, start, terminals=None, nonterminals=None) -> "CFG":
        """Build from (lhs, rhs) pairs, inferring alphabets from the rules."""
        rules = {}
        for lhs, rhs in rule_list:
            if lhs in rules:
                raise AmbiguousGrammarError(
                    f"two rules expand {lhs!r}; the grammar is locally ambiguous"
                )
            rules[lhs] = tuple(rhs)
        nts = tuple(nonterminals) if nonterminals else tuple(rules)
        if terminals is None:
            seen = []
            for rhs in rules.values():
                for sym in rhs:
                    if sym not in nts and sym not in seen:
                        seen.append(sym)
            terminals = tuple(seen)
        return cls(nts, tuple(terminals), rules, start)

    def _check_left_recursion(self):
        # nullable nonterminals (single rule each, so a simple fixpoint)
        nullable = set()
        changed = True
        while changed:
            changed = False
            for lhs, rhs in self.rules.items():
                if lhs not in nullable and all(s in nullable for s in rhs):
                    nullable.add(lhs)
                    changed = True
        # leftmost-reachability through nullable prefixes
        edges = {}
        for lhs, rhs in self.rules.items():
            targets = []
            for sym in rhs:
                if sym in self.nonterminals:
                    targets.append(sym)
                    if sym not in nullable:
                        break
                else:
                    break
            edges[lhs] = targets
        for origin in self.rules:
            stack, seen = list(edges.get(origin, ())), set()
            while stack:
                node = stack.pop()
                if node == origin:
                    raise LeftRecursiveGrammarError(
                        f"nonterminal {origin!r} is left-recursive"
                    )
                if node in seen:
                    continue
                seen.add(node)
                stack.extend(edges.get(node, ()))


@dataclass(frozen=True)
class TDR:
    """Top-down recognizer: single-state PDA expanding a grammar's rules.

    Accepts by empty stack and empty input. Terminals on top of the stack are
    matched against the input head; nonterminals are expanded regardless of
    the lookahead.
    """

    grammar: CFG
    blank: str = DEFAULT_BLANK

    def __post_init__(self):
        if self.blank in self.grammar.nonterminals or self.blank in self.grammar.terminals:
            raise ValueError("blank symbol collides with a grammar symbol")
        for nt in self.grammar.nonterminals:
            if nt not in self.grammar.rules:
                raise ValueError(f"nonterminal {nt!r} has no expansion")


@dataclass(frozen=True)
class TM:
    """Turing machine over a two-sided infinite tape."""

    states: Tuple[str, ...]
    tape_symbols: Tuple[str, ...]
    input_symbols: Tuple[str, ...]
    start: str
    blank: str
    halting: frozenset = frozenset()
    delta: Mapping[Tuple[str, str], Tuple[str, str, str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "tape_symbols", tuple(self.tape_symbols))
        object.__setattr__(self, "input_symbols", tuple(self.input_symbols))
        object.__setattr__(self, "halting", frozenset(self.halting))
        object.__setattr__(self, "delta", dict(self.delta))
        if self.blank not in self.tape_symbols:
            raise ValueError("blank must be in the tape alphabet")
        if set(self.input_symbols) - (set(self.tape_symbols) - {self.blank}):
            raise ValueError("input alphabet must be tape alphabet minus blank")
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} not in states")
        for (q, d), (q2, d2, move) in self.delta.items():
            if q in self.halting:
                raise ValueError(f"halting state {q!r} has an outgoing transition")
            if q not in self.states or q2 not in self.states:
                raise ValueError("transition uses unknown state")
            if d not in self.tape_symbols or d2 not in self.tape_symbols:
                raise ValueError("transition uses unknown tape symbol")
            if move not in ("L", "R"):
                raise ValueError(f"move must be L or R, got {move!r}")


# --- configurations and step functions ----------------------------------------


@dataclass(frozen=True)
class FsmConfig:
    state: str
    input: Word


@dataclass(frozen=True)
class PdaConfig:
    state: str
    stack: Word  # top first
    input: Word


@dataclass(frozen=True)
class TdrConfig:
    stack: Word  # top first
    input: Word


@dataclass(frozen=True)
class TmConfig:
    left: Word  # nearest the head first
    state: str
    right: Word  # symbol under the head first


def _strip_blanks(word: Word, blank: Optional[str]) -> Word:
    """Canonical tape form: trailing blanks are indistinguishable from fill."""
    if blank is None:
        return word
    n = len(word)
    while n and word[n - 1] == blank:
        n -= 1
    return word[:n]


def step_fsm(m: FSM, c: FsmConfig) -> FsmConfig:
    if not c.input:
        raise EmptyInputError(f"FSM in state {c.state!r} has no input left")
    key = (c.state, c.input[0])
    if key not in m.delta:
        raise UndefinedTransitionError(f"no FSM transition for {key!r}")
    return FsmConfig(m.delta[key], c.input[1:])


def step_pda(m: PDA, c: PdaConfig) -> PdaConfig:
    if m.accepting and c.state in m.accepting:
        raise Halted(f"PDA accepted in state {c.state!r}")
    top = c.stack[0] if c.stack else m.blank
    eps_key = (c.state, EPSILON, top)
    head = c.input[0] if c.input else m.blank
    key = (c.state, head, top)
    if eps_key in m.delta:
        q2, push = m.delta[eps_key]
        consumed = False
    elif key in m.delta:
        q2, push = m.delta[key]
        consumed = True
    elif not m.accepting and not c.stack and not c.input:
        raise Halted("PDA accepted by empty stack")
    else:
        raise UndefinedTransitionError(f"no PDA transition for {key!r}")
    stack = c.stack[1:] if push == EPSILON else (push,) + c.stack
    return PdaConfig(q2, _strip_blanks(stack, m.blank),
                     c.input[1:] if consumed else c.input)


def step_tdr(m: TDR, c: TdrConfig) -> TdrConfig:
    g = m.grammar
    if not c.stack and not c.input:
        raise Halted("TDR accepted by empty stack")
    if not c.stack:
        raise UndefinedTransitionError("input remains but the stack is empty")
    top = c.stack[0]
    if top in g.nonterminals:
        return TdrConfig(g.rules[top] + c.stack[1:], c.input)
    if c.input and c.input[0] == top:
        return TdrConfig(c.stack[1:], c.input[1:])
    head = c.input[0] if c.input else m.blank
    raise UndefinedTransitionError(f"stack top {top!r} does not match input {head!r}")


def step_tm(m: TM, c: TmConfig) -> TmConfig:
    if c.state in m.halting:
        raise Halted(f"TM halted in state {c.state!r}")
    head = c.right[0] if c.right else m.blank
    key = (c.state, head)
    if key not in m.delta:
        raise UndefinedTransitionError(f"no TM transition for {key!r}")
    q2, written, move = m.delta[key]
    right = (written,) + (c.right[1:] if c.right else ())
    if move == "R":
        return TmConfig(_strip_blanks((right[0],) + c.left, m.blank), q2,
                        _strip_blanks(right[1:], m.blank))
    prev = c.left[0] if c.left else m.blank
    return TmConfig(_strip_blanks(c.left[1:] if c.left else (), m.blank), q2,
                    _strip_blanks((prev,) + right, m.blank))


# --- configuration codecs -------------------------------------------------------


def encode_config(machine, config) -> DottedSequence:
    """Lay a machine configuration out on a dotted sequence."""
    if isinstance(machine, FSM):
        return DottedSequence((config.state,), config.input,
                              fill_left=None, fill_right=machine.blank)
    if isinstance(machine, TDR):
        return DottedSequence(config.stack, config.input,
                              fill_left=machine.blank, fill_right=machine.blank)
    if isinstance(machine, PDA):
        return DottedSequence((config.state,) + config.stack, config.input,
                              fill_left=machine.blank, fill_right=machine.blank)
    if isinstance(machine, TM):
        return DottedSequence((config.state,) + config.left, config.right,
                              fill_left=machine.blank, fill_right=machine.blank)
    raise TypeError(f"unknown machine type {type(machine).__name__}")


def decode_config(machine, s: DottedSequence):
    """Invert :func:`encode_config`; raises when the layout does not fit."""
    if isinstance(machine, FSM):
        if len(s.left) != 1 or s.left[0] not in machine.states:
            raise MalformedConfigurationError(
                f"FSM layout needs exactly the state left of the dot, got {s.left!r}"
            )
        return FsmConfig(s.left[0], s.right)
    if isinstance(machine, TDR):
        return TdrConfig(s.left, s.right)
    if isinstance(machine, PDA):
        if not s.left or s.left[0] not in machine.states:
            raise MalformedConfigurationError(
                f"PDA layout needs the state at index -1, got {s.left!r}"
            )
        return PdaConfig(s.left[0], s.left[1:], s.right)
    if isinstance(machine, TM):
        if not s.left or s.left[0] not in machine.states:
            raise MalformedConfigurationError(
                f"TM layout needs the state at index -1, got {s.left!r}"
            )
        return TmConfig(s.left[1:], s.left[0], s.right)
    raise TypeError(f"unknown machine type {type(machine).__name__}")


def step_machine(machine, config):
    """Dispatch to the kind-specific step function."""
    if isinstance(machine, FSM):
        return step_fsm(machine, config)
    if isinstance(machine, PDA):
        return step_pda(machine, config)
    if isinstance(machine, TDR):
        return step_tdr(machine, config)
    if isinstance(machine, TM):
        return step_tm(machine, config)
    raise TypeError(f"unknown machine type {type(machine).__name__}")


# --- compilers to versatile shifts ----------------------------------------------


def fsm_to_vs(m: FSM) -> VersatileShift:
    """DoD (-2, 1); one rule q.d -> q'. per transition, consuming the input.

    Without a declared blank the first input symbol acts as the fill: the
    encoded configuration space cannot express input exhaustion, it only sees
    the infinite extension by the symbol enumerated as zero.
    """
    rules = {}
    for (q, d), q2 in m.delta.items():
        rules[((q,), (d,))] = Rule(((q2,), ()), 0)
    fill = m.blank if m.blank is not None else m.input_symbols[0]
    return VersatileShift(DoD(-2, 1), rules, fill_left=None, fill_right=fill)


def pda_to_vs(m: PDA) -> VersatileShift:
    """DoD (-3, 1); pops drop the old top, pushes stack above it.

    Epsilon-input entries expand to one rule per input symbol (including the
    blank for exhausted input) that re-emits the symbol unread, keeping the
    DoD uniform across the table.
    """
    rules = {}

    def emit(q, s0, kappa, q2, push, consumed):
        left = (q2,) if push == EPSILON else (q2, push, s0)
        right = () if consumed else (kappa,)
        key = ((q, s0), (kappa,))
        if key in rules:
            raise NondeterministicMachineError(f"two PDA rules compete for {key!r}")
        rules[key] = Rule((left, right), 0)

    lookaheads = tuple(m.input_symbols)
    if m.blank not in lookaheads:
        lookaheads += (m.blank,)
    for (q, d, s0), (q2, push) in m.delta.items():
        if d == EPSILON:
            for kappa in lookaheads:
                emit(q, s0, kappa, q2, push, consumed=False)
        else:
            emit(q, s0, d, q2, push, consumed=True)
    return VersatileShift(DoD(-3, 1), rules, fill_left=m.blank, fill_right=m.blank)


def tdr_from_cfg(g: CFG, blank: str = DEFAULT_BLANK) -> TDR:
    return TDR(g, blank)


def tdr_to_vs(m: TDR) -> VersatileShift:
    """DoD (-2, 1); match rules a.a -> . and lookahead-preserving expansions.

    An expansion replaces the nonterminal on the stack with its right-hand
    side (first symbol becoming the new top) and leaves the lookahead in
    place; it is emitted for every lookahead including the blank so input may
    run out mid-derivation.
    """
    g = m.grammar
    rules = {}
    for a in g.terminals:
        rules[((a,), (a,))] = Rule(((), ()), 0)
    lookaheads = g.terminals + (m.blank,)
    for lhs, rhs in g.rules.items():
        for a in lookaheads:
            rules[((lhs,), (a,))] = Rule((tuple(rhs), (a,)), 0)
    return VersatileShift(DoD(-2, 1), rules, fill_left=m.blank, fill_right=m.blank)


def tm_to_vs(m: TM, halting: str = "identity") -> VersatileShift:
    """DoD (-3, 1); head moves become dot shifts that re-seat the state.

    A right move rewrites d-1 q . d0 into d-1 d' . q' and shifts the dot right
    (count -1); a left move rewrites into q' d-1 . d' and shifts left (+1).
    With ``halting="identity"`` halting states compile to fixed-point rules;
    with ``halting="reject"`` they stay undefined.
    """
    if halting not in ("identity", "reject"):
        raise ValueError(f"halting must be 'identity' or 'reject', got {halting!r}")
    rules = {}
    for (q, d0), (q2, written, move) in m.delta.items():
        for d_prev in m.tape_symbols:
            key = ((q, d_prev), (d0,))
            if move == "R":
                rules[key] = Rule(((written, d_prev), (q2,)), -1)
            else:
                rules[key] = Rule(((d_prev, q2), (written,)), +1)
    if halting == "identity":
        for q in m.halting:
            for d_prev in m.tape_symbols:
                for d0 in m.tape_symbols:
                    key = ((q, d_prev), (d0,))
                    rules[key] = Rule((key[0], key[1]), 0)
    return VersatileShift(DoD(-3, 1), rules, fill_left=m.blank, fill_right=m.blank)


def machine_to_vs(machine, **kwargs) -> VersatileShift:
    if isinstance(machine, FSM):
        return fsm_to_vs(machine)
    if isinstance(machine, PDA):
        return pda_to_vs(machine)
    if isinstance(machine, TDR):
        return tdr_to_vs(machine)
    if isinstance(machine, TM):
        return tm_to_vs(machine, **kwargs)
    raise TypeError(f"unknown machine type {type(machine).__name__}")


# --- default encodings ----------------------------------------------------------


def _blank_first(symbols, blank):
    symbols = tuple(symbols)
    if blank is None:
        return symbols
    rest = tuple(s for s in symbols if s != blank)
    return (blank,) + rest


def default_encodings(machine):
    """(x encoding, y encoding) with the blank enumerated first on each side.

    State-leading sides (FSM, PDA, TM left) use the refined encoding; the
    others are plain. Worked systems override these with their published maps.
    """
    if isinstance(machine, FSM):
        gy = GammaMap(_blank_first(machine.input_symbols, machine.blank))
        gq = GammaMap(machine.states)
        return RefinedEncoding(RefinedGammaMap(gq, gy)), PlainEncoding(gy)
    if isinstance(machine, PDA):
        gs = GammaMap(_blank_first(machine.stack_symbols, machine.blank)
                      if machine.blank in machine.stack_symbols
                      else (machine.blank,) + machine.stack_symbols)
        gi = GammaMap((machine.blank,) + tuple(
            s for s in machine.input_symbols if s != machine.blank))
        gq = GammaMap(machine.states)
        return RefinedEncoding(RefinedGammaMap(gq, gs)), PlainEncoding(gi)
    if isinstance(machine, TDR):
        g = machine.grammar
        stack_map = GammaMap((machine.blank,) + g.nonterminals + g.terminals)
        input_map = GammaMap((machine.blank,) + g.terminals)
        return PlainEncoding(stack_map), PlainEncoding(input_map)
    if isinstance(machine, TM):
        gt = GammaMap(_blank_first(machine.tape_symbols, machine.blank))
        gq = GammaMap(machine.states)
        return RefinedEncoding(RefinedGammaMap(gq, gt)), PlainEncoding(gt)
    raise TypeError(f"unknown machine type {type(machine).__name__}")
