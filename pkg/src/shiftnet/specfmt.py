"""Line-oriented specification format for machines and interactive networks.

A document is `key: value` lines, with repeatable keys (`transition:`,
`rule:`, `vsrule:`) collecting in order. Interactive documents add `tape NAME:`
and `component NAME:` blocks whose indented lines belong to the block.
Comments start with `#`. Gamma maps are written as `symbol=index` pairs; the
token `eps` stands for the empty word in transitions and grammar rules and is
not a legal symbol name.

Rendering is canonical (fixed key order, single spacing), and parsing a
rendered document yields the original structure, so documents round-trip
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .automata import (
    CFG,
    EPSILON,
    FSM,
    PDA,
    TM,
    machine_to_vs,
    tdr_from_cfg,
)
from .errors import SpecParseError, SpecSemanticError
from .godel import GammaMap, PlainEncoding, RefinedEncoding, RefinedGammaMap
from .interactive import ComponentBinding, InteractiveNetwork, SubsequenceTape, build_ian
from .symbolic import DoD, Rule, VersatileShift

EPS_TOKEN = "eps"

_KEY_ORDER = [
    "type", "states", "nonterminals", "terminals", "tape_alphabet",
    "stack_alphabet", "input_alphabet", "blank", "start", "accept",
    "halting_states", "halting_mode", "gamma_states", "gamma_tape",
    "gamma_stack", "gamma_input", "state_gamma", "tape_gamma", "gamma",
    "initial", "stage", "reads", "writes", "gate", "dod",
    "transition", "rule", "vsrule",
]
_REPEATABLE = {"transition", "rule", "vsrule"}


@dataclass(frozen=True)
class Block:
    kind: str  # 'tape' | 'component'
    name: str
    fields: Tuple[Tuple[str, str], ...]

    def values(self, key: str) -> Tuple[str, ...]:
        return tuple(v for k, v in self.fields if k == key)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        vals = self.values(key)
        if len(vals) > 1:
            raise SpecSemanticError(f"key {key!r} given more than once")
        return vals[0] if vals else default

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None:
            raise SpecSemanticError(f"missing required key {key!r}")
        return value


@dataclass(frozen=True)
class SpecDocument:
    fields: Tuple[Tuple[str, str], ...]
    blocks: Tuple[Block, ...] = ()

    def values(self, key: str) -> Tuple[str, ...]:
        return tuple(v for k, v in self.fields if k == key)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        vals = self.values(key)
        if len(vals) > 1:
            raise SpecSemanticError(f"key {key!r} given more than once")
        return vals[0] if vals else default

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None:
            raise SpecSemanticError(f"missing required key {key!r}")
        return value

    @property
    def kind(self) -> str:
        return self.require("type")


def parse_spec(text: str) -> SpecDocument:
    top: List[Tuple[str, str]] = []
    blocks: List[Block] = []
    block_kind = block_name = None
    block_fields: List[Tuple[str, str]] = []

    def close_block():
        nonlocal block_kind, block_name, block_fields
        if block_kind is not None:
            blocks.append(Block(block_kind, block_name, tuple(block_fields)))
            block_kind = block_name = None
            block_fields = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indented = raw[:1].isspace()
        if ":" not in stripped:
            raise SpecParseError(f"expected 'key: value', got {stripped!r}", lineno)
        key, _, value = stripped.partition(":")
        key, value = key.strip(), value.strip()
        head = key.split()
        if not indented and head[0] in ("tape", "component"):
            if len(head) != 2:
                raise SpecParseError(
                    f"block header must be '{head[0]} NAME:', got {stripped!r}", lineno)
            if value:
                raise SpecParseError("block headers take no value", lineno)
            close_block()
            block_kind, block_name = head[0], head[1]
            continue
        if len(head) != 1:
            raise SpecParseError(f"bad key {key!r}", lineno)
        if indented:
            if block_kind is None:
                raise SpecParseError("indented line outside any block", lineno)
            block_fields.append((key, value))
        else:
            close_block()
            top.append((key, value))
    close_block()
    doc = SpecDocument(tuple(top), tuple(blocks))
    doc.require("type")
    return doc


def _render_fields(fields, indent=""):
    singles = {}
    repeats: List[Tuple[str, str]] = []
    for key, value in fields:
        if key in _REPEATABLE:
            repeats.append((key, value))
        else:
            if key in singles:
                raise SpecSemanticError(f"key {key!r} given more than once")
            singles[key] = value
    lines = []
    for key in _KEY_ORDER:
        if key in singles:
            lines.append(f"{indent}{key}: {singles.pop(key)}")
    for key in sorted(singles):
        lines.append(f"{indent}{key}: {singles[key]}")
    for key, value in repeats:
        lines.append(f"{indent}{key}: {value}")
    return lines


def render_spec(doc: SpecDocument) -> str:
    lines = _render_fields(doc.fields)
    for block in doc.blocks:
        lines.append(f"{block.kind} {block.name}:")
        lines.extend(_render_fields(block.fields, indent="  "))
    return "\n".join(lines) + "\n"


# --- field helpers ----------------------------------------------------------------


def _symbols(value: str) -> Tuple[str, ...]:
    syms = tuple(value.split())
    for s in syms:
        if s == EPS_TOKEN:
            raise SpecSemanticError(f"{EPS_TOKEN!r} is reserved for the empty word")
    return syms


def _gamma(value: str) -> GammaMap:
    pairs = []
    for item in value.split():
        if "=" not in item:
            raise SpecSemanticError(f"gamma entries look like symbol=index: {item!r}")
        sym, _, idx = item.rpartition("=")
        pairs.append((sym, int(idx)))
    return GammaMap.from_pairs(pairs)


def _gamma_or_default(holder, key: str, default_symbols) -> GammaMap:
    value = holder.get(key)
    if value is None:
        return GammaMap(tuple(default_symbols))
    return _gamma(value)


def _blank_first(symbols, blank):
    return (blank,) + tuple(s for s in symbols if s != blank)


def _check_blank_is_zero(gamma: GammaMap, blank: Optional[str], what: str):
    if blank is not None and blank in gamma and gamma.index(blank) != 0:
        raise SpecSemanticError(f"{what}: the blank must be enumerated as 0")


# --- machine builders ---------------------------------------------------------------


@dataclass
class BuiltMachine:
    machine: object
    gx: object
    gy: object
    vs_kwargs: Dict[str, str] = field(default_factory=dict)


def _build_fsm(doc) -> BuiltMachine:
    states = _symbols(doc.require("states"))
    inputs = _symbols(doc.require("input_alphabet"))
    blank = doc.get("blank")
    delta = {}
    for line in doc.values("transition"):
        left, _, right = line.partition("->")
        parts = left.split()
        if len(parts) != 2 or not right.strip():
            raise SpecSemanticError(f"FSM transition looks like 'q a -> q2': {line!r}")
        delta[(parts[0], parts[1])] = right.strip()
    m = FSM(states=states, input_symbols=inputs, start=doc.require("start"),
            accepting=frozenset(_symbols(doc.get("accept", ""))), delta=delta,
            blank=blank)
    gq = _gamma_or_default(doc, "gamma_states", states)
    gi = _gamma_or_default(doc, "gamma_input",
                           _blank_first(inputs, blank) if blank else inputs)
    _check_blank_is_zero(gi, blank, "gamma_input")
    return BuiltMachine(m, RefinedEncoding(RefinedGammaMap(gq, gi)), PlainEncoding(gi))


def _build_pda(doc) -> BuiltMachine:
    states = _symbols(doc.require("states"))
    stack = _symbols(doc.require("stack_alphabet"))
    inputs = _symbols(doc.require("input_alphabet"))
    blank = doc.get("blank", "_")
    delta = {}
    for line in doc.values("transition"):
        left, _, right = line.partition("->")
        lparts, rparts = left.split(), right.split()
        if len(lparts) != 3 or not rparts:
            raise SpecSemanticError(
                f"PDA transition looks like 'q a s -> q2 push x|pop': {line!r}")
        q, a, s = lparts
        a = EPSILON if a == EPS_TOKEN else a
        if len(rparts) == 2 and rparts[1] == "pop":
            delta[(q, a, s)] = (rparts[0], EPSILON)
        elif len(rparts) == 3 and rparts[1] == "push":
            delta[(q, a, s)] = (rparts[0], rparts[2])
        else:
            raise SpecSemanticError(
                f"PDA transition action must be 'push x' or 'pop': {line!r}")
    m = PDA(states=states, stack_symbols=stack, input_symbols=inputs,
            start=doc.require("start"),
            accepting=frozenset(_symbols(doc.get("accept", ""))),
            delta=delta, blank=blank)
    gq = _gamma_or_default(doc, "gamma_states", states)
    gs = _gamma_or_default(doc, "gamma_stack", _blank_first(stack, blank))
    gi = _gamma_or_default(doc, "gamma_input", _blank_first(inputs, blank))
    _check_blank_is_zero(gs, blank, "gamma_stack")
    _check_blank_is_zero(gi, blank, "gamma_input")
    return BuiltMachine(m, RefinedEncoding(RefinedGammaMap(gq, gs)), PlainEncoding(gi))


def _parse_grammar_rules(doc):
    rules = []
    for line in doc.values("rule"):
        lhs, _, rhs = line.partition("->")
        lhs = lhs.strip()
        rhs_tokens = rhs.split()
        if rhs_tokens == [EPS_TOKEN]:
            rhs_tokens = []
        if not lhs or "->" not in line:
            raise SpecSemanticError(f"grammar rule looks like 'X -> w': {line!r}")
        rules.append((lhs, tuple(rhs_tokens)))
    return rules


def _build_tdr(doc) -> BuiltMachine:
    nonterminals = _symbols(doc.require("nonterminals"))
    terminals = _symbols(doc.require("terminals"))
    blank = doc.get("blank", "_")
    grammar = CFG.from_rules(_parse_grammar_rules(doc), start=doc.require("start"),
                             terminals=terminals, nonterminals=nonterminals)
    m = tdr_from_cfg(grammar, blank=blank)
    default = (blank,) + nonterminals + terminals
    gs = _gamma_or_default(doc, "gamma_stack", default)
    gi = _gamma_or_default(doc, "gamma_input", default)
    _check_blank_is_zero(gs, blank, "gamma_stack")
    _check_blank_is_zero(gi, blank, "gamma_input")
    return BuiltMachine(m, PlainEncoding(gs), PlainEncoding(gi))


def _build_tm(doc) -> BuiltMachine:
    states = _symbols(doc.require("states"))
    tape = _symbols(doc.require("tape_alphabet"))
    blank = doc.get("blank", "_")
    delta = {}
    for line in doc.values("transition"):
        left, _, right = line.partition("->")
        lparts, rparts = left.split(), right.split()
        if len(lparts) != 2 or len(rparts) != 3 or rparts[2] not in ("L", "R"):
            raise SpecSemanticError(
                f"TM transition looks like 'q a -> q2 b L|R': {line!r}")
        delta[(lparts[0], lparts[1])] = (rparts[0], rparts[1], rparts[2])
    inputs = doc.get("input_alphabet")
    input_symbols = _symbols(inputs) if inputs else tuple(
        s for s in tape if s != blank)
    m = TM(states=states, tape_symbols=tape, input_symbols=input_symbols,
           start=doc.require("start"), blank=blank,
           halting=frozenset(_symbols(doc.get("halting_states", ""))), delta=delta)
    gq = _gamma_or_default(doc, "gamma_states", states)
    gt = _gamma_or_default(doc, "gamma_tape", _blank_first(tape, blank))
    _check_blank_is_zero(gt, blank, "gamma_tape")
    mode = doc.get("halting_mode", "identity")
    return BuiltMachine(m, RefinedEncoding(RefinedGammaMap(gq, gt)), PlainEncoding(gt),
                        vs_kwargs={"halting": mode})


_MACHINE_BUILDERS = {
    "fsm": _build_fsm,
    "pda": _build_pda,
    "tdr": _build_tdr,
    "cfg": _build_tdr,
    "tm": _build_tm,
}


def _parse_vs_rules(doc, dod: DoD):
    rules = {}
    for line in doc.values("vsrule"):
        body, shift = line, 0
        if " shift " in line:
            body, _, count = line.rpartition(" shift ")
            shift = int(count)
        left, _, right = body.partition("->")
        key = _parse_dotted_tokens(left, dod)
        repl = _parse_dotted_tokens(right, None)
        rules[key] = Rule(repl, shift)
    return rules


def _parse_dotted_tokens(text: str, dod: Optional[DoD]):
    tokens = text.split()
    if tokens.count(".") != 1:
        raise SpecSemanticError(f"dotted word needs exactly one dot: {text!r}")
    i = tokens.index(".")
    left = tuple(reversed(tokens[:i]))
    right = tuple(tokens[i + 1:])
    if dod is not None and (len(left) != dod.left_len or len(right) != dod.right_len):
        raise SpecSemanticError(
            f"dotted word {text!r} does not fit DoD ({dod.left_len}, {dod.right_len})")
    return (left, right)


def _build_vs(doc) -> VersatileShift:
    parts = doc.require("dod").split()
    if len(parts) != 2:
        raise SpecSemanticError("dod takes two integers: k_l k_r")
    dod = DoD(int(parts[0]), int(parts[1]))
    blank = doc.get("blank", "_")
    return VersatileShift(dod, _parse_vs_rules(doc, dod),
                          fill_left=blank, fill_right=blank)


def build_machine(doc: SpecDocument) -> BuiltMachine:
    kind = doc.kind
    if kind not in _MACHINE_BUILDERS:
        raise SpecSemanticError(f"unknown machine type {kind!r}")
    return _MACHINE_BUILDERS[kind](doc)


# --- interactive builder --------------------------------------------------------------


def _build_tape(block: Block) -> SubsequenceTape:
    gamma = block.get("gamma")
    initial = tuple(block.get("initial", "").split())
    if gamma is not None:
        return SubsequenceTape(block.name, PlainEncoding(_gamma(gamma)), initial)
    state_gamma = block.get("state_gamma")
    tape_gamma = block.get("tape_gamma")
    if state_gamma is None or tape_gamma is None:
        raise SpecSemanticError(
            f"tape {block.name!r} needs either gamma or state_gamma + tape_gamma")
    maps = RefinedGammaMap(_gamma(state_gamma), _gamma(tape_gamma))
    return SubsequenceTape(block.name, RefinedEncoding(maps), initial)


def _build_component(block: Block) -> Tuple[int, ComponentBinding]:
    stage = int(block.require("stage"))
    reads = tuple(block.require("reads").split())
    writes = tuple(block.require("writes").split())
    gate_value = block.get("gate")
    gate = tuple(gate_value.split()) if gate_value else None
    if gate is not None and len(gate) != 2:
        raise SpecSemanticError(f"gate looks like 'TAPE STATE': {gate_value!r}")
    kind = block.require("type")
    if kind == "vs":
        vs = _build_vs(block)
    elif kind in _MACHINE_BUILDERS:
        built = _MACHINE_BUILDERS[kind](block)
        vs = machine_to_vs(built.machine, **built.vs_kwargs)
    else:
        raise SpecSemanticError(f"unknown component type {kind!r}")
    return stage, ComponentBinding(block.name, vs, reads=reads, writes=writes,
                                   gate=gate)


def build_interactive(doc: SpecDocument) -> InteractiveNetwork:
    tapes = [_build_tape(b) for b in doc.blocks if b.kind == "tape"]
    staged: Dict[int, List[ComponentBinding]] = {}
    for block in doc.blocks:
        if block.kind != "component":
            continue
        stage, binding = _build_component(block)
        staged.setdefault(stage, []).append(binding)
    if not staged:
        raise SpecSemanticError("an interactive document needs components")
    indices = sorted(staged)
    if indices != list(range(1, len(indices) + 1)):
        raise SpecSemanticError(f"stages must be 1..k, got {indices!r}")
    return build_ian(tapes, [staged[i] for i in indices])


@dataclass
class BuiltSpec:
    doc: SpecDocument
    machine: Optional[BuiltMachine] = None
    interactive: Optional[InteractiveNetwork] = None

    @property
    def is_interactive(self) -> bool:
        return self.interactive is not None


def build(doc: SpecDocument) -> BuiltSpec:
    if doc.kind == "interactive":
        return BuiltSpec(doc, interactive=build_interactive(doc))
    return BuiltSpec(doc, machine=build_machine(doc))
