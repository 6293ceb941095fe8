"""Interactive automata networks: coupled tapes, chained configuration layers,
and subroutine gating by a meta branch-selection layer.

A network holds named one-sided tapes, each with its own encoding, and an
ordered list of pipeline stages between consecutive configuration layers
(CLs). Every component binds two tapes as the (x, y) sides of its dotted
sequence; it reads both, and writes back the sides named in ``writes``. The
last CL feeds the first one identically, closing the single recurrence.

A component may be gated on a control tape: a meta branch-selection layer
thresholds that tape's code with the same half-h excitation / lateral
inhibition arithmetic as the in-network branch selection, so exactly one
gated component is enabled per macro step. Disabled components contribute
nothing; the enabled one supplies the written tapes. Component shifts are
compiled with identity completion: a configuration no rule matches passes
through unchanged, which is what lets the assembled network idle at a fixed
point between inputs.

The garden-path build wires four tapes (input, parse, diagnosis, strategy)
and five components: two single-rule parsers in opposite constituent orders,
a reanalysis rewriter, a change-monitoring push-down automaton, and a
strategy controller that picks which parser runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .automata import FSM, PDA, fsm_to_vs, pda_to_vs, tdr_from_cfg, tdr_to_vs
from .automata import CFG
from .errors import (
    NoActiveBranchError,
    SpecSemanticError,
    UngatedOverlapError,
    WriteConflictError,
)
from .godel import (
    GammaMap,
    PlainEncoding,
    RefinedEncoding,
    RefinedGammaMap,
)
from .nda import vs_to_nda
from .rann import Network, init_state, macro_step_stages, nda_to_rann
from .symbolic import DoD, DottedSequence, Rule, VersatileShift, Word, apply_vs_or_identity

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class SubsequenceTape:
    """A named one-sided symbol tape with the encoding that owns its code."""

    name: str
    encoding: object  # PlainEncoding | RefinedEncoding
    initial: Word = ()

    def encode(self, word: Word) -> Fraction:
        return self.encoding.encode(word)


@dataclass(frozen=True)
class ComponentBinding:
    """A compiled shift acting on two tapes, optionally gated by a control state.

    ``reads`` names the (x, y) tapes of the component's dotted sequence;
    ``writes`` is the subset whose new values the component supplies to the
    next configuration layer. ``gate`` is (control tape, activating state).
    """

    name: str
    vs: VersatileShift
    reads: Tuple[str, str]
    writes: Tuple[str, ...]
    gate: Optional[Tuple[str, str]] = None

    def __post_init__(self):
        if len(self.reads) != 2:
            raise ValueError(f"component {self.name!r} must read exactly (x, y) tapes")
        for t in self.writes:
            if t not in self.reads:
                raise ValueError(
                    f"component {self.name!r} writes {t!r} which it does not read"
                )


@dataclass(frozen=True)
class MetaBsl:
    """Heaviside gate over a control tape's code, one unit per gated component."""

    tape: str
    thresholds: Tuple[Fraction, ...]  # ascending cylinder lows
    components: Tuple[str, ...]  # aligned with thresholds

    def evaluate(self, code: Fraction) -> Tuple[Tuple[Fraction, ...], str]:
        """Unit activations and the single enabled component.

        The gate sums (u_k - u_{k+1}) * h/2 reach h on exactly one entry
        because the Heaviside activations are monotone over the thresholds.
        """
        units = tuple(ONE if code >= t else ZERO for t in self.thresholds)
        selected = None
        for k, u in enumerate(units):
            nxt = units[k + 1] if k + 1 < len(units) else ZERO
            if u - nxt == ONE:
                if selected is not None:
                    raise SpecSemanticError("meta gate selected two components")
                selected = self.components[k]
        if selected is None:
            raise NoActiveBranchError(("meta",), component=self.tape)
        return units, selected


class InteractiveNetwork:
    """Tapes, staged component pipeline, compiled sub-networks, and the gate."""

    def __init__(self, tapes: Sequence[SubsequenceTape],
                 stages: Sequence[Sequence[ComponentBinding]]):
        self.tapes: Dict[str, SubsequenceTape] = {}
        for tape in tapes:
            if tape.name in self.tapes:
                raise SpecSemanticError(f"duplicate tape name {tape.name!r}")
            self.tapes[tape.name] = tape
        self.stages: Tuple[Tuple[ComponentBinding, ...], ...] = tuple(
            tuple(stage) for stage in stages
        )
        self.components: Dict[str, ComponentBinding] = {}
        for stage in self.stages:
            for binding in stage:
                if binding.name in self.components:
                    raise SpecSemanticError(f"duplicate component {binding.name!r}")
                for t in binding.reads:
                    if t not in self.tapes:
                        raise SpecSemanticError(
                            f"component {binding.name!r} reads unknown tape {t!r}")
                self.components[binding.name] = binding
        self._validate_writers()
        self.meta = self._build_meta()
        self.networks: Dict[str, Network] = {}
        for name, binding in self.components.items():
            gx = self.tapes[binding.reads[0]].encoding
            gy = self.tapes[binding.reads[1]].encoding
            nda = vs_to_nda(binding.vs, gx, gy, undefined="identity")
            self.networks[name] = nda_to_rann(nda)

    @property
    def n_layers(self) -> int:
        return len(self.stages) + 1

    def _validate_writers(self):
        for stage in self.stages:
            claimed: Dict[str, ComponentBinding] = {}
            gate_states: Dict[str, set] = {}
            for binding in stage:
                for t in binding.writes:
                    other = claimed.get(t)
                    if other is None:
                        claimed[t] = binding
                        continue
                    if binding.gate is None or other.gate is None:
                        raise WriteConflictError(
                            f"tape {t!r} has two writers in one stage: "
                            f"{other.name!r} and {binding.name!r}")
                if binding.gate is not None:
                    tape, state = binding.gate
                    states = gate_states.setdefault(tape, set())
                    if state in states:
                        raise UngatedOverlapError(
                            f"two components activate on {tape!r} state {state!r}")
                    states.add(state)

    def _build_meta(self) -> Optional[MetaBsl]:
        gated = [(b.gate, b) for stage in self.stages for b in stage if b.gate]
        if not gated:
            return None
        tapes = {gate[0] for gate, _ in gated}
        if len(tapes) != 1:
            raise SpecSemanticError("all gated components must share one control tape")
        tape_name = tapes.pop()
        encoding = self.tapes[tape_name].encoding
        if not isinstance(encoding, RefinedEncoding):
            raise SpecSemanticError("the control tape must carry a state-leading code")
        states = encoding.maps.states
        by_state = {gate[1]: b.name for gate, b in gated}
        missing = [q for q in states.symbols if q not in by_state]
        if missing:
            raise SpecSemanticError(
                f"gating does not cover control states {missing!r}; the gate "
                f"intervals must tile the code space")
        thresholds, components = [], []
        for q in states.symbols:  # enumeration order is threshold order
            lo, _ = encoding.cylinder((q,))
            thresholds.append(lo)
            components.append(by_state[q])
        return MetaBsl(tape_name, tuple(thresholds), tuple(components))

    # --- state construction ------------------------------------------------

    def initial_codes(self) -> Dict[str, Fraction]:
        return {name: tape.encode(tape.initial) for name, tape in self.tapes.items()}

    def initial_words(self) -> Dict[str, Word]:
        return {name: tuple(tape.initial) for name, tape in self.tapes.items()}

    def initial_state(self, settled: bool = True) -> "IanState":
        """The resting state; with ``settled`` the layer activity is the
        steady resting pattern (one quiescent pass), not all-zero, so the
        pre-stimulus baseline equals the level the network rests at."""
        codes = self.initial_codes()
        state = IanState(
            cls=tuple(dict(codes) for _ in range(self.n_layers)),
            component_bsl={n: () for n in self.components},
            component_ltl={n: () for n in self.components},
            meta=tuple(ZERO for _ in (self.meta.components if self.meta else ())),
        )
        if settled:
            state = step_ian(self, state)
            if state.codes != codes:
                raise SpecSemanticError("the initial tape contents are not a fixed point")
        return state

    def unit_count(self, include_bias: bool = False) -> int:
        """CL units plus every component's selection and transformation units.

        Component configuration units are identified with CL slots, so only
        their BSL and LTL layers add units; one shared bias closes the count.
        """
        total = self.n_layers * len(self.tapes)
        for name, net in self.networks.items():
            total += net.m + net.n + 2 * net.m * net.n
        if self.meta:
            total += len(self.meta.components)
        return total + (1 if include_bias else 0)


@dataclass(frozen=True)
class IanState:
    """One macro step's pipeline snapshot: tape codes at every CL plus layers."""

    cls: Tuple[Dict[str, Fraction], ...]
    component_bsl: Dict[str, Tuple[Fraction, ...]]
    component_ltl: Dict[str, Tuple[Fraction, ...]]
    meta: Tuple[Fraction, ...]

    @property
    def codes(self) -> Dict[str, Fraction]:
        """Canonical tape codes: the last configuration layer."""
        return self.cls[-1]

    def activations(self) -> List[Fraction]:
        """Every unit value, bias excluded: CL slots, component layers, gate."""
        values: List[Fraction] = []
        for cl in self.cls:
            values.extend(cl.values())
        for name in sorted(self.component_bsl):
            values.extend(self.component_bsl[name])
            values.extend(self.component_ltl[name])
        values.extend(self.meta)
        return values


def build_ian(tapes, stages) -> InteractiveNetwork:
    return InteractiveNetwork(tapes, stages)


def _bsl_only(net: Network, x: Fraction, y: Fraction) -> Tuple[Fraction, ...]:
    """Selection-layer activations of a disabled component: it still sees its
    inputs, only its transformation layer is inhibited by the meta gate."""
    bx = tuple(ONE if x >= t else ZERO for t in net.x_thresholds)
    by = tuple(ONE if y >= t else ZERO for t in net.y_thresholds)
    return bx + by


def step_ian(net: InteractiveNetwork, state: IanState,
             override: Optional[Dict[str, Fraction]] = None) -> IanState:
    """One pass CL1 -> ... -> CLk -> CL1.

    The meta gate is evaluated on the first CL; each stage's components read
    the previous CL and write their tapes into the next; untouched tapes copy
    forward. Raises NoActiveBranchError with the component name if a
    component's configuration leaves the covered code space.
    """
    cl1 = dict(state.codes)
    if override:
        for tape, code in override.items():
            if tape not in net.tapes:
                raise SpecSemanticError(f"override on unknown tape {tape!r}")
            cl1[tape] = Fraction(code)
    layers = [cl1]

    meta_units: Tuple[Fraction, ...] = ()
    enabled: Optional[str] = None
    if net.meta is not None:
        meta_units, enabled = net.meta.evaluate(cl1[net.meta.tape])

    bsl: Dict[str, Tuple[Fraction, ...]] = {}
    ltl: Dict[str, Tuple[Fraction, ...]] = {}
    for stage in net.stages:
        prev = layers[-1]
        nxt = dict(prev)
        for binding in stage:
            comp = net.networks[binding.name]
            x = prev[binding.reads[0]]
            y = prev[binding.reads[1]]
            if binding.gate is not None and binding.name != enabled:
                bsl[binding.name] = _bsl_only(comp, x, y)
                ltl[binding.name] = tuple(ZERO for _ in range(2 * comp.m * comp.n))
                continue
            try:
                stages_out = macro_step_stages(comp, init_state(comp, x, y))
            except NoActiveBranchError as e:
                raise NoActiveBranchError(e.cell, e.label, component=binding.name)
            final = stages_out.after_mcl
            bsl[binding.name] = tuple(
                stages_out.after_bsl[i] for i in comp.bsl_x + comp.bsl_y)
            ltl[binding.name] = tuple(
                stages_out.after_ltl[i]
                for pair in comp.ltl.values() for i in pair)
            outputs = {binding.reads[0]: final[comp.mcl_x],
                       binding.reads[1]: final[comp.mcl_y]}
            for tape in binding.writes:
                nxt[tape] = outputs[tape]
        layers.append(nxt)

    return IanState(cls=tuple(layers), component_bsl=bsl, component_ltl=ltl,
                    meta=meta_units)


# --- symbolic co-simulation ------------------------------------------------------


def step_ian_symbolic(net: InteractiveNetwork, words: Dict[str, Word],
                      override: Optional[Dict[str, Word]] = None) -> Dict[str, Word]:
    """The same pipeline on symbol tapes: apply each component's shift (or the
    identity when no rule matches) to the dotted pairing of its bound tapes."""
    current = {k: tuple(v) for k, v in words.items()}
    if override:
        current.update({k: tuple(v) for k, v in override.items()})

    enabled = None
    if net.meta is not None:
        control = current[net.meta.tape]
        encoding = net.tapes[net.meta.tape].encoding
        state = control[0] if control else encoding.maps.states.symbols[0]
        for gate_state, name in zip(encoding.maps.states.symbols, net.meta.components):
            if state == gate_state:
                enabled = name

    for stage in net.stages:
        nxt = dict(current)
        for binding in stage:
            if binding.gate is not None and binding.name != enabled:
                continue
            x_tape, y_tape = binding.reads
            fill_x = _tape_fill(net.tapes[x_tape])
            fill_y = _tape_fill(net.tapes[y_tape])
            seq = DottedSequence(current[x_tape], current[y_tape], fill_x, fill_y)
            out = apply_vs_or_identity(binding.vs, seq)
            outputs = {x_tape: out.left, y_tape: out.right}
            for tape in binding.writes:
                nxt[tape] = outputs[tape]
        current = nxt
    return current


def _tape_fill(tape: SubsequenceTape) -> str:
    return tape.encoding.fill


def encode_words(net: InteractiveNetwork, words: Dict[str, Word]) -> Dict[str, Fraction]:
    return {name: net.tapes[name].encode(words[name]) for name in net.tapes}


# --- the garden-path system ------------------------------------------------------


GP_BLANK = "_"

INPUT_GAMMA = GammaMap((GP_BLANK, "S", "o", "s"))
PARSE_GAMMA = GammaMap((GP_BLANK, "o", "s"))
DIAGNOSIS_GAMMA = GammaMap(("idle", "parsing", "error"))
STRATEGY_GAMMA = GammaMap(("so", "os", "repair"))


def so_grammar() -> CFG:
    return CFG.from_rules([("S", ("s", "o"))], start="S", terminals=("o", "s"))


def os_grammar() -> CFG:
    return CFG.from_rules([("S", ("o", "s"))], start="S", terminals=("o", "s"))


def repair_vs() -> VersatileShift:
    """Reanalysis rewrite on the parse stack: the two symbols nearest the dot
    swap from subject-object to object-subject order; the input side is
    untouched (empty right DoD)."""
    return VersatileShift(
        DoD(-3, 0),
        {(("s", "o"), ()): Rule((("o", "s"), ()), 0)},
        fill_left=GP_BLANK,
        fill_right=GP_BLANK,
    )


def diagnosis_pda() -> PDA:
    """Change monitor: pushes every observed parse symbol and classifies the
    (previous, current) pair as idle (both blank), error (equal, non-blank)
    or parsing (changed)."""
    states = ("idle", "parsing", "error")
    symbols = (GP_BLANK, "o", "s")
    delta = {}
    for q in states:
        for prev in symbols:  # top of stack: last step's observation
            for cur in symbols:  # input: this step's parse top
                if prev == GP_BLANK and cur == GP_BLANK:
                    delta[(q, cur, prev)] = ("idle", GP_BLANK)
                elif prev == cur:
                    delta[(q, cur, prev)] = ("error", cur)
                else:
                    delta[(q, cur, prev)] = ("parsing", cur)
    return PDA(states=states, stack_symbols=symbols, input_symbols=symbols,
               start="idle", delta=delta, blank=GP_BLANK)


def strategy_fsm() -> FSM:
    """Controller over the diagnosis state: retry the preferred parser when
    idle, escalate through repair on error, then stay with the other order."""
    delta = {
        ("so", "idle"): "so", ("os", "idle"): "so", ("repair", "idle"): "so",
        ("so", "parsing"): "so", ("os", "parsing"): "os", ("repair", "parsing"): "os",
        ("so", "error"): "repair", ("os", "error"): "os", ("repair", "error"): "os",
    }
    return FSM(states=("so", "os", "repair"),
               input_symbols=("idle", "parsing", "error"),
               start="so", delta=delta)


@dataclass
class GardenPath:
    """The assembled network plus its pieces, for inspection and tests."""

    network: InteractiveNetwork
    so_parser: object
    os_parser: object
    repair: VersatileShift
    diagnosis: PDA
    strategy: FSM


def garden_path_network() -> GardenPath:
    grammar_symbols = PlainEncoding(INPUT_GAMMA)
    tapes = [
        SubsequenceTape("input", grammar_symbols),
        SubsequenceTape("parse", grammar_symbols),
        SubsequenceTape("diagnosis",
                        RefinedEncoding(RefinedGammaMap(DIAGNOSIS_GAMMA, PARSE_GAMMA)),
                        initial=("idle",)),
        SubsequenceTape("strategy",
                        RefinedEncoding(RefinedGammaMap(STRATEGY_GAMMA, PARSE_GAMMA)),
                        initial=("so",)),
    ]
    so_tdr = tdr_from_cfg(so_grammar(), blank=GP_BLANK)
    os_tdr = tdr_from_cfg(os_grammar(), blank=GP_BLANK)
    diag = diagnosis_pda()
    strat = strategy_fsm()
    parser_stage = [
        ComponentBinding("so-parser", tdr_to_vs(so_tdr),
                         reads=("parse", "input"), writes=("parse", "input"),
                         gate=("strategy", "so")),
        ComponentBinding("os-parser", tdr_to_vs(os_tdr),
                         reads=("parse", "input"), writes=("parse", "input"),
                         gate=("strategy", "os")),
        ComponentBinding("repair", repair_vs(),
                         reads=("parse", "input"), writes=("parse",),
                         gate=("strategy", "repair")),
    ]
    diagnosis_stage = [
        ComponentBinding("diagnosis", pda_to_vs(diag),
                         reads=("diagnosis", "parse"), writes=("diagnosis",)),
    ]
    strategy_stage = [
        ComponentBinding("strategy", fsm_to_vs(strat),
                         reads=("strategy", "diagnosis"), writes=("strategy",)),
    ]
    network = build_ian(tapes, [parser_stage, diagnosis_stage, strategy_stage])
    return GardenPath(network, so_tdr, os_tdr, parser_stage[2].vs, diag, strat)


# --- run bookkeeping --------------------------------------------------------------


@dataclass
class IanStepRecord:
    step: int
    state: IanState
    words: Dict[str, Word]
    enabled: Optional[str]
    parse_changed: bool


@dataclass
class IanRunTrace:
    records: List[IanStepRecord] = field(default_factory=list)

    def accepted_at(self, parse_tape="parse", input_tape="input") -> Optional[int]:
        """First step with parse and input both empty after material appeared."""
        seen_material = False
        for rec in self.records:
            empty = rec.words[parse_tape] == () and rec.words[input_tape] == ()
            if seen_material and empty:
                return rec.step
            seen_material = seen_material or not empty
        return None

    def count_enabled(self, name: str) -> int:
        return sum(1 for rec in self.records if rec.enabled == name)

    def count_diagnosis_state(self, state: str, tape="diagnosis") -> int:
        return sum(1 for rec in self.records
                   if rec.words[tape] and rec.words[tape][0] == state)


def run_ian(net: InteractiveNetwork, stimulus: Optional[Dict[str, Fraction]],
            max_steps: int, stimulus_words: Optional[Dict[str, Word]] = None,
            presentation_step: int = 2) -> IanRunTrace:
    """Drive the network from rest, writing the stimulus at the presentation
    step, and decode every tape exactly at every step.

    The decoded words double as an online consistency check: the code path and
    the symbolic path evolve in lockstep or the decode would fail.
    """
    state = net.initial_state()
    trace = IanRunTrace()
    for t in range(0, max_steps + 1):
        if t == presentation_step and stimulus:
            cl = dict(state.codes)
            cl.update({k: Fraction(v) for k, v in stimulus.items()})
            state = IanState(cls=state.cls[:-1] + (cl,),
                             component_bsl=state.component_bsl,
                             component_ltl=state.component_ltl,
                             meta=state.meta)
        elif t > 0:
            state = step_ian(net, state)
        words = decode_codes(net, state.codes)
        enabled = None
        if net.meta is not None and t > 0 and t != presentation_step:
            _, enabled = net.meta.evaluate(trace.records[-1].state.codes[net.meta.tape])
        parse_changed = bool(trace.records) and \
            trace.records[-1].state.codes.get("parse") != state.codes.get("parse")
        trace.records.append(IanStepRecord(t, state, words, enabled, parse_changed))
    return trace


def decode_codes(net: InteractiveNetwork, codes: Dict[str, Fraction]) -> Dict[str, Word]:
    return {name: net.tapes[name].encoding.decode(codes[name]) for name in codes}
