"""Three-layer recurrent networks with explicit weights compiled from an NDA.

The network has two machine-configuration units (MCL, ramp), one branch
selection unit per axis interval (BSL, Heaviside), one pair of linear
transformation units per partition cell (LTL, ramp) and a constant bias unit.
Weights are exact rationals drawn from {0, 1, h/2, -h/2}, the branch slopes,
and bias-row entries {a - h, -threshold}.

One macro step is one machine step and runs in three stages: Heaviside branch
selection from the configuration units, gated affine transformation in the
cell units, and ramp read-out back into the configuration units. Gating works
by lateral inhibition: each selection unit excites its own column or row of
cells with h/2 and inhibits the previous one with -h/2, so the cell input sums
to h exactly on the selected cell, h/2 on half matches and 0 elsewhere. The
inhibition bound h/2 >= max(a + lambda) keeps every non-selected cell silent
for any configuration in the unit square.

``macro_step`` evaluates the structured form of the weight matrix; the
``method="matrix"`` path evaluates the same function directly from the stored
weights and is used to cross-check the two in the test-suite.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import automata
from .errors import (
    EmptyInputError,
    Halted,
    MaxStepsExceededError,
    NoActiveBranchError,
    OutOfRangeError,
    UndefinedTransitionError,
)
from .godel import godelize_dotted
from .nda import NDA, step_nda, switch, vs_to_nda
from .symbolic import apply_vs

ZERO = Fraction(0)
ONE = Fraction(1)
TWO = Fraction(2)


@dataclass(frozen=True)
class Unit:
    index: int
    name: str
    layer: str  # 'mcl' | 'bsl' | 'ltl' | 'bias'
    activation: str  # 'ramp' | 'heaviside' | 'const'
    axis: Optional[str] = None  # 'x' | 'y'
    cell: Optional[Tuple[int, int]] = None  # LTL only
    interval: Optional[int] = None  # BSL only, 1-based


@dataclass(frozen=True)
class NetworkState:
    """Activation value of every unit, bias included (always 1)."""

    values: Tuple[Fraction, ...]

    def __getitem__(self, idx: int) -> Fraction:
        return self.values[idx]


class Network:
    """Unit list, sparse weight matrix, and the structured view used to step."""

    def __init__(self, nda: NDA):
        self.nda = nda
        m, n = nda.m, nda.n
        self.m, self.n = m, n

        units: List[Unit] = [
            Unit(0, "c_x", "mcl", "ramp", axis="x"),
            Unit(1, "c_y", "mcl", "ramp", axis="y"),
        ]
        self.mcl_x, self.mcl_y = 0, 1
        self.bsl_x = tuple(range(2, 2 + m))
        for k, idx in enumerate(self.bsl_x, start=1):
            units.append(Unit(idx, f"b_x[{k}]", "bsl", "heaviside", axis="x", interval=k))
        self.bsl_y = tuple(range(2 + m, 2 + m + n))
        for k, idx in enumerate(self.bsl_y, start=1):
            units.append(Unit(idx, f"b_y[{k}]", "bsl", "heaviside", axis="y", interval=k))
        self.ltl: Dict[Tuple[int, int], Tuple[int, int]] = {}
        idx = 2 + m + n
        for i in range(1, m + 1):
            for j in range(1, n + 1):
                units.append(Unit(idx, f"t_x[{i},{j}]", "ltl", "ramp", axis="x", cell=(i, j)))
                units.append(Unit(idx + 1, f"t_y[{i},{j}]", "ltl", "ramp", axis="y", cell=(i, j)))
                self.ltl[(i, j)] = (idx, idx + 1)
                idx += 2
        self.bias = idx
        units.append(Unit(idx, "bias", "bias", "const"))
        self.units: Tuple[Unit, ...] = tuple(units)

        self.x_thresholds = tuple(iv.lo for iv in nda.x_axis.intervals)
        self.y_thresholds = tuple(iv.lo for iv in nda.y_axis.intervals)

        self.h = self._inhibition_strength()
        self.weights = self._assemble_weights()

    @property
    def n_units(self) -> int:
        return len(self.units)

    def _inhibition_strength(self) -> Fraction:
        """h = 2 * max(a + lambda) over branch parameters, at least 2."""
        worst = ZERO
        for branch in self.nda.branches.values():
            if branch is None:
                continue
            worst = max(worst, branch.a_x + branch.lam_x, branch.a_y + branch.lam_y)
        return max(TWO, TWO * worst)

    def _assemble_weights(self) -> Dict[Tuple[int, int], Fraction]:
        w: Dict[Tuple[int, int], Fraction] = {}
        half = self.h / 2
        for k, idx in enumerate(self.bsl_x):
            w[(idx, self.mcl_x)] = ONE
            if self.x_thresholds[k] != 0:
                w[(idx, self.bias)] = -self.x_thresholds[k]
        for k, idx in enumerate(self.bsl_y):
            w[(idx, self.mcl_y)] = ONE
            if self.y_thresholds[k] != 0:
                w[(idx, self.bias)] = -self.y_thresholds[k]
        for (i, j), (tx, ty) in self.ltl.items():
            branch = self.nda.branches[(i, j)]
            lam_x = a_x = lam_y = a_y = ZERO  # zero-weight placeholder slots
            if branch is not None:
                lam_x, a_x = branch.lam_x, branch.a_x
                lam_y, a_y = branch.lam_y, branch.a_y
            if lam_x:
                w[(tx, self.mcl_x)] = lam_x
            if lam_y:
                w[(ty, self.mcl_y)] = lam_y
            w[(tx, self.bias)] = a_x - self.h
            w[(ty, self.bias)] = a_y - self.h
            for t in (tx, ty):
                w[(t, self.bsl_x[i - 1])] = half
                if i < self.m:
                    w[(t, self.bsl_x[i])] = -half
                w[(t, self.bsl_y[j - 1])] = half
                if j < self.n:
                    w[(t, self.bsl_y[j])] = -half
            w[(self.mcl_x, tx)] = ONE
            w[(self.mcl_y, ty)] = ONE
        return w

    # --- state helpers -----------------------------------------------------

    def zero_state(self) -> NetworkState:
        values = [ZERO] * self.n_units
        values[self.bias] = ONE
        return NetworkState(tuple(values))

    def mcl(self, st: NetworkState) -> Tuple[Fraction, Fraction]:
        return st[self.mcl_x], st[self.mcl_y]


def nda_to_rann(nda: NDA) -> Network:
    """The rho construction: wire the partition and branches into a network."""
    return Network(nda)


def init_state(net: Network, x: Fraction, y: Fraction) -> NetworkState:
    """Load a symbologram point into the configuration units; the rest is 0."""
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise OutOfRangeError(f"initial codes ({x}, {y}) outside the unit square")
    values = [ZERO] * net.n_units
    values[net.mcl_x] = Fraction(x)
    values[net.mcl_y] = Fraction(y)
    values[net.bias] = ONE
    return NetworkState(tuple(values))


@dataclass(frozen=True)
class MacroStep:
    """Per-stage snapshots of one macro step (BSL, LTL, MCL read-out)."""

    after_bsl: NetworkState
    after_ltl: NetworkState
    after_mcl: NetworkState


Override = Optional[Dict[str, Fraction]]


def macro_step_stages(net: Network, st: NetworkState, override: Override = None,
                      method: str = "structured") -> MacroStep:
    """One staged synchronous update; one macro step simulates one machine step.

    ``override`` replaces configuration-unit activations before the step, the
    hook used to stimulate a running network externally. A selected cell whose
    slots are placeholders raises NoActiveBranchError rather than letting the
    configuration collapse to the origin silently.
    """
    values = list(st.values)
    if override:
        if "x" in override:
            values[net.mcl_x] = Fraction(override["x"])
        if "y" in override:
            values[net.mcl_y] = Fraction(override["y"])
    c_x, c_y = values[net.mcl_x], values[net.mcl_y]
    if not (0 <= c_x <= 1 and 0 <= c_y <= 1):
        raise OutOfRangeError(f"configuration units ({c_x}, {c_y}) left the unit square")

    if method == "matrix":
        return _macro_step_matrix(net, values)
    if method != "structured":
        raise ValueError(f"unknown method {method!r}")

    # stage 1: Heaviside branch selection
    for k, idx in enumerate(net.bsl_x):
        values[idx] = ONE if c_x >= net.x_thresholds[k] else ZERO
    for k, idx in enumerate(net.bsl_y):
        values[idx] = ONE if c_y >= net.y_thresholds[k] else ZERO
    after_bsl = NetworkState(tuple(values))

    # gate sums B_x^i + B_y^j per Heaviside pattern; exactly one cell reaches h
    sel_i = bisect_right(net.x_thresholds, c_x)
    sel_j = bisect_right(net.y_thresholds, c_y)
    half = net.h / 2
    h = net.h
    for (i, j), (tx, ty) in net.ltl.items():
        gate = (half if i == sel_i else ZERO) + (half if j == sel_j else ZERO)
        branch = net.nda.branches[(i, j)]
        if branch is None:
            values[tx] = values[ty] = ZERO
            continue
        pre_x = branch.lam_x * c_x + branch.a_x - h + gate
        pre_y = branch.lam_y * c_y + branch.a_y - h + gate
        values[tx] = pre_x if pre_x > 0 else ZERO
        values[ty] = pre_y if pre_y > 0 else ZERO
    after_ltl = NetworkState(tuple(values))

    if net.nda.branches[(sel_i, sel_j)] is None:
        raise NoActiveBranchError((sel_i, sel_j), net.nda.cell_label(sel_i, sel_j))

    # stage 3: ramp read-out into the configuration units
    sum_x = sum((values[tx] for tx, _ in net.ltl.values()), ZERO)
    sum_y = sum((values[ty] for _, ty in net.ltl.values()), ZERO)
    values[net.mcl_x] = sum_x if sum_x > 0 else ZERO
    values[net.mcl_y] = sum_y if sum_y > 0 else ZERO
    return MacroStep(after_bsl, after_ltl, NetworkState(tuple(values)))


def _macro_step_matrix(net: Network, values: List[Fraction]) -> MacroStep:
    """Stage-by-stage evaluation straight from the weight matrix."""
    w = net.weights

    def pre_activation(target: int, current: Sequence[Fraction]) -> Fraction:
        total = ZERO
        for source in range(net.n_units):
            weight = w.get((target, source))
            if weight is not None:
                total += weight * current[source]
        return total

    snapshot = list(values)
    for unit in net.units:
        if unit.layer == "bsl":
            pre = pre_activation(unit.index, snapshot)
            values[unit.index] = ONE if pre >= 0 else ZERO
    after_bsl = NetworkState(tuple(values))

    snapshot = list(values)
    for unit in net.units:
        if unit.layer == "ltl":
            pre = pre_activation(unit.index, snapshot)
            values[unit.index] = pre if pre > 0 else ZERO
    after_ltl = NetworkState(tuple(values))

    sel = switch(net.nda, snapshot[net.mcl_x], snapshot[net.mcl_y])
    if net.nda.branches[sel] is None:
        raise NoActiveBranchError(sel, net.nda.cell_label(*sel))

    snapshot = list(values)
    for unit in net.units:
        if unit.layer == "mcl":
            pre = pre_activation(unit.index, snapshot)
            values[unit.index] = pre if pre > 0 else ZERO
    return MacroStep(after_bsl, after_ltl, NetworkState(tuple(values)))


def macro_step(net: Network, st: NetworkState, override: Override = None,
               method: str = "structured") -> NetworkState:
    return macro_step_stages(net, st, override, method).after_mcl


# --- halting policies and runs --------------------------------------------------


@dataclass(frozen=True)
class FixedPoint:
    """Stop when the configuration units repeat exactly (identity branch)."""


@dataclass(frozen=True)
class MaxSteps:
    n: int


@dataclass(frozen=True)
class Homunculus:
    """External observer: stop when the predicate fires on the new state."""

    predicate: Callable[[NetworkState], bool]


@dataclass
class RunTrace:
    steps: List[MacroStep]
    outcome: str  # 'fixed-point' | 'halted-predicate' | 'max-steps' | 'rejected'
    states: List[NetworkState] = field(default_factory=list)

    @property
    def final(self) -> NetworkState:
        return self.states[-1]


def run(net: Network, init: NetworkState, halting, max_steps: int = 10_000,
        override_for_step: Optional[Callable[[int], Override]] = None) -> RunTrace:
    """Iterate macro steps under a halting policy, recording every stage.

    With FixedPoint or Homunculus halting, hitting ``max_steps`` first raises
    MaxStepsExceededError; a MaxSteps policy simply runs its count. A
    NoActiveBranchError ends the run with outcome 'rejected'.
    """
    if isinstance(halting, MaxSteps):
        budget, policy = halting.n, "max"
    else:
        budget, policy = max_steps, halting
    trace = RunTrace(steps=[], outcome="max-steps", states=[init])
    state = init
    for t in range(1, budget + 1):
        override = override_for_step(t) if override_for_step else None
        try:
            stages = macro_step_stages(net, state, override)
        except NoActiveBranchError:
            trace.outcome = "rejected"
            return trace
        trace.steps.append(stages)
        new_state = stages.after_mcl
        trace.states.append(new_state)
        if policy != "max":
            if isinstance(policy, FixedPoint) and net.mcl(new_state) == net.mcl(state):
                trace.outcome = "fixed-point"
                return trace
            if isinstance(policy, Homunculus) and policy.predicate(new_state):
                trace.outcome = "halted-predicate"
                return trace
        state = new_state
    if policy != "max":
        raise MaxStepsExceededError(f"no halt within {budget} macro steps")
    trace.outcome = "max-steps"
    return trace


# --- cross-stage commutativity check --------------------------------------------


@dataclass
class CompiledMachine:
    """The full pipeline product for one machine: shift, partition, network."""

    machine: object
    vs: object
    gx: object
    gy: object
    nda: NDA
    net: Network


def compile_machine(machine, encodings=None, **vs_kwargs) -> CompiledMachine:
    vs = automata.machine_to_vs(machine, **vs_kwargs)
    gx, gy = encodings if encodings else automata.default_encodings(machine)
    nda = vs_to_nda(vs, gx, gy)
    return CompiledMachine(machine, vs, gx, gy, nda, nda_to_rann(nda))


@dataclass
class CommutativityReport:
    ok: bool
    steps_checked: int
    outcome: str
    first_divergence: Optional[str]
    lines: List[str]

    def __str__(self):
        status = "agree" if self.ok else f"DIVERGE: {self.first_divergence}"
        return (f"commutativity over {self.steps_checked} steps "
                f"({self.outcome}): {status}")


def check_commutativity(machine, config, n_steps: int, encodings=None,
                        compiled: Optional[CompiledMachine] = None) -> CommutativityReport:
    """Run the symbolic machine, its shift, the NDA and the network in lockstep.

    Asserts exact pairwise agreement after decoding at every step. Halting
    Turing machines compile to identity branches, so a symbolic halt must show
    up as a vectorial fixed point; rejection must surface on every route at
    the same step.
    """
    if compiled is None:
        compiled = compile_machine(machine, encodings)
    vs, gx, gy, nda, net = (compiled.vs, compiled.gx, compiled.gy,
                            compiled.nda, compiled.net)

    seq = automata.encode_config(machine, config)
    x, y = godelize_dotted(seq, gx, gy)
    state = init_state(net, x, y)
    lines = [f"step 0: {seq}"]

    sym = config
    for t in range(1, n_steps + 1):
        stop = None
        try:
            sym = automata.step_machine(machine, sym)
        except EmptyInputError:
            return CommutativityReport(True, t - 1, "input-exhausted", None, lines)
        except (Halted, UndefinedTransitionError) as e:
            stop = e

        vs_stopped = nda_stopped = net_stopped = False
        try:
            seq2 = apply_vs(vs, seq)
        except Exception:
            vs_stopped = True
        try:
            xy2 = step_nda(nda, x, y)
        except Exception:
            nda_stopped = True
        try:
            state2 = macro_step(net, state)
        except Exception:
            net_stopped = True

        if stop is not None:
            if isinstance(stop, Halted) and not vs_stopped and seq2 == seq:
                # identity-compiled halt: every route must sit at a fixed point
                if nda_stopped or net_stopped or xy2 != (x, y) or net.mcl(state2) != (x, y):
                    return CommutativityReport(
                        False, t, "halted",
                        f"step {t}: symbolic halt is not a vectorial fixed point",
                        lines)
                return CommutativityReport(True, t, "halted", None, lines)
            if vs_stopped and nda_stopped and net_stopped:
                return CommutativityReport(True, t, "rejected", None, lines)
            return CommutativityReport(
                False, t, "rejected",
                f"step {t}: symbolic stop ({stop}) but routes stopped as "
                f"vs={vs_stopped} nda={nda_stopped} net={net_stopped}", lines)

        if vs_stopped or nda_stopped or net_stopped:
            return CommutativityReport(
                False, t, "running",
                f"step {t}: a vectorial route stopped while the machine runs "
                f"(vs={vs_stopped} nda={nda_stopped} net={net_stopped})", lines)

        seq, (x, y), state = seq2, xy2, state2
        want_seq = automata.encode_config(machine, sym)
        want_xy = godelize_dotted(want_seq, gx, gy)
        if seq != want_seq:
            return CommutativityReport(False, t, "running",
                                       f"step {t}: shift != machine: {seq} vs {want_seq}",
                                       lines)
        if (x, y) != want_xy:
            return CommutativityReport(False, t, "running",
                                       f"step {t}: NDA point {(x, y)} != {want_xy}", lines)
        if net.mcl(state) != want_xy:
            return CommutativityReport(False, t, "running",
                                       f"step {t}: network MCL {net.mcl(state)} != {want_xy}",
                                       lines)
        lines.append(f"step {t}: {seq}")

    return CommutativityReport(True, n_steps, "running", None, lines)

