"""Scalar observation models over network states and the trial-average protocol.

The mean network activity (the mean over all unit activations) is the scalar
observable used for synthetic event-related potentials: run many trials of the
same stimulus over randomized compatible initial conditions, then average the
per-step means across trials. All statistics on the exact side are rationals;
the standard deviation is reported through its exact variance (its square
root is irrational in general and only rendered at output precision).

The bias unit is excluded from the mean by default: it is a modeling artifact
pinned at 1. Pass ``include_bias=True`` for sensitivity checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .godel import godelize_dotted
from .interactive import IanState, InteractiveNetwork, step_ian
from .rann import Network, NetworkState
from .symbolic import DottedSequence, Word

ZERO = Fraction(0)


def amari_mean(net, state, include_bias: bool = False) -> Fraction:
    """Mean activation over the network's units, exactly.

    Works on a plain three-layer network (state is a NetworkState) and on an
    interactive network (state is an IanState, whose configuration layers,
    component layers and gate units all count).
    """
    if isinstance(net, Network):
        values = list(state.values)
        if not include_bias:
            values.pop(net.bias)
        return sum(values, ZERO) / len(values)
    if isinstance(net, InteractiveNetwork):
        values = state.activations()
        n = net.unit_count(include_bias=include_bias)
        total = sum(values, ZERO)
        if include_bias:
            total += 1
        return total / n
    raise TypeError(f"unsupported network type {type(net).__name__}")


def harmony(state: NetworkState, weights: Dict[Tuple[int, int], Fraction]) -> Fraction:
    """Quadratic form sum_ij u_i w_ij u_j over the sparse weight matrix."""
    total = ZERO
    values = state.values
    for (target, source), w in weights.items():
        total += values[target] * w * values[source]
    return total


def stage_means(net: Network, step, include_bias: bool = False):
    """Sub-stage means of one macro step, for finer activity curves.

    The default per-step observable uses the end-of-step activations; this
    exposes the value after each of the three stages instead.
    """
    return {
        "bsl": amari_mean(net, step.after_bsl, include_bias),
        "ltl": amari_mean(net, step.after_ltl, include_bias),
        "mcl": amari_mean(net, step.after_mcl, include_bias),
    }


def extend_with_tails(stimulus: DottedSequence, tail: Word) -> DottedSequence:
    """Append the tail word beyond the stimulus on both sides.

    The tail occupies strictly less significant digits than the stimulus, so
    decoding the extended codes recovers the stimulus in its leading symbols
    and the extended point stays inside the stimulus's partition cell.
    """
    return DottedSequence(stimulus.left + tail, stimulus.right + tail,
                          stimulus.fill_left, stimulus.fill_right)


def random_compatible_sequence(stimulus: DottedSequence, tail_length: int,
                               rng: random.Random,
                               tail_symbols: Sequence[str]) -> DottedSequence:
    tail = tuple(rng.choice(tuple(tail_symbols)) for _ in range(tail_length))
    return extend_with_tails(stimulus, tail)


def random_compatible_init(stimulus: DottedSequence, gx, gy, tail_length: int,
                           rng: random.Random,
                           tail_symbols: Sequence[str]) -> Tuple[Fraction, Fraction]:
    """Symbologram point of the stimulus with random symbol tails appended."""
    seq = random_compatible_sequence(stimulus, tail_length, rng, tail_symbols)
    return godelize_dotted(seq, gx, gy)


def _trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}:{trial}")


@dataclass(frozen=True)
class Trial:
    """One trial's random tail and its per-step mean-activity series."""

    index: int
    tail: Word
    series: Tuple[Fraction, ...]


@dataclass
class TrialEnsemble:
    """The raw material of a trial average: same stimulus, random tails."""

    stimulus: DottedSequence
    n_trials: int
    tail_length: int
    seed: int
    trials: List[Trial] = field(default_factory=list)

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("need at least one trial")

    def add(self, trial: Trial):
        if len(trial.tail) != self.tail_length:
            raise ValueError("trials must share the stimulus and tail length")
        self.trials.append(trial)


@dataclass
class ErpResult:
    """Per-step trial statistics of the mean network activity."""

    condition: str
    steps: List[int]
    means: List[Fraction]
    variances: List[Fraction]  # sample variance (n - 1 denominator)
    n_trials: int
    ensemble: Optional[TrialEnsemble] = None

    def stds(self) -> List[float]:
        return [float(v) ** 0.5 for v in self.variances]


def synth_erp(net: InteractiveNetwork, stimulus: DottedSequence,
              n_trials: int, tail_length: int, seed: int, max_steps: int,
              condition: str = "", presentation_step: int = 2,
              stimulus_tapes: Tuple[str, str] = ("parse", "input"),
              tail_symbols: Sequence[str] = ("o", "s"),
              include_bias: bool = False) -> ErpResult:
    """Trial-averaged mean activity around a stimulus presentation.

    Each trial's initial condition carries that trial's random symbolic
    continuation on the input-side tape; the tapes so loaded are a fixed
    point, the trial's own resting state. At the presentation step the
    stimulus is written in front of the continuation. Decoding the presented
    code recovers the stimulus in its leading symbols, the rest being the
    random continuation, which the machines never consume: the run returns to
    the trial's pre-stimulus resting configuration (the change monitor's
    buried history sinking geometrically toward it).

    Trials that reach an exact fixed point before ``max_steps`` are padded
    with their resting value. Statistics are exact; the whole procedure is
    reproducible bit for bit from the seed, one derived generator per trial.
    """
    ensemble = TrialEnsemble(stimulus, n_trials, tail_length, seed)
    x_tape, y_tape = stimulus_tapes
    for trial in range(n_trials):
        rng = _trial_rng(seed, trial)
        tail = tuple(rng.choice(tuple(tail_symbols)) for _ in range(tail_length))
        x = net.tapes[x_tape].encode(stimulus.left)
        y = net.tapes[y_tape].encode(tuple(stimulus.right) + tail)
        state = _written(net, net.initial_state(settled=False),
                         {y_tape: net.tapes[y_tape].encode(tail)})
        state = step_ian(net, state)  # settle the resting layer activity
        series = [amari_mean(net, state, include_bias)]
        for t in range(1, max_steps + 1):
            if t == presentation_step:
                state = _written(net, state, {x_tape: x, y_tape: y})
            else:
                new_state = step_ian(net, state)
                if new_state.codes == state.codes and t > presentation_step:
                    state = new_state
                    series.append(amari_mean(net, state, include_bias))
                    rest = series[-1]
                    series.extend(rest for _ in range(max_steps - t))
                    break
                state = new_state
            series.append(amari_mean(net, state, include_bias))
        ensemble.add(Trial(trial, tail, tuple(series)))

    steps = list(range(max_steps + 1))
    means, variances = [], []
    n = n_trials
    for t in steps:
        column = [trial.series[t] for trial in ensemble.trials]
        mean = sum(column, ZERO) / n
        if n > 1:
            var = sum(((v - mean) ** 2 for v in column), ZERO) / (n - 1)
        else:
            var = ZERO
        means.append(mean)
        variances.append(var)
    return ErpResult(condition, steps, means, variances, n_trials, ensemble)


def _written(net: InteractiveNetwork, state: IanState,
             codes: Dict[str, Fraction]) -> IanState:
    cl = dict(state.codes)
    cl.update(codes)
    return IanState(cls=state.cls[:-1] + (cl,),
                    component_bsl=state.component_bsl,
                    component_ltl=state.component_ltl,
                    meta=state.meta)
