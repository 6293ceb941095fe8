"""Piecewise affine-linear dynamics on the unit square, compiled from a shift.

The square is cut into a rectangular grid: one column of x-intervals per
distinct left DoD word (each interval the prefix cylinder of its word) and one
row of y-intervals per distinct right DoD word. Each defined cell carries the
affine map obtained by composing, per axis, the pop of the old DoD prefix with
the push of the prefix left behind by the rule's substitution and shift. Cells
whose DoD word has no rule are kept, marked undefined, so the switching rule
can tell rejection from a corrupt state.

Interval bounds are half-open; the topmost interval of each axis additionally
contains 1 so the closed square is covered, matching the network's Heaviside
thresholds. Cell indices are 1-based, (1, 1) at the origin.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .errors import NoCellError, OverlappingPrefixesError, UndefinedBranchError
from .godel import Affine1D, godelize_dotted
from .symbolic import (
    DottedSequence,
    VersatileShift,
    Word,
    apply_vs,
    rule_prefixes,
)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Interval:
    """Half-open [lo, hi); with ``top`` set, the point 1 = hi also belongs."""

    lo: Fraction
    hi: Fraction
    top: bool = False

    def __post_init__(self):
        if not (0 <= self.lo < self.hi <= 1):
            raise ValueError(f"need 0 <= lo < hi <= 1, got [{self.lo}, {self.hi})")

    def __contains__(self, value) -> bool:
        if self.lo <= value < self.hi:
            return True
        return self.top and value == self.hi


@dataclass(frozen=True)
class AffineMap2D:
    """Decoupled affine map (x, y) -> (lam_x x + a_x, lam_y y + a_y)."""

    x: Affine1D
    y: Affine1D

    @property
    def a_x(self):
        return self.x.a

    @property
    def a_y(self):
        return self.y.a

    @property
    def lam_x(self):
        return self.x.lam

    @property
    def lam_y(self):
        return self.y.lam

    def __call__(self, point):
        px, py = point
        return self.x(px), self.y(py)

    @property
    def is_identity(self) -> bool:
        return (self.lam_x, self.a_x, self.lam_y, self.a_y) == (1, 0, 1, 0)


@dataclass
class Axis:
    """Ordered cylinder intervals of one coordinate with their DoD words."""

    intervals: Tuple[Interval, ...]
    labels: Tuple[Word, ...]

    def locate(self, value) -> int:
        """1-based index of the interval containing ``value``."""
        if not (0 <= value <= 1):
            raise NoCellError(f"coordinate {value} outside [0, 1]")
        lows = [iv.lo for iv in self.intervals]
        idx = bisect_right(lows, value) - 1
        if idx < 0 or value not in self.intervals[idx]:
            raise NoCellError(f"coordinate {value} not covered by any interval")
        return idx + 1

    def __len__(self):
        return len(self.intervals)


def _build_axis(encoding, length: int) -> Axis:
    cells = sorted((encoding.cylinder(w), w) for w in encoding.words(length))
    intervals = []
    labels = []
    edge = ZERO
    for (lo, span), word in cells:
        if lo != edge:
            raise OverlappingPrefixesError(
                f"cylinder of {word!r} starts at {lo}, expected {edge}"
            )
        edge = lo + span
        intervals.append(Interval(lo, edge))
        labels.append(word)
    if edge != ONE:
        raise OverlappingPrefixesError(f"cylinders cover up to {edge}, not 1")
    intervals[-1] = Interval(intervals[-1].lo, intervals[-1].hi, top=True)
    return Axis(tuple(intervals), tuple(labels))


def build_partition(vs: VersatileShift, gx, gy) -> Tuple[Axis, Axis]:
    """One x-interval per left DoD word and one y-interval per right DoD word."""
    return _build_axis(gx, vs.dod.left_len), _build_axis(gy, vs.dod.right_len)


def compile_branch(vs: VersatileShift, key, gx, gy) -> AffineMap2D:
    """Affine image of one rule: per axis, pop the old prefix, push the new.

    The substitution and the dot shift both reduce to prefix pops and pushes
    on the one-sided constituents; symbols crossing the dot are constants of
    the rule, so the composition is a single exact affine map.
    """
    rule = vs.rules[(tuple(key[0]), tuple(key[1]))]
    new_left, new_right = rule_prefixes(rule)
    fx = gx.push_map(new_left).after(gx.pop_map(key[0]))
    fy = gy.push_map(new_right).after(gy.pop_map(key[1]))
    return AffineMap2D(fx, fy)


@dataclass
class NDA:
    """Rectangular partition with one affine branch per defined cell."""

    x_axis: Axis
    y_axis: Axis
    branches: Dict[Tuple[int, int], Optional[AffineMap2D]]
    x_encoding: object
    y_encoding: object

    @property
    def m(self) -> int:
        return len(self.x_axis)

    @property
    def n(self) -> int:
        return len(self.y_axis)

    def cell_label(self, i: int, j: int) -> Tuple[Word, Word]:
        """DoD content that generated cell (i, j); 1-based indices."""
        return self.x_axis.labels[i - 1], self.y_axis.labels[j - 1]

    def branch(self, i: int, j: int) -> Optional[AffineMap2D]:
        return self.branches[(i, j)]


def switch(nda: NDA, x: Fraction, y: Fraction) -> Tuple[int, int]:
    """The switching rule: unique 1-based cell indices with x in I_i, y in J_j."""
    return nda.x_axis.locate(x), nda.y_axis.locate(y)


def step_nda(nda: NDA, x: Fraction, y: Fraction) -> Tuple[Fraction, Fraction]:
    """Apply the branch selected by the switching rule, exactly."""
    i, j = switch(nda, x, y)
    branch = nda.branches[(i, j)]
    if branch is None:
        raise UndefinedBranchError((i, j), nda.cell_label(i, j))
    return branch((x, y))


def iterate_nda(nda: NDA, x, y, n: int):
    orbit = [(x, y)]
    for _ in range(n):
        x, y = step_nda(nda, x, y)
        orbit.append((x, y))
    return orbit


_IDENTITY_BRANCH = AffineMap2D(Affine1D.identity(), Affine1D.identity())


def vs_to_nda(vs: VersatileShift, gx, gy, undefined: str = "reject",
              spot_check: bool = True) -> NDA:
    """Compile a versatile shift into its unit-square representation.

    ``undefined`` picks what a cell with no rule becomes: ``"reject"`` marks
    it undefined (stepping raises), ``"identity"`` gives it the fixed-point
    branch, the stuck-machine semantics used inside interactive networks.
    """
    if undefined not in ("reject", "identity"):
        raise ValueError(f"undefined must be 'reject' or 'identity', got {undefined!r}")
    x_axis, y_axis = build_partition(vs, gx, gy)
    branches: Dict[Tuple[int, int], Optional[AffineMap2D]] = {}
    nda = NDA(x_axis, y_axis, branches, gx, gy)
    for i, u in enumerate(x_axis.labels, start=1):
        for j, v in enumerate(y_axis.labels, start=1):
            if (u, v) in vs.rules:
                branch = compile_branch(vs, (u, v), gx, gy)
                _check_image(branch, x_axis.intervals[i - 1], y_axis.intervals[j - 1],
                             (i, j))
                branches[(i, j)] = branch
            else:
                branches[(i, j)] = _IDENTITY_BRANCH if undefined == "identity" else None
    if spot_check:
        _spot_check(vs, nda)
    return nda


def _check_image(branch: AffineMap2D, ix: Interval, jy: Interval, cell):
    """Affine maps attain extremes at corners, so corner containment suffices."""
    for cx in (ix.lo, ix.hi):
        for cy in (jy.lo, jy.hi):
            px, py = branch((cx, cy))
            if not (0 <= px <= 1 and 0 <= py <= 1):
                raise OverlappingPrefixesError(
                    f"branch at cell {cell} maps corner ({cx}, {cy}) outside the square"
                )


def _spot_check(vs: VersatileShift, nda: NDA, seed: int = 0):
    """Construction-time validation: every branch agrees with the symbolic shift
    on its label sequence and on one random extension inside the cell."""
    rng = random.Random(seed)
    for (i, j), branch in nda.branches.items():
        u, v = nda.cell_label(i, j)
        if (u, v) not in vs.rules:
            continue
        samples = [DottedSequence(u, v, vs.fill_left, vs.fill_right)]
        tail = tuple(rng.choice(nda.y_encoding.gamma.symbols) for _ in range(3)) \
            if hasattr(nda.y_encoding, "gamma") else ()
        if tail:
            samples.append(DottedSequence(u, v + tail, vs.fill_left, vs.fill_right))
        for s in samples:
            sx, sy = godelize_dotted(s, nda.x_encoding, nda.y_encoding)
            image = apply_vs(vs, s)
            want = godelize_dotted(image, nda.x_encoding, nda.y_encoding)
            got = branch((sx, sy))
            if got != want:
                raise AssertionError(
                    f"branch at cell {(i, j)} disagrees with the shift on {s}: "
                    f"{got} != {want}"
                )
