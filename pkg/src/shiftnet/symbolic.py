"""Dotted sequences, the shift map, and versatile shifts.

A dotted sequence is a two-sided infinite word split by a dot. It is stored
finitely: ``left`` holds the symbols before the dot nearest-dot-first (the
reversal of the printed left side) and ``right`` holds the symbols after the
dot nearest-dot-first. Each side may carry a fill symbol; the stored word
stands for its infinite fill-padded extension, so trailing fills are
canonicalized away and equality is fill-invariant.

A versatile shift rewrites the dotted word inside its domain of dependence
with a replacement of arbitrary length and then moves the dot. Positive shift
counts move the dot left, negative counts move it right; this follows the
worked machine traces rather than the loose prose convention (see the bundled
design notes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

from .errors import InvalidShiftError, MissingFillError, NoRuleError

Symbol = str
Word = Tuple[Symbol, ...]
DottedWord = Tuple[Word, Word]  # (left nearest-dot-first, right nearest-dot-first)


def _strip_trailing(word: Word, fill: Optional[Symbol]) -> Word:
    if fill is None:
        return word
    n = len(word)
    while n > 0 and word[n - 1] == fill:
        n -= 1
    return word[:n]


def _pad(word: Word, length: int, fill: Optional[Symbol]) -> Word:
    if len(word) >= length:
        return word
    if fill is None:
        raise MissingFillError(
            f"need {length} symbols but only {len(word)} available and no fill symbol"
        )
    return word + (fill,) * (length - len(word))


@dataclass(frozen=True)
class DoD:
    """Domain of dependence, the open index interval (k_l, k_r) around the dot."""

    k_l: int
    k_r: int

    def __post_init__(self):
        if self.k_l > 0 or self.k_r < 0:
            raise ValueError(f"DoD must satisfy k_l <= 0 <= k_r, got ({self.k_l}, {self.k_r})")
        if self.left_len == 0 and self.right_len == 0:
            raise ValueError("DoD must cover at least one cell")

    @property
    def left_len(self) -> int:
        """Number of cells left of the dot, |DoD_alpha| = -k_l - 1."""
        return -self.k_l - 1

    @property
    def right_len(self) -> int:
        """Number of cells right of the dot, |DoD_beta| = k_r."""
        return self.k_r


@dataclass(frozen=True)
class DottedSequence:
    """Finite two-sided word around a dot with fill-padded extension semantics."""

    left: Word
    right: Word
    fill_left: Optional[Symbol] = None
    fill_right: Optional[Symbol] = None

    def __post_init__(self):
        object.__setattr__(self, "left", _strip_trailing(tuple(self.left), self.fill_left))
        object.__setattr__(self, "right", _strip_trailing(tuple(self.right), self.fill_right))

    def left_at(self, depth: int) -> Symbol:
        """Symbol at index -(depth+1); fill when beyond stored content."""
        if depth < len(self.left):
            return self.left[depth]
        if self.fill_left is None:
            raise MissingFillError("left side exhausted and no fill symbol")
        return self.fill_left

    def right_at(self, depth: int) -> Symbol:
        if depth < len(self.right):
            return self.right[depth]
        if self.fill_right is None:
            raise MissingFillError("right side exhausted and no fill symbol")
        return self.fill_right

    def __str__(self):
        return render_dotted(self)


def parse_dotted(text: str, fill_left: Optional[Symbol] = None,
                 fill_right: Optional[Symbol] = None) -> DottedSequence:
    """Parse ``"wo.rd"`` or space-separated ``"w q0 . o r d"`` into a sequence.

    With spaces present, tokens are symbols and a lone ``.`` token is the dot;
    otherwise every character is a symbol and ``.`` is the dot.
    """
    if " " in text:
        tokens = text.split()
    else:
        tokens = list(text)
    if tokens.count(".") != 1:
        raise ValueError(f"dotted text needs exactly one dot: {text!r}")
    i = tokens.index(".")
    left = tuple(reversed(tokens[:i]))
    right = tuple(tokens[i + 1:])
    return DottedSequence(left, right, fill_left, fill_right)


def render_dotted(s: DottedSequence) -> str:
    """Inverse of :func:`parse_dotted`; multi-character symbols force spacing."""
    symbols = list(s.left) + list(s.right)
    spaced = any(len(sym) != 1 for sym in symbols)
    sep = " " if spaced else ""
    left = sep.join(reversed(s.left))
    right = sep.join(s.right)
    if spaced:
        return f"{left} . {right}".strip()
    return f"{left}.{right}"


def shift_dot(s: DottedSequence, f: int) -> DottedSequence:
    """Move the dot ``f`` places left (f > 0) or right (f < 0)."""
    left, right = list(s.left), list(s.right)
    for _ in range(max(f, 0)):
        sym = left.pop(0) if left else None
        if sym is None:
            if s.fill_left is None:
                raise MissingFillError("cannot shift dot left past stored content without fill")
            sym = s.fill_left
        right.insert(0, sym)
    for _ in range(max(-f, 0)):
        sym = right.pop(0) if right else None
        if sym is None:
            if s.fill_right is None:
                raise MissingFillError("cannot shift dot right past stored content without fill")
            sym = s.fill_right
        left.insert(0, sym)
    return DottedSequence(tuple(left), tuple(right), s.fill_left, s.fill_right)


def read_dod(s: DottedSequence, dod: DoD) -> DottedWord:
    """Return the fill-padded dotted word occupying the DoD of ``s``."""
    left = tuple(s.left_at(k) for k in range(dod.left_len))
    right = tuple(s.right_at(k) for k in range(dod.right_len))
    return left, right


def substitute(s: DottedSequence, dod: DoD, replacement: DottedWord) -> DottedSequence:
    """Replace the DoD content of ``s`` with ``replacement``, leaving the rest."""
    repl_left, repl_right = replacement
    left = _pad(s.left, dod.left_len, s.fill_left) if len(s.left) < dod.left_len else s.left
    right = _pad(s.right, dod.right_len, s.fill_right) if len(s.right) < dod.right_len else s.right
    new_left = tuple(repl_left) + left[dod.left_len:]
    new_right = tuple(repl_right) + right[dod.right_len:]
    return DottedSequence(new_left, new_right, s.fill_left, s.fill_right)


@dataclass(frozen=True)
class Rule:
    """One entry of a versatile shift: a replacement dotted word and a shift count."""

    replacement: DottedWord
    shift: int = 0

    def __post_init__(self):
        left, right = self.replacement
        object.__setattr__(self, "replacement", (tuple(left), tuple(right)))


def rule_prefixes(rule: Rule) -> DottedWord:
    """Known (left, right) prefixes after applying substitution and shift.

    Only symbols written by the rule may cross the dot, so the outcome on the
    replaced region is fully determined; the remainder of the sequence keeps
    its relative order on its own side.
    """
    left, right = rule.replacement
    f = rule.shift
    if f > 0:
        if f > len(left):
            raise InvalidShiftError(
                f"shift {f} would move symbols outside the replaced region {rule.replacement!r}"
            )
        moved = left[:f]
        return left[f:], tuple(reversed(moved)) + right
    if f < 0:
        if -f > len(right):
            raise InvalidShiftError(
                f"shift {f} would move symbols outside the replaced region {rule.replacement!r}"
            )
        moved = right[:-f]
        return tuple(reversed(moved)) + left, right[-f:]
    return left, right


@dataclass(frozen=True)
class VersatileShift:
    """A DoD together with a finite deterministic table of rewrite rules.

    Rule keys are exact dotted words of the DoD shape; there is no wildcard
    syntax, machine compilers expand universally quantified clauses into
    explicit entries. Every rule passes the shift-validity check at
    construction so downstream affine compilation stays per-cell constant.
    """

    dod: DoD
    rules: Mapping[DottedWord, Rule]
    fill_left: Optional[Symbol] = None
    fill_right: Optional[Symbol] = None

    def __post_init__(self):
        table = {}
        for key, rule in dict(self.rules).items():
            kl, kr = key
            key = (tuple(kl), tuple(kr))
            if len(key[0]) != self.dod.left_len or len(key[1]) != self.dod.right_len:
                raise ValueError(
                    f"rule key {key!r} does not match DoD shape "
                    f"({self.dod.left_len}, {self.dod.right_len})"
                )
            rule_prefixes(rule)  # raises InvalidShiftError on bad shifts
            table[key] = rule
        object.__setattr__(self, "rules", table)

    def rule_for(self, s: DottedSequence) -> Rule:
        try:
            key = read_dod(s, self.dod)
        except MissingFillError:
            # a fill-less side ran out: no defined continuation, hence no rule
            raise NoRuleError((s.left, s.right)) from None
        try:
            return self.rules[key]
        except KeyError:
            raise NoRuleError(key) from None


def apply_vs(vs: VersatileShift, s: DottedSequence) -> DottedSequence:
    """One step of the versatile shift: substitute in the DoD, then move the dot."""
    rule = vs.rule_for(s)
    return shift_dot(substitute(s, vs.dod, rule.replacement), rule.shift)


def apply_vs_or_identity(vs: VersatileShift, s: DottedSequence) -> DottedSequence:
    """Like :func:`apply_vs` but a missing rule leaves the sequence unchanged.

    This is the stuck-machine semantics used inside interactive networks.
    """
    try:
        rule = vs.rule_for(s)
    except (NoRuleError, MissingFillError):
        return s
    return shift_dot(substitute(s, vs.dod, rule.replacement), rule.shift)


def iterate_vs(vs: VersatileShift, s: DottedSequence, n: int) -> list:
    """Orbit [s, vs(s), ..., vs^n(s)]."""
    out = [s]
    for _ in range(n):
        s = apply_vs(vs, s)
        out.append(s)
    return out
