"""Exact base-g encodings between finite words and rationals in [0, 1].

A word d1 d2 ... dn maps to sum_k gamma(d_k) g^(-k) as an exact Fraction.
Because the fill symbol is always enumerated as 0, the code of a finite word
equals the code of its fill-padded infinite extension, which is what makes the
finite representation of two-sided sequences exact.

Two encodings are provided. The plain encoding enumerates one alphabet. The
refined encoding treats the first symbol as a machine state drawn from its own
enumeration and the remainder as tape symbols, packing states and tape content
so the codes tile the whole interval.

All arithmetic is exact; floats appear only in the plotting helpers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Tuple

from .errors import (
    DigitMismatchError,
    MalformedWordError,
    NonRepresentableError,
    UnknownSymbolError,
)
from .symbolic import Word

ZERO = Fraction(0)
ONE = Fraction(1)

_MAX_DECODE_DIGITS = 10_000


@dataclass(frozen=True)
class GammaMap:
    """Bijection from an ordered alphabet onto 0..g-1; index 0 is the fill."""

    symbols: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in {self.symbols!r}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, int]]) -> "GammaMap":
        """Build from explicit (symbol, index) pairs; indices must be 0..g-1."""
        items = sorted(pairs, key=lambda kv: kv[1])
        if [i for _, i in items] != list(range(len(items))):
            raise ValueError(f"gamma indices must be a contiguous range from 0: {items!r}")
        return cls(tuple(sym for sym, _ in items))

    @property
    def g(self) -> int:
        return len(self.symbols)

    @property
    def fill(self) -> str:
        return self.symbols[0]

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise UnknownSymbolError(f"{symbol!r} not in alphabet {self.symbols!r}") from None

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.symbols


@dataclass(frozen=True)
class RefinedGammaMap:
    """State enumeration plus tape enumeration for state-leading words."""

    states: GammaMap
    tape: GammaMap


@dataclass(frozen=True)
class Affine1D:
    """Exact one-dimensional affine map x -> lam * x + a."""

    lam: Fraction
    a: Fraction

    def __call__(self, x: Fraction) -> Fraction:
        return self.lam * x + self.a

    def after(self, other: "Affine1D") -> "Affine1D":
        """Composition self o other."""
        return Affine1D(self.lam * other.lam, self.lam * other.a + self.a)

    @staticmethod
    def identity() -> "Affine1D":
        return Affine1D(ONE, ZERO)


def godelize(word: Sequence[str], gamma: GammaMap) -> Fraction:
    """Encode a finite word, exactly: sum gamma(d_k) g^(-k)."""
    g = gamma.g
    value = ZERO
    weight = ONE
    for sym in word:
        weight /= g
        value += gamma.index(sym) * weight
    return value


def godelize_refined(word: Sequence[str], maps: RefinedGammaMap) -> Fraction:
    """Encode a state-leading word: gamma_q(d1)/n_q + tape-code of the rest / n_q."""
    if not word:
        return ZERO
    head = word[0]
    if head not in maps.states:
        raise MalformedWordError(f"refined word must start with a state, got {head!r}")
    for sym in word[1:]:
        if sym not in maps.tape:
            raise UnknownSymbolError(f"{sym!r} not in tape alphabet {maps.tape.symbols!r}")
    n_q = maps.states.g
    return (Fraction(maps.states.index(head)) + godelize(word[1:], maps.tape)) / n_q


def decode(code: Fraction, gamma: GammaMap, n: Optional[int] = None) -> Word:
    """Invert :func:`godelize`, reading ``n`` digits (or until the residue is 0).

    Raises NonRepresentableError when the value has a nonzero residue past the
    digit budget, i.e. was not produced by this map within that many digits.
    """
    if not (0 <= code <= 1):
        raise NonRepresentableError(f"code {code} outside [0, 1]")
    g = gamma.g
    word = []
    budget = n if n is not None else _MAX_DECODE_DIGITS
    value = code
    for _ in range(budget):
        if n is None and value == 0:
            break
        value *= g
        digit = int(value)
        if digit >= g:  # only possible for code == 1
            raise NonRepresentableError(f"code {code} not expressible in base {g}")
        value -= digit
        word.append(gamma.symbols[digit])
    if value != 0:
        raise NonRepresentableError(
            f"code {code} not expressible in base {g} within {budget} digits"
        )
    return tuple(word)


def decode_refined(code: Fraction, maps: RefinedGammaMap, n: Optional[int] = None) -> Word:
    """Invert :func:`godelize_refined`: leading state digit, then tape digits."""
    if not (0 <= code < 1):
        raise NonRepresentableError(f"refined code {code} outside [0, 1)")
    scaled = code * maps.states.g
    state_idx = int(scaled)
    rest = scaled - state_idx
    tape = decode(rest, maps.tape, None if n is None else n - 1)
    return (maps.states.symbols[state_idx],) + tape


def pop_code(code: Fraction, popped: Sequence[str], gamma: GammaMap) -> Fraction:
    """Code of the sequence with ``popped`` removed from its head.

    psi(pop^p s) = psi(s) * g^p - sum_i gamma(d_i) g^(p-i); the popped word
    must match the leading digits of ``code``.
    """
    g = gamma.g
    p = len(popped)
    shift = ZERO
    for i, sym in enumerate(popped, start=1):
        shift += gamma.index(sym) * Fraction(g) ** (p - i)
    result = code * Fraction(g) ** p - shift
    if not (0 <= result <= 1):
        raise DigitMismatchError(
            f"popped word {tuple(popped)!r} does not match the leading digits of {code}"
        )
    return result


def push_code(code: Fraction, pushed: Sequence[str], gamma: GammaMap) -> Fraction:
    """Code of the sequence with ``pushed`` prepended.

    psi(s push b) = psi(s) * g^(-r) + sum_i gamma(b_i) g^(-i).
    """
    r = len(pushed)
    return code * Fraction(1, gamma.g) ** r + godelize(pushed, gamma)


class PlainEncoding:
    """One-sided encoding of words over a single gamma map."""

    def __init__(self, gamma: GammaMap):
        self.gamma = gamma

    @property
    def fill(self) -> str:
        return self.gamma.fill

    def encode(self, word: Sequence[str]) -> Fraction:
        return godelize(word, self.gamma)

    def decode(self, code: Fraction, n: Optional[int] = None) -> Word:
        return decode(code, self.gamma, n)

    def cylinder(self, word: Sequence[str]) -> Tuple[Fraction, Fraction]:
        """(low end, span) of codes of sequences starting with ``word``."""
        return self.encode(word), Fraction(1, self.gamma.g) ** len(word)

    def pop_map(self, word: Sequence[str]) -> Affine1D:
        g = self.gamma.g
        p = len(word)
        a = ZERO
        for i, sym in enumerate(word, start=1):
            a -= self.gamma.index(sym) * Fraction(g) ** (p - i)
        return Affine1D(Fraction(g) ** p, a)

    def push_map(self, word: Sequence[str]) -> Affine1D:
        return Affine1D(Fraction(1, self.gamma.g) ** len(word), self.encode(word))

    def words(self, k: int) -> Iterator[Word]:
        """All DoD words of length k over the alphabet."""
        return (tuple(w) for w in itertools.product(self.gamma.symbols, repeat=k))

    def __repr__(self):
        return f"PlainEncoding({self.gamma.symbols!r})"


class RefinedEncoding:
    """One-sided encoding of state-leading words (state digit, then tape digits)."""

    def __init__(self, maps: RefinedGammaMap):
        self.maps = maps
        self._tape = PlainEncoding(maps.tape)

    @property
    def fill(self) -> str:
        return self.maps.tape.fill

    def encode(self, word: Sequence[str]) -> Fraction:
        return godelize_refined(word, self.maps)

    def decode(self, code: Fraction, n: Optional[int] = None) -> Word:
        return decode_refined(code, self.maps, n)

    def cylinder(self, word: Sequence[str]) -> Tuple[Fraction, Fraction]:
        if not word:
            return ZERO, ONE
        n_q = self.maps.states.g
        span = Fraction(1, n_q) * Fraction(1, self.maps.tape.g) ** (len(word) - 1)
        return self.encode(word), span

    def _strip_state(self, state: str) -> Affine1D:
        n_q = self.maps.states.g
        return Affine1D(Fraction(n_q), Fraction(-self.maps.states.index(state)))

    def _wrap_state(self, state: str) -> Affine1D:
        n_q = self.maps.states.g
        return Affine1D(Fraction(1, n_q), Fraction(self.maps.states.index(state), n_q))

    def pop_map(self, word: Sequence[str]) -> Affine1D:
        """Map a refined code to the plain tape code of the remainder."""
        if not word:
            return Affine1D.identity()
        return self._tape.pop_map(word[1:]).after(self._strip_state(word[0]))

    def push_map(self, word: Sequence[str]) -> Affine1D:
        """Map a plain tape code to the refined code with ``word`` prepended."""
        if not word:
            return Affine1D.identity()
        return self._wrap_state(word[0]).after(self._tape.push_map(word[1:]))

    def words(self, k: int) -> Iterator[Word]:
        if k == 0:
            return iter([()])
        return (
            (q,) + rest
            for q in self.maps.states.symbols
            for rest in itertools.product(self.maps.tape.symbols, repeat=k - 1)
        )

    def __repr__(self):
        return (f"RefinedEncoding(states={self.maps.states.symbols!r}, "
                f"tape={self.maps.tape.symbols!r})")


def godelize_dotted(seq, enc_x, enc_y) -> Tuple[Fraction, Fraction]:
    """Symbologram coordinates of a dotted sequence: (code of left, code of right)."""
    return enc_x.encode(seq.left), enc_y.encode(seq.right)
