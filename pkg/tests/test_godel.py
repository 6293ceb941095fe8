import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftnet.errors import (
    DigitMismatchError,
    MalformedWordError,
    NonRepresentableError,
    UnknownSymbolError,
)
from shiftnet.godel import (
    Affine1D,
    GammaMap,
    PlainEncoding,
    RefinedEncoding,
    RefinedGammaMap,
    decode,
    decode_refined,
    godelize,
    godelize_dotted,
    godelize_refined,
    pop_code,
    push_code,
)
from shiftnet.symbolic import parse_dotted

AB = GammaMap(("_", "a", "b"))  # g = 3
CPG_INPUT = GammaMap(("<lo>", "<hi>"))  # g = 2, no blank needed
WORDNET = GammaMap(("_", "w", "o", "r", "d", "a", "n"))  # g = 7


def series_oracle(word, gamma):
    """Independent summation oracle: literal evaluation of the defining series."""
    total = Fraction(0)
    for k, sym in enumerate(word, start=1):
        total += Fraction(gamma.symbols.index(sym), 1) * Fraction(1, gamma.g) ** k
    return total


class TestGodelize:
    def test_empty_word_is_zero(self):
        assert godelize((), AB) == 0

    def test_hi_is_one_half(self):
        assert godelize(("<hi>",), CPG_INPUT) == Fraction(1, 2)

    def test_abba(self):
        # oracle: 1/3 + 2/9 + 2/27 + 1/81 = 52/81
        assert series_oracle("abba", AB) == Fraction(52, 81)
        assert godelize(tuple("abba"), AB) == Fraction(52, 81)

    @given(st.lists(st.sampled_from(["_", "a", "b"]), max_size=10))
    @settings(max_examples=120)
    def test_matches_series_oracle(self, word):
        assert godelize(tuple(word), AB) == series_oracle(word, AB)

    @given(st.lists(st.sampled_from(["_", "a", "b"]), max_size=8))
    @settings(max_examples=80)
    def test_trailing_fill_invisible(self, word):
        assert godelize(tuple(word) + ("_", "_"), AB) == godelize(tuple(word), AB)

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbolError):
            godelize(("z",), AB)

    def test_injective_on_canonical_words(self):
        seen = {}
        for n in range(0, 5):
            for word in itertools.product(AB.symbols, repeat=n):
                if word and word[-1] == "_":
                    continue
                code = godelize(word, AB)
                assert code not in seen, (word, seen[code])
                seen[code] = word


class TestRefined:
    STATES = GammaMap(("idle", "parsing", "error"))
    PARSE = GammaMap(("_", "o", "s"))
    MAPS = RefinedGammaMap(STATES, PARSE)

    def test_zero_state_blank_tail(self):
        assert godelize_refined(("idle",), self.MAPS) == 0

    def test_top_state_blank_tail(self):
        assert godelize_refined(("error",), self.MAPS) == Fraction(2, 3)

    def test_state_then_tape_symbol(self):
        # gamma_q(parsing)/3 + gamma_tape(s)/(3*3) = 1/3 + 2/9 = 5/9
        assert godelize_refined(("parsing", "s"), self.MAPS) == Fraction(5, 9)

    def test_requires_state_head(self):
        with pytest.raises(MalformedWordError):
            godelize_refined(("s", "parsing"), self.MAPS)

    @given(st.sampled_from(["idle", "parsing", "error"]),
           st.lists(st.sampled_from(["_", "o", "s"]), max_size=6))
    @settings(max_examples=80)
    def test_refined_equals_manual_packing(self, state, tape):
        word = (state,) + tuple(tape)
        expected = (Fraction(self.STATES.symbols.index(state))
                    + series_oracle(tape, self.PARSE)) / 3
        assert godelize_refined(word, self.MAPS) == expected

    def test_decode_refined_roundtrip(self):
        # refined decode always reads a leading state digit, then tape digits
        for state in self.STATES.symbols:
            for tape in itertools.product(self.PARSE.symbols, repeat=3):
                word = (state,) + tape
                code = godelize_refined(word, self.MAPS)
                canonical = word
                while len(canonical) > 1 and canonical[-1] == "_":
                    canonical = canonical[:-1]
                assert decode_refined(code, self.MAPS) == canonical


class TestDecode:
    def test_zero_decodes_to_fills(self):
        assert decode(Fraction(0), AB, 3) == ("_", "_", "_")

    def test_52_81(self):
        assert decode(Fraction(52, 81), AB, 4) == tuple("abba")

    def test_one_half_cpg(self):
        assert decode(Fraction(1, 2), CPG_INPUT, 1) == ("<hi>",)

    def test_residue_raises(self):
        with pytest.raises(NonRepresentableError):
            decode(Fraction(52, 81), AB, 2)

    def test_non_base_value_raises(self):
        with pytest.raises(NonRepresentableError):
            decode(Fraction(1, 5), AB)

    def test_exact_mode_roundtrip(self):
        for word in itertools.product(AB.symbols, repeat=4):
            code = godelize(word, AB)
            got = decode(code, AB)
            want = word
            while want and want[-1] == "_":
                want = want[:-1]
            assert got == want

    @given(st.lists(st.sampled_from(list("abcde")), max_size=10))
    @settings(max_examples=100)
    def test_roundtrip_larger_alphabet(self, word):
        gamma = GammaMap(("_",) + tuple("abcde"))
        code = godelize(tuple(word), gamma)
        assert decode(code, gamma, len(word)) == tuple(word)


class TestPopPush:
    def test_pop_abba(self):
        assert pop_code(godelize(tuple("abba"), AB), ("a",), AB) == \
            godelize(tuple("bba"), AB)

    def test_push_empty_is_identity(self):
        c = godelize(tuple("ab"), AB)
        assert push_code(c, (), AB) == c

    def test_push_ord(self):
        assert push_code(godelize(tuple("rd"), WORDNET), ("o",), WORDNET) == \
            godelize(tuple("ord"), WORDNET)

    def test_pop_mismatch(self):
        with pytest.raises(DigitMismatchError):
            pop_code(godelize(tuple("abba"), AB), ("b", "b"), AB)

    @given(st.lists(st.sampled_from(["_", "a", "b"]), max_size=6),
           st.lists(st.sampled_from(["_", "a", "b"]), max_size=4))
    @settings(max_examples=100)
    def test_push_pop_inverse(self, word, prefix):
        c = godelize(tuple(word), AB)
        pushed = push_code(c, tuple(prefix), AB)
        assert pop_code(pushed, tuple(prefix), AB) == c

    @given(st.lists(st.sampled_from(["_", "a", "b"]), min_size=1, max_size=8),
           st.integers(0, 3))
    @settings(max_examples=100)
    def test_pop_agrees_with_direct_word(self, word, p):
        p = min(p, len(word))
        c = godelize(tuple(word), AB)
        assert pop_code(c, tuple(word[:p]), AB) == godelize(tuple(word[p:]), AB)


class TestEncodings:
    def test_plain_cylinder(self):
        enc = PlainEncoding(AB)
        lo, span = enc.cylinder(("a",))
        assert (lo, span) == (Fraction(1, 3), Fraction(1, 3))

    def test_monotone_prefix_ordering(self):
        enc = PlainEncoding(AB)
        lo, span = enc.cylinder(("a", "b"))
        for tail in itertools.product(AB.symbols, repeat=3):
            code = enc.encode(("a", "b") + tail)
            assert lo <= code < lo + span

    def test_pop_push_maps_match_functions(self):
        enc = PlainEncoding(AB)
        word = ("a", "b", "_", "a")
        rest = ("b", "a")
        full = enc.encode(word + rest)
        assert enc.pop_map(word)(full) == enc.encode(rest)
        assert enc.push_map(word)(enc.encode(rest)) == full

    def test_refined_pop_push_maps(self):
        maps = RefinedGammaMap(GammaMap(("q0", "q1")), WORDNET)
        enc = RefinedEncoding(maps)
        word = ("q1", "a", "w")
        rest = ("o", "r")
        full = enc.encode(word + rest)
        assert enc.pop_map(word)(full) == PlainEncoding(WORDNET).encode(rest)
        assert enc.push_map(word)(PlainEncoding(WORDNET).encode(rest)) == full

    def test_refined_words_enumeration(self):
        maps = RefinedGammaMap(GammaMap(("q0", "q1")), GammaMap(("_", "x")))
        enc = RefinedEncoding(maps)
        assert sorted(enc.words(2)) == sorted(
            [("q0", "_"), ("q0", "x"), ("q1", "_"), ("q1", "x")]
        )

    def test_refined_cylinders_tile(self):
        maps = RefinedGammaMap(GammaMap(("q0", "q1")), GammaMap(("_", "x")))
        enc = RefinedEncoding(maps)
        cells = sorted(enc.cylinder(w) for w in enc.words(2))
        edge = Fraction(0)
        for lo, span in cells:
            assert lo == edge
            edge = lo + span
        assert edge == 1

    def test_godelize_dotted(self):
        s = parse_dotted(".", fill_left="_", fill_right="_")
        assert godelize_dotted(s, PlainEncoding(AB), PlainEncoding(AB)) == (0, 0)
        s2 = parse_dotted("ab.ba", fill_left="_", fill_right="_")
        x, y = godelize_dotted(s2, PlainEncoding(AB), PlainEncoding(AB))
        assert x == godelize(("b", "a"), AB)
        assert y == godelize(("b", "a"), AB)
        assert 0 <= x <= 1 and 0 <= y <= 1


class TestAffine1D:
    @given(st.fractions(), st.fractions(), st.fractions(), st.fractions(), st.fractions())
    @settings(max_examples=60)
    def test_compose(self, l1, a1, l2, a2, x):
        f = Affine1D(l1, a1)
        g = Affine1D(l2, a2)
        assert f.after(g)(x) == f(g(x))

    def test_identity(self):
        assert Affine1D.identity()(Fraction(3, 7)) == Fraction(3, 7)
