import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftnet.errors import InvalidShiftError, MissingFillError, NoRuleError
from shiftnet.symbolic import (
    DoD,
    DottedSequence,
    Rule,
    VersatileShift,
    apply_vs,
    apply_vs_or_identity,
    parse_dotted,
    read_dod,
    render_dotted,
    shift_dot,
    substitute,
)


def seq(text, fill="_"):
    return parse_dotted(text, fill_left=fill, fill_right=fill)


# The running example: DoD (-2, 1), o.r -> a.n with no shift, then
# a.n -> on.dere with one left shift.
OMEGA_EX = VersatileShift(
    dod=DoD(-2, 1),
    rules={
        (("o",), ("r",)): Rule(((("a",), ("n",))), 0),
        (("a",), ("n",)): Rule((("n", "o"), ("d", "e", "r", "e")), 1),
    },
    fill_left="_",
    fill_right="_",
)


class TestParseRender:
    def test_parse_chars(self):
        s = seq("wo.rd")
        assert s.left == ("o", "w")
        assert s.right == ("r", "d")

    def test_parse_spaced(self):
        s = parse_dotted("w q0 . o r d")
        assert s.left == ("q0", "w")
        assert s.right == ("o", "r", "d")

    def test_render_roundtrip(self):
        for text in ["wo.rd", "won.dered", ".", "ab."]:
            assert render_dotted(seq(text)) == text

    def test_render_spaced_roundtrip(self):
        s = parse_dotted("w q0 . o r d")
        assert render_dotted(s) == "w q0 . o r d"


class TestShiftDot:
    def test_shift_left_positive(self):
        assert shift_dot(seq("won.dered"), 1) == seq("wo.ndered")

    def test_zero_is_identity(self):
        s = seq("wo.rd")
        assert shift_dot(s, 0) == s

    def test_shift_right_negative(self):
        assert shift_dot(parse_dotted("w a . q1 r d"), -1) == parse_dotted("w a q1 . r d")

    @given(st.integers(-6, 6), st.integers(-6, 6))
    @settings(max_examples=60)
    def test_shift_composes_additively(self, a, b):
        s = seq("ab.cd")
        assert shift_dot(shift_dot(s, a), b) == shift_dot(s, a + b)

    @given(st.integers(-8, 8))
    @settings(max_examples=40)
    def test_shift_inverts(self, f):
        s = seq("wo.rd")
        assert shift_dot(shift_dot(s, f), -f) == s

    def test_missing_fill_raises(self):
        s = DottedSequence((), ("a",), fill_left=None, fill_right=None)
        with pytest.raises(MissingFillError):
            shift_dot(s, 1)


class TestSubstituteReadDod:
    def test_substitute_word_example(self):
        out = substitute(seq("wo.rd"), DoD(-2, 1), ((("a",), ("n",))))
        assert out == seq("wa.nd")

    def test_substitute_growing(self):
        out = substitute(seq("wa.nd"), DoD(-2, 1), (("n", "o"), ("d", "e", "r", "e")))
        assert out == seq("won.dered")

    def test_identity_substitution(self):
        s = seq("wo.rd")
        key = read_dod(s, DoD(-2, 1))
        assert substitute(s, DoD(-2, 1), key) == s

    def test_read_dod_example(self):
        assert read_dod(seq("wo.rd"), DoD(-2, 1)) == (("o",), ("r",))

    def test_read_dod_blank_fill(self):
        assert read_dod(seq("."), DoD(-2, 1)) == (("_",), ("_",))

    def test_read_dod_wider(self):
        # direct index arithmetic: left cells -1..-3 hold b, a, fill; right cell 0 holds c
        assert read_dod(seq("ab.cd"), DoD(-3, 1)) == (("b", "a"), ("c",))

    @given(st.text(alphabet="abc", min_size=0, max_size=4),
           st.text(alphabet="abc", min_size=0, max_size=4))
    @settings(max_examples=60)
    def test_substitute_then_read_returns_replacement(self, lw, rw):
        if not lw and not rw:
            return
        dod = DoD(-(len(lw) + 1), len(rw))
        repl = (tuple(lw), tuple(rw))
        out = substitute(seq("wo.rd"), dod, repl)
        got_left, got_right = read_dod(out, dod)
        # trailing fills may have been canonicalized away; fill-padding restores them
        assert got_left == repl[0] and got_right == repl[1]


class TestCanonicalization:
    def test_trailing_fill_stripped(self):
        assert DottedSequence(("a", "_", "_"), ("b", "_"), "_", "_") == \
            DottedSequence(("a",), ("b",), "_", "_")

    def test_inner_fill_kept(self):
        s = DottedSequence(("_", "a"), (), "_", "_")
        assert s.left == ("_", "a")

    def test_idempotent(self):
        s = DottedSequence(("a", "_"), ("b", "_"), "_", "_")
        assert DottedSequence(s.left, s.right, "_", "_") == s


class TestApplyVs:
    def test_worked_trace(self):
        s1 = apply_vs(OMEGA_EX, seq("wo.rd"))
        assert s1 == seq("wa.nd")
        s2 = apply_vs(OMEGA_EX, s1)
        assert s2 == seq("wo.ndered")

    def test_no_rule(self):
        with pytest.raises(NoRuleError):
            apply_vs(OMEGA_EX, seq("xy.zw"))

    def test_identity_fallback(self):
        s = seq("xy.zw")
        assert apply_vs_or_identity(OMEGA_EX, s) == s

    def test_deterministic_on_canonical_equals(self):
        a = DottedSequence(("o", "w", "_"), ("r", "d"), "_", "_")
        b = seq("wo.rd")
        assert a == b
        assert apply_vs(OMEGA_EX, a) == apply_vs(OMEGA_EX, b)

    def test_invalid_shift_rejected_at_construction(self):
        with pytest.raises(InvalidShiftError):
            VersatileShift(
                dod=DoD(-2, 1),
                rules={(("a",), ("b",)): Rule(((), ("b",)), 1)},
                fill_left="_",
                fill_right="_",
            )

    def test_shift_within_replacement_allowed(self):
        vs = VersatileShift(
            dod=DoD(-2, 1),
            rules={(("a",), ("b",)): Rule((("x", "y"), ("b",)), 2)},
            fill_left="_",
            fill_right="_",
        )
        out = apply_vs(vs, seq("a.b"))
        assert out == seq(".yxb")

    def test_key_shape_checked(self):
        with pytest.raises(ValueError):
            VersatileShift(dod=DoD(-2, 1), rules={(("a", "b"), ("c",)): Rule((((), ())))})


class TestDoD:
    def test_lengths(self):
        d = DoD(-3, 1)
        assert d.left_len == 2 and d.right_len == 1

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DoD(-1, 0)

    def test_rejects_bad_signs(self):
        with pytest.raises(ValueError):
            DoD(1, 1)
