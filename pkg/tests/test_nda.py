import random
from fractions import Fraction

import pytest

from shiftnet.automata import (
    TmConfig,
    default_encodings,
    encode_config,
    fsm_to_vs,
    machine_to_vs,
    tm_to_vs,
)
from shiftnet.errors import (
    NoCellError,
    UndefinedBranchError,
)
from shiftnet.examples import cpg_encodings, cpg_fsm, tm_shape, word_tm
from shiftnet.godel import GammaMap, PlainEncoding, godelize_dotted
from shiftnet.nda import (
    Interval,
    compile_branch,
    step_nda,
    switch,
    vs_to_nda,
)
from shiftnet.symbolic import DoD, Rule, VersatileShift, apply_vs

from genmachines import GENERATORS


def cpg_nda():
    gx, gy = cpg_encodings()
    return vs_to_nda(fsm_to_vs(cpg_fsm()), gx, gy)


def word_tm_nda():
    m = word_tm()
    gx, gy = default_encodings(m)
    return vs_to_nda(tm_to_vs(m), gx, gy), m, gx, gy


class TestPartition:
    def test_cpg_shape(self):
        nda = cpg_nda()
        assert (nda.m, nda.n) == (4, 2)
        assert len(nda.branches) == 8

    def test_tm_shape_cells(self):
        m = tm_shape(7, 4)
        gx, gy = default_encodings(m)
        nda = vs_to_nda(machine_to_vs(m), gx, gy)
        assert (nda.m, nda.n) == (28, 4)
        assert len(nda.branches) == 112  # n_q * n_s^2

    def test_single_rule_vs(self):
        vs = VersatileShift(DoD(-1, 1), {((), ("x",)): Rule(((), ("x",)), 0)},
                            fill_left="_", fill_right="x")
        nda = vs_to_nda(vs, PlainEncoding(GammaMap(("x",))),
                        PlainEncoding(GammaMap(("x",))))
        assert (nda.m, nda.n) == (1, 1)

    def test_axes_tile_unit_interval(self):
        nda = cpg_nda()
        for axis in (nda.x_axis, nda.y_axis):
            edge = Fraction(0)
            for iv in axis.intervals:
                assert iv.lo == edge
                edge = iv.hi
            assert edge == 1
            assert axis.intervals[-1].top


class TestInterval:
    def test_half_open(self):
        iv = Interval(Fraction(0), Fraction(1, 2))
        assert Fraction(0) in iv and Fraction(1, 4) in iv
        assert Fraction(1, 2) not in iv

    def test_top_interval_contains_one(self):
        iv = Interval(Fraction(1, 2), Fraction(1), top=True)
        assert Fraction(1) in iv

    def test_validation(self):
        with pytest.raises(ValueError):
            Interval(Fraction(1, 2), Fraction(1, 2))


class TestSwitch:
    def test_origin_is_cell_one_one(self):
        assert switch(cpg_nda(), Fraction(0), Fraction(0)) == (1, 1)

    def test_cpg_half_selects_hi_column(self):
        nda = cpg_nda()
        _, j = switch(nda, Fraction(0), Fraction(1, 2))
        assert nda.y_axis.labels[j - 1] == ("<hi>",)

    def test_outside_raises(self):
        with pytest.raises(NoCellError):
            switch(cpg_nda(), Fraction(3, 2), Fraction(0))

    def test_switch_agrees_with_read_dod(self):
        nda, m, gx, gy = word_tm_nda()
        vs = tm_to_vs(m)
        rng = random.Random(5)
        syms = m.tape_symbols
        for _ in range(60):
            c = TmConfig(tuple(rng.choice(syms) for _ in range(rng.randint(0, 4))),
                         rng.choice(m.states),
                         tuple(rng.choice(syms) for _ in range(rng.randint(0, 4))))
            s = encode_config(m, c)
            x, y = godelize_dotted(s, gx, gy)
            i, j = switch(nda, x, y)
            from shiftnet.symbolic import read_dod
            assert nda.cell_label(i, j) == read_dod(s, vs.dod)


class TestBranches:
    def test_identity_rule_gives_identity_branch(self):
        vs = VersatileShift(
            DoD(-2, 1),
            {(("x",), ("x",)): Rule((("x",), ("x",)), 0)},
            fill_left="_", fill_right="_",
        )
        enc = PlainEncoding(GammaMap(("_", "x")))
        branch = compile_branch(vs, (("x",), ("x",)), enc, enc)
        assert branch.is_identity

    def test_fsm_branch_values(self):
        # state substitution leaves x slope 1; consuming input pops one y digit
        gx, gy = cpg_encodings()
        vs = fsm_to_vs(cpg_fsm())
        branch = compile_branch(vs, (("q1",), ("<lo>",)), gx, gy)
        assert branch.lam_x == 1
        assert branch.a_x == Fraction(2, 4)  # gamma_q(q3)/4 - gamma_q(q1)/4
        assert branch.lam_y == 2
        assert branch.a_y == 0  # -gamma_s(<lo>)

    def test_tm_branch_reproduces_trace_coordinates(self):
        nda, m, gx, gy = word_tm_nda()
        s0 = encode_config(m, TmConfig(("w",), "q0", ("o", "r", "d")))
        s1 = encode_config(m, TmConfig(("a", "w"), "q1", ("r", "d")))
        s2 = encode_config(m, TmConfig(("w",), "q1", ("a", "n", "d")))
        p0 = godelize_dotted(s0, gx, gy)
        p1 = godelize_dotted(s1, gx, gy)
        p2 = godelize_dotted(s2, gx, gy)
        assert step_nda(nda, *p0) == p1
        assert step_nda(nda, *p1) == p2

    def test_undefined_cell_rejects(self):
        nda, m, gx, gy = word_tm_nda()
        s = encode_config(m, TmConfig((), "q0", ("w",)))  # no (q0, w) transition
        x, y = godelize_dotted(s, gx, gy)
        with pytest.raises(UndefinedBranchError):
            step_nda(nda, x, y)

    def test_identity_completion(self):
        m = word_tm()
        gx, gy = default_encodings(m)
        nda = vs_to_nda(tm_to_vs(m), gx, gy, undefined="identity")
        s = encode_config(m, TmConfig((), "q0", ("w",)))
        x, y = godelize_dotted(s, gx, gy)
        assert step_nda(nda, x, y) == (x, y)

    def test_image_containment_all_corners(self):
        nda, _, _, _ = word_tm_nda()
        for (i, j), branch in nda.branches.items():
            if branch is None:
                continue
            ix = nda.x_axis.intervals[i - 1]
            jy = nda.y_axis.intervals[j - 1]
            for cx in (ix.lo, ix.hi):
                for cy in (jy.lo, jy.hi):
                    px, py = branch((cx, cy))
                    assert 0 <= px <= 1 and 0 <= py <= 1

    def test_fixed_point_iff_identity(self):
        nda, _, _, _ = word_tm_nda()
        for (i, j), branch in nda.branches.items():
            if branch is None or not branch.is_identity:
                continue
            ix = nda.x_axis.intervals[i - 1]
            jy = nda.y_axis.intervals[j - 1]
            mid = ((ix.lo + ix.hi) / 2, (jy.lo + jy.hi) / 2)
            assert branch(mid) == mid


class TestCommutativity:
    """psi(Omega(s)) == Phi(psi(s)) on random machines of every kind."""

    @pytest.mark.parametrize("kind", ["fsm", "pda", "tdr", "tm"])
    def test_orbit_commutes(self, kind):
        rng = random.Random(41)
        for _ in range(8):
            machine, configs = GENERATORS[kind](rng, n_configs=6)
            vs = machine_to_vs(machine)
            gx, gy = default_encodings(machine)
            nda = vs_to_nda(vs, gx, gy)
            for c in configs:
                s = encode_config(machine, c)
                x, y = godelize_dotted(s, gx, gy)
                for _ in range(10):
                    try:
                        s = apply_vs(vs, s)
                    except Exception:
                        with pytest.raises((UndefinedBranchError, NoCellError)):
                            step_nda(nda, x, y)
                        break
                    x, y = step_nda(nda, x, y)
                    assert (x, y) == godelize_dotted(s, gx, gy)
