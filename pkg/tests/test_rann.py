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
    MaxStepsExceededError,
    NoActiveBranchError,
    OutOfRangeError,
)
from shiftnet.examples import cpg_encodings, cpg_fsm, tm_shape, word_tm
from shiftnet.godel import GammaMap, PlainEncoding, godelize_dotted
from shiftnet.nda import step_nda, vs_to_nda
from shiftnet.rann import (
    FixedPoint,
    Homunculus,
    MaxSteps,
    check_commutativity,
    init_state,
    macro_step,
    macro_step_stages,
    nda_to_rann,
    run,
)
from shiftnet.symbolic import DoD, Rule, VersatileShift

from genmachines import GENERATORS


def build_net(machine, **vs_kwargs):
    vs = machine_to_vs(machine, **vs_kwargs)
    gx, gy = default_encodings(machine)
    nda = vs_to_nda(vs, gx, gy)
    return nda_to_rann(nda), nda, gx, gy


def cpg_net():
    gx, gy = cpg_encodings()
    nda = vs_to_nda(fsm_to_vs(cpg_fsm()), gx, gy)
    return nda_to_rann(nda), nda, gx, gy


class TestUnitCounts:
    def test_tm_7_4_has_259_units(self):
        net, _, _, _ = build_net(tm_shape(7, 4))
        assert net.n_units == 259

    def test_tm_6_4_has_223_units(self):
        net, _, _, _ = build_net(tm_shape(6, 4))
        assert net.n_units == 223

    def test_one_by_one_nda_has_7_units(self):
        vs = VersatileShift(DoD(-1, 1), {((), ("x",)): Rule(((), ("x",)), 0)},
                            fill_left="x", fill_right="x")
        enc = PlainEncoding(GammaMap(("x",)))
        net = nda_to_rann(vs_to_nda(vs, enc, enc))
        assert net.n_units == 2 + 1 + 1 + 2 + 1

    def test_formula_matches_layout(self):
        net, nda, _, _ = cpg_net()
        assert net.n_units == 2 + nda.m + nda.n + 2 * nda.m * nda.n + 1


class TestWeights:
    def test_weight_value_discipline(self):
        net, nda, _, _ = build_net(word_tm())
        half = net.h / 2
        allowed_lam = set()
        allowed_bias = set()
        for branch in nda.branches.values():
            if branch is None:
                continue
            allowed_lam.update({branch.lam_x, branch.lam_y})
            allowed_bias.update({branch.a_x - net.h, branch.a_y - net.h})
        thresholds = {-t for t in net.x_thresholds + net.y_thresholds}
        allowed = {Fraction(0), Fraction(1), half, -half} | allowed_lam | allowed_bias | thresholds
        allowed.add(-net.h)  # placeholder slots carry a - h with a = 0
        for value in net.weights.values():
            assert value in allowed, value

    def test_inhibition_bound(self):
        net, nda, _, _ = build_net(word_tm())
        worst = max(
            max(b.a_x + b.lam_x, b.a_y + b.lam_y)
            for b in nda.branches.values() if b is not None
        )
        assert net.h / 2 >= worst

    def test_minimum_h_for_identity_network(self):
        vs = VersatileShift(DoD(-1, 1), {((), ("x",)): Rule(((), ("x",)), 0)},
                            fill_left="x", fill_right="x")
        enc = PlainEncoding(GammaMap(("x",)))
        net = nda_to_rann(vs_to_nda(vs, enc, enc))
        assert net.h == 2


class TestInitState:
    def test_zero_point(self):
        net, _, _, _ = cpg_net()
        st = init_state(net, Fraction(0), Fraction(0))
        assert net.mcl(st) == (0, 0)
        assert st[net.bias] == 1
        assert all(st[i] == 0 for i in net.bsl_x + net.bsl_y)

    def test_out_of_range(self):
        net, _, _, _ = cpg_net()
        with pytest.raises(OutOfRangeError):
            init_state(net, Fraction(2), Fraction(0))

    def test_matches_nda_point(self):
        net, nda, gx, gy = cpg_net()
        s = encode_config(cpg_fsm(), __import__("shiftnet.automata", fromlist=["FsmConfig"]).FsmConfig("q2", ("<hi>",)))
        x, y = godelize_dotted(s, gx, gy)
        st = init_state(net, x, y)
        assert net.mcl(st) == (x, y)


class TestMacroStep:
    def test_bsl_monotone(self):
        net, _, gx, gy = cpg_net()
        st = init_state(net, Fraction(5, 8), Fraction(1, 2))
        stages = macro_step_stages(net, st)
        bx = [stages.after_bsl[i] for i in net.bsl_x]
        by = [stages.after_bsl[i] for i in net.bsl_y]
        for vec in (bx, by):
            assert all(v in (0, 1) for v in vec)
            # ones form a prefix
            assert vec == sorted(vec, reverse=True)

    def test_single_active_pair(self):
        net, nda, gx, gy = cpg_net()
        st = init_state(net, Fraction(1, 4), Fraction(0))
        stages = macro_step_stages(net, st)
        active = [(cell, tx, ty) for cell, (tx, ty) in net.ltl.items()
                  if stages.after_ltl[tx] != 0 or stages.after_ltl[ty] != 0]
        assert len(active) == 1
        assert active[0][0] == (2, 1)  # second state column, <lo> row

    def test_macro_step_equals_nda_step(self):
        net, nda, gx, gy = cpg_net()
        x, y = Fraction(1, 4), Fraction(1, 4)
        st = init_state(net, x, y)
        for _ in range(6):
            st = macro_step(net, st)
            x, y = step_nda(nda, x, y)
            assert net.mcl(st) == (x, y)

    def test_structured_equals_matrix(self):
        rng = random.Random(77)
        for kind in ("fsm", "tm", "pda", "tdr"):
            machine, configs = GENERATORS[kind](rng, n_configs=3)
            net, nda, gx, gy = build_net(machine)
            for c in configs:
                s = encode_config(machine, c)
                x, y = godelize_dotted(s, gx, gy)
                st_a = st_b = init_state(net, x, y)
                for _ in range(4):
                    try:
                        a = macro_step_stages(net, st_a, method="structured")
                        b = macro_step_stages(net, st_b, method="matrix")
                    except NoActiveBranchError:
                        with pytest.raises(NoActiveBranchError):
                            macro_step_stages(net, st_b, method="matrix")
                        break
                    assert a.after_bsl == b.after_bsl
                    assert a.after_ltl == b.after_ltl
                    assert a.after_mcl == b.after_mcl
                    st_a, st_b = a.after_mcl, b.after_mcl

    def test_override_replaces_mcl(self):
        net, _, _, _ = cpg_net()
        st = init_state(net, Fraction(0), Fraction(0))
        out = macro_step(net, st, override={"y": Fraction(1, 2)})
        # q1 under <hi> goes to q2, whose code is 1/4
        assert out[net.mcl_x] == Fraction(1, 4)

    def test_no_active_branch(self):
        net, _, gx, gy = build_net(word_tm())
        m = word_tm()
        s = encode_config(m, TmConfig((), "q0", ("w",)))
        x, y = godelize_dotted(s, gx, gy)
        with pytest.raises(NoActiveBranchError):
            macro_step(net, init_state(net, x, y))


class TestGating:
    def test_gate_sum_trichotomy(self):
        # reconstruct B sums from BSL values for every cell and random states
        net, nda, gx, gy = build_net(tm_shape(3, 3))  # total table, no rejection
        rng = random.Random(9)
        h = net.h
        for _ in range(40):
            x = Fraction(rng.randrange(0, 64), 64)
            y = Fraction(rng.randrange(0, 64), 64)
            st = init_state(net, x, y)
            stages = macro_step_stages(net, st)
            bx = [stages.after_bsl[i] for i in net.bsl_x] + [Fraction(0)]
            by = [stages.after_bsl[i] for i in net.bsl_y] + [Fraction(0)]
            reached_h = 0
            for (i, j) in net.ltl:
                b_sum = (bx[i - 1] - bx[i]) * h / 2 + (by[j - 1] - by[j]) * h / 2
                assert b_sum in (0, h / 2, h)
                reached_h += b_sum == h
            assert reached_h == 1

    def test_dead_branch_silence(self):
        # every non-selected cell stays silent for any configuration point
        net, nda, _, _ = build_net(tm_shape(3, 3))
        rng = random.Random(19)
        for _ in range(25):
            x = Fraction(rng.randrange(0, 32), 32)
            y = Fraction(rng.randrange(0, 32), 32)
            st = init_state(net, x, y)
            stages = macro_step_stages(net, st)
            from shiftnet.nda import switch
            sel = switch(nda, x, y)
            for cell, (tx, ty) in net.ltl.items():
                if cell != sel:
                    assert stages.after_ltl[tx] == 0
                    assert stages.after_ltl[ty] == 0


class TestRun:
    def test_fixed_point_on_halting_tm(self):
        m = __import__("shiftnet.automata", fromlist=["TM"]).TM(
            states=("q0", "qh"), tape_symbols=("_", "x"), input_symbols=("x",),
            start="q0", blank="_", halting=frozenset({"qh"}),
            delta={("q0", "x"): ("qh", "x", "R")})
        vs = tm_to_vs(m, halting="identity")
        gx, gy = default_encodings(m)
        net = nda_to_rann(vs_to_nda(vs, gx, gy))
        s = encode_config(m, TmConfig((), "q0", ("x", "x")))
        st = init_state(net, *godelize_dotted(s, gx, gy))
        trace = run(net, st, FixedPoint())
        assert trace.outcome == "fixed-point"
        assert len(trace.steps) == 2  # one real step, one to certify the fix

    def test_max_steps_policy(self):
        net, _, _, _ = cpg_net()
        st = init_state(net, Fraction(0), Fraction(0))
        trace = run(net, st, MaxSteps(5))
        assert trace.outcome == "max-steps"
        assert len(trace.steps) == 5

    def test_fixed_point_timeout(self):
        net, _, _, _ = cpg_net()
        st = init_state(net, Fraction(0), Fraction(0))
        with pytest.raises(MaxStepsExceededError):
            run(net, st, FixedPoint(), max_steps=8)

    def test_homunculus(self):
        net, nda, _, _ = cpg_net()
        st = init_state(net, Fraction(0), Fraction(0))
        # stop when the configuration enters the q4 column (code >= 3/4)
        trace = run(net, st, Homunculus(lambda s: s[net.mcl_x] >= Fraction(3, 4)))
        assert trace.outcome == "halted-predicate"

    def test_rejection_outcome(self):
        net, _, gx, gy = build_net(word_tm())
        m = word_tm()
        s = encode_config(m, TmConfig((), "q0", ("o",)))
        st = init_state(net, *godelize_dotted(s, gx, gy))
        trace = run(net, st, MaxSteps(10))
        assert trace.outcome == "rejected"
        assert len(trace.steps) >= 1


class TestCpgDynamics:
    def decode_state(self, net, gx, st):
        word = gx.decode(st[net.mcl_x])
        return word[0]

    def cycle_under(self, value):
        net, nda, gx, gy = cpg_net()
        st = init_state(net, Fraction(0), Fraction(value))
        states = []
        for _ in range(4):
            st = macro_step(net, st, override={"y": Fraction(value)})
            states.append(self.decode_state(net, gx, st))
        return tuple(states)

    def test_walk_cycle_low(self):
        assert self.cycle_under(Fraction(0)) == ("q3", "q2", "q4", "q1")

    def test_gallop_cycle_high(self):
        assert self.cycle_under(Fraction(1, 2)) == ("q2", "q3", "q4", "q1")

    def test_boundary_is_exact(self):
        just_below = Fraction(1, 2) - Fraction(1, 10 ** 9)
        assert self.cycle_under(just_below) == ("q3", "q2", "q4", "q1")
        assert self.cycle_under(Fraction(1, 2)) == ("q2", "q3", "q4", "q1")


class TestCommutativityCheck:
    def test_worked_tm_trace(self):
        m = word_tm()
        report = check_commutativity(m, TmConfig(("w",), "q0", ("o", "r", "d")), 2)
        assert report.ok
        assert report.steps_checked == 2

    def test_identity_machine(self):
        m = __import__("shiftnet.automata", fromlist=["TM"]).TM(
            states=("q0", "qh"), tape_symbols=("_", "x"), input_symbols=("x",),
            start="q0", blank="_", halting=frozenset({"qh"}),
            delta={("q0", "x"): ("qh", "x", "R")})
        report = check_commutativity(m, TmConfig((), "q0", ("x",)), 5)
        assert report.ok
        assert report.outcome == "halted"

    def test_fsm_exhaustive_words(self):
        m = cpg_fsm()
        from shiftnet.automata import FsmConfig
        import itertools
        for n in range(0, 6):
            for word in itertools.product(("<lo>", "<hi>"), repeat=n):
                report = check_commutativity(m, FsmConfig("q1", word), n)
                assert report.ok, report.first_divergence

    def test_random_machines_all_kinds(self):
        rng = random.Random(100)
        for kind in ("fsm", "pda", "tdr", "tm"):
            for _ in range(4):
                machine, configs = GENERATORS[kind](rng, n_configs=4)
                for c in configs:
                    report = check_commutativity(machine, c, 6)
                    assert report.ok, (kind, report.first_divergence)
