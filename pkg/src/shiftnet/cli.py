"""Command-line driver: compile, run, trace, check, erp, example.

Exit codes: 0 success or acceptance, 1 rejection, 2 divergence in a
commutativity check, 3 input error (bad file, flags, or document), 4 internal
failure. All delimited output is CSV; activations appear both as exact
fractions and as fixed-precision decimals. ``--plot`` additionally renders a
figure next to the delimited output.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .automata import FSM, PDA, TDR, TM, FsmConfig, PdaConfig, TdrConfig, TmConfig
from .automata import decode_config, encode_config
from .errors import (
    NoActiveBranchError,
    ShiftnetError,
    SpecParseError,
    SpecSemanticError,
)
from .godel import godelize_dotted
from .interactive import decode_codes, step_ian
from .observables import amari_mean, synth_erp
from .rann import (
    FixedPoint,
    Homunculus,
    MaxSteps,
    check_commutativity,
    compile_machine,
    init_state,
    run,
)
from .nda import switch
from .specfmt import build, parse_spec
from .symbolic import DottedSequence, parse_dotted, render_dotted

OK, REJECTED, DIVERGED, INPUT_ERROR, INTERNAL = 0, 1, 2, 3, 4


def decimal_str(value: Fraction, digits: int) -> str:
    """Round-half-up decimal rendering of a non-negative exact rational."""
    scaled = value.numerator * 10 ** digits
    q, r = divmod(scaled, value.denominator)
    if 2 * r >= value.denominator:
        q += 1
    text = str(q).rjust(digits + 1, "0")
    return f"{text[:-digits]}.{text[-digits:]}" if digits else text


def sqrt_decimal_str(value: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 12
        root = (Decimal(value.numerator) / Decimal(value.denominator)).sqrt()
        return str(root.quantize(Decimal(1).scaleb(-digits)))


def _write_rows(out_path, header, rows):
    handle = open(out_path, "w", newline="") if out_path else io.StringIO()
    writer = csv.writer(handle)
    writer.writerow(header)
    writer.writerows(rows)
    if out_path:
        handle.close()
    else:
        sys.stdout.write(handle.getvalue())


def _load(path: str):
    text = Path(path).read_text()
    return build(parse_spec(text))


# --- initial configurations --------------------------------------------------------


def _initial_config(machine, args):
    if args.config:
        seq = parse_dotted(args.config,
                           fill_left=getattr(machine, "blank", None),
                           fill_right=getattr(machine, "blank", None))
        return decode_config(machine, seq)
    word = tuple(args.input.split()) if args.input else ()
    if isinstance(machine, FSM):
        return FsmConfig(machine.start, word)
    if isinstance(machine, TDR):
        return TdrConfig((machine.grammar.start,), word)
    if isinstance(machine, PDA):
        stack = tuple(args.stack.split()) if args.stack else ()
        return PdaConfig(machine.start, stack, word)
    if isinstance(machine, TM):
        return TmConfig((), machine.start, word)
    raise SpecSemanticError(f"unsupported machine type {type(machine).__name__}")


def _halting_policy(args, compiled):
    mode = args.halting
    if mode == "fixed-point":
        return FixedPoint()
    if mode == "max":
        return MaxSteps(args.steps)
    if mode.startswith("predicate:"):
        label_text = mode.split(":", 1)[1]
        if " " not in label_text:  # allow q4.<lo> as shorthand for 'q4 . <lo>'
            label_text = label_text.replace(".", " . ")
        want = parse_dotted(label_text)
        target = (want.left, want.right)

        def predicate(state):
            cell = switch(compiled.nda, state[compiled.net.mcl_x],
                          state[compiled.net.mcl_y])
            return compiled.nda.cell_label(*cell) == target

        return Homunculus(predicate)
    raise SpecSemanticError(
        f"halting must be fixed-point, max, or predicate:<cell-label>, got {mode!r}")


def _ramp_overrides(spec: str, steps: int):
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = Fraction(lo), Fraction(hi), int(n)
    except ValueError:
        raise SpecSemanticError(f"stimulus ramp looks like lo:hi:n, got {spec!r}")
    if n < 1:
        raise SpecSemanticError("ramp needs at least one point")

    def override_for_step(t):
        k = min(t - 1, n - 1)
        value = lo if n == 1 else lo + (hi - lo) * Fraction(k, n - 1)
        return {"y": value}

    return override_for_step, n


# --- commands -----------------------------------------------------------------------


def cmd_compile(args) -> int:
    built = _load(args.file)
    lines = []
    if built.is_interactive:
        net = built.interactive
        lines.append(f"interactive network: {len(net.tapes)} tapes, "
                     f"{len(net.components)} components, {net.n_layers} configuration layers")
        for name, comp in net.networks.items():
            lines.append(f"  {name}: partition {comp.m}x{comp.n}, h={comp.h}, "
                         f"units={comp.n_units}")
        lines.append(f"total units (shared layers and bias counted once): "
                     f"{net.unit_count(include_bias=True)}")
    else:
        compiled = compile_machine(built.machine.machine,
                                   (built.machine.gx, built.machine.gy),
                                   **built.machine.vs_kwargs)
        nda, net = compiled.nda, compiled.net
        defined = sum(1 for b in nda.branches.values() if b is not None)
        lines.append(f"type: {type(compiled.machine).__name__.lower()}")
        lines.append(f"shift rules: {len(compiled.vs.rules)}")
        lines.append(f"partition: {nda.m} x {nda.n} cells "
                     f"({defined} defined, {nda.m * nda.n - defined} undefined)")
        lines.append(f"inhibition h: {net.h}")
        lines.append(f"units: 2 + {nda.m} + {nda.n} + 2*{nda.m}*{nda.n} + 1 "
                     f"= {net.n_units}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def _run_machine(args, built) -> int:
    compiled = compile_machine(built.machine.machine,
                               (built.machine.gx, built.machine.gy),
                               **built.machine.vs_kwargs)
    config = _initial_config(compiled.machine, args)
    seq = encode_config(compiled.machine, config)
    x, y = godelize_dotted(seq, compiled.gx, compiled.gy)
    state = init_state(compiled.net, x, y)

    override_fn = None
    steps = args.steps
    if args.stimulus_ramp:
        override_fn, n = _ramp_overrides(args.stimulus_ramp, steps)
        steps = max(steps, n)
    policy = _halting_policy(args, compiled) if args.halting != "max" \
        else MaxSteps(steps)
    trace = run(compiled.net, state, policy, max_steps=steps,
                override_for_step=override_fn)

    digits = args.precision
    rows = []
    for t, st in enumerate(trace.states):
        cx, cy = compiled.net.mcl(st)
        try:
            i, j = switch(compiled.nda, cx, cy)
            cell = f"{i},{j}"
        except ShiftnetError:
            cell = ""
        decoded = render_dotted(DottedSequence(
            _decode_or_none(compiled.gx, cx), _decode_or_none(compiled.gy, cy),
            compiled.vs.fill_left, compiled.vs.fill_right))
        rows.append([t, cx, decimal_str(cx, digits), cy, decimal_str(cy, digits),
                     cell, decoded])
    _write_rows(args.out, ["step", "c_x", "c_x_decimal", "c_y", "c_y_decimal",
                           "cell", "configuration"], rows)
    if args.plot:
        from .plotting import save_run_figure
        target = _figure_path(args.out, "run")
        save_run_figure(compiled.net, trace, target, title=Path(args.file).stem)
        print(f"figure written to {target}", file=sys.stderr)
    if trace.outcome == "rejected":
        print(f"rejected at step {len(trace.steps) + 1}", file=sys.stderr)
        return REJECTED
    return OK


def _run_interactive(args, built) -> int:
    net = built.interactive
    state = net.initial_state()
    digits = args.precision
    stim_tapes = tuple(args.stimulus_tapes.split(","))
    stimulus = None
    if args.stimulus:
        seq = parse_dotted(args.stimulus)
        stimulus = {stim_tapes[0]: net.tapes[stim_tapes[0]].encode(seq.left),
                    stim_tapes[1]: net.tapes[stim_tapes[1]].encode(seq.right)}

    rows, plot_rows = [], []
    for t in range(args.steps + 1):
        if t == args.presentation_step and stimulus:
            cl = dict(state.codes)
            cl.update(stimulus)
            state = type(state)(cls=state.cls[:-1] + (cl,),
                                component_bsl=state.component_bsl,
                                component_ltl=state.component_ltl,
                                meta=state.meta)
        elif t > 0:
            state = step_ian(net, state)
        words = decode_codes(net, state.codes)
        mean = amari_mean(net, state)
        row = [t]
        plot_row = {"step": t, "mean_activity": mean}
        for tape in net.tapes:
            code = state.codes[tape]
            row.extend([code, decimal_str(code, digits), " ".join(words[tape])])
            plot_row[tape] = code
        row.append(decimal_str(mean, digits))
        rows.append(row)
        plot_rows.append(plot_row)

    header = ["step"]
    for tape in net.tapes:
        header.extend([tape, f"{tape}_decimal", f"{tape}_decoded"])
    header.append("mean_activity")
    _write_rows(args.out, header, rows)
    if args.plot:
        from .plotting import save_ian_figure
        target = _figure_path(args.out, "run")
        save_ian_figure(net, plot_rows, target, title=Path(args.file).stem)
        print(f"figure written to {target}", file=sys.stderr)
    return OK


def cmd_run(args) -> int:
    built = _load(args.file)
    if built.is_interactive:
        return _run_interactive(args, built)
    return _run_machine(args, built)


def cmd_trace(args) -> int:
    built = _load(args.file)
    if built.is_interactive:
        raise SpecSemanticError("trace works on machine documents; use run for "
                                "interactive networks")
    compiled = compile_machine(built.machine.machine,
                               (built.machine.gx, built.machine.gy),
                               **built.machine.vs_kwargs)
    config = _initial_config(compiled.machine, args)
    seq = encode_config(compiled.machine, config)
    x, y = godelize_dotted(seq, compiled.gx, compiled.gy)
    state = init_state(compiled.net, x, y)
    override_fn = None
    steps = args.steps
    if args.stimulus_ramp:
        override_fn, n = _ramp_overrides(args.stimulus_ramp, steps)
        steps = max(steps, n)
    trace = run(compiled.net, state, MaxSteps(steps), override_for_step=override_fn)

    digits = args.precision
    rows = []
    for t, stages in enumerate(trace.steps, start=1):
        for stage_name, snapshot in (("bsl", stages.after_bsl),
                                     ("ltl", stages.after_ltl),
                                     ("mcl", stages.after_mcl)):
            for unit in compiled.net.units:
                value = snapshot[unit.index]
                rows.append([t, stage_name, unit.name, unit.layer,
                             value, decimal_str(value, digits)])
    _write_rows(args.out, ["macro_step", "stage", "unit", "layer",
                           "activation", "activation_decimal"], rows)
    if args.plot:
        from .plotting import save_run_figure
        target = _figure_path(args.out, "trace")
        save_run_figure(compiled.net, trace, target, title=Path(args.file).stem)
        print(f"figure written to {target}", file=sys.stderr)
    if trace.outcome == "rejected":
        print(f"rejected at step {len(trace.steps) + 1}", file=sys.stderr)
        return REJECTED
    return OK


def cmd_check(args) -> int:
    built = _load(args.file)
    if built.is_interactive:
        raise SpecSemanticError("check works on machine documents")
    compiled = compile_machine(built.machine.machine,
                               (built.machine.gx, built.machine.gy),
                               **built.machine.vs_kwargs)
    config = _initial_config(compiled.machine, args)
    report = check_commutativity(compiled.machine, config, args.steps,
                                 compiled=compiled)
    print(report)
    for line in report.lines:
        print(f"  {line}")
    return OK if report.ok else DIVERGED


def cmd_erp(args) -> int:
    built = _load(args.file)
    if not built.is_interactive:
        raise SpecSemanticError("erp needs an interactive network document")
    net = built.interactive
    digits = args.precision
    conditions = [c.strip() for c in args.conditions.split(",") if c.strip()]
    if not conditions:
        raise SpecSemanticError("no conditions given")
    tail_symbols = tuple(args.tail_symbols.split(","))
    stim_tapes = tuple(args.stimulus_tapes.split(","))
    results = []
    for label in conditions:
        stimulus = parse_dotted(label)
        results.append(synth_erp(
            net, stimulus, n_trials=args.trials, tail_length=args.tail_length,
            seed=args.seed, max_steps=args.steps, condition=label,
            presentation_step=args.presentation_step,
            stimulus_tapes=stim_tapes, tail_symbols=tail_symbols))
    rows = []
    for res in results:
        for t in res.steps:
            rows.append([t, decimal_str(res.means[t], digits),
                         sqrt_decimal_str(res.variances[t], digits), res.condition])
    _write_rows(args.out, ["step", "mean", "std", "condition_label"], rows)
    if args.plot:
        from .plotting import save_erp_figure
        target = _figure_path(args.out, "erp")
        save_erp_figure(results, target, title=Path(args.file).stem)
        print(f"figure written to {target}", file=sys.stderr)
    return OK


def cmd_example(args) -> int:
    from .bundled import DOCUMENTS

    if args.name == "list":
        for name in DOCUMENTS:
            print(name)
        return OK
    if args.name not in DOCUMENTS:
        raise SpecSemanticError(
            f"unknown example {args.name!r}; try: {', '.join(DOCUMENTS)}")
    target = Path(args.dir) / f"{args.name}.mach"
    target.write_text(DOCUMENTS[args.name])
    print(target)
    return OK


def _decode_or_none(encoding, code):
    # ramp overrides may clamp a coordinate to a value outside the code set
    try:
        return encoding.decode(code)
    except ShiftnetError:
        return ("?",)


def _figure_path(out, kind):
    if out:
        return str(Path(out).with_suffix(".png"))
    return f"shiftnet-{kind}.png"


# --- argument parsing ----------------------------------------------------------------


def _add_common_run_flags(p):
    p.add_argument("--config", help="initial configuration as a dotted word, "
                                    "e.g. 'w q0 . o r d'")
    p.add_argument("--input", help="input word (start state implied)")
    p.add_argument("--stack", help="initial stack for push-down machines")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--precision", type=int, default=12)
    p.add_argument("--plot", action="store_true",
                   help="render a figure next to the delimited output")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftnet",
        description="Compile symbolic machines into shift maps, piecewise-affine "
                    "dynamics, and explicitly-weighted recurrent networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="build the full pipeline and summarize it")
    p.add_argument("file")
    p.add_argument("--summary", action="store_true", help="(default output)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("run", help="simulate the compiled network")
    p.add_argument("file")
    _add_common_run_flags(p)
    p.add_argument("--halting", default="max",
                   help="fixed-point | max | predicate:<cell-label>")
    p.add_argument("--stimulus-ramp", dest="stimulus_ramp",
                   help="override c_y with lo:hi:n across steps")
    p.add_argument("--stimulus", help="dotted word presented to an interactive "
                                      "network, e.g. 'S . o s'")
    p.add_argument("--stimulus-tapes", dest="stimulus_tapes", default="parse,input")
    p.add_argument("--presentation-step", dest="presentation_step", type=int,
                   default=2)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("trace", help="per-unit, per-stage activation rows")
    p.add_argument("file")
    _add_common_run_flags(p)
    p.add_argument("--stimulus-ramp", dest="stimulus_ramp")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("check", help="four-route commutativity check")
    p.add_argument("file")
    p.add_argument("--config")
    p.add_argument("--input")
    p.add_argument("--stack")
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("erp", help="trial-averaged mean-activity curves")
    p.add_argument("file")
    p.add_argument("--conditions", required=True,
                   help="comma-separated dotted stimuli, e.g. 'S.so,S.os'")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tail-length", dest="tail_length", type=int, default=6)
    p.add_argument("--tail-symbols", dest="tail_symbols", default="o,s")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--stimulus-tapes", dest="stimulus_tapes", default="parse,input")
    p.add_argument("--presentation-step", dest="presentation_step", type=int,
                   default=2)
    p.add_argument("--out")
    p.add_argument("--precision", type=int, default=12)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_erp)

    p = sub.add_parser("example", help="materialize a bundled specification")
    p.add_argument("name", help="cpg | word-tm | garden-path | list")
    p.add_argument("--dir", default=".")
    p.set_defaults(fn=cmd_example)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code not in (0, None) else OK
    try:
        return args.fn(args)
    except (SpecParseError, SpecSemanticError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except NoActiveBranchError as e:
        print(f"rejected: {e}", file=sys.stderr)
        return REJECTED
    except ShiftnetError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except Exception as e:  # pragma: no cover - internal failures
        print(f"internal error: {e}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
