"""Bundled example documents, stored canonically (built and rendered)."""

from __future__ import annotations

from .specfmt import Block, SpecDocument, render_spec

_CPG = SpecDocument(fields=(
    ("type", "fsm"),
    ("states", "q1 q2 q3 q4"),
    ("input_alphabet", "<lo> <hi>"),
    ("start", "q1"),
    ("gamma_states", "q1=0 q2=1 q3=2 q4=3"),
    ("gamma_input", "<lo>=0 <hi>=1"),
    ("transition", "q1 <lo> -> q3"),
    ("transition", "q2 <lo> -> q4"),
    ("transition", "q3 <lo> -> q2"),
    ("transition", "q4 <lo> -> q1"),
    ("transition", "q1 <hi> -> q2"),
    ("transition", "q2 <hi> -> q3"),
    ("transition", "q3 <hi> -> q4"),
    ("transition", "q4 <hi> -> q1"),
))

_WORD_TM = SpecDocument(fields=(
    ("type", "tm"),
    ("states", "q0 q1"),
    ("tape_alphabet", "_ w o r d a n"),
    ("input_alphabet", "w o r d a n"),
    ("blank", "_"),
    ("start", "q0"),
    ("halting_mode", "identity"),
    ("transition", "q0 o -> q1 a R"),
    ("transition", "q1 r -> q1 n L"),
))


def _diagnosis_transitions():
    lines = []
    for q in ("idle", "parsing", "error"):
        for prev in ("_", "o", "s"):  # top of stack: the previous observation
            for cur in ("_", "o", "s"):  # input: the current parse top
                if prev == "_" and cur == "_":
                    target, push = "idle", "_"
                elif prev == cur:
                    target, push = "error", cur
                else:
                    target, push = "parsing", cur
                lines.append(("transition", f"{q} {cur} {prev} -> {target} push {push}"))
    return tuple(lines)


_GARDEN_PATH = SpecDocument(
    fields=(("type", "interactive"),),
    blocks=(
        Block("tape", "input", (
            ("gamma", "_=0 S=1 o=2 s=3"),
        )),
        Block("tape", "parse", (
            ("gamma", "_=0 S=1 o=2 s=3"),
        )),
        Block("tape", "diagnosis", (
            ("state_gamma", "idle=0 parsing=1 error=2"),
            ("tape_gamma", "_=0 o=1 s=2"),
            ("initial", "idle"),
        )),
        Block("tape", "strategy", (
            ("state_gamma", "so=0 os=1 repair=2"),
            ("tape_gamma", "_=0 o=1 s=2"),
            ("initial", "so"),
        )),
        Block("component", "so-parser", (
            ("type", "tdr"),
            ("nonterminals", "S"),
            ("terminals", "o s"),
            ("blank", "_"),
            ("start", "S"),
            ("stage", "1"),
            ("reads", "parse input"),
            ("writes", "parse input"),
            ("gate", "strategy so"),
            ("rule", "S -> s o"),
        )),
        Block("component", "os-parser", (
            ("type", "tdr"),
            ("nonterminals", "S"),
            ("terminals", "o s"),
            ("blank", "_"),
            ("start", "S"),
            ("stage", "1"),
            ("reads", "parse input"),
            ("writes", "parse input"),
            ("gate", "strategy os"),
            ("rule", "S -> o s"),
        )),
        Block("component", "repair", (
            ("type", "vs"),
            ("blank", "_"),
            ("stage", "1"),
            ("reads", "parse input"),
            ("writes", "parse"),
            ("gate", "strategy repair"),
            ("dod", "-3 0"),
            ("vsrule", "o s . -> s o . shift 0"),
        )),
        Block("component", "diagnosis", (
            ("type", "pda"),
            ("states", "idle parsing error"),
            ("stack_alphabet", "_ o s"),
            ("input_alphabet", "_ o s"),
            ("blank", "_"),
            ("start", "idle"),
            ("stage", "2"),
            ("reads", "diagnosis parse"),
            ("writes", "diagnosis"),
        ) + _diagnosis_transitions()),
        Block("component", "strategy", (
            ("type", "fsm"),
            ("states", "so os repair"),
            ("input_alphabet", "idle parsing error"),
            ("start", "so"),
            ("stage", "3"),
            ("reads", "strategy diagnosis"),
            ("writes", "strategy"),
            ("transition", "so idle -> so"),
            ("transition", "os idle -> so"),
            ("transition", "repair idle -> so"),
            ("transition", "so parsing -> so"),
            ("transition", "os parsing -> os"),
            ("transition", "repair parsing -> os"),
            ("transition", "so error -> repair"),
            ("transition", "os error -> os"),
            ("transition", "repair error -> os"),
        )),
    ),
)

DOCUMENTS = {
    "cpg": render_spec(_CPG),
    "word-tm": render_spec(_WORD_TM),
    "garden-path": render_spec(_GARDEN_PATH),
}
