"""shiftnet: from symbolic machines to dotted-sequence shifts, piecewise-affine
maps on the unit square, and explicitly-weighted three-layer recurrent networks.

The pipeline stages live in sibling modules:

* ``symbolic``     dotted sequences, the shift map, versatile shifts
* ``automata``     machine definitions, simulators, codecs, shift compilers
* ``godel``        exact base-g encodings between words and rationals
* ``nda``          the unit-square partition and its affine branches
* ``rann``         the three-layer network construction and staged dynamics
* ``interactive``  coupled tapes, configuration layers, gated components
* ``observables``  mean activity, harmony, trial-averaged activity curves
* ``specfmt``      the textual document format
* ``cli``          the command-line driver

Everything numeric on the simulation path is an exact ``fractions.Fraction``;
floats appear only when figures are rendered.
"""

from .symbolic import DoD, DottedSequence, Rule, VersatileShift, apply_vs, parse_dotted
from .godel import GammaMap, PlainEncoding, RefinedEncoding, RefinedGammaMap
from .automata import CFG, FSM, PDA, TDR, TM
from .nda import NDA, vs_to_nda
from .rann import Network, check_commutativity, compile_machine, nda_to_rann
from .interactive import InteractiveNetwork, garden_path_network
from .observables import amari_mean, harmony, synth_erp

__version__ = "0.1.0"

__all__ = [
    "CFG", "DoD", "DottedSequence", "FSM", "GammaMap", "InteractiveNetwork",
    "NDA", "Network", "PDA", "PlainEncoding", "RefinedEncoding",
    "RefinedGammaMap", "Rule", "TDR", "TM", "VersatileShift", "amari_mean",
    "apply_vs", "check_commutativity", "compile_machine",
    "garden_path_network", "harmony", "nda_to_rann", "parse_dotted",
    "synth_erp", "vs_to_nda",
]
