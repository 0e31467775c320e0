"""Palindromic structure and approximation certificates for continued fractions."""
from .cf_core import ConvergentTable, convergent_table, continuant, cf_value, composite_convergents
from .evidence import CriterionReport, InequalityEvidence
from .generators import (ApproxOrderFunction, BakerSpec, SequenceSpec, parse_spec, thue_morse_word,
                         baker_word, theorem5_word)
from .interval import RationalInterval
from .words import (QuasiPalindromeWitness, find_offset_witnesses, find_quasi_palindrome_witnesses,
                    palindromic_prefix_lengths)

__version__ = "0.1.0"
