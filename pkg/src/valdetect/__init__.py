"""valdetect: exact mod-l^n characters, K2 symbols, and valuation detection
over explicit small fields (finite fields, rational function fields, and
Laurent series towers)."""

from .coeffmod import Coeff, FinMod, Level, index_m, index_n, level_bound
from .fields import (
    ValuationHandle,
    Window,
    enumerate_elements,
    format_element,
    parse_element,
    parse_field,
    parse_window,
)
from .characters import Character, CharacterGroup, decomp_chars, inertia_chars

__all__ = [
    "Coeff", "FinMod", "Level", "index_m", "index_n", "level_bound",
    "ValuationHandle", "Window", "enumerate_elements", "format_element",
    "parse_element", "parse_field", "parse_window",
    "Character", "CharacterGroup", "decomp_chars", "inertia_chars",
]

__version__ = "0.1.0"
