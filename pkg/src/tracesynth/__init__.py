"""Synthesis of asynchronous automata from automata recognising trace
languages, through a polynomial-size unfolding."""

from .asyncauto import (
    AsyncAutomaton,
    Distribution,
    bounded_language,
    default_distribution,
    global_automaton_bounded,
    validate_distribution,
)
from .automata import Automaton, check_id, check_morphism, enumerate_language, export_dot, restrict
from .errors import CapExceeded, TraceSynthError, ValidationError
from .instances import Instance, generate_instance, load_instance, parse_instance
from .synthesis import Internal, build_extended, extend_alphabet, project_rho, synthesize
from .traces import IndependenceAlphabet, equivalent, normal_form, trace_closure_bounded, validate_alphabet
from .unfold import Base, Marked, Unfolder, unfolding

__version__ = "0.1.0"

__all__ = [
    "AsyncAutomaton", "Automaton", "Base", "CapExceeded", "Distribution", "IndependenceAlphabet",
    "Instance", "Internal", "Marked", "TraceSynthError", "Unfolder", "ValidationError",
    "bounded_language", "build_extended", "check_id", "check_morphism", "default_distribution",
    "enumerate_language", "equivalent", "export_dot", "extend_alphabet", "generate_instance",
    "global_automaton_bounded", "load_instance", "normal_form", "parse_instance", "project_rho",
    "restrict", "synthesize", "trace_closure_bounded", "unfolding", "validate_alphabet",
    "validate_distribution",
]
