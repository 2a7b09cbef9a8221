"""
Shared fixtures for the test suites
"""

import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cli.parser import parse_concept, parse_ontology, parse_parties
from services.concepts import canonicalize
from schemas import SourceDocument
from utils import load_source

FIXTURES = Path(__file__).parent / "fixtures"
METROLOGY = FIXTURES / "metrology.onto"
INSTRUMENT_PARTIES = FIXTURES / "instruments.parties"


def load_metrology():
    return parse_ontology(load_source(METROLOGY, "ontology"))


def load_instrument_parties(ont):
    return {party.name: party for party in parse_parties(load_source(INSTRUMENT_PARTIES, "parties"), ont)}


def ontology_from_text(text: str):
    return parse_ontology(SourceDocument(text=text, kind="ontology"))


def parties_from_text(text: str, ont):
    return {party.name: party for party in parse_parties(SourceDocument(text=text, kind="parties"), ont)}


def c(text: str):
    """Canonical concept expression from concrete syntax"""
    return canonicalize(parse_concept(text))
