"""Bundled sample theory files and CSV fixtures for the PRM domain."""

from __future__ import annotations

import os
from typing import Dict, List

from ..store import RelStore, load_csv
from ..terms import Session
from ..theory import CompiledTheory, compile_theory, parse_theory

_HERE = os.path.dirname(__file__)

PRM = os.path.join(_HERE, "prm.ldt")
PRM_MINI = os.path.join(_HERE, "prm_mini.ldt")
S1_INPUT = os.path.join(_HERE, "s1.trl")
DATA_DIR = os.path.join(_HERE, "data")


def theory_path(name: str) -> str:
    return os.path.join(_HERE, name)


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


def load_prm(session: Session = None):
    """Compiled PRM theory plus a store loaded from the bundled fixtures."""
    theory = compile_theory(parse_theory(open(PRM, encoding="utf-8").read()), session)
    store = RelStore()
    for name in sorted(os.listdir(DATA_DIR)):
        if not name.endswith(".csv"):
            continue
        rel = name[:-4]
        decl = theory.relations.get(rel)
        if decl is not None:
            load_csv(data_path(name), decl, store)
    return theory, store


def load_prm_mini(session: Session = None):
    theory = compile_theory(parse_theory(open(PRM_MINI, encoding="utf-8").read()), session)
    store = RelStore()
    for name in ("SRI_EMPLOYEE.csv", "SRI_PROJECT.csv", "SRI_PROJECT_MEMBER.csv"):
        decl = theory.relations.get(name[:-4])
        if decl is not None:
            load_csv(data_path(name), decl, store)
    return theory, store


def s1_formula():
    from ..syntax import parse_formula

    return parse_formula(open(S1_INPUT, encoding="utf-8").read())
