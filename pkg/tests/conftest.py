"""Shared fixtures and helpers for the qomin test suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from qomin import corpus, models
from qomin.models import Window
from qomin.syntax import Theory, parse


def assignments(theory: Theory, fvs, window: Window):
    """All assignments of the free variables over the window, as dicts."""
    fvs = sorted(fvs)
    elems = models.enumerate_window(theory, window)
    for combo in itertools.product(elems, repeat=len(fvs)):
        yield dict(zip(fvs, combo))


def pair(a, b) -> tuple:
    """Z x Q / chain element litera."""
    return (a, Fraction(b))


@pytest.fixture(scope="session")
def pres_windows():
    return corpus.windows(Theory.PRES_Z)


@pytest.fixture(scope="session")
def lex_zq_windows():
    return corpus.windows(Theory.LEX_ZQ)
