"""Shared fixtures: the bundled families at small depths."""

import pytest

from adicsurf.families import FamilyParams, generate


def make_family(name, *args, depth=8, neg_depth=None):
    return generate(FamilyParams(name, tuple(args)), depth, neg_depth)


@pytest.fixture
def odometer():
    return make_family("odometer", "2")


@pytest.fixture
def chamanara():
    return make_family("chamanara", "2")


@pytest.fixture
def chacon():
    return make_family("chacon")


@pytest.fixture
def disjoint():
    return make_family("disjoint")


@pytest.fixture
def pascal():
    return make_family("pascal", "1/3", depth=6)


@pytest.fixture
def symmetric():
    return make_family("symmetric", "2", "2")
