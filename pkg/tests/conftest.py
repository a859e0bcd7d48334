import pathlib

import pytest

from acdterm import parse_program

PROGRAMS = pathlib.Path(__file__).parent / "programs"


def load_program(name):
    return parse_program((PROGRAMS / name).read_text(encoding="utf-8"))


@pytest.fixture
def leq_program():
    return load_program("leq.acd")


@pytest.fixture
def unify_program():
    return load_program("unify.acd")


@pytest.fixture
def one_subst_program():
    return load_program("one_subst.acd")


@pytest.fixture
def golfers_program():
    return load_program("golfers.acd")
