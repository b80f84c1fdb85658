import random

import pytest

from lambek.calculi import RESTRICTED, check_derivation
from lambek.core import CalculusId, Join, Meet, Prod, RDiv
from lambek.randgen import connectives_of, random_derivable, random_sequent

C = CalculusId


def test_deterministic():
    a = random_derivable(random.Random(1), C.MALC)
    b = random_derivable(random.Random(1), C.MALC)
    assert str(a) == str(b)


@pytest.mark.parametrize("calc", [C.L, C.MALC, C.ILL, C.L1])
def test_random_sequents_respect_language(calc):
    rng = random.Random(2)
    for _ in range(50):
        s = random_sequent(rng, calc)
        if calc in RESTRICTED:
            assert s.antecedent
        for f in s.formulas():
            assert f.connectives() <= set(connectives_of(calc)) | {type(f) for f in f.subformulas() if not f.children()}


def test_connectives():
    assert Meet not in connectives_of(C.L)
    assert RDiv not in connectives_of(C.ILL)
    assert Prod not in connectives_of(C.MALC, product=False)
    assert Join in connectives_of(C.IAL)


def test_product_free_generation():
    rng = random.Random(3)
    for _ in range(30):
        d = random_derivable(rng, C.IAL, product=False)
        assert check_derivation(d, C.IAL).valid
        assert all(Prod not in f.connectives() for f in d.conclusion.formulas())
