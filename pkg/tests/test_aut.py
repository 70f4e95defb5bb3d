import pytest
from hypothesis import given, strategies as st

from snowlab.aut import (IDENTITY, PHI, FreeAut, NotInvertible, apply, cached_inverse, cached_power, codes_of,
                         compose, fapply, finv, format_free, freduce, inverse, power, stretch_check, transition, word_of)
from snowlab.exactnum import IntMatrix2, QuadNum
from snowlab.words import Word, format_word, parse_word
from strategies import free_codes, palindromes, words
from test_words import naive_reduce


def subst_oracle(img: dict[str, str], s: str) -> str:
    # string substitution with inverse images built by reversing and swapping case
    out = []
    for ch in s:
        if ch.islower():
            out.append(img[ch])
        else:
            out.append(img[ch.lower()][::-1].swapcase())
    return naive_reduce("".join(out))


@given(words("xy"))
def test_phi_matches_string_oracle(w):
    assert format_free(apply(PHI, w)) == subst_oracle({"x": "xyx", "y": "x"}, format_free(w))


@given(free_codes)
def test_fapply_homomorphism(c):
    a, b = c[: len(c) // 2], c[len(c) // 2:]
    lhs = fapply(PHI.codes, a + b)
    assert lhs == freduce(fapply(PHI.codes, a) + fapply(PHI.codes, b))
    assert fapply(PHI.codes, finv(c)) == finv(fapply(PHI.codes, c))


@given(free_codes, st.integers(-3, 3))
def test_powers_and_inverse(c, k):
    p = cached_power(PHI, k)
    back = cached_power(PHI, -k)
    assert fapply(back.codes, fapply(p.codes, c)) == freduce(c)


def test_inverse_of_phi():
    inv = inverse(PHI)
    assert format_free(inv.image_x) == "y" and format_free(inv.image_y) == "YxY"
    assert compose(PHI, inv).codes == IDENTITY.codes
    assert cached_inverse(PHI).codes == inv.codes


def test_non_invertible_rejected():
    with pytest.raises(NotInvertible):
        inverse(FreeAut.parse("xx", "y"), cap=2000)


def test_power_by_composition():
    p3 = power(PHI, 3)
    assert p3.codes == compose(PHI, compose(PHI, PHI)).codes
    assert len(p3.codes[0]) == 17  # counts grow like Pell numbers: 3, 7, 17


def test_transition_data():
    ed = transition(PHI)
    assert ed.matrix == IntMatrix2(2, 1, 1, 0)
    assert ed.exact and ed.lam == 1 + QuadNum(0, 1)


@given(palindromes(positive=True))
def test_weighted_stretch_is_exact_for_positive_words(w):
    lhs, rhs, ok = stretch_check(PHI, w)
    assert ok and lhs == rhs


@given(words("xy"))
def test_stretch_bound_for_all_words(w):
    assert stretch_check(PHI, w)[2]


def test_phi_palindromic_monotone():
    assert PHI.palindromic and PHI.monotone
    assert not FreeAut.parse("xy", "x").palindromic


def test_word_of_codes():
    assert word_of((1, -2, 1), "a", "b", 7) == parse_word("a7B7a7")
    assert codes_of(parse_word("xYx")) == (1, -2, 1)
