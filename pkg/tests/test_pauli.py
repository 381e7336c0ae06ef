"""Pauli string/sum algebra against dense Kronecker oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdsq.pauli import (
    PauliString,
    PauliSum,
    allclose,
    commutes,
    multiply_strings,
    multiply_sums,
    parse_sum,
    parse_term,
    qubit_wise_commutes,
)

from oracles import dense_string, pauli_sum_to_dense

LETTERS = "IXYZ"


def random_sum(rng, n_qubits, n_terms, real=True):
    labels = {}
    for _ in range(n_terms):
        label = "".join(rng.choice(list(LETTERS), size=n_qubits))
        c = rng.standard_normal()
        if not real:
            c = c + 1j * rng.standard_normal()
        labels[label] = labels.get(label, 0.0) + c
    return PauliSum.from_labels(n_qubits, labels)


# -- strings ----------------------------------------------------------------


def test_label_round_trip():
    s = PauliString.from_label("IXYZ")
    assert s.label == "IXYZ"
    assert s.letter(0) == "I" and s.letter(3) == "Z"
    assert s.weight == 3
    assert not s.is_identity
    assert PauliString.from_label("II").is_identity


def test_label_ignores_spaces():
    assert PauliString.from_label("II XZ").label == "IIXZ"


def test_bad_letter_rejected():
    with pytest.raises(ValueError, match="invalid Pauli letter"):
        PauliString.from_label("IXQ")


def test_single_qubit_products():
    X = PauliString.from_label("X")
    Z = PauliString.from_label("Z")
    s, phase = multiply_strings(X, Z)
    assert s.label == "Y" and phase == -1j
    s, phase = multiply_strings(X, X)
    assert s.label == "I" and phase == 1


def test_two_qubit_product_phases_multiply():
    a = PauliString.from_label("XZ")
    b = PauliString.from_label("ZX")
    s, phase = multiply_strings(a, b)
    assert s.label == "YY"
    # per-qubit phases: (X.Z -> -i) * (Z.X -> +i) = 1
    assert phase == 1


def test_mismatched_qubit_counts():
    with pytest.raises(ValueError, match="qubit counts differ"):
        multiply_strings(PauliString.from_label("X"), PauliString.from_label("XX"))
    with pytest.raises(ValueError, match="qubit counts differ"):
        commutes(PauliString.from_label("X"), PauliString.from_label("XX"))


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_string_product_matches_dense_oracle(data):
    n = data.draw(st.integers(1, 4))
    la = data.draw(st.text(alphabet=LETTERS, min_size=n, max_size=n))
    lb = data.draw(st.text(alphabet=LETTERS, min_size=n, max_size=n))
    a, b = PauliString.from_label(la), PauliString.from_label(lb)
    s, phase = multiply_strings(a, b)
    expected = dense_string(la) @ dense_string(lb)
    assert np.allclose(phase * dense_string(s.label), expected, atol=1e-12)


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_string_product_associative(data):
    n = data.draw(st.integers(1, 4))
    labels = [
        data.draw(st.text(alphabet=LETTERS, min_size=n, max_size=n)) for _ in range(3)
    ]
    a, b, c = (PauliString.from_label(s) for s in labels)
    ab, p_ab = multiply_strings(a, b)
    left, p_left = multiply_strings(ab, c)
    bc, p_bc = multiply_strings(b, c)
    right, p_right = multiply_strings(a, bc)
    assert left == right
    assert p_ab * p_left == pytest.approx(p_bc * p_right)


def test_commutation_textbook_pairs():
    XX, ZZ = PauliString.from_label("XX"), PauliString.from_label("ZZ")
    assert commutes(XX, ZZ)
    assert not qubit_wise_commutes(XX, ZZ)
    XI, XZ = PauliString.from_label("XI"), PauliString.from_label("XZ")
    assert qubit_wise_commutes(XI, XZ)


def test_commutation_exhaustive_two_qubits():
    labels = [a + b for a in LETTERS for b in LETTERS]
    for la in labels:
        for lb in labels:
            a, b = PauliString.from_label(la), PauliString.from_label(lb)
            ma, mb = dense_string(la), dense_string(lb)
            really_commutes = np.allclose(ma @ mb, mb @ ma, atol=1e-12)
            assert commutes(a, b) == really_commutes
            qwc = all(x == y or x == "I" or y == "I" for x, y in zip(la, lb))
            assert qubit_wise_commutes(a, b) == qwc
            if qubit_wise_commutes(a, b):
                assert commutes(a, b)


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_qwc_implies_commutes(data):
    n = data.draw(st.integers(1, 6))
    la = data.draw(st.text(alphabet=LETTERS, min_size=n, max_size=n))
    lb = data.draw(st.text(alphabet=LETTERS, min_size=n, max_size=n))
    a, b = PauliString.from_label(la), PauliString.from_label(lb)
    if qubit_wise_commutes(a, b):
        assert commutes(a, b)


# -- sums ---------------------------------------------------------------------


def test_anticommuting_cross_terms_cancel():
    h = PauliSum.from_labels(1, {"X": 1.0, "Z": 1.0})
    sq = multiply_sums(h, h)
    assert sq.n_terms == 1
    assert sq.identity_coefficient == pytest.approx(2.0)


def test_identity_is_multiplicative_unit():
    rng = np.random.default_rng(7)
    h = random_sum(rng, 3, 8)
    eye = PauliSum.identity(3)
    assert allclose(multiply_sums(h, eye), h)
    assert allclose(multiply_sums(eye, h), h)


def test_sum_product_matches_dense_oracle():
    rng = np.random.default_rng(11)
    for trial in range(20):
        a = random_sum(rng, 3, 10, real=trial % 2 == 0)
        b = random_sum(rng, 3, 10, real=True)
        prod = multiply_sums(a, b)
        expected = pauli_sum_to_dense(a) @ pauli_sum_to_dense(b)
        assert np.allclose(pauli_sum_to_dense(prod), expected, atol=1e-12)


def test_hermitian_product_of_hermitian_square():
    rng = np.random.default_rng(3)
    h = random_sum(rng, 3, 12)
    assert h.is_hermitian()
    assert multiply_sums(h, h).is_hermitian(tol=1e-12)


def test_sum_mismatched_qubits():
    with pytest.raises(ValueError, match="qubit counts differ"):
        multiply_sums(PauliSum.identity(2), PauliSum.identity(3))


def test_drop_tolerance_prunes():
    h = PauliSum.from_labels(1, {"X": 1e-15, "Z": 1.0})
    assert h.n_terms == 1
    h2 = PauliSum(1, {(1, 0): 1e-15, (0, 1): 1.0}, drop_tol=0.0)
    assert h2.n_terms == 2


def test_to_matrix_agrees_with_kron_oracle():
    rng = np.random.default_rng(23)
    h = random_sum(rng, 4, 14, real=False)
    assert np.allclose(h.to_matrix(), pauli_sum_to_dense(h), atol=1e-12)


def test_canonical_order_is_stable():
    h = PauliSum.from_labels(2, {"XI": 1.0, "IZ": 2.0, "YY": 3.0})
    labels = [s.label for s, _ in h.terms()]
    assert labels == sorted(
        labels,
        key=lambda lab: (PauliString.from_label(lab).z, PauliString.from_label(lab).x),
    )


def test_scalar_and_additive_arithmetic():
    a = PauliSum.from_labels(2, {"XI": 1.0})
    b = PauliSum.from_labels(2, {"XI": 2.0, "ZZ": -1.0})
    s = a + b
    assert s.coefficient(PauliString.from_label("XI")) == pytest.approx(3.0)
    d = b - a
    assert d.coefficient(PauliString.from_label("XI")) == pytest.approx(1.0)
    scaled = 2.0 * a
    assert scaled.coefficient(PauliString.from_label("XI")) == pytest.approx(2.0)


# -- serialization ------------------------------------------------------------


def test_term_parse_round_trip():
    s, c = parse_term("-0.5 * IIXZ")
    assert s.label == "IIXZ" and c == pytest.approx(-0.5)
    s, c = parse_term("(1+2j) * XY")
    assert c == pytest.approx(1 + 2j)


def test_term_parse_accepts_spaced_letters():
    s, _ = parse_term("1.0 * II XZ")
    assert s.label == "IIXZ"


def test_parse_errors():
    with pytest.raises(ValueError, match="coeff"):
        parse_term("IIXZ")
    with pytest.raises(ValueError, match="invalid coefficient"):
        parse_term("abc * II")


def test_sum_text_round_trip():
    rng = np.random.default_rng(5)
    h = random_sum(rng, 3, 9, real=False)
    again = parse_sum(h.to_text())
    assert allclose(h, again, tol=1e-12)
