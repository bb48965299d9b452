"""Explicit achievability codes and their lifts to unions and gadgets."""

import pytest

from ncchar import (
    CharacteristicError,
    gadget_transform_traced,
    gen_n1,
    gen_n2,
    instantiate,
    lift_gadget,
    lift_union,
    solve_n1,
    solve_n2,
    union_copies,
    verify,
)

PRIMES = (2, 3, 5, 7)


def divides(p, q):
    return q % p == 0


# ---------------------------------------------------------------------------
# base codes
# ---------------------------------------------------------------------------

def test_solve_n1_entries_are_unit_range():
    sym = solve_n1(3, 2)
    for rules in (sym.edge_rules, sym.decode_rules):
        for inputs in rules.values():
            for inp in inputs:
                for coeff, inv in inp.matrix.entries:
                    assert coeff in (-1, 0, 1)
                    assert inv is False


def test_solve_n2_uses_inv_q():
    sym = solve_n2(3, 1)
    flags = set()
    coeffs = set()
    for inputs in sym.edge_rules.values():
        for inp in inputs:
            for coeff, inv in inp.matrix.entries:
                flags.add(inv)
                if inv:
                    coeffs.add(coeff)
    assert True in flags
    # the b-bottleneck rule scales by 1/q and -(q-1)/q
    assert 1 in coeffs
    assert -(3 - 1) in coeffs


def test_solve_shapes_match_parameters():
    for q, n in ((2, 1), (3, 2), (6, 3)):
        for builder in (solve_n1, solve_n2):
            sym = builder(q, n)
            assert (sym.k, sym.n, sym.q) == (1, n, q)


def test_solve_parameter_validation():
    for builder in (solve_n1, solve_n2):
        with pytest.raises(ValueError):
            builder(1, 1)
        with pytest.raises(ValueError):
            builder(2, 0)


def test_n1_verifies_when_characteristic_divides_q():
    for q in (2, 3, 6):
        for n in (1, 2, 3):
            for p in PRIMES:
                if not divides(p, q):
                    continue
                net = gen_n1(q, n)
                report = verify(net, instantiate(solve_n1(q, n), p))
                assert report.passed
                assert len(report.terminals) == 2 * q * n


def test_n1_composite_q_verifies_at_each_prime_factor():
    report = verify(gen_n1(6, 1), instantiate(solve_n1(6, 1), 3))
    assert report.passed
    report = verify(gen_n1(6, 1), instantiate(solve_n1(6, 1), 2))
    assert report.passed


def test_n2_verifies_when_characteristic_coprime_to_q():
    for q in (2, 3, 6):
        for n in (1, 2, 3):
            for p in PRIMES:
                if divides(p, q):
                    continue
                net = gen_n2(q, n)
                report = verify(net, instantiate(solve_n2(q, n), p))
                assert report.passed
                assert len(report.terminals) == (q + 2) * n


def test_n1_cross_characteristic_fails_exactly_ta():
    for q, n, p in ((2, 1, 3), (2, 2, 3), (3, 1, 2), (3, 2, 5), (6, 1, 5)):
        report = verify(gen_n1(q, n), instantiate(solve_n1(q, n), p))
        assert not report.passed
        failing = {t.terminal for t in report.failing()}
        assert failing == {f"Ta:a{j}" for j in range(1, n + 1)}
        for t in report.failing():
            # the residue is the q-scaled c-symbol on the same coordinate
            assert t.interferers == (t.demanded.replace("a", "c"),)


def test_n2_instantiation_blocked_at_dividing_characteristic():
    for q, p in ((2, 2), (3, 3), (6, 2), (6, 3)):
        with pytest.raises(CharacteristicError):
            instantiate(solve_n2(q, 1), p)


# ---------------------------------------------------------------------------
# union lifting
# ---------------------------------------------------------------------------

def test_lift_union_identity_at_k_one():
    sym = solve_n1(2, 2)
    assert lift_union(sym, 1) == sym


def test_lift_union_verifies_on_union_network():
    # each copy's edges still carry n symbols; the merged sources emit k
    sym = solve_n1(2, 2)
    for k in (2, 3):
        lifted = lift_union(sym, k)
        assert (lifted.k, lifted.n) == (k, 2)
        net = union_copies(gen_n1(2, 2), k)
        assert verify(net, instantiate(lifted, 2)).passed


def test_lift_union_n2_verifies():
    lifted = lift_union(solve_n2(2, 1), 3)
    net = union_copies(gen_n2(2, 1), 3)
    assert verify(net, instantiate(lifted, 3)).passed


def test_lift_union_preserves_failures_terminal_by_terminal():
    base = gen_n1(2, 1)
    base_fail = {
        t.terminal for t in verify(base, instantiate(solve_n1(2, 1), 3)).failing()
    }
    lifted = lift_union(solve_n1(2, 1), 2)
    net = union_copies(base, 2)
    report = verify(net, instantiate(lifted, 3))
    assert {t.terminal for t in report.failing()} == base_fail


def test_lift_union_rejects_bad_k():
    with pytest.raises(ValueError):
        lift_union(solve_n1(2, 1), 0)


# ---------------------------------------------------------------------------
# gadget lifting
# ---------------------------------------------------------------------------

def test_lift_gadget_identity_when_nothing_to_do():
    # a base with no duplicated demand is its own gadget transform
    base = gen_n1(2, 1)
    gadgeted, _ = gadget_transform_traced(base, 1)
    sym = lift_gadget(solve_n1(2, 1), base, gadgeted)
    assert lift_gadget(sym, gadgeted, gadgeted) == sym


def test_lift_gadget_n1_verifies():
    base = gen_n1(2, 1)
    gadgeted, _ = gadget_transform_traced(base, 1)
    lifted = lift_gadget(solve_n1(2, 1), base, gadgeted)
    assert verify(gadgeted, instantiate(lifted, 2)).passed


def test_lift_gadget_n2_verifies():
    base = gen_n2(2, 1)
    gadgeted, _ = gadget_transform_traced(base, 1)
    lifted = lift_gadget(solve_n2(2, 1), base, gadgeted)
    assert verify(gadgeted, instantiate(lifted, 3)).passed


def test_lift_gadget_multi_application():
    base = gen_n1(3, 1)
    gadgeted, apps = gadget_transform_traced(base, 1)
    assert len(apps) == 2
    lifted = lift_gadget(solve_n1(3, 1), base, gadgeted)
    assert verify(gadgeted, instantiate(lifted, 3)).passed


def test_lift_gadget_wider_blocks():
    base = gen_n1(2, 2)
    gadgeted, _ = gadget_transform_traced(base, 2)
    lifted = lift_gadget(solve_n1(2, 2), base, gadgeted)
    assert verify(gadgeted, instantiate(lifted, 2)).passed
