"""
Unit tests for `cdmg.scm`.
"""

import numpy as np
from pytest import approx, mark, raises

from cdmg.graph import InvalidAdmg, MixedGraph
from cdmg.scm import (
    StateSpaceTooLarge,
    exact_joint,
    fit_scm,
    interventional_gap,
    interventional_truth,
    random_scm,
)

CHAIN = MixedGraph("XWY", [("X", "W"), ("W", "Y")])
BOW = MixedGraph("XY", [("X", "Y")], [("X", "Y")])


def test_random_tables_positive() -> None:
    scm = random_scm(BOW, 3)
    for table in scm.parameters():
        assert (table > 0).all()
        assert np.allclose(table.sum(axis=-1), 1.0)
    assert [latent.name for latent in scm.latents] == ["X<->Y"]
    assert scm.mechanisms["Y"].parents == ("X",)
    assert scm.mechanisms["Y"].latents == ("X<->Y",)
    assert scm.state_space() == 8


def test_random_scm_seeded() -> None:
    """Equal seeds give equal models."""
    first = random_scm(CHAIN, 11)
    second = random_scm(CHAIN, 11)
    for a, b in zip(first.parameters(), second.parameters()):
        assert np.array_equal(a, b)


def test_random_scm_cardinalities() -> None:
    scm = random_scm(CHAIN, 0, max_cardinality=4)
    assert all(2 <= scm.cardinalities[v] <= 4 for v in CHAIN.vertices)
    joint = exact_joint(scm)
    assert joint.cardinalities == tuple(scm.cardinalities[v] for v in joint.variables)


def test_random_scm_rejects_cycles() -> None:
    with raises(InvalidAdmg):
        random_scm(MixedGraph("XY", [("X", "Y"), ("Y", "X")]), 0)


def test_exact_joint_normalized() -> None:
    joint = exact_joint(random_scm(BOW, 5))
    assert joint.variables == ("X", "Y")
    assert joint.probabilities.sum() == approx(1.0)
    assert joint.marginal(["Y", "X"]).shape == (2, 2)
    assert joint.marginal(["Y", "X"])[1, 0] == approx(joint.probabilities[0, 1])
    assert joint.probability({"X": 0}) == approx(joint.probabilities[0].sum())


def test_state_space_limit() -> None:
    scm = random_scm(BOW, 0)
    with raises(StateSpaceTooLarge):
        exact_joint(scm, state_limit=7)
    with raises(StateSpaceTooLarge):
        interventional_truth(scm, {"X": 0}, ["Y"], state_limit=7)


@mark.parametrize("seed", range(3))
def test_unconfounded_effect_is_conditional(seed: int) -> None:
    """Without confounding, intervening on a root is conditioning on it."""
    scm = random_scm(CHAIN, seed)
    joint = exact_joint(scm)
    pair = joint.marginal(["X", "Y"])
    for x in range(2):
        truth = interventional_truth(scm, {"X": x}, ["Y"])
        assert truth == approx(pair[x] / pair[x].sum())


def test_confounded_effect_differs() -> None:
    """Confounding makes the effect differ from the conditional for some
    model; the first seed already shows it."""
    scm = random_scm(BOW, 1)
    joint = exact_joint(scm)
    truth = interventional_truth(scm, {"X": 0}, ["Y"])
    conditional = joint.probabilities[0] / joint.probabilities[0].sum()
    assert float(np.abs(truth - conditional).max()) > 1e-6


def test_unconfounded_option() -> None:
    """Tables that ignore the latents make the bow behave like a plain
    edge."""
    scm = random_scm(BOW, 2, confounded=False)
    table = scm.mechanisms["Y"].table
    assert np.allclose(table[:, 0, :], table[:, 1, :])
    joint = exact_joint(scm)
    truth = interventional_truth(scm, {"X": 1}, ["Y"])
    assert truth == approx(joint.probabilities[1] / joint.probabilities[1].sum())


def test_fit_reproduces_factorizing_joint() -> None:
    """Refitting on the reversed chain keeps the joint, as both are
    Markov equivalent."""
    scm = random_scm(CHAIN, 4, confounded=False)
    joint = exact_joint(scm)
    reversed_chain = MixedGraph("XWY", [("Y", "W"), ("W", "X")])
    fitted = fit_scm(reversed_chain, joint)
    assert exact_joint(fitted).probabilities == approx(joint.probabilities)
    # The effect of X on Y does not survive the reversal.
    assert interventional_gap(scm, fitted, ["X"], ["Y"]) > 0.0


def test_interventional_gap_zero_for_same_model() -> None:
    scm = random_scm(BOW, 6)
    assert interventional_gap(scm, scm, ["X"], ["Y"]) == 0.0


def test_with_parameters() -> None:
    scm = random_scm(BOW, 7)
    tables = scm.parameters()
    uniform = [np.full_like(table, 1.0 / table.shape[-1]) for table in tables]
    changed = scm.with_parameters(uniform)
    assert changed.admg == scm.admg
    assert changed.mechanisms["Y"].latents == scm.mechanisms["Y"].latents
    assert exact_joint(changed).probabilities == approx(np.full((2, 2), 0.25))
    # The original model is left alone.
    assert np.array_equal(scm.parameters()[0], tables[0])
