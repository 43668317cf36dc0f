import numpy as np
import pytest

from pdefix import (
    MultiIndex,
    UnsupportedTerm,
    evaluate_expr,
    split_terms,
)
from pdefix.expressions import EvalContext, ForcingRef, evaluate
from pdefix.parsing import parse_expression
from pdefix.splitting import LinearTerm

from conftest import TWO_PI, random_smooth_field


def split_one(text, dim=1, n_components=1):
    tree = parse_expression(text, dim, n_components)
    return split_terms((tree,) * n_components, dim, n_components)


def test_cubic_split():
    split = split_one("-1*D(2)u[0] + u[0]*u[0]*u[0]")
    assert split.linear.equation_terms(0) == (
        LinearTerm(0, 0, -1.0, MultiIndex((2,))),
    )
    assert split.nonlinear[0] == parse_expression("u[0]*u[0]*u[0]", 1, 1)
    assert split.forcing[0] == ForcingRef(0)


def test_burgers_split():
    split = split_one("u[0]*D(1)u[0] - 0.1*D(2)u[0]")
    assert split.linear.equation_terms(0) == (
        LinearTerm(0, 0, -0.1, MultiIndex((2,))),
    )
    assert split.nonlinear[0] == parse_expression("u[0]*D(1)u[0]", 1, 1)


def test_purely_linear_two_component():
    trees = (
        parse_expression("D(1,0)u[1] + D(0,1)u[0]", 2, 2),
        parse_expression("D(1,0)u[0]", 2, 2),
    )
    split = split_terms(trees, 2, 2)
    assert len(split.linear.equation_terms(0)) == 2
    assert split.nonlinear == (None, None)
    assert split.forcing == (ForcingRef(0), ForcingRef(1))


def test_mass_term_is_linear_not_forcing():
    split = split_one("3*u[0]")
    assert split.linear.equation_terms(0) == (
        LinearTerm(0, 0, 3.0, MultiIndex((0,))),
    )
    assert split.nonlinear[0] is None


def test_coefficients_accumulate_and_zero_terms_drop():
    split = split_one("2*u[0] + 3*u[0] - 5*u[0]")
    assert split.linear.equation_terms(0) == ()
    assert split.nonlinear[0] is None


def test_field_free_terms_migrate_to_forcing():
    split = split_one("1*u[0] + sin(2*x1) - 0.5")
    forcing = split.forcing[0]
    # forcing side evaluates to f[0] - sin(2 x1) + 0.5
    assert forcing != ForcingRef(0)
    assert split.linear.equation_terms(0) == (LinearTerm(0, 0, 1.0, MultiIndex((0,))),)


def test_variable_linear_coefficient_rejected():
    with pytest.raises(UnsupportedTerm):
        split_one("sin(1*x1)*D(1)u[0]")
    with pytest.raises(UnsupportedTerm):
        split_one("cos(2*x1)*u[0]")


def test_coordinate_factor_in_nonlinear_term_allowed():
    split = split_one("sin(1*x1)*u[0]*u[0]")
    assert split.nonlinear[0] is not None


@pytest.mark.parametrize(
    "text",
    [
        "-1*D(2)u[0] + u[0]*u[0]*u[0]",
        "u[0]*D(1)u[0] - 0.1*D(2)u[0] + 1*u[0]",
        "2*u[0] + sin(2*x1) - 0.5 + u[0]*u[0]",
        "1*u[0] - 0.25*D(2)u[0] + 2*(u[0] + 1)*u[0]",
    ],
)
def test_split_reconstruction(rng, text):
    # linear(u) + nonlinear(u) - forcing must reproduce LHS - f pointwise
    from pdefix.spectral import apply_linear, assemble_symbol

    tree = parse_expression(text, 1, 1)
    split = split_terms((tree,), 1, 1)
    sym = assemble_symbol(split.linear, 1, (TWO_PI,), (32,))

    for trial in range(25):
        u = random_smooth_field(rng, 1, (32,))
        forcing_values = random_smooth_field(rng, 1, (32,))
        ctx = EvalContext(u, forcing_values)

        original = evaluate(tree, ctx) - forcing_values.physical[0]

        recombined = apply_linear(sym, u).physical[0].copy()
        if split.nonlinear[0] is not None:
            recombined += evaluate(split.nonlinear[0], ctx)
        recombined -= evaluate(split.forcing[0], ctx)

        scale = 1.0 + np.abs(original).max()
        assert np.abs(recombined - original).max() <= 1e-12 * scale


def test_classification_is_total(rng):
    # every additive term lands in exactly one bucket: re-counting terms
    text = "2*u[0] + u[0]*u[0] + sin(2*x1) - 0.5 - 1*D(2)u[0]"
    tree = parse_expression(text, 1, 1)
    split = split_terms((tree,), 1, 1)
    from pdefix.expressions import additive_terms

    n_linear = len(split.linear.equation_terms(0))
    n_nonlinear = len(additive_terms(split.nonlinear[0]))
    n_migrated = len(additive_terms(split.forcing[0])) - 1  # minus the f[0] ref
    assert n_linear + n_nonlinear + n_migrated == len(additive_terms(tree))
