"""Built-in example problems, stored as problem-file text.

Each builtin parses through the regular grammar; where a closed-form solution
is known the entry also carries an exact sampler for error measurement.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import UnknownProblem
from .fields import SpectralField, axis_coordinates
from .parsing import parse_problem
from .problem import ProblemSpec

TWO_PI = "6.283185307179586"

_HEAT1D = f"""\
# 1D heat flow: a single sine mode decays as exp(-t)
kind: evolution
dim: 1
components: 1
domain: {TWO_PI}
grid: 64
constraint: none
equation[0]: -1*D(2)u[0] = f[0]
forcing[0]: 0
initial[0]: sin(1*x1)
t_final: 1.0
dt: 0.1
"""

_CUBIC1D = f"""\
# Manufactured stationary problem: -u'' + u + 0.1 u^3 with solution sin(x1)
kind: stationary
dim: 1
components: 1
domain: {TWO_PI}
grid: 32
constraint: none
equation[0]: -1*D(2)u[0] + 1*u[0] + 0.1*u[0]*u[0]*u[0] = f[0]
forcing[0]: 2*sin(1*x1) + 0.1*sin(1*x1)*sin(1*x1)*sin(1*x1)
"""

_BURGERS1D = f"""\
# Stationary viscous Burgers with a mass term keeping the zero mode regular
kind: stationary
dim: 1
components: 1
domain: {TWO_PI}
grid: 16
constraint: none
equation[0]: u[0]*D(1)u[0] - 0.1*D(2)u[0] + 1*u[0] = f[0]
forcing[0]: 0.5*sin(1*x1)
"""

_BURGERS1D_EVOLUTION = f"""\
# Decaying viscous Burgers from a single sine mode
kind: evolution
dim: 1
components: 1
domain: {TWO_PI}
grid: 32
constraint: none
equation[0]: u[0]*D(1)u[0] - 0.1*D(2)u[0] = f[0]
forcing[0]: 0
initial[0]: sin(1*x1)
t_final: 1.0
dt: 0.01
"""

_TAYLOR_GREEN_2D = f"""\
# 2D Taylor-Green vortex: advection is a pure gradient, so the
# divergence-free projection reduces the flow to viscous decay exp(-2 nu t)
kind: evolution
dim: 2
components: 2
domain: {TWO_PI} {TWO_PI}
grid: 32 32
constraint: leray
equation[0]: u[0]*D(1,0)u[0] + u[1]*D(0,1)u[0] - 0.1*D(2,0)u[0] - 0.1*D(0,2)u[0] = f[0]
equation[1]: u[0]*D(1,0)u[1] + u[1]*D(0,1)u[1] - 0.1*D(2,0)u[1] - 0.1*D(0,2)u[1] = f[1]
forcing[0]: 0
forcing[1]: 0
initial[0]: cos(1*x1)*sin(1*x2)
initial[1]: -sin(1*x1)*cos(1*x2)
t_final: 1.0
dt: 0.01
"""

TAYLOR_GREEN_VISCOSITY = 0.1


def _heat_exact(spec: ProblemSpec, t: float) -> SpectralField:
    x = axis_coordinates(spec.grid, spec.domain)[0]
    return SpectralField.from_physical(
        (np.sin(x) * np.exp(-t))[np.newaxis], spec.domain
    )


def _cubic_exact(spec: ProblemSpec, t: float) -> SpectralField:
    x = axis_coordinates(spec.grid, spec.domain)[0]
    return SpectralField.from_physical(np.sin(x)[np.newaxis], spec.domain)


def _taylor_green_exact(spec: ProblemSpec, t: float) -> SpectralField:
    x, y = axis_coordinates(spec.grid, spec.domain)
    decay = np.exp(-2.0 * TAYLOR_GREEN_VISCOSITY * t)
    u = np.cos(x) * np.sin(y) * decay
    v = -np.sin(x) * np.cos(y) * decay
    return SpectralField.from_physical(
        np.stack([np.broadcast_to(u, spec.grid), np.broadcast_to(v, spec.grid)]),
        spec.domain,
    )


@dataclass(frozen=True)
class BuiltinProblem:
    name: str
    text: str
    exact: Callable[[ProblemSpec, float], SpectralField] | None = None

    @cached_property
    def spec(self) -> ProblemSpec:
        return parse_problem(self.text)

    def exact_field(self, t: float = 0.0, spec: ProblemSpec | None = None) -> SpectralField:
        if self.exact is None:
            raise ValueError(f"builtin '{self.name}' has no exact solution")
        return self.exact(spec if spec is not None else self.spec, t)


_REGISTRY = {
    "heat1d": BuiltinProblem("heat1d", _HEAT1D, _heat_exact),
    "cubic1d": BuiltinProblem("cubic1d", _CUBIC1D, _cubic_exact),
    "burgers1d": BuiltinProblem("burgers1d", _BURGERS1D),
    "burgers1d-evolution": BuiltinProblem("burgers1d-evolution", _BURGERS1D_EVOLUTION),
    "taylor-green-2d": BuiltinProblem("taylor-green-2d", _TAYLOR_GREEN_2D, _taylor_green_exact),
}

BUILTIN_NAMES = tuple(sorted(_REGISTRY))


def builtin_problem(name: str) -> BuiltinProblem:
    if name not in _REGISTRY:
        raise UnknownProblem(name, BUILTIN_NAMES)
    return _REGISTRY[name]
