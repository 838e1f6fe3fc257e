"""Equation types for first-order polynomial ODEs y' = sum_k a_k(x) y^k.

An AbelEquation of degree n holds the n+1 coefficient functions a_0..a_n
on a half-line [x0, inf).  Dividing through by the leading coefficient
gives the monic normal form

    F(x, y) = y^n + sum_{k<n} lambda_k(x) y^k,   lambda_k = a_k / a_n,

with the convention lambda_n == 1.  The normal form is what root finding
and stability work on; the integrator consumes the raw right-hand side.

All types are immutable after construction and hold no hidden state, so
they can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expr import Expr, parse

__all__ = [
    "CoefficientFn",
    "AbelEquation",
    "NormalForm",
    "LeadingCoefficientError",
    "build_equation",
    "normalize",
    "eval_rhs",
    "eval_drhs",
    "eval_F",
    "eval_dF",
]


class LeadingCoefficientError(ValueError):
    """Leading coefficient vanished at a probe point; no normal form exists there."""


@dataclass(frozen=True)
class CoefficientFn:
    """One coefficient a_k: a parsed expression with its domain start."""

    expr: Expr
    label: str
    domain_start: float

    def __call__(self, x: float) -> float:
        return self.expr.eval(x)


@dataclass(frozen=True)
class AbelEquation:
    """y' = sum_{k=0}^{degree} coeffs[k](x) y^k on [x0, inf)."""

    degree: int
    coeffs: tuple[CoefficientFn, ...]  # ascending order a_0 .. a_n
    x0: float
    description: str = ""

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if len(self.coeffs) != self.degree + 1:
            raise ValueError(
                f"degree {self.degree} needs {self.degree + 1} coefficients, "
                f"got {len(self.coeffs)}"
            )

    @property
    def leading(self) -> CoefficientFn:
        return self.coeffs[-1]


def build_equation(
    coeff_sources: list[str] | tuple[str, ...],
    x0: float,
    description: str = "",
) -> AbelEquation:
    """Build an equation from coefficient strings in ascending order a_0..a_n."""
    coeffs = tuple(
        CoefficientFn(parse(src), f"a{k}", float(x0))
        for k, src in enumerate(coeff_sources)
    )
    return AbelEquation(len(coeffs) - 1, coeffs, float(x0), description)


@dataclass(frozen=True)
class NormalForm:
    """Monic view of an equation: lambda_k = a_k/a_n for k < degree."""

    equation: AbelEquation = field(repr=False)
    degree: int

    def a_n(self, x: float) -> float:
        return self.equation.leading(x)

    def lam(self, k: int, x: float) -> float:
        """lambda_k(x); k == degree returns the monic leading 1."""
        if k == self.degree:
            return 1.0
        return self.equation.coeffs[k](x) / self.equation.leading(x)

    def lambdas(self, x: float) -> list[float]:
        """[lambda_0(x), ..., lambda_{n-1}(x)]."""
        an = self.equation.leading(x)
        return [c(x) / an for c in self.equation.coeffs[:-1]]


# Probe offsets past x0 used to reject a leading coefficient that vanishes
# somewhere obvious; a zero elsewhere surfaces later as a division error.
_PROBE_OFFSETS = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)


def normalize(equation: AbelEquation) -> NormalForm:
    """Return the monic normal form, probing a_n != 0 near x0."""
    for offset in _PROBE_OFFSETS:
        x = equation.x0 + offset
        if equation.leading(x) == 0.0:
            raise LeadingCoefficientError(
                f"leading coefficient {equation.leading.label} vanishes at x={x!r}"
            )
    return NormalForm(equation, equation.degree)


def _horner(coefficients: list[float], y: float) -> float:
    acc = 0.0
    for c in reversed(coefficients):
        acc = acc * y + c
    return acc


def eval_rhs(equation: AbelEquation, x: float, y: float) -> float:
    """Right-hand side sum_k a_k(x) y^k via Horner."""
    return _horner([c(x) for c in equation.coeffs], y)


def eval_drhs(equation: AbelEquation, x: float, y: float) -> float:
    """d/dy of the right-hand side: sum_{k>=1} k a_k(x) y^{k-1}."""
    return _horner(
        [k * c(x) for k, c in enumerate(equation.coeffs)][1:], y
    )


def eval_F(nf: NormalForm, x: float, y: float) -> float:
    """Monic polynomial F(x, y) = y^n + sum_{k<n} lambda_k(x) y^k."""
    return _horner(nf.lambdas(x) + [1.0], y)


def eval_dF(nf: NormalForm, x: float, y: float) -> float:
    """dF/dy = n y^{n-1} + sum_{1<=k<n} k lambda_k(x) y^{k-1} (lambda_n == 1)."""
    lams = nf.lambdas(x) + [1.0]
    return _horner([k * lam for k, lam in enumerate(lams)][1:], y)
