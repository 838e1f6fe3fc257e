"""Grid-verified checks of the structural and asymptotic hypotheses.

The plateau theory needs, on the working range:

    A1  positive leading coefficient: a_n(x) >= m > 0
    A2  finite normalized coefficients lambda_k(x)
    A3  a positive equilibrium branch E(x) > 0
    A4  uniform stability: Lambda(x) <= -alpha < 0
    B1  a finite positive limit L = lim E(x)
    B2  a positive asymptotic decay floor alpha0 = inf alpha
    B3  integrability of Phi(s)^{-1} |E'(s)|

Every check samples a finite grid, so a "pass" is always grid-verified
sampling evidence, never a proof; the report says so explicitly.  Checks
never raise: violations, endpoint degeneracies and undecidable tails
become fail or inconclusive entries with witnesses.

B3 is decided by a composite trapezoid value of the integrand over the
grid: pass when the contribution of the last decade [x_end/10, x_end] is
below 1% of the total (or the total is exactly zero), inconclusive
otherwise, since a tail-dominated integral on every finite grid is the
numerical signature of divergence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import NormalForm
from .equilibrium import (
    POSITIVE_THRESHOLD,
    EquilibriumBranch,
    ZeroEigenvalueError,
    branch_derivative,
    branch_limit,
)
from .rate import PhiAccumulator

__all__ = [
    "ALPHA_FLOOR",
    "HypothesisEntry",
    "HypothesisReport",
    "check_structural",
    "check_asymptotic",
    "verify",
]

#: |Lambda| below this cannot be distinguished from 0 on a grid
ALPHA_FLOOR = 1e-8

#: last-decade share of the B3 integral above which the tail dominates
B3_TAIL_SHARE = 0.01

GRID_VERIFIED = "grid-verified sampling check, not a proof"


@dataclass
class HypothesisEntry:
    id: str
    status: str  # "pass" | "fail" | "inconclusive"
    witness: dict[str, float] = field(default_factory=dict)
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "status": self.status,
            "witness": self.witness,
            "note": self.note,
        }


@dataclass
class HypothesisReport:
    entries: dict[str, HypothesisEntry]
    grid_info: dict[str, float | int | str]
    note: str = GRID_VERIFIED

    def __getitem__(self, key: str) -> HypothesisEntry:
        return self.entries[key]

    @property
    def has_fail(self) -> bool:
        return any(e.status == "fail" for e in self.entries.values())

    @property
    def all_pass(self) -> bool:
        return all(e.status == "pass" for e in self.entries.values())

    def merged(self, other: "HypothesisReport") -> "HypothesisReport":
        entries = dict(self.entries)
        entries.update(other.entries)
        info = dict(self.grid_info)
        info.update(other.grid_info)
        return HypothesisReport(entries, info, self.note)

    def to_json(self) -> str:
        payload = {
            "note": self.note,
            "grid": self.grid_info,
            "checks": [self.entries[k].as_dict() for k in sorted(self.entries)],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def format_table(self) -> str:
        lines = [f"{'check':<6} {'status':<13} witness"]
        for key in sorted(self.entries):
            entry = self.entries[key]
            witness = " ".join(
                f"{name}={value:.9g}" for name, value in sorted(entry.witness.items())
            )
            lines.append(f"{entry.id:<6} {entry.status:<13} {witness}".rstrip())
        lines.append(f"({self.note})")
        return "\n".join(lines)


def _grid_info(xs: np.ndarray, label: str) -> dict:
    return {
        f"{label}_start": float(xs[0]),
        f"{label}_end": float(xs[-1]),
        f"{label}_count": int(xs.size),
    }


def check_structural(
    nf: NormalForm,
    branch: EquilibriumBranch,
    grid_xs=None,
) -> HypothesisReport:
    """A1..A4 on the working grid.

    A1, A2 and A4 sample the branch grid, where the equation is actually
    being used.  A3 scans ``grid_xs`` (default: the branch grid), which may
    include domain endpoints the branch had to step away from; a vanishing
    or uncovered branch value at such an endpoint is inconclusive
    (degenerate domain boundary), in the interior it is a failure.
    """
    xs = branch.xs if grid_xs is None else np.asarray(grid_xs, dtype=float)
    entries: dict[str, HypothesisEntry] = {}

    an_vals = []
    bad_x = None
    for x in branch.xs:
        try:
            an_vals.append(nf.a_n(float(x)))
        except Exception:
            bad_x = float(x)
            break
    if bad_x is not None:
        entries["A1"] = HypothesisEntry(
            "A1", "fail", {"worst_x": bad_x}, "leading coefficient not evaluable"
        )
    else:
        an_arr = np.array(an_vals)
        idx = int(np.argmin(an_arr))
        m = float(an_arr[idx])
        if m > 0.0:
            entries["A1"] = HypothesisEntry("A1", "pass", {"m": m}, GRID_VERIFIED)
        else:
            entries["A1"] = HypothesisEntry(
                "A1", "fail", {"m": m, "worst_x": float(branch.xs[idx])},
                "leading coefficient not positive",
            )

    lam_bad = None
    for x in branch.xs:
        try:
            values = nf.lambdas(float(x))
        except Exception:
            lam_bad = float(x)
            break
        if not all(math.isfinite(v) for v in values):
            lam_bad = float(x)
            break
    if lam_bad is None:
        entries["A2"] = HypothesisEntry("A2", "pass", {}, GRID_VERIFIED)
    else:
        entries["A2"] = HypothesisEntry(
            "A2", "fail", {"worst_x": lam_bad}, "normalized coefficient not finite"
        )

    worst_interior = None
    worst_endpoint = None
    for i, x in enumerate(xs):
        x = float(x)
        endpoint = i == 0 or i == xs.size - 1
        if branch.covers(x):
            value = float(branch.interp_E(x))
            ok = value > POSITIVE_THRESHOLD
        else:
            ok = False
            value = math.nan
        if not ok:
            if endpoint:
                worst_endpoint = (x, value)
            else:
                worst_interior = (x, value)
    if worst_interior is not None:
        x, value = worst_interior
        witness = {"worst_x": x}
        if math.isfinite(value):
            witness["worst_value"] = value
        entries["A3"] = HypothesisEntry(
            "A3", "fail", witness, "no positive branch value at an interior grid point"
        )
    elif worst_endpoint is not None:
        x, value = worst_endpoint
        witness = {"worst_x": x}
        if math.isfinite(value):
            witness["worst_value"] = value
        entries["A3"] = HypothesisEntry(
            "A3", "inconclusive", witness,
            "branch degenerate or uncovered at a grid endpoint",
        )
    else:
        entries["A3"] = HypothesisEntry(
            "A3", "pass", {"worst_value": float(branch.values.min())}, GRID_VERIFIED
        )

    lam_max = float(branch.eigenvalues.max())
    idx = int(np.argmax(branch.eigenvalues))
    if lam_max <= -ALPHA_FLOOR:
        entries["A4"] = HypothesisEntry(
            "A4", "pass", {"alpha0": -lam_max}, GRID_VERIFIED
        )
    elif lam_max < 0.0:
        entries["A4"] = HypothesisEntry(
            "A4", "inconclusive",
            {"alpha0": -lam_max, "worst_x": float(branch.xs[idx])},
            "stability margin below the resolvable floor",
        )
    else:
        entries["A4"] = HypothesisEntry(
            "A4", "fail",
            {"worst_x": float(branch.xs[idx]), "worst_value": lam_max},
            "non-negative eigenvalue on the branch",
        )

    return HypothesisReport(entries, _grid_info(xs, "structural"))


def check_asymptotic(
    nf: NormalForm,
    branch: EquilibriumBranch,
) -> HypothesisReport:
    """B1..B3 over the branch tail."""
    entries: dict[str, HypothesisEntry] = {}

    limit = branch_limit(branch)
    sup_e = branch.sup_E
    if limit is None:
        entries["B1"] = HypothesisEntry(
            "B1", "inconclusive", {"sup_E": sup_e},
            "tail window has not settled to the relative tolerance",
        )
    elif limit > 0.0 and math.isfinite(limit):
        entries["B1"] = HypothesisEntry(
            "B1", "pass", {"L": limit, "sup_E": sup_e}, GRID_VERIFIED
        )
    else:
        entries["B1"] = HypothesisEntry(
            "B1", "fail", {"L": limit}, "tail limit not positive"
        )

    alpha0 = float((-branch.eigenvalues).min())
    if alpha0 >= ALPHA_FLOOR:
        entries["B2"] = HypothesisEntry("B2", "pass", {"alpha0": alpha0}, GRID_VERIFIED)
    elif alpha0 > 0.0:
        entries["B2"] = HypothesisEntry(
            "B2", "inconclusive", {"alpha0": alpha0},
            "decay floor below the resolvable threshold",
        )
    else:
        entries["B2"] = HypothesisEntry(
            "B2", "fail", {"alpha0": alpha0}, "no positive decay floor"
        )

    entries["B3"] = _check_b3(nf, branch)
    return HypothesisReport(entries, _grid_info(branch.xs, "tail"))


def _check_b3(nf: NormalForm, branch: EquilibriumBranch) -> HypothesisEntry:
    xs = branch.xs
    try:
        accumulator = PhiAccumulator(nf, branch)
        integrand = np.empty(xs.size)
        for i, point in enumerate(branch.points):
            inv_phi = math.exp(-accumulator.integral(point.x))
            integrand[i] = inv_phi * abs(branch_derivative(nf, point))
    except ZeroEigenvalueError:
        return HypothesisEntry(
            "B3", "inconclusive", {},
            "branch derivative undefined (zero eigenvalue) on the grid",
        )
    except OverflowError:
        return HypothesisEntry(
            "B3", "inconclusive", {},
            "damping reciprocal overflows on the grid (divergent integrand)",
        )

    widths = np.diff(xs)
    increments = 0.5 * widths * (integrand[:-1] + integrand[1:])
    cumulative = np.concatenate(([0.0], np.cumsum(increments)))
    total = float(cumulative[-1])
    if total == 0.0:
        return HypothesisEntry("B3", "pass", {"B3_integral": 0.0}, GRID_VERIFIED)

    decade_start = float(xs[-1]) / 10.0
    if decade_start <= xs[0]:
        head = 0.0
    else:
        head = float(np.interp(decade_start, xs, cumulative))
    share = (total - head) / total
    witness = {"B3_integral": total, "tail_share": share}
    if share < B3_TAIL_SHARE:
        return HypothesisEntry("B3", "pass", witness, GRID_VERIFIED)
    return HypothesisEntry(
        "B3", "inconclusive", witness,
        "integral dominated by the last decade of the grid",
    )


def verify(
    nf: NormalForm,
    branch: EquilibriumBranch,
    grid_xs=None,
) -> HypothesisReport:
    """Structural and asymptotic checks combined into one report."""
    return check_structural(nf, branch, grid_xs).merged(check_asymptotic(nf, branch))
