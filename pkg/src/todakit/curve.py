"""Real hyperelliptic curves v^2 = u(u-1) prod_j (u - x_j)(u - u_j).

Branch points are ordered 0 < 1 < x_1 < u_1 < ... < x_g < u_g.  The bands
(where Delta < 0) are [0, 1] and [x_j, u_j]; the gaps are (1, x_1),
(u_1, x_2), ...

Sheet convention: v is the boundary value from the upper half plane of
prod_b sqrt(z - b) (principal roots).  This function is analytic off the
bands and behaves like +z^(g+1) at infinity, so it fixes the "+" sheet.  At
a real point it equals i^k sqrt|Delta| where k counts branch points to the
right of the point.

Values of a differential p du / v at a ramification point P_a are taken
with respect to zeta = sqrt(u - a); the overall sign of that choice is
fixed by the principal branch of sqrt(prod_{b != a} (a - b)).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BranchPointHit, DimensionMismatch, OrderingViolation

# minimal separation between consecutive branch points
DEGENERACY_FLOOR = 1e-9


@dataclass(frozen=True, order=True)
class BranchId:
    """Label of a ramification point: ('zero'|'one'|'x'|'u', 1-based index)."""

    kind: str
    index: int = 0

    def __str__(self):
        if self.kind == "zero":
            return "0"
        if self.kind == "one":
            return "1"
        return f"{self.kind}{self.index}"

    @classmethod
    def parse(cls, text: str) -> "BranchId":
        text = text.strip().lower()
        if text in ("0", "zero"):
            return ZERO
        if text in ("1", "one"):
            return ONE
        if text[:1] in ("x", "u") and text[1:].isdigit():
            return cls(text[0], int(text[1:]))
        raise ValueError(f"unknown branch id {text!r}")


ZERO = BranchId("zero")
ONE = BranchId("one")


def X(i: int) -> BranchId:
    return BranchId("x", i)


def U(i: int) -> BranchId:
    return BranchId("u", i)


@dataclass(frozen=True)
class CurveSpec:
    genus: int
    x: tuple
    u: tuple

    @property
    def branch_points(self) -> np.ndarray:
        pts = [0.0, 1.0]
        for xj, uj in zip(self.x, self.u):
            pts += [xj, uj]
        return np.array(pts)

    @property
    def branch_ids(self) -> list:
        ids = [ZERO, ONE]
        for j in range(1, self.genus + 1):
            ids += [X(j), U(j)]
        return ids

    def position(self, b: BranchId) -> float:
        if b.kind == "zero":
            return 0.0
        if b.kind == "one":
            return 1.0
        if not 1 <= b.index <= self.genus:
            raise DimensionMismatch(f"branch {b} outside genus {self.genus}")
        return float(self.x[b.index - 1] if b.kind == "x" else self.u[b.index - 1])

    def slot(self, b: BranchId) -> int:
        """Index of b in the sorted branch point array."""
        if b.kind == "zero":
            return 0
        if b.kind == "one":
            return 1
        return 2 * b.index + (0 if b.kind == "x" else 1)

    def with_branch(self, b: BranchId, value: float) -> "CurveSpec":
        """Copy with one of x_j / u_j replaced (0 and 1 are fixed)."""
        x, u = list(self.x), list(self.u)
        if b.kind == "x":
            x[b.index - 1] = value
        elif b.kind == "u":
            u[b.index - 1] = value
        else:
            raise ValueError("0 and 1 are normalised and cannot move")
        return build_curve(self.genus, x, u)

    def to_json(self) -> dict:
        return {"genus": self.genus, "x": list(self.x), "u": list(self.u)}


def build_curve(genus: int, x: Sequence[float], u: Sequence[float]) -> CurveSpec:
    x = [float(t) for t in np.ravel(x)]
    u = [float(t) for t in np.ravel(u)]
    if genus < 1 or len(x) != genus or len(u) != genus:
        raise DimensionMismatch(
            f"genus {genus} needs {genus} x and u values, got {len(x)} and {len(u)}")
    pts = [0.0, 1.0]
    for xj, uj in zip(x, u):
        pts += [xj, uj]
    if not all(np.isfinite(pts)):
        raise OrderingViolation("branch points must be finite")
    gaps = np.diff(pts)
    if np.any(gaps <= DEGENERACY_FLOOR):
        k = int(np.argmin(gaps))
        raise OrderingViolation(
            f"branch points not strictly increasing (0<1<x1<u1<...): "
            f"{pts[k]} >= {pts[k + 1]}")
    return CurveSpec(genus, tuple(x), tuple(u))


def delta_eval(curve: CurveSpec, point):
    """Delta(point) = prod_b (point - b); vectorised over point."""
    z = np.asarray(point)
    out = np.ones_like(z, dtype=np.result_type(z, float))
    for b in curve.branch_points:
        out = out * (z - b)
    return out


def sqrt_delta_signed(curve: CurveSpec, point: float) -> complex:
    """Value of v at a real point on the '+' sheet (upper boundary value)."""
    pts = curve.branch_points
    d = np.min(np.abs(point - pts))
    if d < 1e-14 * max(1.0, abs(point)):
        raise BranchPointHit(f"{point} is a branch point")
    k = int(np.sum(pts > point))
    return complex(1j ** k * np.sqrt(abs(float(delta_eval(curve, point)))))


def others_product(curve: CurveSpec, b: BranchId) -> float:
    """prod_{c != b} (a_b - a_c) over the other branch points."""
    pts = curve.branch_points
    s = curve.slot(b)
    return float(np.prod(pts[s] - np.delete(pts, s)))


def principal_sqrt(r: float) -> complex:
    # imaginary part +0.0 keeps negative reals on the +i side
    return complex(np.sqrt(complex(float(r), 0.0)))


def phi_at_ramification(curve: CurveSpec, b: BranchId) -> complex:
    """Value of du/v at P_b: 2 / sqrt(prod_{c != b}(a_b - a_c))."""
    return 2.0 / principal_sqrt(others_product(curve, b))


def v_basis_at_ramification(curve: CurveSpec, k: int, b: BranchId) -> complex:
    """v_k(P_b) for the Lagrange-type basis attached to u_1..u_g."""
    g = curve.genus
    if not 1 <= k <= g:
        raise DimensionMismatch(f"k={k} outside 1..{g}")
    a = curve.position(b)
    uu = np.array(curve.u)
    uk = uu[k - 1]
    rest = np.delete(uu, k - 1)
    num = phi_at_ramification(curve, b) * np.prod(a - rest)
    den = phi_at_ramification(curve, U(k)) * np.prod(uk - rest)
    return complex(num / den)


def lagrange_factor(curve: CurveSpec, k: int, a: float) -> float:
    """prod_{beta != k}(a - u_beta) / prod_{alpha != k}(u_k - u_alpha)."""
    uu = np.array(curve.u)
    rest = np.delete(uu, k - 1)
    return float(np.prod(a - rest) / np.prod(uu[k - 1] - rest))
