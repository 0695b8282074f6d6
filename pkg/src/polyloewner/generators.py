"""Infinitesimal generators on the unit polydisc and membership testing.

A generator is a holomorphic map h with h(0) = 0, Dh(0) = -identity, and
Re(h_j(z)/z_j) <= 0 whenever the sup-norm of z is attained at |z_j| > 0.
Generators here carry both a pointwise evaluator and a truncated jet,
checked against each other spectrally at construction, plus provenance
describing how they were built.

Membership is certified on a deterministic reference grid: for each
coordinate j and radius r, the margin Re(h_j(z)/z_j) is scanned over
points whose j-th coordinate has modulus r and whose other coordinates
have modulus at most r.  Constructions whose margins provably depend on
only a few coordinates declare those dependency sets, and the scan then
meshes only the declared axes (the remaining coordinates are pinned),
which is an exact reduction, not a heuristic.  A passing certificate
means no violation was found on the stated grid; a failing one carries a
concrete witness point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .fourier import ring_jacobian, torus_jet
from .jets import (
    DomainError,
    JetMap,
    JetShapeError,
    MultiJet,
    Normalization,
    SingularityError,
    analytic_jet,
    assert_normalization,
    constant_jet,
    identity_map,
    jacobian,
    map_distance,
    map_to_json,
    matrix_solve,
    minus_identity_map,
    rotate_map,
    variable_jet,
)

__all__ = [
    "GridSpec",
    "REFERENCE_GRID",
    "MEMBERSHIP_TOL",
    "MembershipCertificate",
    "MembershipError",
    "AtomicMeasure",
    "Generator",
    "dilation_generator",
    "membership_check",
    "from_starlike",
    "rotate_generator",
    "product_form",
    "convex_combination",
    "shear_linear",
    "shear_quadratic",
    "BisectionSpec",
    "perturb_starlike_delta",
]

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Deterministic membership sampling grid.

    ``radii`` are the tested sup-norm levels; the distinguished coordinate
    sweeps ``angle_count`` equispaced angles at each radius, and every
    other scanned coordinate takes moduli ``factor * r`` over the same
    angles (modulus zero collapses to the single point 0).
    """

    radii: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
    angle_count: int = 64
    companion_factors: tuple[float, ...] = (0.0, 0.5, 1.0)

    def __post_init__(self) -> None:
        if not self.radii or any(not 0.0 < r < 1.0 for r in self.radii):
            raise DomainError("grid radii must lie strictly inside (0, 1)")
        if list(self.radii) != sorted(self.radii):
            raise DomainError("grid radii must be ascending")
        if self.angle_count < 8:
            raise DomainError("grid needs at least 8 angles")
        if any(not 0.0 <= f <= 1.0 for f in self.companion_factors):
            raise DomainError("companion factors must lie in [0, 1]")

    def to_json(self) -> dict:
        return {
            "radii": list(self.radii),
            "angle_count": self.angle_count,
            "companion_factors": list(self.companion_factors),
        }


REFERENCE_GRID = GridSpec()


@dataclass(frozen=True)
class MembershipCertificate:
    """Outcome of a grid membership scan (one-sided: pass = none found)."""

    passed: bool
    worst_margin: float
    witness_point: tuple[complex, ...]
    witness_coordinate: int
    tol: float
    grid: GridSpec

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness_point": [{"re": c.real, "im": c.imag} for c in self.witness_point],
            "witness_coordinate": self.witness_coordinate,
            "tol": self.tol,
            "grid": self.grid.to_json(),
        }


class MembershipError(ValueError):
    """A generator failed its membership scan where one was required."""

    def __init__(self, message: str, certificate: MembershipCertificate):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite atomic probability measure on the circle: (angle, weight) atoms."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        atoms = tuple((float(a), float(w)) for a, w in self.atoms)
        if not atoms:
            raise DomainError("atomic measure needs at least one atom")
        if any(w < 0 for _, w in atoms):
            raise DomainError("atom weights must be nonnegative")
        total = sum(w for _, w in atoms)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"atom weights must sum to 1, got {total!r}")
        object.__setattr__(self, "atoms", atoms)

    def herglotz_coefficient(self, k: int) -> complex:
        """Taylor coefficient c_k = 2 * sum of weight * exp(-i k angle)."""
        if k == 0:
            return 1.0 + 0j
        return 2.0 * sum(w * np.exp(-1j * k * a) for a, w in self.atoms)

    def transform_jet(self, dim: int, degree: int, var: int) -> MultiJet:
        """Jet of p(z_var) = sum of weight * (u + z_var)/(u - z_var)."""
        acc = constant_jet(dim, degree, 0.0)
        for a, w in self.atoms:
            acc = acc + w * analytic_jet("mobius", dim, degree, var, u=np.exp(1j * a))
        return acc

    def transform_values(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        out = np.zeros_like(w)
        for a, wt in self.atoms:
            u = np.exp(1j * a)
            out = out + wt * (u + w) / (u - w)
        return out

    def to_json(self) -> dict:
        return {"atoms": [{"angle": a, "weight": w} for a, w in self.atoms]}

    @staticmethod
    def from_json(obj) -> "AtomicMeasure":
        try:
            atoms = tuple((float(e["angle"]), float(e["weight"])) for e in obj["atoms"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed atomic measure: {exc}") from exc
        return AtomicMeasure(atoms)


class Generator:
    """An infinitesimal generator: evaluator + jet + provenance.

    ``margin_deps`` optionally lists, per component j, the coordinate
    indices that Re(h_j(z)/z_j) actually depends on; ``None`` means scan
    everything.  ``trusted`` marks membership as guaranteed by the
    construction (catalog formulas, rotations, products, convex sums),
    which lets the evolution engine skip grid re-checks.
    """

    def __init__(
        self,
        jet: JetMap,
        evaluator: Callable[[np.ndarray], np.ndarray],
        provenance: dict,
        *,
        component_fn: Optional[Callable[[np.ndarray, int], np.ndarray]] = None,
        margin_deps: Optional[Sequence[Iterable[int]]] = None,
        trusted: bool = False,
        certificate: Optional[MembershipCertificate] = None,
        check: bool = True,
        check_tol: float = 1e-8,
        check_radius: float = 0.4,
        check_samples: int = 32,
    ):
        assert_normalization(
            JetMap(jet.components, Normalization.GENERATOR), tol=max(check_tol, 1e-8)
        )
        self.jet = JetMap(jet.components, Normalization.GENERATOR)
        self._evaluator = evaluator
        self.provenance = dict(provenance)
        self._component_fn = component_fn
        if margin_deps is not None:
            margin_deps = tuple(frozenset(int(i) for i in d) for d in margin_deps)
            if len(margin_deps) != self.jet.dim:
                raise JetShapeError("margin_deps needs one entry per component")
        self.margin_deps = margin_deps
        self.trusted = bool(trusted)
        self.certificate = certificate
        self._array_cache: dict[int, np.ndarray] = {}
        if check:
            probe = torus_jet(
                self.evaluate, self.dim, self.degree, radius=check_radius, samples=check_samples
            )
            err = map_distance(probe, self.jet)
            if err > check_tol:
                raise DomainError(
                    f"generator evaluator and jet disagree: coefficient error {err:.3e}"
                )

    @property
    def dim(self) -> int:
        return self.jet.dim

    @property
    def degree(self) -> int:
        return self.jet.degree

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        if z.shape[-1] != self.dim:
            raise JetShapeError(f"points have last axis {z.shape[-1]}, expected {self.dim}")
        return np.asarray(self._evaluator(z), dtype=np.complex128)

    def component(self, z, j: int) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        if self._component_fn is not None:
            return np.asarray(self._component_fn(z, j), dtype=np.complex128)
        return self.evaluate(z)[..., j]

    def jet_array(self, degree: int) -> np.ndarray:
        """Dense (dim, basis) coefficient array at the requested degree."""
        if degree > self.degree:
            raise JetShapeError(
                f"generator jet holds degree {self.degree}, cannot serve degree {degree}"
            )
        arr = self._array_cache.get(degree)
        if arr is None:
            tables = kernels.basis_tables(self.dim, degree)
            arr = kernels.map_to_array(self.jet.truncated(degree), tables)
            self._array_cache[degree] = arr
        return arr

    def to_json(self) -> dict:
        out = {"provenance": self.provenance, "jet": map_to_json(self.jet)}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


# -- membership -----------------------------------------------------------


def _membership_mesh(
    dim: int, j: int, deps: frozenset, r: float, grid: GridSpec
) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(grid.angle_count) / grid.angle_count
    circle = np.exp(1j * theta)
    axes_coords: list[int] = []
    axes_vals: list[np.ndarray] = []
    for k in range(dim):
        if k == j:
            v = r * circle if j in deps else np.array([r + 0j])
        elif k in deps:
            parts = []
            for f in grid.companion_factors:
                if f == 0.0:
                    parts.append(np.array([0j]))
                else:
                    parts.append(f * r * circle)
            v = np.concatenate(parts)
        else:
            continue
        axes_coords.append(k)
        axes_vals.append(v)
    mesh = np.meshgrid(*axes_vals, indexing="ij")
    count = mesh[0].size
    pts = np.zeros((count, dim), dtype=np.complex128)
    for coord, axis_vals in zip(axes_coords, mesh):
        pts[:, coord] = axis_vals.reshape(-1)
    return pts


def membership_check(
    g: Generator, grid: GridSpec = REFERENCE_GRID, tol: float = MEMBERSHIP_TOL
) -> MembershipCertificate:
    """Scan Re(h_j(z)/z_j) over the grid; certify if it stays <= tol.

    The scan is deterministic; the witness is the first grid point (in
    coordinate, radius, mesh order) attaining the worst margin.
    """
    n = g.dim
    worst = -math.inf
    wit_point: tuple[complex, ...] = (0j,) * n
    wit_coord = 0
    for j in range(n):
        deps = g.margin_deps[j] if g.margin_deps is not None else frozenset(range(n))
        for r in grid.radii:
            pts = _membership_mesh(n, j, deps, r, grid)
            margins = np.real(g.component(pts, j) / pts[:, j])
            k = int(np.argmax(margins))
            m = float(margins[k])
            if m > worst:
                worst = m
                wit_point = tuple(complex(c) for c in pts[k])
                wit_coord = j
    return MembershipCertificate(
        passed=bool(worst <= tol),
        worst_margin=worst,
        witness_point=wit_point,
        witness_coordinate=wit_coord,
        tol=tol,
        grid=grid,
    )


# -- constructions --------------------------------------------------------


def dilation_generator(dim: int, degree: int = 4) -> Generator:
    """The generator h(z) = -z of the pure dilation semigroup."""
    jet = minus_identity_map(dim, degree)

    def evaluator(z: np.ndarray) -> np.ndarray:
        return -z

    return Generator(
        jet,
        evaluator,
        {"kind": "dilation", "dim": dim},
        margin_deps=[frozenset()] * dim,
        trusted=True,
        check=False,
    )


def _polynomial_jacobian_fn(f: JetMap) -> Callable[[np.ndarray], np.ndarray]:
    entries = jacobian(f)
    n = f.dim

    def jac(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        out = np.empty(z.shape[:-1] + (n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                out[..., i, j] = entries[i][j](z)
        return out

    return jac


def from_starlike(
    f,
    *,
    degree: Optional[int] = None,
    check: bool = True,
    check_tol: float = 1e-8,
) -> Generator:
    """Generator -Df(z)^{-1} f(z) of a normalized starlike map.

    ``f`` is either an object exposing ``jet`` / ``evaluator`` /
    ``jacobian`` attributes (catalog maps qualify) or a bare ``JetMap``,
    in which case the jet doubles as a polynomial evaluator and its
    derivative jets as the Jacobian.  The jet of the result comes from the
    order-by-order solve Df * x = f, the evaluator from pointwise linear
    solves; a singular Jacobian raises ``SingularityError``.
    """
    if isinstance(f, JetMap):
        fjet, fev, fjac = f, None, None
        source = "jet"
    else:
        fjet, fev, fjac = f.jet, f.evaluator, getattr(f, "jacobian", None)
        source = getattr(f, "name", "map")
    if degree is not None:
        fjet = fjet.truncated(degree)
    assert_normalization(JetMap(fjet.components, Normalization.UNIVALENT), tol=1e-10)
    n = fjet.dim

    x = matrix_solve(jacobian(fjet), fjet.components)
    hjet = JetMap(tuple(-c for c in x), Normalization.GENERATOR)

    if fev is None:
        fev = fjet
    if fjac is None:
        if isinstance(f, JetMap):
            fjac = _polynomial_jacobian_fn(fjet)
        else:
            base_ev = fev
            fjac = lambda z: ring_jacobian(base_ev, z)  # noqa: E731

    def evaluator(z: np.ndarray) -> np.ndarray:
        vals = np.asarray(fev(z), dtype=np.complex128)
        jac_vals = np.asarray(fjac(z), dtype=np.complex128)
        dets = np.linalg.det(jac_vals)
        bad = np.abs(dets) < 1e-12
        if np.any(bad):
            where = z[bad][0] if z.ndim > 1 else z
            raise SingularityError(f"Jacobian of the starlike map is singular near {where}")
        return -np.linalg.solve(jac_vals, vals[..., None])[..., 0]

    return Generator(
        hjet,
        evaluator,
        {"kind": "from-starlike", "source": source},
        check=check,
        check_tol=check_tol,
    )


def rotate_generator(g: Generator, angles: Sequence[float]) -> Generator:
    """Conjugate a generator by a torus rotation.

    Component j of the result is exp(-i a_j) h_j(exp(i a) z); on jets this
    multiplies coefficients by unit phases.  Rotating a rotation collapses
    to a single rotation of the original base with summed angles, so a
    rotation by angles followed by its negation returns the base object
    itself, coefficient-for-coefficient identical.
    """
    th = np.asarray(angles, dtype=np.float64)
    if th.shape != (g.dim,):
        raise JetShapeError(f"need {g.dim} angles, got shape {th.shape}")
    base = g
    if g.provenance.get("kind") == "rotation":
        base = g._rotation_base  # type: ignore[attr-defined]
        th = th + np.asarray(g._rotation_angles)  # type: ignore[attr-defined]
    if not np.any(th):
        return base

    phases = np.exp(1j * th)
    inv_phases = np.exp(-1j * th)

    def evaluator(z: np.ndarray) -> np.ndarray:
        return inv_phases * base.evaluate(phases * z)

    def component_fn(z: np.ndarray, j: int) -> np.ndarray:
        return inv_phases[j] * base.component(phases * z, j)

    out = Generator(
        rotate_map(base.jet, th),
        evaluator,
        {"kind": "rotation", "angles": [float(a) for a in th], "base": base.provenance},
        component_fn=component_fn,
        margin_deps=base.margin_deps,
        trusted=base.trusted,
        check=False,
    )
    out._rotation_base = base  # type: ignore[attr-defined]
    out._rotation_angles = tuple(float(a) for a in th)  # type: ignore[attr-defined]
    return out


def product_form(
    selectors: Sequence[int],
    measures: Sequence[Optional[AtomicMeasure]],
    degree: int = 4,
    check: bool = True,
) -> Generator:
    """Generator with components h_k(z) = -z_k p_k(z_{selectors[k]}).

    Each p_k is the Herglotz transform of an atomic measure (``None``
    means p_k = 1).  Such maps are generators for any selector choice,
    so the result is membership-trusted.
    """
    n = len(selectors)
    if len(measures) != n:
        raise JetShapeError("need one measure (or None) per coordinate")
    sel = [int(s) for s in selectors]
    if any(not 0 <= s < n for s in sel):
        raise DomainError(f"selectors must be coordinate indices in [0, {n}), got {sel}")

    comps = []
    margin_deps = []
    for k in range(n):
        zk = variable_jet(n, degree, k)
        if measures[k] is None:
            comps.append(-zk)
            margin_deps.append(frozenset())
        else:
            comps.append(-(zk * measures[k].transform_jet(n, degree, sel[k])))
            margin_deps.append(frozenset({sel[k]}))
    jet = JetMap(tuple(comps), Normalization.GENERATOR)

    def component_fn(z: np.ndarray, j: int) -> np.ndarray:
        if measures[j] is None:
            return -z[..., j]
        return -z[..., j] * measures[j].transform_values(z[..., sel[j]])

    def evaluator(z: np.ndarray) -> np.ndarray:
        return np.stack([component_fn(z, j) for j in range(n)], axis=-1)

    return Generator(
        jet,
        evaluator,
        {
            "kind": "product-form",
            "selectors": sel,
            "measures": [m.to_json() if m is not None else None for m in measures],
        },
        component_fn=component_fn,
        margin_deps=margin_deps,
        trusted=True,
        check=check,
    )


def convex_combination(parts: Sequence[Generator], weights: Sequence[float]) -> Generator:
    """Convex combination of generators (the class is a convex cone)."""
    if not parts:
        raise DomainError("need at least one generator")
    if len(weights) != len(parts):
        raise JetShapeError("need one weight per generator")
    w = [float(x) for x in weights]
    if any(x < 0 for x in w):
        raise DomainError("weights must be nonnegative")
    if abs(sum(w) - 1.0) > 1e-12:
        raise DomainError(f"weights must sum to 1, got {sum(w)!r}")
    n = parts[0].dim
    if any(p.dim != n for p in parts):
        raise JetShapeError("generators disagree on dim")
    degree = min(p.degree for p in parts)

    comps = []
    for j in range(n):
        acc = MultiJet(n, degree, {})
        for wt, p in zip(w, parts):
            acc = acc + wt * p.jet.components[j].truncated(degree)
        comps.append(acc)
    jet = JetMap(tuple(comps), Normalization.GENERATOR)

    def evaluator(z: np.ndarray) -> np.ndarray:
        acc = w[0] * parts[0].evaluate(z)
        for wt, p in zip(w[1:], parts[1:]):
            acc = acc + wt * p.evaluate(z)
        return acc

    def component_fn(z: np.ndarray, j: int) -> np.ndarray:
        acc = w[0] * parts[0].component(z, j)
        for wt, p in zip(w[1:], parts[1:]):
            acc = acc + wt * p.component(z, j)
        return acc

    if all(p.margin_deps is not None for p in parts):
        margin_deps = [
            frozenset().union(*(p.margin_deps[j] for p in parts)) for j in range(n)
        ]
    else:
        margin_deps = None

    return Generator(
        jet,
        evaluator,
        {
            "kind": "convex-combination",
            "weights": w,
            "parts": [p.provenance for p in parts],
        },
        component_fn=component_fn,
        margin_deps=margin_deps,
        trusted=all(p.trusted for p in parts),
        check=False,
    )


# -- coordinate shears ----------------------------------------------------


def _sheared_profile_fn(
    g: Generator, avg_radius: float = 0.5, avg_samples: int = 64
) -> Callable[[np.ndarray], np.ndarray]:
    """p(w) = 1 - sum_k c_{(1,k)} w^k as an exact pointwise function.

    Averaging h_1(x e^{i t}, w)/(x e^{i t}) over the full circle kills
    every coefficient with first exponent != 1 (the x-dependence drops
    out), leaving -1 + sum_k c_{(1,k)} w^k; the trapezoid rule on the
    circle evaluates that average to roundoff.
    """
    ring = avg_radius * np.exp(2j * np.pi * np.arange(avg_samples) / avg_samples)

    def profile(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        pts = np.empty(w.shape + (avg_samples, 2), dtype=np.complex128)
        pts[..., 0] = ring
        pts[..., 1] = w[..., None]
        vals = g.component(pts, 0) / ring
        return -np.mean(vals, axis=-1)

    return profile


def _shear_common(g: Generator) -> None:
    if g.dim != 2:
        raise DomainError("coordinate shears are defined for dim 2 generators")


def shear_linear(
    g: Generator, grid: GridSpec = REFERENCE_GRID, tol: float = MEMBERSHIP_TOL
) -> Generator:
    """Replace h_1 by -z_1 (1 - sum_k c_{(1,k)} z_2^k), keep h_2.

    The jet extracts the coefficients c_{(1,k)}, k <= degree-1, from g;
    the evaluator realizes the full series by circle averaging, so the
    output is again a generator whenever g is.  The membership scan runs
    and its certificate is attached.
    """
    _shear_common(g)
    D = g.degree
    profile = _sheared_profile_fn(g)

    coeffs: dict[tuple[int, int], complex] = {(1, 0): -1.0 + 0j}
    for k in range(1, D):
        c = g.jet.coefficient(0, (1, k))
        if c != 0:
            coeffs[(1, k)] = c
    comp0 = MultiJet(2, D, coeffs)
    jet = JetMap((comp0, g.jet.components[1]), Normalization.GENERATOR)

    def component_fn(z: np.ndarray, j: int) -> np.ndarray:
        if j == 0:
            return -z[..., 0] * profile(z[..., 1])
        return g.component(z, 1)

    def evaluator(z: np.ndarray) -> np.ndarray:
        return np.stack([component_fn(z, 0), component_fn(z, 1)], axis=-1)

    base_deps = g.margin_deps[1] if g.margin_deps is not None else frozenset({0, 1})
    out = Generator(
        jet,
        evaluator,
        {"kind": "shear-linear", "base": g.provenance},
        component_fn=component_fn,
        margin_deps=[frozenset({1}), base_deps],
        trusted=False,
        check=True,
    )
    cert = membership_check(out, grid, tol)
    out.certificate = cert
    out.trusted = cert.passed
    return out


def shear_quadratic(
    g: Generator, grid: GridSpec = REFERENCE_GRID, tol: float = MEMBERSHIP_TOL
) -> Generator:
    """Replace h_1 by -z_1 + c_{(0,2)} z_2^2, keep h_2; certificate attached."""
    _shear_common(g)
    D = g.degree
    c = g.jet.coefficient(0, (0, 2))
    comp0 = MultiJet(2, D, {(1, 0): -1.0 + 0j, (0, 2): c})
    jet = JetMap((comp0, g.jet.components[1]), Normalization.GENERATOR)

    def component_fn(z: np.ndarray, j: int) -> np.ndarray:
        if j == 0:
            return -z[..., 0] + c * z[..., 1] ** 2
        return g.component(z, 1)

    def evaluator(z: np.ndarray) -> np.ndarray:
        return np.stack([component_fn(z, 0), component_fn(z, 1)], axis=-1)

    base_deps = g.margin_deps[1] if g.margin_deps is not None else frozenset({0, 1})
    out = Generator(
        jet,
        evaluator,
        {"kind": "shear-quadratic", "base": g.provenance},
        component_fn=component_fn,
        margin_deps=[frozenset({0, 1}), base_deps],
        trusted=False,
        check=True,
    )
    cert = membership_check(out, grid, tol)
    out.certificate = cert
    out.trusted = cert.passed
    return out


# -- perturbation threshold -----------------------------------------------


@dataclass(frozen=True)
class BisectionSpec:
    """Search control for the largest passing perturbation size."""

    lower: float = 0.0
    upper: float = 2.0
    resolution: float = 1e-3
    grid: GridSpec = REFERENCE_GRID
    tol: float = MEMBERSHIP_TOL

    def __post_init__(self) -> None:
        if not 0.0 <= self.lower < self.upper:
            raise DomainError("need 0 <= lower < upper")
        if self.resolution <= 0:
            raise DomainError("resolution must be positive")


def perturb_starlike_delta(P: JetMap, search: BisectionSpec = BisectionSpec()) -> float:
    """Largest eps (to bisection resolution) with z + eps*P(z) grid-starlike.

    ``P`` must vanish to second order at 0 so that the perturbed map stays
    normalized.  Each candidate map is inverted through ``from_starlike``
    and membership-scanned; bisection maintains a passing lower end and a
    failing upper end.  If even the upper end passes it is returned as-is.
    """
    n = P.dim
    if np.max(np.abs(P.constant_terms())) > 1e-14 or np.max(np.abs(P.linear_part())) > 1e-14:
        raise DomainError("perturbation must vanish to second order at the origin")
    base = identity_map(n, P.degree)

    def passes(eps: float) -> bool:
        comps = tuple(b + eps * p for b, p in zip(base.components, P.components))
        fmap = JetMap(comps, Normalization.UNIVALENT)
        g = from_starlike(fmap, check=False)
        try:
            return membership_check(g, search.grid, search.tol).passed
        except SingularityError:
            # Df singular inside the scanned region: not even locally
            # univalent there, so certainly not starlike.
            return False

    lo, hi = search.lower, search.upper
    if not passes(lo):
        raise DomainError(f"perturbation fails membership already at eps={lo}")
    if passes(hi):
        return hi
    while hi - lo > search.resolution:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid
    return lo
