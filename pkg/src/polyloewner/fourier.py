"""Spectral sampling utilities: torus coefficients and ring Jacobians.

For a map holomorphic on the closed polydisc of radius r < 1, sampling on
the torus |z_j| = r at N equispaced angles per axis and applying an FFT
recovers each Taylor coefficient up to aliasing of order r**N relative to
the extracted degree, which is far below the comparison tolerances used
here.  This is the independent route for checking that an evaluator and a
jet describe the same function, and for extracting coefficients of maps
given only pointwise.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .jets import DomainError, JetMap, MultiJet, Normalization, multiindices

__all__ = ["torus_coefficients", "torus_jet", "ring_jacobian"]


def _torus_points(dim: int, radius: float, samples: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(samples) / samples
    axes = np.meshgrid(*([theta] * dim), indexing="ij")
    pts = np.stack([radius * np.exp(1j * ax) for ax in axes], axis=-1)
    return pts  # shape (samples,)*dim + (dim,)


def torus_coefficients(
    evaluator: Callable[[np.ndarray], np.ndarray],
    dim: int,
    degree: int,
    radius: float = 0.4,
    samples: int = 32,
) -> list[dict[tuple[int, ...], complex]]:
    """Taylor coefficients through ``degree`` of each output component.

    ``evaluator`` maps an array of points (..., dim) to values (..., dim).
    Returns one coefficient dict per component.
    """
    if not 0.0 < radius < 1.0:
        raise DomainError(f"radius must lie in (0,1), got {radius}")
    if samples <= degree:
        raise DomainError(f"need more than degree={degree} samples per axis, got {samples}")
    pts = _torus_points(dim, radius, samples)
    vals = np.asarray(evaluator(pts.reshape(-1, dim)), dtype=np.complex128)
    vals = vals.reshape(pts.shape)
    # fftn with a minus-sign kernel picks out frequency alpha at index alpha.
    hat = np.fft.fftn(vals, axes=tuple(range(dim))) / samples**dim
    out: list[dict[tuple[int, ...], complex]] = [dict() for _ in range(dim)]
    for alpha in multiindices(dim, degree):
        scale = radius ** sum(alpha)
        sel = hat[alpha] / scale
        for i in range(dim):
            out[i][alpha] = complex(sel[i])
    return out


def torus_jet(
    evaluator: Callable[[np.ndarray], np.ndarray],
    dim: int,
    degree: int,
    radius: float = 0.4,
    samples: int = 32,
    normalization: Normalization = Normalization.GENERAL,
) -> JetMap:
    tables = torus_coefficients(evaluator, dim, degree, radius, samples)
    comps = tuple(MultiJet(dim, degree, t) for t in tables)
    return JetMap(comps, normalization)


def ring_jacobian(
    evaluator: Callable[[np.ndarray], np.ndarray],
    z: np.ndarray,
    rel_radius: float = 0.25,
    samples: int = 16,
) -> np.ndarray:
    """Complex Jacobians at interior points via Cauchy ring averages.

    For each point and each input variable, the derivative is the first
    Fourier mode of the evaluator on a small circle around the point; the
    circle radius is ``rel_radius`` times the distance to the unit
    polydisc boundary, so all probe points stay strictly inside.  The
    truncation error is of order radius**samples.
    """
    z = np.asarray(z, dtype=np.complex128)
    single = z.ndim == 1
    if single:
        z = z[None, :]
    m, n = z.shape
    gap = 1.0 - np.max(np.abs(z), axis=1)
    if np.any(gap <= 0):
        raise DomainError("ring_jacobian needs points strictly inside the polydisc")
    rho = np.minimum(rel_radius * gap, 0.2)  # (m,)
    omega = np.exp(2j * np.pi * np.arange(samples) / samples)
    # probe[p, j, s] = z[p] + rho[p] * omega[s] * e_j, flattened for one call
    probes = np.tile(z[:, None, None, :], (1, n, samples, 1))
    for j in range(n):
        probes[:, j, :, j] += rho[:, None] * omega[None, :]
    vals = np.asarray(evaluator(probes.reshape(-1, n)), dtype=np.complex128)
    vals = vals.reshape(m, n, samples, n)
    modes = np.tensordot(vals, np.conj(omega), axes=([2], [0])) / samples  # (m, n_in, n_out)
    jac = np.swapaxes(modes, 1, 2) / rho[:, None, None]
    return jac[0] if single else jac
