"""Reference potentials: EGM2008-format coefficient files and random models."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..errors import DataError
from ..sphharm import SphCoeffs, layout, n_coeffs

EARTH_RADIUS = 6371.0


def _parse_float(token: str) -> float:
    return float(token.replace("D", "E").replace("d", "e"))


def load_egm2008(path, degree_max: int, radius: float = EARTH_RADIUS) -> SphCoeffs:
    """Read fully normalized ``n m C S sigmaC sigmaS`` rows.

    Leading header lines (anything that does not parse as a data row before
    the first data row) are skipped; an ICGEM-style ``gfc`` keyword column is
    tolerated. Fortran ``D`` exponents are accepted. The model is anchored at
    ``radius`` and scaled so that ``C[0, 0] = 1`` is a field of value 1 on
    that sphere, i.e. potentials are in units of ``GM / a``.
    """
    C = np.full((degree_max + 1, degree_max + 1), np.nan)
    S = np.full((degree_max + 1, degree_max + 1), np.nan)
    started = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if tokens and tokens[0].lower() == "gfc":
                tokens = tokens[1:]
            if not tokens:
                continue
            try:
                if len(tokens) < 4:
                    raise ValueError("expected at least 4 columns")
                n, m = int(tokens[0]), int(tokens[1])
                c, s = _parse_float(tokens[2]), _parse_float(tokens[3])
            except ValueError as exc:
                if not started:
                    continue
                raise DataError(f"{path}:{lineno}: cannot parse row ({exc})") from exc
            started = True
            if not 0 <= m <= n:
                raise DataError(f"{path}:{lineno}: invalid degree/order ({n}, {m})")
            if n <= degree_max:
                C[n, m] = c
                S[n, m] = s if m > 0 else 0.0
    if not started:
        raise DataError(f"{path}: no coefficient rows found")
    ns, ms, _ = layout(degree_max)
    missing = np.isnan(C[ns, ms])
    if missing.any():
        first = (int(ns[missing][0]), int(ms[missing][0]))
        raise DataError(f"{path}: missing coefficients up to degree {degree_max}, "
                        f"first missing (n, m) = {first}")
    scale = math.sqrt(4.0 * math.pi) * radius
    return SphCoeffs.from_nm(np.nan_to_num(C) * scale, np.nan_to_num(S) * scale, radius)


def export_egm2008(coeffs: SphCoeffs, path) -> None:
    """Inverse of :func:`load_egm2008`; sigma columns are written as zero."""
    C, S = coeffs.to_nm()
    scale = math.sqrt(4.0 * math.pi) * coeffs.anchor_radius
    lines = []
    for n in range(coeffs.degree_max + 1):
        for m in range(n + 1):
            lines.append(f"{n} {m} {C[n, m] / scale:.17g} {S[n, m] / scale:.17g} 0 0")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def random_potential(degree: int, decay_exponent: float = 0.0, seed: int = 0,
                     radius: float = EARTH_RADIUS) -> SphCoeffs:
    """IID standard normal coefficients damped by ``(n + 1) ** -decay_exponent``.

    ``decay_exponent = 0`` gives a flat spectrum; ``2`` mimics the fast decay
    of real gravity models (degree power falling like ``(n+1)**-4``).
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    ns = layout(degree)[0]
    values = rng.standard_normal(n_coeffs(degree)) * (ns + 1.0) ** (-float(decay_exponent))
    return SphCoeffs(degree, float(radius), values)


def degree_power(coeffs: SphCoeffs) -> np.ndarray:
    """Mean square coefficient per degree."""
    ns = coeffs.degrees()
    return np.bincount(ns, weights=coeffs.coeffs ** 2) / (2 * np.arange(coeffs.degree_max + 1) + 1)
