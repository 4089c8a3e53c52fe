"""Finite complex sequences, their DFT, and bi-unimodularity.

A sequence c of length d is bi-unimodular when both c and its normalized
DFT have all entries on the unit circle.  Such sequences are exactly the
first columns (times d**0.5) of circulant unitary Hadamard matrices, which
is why they matter here.  The classical examples in odd dimension are the
Gauss sequences g(k)[j] = exp(i*pi*k*j*(j+1)/d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import default_tolerance
from .phase_ring import _check_dimension, root_table, triangular_phase


@dataclass(frozen=True, eq=False)
class Sequence:
    dimension: int
    values: np.ndarray


def as_sequence(values) -> Sequence:
    if isinstance(values, Sequence):
        return values
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a nonempty 1-d sequence, got shape {arr.shape}")
    arr.setflags(write=False)
    return Sequence(arr.size, arr)


@dataclass(frozen=True, eq=False)
class BiunimodularityReport:
    passed: bool
    time_deviation: float
    freq_deviation: float
    freq_moduli: np.ndarray

    @property
    def deviation(self) -> float:
        return max(self.time_deviation, self.freq_deviation)

    def __bool__(self) -> bool:
        return self.passed


def dft_sequence(c) -> Sequence:
    """Normalized DFT with positive exponent:
    hat(c)[l] = d**-0.5 * sum_k c[k] * exp(2*i*pi*k*l/d)."""
    c = as_sequence(c)
    values = np.fft.ifft(c.values) * math.sqrt(c.dimension)
    values.setflags(write=False)
    return Sequence(c.dimension, values)


def autocorrelation(c, j: int) -> complex:
    """sum_k conj(c[k]) * c[(j+k) mod d].  Equals, via Parseval, the sum
    sum_l |hat(c)[l]|**2 * exp(-2*i*pi*j*l/d)."""
    c = as_sequence(c)
    return complex(np.sum(np.conj(c.values) * np.roll(c.values, -j)))


def is_biunimodular(c, tol: float | None = None) -> BiunimodularityReport:
    """Check |c[j]| = 1 and |hat(c)[l]| = 1 for all j, l, within tol."""
    c = as_sequence(c)
    if tol is None:
        tol = default_tolerance(c.dimension)
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    freq = dft_sequence(c)
    freq_moduli = np.abs(freq.values)
    freq_moduli.setflags(write=False)
    time_dev = float(np.abs(np.abs(c.values) - 1.0).max())
    freq_dev = float(np.abs(freq_moduli - 1.0).max())
    return BiunimodularityReport(
        passed=(time_dev <= tol and freq_dev <= tol),
        time_deviation=time_dev,
        freq_deviation=freq_dev,
        freq_moduli=freq_moduli,
    )


def gauss_sequence(d: int, k: int) -> Sequence:
    """g(k)[j] = exp(i*pi*k*j*(j+1)/d) for odd d.

    The exponent k*j*(j+1) is even, so g(k) lives on the d-th roots of
    unity; it is bi-unimodular exactly when gcd(k, d) = 1.
    """
    _check_dimension(d)
    if d % 2 == 0 or d < 3:
        raise ValueError(f"Gauss sequences need an odd dimension >= 3, got {d}")
    table = root_table(d)
    t = np.array([triangular_phase(j, k, d).t for j in range(d)])
    values = table.values[t]
    values.setflags(write=False)
    return Sequence(d, values)


def exhaustive_biunimodular(
    d: int, alphabet_order: int, tol: float | None = None
) -> list[Sequence]:
    """Enumerate all alphabet_order**d sequences over the alphabet of
    alphabet_order-th roots of unity and keep the bi-unimodular ones.

    Brute force by design: this is the ground-truth oracle the structured
    constructions are compared against, so it must not share code with
    them.  Capped at d <= 6, alphabet_order <= 12.
    """
    _check_dimension(d)
    if not 1 <= d <= 6:
        raise ValueError(f"exhaustive search supports 1 <= d <= 6, got d={d}")
    if not 1 <= alphabet_order <= 12:
        raise ValueError(
            f"exhaustive search supports alphabets up to order 12, got {alphabet_order}"
        )
    if tol is None:
        tol = default_tolerance(d)
    m = alphabet_order
    alphabet = np.exp(2j * np.pi * np.arange(m) / m)
    # positive-exponent DFT matrix, normalized; moduli of c @ dft are |hat(c)|
    idx = np.arange(d)
    dft = np.exp(2j * np.pi * np.outer(idx, idx) / d) / math.sqrt(d)
    place = m ** np.arange(d - 1, -1, -1, dtype=np.int64)
    total = m**d
    hits: list[Sequence] = []
    chunk = 1 << 16
    for start in range(0, total, chunk):
        nums = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (nums[:, None] // place[None, :]) % m
        rows = alphabet[digits]
        moduli = np.abs(rows @ dft)
        ok = np.abs(moduli - 1.0).max(axis=1) <= tol
        for row in rows[ok]:
            row = row.copy()
            row.setflags(write=False)
            hits.append(Sequence(d, row))
    return hits


def shift_phase_equivalent(a, b, tol: float = 1e-9) -> bool:
    """True when b equals a global unit phase times a cyclic shift of a.

    Both sequences must be unimodular-ish (entries bounded away from zero);
    the test compares entrywise ratios across every shift.
    """
    a, b = as_sequence(a), as_sequence(b)
    if a.dimension != b.dimension:
        return False
    if np.abs(a.values).min() < 1e-12:
        raise ValueError("shift/phase comparison needs nonvanishing entries")
    for r in range(a.dimension):
        ratio = b.values / np.roll(a.values, -r)
        if np.abs(ratio - ratio[0]).max() <= tol:
            return True
    return False


def canonical_form(c, decimals: int = 9) -> tuple:
    """Hashable representative of the orbit of c under cyclic shifts and a
    global phase: normalize each shift by its leading entry, round, and
    take the lexicographically smallest tuple of (re, im) pairs."""
    c = as_sequence(c)
    if np.abs(c.values).min() < 1e-12:
        raise ValueError("canonical form needs nonvanishing entries")
    best = None
    for r in range(c.dimension):
        w = np.roll(c.values, -r)
        w = w / w[0]
        key = tuple((round(z.real, decimals), round(z.imag, decimals)) for z in w)
        if best is None or key < best:
            best = key
    return best
