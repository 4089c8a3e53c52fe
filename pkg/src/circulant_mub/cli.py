"""Verification command line.

Subcommands
    build    construct a mutually unbiased family and serialize it
    verify   family unbiasedness plus the structural matrix identities
    gauss    Gauss sum identities: identity | reciprocity | even | trace | powersums
    seq      bi-unimodularity verdicts for Gauss sequences
    search   exhaustive bi-unimodular search over a root-of-unity alphabet
    sweep    the full battery (verify + gauss identities) over a range

Reports are deterministic for a fixed configuration: records are sorted by
(check, case) before emission, whatever the parallelism.  Exit codes:
0 all checks passed, 1 at least one check failed, 2 usage error.

The --tol flag (or the MUB_DEFAULT_TOL environment variable) sets the
tolerance base; matrix identity checks scale it by sqrt(d), scalar Gauss
sum checks use it as an absolute bound.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .gauss import (
    gauss_identity_sweep,
    gauss_sum_direct,
    gauss_sum_reciprocity,
    GaussSumSpec,
    is_prime,
    smallest_nontrivial_divisor,
    verify_even_gauss,
    verify_rotation_power_sums,
    verify_triangular_trace,
)
from .linalg import (
    adjoint,
    as_matrix,
    build_clock,
    build_fourier,
    build_index_reversal,
    build_phased_fourier,
    build_rotation,
    build_shift,
    build_triangular_diagonal,
    circulant_power,
    default_tolerance,
    is_unitary_hadamard,
    multiply,
    power,
    rotation_scalar,
    set_dense_cap,
)
from .mub import Recipe, build_family, negative_check_even, verify_family
from .phase_ring import root_table
from .sequences import canonical_form, exhaustive_biunimodular, gauss_sequence, is_biunimodular

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2

SCHEMA = "mub-report/1"
DEFAULT_TOL_BASE = 1e-9
TOL_ENV_VAR = "MUB_DEFAULT_TOL"


class UsageError(Exception):
    pass


@dataclass
class Record:
    check: str
    case: dict
    passed: bool | None  # None marks an informational record
    deviation: float | None = None
    tolerance: float | None = None
    detail: str = ""
    elapsed_s: float = 0.0

    def case_text(self) -> str:
        return " ".join(f"{k}={v}" for k, v in self.case.items())

    def sort_key(self):
        parts = []
        for key, value in self.case.items():
            if isinstance(value, (int, float)):
                parts.append((key, 0, float(value), ""))
            else:
                parts.append((key, 1, 0.0, str(value)))
        return (self.check, tuple(parts))

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "case": self.case,
            "passed": self.passed,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "detail": self.detail,
            "elapsed_s": round(self.elapsed_s, 6),
        }


@dataclass
class RunConfig:
    command: str
    tolerance_base: float
    parallelism: int
    dense_cap: int
    fmt: str
    output: str | None
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "tolerance_base": self.tolerance_base,
            "parallelism": self.parallelism,
            "dense_cap": self.dense_cap,
            "format": self.fmt,
            "output": self.output,
            **self.params,
        }


@dataclass
class ReportDocument:
    command: str
    config: RunConfig
    records: list[Record]
    elapsed_s: float
    payload: dict | None = None  # extra document body (build serializations)

    def summary(self) -> dict:
        passed = sum(1 for r in self.records if r.passed is True)
        failed = sum(1 for r in self.records if r.passed is False)
        info = sum(1 for r in self.records if r.passed is None)
        return {
            "total": len(self.records),
            "passed": passed,
            "failed": failed,
            "informational": info,
        }

    def to_json(self) -> dict:
        doc = {
            "schema": SCHEMA,
            "version": __version__,
            "command": self.command,
            "config": self.config.to_json(),
            "records": [r.to_json() for r in self.records],
            "summary": self.summary(),
            "elapsed_s": round(self.elapsed_s, 6),
        }
        if self.payload is not None:
            doc.update(self.payload)
        return doc


# ---------------------------------------------------------------------------
# argument handling


def parse_span(text: str) -> range:
    """'7' -> 7..7, '2..30' -> 2..30 (inclusive bounds)."""
    try:
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise UsageError(f"malformed span {text!r}, expected N or A..B") from exc
    if lo > hi:
        raise UsageError(f"empty span {text!r} (lower bound exceeds upper)")
    return range(lo, hi + 1)


def _resolve_tol(value: float | None) -> float:
    if value is not None:
        base = value
    else:
        env = os.environ.get(TOL_ENV_VAR)
        if env is None:
            return DEFAULT_TOL_BASE
        try:
            base = float(env)
        except ValueError as exc:
            raise UsageError(f"{TOL_ENV_VAR}={env!r} is not a number") from exc
    if not base > 0 or not math.isfinite(base):
        raise UsageError(f"tolerance must be a positive finite number, got {base}")
    return base


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance base (default 1e-9, or MUB_DEFAULT_TOL)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", default=None, help="write the report to this file instead of stdout")
    common.add_argument("--parallelism", type=int, default=1, help="worker threads for independent checks")
    common.add_argument("--dense-cap", type=int, default=512, help="largest dimension materialized densely")

    parser = argparse.ArgumentParser(
        prog="circulant-mub",
        description="Construct and verify mutually unbiased bases built from circulant matrices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="construct one family and serialize it")
    p.add_argument("--dim", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="verify families and matrix identities")
    p.add_argument("--dims", required=True, help="dimension span, e.g. 2..30")
    p.add_argument(
        "--expect-negative",
        choices=("r-squared",),
        default=None,
        help="require the even-dimension rotation-square defect to be detected",
    )

    p = sub.add_parser("gauss", parents=[common], help="Gauss sum identities")
    p.add_argument("mode", choices=("identity", "reciprocity", "even", "trace", "powersums"))
    p.add_argument("--d", dest="d_span", default=None, help="modulus/dimension span")
    p.add_argument("--l", dest="l_span", default=None, help="multiplier span (identity mode)")
    p.add_argument("--a", dest="a_span", default=None, help="leading coefficient span (reciprocity mode)")
    p.add_argument("--b", dest="b_span", default=None, help="linear coefficient span (reciprocity mode)")
    p.add_argument("--k", dest="k_span", default=None, help="power span (trace and powersums modes)")
    p.add_argument("--m", dest="m_span", default=None, help="offset span (powersums mode)")
    p.add_argument(
        "--allow-noncoprime",
        action="store_true",
        help="probe non-coprime multipliers informationally instead of rejecting them",
    )

    p = sub.add_parser("seq", parents=[common], help="sequence-level checks")
    p.add_argument("mode", choices=("gauss",))
    p.add_argument("--d", dest="d_span", required=True, help="odd dimension span")
    p.add_argument("--k", dest="k_span", default=None, help="multiplier span (default 1..d-1)")

    p = sub.add_parser("search", parents=[common], help="exhaustive bi-unimodular search")
    p.add_argument("--d", dest="dim", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True, help="order of the root-of-unity alphabet")

    p = sub.add_parser("sweep", parents=[common], help="full battery over a dimension span")
    p.add_argument("--dims", required=True, help="dimension span, e.g. 2..20")

    return parser


# ---------------------------------------------------------------------------
# record production


def _timed(records: list[Record], started: float) -> list[Record]:
    elapsed = time.perf_counter() - started
    for record in records:
        record.elapsed_s = elapsed
    return records


def _expected_family_size(d: int, recipe: Recipe) -> int:
    if recipe in (Recipe.D_TWO, Recipe.EVEN):
        return 3
    if recipe is Recipe.PRIME:
        return d + 1
    return smallest_nontrivial_divisor(d) + 1


def _structural_records(d: int, base_tol: float) -> list[Record]:
    tol = default_tolerance(d, base_tol)
    table = root_table(d)
    omega = complex(table.values[2 % (2 * d)])
    fourier = build_fourier(d)
    clock = build_clock(d).to_dense()
    shift = build_shift(d).to_dense()
    records = []

    dev = float(np.abs(shift @ clock - omega * (clock @ shift)).max())
    records.append(Record("clock-shift-commutation", {"d": d}, dev <= tol, dev, tol))

    dev = float(np.abs(multiply(multiply(adjoint(fourier), shift), fourier).entries - clock).max())
    records.append(Record("fourier-diagonalizes-shift", {"d": d}, dev <= tol, dev, tol))

    f2 = multiply(fourier, fourier).entries
    dev = float(np.abs(f2 - build_index_reversal(d).entries).max())
    records.append(Record("fourier-square-is-reversal", {"d": d}, dev <= tol, dev, tol))

    dev = float(np.abs(f2 @ f2 - np.eye(d)).max())
    records.append(Record("fourier-order-four", {"d": d}, dev <= tol, dev, tol))

    if d % 2 and is_prime(d):
        alpha = rotation_scalar(d)
        rotation = build_rotation(d).to_dense()
        diag = build_triangular_diagonal(d)
        rhs = alpha * multiply(multiply(fourier, diag), adjoint(fourier)).entries
        dev = float(np.abs(rotation - rhs).max())
        records.append(Record("rotation-diagonalization", {"d": d}, dev <= tol, dev, tol))

        dev = float(np.abs(rotation @ clock @ rotation.conj().T - shift @ clock).max())
        records.append(Record("rotation-clock-conjugation", {"d": d}, dev <= tol, dev, tol))

        dev = float(np.abs(power(rotation, d).entries - alpha**d * np.eye(d)).max())
        records.append(Record("rotation-order", {"d": d}, dev <= tol, dev, tol))

        f2_mat = f2
        sample = sorted({1, 2, d - 2, d - 1} & set(range(1, d)))
        for k in sample:
            r_k = power(rotation, k).entries
            lhs = r_k @ clock @ r_k.conj().T
            rhs = power(shift, k).entries @ clock
            dev = float(np.abs(lhs - rhs).max())
            records.append(
                Record("rotation-power-clock", {"d": d, "k": k}, dev <= tol, dev, tol)
            )
            lhs = build_phased_fourier(d, k).entries
            rhs = alpha**k * (adjoint(fourier).entries @ power(rotation, -k).entries @ f2_mat)
            dev = float(np.abs(lhs - rhs).max())
            records.append(
                Record("phased-fourier-identity", {"d": d, "k": k}, dev <= tol, dev, tol)
            )
    return records


def _family_records(d: int, base_tol: float) -> list[Record]:
    tol = default_tolerance(d, base_tol)
    family = build_family(d)
    report = verify_family(family, tol)
    expected = _expected_family_size(d, family.recipe)
    records = [
        Record(
            "family-size",
            {"d": d},
            len(family.bases) == expected,
            detail=f"recipe={family.recipe.value} bases={len(family.bases)} expected={expected}",
        )
    ]
    for pair in report.pairs:
        records.append(
            Record(
                "pair-unbiased",
                {"d": d, "pair": f"{pair.label_a}|{pair.label_b}"},
                pair.passed,
                pair.deviation,
                tol,
            )
        )
    return records


def _coprimality_records(d: int, base_tol: float) -> list[Record]:
    # odd composite: rotation powers are Hadamard exactly at coprime exponents
    tol = default_tolerance(d, base_tol)
    rotation = build_rotation(d)
    wrong = []
    for k in range(1, d):
        dense = circulant_power(rotation, k).to_dense()
        verdict = is_unitary_hadamard(dense, tol).passed
        if verdict != (math.gcd(k, d) == 1):
            wrong.append(k)
    detail = f"k=1..{d - 1}" + (f" mismatches at {wrong}" if wrong else "")
    return [
        Record(
            "rotation-power-hadamard-iff-coprime",
            {"d": d},
            not wrong,
            tolerance=tol,
            detail=detail,
        )
    ]


def _negative_records(d: int, base_tol: float) -> list[Record]:
    tol = default_tolerance(d, base_tol)
    check = negative_check_even(d, tol)
    detail = (
        f"unitary_dev={check.unitary.deviation:.3e} circulant_dev={check.circulant_dev:.3e} "
        f"entry moduli in [{check.modulus_min:.6f}, {check.modulus_max:.6f}] "
        f"vs required {1 / math.sqrt(d):.6f}"
    )
    return [
        Record(
            "rotation-square-not-hadamard",
            {"d": d},
            check.passed,
            check.hadamard.deviation,
            tol,
            detail,
        )
    ]


def _verify_tasks(dims: range, base_tol: float) -> list:
    if dims.start < 2:
        raise UsageError(f"verification needs dimensions >= 2, got span starting at {dims.start}")

    def make(d: int):
        def task() -> list[Record]:
            started = time.perf_counter()
            records = _family_records(d, base_tol)
            records.extend(_structural_records(d, base_tol))
            if d % 2 and d >= 3 and not is_prime(d):
                records.extend(_coprimality_records(d, base_tol))
            if d % 2 == 0 and d >= 4:
                records.extend(_negative_records(d, base_tol))
            return _timed(records, started)

        return task

    return [make(d) for d in dims]


def _gauss_identity_tasks(
    dims: range, l_span: range | None, allow_noncoprime: bool, base_tol: float
) -> list:
    odd_dims = [d for d in dims if d % 2 and d >= 3]
    if not odd_dims:
        raise UsageError("identity mode needs at least one odd dimension >= 3 in --d")

    def make(d: int):
        multipliers = list(l_span) if l_span is not None else [
            l for l in range(1, d) if math.gcd(l, d) == 1
        ]

        def task() -> list[Record]:
            started = time.perf_counter()
            records = []
            for l in multipliers:
                coprime = math.gcd(l, d) == 1
                if not coprime and not allow_noncoprime:
                    raise UsageError(
                        f"l={l} is not coprime with d={d}; pass --allow-noncoprime to probe it"
                    )
                if coprime:
                    dev = float(gauss_identity_sweep(d, l).max())
                    records.append(
                        Record(
                            "gauss-identity",
                            {"d": d, "l": l},
                            dev <= base_tol,
                            dev,
                            base_tol,
                            detail="max over all shifts j",
                        )
                    )
                else:
                    table = root_table(d)
                    k = np.arange(d, dtype=np.int64)
                    t = (l * k * (k + 1))[None, :] + 2 * np.outer(np.arange(d, dtype=np.int64), k)
                    sums = np.abs(table.values[t % (2 * d)].sum(axis=1))
                    records.append(
                        Record(
                            "gauss-identity-probe",
                            {"d": d, "l": l},
                            None,
                            detail=(
                                f"gcd={math.gcd(l, d)}; |sum| over shifts ranges "
                                f"[{sums.min():.6f}, {sums.max():.6f}], sqrt(d)={math.sqrt(d):.6f}"
                            ),
                        )
                    )
            return _timed(records, started)

        return task

    return [make(d) for d in odd_dims]


def _gauss_reciprocity_tasks(a_span: range, d_span: range, b_span: range | None, base_tol: float) -> list:
    if a_span.start < 1:
        raise UsageError("reciprocity mode sweeps a >= 1")
    if d_span.start < 1:
        raise UsageError("reciprocity mode sweeps d >= 1")

    def make(a: int, d: int):
        def task() -> list[Record]:
            started = time.perf_counter()
            b_values = [
                b
                for b in (b_span if b_span is not None else range(-2 * d, 2 * d + 1))
                if (a * d + b) % 2 == 0
            ]
            worst = 0.0
            for b in b_values:
                spec = GaussSumSpec(a, b, d)
                direct = gauss_sum_direct(spec)
                via = gauss_sum_reciprocity(spec)
                worst = max(worst, abs(direct - via))
            record = Record(
                "reciprocity-consistency",
                {"a": a, "d": d},
                worst <= base_tol,
                worst,
                base_tol,
                detail=f"{len(b_values)} parity-valid b values",
            )
            return _timed([record], started)

        return task

    return [make(a, d) for a in a_span for d in d_span]


def _gauss_even_tasks(dims: range, base_tol: float) -> list:
    even_dims = [d for d in dims if d % 2 == 0 and d >= 2]
    if not even_dims:
        raise UsageError("even mode needs at least one even dimension >= 2 in --d")

    def make(d: int):
        def task() -> list[Record]:
            started = time.perf_counter()
            dev = verify_even_gauss(d)
            return _timed(
                [Record("even-gauss-sum", {"d": d}, dev <= base_tol, dev, base_tol)], started
            )

        return task

    return [make(d) for d in even_dims]


def _gauss_trace_tasks(dims: range, k_span: range | None, base_tol: float) -> list:
    odd_dims = [d for d in dims if d % 2 and d >= 3]
    if not odd_dims:
        raise UsageError("trace mode needs at least one odd dimension >= 3 in --d")

    def make(d: int):
        def task() -> list[Record]:
            started = time.perf_counter()
            ks = [
                k
                for k in (k_span if k_span is not None else range(1, d))
                if math.gcd(k, d) == 1
            ]
            if not ks:
                raise UsageError(f"no multiplier coprime with d={d} in --k")
            worst = max(verify_triangular_trace(d, k) for k in ks)
            record = Record(
                "triangular-trace",
                {"d": d},
                worst <= base_tol,
                worst,
                base_tol,
                detail=f"max over {len(ks)} coprime powers",
            )
            return _timed([record], started)

        return task

    return [make(d) for d in odd_dims]


def _gauss_powersums_tasks(dims: range, k_span: range | None, m_span: range | None, base_tol: float) -> list:
    primes = [d for d in dims if d % 2 and is_prime(d)]
    if not primes:
        raise UsageError("powersums mode needs at least one odd prime in --d")

    def make(d: int):
        def task() -> list[Record]:
            started = time.perf_counter()
            ks = list(k_span) if k_span is not None else list(range(1, d))
            ms = list(m_span) if m_span is not None else list(range(-2, 3))
            worst = 0.0
            for k in ks:
                for m in ms:
                    dev_d, dev_k = verify_rotation_power_sums(d, k, m)
                    worst = max(worst, dev_d, dev_k)
            record = Record(
                "rotation-power-sums",
                {"d": d},
                worst <= base_tol,
                worst,
                base_tol,
                detail=f"{len(ks)} powers x {len(ms)} offsets, both moduli",
            )
            return _timed([record], started)

        return task

    return [make(d) for d in primes]


def _seq_tasks(dims: range, k_span: range | None, base_tol: float) -> list:
    odd_dims = [d for d in dims if d % 2 and d >= 3]
    if not odd_dims:
        raise UsageError("seq gauss needs at least one odd dimension >= 3 in --d")

    def make(d: int):
        def task() -> list[Record]:
            started = time.perf_counter()
            tol = default_tolerance(d, base_tol)
            records = []
            for k in k_span if k_span is not None else range(1, d):
                report = is_biunimodular(gauss_sequence(d, k), tol)
                expected = math.gcd(k, d) == 1
                verdict = report.passed
                if expected:
                    detail = f"expected bi-unimodular (gcd=1), worst deviation {report.deviation:.3e}"
                else:
                    detail = (
                        f"expected not bi-unimodular (gcd={math.gcd(k, d)}); "
                        f"|dft| moduli range [{report.freq_moduli.min():.6f}, "
                        f"{report.freq_moduli.max():.6f}]"
                    )
                records.append(
                    Record(
                        "gauss-sequence-biunimodular",
                        {"d": d, "k": k},
                        verdict == expected,
                        report.deviation,
                        tol,
                        detail,
                    )
                )
            return _timed(records, started)

        return task

    return [make(d) for d in odd_dims]


def _search_records(d: int, alphabet: int, base_tol: float) -> list[Record]:
    started = time.perf_counter()
    tol = default_tolerance(d, base_tol)
    try:
        hits = exhaustive_biunimodular(d, alphabet, tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    orbits: dict[tuple, list] = {}
    for hit in hits:
        orbits.setdefault(canonical_form(hit), []).append(hit)
    records = []
    for index, key in enumerate(sorted(orbits)):
        members = orbits[key]
        rep = ", ".join(f"{re:+.6f}{im:+.6f}j" for re, im in key)
        exps = _alphabet_exponents(key, alphabet)
        detail = f"representative [{rep}] | members {len(members)}"
        if exps is not None:
            detail += f" | exponents of e(2*pi*i/{alphabet}): {exps}"
        records.append(
            Record(
                "search-orbit",
                {"d": d, "alphabet": alphabet, "orbit": index},
                None,
                detail=detail,
            )
        )
    records.append(
        Record(
            "search-total",
            {"d": d, "alphabet": alphabet},
            None,
            detail=f"{len(hits)} bi-unimodular sequences in {len(orbits)} orbits "
            f"out of {alphabet**d} candidates",
        )
    )
    return _timed(records, started)


def _alphabet_exponents(key: tuple, alphabet: int) -> str | None:
    exponents = []
    for re, im in key:
        angle = math.atan2(im, re) % (2 * math.pi)
        k = angle * alphabet / (2 * math.pi)
        nearest = round(k) % alphabet
        value = complex(math.cos(2 * math.pi * nearest / alphabet), math.sin(2 * math.pi * nearest / alphabet))
        if abs(value - complex(re, im)) > 1e-6:
            return None
        exponents.append(str(nearest))
    return ",".join(exponents)


def _run_tasks(tasks: list, parallelism: int) -> list[Record]:
    if parallelism < 1:
        raise UsageError(f"--parallelism must be >= 1, got {parallelism}")
    if parallelism == 1 or len(tasks) <= 1:
        groups = [task() for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            groups = list(pool.map(lambda task: task(), tasks))
    records = [record for group in groups for record in group]
    records.sort(key=Record.sort_key)
    return records


# ---------------------------------------------------------------------------
# build serialization


def _matrix_payload(label: str, matrix, d: int) -> dict:
    entries = as_matrix(matrix)
    moduli = np.abs(entries)
    hadamard_scale = 1.0 / math.sqrt(d)
    if np.abs(moduli - hadamard_scale).max() <= default_tolerance(d, 1e-12):
        scale = hadamard_scale
    else:
        scale = 1.0
    scaled = entries / scale
    return {
        "label": label,
        "scale": scale,
        "entries": [[[z.real, z.imag] for z in row] for row in scaled],
    }


def _build_payload(d: int, base_tol: float) -> tuple[list[Record], dict]:
    started = time.perf_counter()
    family = build_family(d)
    tol = default_tolerance(d, base_tol)
    report = verify_family(family, tol)
    records = [
        Record(
            "family-size",
            {"d": d},
            len(family.bases) == _expected_family_size(d, family.recipe),
            detail=f"recipe={family.recipe.value} bases={len(family.bases)}",
        )
    ]
    for pair in report.pairs:
        records.append(
            Record(
                "pair-unbiased",
                {"d": d, "pair": f"{pair.label_a}|{pair.label_b}"},
                pair.passed,
                pair.deviation,
                tol,
            )
        )
    payload = {
        "family": {
            "dimension": d,
            "recipe": family.recipe.value,
            "bases": [_matrix_payload(label, basis, d) for label, basis in family.bases],
        }
    }
    return _timed(records, started), payload


# ---------------------------------------------------------------------------
# output


def _render_text(doc: ReportDocument) -> str:
    lines = [
        f"schema={SCHEMA} version={__version__} command={doc.command}",
        "config: "
        + " ".join(f"{k}={v}" for k, v in doc.config.to_json().items() if v is not None),
    ]
    if doc.payload and "family" in doc.payload:
        fam = doc.payload["family"]
        lines.append(f"family: d={fam['dimension']} recipe={fam['recipe']} bases={len(fam['bases'])}")
        for basis in fam["bases"]:
            entries = np.array([[complex(re, im) for re, im in row] for row in basis["entries"]])
            lines.append(f"  {basis['label']} (scale {basis['scale']:.9g}):")
            body = np.array2string(entries, precision=6, suppress_small=True, max_line_width=120)
            lines.extend("    " + line for line in body.splitlines())
    if doc.records:
        lines.append(f"{'status':6} {'check':38} {'case':24} {'deviation':>12} {'tolerance':>12}")
        for r in doc.records:
            status = "pass" if r.passed else "FAIL" if r.passed is False else "info"
            dev = f"{r.deviation:.3e}" if r.deviation is not None else "-"
            tol = f"{r.tolerance:.3e}" if r.tolerance is not None else "-"
            line = f"{status:6} {r.check:38} {r.case_text():24} {dev:>12} {tol:>12}"
            if r.detail:
                line += f"  {r.detail}"
            lines.append(line)
    s = doc.summary()
    lines.append(
        f"summary: {s['total']} checks | {s['passed']} passed | {s['failed']} failed | "
        f"{s['informational']} informational | {doc.elapsed_s:.2f}s"
    )
    return "\n".join(lines) + "\n"


def _render_csv(doc: ReportDocument) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    if doc.payload and "family" in doc.payload:
        writer.writerow(["basis", "row", "col", "re", "im"])
        for basis in doc.payload["family"]["bases"]:
            scale = basis["scale"]
            for i, row in enumerate(basis["entries"]):
                for j, (re, im) in enumerate(row):
                    writer.writerow([basis["label"], i, j, repr(re * scale), repr(im * scale)])
    else:
        writer.writerow(["check", "case", "passed", "deviation", "tolerance", "elapsed_s", "detail"])
        for r in doc.records:
            writer.writerow(
                [
                    r.check,
                    r.case_text(),
                    "" if r.passed is None else str(r.passed).lower(),
                    "" if r.deviation is None else repr(r.deviation),
                    "" if r.tolerance is None else repr(r.tolerance),
                    round(r.elapsed_s, 6),
                    r.detail,
                ]
            )
    return buffer.getvalue()


def _emit(doc: ReportDocument, fmt: str, output: str | None) -> None:
    if fmt == "json":
        text = json.dumps(doc.to_json(), indent=2) + "\n"
    elif fmt == "csv":
        text = _render_csv(doc)
    else:
        text = _render_text(doc)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# dispatch


def _dispatch(args, base_tol: float) -> tuple[list[Record], dict | None]:
    set_dense_cap(args.dense_cap)
    payload = None

    if args.command == "build":
        if args.dim < 2:
            raise UsageError(f"--dim must be >= 2, got {args.dim}")
        records, payload = _build_payload(args.dim, base_tol)
    elif args.command == "verify":
        dims = parse_span(args.dims)
        if args.expect_negative == "r-squared" and not any(
            d % 2 == 0 and d >= 4 for d in dims
        ):
            raise UsageError("--expect-negative r-squared needs an even dimension >= 4 in --dims")
        records = _run_tasks(_verify_tasks(dims, base_tol), args.parallelism)
    elif args.command == "gauss":
        if args.d_span is None:
            raise UsageError("gauss requires --d")
        dims = parse_span(args.d_span)
        l_span = parse_span(args.l_span) if args.l_span else None
        k_span = parse_span(args.k_span) if args.k_span else None
        m_span = parse_span(args.m_span) if args.m_span else None
        if args.mode == "identity":
            tasks = _gauss_identity_tasks(dims, l_span, args.allow_noncoprime, base_tol)
        elif args.mode == "reciprocity":
            a_span = parse_span(args.a_span) if args.a_span else range(1, 21)
            b_span = parse_span(args.b_span) if args.b_span else None
            tasks = _gauss_reciprocity_tasks(a_span, dims, b_span, base_tol)
        elif args.mode == "even":
            tasks = _gauss_even_tasks(dims, base_tol)
        elif args.mode == "trace":
            tasks = _gauss_trace_tasks(dims, k_span, base_tol)
        else:
            tasks = _gauss_powersums_tasks(dims, k_span, m_span, base_tol)
        records = _run_tasks(tasks, args.parallelism)
    elif args.command == "seq":
        dims = parse_span(args.d_span)
        k_span = parse_span(args.k_span) if args.k_span else None
        records = _run_tasks(_seq_tasks(dims, k_span, base_tol), args.parallelism)
    elif args.command == "search":
        records = _search_records(args.dim, args.alphabet, base_tol)
    elif args.command == "sweep":
        dims = parse_span(args.dims)
        tasks = _verify_tasks(dims, base_tol)
        if any(d % 2 and d >= 3 for d in dims):
            tasks.extend(_gauss_identity_tasks(dims, None, False, base_tol))
            tasks.extend(_gauss_trace_tasks(dims, None, base_tol))
        if any(d % 2 == 0 for d in dims):
            tasks.extend(_gauss_even_tasks(dims, base_tol))
        records = _run_tasks(tasks, args.parallelism)
    else:  # pragma: no cover - argparse enforces the choices
        raise UsageError(f"unknown command {args.command!r}")
    return records, payload


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        base_tol = _resolve_tol(args.tol)
        records, payload = _dispatch(args, base_tol)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc = ReportDocument(
        command=args.command,
        config=RunConfig(
            command=args.command,
            tolerance_base=base_tol,
            parallelism=args.parallelism,
            dense_cap=args.dense_cap,
            fmt=args.fmt,
            output=args.output,
            params=_echo_params(args),
        ),
        records=records,
        elapsed_s=time.perf_counter() - started,
        payload=payload,
    )
    _emit(doc, args.fmt, args.output)
    failed = any(record.passed is False for record in doc.records)
    return EXIT_FAILURES if failed else EXIT_OK


def _echo_params(args) -> dict:
    skip = {"tol", "fmt", "output", "parallelism", "dense_cap", "command"}
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in skip and value is not None
    }


def entry() -> None:  # console script hook
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
