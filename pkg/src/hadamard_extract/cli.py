"""Command-line entry point: ``hadamard-extract <command> [options]``.

Commands
    matrix-verify    exact binomial-matrix identities over a (K, delta) grid
    mellin-table     M(f) and M'(f) at the integers of a range
    extract          the Hadamard coefficient V^K of box - c from the flat oracle
    wavefront-scan   windowed Fourier magnitudes per direction angle

Settings come from the defaults of :class:`RunConfig`, then a flat TOML file
(``--config``), then command-line flags. Floats are written with 17
significant digits so that identical configurations give byte-identical
output. The exit code is 0 exactly when every row passes.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

import numpy as np

from .combinatorics import (Placeholders, RationalMatrix, build_lemma_d_matrices, in1_inverse, in1_matrix,
                            in2_inverse, in2_matrix, powercoeff, wfinal_extract)
from .extraction import PipelineError, PipelineGrid, SGrid, hadamard_report
from .mellin import BumpFunction, UncancelledPoleError, mellin_continued, mellin_prime
from .minkowski import classify, windowed_fourier

COMMANDS = ("matrix-verify", "mellin-table", "extract", "wavefront-scan")
FAMILIES = ("canonical", "perturbed", "even", "shifted")


@dataclass
class RunConfig:
    """All settings of one run. Field names double as TOML keys."""

    command: str = "matrix-verify"
    d: int = 4
    c: float = 0.0
    K: int = 1
    o: int = 0
    # matrix-verify
    k_max: int = 6
    o_max: int = 3
    deltas: list = field(default_factory=lambda: ["-2", "-1/2", "0", "1", "7/3"])
    inject: str = ""
    # test function
    family: str = "canonical"
    eps: float = 0.1
    # mellin-table
    lo: int = -6
    hi: int = 6
    # extraction grid
    s0: float = 4.0
    s_count: int = 32
    z_nodes: int = 32
    z_scale: float = 40.0
    fit_terms: int = 12
    rel_tol: float = 1e-6
    abs_tol: float = 1e-8
    # wavefront-scan
    angles: list = field(default_factory=lambda: [0.0, 55.0, 65.0, 75.0, 85.0, 95.0, 105.0, 115.0, 125.0])
    azimuth: float = 53.13010235415598
    lambda_min: float = 1.0
    lambda_max: float = 20.0
    lambda_count: int = 20
    quad_tol: float = 1e-10
    wf_threshold: float = 1e-8
    control_threshold: float = 1e-4
    max_panels: int = 160
    # output
    out: str = ""
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {', '.join(FAMILIES)}")
        for name in ("K", "o", "k_max", "o_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.command == "wavefront-scan" and self.d not in (2, 3):
            raise ValueError("wavefront-scan needs d in {2, 3}")
        if self.command == "extract" and self.d < 3:
            raise ValueError("extract needs d >= 3")
        self.deltas = [str(Fraction(str(x))) for x in self.deltas]
        return self

    def bump(self) -> BumpFunction:
        if self.family == "canonical":
            return BumpFunction.canonical()
        if self.family == "perturbed":
            return BumpFunction.perturbed(Fraction(str(self.eps)))
        if self.family == "even":
            return BumpFunction.standard(0.0, 1.0, (1,))
        return BumpFunction.standard(0.25, 1.0, (1, 1))


def load_config(argv=None) -> RunConfig:
    parser = argparse.ArgumentParser(prog="hadamard-extract", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat TOML file with RunConfig keys")
    parser.add_argument("--d", type=int)
    parser.add_argument("--c", type=float)
    parser.add_argument("--K", type=int)
    parser.add_argument("--o", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"))
    args = parser.parse_args(argv)
    values = {}
    if args.config:
        with open(args.config, "rb") as fh:
            values.update(tomllib.load(fh))
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in ("d", "c", "K", "o", "out", "format"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    values["command"] = args.command
    try:
        return RunConfig(**values).validate()
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))


# ---------------------------------------------------------------------------
# formatting


def fmt(x) -> str:
    """17 significant digits for floats, exact text for everything else."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x + 0.0, ".17g")  # + 0.0 turns -0.0 into 0.0
    if isinstance(x, complex):
        re, im = x.real + 0.0, x.imag + 0.0
        return format(re, ".17g") if im == 0 else f"{re:.17g}{im:+.17g}j"
    return "" if x is None else str(x)


def render(config: RunConfig, columns: list, rows: list, ok: bool) -> str:
    if config.format == "json":
        doc = {"config": dataclasses.asdict(config),
               "rows": [{k: fmt(r.get(k)) for k in columns} for r in rows],
               "status": "pass" if ok else "fail"}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(k)) for k in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def _parse_injection(text: str):
    """``"check,K,delta,i,j"`` -> tuple; the named check gets one entry corrupted."""
    if not text:
        return None
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5 or parts[0] not in ("lemma_d", "in1", "in2", "wfinal"):
        raise ValueError("inject must look like 'lemma_d|in1|in2|wfinal,K,delta,i,j'")
    return parts[0], int(parts[1]), Fraction(parts[2]), int(parts[3]), int(parts[4])


def _corrupt(M: RationalMatrix, i: int, j: int) -> RationalMatrix:
    rows = [list(r) for r in M.rows]
    rows[i][j] = rows[i][j] + 1
    return RationalMatrix(rows)


def cmd_matrix_verify(config: RunConfig):
    inject = _parse_injection(config.inject)
    columns = ["K", "delta", "lemma_d", "in1", "in2", "wfinal", "status", "mismatches"]
    rows = []
    for K in range(config.k_max + 1):
        for delta in (Fraction(x) for x in config.deltas):
            hit = inject if inject and inject[1] == K and inject[2] == delta else None
            bad = {}

            def compare(name, left, right):
                if hit and hit[0] == name:
                    left = _corrupt(left, hit[3], hit[4])
                coords = left.mismatches(right)
                if coords:
                    bad.setdefault(name, []).extend(coords)

            A, B, C = build_lemma_d_matrices(K, delta)
            compare("lemma_d", A @ B, C)
            I = RationalMatrix.identity(K + 1)
            compare("in1", in1_matrix(K, delta) @ in1_inverse(K, delta), I)
            for o in range(config.o_max + 1):
                mp = Placeholders()
                compare("in2", in2_matrix(K, o, delta, mp) @ in2_inverse(K, o, delta, mp), I)
                # W_{l,n} with distinct entries; L is generated from it and W_{K,0} recovered
                W = {(l, n): Fraction(3 * l + 7 * n + 1, n + 2) for l in range(K + 1) for n in range(K + 1)}
                d = 2 * delta + 2 + 2 * o
                L = {m: powercoeff(W, K, m + o, d, mp) for m in range(K + 1)}
                got = RationalMatrix([[wfinal_extract(L, K, o, delta, mp)]])
                compare("wfinal", got, RationalMatrix([[W[(K, 0)]]]))
            row = {"K": K, "delta": str(delta)}
            for name in ("lemma_d", "in1", "in2", "wfinal"):
                row[name] = "fail" if name in bad else "pass"
            row["status"] = "fail" if bad else "pass"
            row["mismatches"] = ";".join(f"{n}({i},{j})" for n, cs in bad.items() for i, j in sorted(set(cs)))
            rows.append(row)
    return columns, rows, all(r["status"] == "pass" for r in rows)


def cmd_mellin_table(config: RunConfig):
    f = config.bump()
    columns = ["alpha", "kind", "mellin", "residue", "mellin_prime", "flag"]
    rows = []
    for n in range(config.lo, config.hi + 1):
        mv = mellin_continued(f, n)
        row = {"alpha": n, "kind": mv.kind}
        if mv.is_pole:
            row["mellin"] = mv.finite_part.real
            row["residue"] = mv.residue.real
        else:
            row["mellin"] = complex(mv.value).real
        try:
            row["mellin_prime"] = float(np.real(mellin_prime(f, n)))
            row["flag"] = "finite"
        except UncancelledPoleError:
            row["flag"] = "pole"
        rows.append(row)
    return columns, rows, True


def cmd_extract(config: RunConfig):
    columns = ["d", "c", "K", "o", "value", "reference", "error", "error_kind",
               "max_condition", "max_residual", "stage", "status"]
    grid = PipelineGrid(SGrid(config.s0, 0.75, config.s_count), config.z_nodes, config.z_scale,
                        fit_terms=config.fit_terms)
    row = {"d": config.d, "c": float(config.c), "K": config.K, "o": config.o}
    try:
        rep = hadamard_report(config.c, config.K, config.o, config.d, config.bump(), grid)
    except PipelineError as exc:
        row.update(stage=exc.stage, status="fail", error_kind=str(exc))
        return columns, [row], False
    ref = complex(rep.reference)
    err = abs(rep.value - ref)
    if ref != 0:
        err, kind, ok = err / abs(ref), "relative", err / abs(ref) <= config.rel_tol
    else:
        kind, ok = "absolute", err <= config.abs_tol
    row.update(value=complex(rep.value), reference=ref, error=float(err), error_kind=kind,
               max_condition=max(rep.conditions), max_residual=max(rep.residuals),
               stage="done", status="pass" if ok else "fail")
    return columns, [row], ok


def direction(theta_deg: float, d: int, azimuth_deg: float = 0.0) -> np.ndarray:
    """Unit vector at angle ``theta`` from ``e0``; in d = 3 the spatial part is turned by ``azimuth``."""
    th, ph = math.radians(theta_deg), math.radians(azimuth_deg)
    xi = np.zeros(d)
    xi[0] = math.cos(th)
    if d == 2:
        xi[1] = math.sin(th)
    else:
        xi[1], xi[2] = math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph)
    return xi


WAVEFRONT_PROFILE = BumpFunction.standard(2.0, 1.9)


def cmd_wavefront_scan(config: RunConfig):
    columns = ["theta_deg", "class", "max_abs", "error_estimate", "converged", "panels", "requirement", "status"]
    lambdas = np.linspace(config.lambda_min, config.lambda_max, config.lambda_count)
    rows = []
    for theta in config.angles:
        xi = direction(float(theta), config.d, config.azimuth)
        cls = classify(xi).value
        row = {"theta_deg": float(theta), "class": cls}
        if cls == "lightlike" or (cls == "timelike" and abs(float(theta)) > 1e-12):
            row.update(requirement="unsupported", status="fail")
            rows.append(row)
            continue
        try:
            res = windowed_fourier(WAVEFRONT_PROFILE, xi, lambdas, config.d, tol=config.quad_tol,
                                   max_panels=config.max_panels, symmetric=False)
        except ValueError as exc:
            row.update(requirement=str(exc), status="fail")
            rows.append(row)
            continue
        if cls == "spacelike":
            req = f"<= {config.wf_threshold:g}"
            ok = res.converged and res.max_abs <= config.wf_threshold
        else:
            req = f">= {config.control_threshold:g}"
            ok = res.converged and res.max_abs >= config.control_threshold
        row.update(max_abs=res.max_abs, error_estimate=res.error_estimate, converged=res.converged,
                   panels=res.panels, requirement=req, status="pass" if ok else "fail")
        rows.append(row)
    return columns, rows, all(r["status"] == "pass" for r in rows)


HANDLERS = {"matrix-verify": cmd_matrix_verify, "mellin-table": cmd_mellin_table,
            "extract": cmd_extract, "wavefront-scan": cmd_wavefront_scan}


def run(config: RunConfig) -> tuple:
    """Execute ``config`` and return ``(text, ok)``."""
    columns, rows, ok = HANDLERS[config.command](config)
    return render(config, columns, rows, ok), ok


def main(argv=None) -> int:
    config = load_config(argv)
    try:
        text, ok = run(config)
    except ValueError as exc:
        print(f"hadamard-extract: {exc}", file=sys.stderr)
        return 2
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
