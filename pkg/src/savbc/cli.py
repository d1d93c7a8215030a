"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input or validation error,
3 search budget exhausted (best-effort output is still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bsc_example import BsSavbcParams, figure_sweep
from .channels import AuxiliaryJoint, SavbcSpec, ValidationError, parse_spec
from .infomeasures import NonConvergence
from .regions import (Budget, RateRegion, Report, compute_region, verify_corner_triangle,
                      verify_inner_outer, verify_q_absorption)
from .simulator import estimate_error, exhaustive_adversary, generate_code, greedy_adversary
from .symmetrizability import SolverFailure, is_symmetrizable

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("savbc")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input: str | None = None
    output: str | None = None
    seed: int = 0
    tol: float = 1e-6
    directions: int = 64
    restarts: int = 16
    iterations: int = 2000
    alpha_samples: int = 201
    trials: int = 10_000
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        for name in ("directions", "restarts", "iterations", "alpha_samples", "trials"):
            if getattr(self, name) < 1:
                raise InputError(f"--{name.replace('_', '-')} must be >= 1")


def g9(v) -> str:
    return f"{float(v):.9g}"


def _read_spec(path: str | None) -> SavbcSpec:
    if not path:
        raise InputError("--input is required")
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    return parse_spec(text)


def _budget(cfg: RunConfig) -> Budget:
    return Budget(directions=cfg.directions, restarts=cfg.restarts, iterations=cfg.iterations,
                  u_size=cfg.extra.get("u_size"), seed=cfg.seed,
                  max_seconds=cfg.extra.get("max_seconds"))


def _vertex_rows(region: RateRegion):
    return [[g9(rc), g9(rp)] for rc, rp in region.vertices]


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)


def _print_report(r: Report, out=sys.stdout):
    print(r.line(), file=out)


def _figure(path, regions, title=None):
    from .plotting import render_regions
    render_regions(regions, path, title)


# --------------------------------------------------------------------------

def cmd_region(cfg: RunConfig) -> int:
    spec = _read_spec(cfg.input)
    budget = _budget(cfg)
    t0 = time.monotonic()
    region = compute_region(spec, budget, tol=cfg.tol)
    meta = {
        "spec_sha256": spec.digest(),
        "seed": cfg.seed,
        "budget": {k: v for k, v in asdict(budget).items() if v is not None},
        "tol": cfg.tol,
        "warnings": list(region.warnings),
        "vertices": [[float(g9(a)), float(g9(b))] for a, b in region.vertices],
        "nondeterministic": {"elapsed_seconds": round(time.monotonic() - t0, 3)},
    }
    if cfg.output:
        _write_csv(cfg.output, ["rc", "rp"], _vertex_rows(region))
        Path(cfg.output).with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    else:
        wr = csv.writer(sys.stdout, lineterminator="\n")
        wr.writerow(["rc", "rp"])
        wr.writerows(_vertex_rows(region))
    print(json.dumps({k: v for k, v in meta.items() if k != "vertices"}), file=sys.stderr)
    if cfg.extra.get("figure"):
        _figure(cfg.extra["figure"], {"region": region})
    return EXIT_BUDGET if "budget_exhausted" in region.warnings else EXIT_OK


def cmd_symmetrizable(cfg: RunConfig) -> int:
    spec = _read_spec(cfg.input)
    tol = cfg.extra.get("sym_tol", 1e-8)
    res = is_symmetrizable(spec.family, tol)
    print(f"verdict: {res.verdict}")
    print(f"residual: {g9(res.residual)}")
    print(f"borderline: {str(res.borderline).lower()}")
    if res.witness is not None:
        names = spec.family.names
        print("sigma (rows x, columns " + ", ".join(names) + "):")
        for x, row in enumerate(res.witness.sigma):
            print(f"  x={x}: " + " ".join(g9(v) for v in row))
    return EXIT_OK


def cmd_bsc_figure(cfg: RunConfig) -> int:
    p = cfg.extra.get("p")
    p_min = cfg.extra.get("p_min")
    p_maxs = cfg.extra.get("p_max") or []
    if p is None or p_min is None or not p_maxs:
        raise InputError("bsc-figure needs --p, --p-min and at least one --p-max")
    for pm in p_maxs:
        BsSavbcParams(p, min(p_min, pm), pm)     # range checks before writing anything
    out = cfg.output or "."
    hulls = figure_sweep(p, p_min, p_maxs, out, cfg.alpha_samples)
    for pm, h in hulls.items():
        print(f"p_max={g9(pm)}: {len(h)} hull vertices, area {g9(h.area)}")
    if cfg.extra.get("figure"):
        _figure(cfg.extra["figure"], {f"p_max={pm:g}": h for pm, h in hulls.items()},
                f"p={p:g}")
    return EXIT_OK


def _read_region(path) -> RateRegion:
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        pts = [(float(a), float(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise InputError(f"{path}: not a two-column rc,rp CSV") from exc
    if not pts:
        raise InputError(f"{path}: no vertices")
    return RateRegion.hull(pts)


def cmd_verify(cfg: RunConfig) -> int:
    spec = _read_spec(cfg.input)
    samples = cfg.extra.get("samples") or 100
    reports = [
        verify_q_absorption(spec, samples, cfg.seed, 1e-9),
        verify_inner_outer(spec, 2 * samples, cfg.seed, 1e-2),
    ]
    region_path = cfg.extra.get("region")
    region = _read_region(region_path) if region_path else compute_region(spec, _budget(cfg), cfg.tol)
    reports.append(verify_corner_triangle(spec, region))
    for r in reports:
        _print_report(r)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"worst witnesses for {r.name}: {json.dumps(r.witnesses[:3])}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def _sim_aux(cfg: RunConfig, spec: SavbcSpec) -> AuxiliaryJoint:
    path = cfg.extra.get("aux")
    if path:
        try:
            table = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{path}: {exc}") from exc
        aux = AuxiliaryJoint(np.asarray(table, dtype=float))
    elif spec.x_size == 2:
        aux = AuxiliaryJoint.binary_superposition(cfg.extra.get("alpha", 0.1))
    else:
        raise InputError("--aux is required for non-binary inputs")
    if aux.x_size != spec.x_size:
        raise InputError(f"auxiliary has |X|={aux.x_size}, spec has {spec.x_size}")
    return aux


def cmd_simulate(cfg: RunConfig) -> int:
    spec = _read_spec(cfg.input)
    aux = _sim_aux(cfg, spec)
    n = cfg.extra.get("n", 8)
    rc, rp = cfg.extra.get("rc", 0.0), cfg.extra.get("rp", 0.0)
    code = generate_code(aux, n, rc, rp, cfg.seed)
    adversary = cfg.extra.get("adversary", "exhaustive")
    if adversary == "exhaustive":
        seq, est = exhaustive_adversary(code, spec.family, spec.w, cfg.trials, cfg.seed)
        plan = " ".join(spec.family.names[s] for s in seq)
    else:
        weights = greedy_adversary(code, spec.family)
        est = estimate_error(code, spec.w, weights, cfg.trials, cfg.seed, spec.family)
        plan = " ".join("/".join(g9(v) for v in w.weights) for w in weights)
    row = {"rc": g9(rc), "rp": g9(rp), "n": n, "messages_c": code.mc, "messages_p": code.mp,
           "trials": cfg.trials, "adversary": adversary, "p_err": g9(est.p_err),
           "half_width": g9(est.half_width), "seed": cfg.seed}
    for k, v in row.items():
        print(f"{k}: {v}")
    print(f"state_plan: {plan}")
    if cfg.output:
        new = not Path(cfg.output).exists()
        with open(cfg.output, "a", newline="") as f:
            wr = csv.DictWriter(f, fieldnames=list(row), lineterminator="\n")
            if new:
                wr.writeheader()
            wr.writerow(row)
    return EXIT_OK


COMMANDS = {
    "region": cmd_region,
    "symmetrizable": cmd_symmetrizable,
    "bsc-figure": cmd_bsc_figure,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="savbc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--input", "-i", help="spec JSON file ('-' for stdin)")
        p.add_argument("--output", "-o")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-6)

    def search(p):
        p.add_argument("--directions", type=int, default=64)
        p.add_argument("--restarts", type=int, default=16)
        p.add_argument("--iterations", type=int, default=2000)
        p.add_argument("--u-size", type=int, default=None)
        p.add_argument("--max-seconds", type=float, default=None)

    p = sub.add_parser("region", help="compute the capacity region of a spec")
    common(p)
    search(p)
    p.add_argument("--figure", help="also render the region to this image file")

    p = sub.add_parser("symmetrizable", help="test the state family for symmetrizability")
    common(p)
    p.add_argument("--sym-tol", type=float, default=1e-8)

    p = sub.add_parser("bsc-figure", help="closed-form binary-symmetric regions for several p_max")
    common(p, spec=False)
    p.add_argument("--p", type=float)
    p.add_argument("--p-min", type=float)
    p.add_argument("--p-max", type=float, action="append")
    p.add_argument("--alpha-samples", type=int, default=201)
    p.add_argument("--figure", help="also render the nested hulls to this image file")

    p = sub.add_parser("verify", help="check the equivalent characterizations numerically")
    common(p)
    search(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--region", help="check this rc,rp CSV instead of a computed region")

    p = sub.add_parser("simulate", help="Monte-Carlo error of a short superposition code")
    common(p)
    p.add_argument("--rc", type=float, default=0.0)
    p.add_argument("--rp", type=float, default=0.0)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--adversary", choices=["exhaustive", "greedy"], default="exhaustive")
    p.add_argument("--alpha", type=float, default=0.1,
                   help="binary inputs: X = U xor Bern(alpha) with U uniform")
    p.add_argument("--aux", help="JSON file with a p(u,x) table")
    return ap


_FIELDS = {"input", "output", "seed", "tol", "directions", "restarts", "iterations",
           "alpha_samples", "trials"}


def make_config(ns: argparse.Namespace) -> RunConfig:
    d = {k: v for k, v in vars(ns).items() if k not in ("verbose",)}
    base = {k: d.pop(k) for k in list(d) if k in _FIELDS}
    sub = d.pop("subcommand")
    return RunConfig(sub, extra=d, **base)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except ValidationError as exc:
        print(f"error: invalid spec: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError, SolverFailure) as exc:
        # ChannelError, TooLarge and DegenerateAux are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonConvergence as exc:
        print(f"error: iteration budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
