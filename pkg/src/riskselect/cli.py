"""Batch command-line front end and report serialization.

Usage::

    riskselect --scenario S1.2 --n 100,1000 --runs 25 --seed 7 \\
               --criteria aic,bic,swic:beta=1,nu=1000 --format csv

Criteria grammar: a comma-separated list where each item is ``aic``,
``bic``, ``hq``, ``swic:key=value[,key=value]`` or ``glp:...``.
Bare ``key=value`` tokens continue the preceding parameterized
criterion, so ``swic:beta=1,nu=1000`` is a single criterion.  SWIC
takes either ``nu`` (scale calibrated so SWIC equals the BIC at sample
size nu) or an explicit ``alpha``.

CSV reports carry exactly the columns
``scenario,criterion,n,runs,avg,prop,failures`` with two-decimal
``avg`` and ``prop``; the markdown format mirrors the same columns.

Custom scenarios are flat key-value text files with matrices one row
per line (see :func:`load_scenario_file`), e.g.::

    family = pca
    y_law = normal
    a_row = 1 0
    a_row = 0 0.5
    a_row = 1 0.5
    r_row = 1 0.75
    r_row = 0.75 1
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .penalty import PenaltyKind, PenaltySpec, alpha_calibrate
from .sim import (
    Criterion,
    ExperimentReport,
    Family,
    MixturePayload,
    PcaPayload,
    RegressionPayload,
    ScenarioConfig,
    YLaw,
    run_experiment,
    scenario,
    scenario_constants,
    SCENARIO_IDS,
)

PARALLELISM_ENV = "RISKSELECT_PARALLELISM"
CSV_HEADER = "scenario,criterion,n,runs,avg,prop,failures"


@dataclass(frozen=True)
class CliConfig:
    scenario: str
    config: ScenarioConfig
    n_list: tuple[int, ...]
    runs: int
    seed: int
    criteria: tuple[Criterion, ...]
    fmt: str
    output: str
    parallelism: int


# --- criteria parsing --------------------------------------------------------

_BARE_KINDS = {"aic", "bic", "hq"}
_PARAM_KINDS = {"swic", "glp"}


def _split_criteria(raw: str) -> list[tuple[str, dict[str, str]]]:
    """Group comma-separated tokens into (kind, params) items."""
    items: list[tuple[str, dict[str, str]]] = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            raise ValueError("empty criterion token")
        head, _, rest = token.partition(":")
        if head in _BARE_KINDS and not rest:
            items.append((head, {}))
        elif head in _PARAM_KINDS:
            params: dict[str, str] = {}
            if rest:
                key, _, value = rest.partition("=")
                if not value:
                    raise ValueError(f"malformed parameter {rest!r} in {token!r}")
                params[key.strip()] = value.strip()
            items.append((head, params))
        elif "=" in token and ":" not in token and items and items[-1][0] in _PARAM_KINDS:
            key, _, value = token.partition("=")
            items[-1][1][key.strip()] = value.strip()
        else:
            raise ValueError(f"unknown criterion token {token!r}")
    return items


def _build_criterion(kind: str, params: dict[str, str], constants: tuple[float, ...]) -> Criterion:
    def as_int(key: str) -> int:
        try:
            return int(params[key])
        except ValueError:
            raise ValueError(f"{kind}: {key}={params[key]!r} is not an integer") from None

    def as_float(key: str) -> float:
        try:
            return float(params[key])
        except ValueError:
            raise ValueError(f"{kind}: {key}={params[key]!r} is not a number") from None

    if kind == "aic":
        return Criterion("aic", PenaltySpec(PenaltyKind.AIC, constants))
    if kind == "bic":
        return Criterion("bic", PenaltySpec(PenaltyKind.BIC, constants))
    if kind == "hq":
        return Criterion("hq", PenaltySpec(PenaltyKind.HANNAN_QUINN, constants))

    unknown = set(params) - {"beta", "nu", "alpha"}
    if unknown:
        raise ValueError(f"{kind}: unknown parameters {sorted(unknown)}")
    beta = as_int("beta") if "beta" in params else 1
    if beta < 1:
        raise ValueError(f"{kind}: beta must be >= 1, got {beta}")
    if kind == "swic":
        if ("nu" in params) == ("alpha" in params):
            raise ValueError("swic needs exactly one of nu=... or alpha=...")
        if "nu" in params:
            nu = as_float("nu")
            spec = PenaltySpec(
                PenaltyKind.SWIC, constants, alpha=alpha_calibrate(beta, nu), beta=beta
            )
            return Criterion(f"swic:b{beta}:v{int(nu)}", spec)
        alpha = as_float("alpha")
        spec = PenaltySpec(PenaltyKind.SWIC, constants, alpha=alpha, beta=beta)
        return Criterion(f"swic:b{beta}:a{alpha:g}", spec)
    # glp
    if "alpha" not in params:
        raise ValueError("glp needs alpha=...")
    alpha = as_float("alpha")
    spec = PenaltySpec(PenaltyKind.GENERALIZED_LOG_PLUS, constants, alpha=alpha, beta=beta)
    return Criterion(f"glp:b{beta}:a{alpha:g}", spec)


def parse_criteria(raw: str, cfg: ScenarioConfig) -> tuple[Criterion, ...]:
    constants = tuple(scenario_constants(cfg))
    return tuple(_build_criterion(kind, params, constants) for kind, params in _split_criteria(raw))


# --- scenario files ----------------------------------------------------------

def _parse_kv_lines(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _floats(value: str) -> np.ndarray:
    return np.array([float(tok) for tok in value.split()], dtype=float)


def load_scenario_file(path: str | Path) -> ScenarioConfig:
    """Parse a flat key-value scenario file into a :class:`ScenarioConfig`."""
    pairs = _parse_kv_lines(Path(path).read_text(encoding="utf-8"))
    single: dict[str, str] = {}
    repeated: dict[str, list[str]] = {}
    for key, value in pairs:
        if key in ("mean", "cov_row", "a_row", "r_row"):
            repeated.setdefault(key, []).append(value)
        else:
            if key in single:
                raise ValueError(f"duplicate key {key!r}")
            single[key] = value

    family = single.get("family")
    sid = single.get("id", "custom")
    if family == "mixture":
        weights = _floats(single["weights"])
        means = np.vstack([_floats(v) for v in repeated.get("mean", [])])
        k, d = means.shape
        if "cov_row" in repeated:
            rows = [_floats(v) for v in repeated["cov_row"]]
            if len(rows) != k * d:
                raise ValueError(f"expected {k * d} cov_row lines, got {len(rows)}")
            covs = np.vstack(rows).reshape(k, d, d)
        else:
            covs = np.broadcast_to(np.eye(d), (k, d, d)).copy()
        m = int(single.get("m", 2 * k))
        true_k = int(single.get("true_k", k))
        return ScenarioConfig(
            id=sid, family=Family.MIXTURE, true_k=true_k, m=m,
            payload=MixturePayload(means=means, weights=weights, covariances=covs),
        )
    if family == "regression":
        theta = _floats(single["theta"])
        epsilon = float(single.get("epsilon", 0.0))
        default_true = int(np.max(np.nonzero(theta)) + 1) if np.any(theta) else 1
        true_k = int(single.get("true_k", default_true))
        return ScenarioConfig(
            id=sid, family=Family.REGRESSION, true_k=true_k, m=theta.size,
            payload=RegressionPayload(theta=theta, epsilon=epsilon),
        )
    if family == "pca":
        mixing = np.vstack([_floats(v) for v in repeated.get("a_row", [])])
        k = mixing.shape[1]
        if "r_row" in repeated:
            corr = np.vstack([_floats(v) for v in repeated["r_row"]])
        else:
            corr = np.full((k, k), 0.75)
            np.fill_diagonal(corr, 1.0)
        law = YLaw(single.get("y_law", "normal"))
        true_k = int(single.get("true_k", k))
        return ScenarioConfig(
            id=sid, family=Family.PCA, true_k=true_k, m=mixing.shape[0],
            payload=PcaPayload(mixing=mixing, y_law=law, correlation=corr),
        )
    raise ValueError(f"family must be mixture, regression, or pca, got {family!r}")


def save_scenario_file(cfg: ScenarioConfig, path: str | Path) -> None:
    """Write a scenario in the flat key-value format."""
    lines = [f"family = {cfg.family.value}", f"id = {cfg.id}",
             f"true_k = {cfg.true_k}", f"m = {cfg.m}"]

    def fmt(vec) -> str:
        return " ".join(repr(float(v)) for v in vec)

    pay = cfg.payload
    if isinstance(pay, MixturePayload):
        lines.append(f"weights = {fmt(pay.weights)}")
        for mu in pay.means:
            lines.append(f"mean = {fmt(mu)}")
        for cov in pay.covariances:
            for row in cov:
                lines.append(f"cov_row = {fmt(row)}")
    elif isinstance(pay, RegressionPayload):
        lines.append(f"theta = {fmt(pay.theta)}")
        lines.append(f"epsilon = {pay.epsilon!r}")
    else:
        lines.append(f"y_law = {pay.y_law.value}")
        for row in pay.mixing:
            lines.append(f"a_row = {fmt(row)}")
        for row in pay.correlation:
            lines.append(f"r_row = {fmt(row)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- argument parsing --------------------------------------------------------

def _resolve_scenario(token: str, parser: argparse.ArgumentParser) -> ScenarioConfig:
    if token in SCENARIO_IDS:
        return scenario(token)
    path = Path(token)
    if path.exists():
        try:
            return load_scenario_file(path)
        except (ValueError, KeyError) as exc:
            parser.error(f"bad scenario file {token!r}: {exc}")
    parser.error(f"unknown scenario {token!r}: not a built-in id or readable file")
    raise AssertionError  # parser.error raises


def parse_args(argv: Sequence[str]) -> CliConfig:
    """Validate command-line arguments into a :class:`CliConfig`.

    Malformed input triggers a usage error naming the offending token
    and a nonzero exit status.
    """
    parser = argparse.ArgumentParser(
        prog="riskselect",
        description="Replicated penalized-risk model selection experiments.",
    )
    parser.add_argument("--scenario", required=True,
                        help="built-in id (S1.1..S3.4) or path to a scenario file")
    parser.add_argument("--n", required=True,
                        help="comma-separated sample sizes, e.g. 100,1000")
    parser.add_argument("--runs", type=int, default=25, help="replications per sample size")
    parser.add_argument("--seed", type=int, default=1, help="master seed")
    parser.add_argument("--criteria", required=True,
                        help="e.g. aic,bic,swic:beta=1,nu=1000")
    parser.add_argument("--format", choices=("csv", "markdown"), default="csv")
    parser.add_argument("--output", default="-", help="output path, or - for stdout")
    parser.add_argument("--parallelism", type=int, default=None,
                        help=f"worker processes (default ${PARALLELISM_ENV} or 1)")
    args = parser.parse_args(argv)

    cfg = _resolve_scenario(args.scenario, parser)
    try:
        n_list = tuple(int(tok) for tok in args.n.split(",") if tok.strip())
    except ValueError:
        parser.error(f"--n expects integers, got {args.n!r}")
    if not n_list or any(n < 1 for n in n_list):
        parser.error(f"--n must list positive sizes, got {args.n!r}")
    if args.runs < 1:
        parser.error(f"--runs must be >= 1, got {args.runs}")
    try:
        criteria = parse_criteria(args.criteria, cfg)
    except ValueError as exc:
        parser.error(f"bad --criteria: {exc}")
    if args.parallelism is not None:
        parallelism = args.parallelism
    else:
        parallelism = int(os.environ.get(PARALLELISM_ENV, "1"))
    if parallelism < 1:
        parser.error(f"--parallelism must be >= 1, got {parallelism}")

    return CliConfig(
        scenario=args.scenario,
        config=cfg,
        n_list=n_list,
        runs=args.runs,
        seed=args.seed,
        criteria=criteria,
        fmt=args.format,
        output=args.output,
        parallelism=parallelism,
    )


# --- report serialization ----------------------------------------------------

def emit_report(report: ExperimentReport, fmt: str = "csv") -> str:
    """Render a report as CSV or markdown text (two-decimal avg/prop)."""
    rows = [
        (report.scenario, r.criterion, r.n, r.runs, f"{r.avg:.2f}", f"{r.prop:.2f}", r.failures)
        for r in report.rows
    ]
    if fmt == "csv":
        lines = [CSV_HEADER]
        lines += [",".join(str(c) for c in row) for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        header = CSV_HEADER.split(",")
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join(" --- " for _ in header) + "|"]
        lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def read_report_csv(text: str) -> list[dict]:
    """Parse emitted CSV back into typed row dictionaries."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    out = []
    for ln in lines[1:]:
        scenario_id, criterion, n, runs, avg, prop, failures = ln.split(",")
        out.append(
            dict(scenario=scenario_id, criterion=criterion, n=int(n), runs=int(runs),
                 avg=float(avg), prop=float(prop), failures=int(failures))
        )
    return out


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point: run the configured experiment and emit the report."""
    cfg = parse_args(sys.argv[1:] if argv is None else list(argv))
    report = run_experiment(
        cfg.config,
        cfg.criteria,
        cfg.n_list,
        runs=cfg.runs,
        seed=cfg.seed,
        parallelism=cfg.parallelism,
    )
    text = emit_report(report, cfg.fmt)
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
