"""Scenario runner: configuration, execution and report emission.

Configuration is sectioned ``key = value`` text::

    [run]
    scenario = naimark
    seed = 7

    [params]
    trials = 50

    [tol]
    dilation = 1e-10

Command-line flags ``--scenario``, ``--seed`` and ``--tol.<name>=<value>``
override the file.  The exit code is 0 exactly when every check passes.
"""
import argparse
import configparser
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from opint.errors import ConfigError, IoFailure, ScenarioFailure
from opint.scenarios import REGISTRY, SCHEMA

SCENARIOS = tuple(REGISTRY)
_SECTIONS = {"run", "params", "tol"}
_RUN_KEYS = {"scenario", "seed"}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    seed: int = 0
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in REGISTRY:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {', '.join(SCENARIOS)}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigError(f"seed must be an unsigned integer, got {self.seed!r}")
        defaults, tol_defaults = SCHEMA[self.scenario]
        _reject_unknown("parameter", self.params, defaults)
        _reject_unknown("tolerance", self.tolerances, tol_defaults)
        params = {k: _coerce(k, v, defaults[k]) for k, v in self.params.items()}
        tols = {k: _coerce(k, v, tol_defaults[k]) for k, v in self.tolerances.items()}
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "tolerances", tols)

    def resolved(self):
        """Parameters and tolerances with defaults filled in."""
        defaults, tol_defaults = SCHEMA[self.scenario]
        return {**defaults, **self.params}, {**tol_defaults, **self.tolerances}

    def echo(self):
        params, tols = self.resolved()
        return {"scenario": self.scenario, "seed": int(self.seed),
                "params": _jsonable(params), "tolerances": _jsonable(tols)}


def _reject_unknown(kind, given, allowed):
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {kind} key(s) {unknown}; allowed: {sorted(allowed)}")


def _coerce(key, value, default):
    """Convert ``value`` (possibly text) to the type of ``default``."""
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if isinstance(default, bool):
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(_named_float(text))
        if isinstance(default, tuple):
            return _parse_tuple(text, default)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    return text


def _named_float(text):
    return math.pi if text.lower() == "pi" else float(text)


def _parse_tuple(text, default):
    # "1 1; 1 0" for pairs, "10, 100" for flat lists
    if default and isinstance(default[0], tuple):
        return tuple(tuple(_number(tok) for tok in item.split()) for item in text.split(";") if item.strip())
    return tuple(_number(tok) for tok in text.replace(",", " ").split())


def _number(tok):
    for kind in (int, float, complex):
        try:
            return kind(tok)
        except ValueError:
            pass
    raise ValueError(tok)


def load_config(path):
    """Read a sectioned config file into a :class:`ScenarioConfig`."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    return config_from_sections({s: dict(parser[s]) for s in parser.sections()})


def config_from_sections(sections, overrides=None):
    unknown = sorted(set(sections) - _SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s) {unknown}")
    run = dict(sections.get("run", {}))
    _reject_unknown("run", run, _RUN_KEYS)
    run.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "scenario" not in run:
        raise ConfigError("no scenario given")
    try:
        seed = int(run.get("seed", 0))
    except ValueError as exc:
        raise ConfigError(f"bad seed {run['seed']!r}") from exc
    return ScenarioConfig(run["scenario"], seed, dict(sections.get("params", {})),
                          dict(sections.get("tol", {})))


@dataclass
class RunReport:
    scenario: str
    config: dict
    checks: list
    tables: dict
    wall_clock: float
    artifacts: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def summary(self):
        """Deterministic part of the report (wall-clock values kept separately)."""
        checks = []
        for c in self.checks:
            entry = {"name": c.name, "criterion": c.criterion, "relation": c.relation,
                     "bound": _jsonable(c.bound), "passed": c.passed}
            if not c.timing:
                entry["value"] = _jsonable(c.value)
            checks.append(entry)
        timings = {c.name: c.value for c in self.checks if c.timing}
        return {"scenario": self.scenario, "config": self.config, "passed": self.passed,
                "checks": checks, "artifacts": list(self.artifacts),
                "wall_clock": {"total": self.wall_clock, **timings}}


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v if v is None or isinstance(v, str) else str(v)


def run_scenario(config, out_dir=None, strict=False):
    """Run one scenario; with ``out_dir`` also write its artifacts.

    Raises :class:`ScenarioFailure` in ``strict`` mode when a check fails.
    """
    params, tols = config.resolved()
    rng = np.random.default_rng(config.seed)
    start = time.perf_counter()
    outcome = REGISTRY[config.scenario](params, tols, rng)
    elapsed = time.perf_counter() - start
    names = [c.name for c in outcome.checks]
    if len(set(names)) != len(names):
        raise RuntimeError("duplicate check names")
    report = RunReport(config.scenario, config.echo(), outcome.checks, outcome.tables, elapsed)
    if out_dir is not None:
        emit_report(report, out_dir)
    if strict and not report.passed:
        bad = "; ".join(f"{c.name}: {c.value!r} not {c.relation} {c.bound!r}" for c in report.failures())
        raise ScenarioFailure(f"{config.scenario} failed: {bad}", report)
    return report


def _stem(report):
    return f"{report.scenario}-{report.config.get('seed', 0)}"


def emit_report(report, out_dir):
    """Write one CSV per table and a summary JSON; returns the written paths."""
    out = Path(out_dir)
    paths = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, (header, rows) in sorted(report.tables.items()):
            path = out / f"{_stem(report)}-{name}.csv"
            with open(path, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(header)
                w.writerows([[_cell(v) for v in row] for row in rows])
            paths.append(str(path))
        report.artifacts = [Path(p).name for p in paths]
        summary = out / f"{_stem(report)}-summary.json"
        summary.write_text(json.dumps(report.summary(), sort_keys=True, indent=2) + "\n",
                           encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write report to {out}: {exc}") from exc
    paths.append(str(summary))
    return paths


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v))
    return v


def _split_tol_flags(argv):
    """Pull ``--tol.<name>=<value>`` (or ``--tol.<name> <value>``) out of ``argv``."""
    rest, tols = [], {}
    it = iter(argv)
    for arg in it:
        if arg.startswith("--tol."):
            key, sep, value = arg[len("--tol."):].partition("=")
            if not sep:
                value = next(it, None)
                if value is None:
                    raise ConfigError(f"missing value for {arg}")
            if not key:
                raise ConfigError("empty tolerance name")
            tols[key] = value
        else:
            rest.append(arg)
    return rest, tols


def build_parser():
    p = argparse.ArgumentParser(prog="opint", description="Run a reproducible scenario and write its report.")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--config", help="sectioned key=value config file")
    p.add_argument("--out", default="reports", help="output directory (default: %(default)s)")
    p.add_argument("--seed", type=int)
    p.add_argument("--strict", action="store_true", help="raise on the first failed run")
    p.epilog = "Tolerances: --tol.<name>=<value>; scenarios: " + ", ".join(SCENARIOS)
    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        rest, tols = _split_tol_flags(argv)
        args = parser.parse_args(rest)
        sections = {}
        if args.config:
            cfg = load_config(args.config)
            sections = {"run": {"scenario": cfg.scenario, "seed": cfg.seed},
                        "params": cfg.params, "tol": cfg.tolerances}
        sections.setdefault("tol", {})
        sections["tol"] = {**sections["tol"], **tols}
        config = config_from_sections(sections, {"scenario": args.scenario, "seed": args.seed})
        report = run_scenario(config, args.out, strict=args.strict)
    except (ConfigError, IoFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScenarioFailure as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return 1
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value!r} {c.relation} {c.bound!r}")
    print(f"{report.scenario}: {'all checks passed' if report.passed else 'FAILED'} "
          f"({report.wall_clock:.2f}s), artifacts in {args.out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
