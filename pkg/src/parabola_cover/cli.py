"""Command-line driver.

    parabola-cover [global flags] <command> [command flags]

Every run writes its outputs plus ``manifest.json`` into ``--out``.
Exit codes: 0 ok, 2 config error, 3 domain error, 4 resource cap,
5 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import tomli
import tomli_w

from . import __version__
from .asymptotics import classify_series, estimate_dimension
from .audit import lemma1_all
from .cover import (
    METHODS,
    SAMPLED_MAX_LEVEL,
    CoverLevelReport,
    TailSumReport,
    cover_level,
    resolve_method,
    tail_from_levels,
)
from .exact import as_rational, format_rational
from .polys import (
    DyadicBlock,
    IntegerQuadratic,
    ResourceCapError,
    RootKind,
    block_pairs,
    check_level,
    classify,
)
from .scales import (
    DomainError,
    decay_threshold,
    parse_g,
    parse_psi,
    set_precision_bits,
)
from .sets import delta_set, split_delta

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_CAP = 4
EXIT_INVARIANT = 5

COMMANDS = ("enumerate", "delta", "lemma1", "cover", "tailsum", "series", "dimension")


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str = "cover"
    psi: str = "pow:3"
    g: str = "pow:3/5"
    n: int = 3
    n_from: int = 1
    n_to: int = 6
    tau: str = "4"
    nmin: int = 6
    nmax: int = 10
    a2: int = 1
    a1: int = 0
    a0: int = 0
    t: str = "1/8"
    all_pairs: bool = False
    kind: str = "any"
    max_rows: int = 20_000_000
    qmax: int = 1_000_000
    method: str = "auto"
    samples: int = 4000
    seed: int = 20240501
    out: str = "out"
    threads: int = 1
    precision_bits: int = 96
    cap_level: int = 8

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any], source: str = "<config>", text: str = "") -> RunConfig:
        fields = {f.name: f for f in dataclasses.fields(cls)}
        defaults = cls()
        values = {}
        for key, value in data.items():
            name = key.replace("-", "_")
            if name not in fields:
                raise ConfigError(f"{_where(source, text, key)}: unknown key {key!r}")
            values[name] = _coerce(name, value, getattr(defaults, name), _where(source, text, key))
        cfg = cls(**values)
        return cfg

    @classmethod
    def from_toml(cls, text: str, source: str = "<config>") -> RunConfig:
        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"{source}: {exc}") from None
        return cls.from_dict(data, source, text)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown {self.command!r}; expected one of {COMMANDS}")
        for name in ("psi", "g"):
            try:
                (parse_psi if name == "psi" else parse_g)(getattr(self, name))
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from None
        for name in ("tau", "t"):
            try:
                v = as_rational(getattr(self, name))
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise ConfigError(f"{name}: {exc}") from None
            if v <= 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)}")
        for name in ("n", "n_from", "n_to", "nmin", "nmax", "cap_level"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be >= 0")
        if self.threads < 1:
            raise ConfigError("threads: must be >= 1")
        if self.precision_bits < 53:
            raise ConfigError("precision_bits: must be >= 53")
        if self.method not in ("auto",) + METHODS:
            raise ConfigError(f"method: expected auto or one of {METHODS}, got {self.method!r}")
        if self.kind not in ("any",) + tuple(k.value for k in RootKind):
            raise ConfigError(f"kind: unknown root kind {self.kind!r}")
        if self.samples < 2:
            raise ConfigError("samples: must be >= 2")
        if self.qmax < 10:
            raise ConfigError("qmax: must be >= 10")


def _where(source: str, text: str, key: str) -> str:
    if text:
        pat = re.compile(rf"^[ \t]*{re.escape(key)}[ \t]*=", re.M)
        m = pat.search(text)
        if m:
            return f"{source}:{text.count(chr(10), 0, m.start()) + 1}: field {key}"
    return f"{source}: field {key}"


def _coerce(name: str, value: Any, default: Any, where: str) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError(f"{where}: expected a string, got {value!r}")
    return str(value)


@dataclass
class RunManifest:
    config: dict[str, Any]
    version: str
    wall_time: float
    level_timing: list[dict[str, Any]] = field(default_factory=list)
    outputs: dict[str, str] = field(default_factory=dict)
    status: int = EXIT_OK

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# output helpers


class Outputs:
    def __init__(self, root: Path) -> None:
        self.root = root
        self.checksums: dict[str, str] = {}
        self.timing: list[dict[str, Any]] = []

    def write(self, name: str, text: str) -> Path:
        path = self.root / name
        data = text.encode("utf-8")
        path.write_bytes(data)
        self.checksums[name] = hashlib.sha256(data).hexdigest()
        return path

    def csv(self, name: str, header: list[str], rows: list[list[Any]]) -> Path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return self.write(name, buf.getvalue())

    def json(self, name: str, obj: Any) -> Path:
        return self.write(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def timed(self, n: int, fn: Callable[[], Any]) -> Any:
        start = time.perf_counter()
        result = fn()
        self.timing.append({"n": n, "seconds": round(time.perf_counter() - start, 6)})
        return result


# --------------------------------------------------------------------------
# commands


def cmd_enumerate(cfg: RunConfig, out: Outputs) -> int:
    check_level(cfg.n, cfg.cap_level)
    block = DyadicBlock(cfg.n)
    if block.triple_count() > cfg.max_rows:
        raise ResourceCapError(
            f"block {cfg.n} has {block.triple_count()} triples, above max_rows={cfg.max_rows}"
        )
    bound = block.a0_bound
    rows = []
    for a2, a1 in block_pairs(cfg.n):
        for a0 in range(-bound + 1, bound):
            D = a1 * a1 - 4 * a2 * a0
            kind = "repeated" if D == 0 else "distinct_real" if D > 0 else "complex"
            if cfg.kind == "any" or cfg.kind == kind:
                rows.append([cfg.n, a2, a1, a0, D, kind])
    out.csv(f"enumerate_n{cfg.n}.csv", ["level", "a2", "a1", "a0", "D", "kind"], rows)
    return EXIT_OK


def _endpoint_json(union) -> list[dict]:
    return union.to_json()


def cmd_delta(cfg: RunConfig, out: Outputs) -> int:
    F = IntegerQuadratic(cfg.a2, cfg.a1, cfg.a0)
    t = as_rational(cfg.t)
    rd = classify(F)
    U = delta_set(F, t)
    m = U.measure()
    report = {
        "F": {"a2": F.a2, "a1": F.a1, "a0": F.a0},
        "t": format_rational(t),
        "kind": rd.kind.value,
        "discriminant": rd.discriminant,
        "intervals": _endpoint_json(U),
        "measure": {"lo": m.lo, "hi": m.hi},
    }
    if rd.kind is RootKind.DISTINCT_REAL:
        d1, d2 = split_delta(F, t)
        report["delta1"] = _endpoint_json(d1)
        report["delta2"] = _endpoint_json(d2)
    out.json("delta.json", report)
    return EXIT_OK


def cmd_lemma1(cfg: RunConfig, out: Outputs) -> int:
    psi = parse_psi(cfg.psi)
    check_level(cfg.n, cfg.cap_level)
    if cfg.all_pairs:
        reports = out.timed(cfg.n, lambda: lemma1_all(cfg.n, psi, cfg.threads))
    else:
        from .sets import lemma1_verify

        reports = [lemma1_verify(cfg.a2, cfg.a1, cfg.n, psi)]
    header = ["n", "a2", "a1", "measure_lo", "measure_hi", "bound", "passed"]
    rows = [[r.row()[h] for h in header] for r in reports]
    out.csv(f"lemma1_n{cfg.n}.csv", header, rows)
    failed = [r for r in reports if not r.passed]
    if failed:
        raise InvariantViolation(
            f"{len(failed)} pair(s) exceed 16*psi(2^n), first ({failed[0].a2},{failed[0].a1})"
        )
    return EXIT_OK


def _level_report(cfg: RunConfig, n: int) -> CoverLevelReport:
    psi, g = parse_psi(cfg.psi), parse_g(cfg.g)
    return cover_level(
        n, psi, g, cfg.method, cfg.threads, cfg.samples, cfg.seed, cfg.cap_level
    )


def _check_cover(reports: list[CoverLevelReport]) -> None:
    bad = [r for r in reports if r.violations]
    if bad:
        raise InvariantViolation(
            f"chop count above 640*2^n for {sum(r.violations for r in bad)} pair(s) at "
            f"level(s) {[r.n for r in bad]}"
        )


def cmd_cover(cfg: RunConfig, out: Outputs) -> int:
    report = out.timed(cfg.n, lambda: _level_report(cfg, cfg.n))
    out.csv(f"cover_n{cfg.n}.csv", CoverLevelReport.CSV_HEADER.split(","), [report.csv_fields()])
    _check_cover([report])
    return EXIT_OK


def cmd_tailsum(cfg: RunConfig, out: Outputs) -> int:
    psi = parse_psi(cfg.psi)
    n0 = max(decay_threshold(psi), 1)
    if cfg.n_from < n0:
        raise DomainError(f"--from {cfg.n_from} is below the decay threshold {n0}")
    if cfg.n_to < cfg.n_from:
        raise ConfigError("n_to: must be >= n_from")
    levels = [out.timed(n, lambda n=n: _level_report(cfg, n)) for n in range(cfg.n_from, cfg.n_to + 1)]
    report: TailSumReport = tail_from_levels(levels)
    data = report.to_json()
    data["psi"], data["g"] = cfg.psi, cfg.g
    out.json("tailsum.json", data)
    out.csv("tailsum_trend.csv", TailSumReport.TREND_HEADER.split(","), report.trend_rows())
    out.csv(
        "tailsum_levels.csv",
        CoverLevelReport.CSV_HEADER.split(","),
        [r.csv_fields() for r in levels],
    )
    _check_cover(levels)
    return EXIT_OK


def cmd_series(cfg: RunConfig, out: Outputs) -> int:
    psi, g = parse_psi(cfg.psi), parse_g(cfg.g)
    report = classify_series(psi, g, cfg.qmax)
    data = report.to_json()
    data["psi"], data["g"], data["q_max"] = cfg.psi, cfg.g, cfg.qmax
    out.json("series.json", data)
    return EXIT_OK


def cmd_dimension(cfg: RunConfig, out: Outputs) -> int:
    tau = as_rational(cfg.tau)
    for n in range(cfg.nmin, cfg.nmax + 1):
        if resolve_method(n, cfg.method) == "sampled":
            check_level(n, SAMPLED_MAX_LEVEL)
        else:
            check_level(n, cfg.cap_level)
    if tau <= 2:
        raise DomainError(f"tau must exceed 2, got {cfg.tau}")
    report = estimate_dimension(
        tau, cfg.nmin, cfg.nmax, cfg.method, cfg.threads, cfg.samples, cfg.seed, cfg.cap_level
    )
    out.json("dimension.json", report.to_json())
    out.csv("dimension.csv", report.CSV_HEADER.split(","), report.csv_rows())
    return EXIT_OK


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, ResourceCapError):
        return EXIT_CAP
    if isinstance(exc, InvariantViolation):
        return EXIT_INVARIANT
    if isinstance(exc, ValueError):
        return EXIT_DOMAIN
    return 1


HANDLERS: dict[str, Callable[[RunConfig, Outputs], int]] = {
    "enumerate": cmd_enumerate,
    "delta": cmd_delta,
    "lemma1": cmd_lemma1,
    "cover": cmd_cover,
    "tailsum": cmd_tailsum,
    "series": cmd_series,
    "dimension": cmd_dimension,
}


def run(cfg: RunConfig) -> int:
    """Execute one configured command; writes outputs and the manifest."""
    cfg.validate()
    set_precision_bits(cfg.precision_bits)
    root = Path(cfg.out)
    root.mkdir(parents=True, exist_ok=True)
    out = Outputs(root)
    start = time.perf_counter()
    status = EXIT_OK
    try:
        status = HANDLERS[cfg.command](cfg, out)
    except Exception as exc:
        status = exit_code(exc)
        raise
    finally:
        manifest = RunManifest(
            cfg.to_dict(),
            __version__,
            round(time.perf_counter() - start, 6),
            out.timing,
            dict(out.checksums),
            status,
        )
        (root / "manifest.json").write_text(manifest.to_json())
    return status


# --------------------------------------------------------------------------
# argument parsing


def _global_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="TOML config file (or a manifest.json)")
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("--threads", type=int, default=S, help="worker processes")
    p.add_argument("--precision-bits", type=int, default=S, help="interval precision")
    p.add_argument("--cap-level", type=int, default=S, help="largest exhaustive level")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="parabola-cover",
        description="Exact covers of points near integer quadratics.",
    )
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_, argument_default=S)
        _global_flags(p)
        return p

    def psi_g(p: argparse.ArgumentParser, g: bool = True) -> None:
        p.add_argument("--psi-spec", "--psi", dest="psi", help="e.g. pow:3 or powlog:3;1;0")
        if g:
            p.add_argument("--g-spec", "--g", dest="g", help="e.g. pow:3/5 or powlog:1/2;2")

    def sampling(p: argparse.ArgumentParser) -> None:
        p.add_argument("--method", choices=("auto",) + METHODS)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)

    p = add("enumerate", "list the triples of one block as CSV")
    p.add_argument("--n", type=int)
    p.add_argument("--kind", choices=("any", "repeated", "distinct_real", "complex"))
    p.add_argument("--max-rows", type=int)

    p = add("delta", "exact solution set of |F(x)| < t on [0, 1]")
    p.add_argument("--a2", type=int)
    p.add_argument("--a1", type=int)
    p.add_argument("--a0", type=int)
    p.add_argument("--t", help="rational threshold, e.g. 1/8")

    p = add("lemma1", "measure bound 16*psi(2^n) for one pair or all pairs")
    p.add_argument("--n", type=int)
    p.add_argument("--a2", type=int)
    p.add_argument("--a1", type=int)
    p.add_argument("--all-pairs", action="store_true")
    psi_g(p, g=False)

    p = add("cover", "one level of the cover with its g-sum")
    p.add_argument("--n", type=int)
    psi_g(p)
    sampling(p)

    p = add("tailsum", "g-sums over a range of levels")
    p.add_argument("--from", dest="n_from", type=int)
    p.add_argument("--to", dest="n_to", type=int)
    psi_g(p)
    sampling(p)

    p = add("series", "classify sum g(psi(q)/q) q^2")
    psi_g(p)
    p.add_argument("--qmax", type=int)

    p = add("dimension", "box-counting slope of the level covers")
    p.add_argument("--tau")
    p.add_argument("--nmin", type=int)
    p.add_argument("--nmax", type=int)
    sampling(p)
    return parser


def load_config_file(path: str) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if p.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
        if isinstance(data, dict) and "config" in data:
            data = data["config"]
        return RunConfig.from_dict(data, path)
    return RunConfig.from_toml(text, path)


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    config_path = args.pop("config", None)
    cfg = load_config_file(config_path) if config_path else RunConfig()
    command = args.pop("command", None)
    if command:
        cfg.command = command
    elif not config_path:
        parser.error("a command is required")
    for key, value in args.items():
        setattr(cfg, key, value)
    return cfg


_LABELS = {
    EXIT_CONFIG: "config error",
    EXIT_DOMAIN: "domain error",
    EXIT_CAP: "resource cap",
    EXIT_INVARIANT: "INVARIANT VIOLATION",
}


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        status = run(cfg)
    except (ConfigError, ResourceCapError, InvariantViolation, ValueError) as exc:
        code = exit_code(exc)
        print(f"{_LABELS[code]}: {exc}", file=sys.stderr)
        return code
    print(f"wrote {cfg.out}/manifest.json")
    return status


if __name__ == "__main__":
    sys.exit(main())
