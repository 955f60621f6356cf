"""Batch convergence studies.

Examples::

    morley-study --preset table1 --format markdown
    morley-study --problem example3 --eps 1e-2,1e-8 --N 16,32 --estimator double-mesh
    morley-study --problem example1 --eps coupled --N 16,32,64 --out t2.csv
"""

from __future__ import annotations

import argparse
import copy
import logging
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .mesh import bisect, shishkin_mesh
from .problems import PROBLEMS, get_problem
from .solver import SolveOptions, SolverError
from .study import (
    ConvergenceTable,
    energy_error_double_mesh,
    energy_error_exact,
    format_eps,
    solve_problem,
)

log = logging.getLogger(__name__)

TABLE_EPS = [10.0**-k for k in range(9)]
TABLE_N = [16, 32, 64, 128]


class ConfigError(ValueError):
    pass


@dataclass
class StudyConfig:
    problem: str = "example1"
    eps: Optional[List[float]] = None  # None means coupled, eps = 1/N
    n: List[int] = field(default_factory=lambda: list(TABLE_N))
    estimator: str = "exact"
    quad: int = 5
    solver: SolveOptions = field(default_factory=SolveOptions)
    format: str = "csv"
    out: Optional[str] = None
    dump_mesh: Optional[str] = None

    @property
    def coupled(self) -> bool:
        return self.eps is None

    def validate(self) -> "StudyConfig":
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}")
        if not self.n:
            raise ConfigError("no N values given")
        for n in self.n:
            if n < 4 or n % 4:
                raise ConfigError(f"N={n} is not a positive multiple of 4")
        if self.eps is not None:
            if not self.eps:
                raise ConfigError("no eps values given")
            if any(e <= 0 for e in self.eps):
                raise ConfigError("eps values must be positive")
        if self.estimator not in ("exact", "double-mesh"):
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if self.estimator == "exact" and get_problem(self.problem, 0.5).exact is None:
            raise ConfigError(f"{self.problem} has no exact solution; use --estimator double-mesh")
        if not 2 <= self.quad <= 16:
            raise ConfigError("quadrature order must lie in 2..16")
        if self.format not in ("csv", "markdown"):
            raise ConfigError(f"unknown format {self.format!r}")
        return self


PRESETS = {
    "table1": StudyConfig("example1", list(TABLE_EPS), list(TABLE_N), "exact"),
    "table2": StudyConfig("example1", None, [16, 32, 64, 128, 256], "exact"),
    "table3": StudyConfig("example2", list(TABLE_EPS), list(TABLE_N), "double-mesh"),
    "table4": StudyConfig("example3", list(TABLE_EPS), list(TABLE_N), "double-mesh"),
}


def preset(name: str) -> StudyConfig:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def study_cell(problem_name: str, eps: float, n: int, estimator: str, quad: int = 5,
               opts: Optional[SolveOptions] = None):
    """Error estimate for one ``(eps, N)`` cell; returns ``(error, worst residual)``."""
    problem = get_problem(problem_name, eps)
    mesh = shishkin_mesh(eps, n)
    sol, rep = solve_problem(problem, mesh, quad, opts)
    if estimator == "exact":
        return energy_error_exact(sol, problem.exact, quad), rep.residual
    fine, rep_f = solve_problem(problem, bisect(mesh), quad, opts)
    return energy_error_double_mesh(sol, fine, quad), max(rep.residual, rep_f.residual)


def study_cells(cfg: StudyConfig):
    if cfg.coupled:
        return [(1.0 / n, n) for n in cfg.n]
    return [(e, n) for e in cfg.eps for n in cfg.n]


def dump_meshes(cfg: StudyConfig, path: str) -> None:
    """Breakpoints of every study mesh, columns ``eps,N,axis,index,coordinate``."""
    lines = ["eps,N,axis,index,coordinate"]
    for eps, n in study_cells(cfg):
        body = shishkin_mesh(eps, n).to_csv().splitlines()[1:]
        lines.extend(f"{format_eps(eps)},{n},{row}" for row in body)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def run_study(cfg: StudyConfig) -> ConvergenceTable:
    cfg.validate()
    table = ConvergenceTable(cfg.problem, cfg.estimator, coupled=cfg.coupled)
    for eps, n in study_cells(cfg):
        err, res = study_cell(cfg.problem, eps, n, cfg.estimator, cfg.quad, cfg.solver)
        log.info("%s eps=%g N=%d error=%.3e residual=%.1e", cfg.problem, eps, n, err, res)
        table.add(eps, n, err, res)
    return table.fill_rates()


def emit(table: ConvergenceTable, fmt: str = "csv", sink=None) -> None:
    text = table.to_csv() if fmt == "csv" else table.to_markdown()
    if sink is None or sink == "-":
        sys.stdout.write(text)
    elif isinstance(sink, str):
        with open(sink, "w") as fh:
            fh.write(text)
    else:
        sink.write(text)


def _floats(s: str) -> List[float]:
    return [float(t) for t in s.split(",") if t.strip()]


def _ints(s: str) -> List[int]:
    return [int(t) for t in s.split(",") if t.strip()]


def read_config_file(path: str) -> dict:
    """``key=value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = (t.strip() for t in line.split("=", 1))
            out[k.lstrip("-").replace("-", "_").lower()] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="morley-study", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key=value file with the same keys as the flags")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--problem", choices=sorted(PROBLEMS))
    p.add_argument("--eps", help='comma-separated list, or "coupled" for eps = 1/N')
    p.add_argument("--N", dest="n", help="comma-separated list of N (multiples of 4)")
    p.add_argument("--estimator", choices=["exact", "double-mesh"])
    p.add_argument("--quad", type=int, help="Gauss points per direction (default 5)")
    p.add_argument("--solver", choices=["direct", "cg"])
    p.add_argument("--format", choices=["csv", "markdown"])
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--dump-mesh", help="also write the mesh breakpoints of every cell as CSV")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_KEYS = ("preset", "problem", "eps", "n", "estimator", "quad", "solver", "format", "out", "dump_mesh")


def config_from_args(args: argparse.Namespace) -> StudyConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    unknown = set(values) - set(_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")

    cfg = preset(values["preset"]) if "preset" in values else StudyConfig()
    if "problem" in values:
        cfg.problem = values["problem"]
        if "estimator" not in values and "preset" not in values:
            cfg.estimator = "exact" if get_problem(cfg.problem, 0.5).exact else "double-mesh"
    try:
        if "eps" in values:
            e = str(values["eps"]).strip()
            cfg.eps = None if e.lower() == "coupled" else _floats(e)
        if "n" in values:
            cfg.n = _ints(str(values["n"]))
        if "quad" in values:
            cfg.quad = int(values["quad"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "estimator" in values:
        cfg.estimator = values["estimator"]
    if "solver" in values:
        cfg.solver = SolveOptions(method=values["solver"])
    if "format" in values:
        cfg.format = values["format"]
    if "out" in values:
        cfg.out = values["out"]
    if "dump_mesh" in values:
        cfg.dump_mesh = values["dump_mesh"]
    return cfg.validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        if cfg.dump_mesh:
            dump_meshes(cfg, cfg.dump_mesh)
        table = run_study(cfg)
        emit(table, cfg.format, cfg.out)
    except (ConfigError, SolverError, OSError) as exc:
        print(f"morley-study: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
