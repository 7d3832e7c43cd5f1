"""Command-line driver.

Examples::

    drillfem --case manufactured --method mixed --element q1q1 --out conv.csv --check
    drillfem --case console --out console.csv --check
    drillfem plot-script conv.csv console.csv --out plots.py

Exit codes: 0 success, 1 configuration error, 2 solver failure,
3 check-mode failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import (
    CONSOLE_RUNS,
    DEFAULT_N_LIST,
    ELEMENT_PAIRS,
    Case,
    Run,
    RunConfig,
    check_console,
    check_manufactured,
    console_csv,
    emit_plot_script,
    manufactured_csv,
    parse_material,
    run_console,
    run_manufactured,
)
from .errors import ConfigurationError, SolverError
from .system import Method

log = logging.getLogger("drillfem")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK = 0, 1, 2, 3
CONFIG_KEYS = {"case", "method", "element", "n_list", "material", "out", "check"}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _split(text: str | None) -> list[str]:
    return [] if not text else [t.strip().lower() for t in text.split(",") if t.strip()]


def _parse_method(name: str) -> Method:
    try:
        return Method(name)
    except ValueError:
        raise ConfigurationError(f"unknown method {name!r}") from None


def _runs(case: Case, methods: list[str], elements: list[str]) -> list[Run]:
    if not methods and not elements:
        if case is Case.CONSOLE:
            return [Run(m, e) for m, e in CONSOLE_RUNS]
        return [Run(Method.MIXED, "q1q1")]
    for e in elements:
        if e not in ELEMENT_PAIRS:
            raise ConfigurationError(f"unknown element pair {e!r}")
    if not methods:
        methods = ["standard" if ELEMENT_PAIRS[e][1] is None else "mixed" for e in elements]
    if not elements:
        raise ConfigurationError("--method given without --element")
    if len(methods) == 1:
        methods = methods * len(elements)
    if len(methods) != len(elements):
        raise ConfigurationError("--method and --element lists differ in length")
    return [Run(_parse_method(m), e) for m, e in zip(methods, elements)]


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag not in (None, False):
            values[key] = flag
    try:
        case = Case(str(values.get("case", "manufactured")).lower())
    except ValueError:
        raise ConfigurationError(f"unknown case {values.get('case')!r}") from None
    runs = _runs(case, _split(values.get("method")), _split(values.get("element")))
    n_list = DEFAULT_N_LIST
    if values.get("n_list"):
        try:
            n_list = tuple(int(t) for t in _split(str(values["n_list"])))
        except ValueError:
            raise ConfigurationError(f"bad n list {values['n_list']!r}") from None
        if not n_list or min(n_list) < 1:
            raise ConfigurationError("mesh sizes must be positive")
    material = parse_material(values["material"]) if values.get("material") else None
    check = values.get("check", False)
    if isinstance(check, str):
        check = check.lower() in ("1", "true", "yes", "on")
    out = Path(values["out"]) if values.get("out") else None
    return RunConfig(case=case, runs=runs, n_list=n_list, material=material, out=out, check=bool(check))


def _write(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
        log.info("wrote %s", path)


def _run_path(out: Path | None, run: Run, many: bool) -> Path | None:
    if out is None or not many:
        return out
    return out.with_name(f"{out.stem}-{run.method.value}-{run.element}{out.suffix}")


def execute(cfg: RunConfig) -> int:
    mat = cfg.resolved_material()
    failures: list[str] = []
    if cfg.case is Case.MANUFACTURED:
        if len(cfg.n_list) < 2:
            raise ConfigurationError("a convergence study needs at least two mesh sizes")
        for run in cfg.runs:
            report = run_manufactured(run, cfg.n_list, mat)
            _write(manufactured_csv(report), _run_path(cfg.out, run, len(cfg.runs) > 1))
            if cfg.check:
                failures += check_manufactured(run, report)
    else:
        results = {run: run_console(run, cfg.n_list, mat) for run in cfg.runs}
        _write(console_csv(results), cfg.out)
        if cfg.check:
            failures += check_console(results)
    for msg in failures:
        log.error("check failed: %s", msg)
    return EXIT_CHECK if failures else EXIT_OK


def _run_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="drillfem", description="Run the manufactured or console benchmark.")
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--case", choices=[c.value for c in Case])
    p.add_argument("--method", help="standard, mixed or hughes; comma list pairs with --element")
    p.add_argument("--element", help="comma list of q1, p1, q1q1, q1p0, p1p1, p1p0")
    p.add_argument("--n-list", dest="n_list", help="comma list of cells per side (default 8,16,32,64)")
    p.add_argument("--material", help="lame:LAM,MU or plane_strain:E,NU")
    p.add_argument("--out", help="CSV output path (stdout if omitted)")
    p.add_argument("--check", action="store_true", help="exit 3 if an expected rate or ordering fails")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _plot_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="drillfem plot-script", description="Emit a matplotlib script for result CSVs.")
    p.add_argument("csv", nargs="*")
    p.add_argument("--out", default="plot_results.py")
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if argv and argv[0] == "plot-script":
            args = _plot_parser().parse_args(argv[1:])
            emit_plot_script(args.csv, args.out)
            return EXIT_OK
        args = _run_parser().parse_args(argv)
        return execute(build_run_config(args))
    except ConfigurationError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except SolverError as exc:
        log.error("solver failure: %s", exc)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
