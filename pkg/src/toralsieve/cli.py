"""Command-line entry point.

Every subcommand writes CSV (or JSON) to ``--output`` or stdout. A run can
be saved with ``--save-config`` and replayed with ``--config``; the config
file has one ``key = value`` per line mirroring the flags.

Exit status: 0 on success, 2 on usage errors, 1 on consistency errors
(failed identities, table integrity, unwritable outputs).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .beta import beta_lambert, solve_beta
from .factor.rho import DEFAULT_BUDGET
from .factor.tables import FactorTable, TableFormatError, TableIntegrityError, load_factor_table
from .figures import (
    FigureDataset,
    FigurePoint,
    ReferenceLine,
    dataset_csv,
    dataset_json,
    dataset_svg,
    fmt,
    write_atomic,
)
from .model import ModelConfig, censored_count, nmax_pmf, run_liminf, run_nmax, tail_slope
from .omega_stats import count_by_omega, nr_naive, nr_selberg, nu, selberg_band, selberg_range
from .orbits import Mat2Q, OrbitSpec, iterate_orbit, named_orbit, ratio_series_figure
from .sporadic import search_sigma
from .surd_forms import QuadForm, SurdSpec, cf_expand, convergents, quadric_orbit_reps, surd_ratio_series

#: orbit indices beyond this need factor tables when reproducing figures
SELF_FACTOR_LIMIT = 300


class UsageError(ValueError):
    pass


class MissingTablesError(LookupError):
    pass


# --- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: tuple[tuple[str, str], ...] = ()
    output: str | None = None
    tables: tuple[str, ...] = ()
    seed: int | None = None

    def to_text(self) -> str:
        lines = [f"subcommand = {self.subcommand}"]
        if self.output is not None:
            lines.append(f"output = {self.output}")
        if self.seed is not None:
            lines.append(f"seed = {self.seed}")
        lines += [f"table = {t}" for t in self.tables]
        lines += [f"{k} = {v}" for k, v in self.params]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        sub, output, seed = None, None, None
        tables: list[str] = []
        params: list[tuple[str, str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "subcommand":
                sub = value
            elif key == "output":
                output = value
            elif key == "seed":
                seed = int(value)
            elif key == "table":
                tables.append(value)
            else:
                params.append((key, value))
        if sub is None:
            raise UsageError("config has no subcommand")
        return cls(sub, tuple(params), output, tuple(tables), seed)

    def to_argv(self, parser: argparse.ArgumentParser) -> list[str]:
        sub = _subparsers(parser).get(self.subcommand)
        if sub is None:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        actions = {a.dest: a for a in sub._actions}
        argv = [self.subcommand]
        for key, value in self.params:
            act = actions.get(key)
            if act is None:
                raise UsageError(f"{self.subcommand} has no option {key!r}")
            if not act.option_strings:
                argv.insert(1, value)
            elif act.nargs == 0:
                if value == "true":
                    argv.append(act.option_strings[0])
            else:
                argv += [act.option_strings[0], value]
        if self.output is not None:
            argv += ["--output", self.output]
        if self.seed is not None:
            argv += ["--seed", str(self.seed)]
        for t in self.tables:
            argv += ["--table", t]
        return argv


_COMMON = {"output", "table", "seed", "save_config", "config", "command", "help"}


def config_from_args(parser: argparse.ArgumentParser, ns: argparse.Namespace) -> RunConfig:
    sub = _subparsers(parser)[ns.command]
    params = []
    for act in sub._actions:
        if act.dest in _COMMON:
            continue
        value = getattr(ns, act.dest, None)
        if value is None or value is False or value == act.default:
            continue
        params.append((act.dest, "true" if value is True else str(value)))
    return RunConfig(ns.command, tuple(params), ns.output, tuple(getattr(ns, "table", None) or ()), ns.seed)


def _subparsers(parser: argparse.ArgumentParser) -> dict[str, argparse.ArgumentParser]:
    for act in parser._actions:
        if isinstance(act, argparse._SubParsersAction):
            return dict(act.choices)
    return {}


# --- helpers ------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _load_tables(paths: Sequence[str]) -> list[FactorTable]:
    return [load_factor_table(p) for p in paths]


def _csv(header: Sequence[str], rows) -> str:
    out = [",".join(header)]
    out += [",".join(str(c) for c in row) for row in rows]
    return "\n".join(out) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- figures ------------------------------------------------------------------


@dataclass(frozen=True)
class FigureRecipe:
    orbit: str
    lines: tuple[int, ...]
    parity: bool = False
    denominator: str = "loglog"
    caption: str = ""


FIGURES = {
    1: FigureRecipe("fibonacci_lucas", (2,), caption="n vs Omega(F_n L_n) / log log(F_n L_n)"),
    2: FigureRecipe("consecutive_fibonacci", (3,), caption="n vs Omega(F_n F_n+1) / log log(F_n F_n+1)"),
    3: FigureRecipe("consecutive_lucas", (2,), caption="n vs Omega(L_n L_n+1) / log log(L_n L_n+1)"),
    4: FigureRecipe("fibonacci_lucas", (2, 3), parity=True, caption="n vs Omega(F_n L_n) / log log(F_n L_n), even/odd n"),
    # both beta_4 and beta_5 are drawn: the expected floor here is unsettled
    5: FigureRecipe("even_fibonacci", (4, 5), caption="n vs Omega(F_2n F_2n+2) / log log(F_2n F_2n+2)"),
    6: FigureRecipe("consecutive_mersenne", (3,), denominator="logn", caption="n vs Omega(M_n M_n+1) / log n"),
}


def missing_table_keys(spec: OrbitSpec, n_max: int, tables: Sequence[FactorTable]) -> list[tuple[str, int]]:
    """Table keys needed for orbit indices above SELF_FACTOR_LIMIT that no table provides."""
    if spec.keys is None:
        return []
    missing = []
    for n in range(SELF_FACTOR_LIMIT + 1, n_max + 1):
        for ck in spec.keys:
            key = (ck.label, ck.index(n))
            if not any(t.get(*key) for t in tables) and key not in missing:
                missing.append(key)
    return missing


def reproduce_figure(
    figure_id: int,
    factor_tables: Sequence[FactorTable] = (),
    n_max: int = SELF_FACTOR_LIMIT,
    omega_budget: int = DEFAULT_BUDGET,
) -> FigureDataset:
    recipe = FIGURES.get(figure_id)
    if recipe is None:
        raise UsageError(f"figure id must be one of {sorted(FIGURES)}")
    spec = named_orbit(recipe.orbit)
    missing = missing_table_keys(spec, n_max, factor_tables)
    if missing:
        shown = ", ".join(f"{lab}_{i}" for lab, i in missing[:20])
        more = f" and {len(missing) - 20} more" if len(missing) > 20 else ""
        raise MissingTablesError(
            f"n_max={n_max} exceeds the self-factoring limit {SELF_FACTOR_LIMIT}; "
            f"factor tables lack {shown}{more}"
        )
    ds = ratio_series_figure(
        spec,
        n_max,
        recipe.lines,
        mark_parity=recipe.parity,
        denominator=recipe.denominator,
        tables=factor_tables,
        omega_budget=omega_budget,
        title=f"Figure {figure_id}: {recipe.caption}",
    )
    ds.metadata["figure"] = figure_id
    ds.metadata["tables"] = len(factor_tables)
    return ds


# --- subcommands --------------------------------------------------------------


def cmd_beta(args, tables) -> str:
    ks = [args.k] if args.k is not None else range(1, args.kmax + 1)
    rows = []
    for k in ks:
        sol = solve_beta(k)
        rows.append((k, fmt(sol.beta), f"{sol.residual:.3e}", sol.method.value))
    return _csv(("k", "beta", "residual", "method"), rows)


def cmd_sieve_count(args, tables) -> str:
    nr = count_by_omega(args.T)
    rmax = args.rmax if args.rmax is not None else len(nr.counts) - 1
    top = selberg_range(args.T) if args.T >= 16 else 0
    rows = []
    for r in range(rmax + 1):
        naive = sel = ratio = lo = hi = ""
        if r >= 1 and args.T >= 3:
            naive = fmt(nr_naive(args.T, r))
        if 1 <= r <= top:
            s = nr_selberg(args.T, r)
            band = selberg_band(args.T, r)
            sel, ratio, lo, hi = fmt(s), fmt(nr[r] / s), fmt(band[0]), fmt(band[1])
        rows.append((r, nr[r], naive, sel, ratio, lo, hi))
    # band columns use the calibrated constant SELBERG_BAND_CONSTANT
    return _csv(("r", "exact", "naive", "selberg", "ratio_selberg", "band_lo", "band_hi"), rows)


def cmd_nu(args, tables) -> str:
    rows = []
    for z in _float_list(args.z):
        v = nu(z, args.P)
        rows.append((fmt(z), f"{v.value:.12f}", f"{v.tail_bound:.3e}", v.truncation_prime))
    return _csv(("z", "value", "tail_bound", "truncation_prime"), rows)


def _nmax_summary(cfg: ModelConfig, R_list, t_lo: int, t_hi: int) -> tuple[dict, list]:
    summary = {
        "k": cfg.k,
        "C": str(cfg.C),
        "n_max": cfg.n_max,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "beta_k": solve_beta(cfg.k).beta,
        "R": {},
    }
    sample_rows = []
    for R in R_list:
        samples = run_nmax(cfg, R)
        summary["R"][str(R)] = {
            "censored_count": censored_count(samples),
            "no_event": sum(s.value == 0 for s in samples),
            "tail_slope": tail_slope(samples, t_lo, t_hi),
            "tail_window": [t_lo, t_hi],
            "pmf": {str(t): p for t, p in nmax_pmf(samples).items()},
        }
        sample_rows += [(s.trial, s.R, s.value, int(s.censored)) for s in samples]
    return summary, sample_rows


def cmd_model_run(args, tables) -> str:
    R_list = _int_list(args.R) if args.R else []
    cfg = ModelConfig(args.k, args.C, args.nmax, seed=args.seed or 0, R_list=tuple(R_list), trials=args.trials)
    rows = []
    for trial in range(cfg.trials):
        run = run_liminf(cfg, trial)
        rows += [(trial, r.n, r.omega, fmt(r.ratio), fmt(r.running_min)) for r in run.records]
    if R_list:
        summary, _ = _nmax_summary(cfg, R_list, 20, 200)
        if args.json:
            write_atomic(args.json, _json(summary))
    return _csv(("trial", "n", "omega", "ratio", "running_min"), rows)


def cmd_nmax_run(args, tables) -> str:
    R_list = _int_list(args.R)
    cfg = ModelConfig(args.k, args.C, args.nmax, seed=args.seed or 0, R_list=tuple(R_list), trials=args.trials)
    summary, sample_rows = _nmax_summary(cfg, R_list, args.t_lo, args.t_hi)
    if args.samples_csv:
        write_atomic(args.samples_csv, _csv(("trial", "R", "value", "censored"), sample_rows))
    return _json(summary)


def _orbit_spec(args) -> OrbitSpec:
    if args.named:
        if args.gamma or args.v0:
            raise UsageError("--named excludes --gamma/--v0")
        return named_orbit(args.named)
    if not (args.gamma and args.v0):
        raise UsageError("give --named, or both --gamma and --v0")
    gamma = Mat2Q.parse(args.gamma)
    v0 = _int_list(args.v0)
    if len(v0) != 2:
        raise UsageError("--v0 needs two integers")
    return OrbitSpec(gamma, (v0[0], v0[1]), "custom")


def cmd_orbit(args, tables) -> str:
    spec = _orbit_spec(args)
    rows, pts = [], []
    for p in iterate_orbit(
        spec, args.nmax, args.budget, tables, allow_nonhyperbolic=args.allow_nonhyperbolic
    ):
        if p.ratio is None:
            continue
        rows.append((p.n, len(str(abs(p.x))), len(str(abs(p.y))), p.omega.value, int(p.omega.exact), fmt(p.ratio), fmt(p.running_min)))
        pts.append(FigurePoint(p.n + spec.index_offset, p.ratio, "all", p.omega.value, p.omega.exact))
    if args.svg:
        lines = [ReferenceLine(f"beta_{k}", solve_beta(k).beta) for k in _int_list(args.beta_lines)]
        ds = FigureDataset(f"{spec.label} orbit", "Omega(xy) / log log|xy|", pts, lines)
        write_atomic(args.svg, dataset_svg(ds))
    return _csv(("n", "x_digits", "y_digits", "omega", "exact", "ratio", "running_min"), rows)


def cmd_sporadic(args, tables) -> str:
    res = search_sigma(args.pair, args.nmax)
    return _json(
        {
            "pair": res.pair_label,
            "n_bound": res.n_bound,
            "hits": list(res.hits),
            "prediction": res.prediction,
            "certification_level": res.certification,
            "one_prime": list(res.one_prime),
        }
    )


def cmd_surd(args, tables) -> str:
    surd = SurdSpec(args.P, args.Q, args.D)
    ds = surd_ratio_series(surd, args.nmax, tables, args.budget)
    digits = {c.n: (len(str(abs(c.p))), len(str(abs(c.q)))) for c in convergents(cf_expand(surd), max(args.nmax, 0))}
    rows, best = [], None
    for p in ds.points:
        best = p.ratio if best is None else min(best, p.ratio)
        rows.append((p.n, *digits[p.n], p.omega, int(p.exact), fmt(p.ratio), fmt(best), fmt(p.aux)))
    if args.json:
        write_atomic(args.json, dataset_json(ds))
    if args.svg:
        write_atomic(args.svg, dataset_svg(ds))
    return _csv(("n", "p_digits", "q_digits", "omega", "exact", "ratio", "running_min", "loglog_pq"), rows)


def cmd_forms(args, tables) -> str:
    form = QuadForm(args.A, args.B, args.C)
    res = quadric_orbit_reps(form, args.t, args.height, strict=not args.no_strict, both_signs=args.both_signs)
    groups = res if isinstance(res, tuple) else (res,)
    rows = []
    for g in groups:
        for i, orb in enumerate(g.orbits):
            for v in orb:
                rows.append((g.t, i, v[0], v[1], int(v == orb[0])))
    if args.json:
        gamma = groups[0].gamma
        meta = {
            "form": [form.A, form.B, form.C],
            "discriminant": form.discriminant,
            "automorph": [[str(e) for e in row] for row in gamma.rows()],
            "height": args.height,
            "box_limited": True,
            "representatives": {str(g.t): [list(v) for v in g.reps] for g in groups},
        }
        write_atomic(args.json, _json(meta))
    return _csv(("t", "orbit", "x", "y", "representative"), rows)


def cmd_figure(args, tables) -> str:
    ds = reproduce_figure(args.figure_id, tables, args.nmax, args.budget)
    if args.json:
        write_atomic(args.json, dataset_json(ds))
    if args.svg:
        write_atomic(args.svg, dataset_svg(ds))
    return dataset_csv(ds)


COMMANDS = {
    "beta": cmd_beta,
    "sieve-count": cmd_sieve_count,
    "nu": cmd_nu,
    "model-run": cmd_model_run,
    "nmax-run": cmd_nmax_run,
    "orbit": cmd_orbit,
    "sporadic": cmd_sporadic,
    "surd": cmd_surd,
    "forms": cmd_forms,
    "figure": cmd_figure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toralsieve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="replay a saved key = value config file")
    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("-o", "--output", help="write the main result here instead of stdout")
    base.add_argument("--seed", type=int, help="random seed")
    base.add_argument("--save-config", help="also save this invocation as a config file")
    common = argparse.ArgumentParser(add_help=False, parents=[base])
    common.add_argument("--table", action="append", help="factor table file (repeatable)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("beta", parents=[base], help="beta_k constants")
    p.add_argument("--table", dest="kmax", type=int, default=10, help="rows k = 1..K")
    p.add_argument("--k", type=int, help="a single k instead of a table")

    p = sub.add_parser("sieve-count", parents=[common], help="exact N_r(T) with main terms")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--rmax", type=int)

    p = sub.add_parser("nu", parents=[common], help="Selberg density nu(z)")
    p.add_argument("--z", required=True, help="comma-separated z values in (0, 1.5]")
    p.add_argument("--P", type=int, default=10**6)

    p = sub.add_parser("model-run", parents=[common], help="one liminf trajectory of the random model")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--C", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--trials", type=int, default=1, help="independent trajectories")
    p.add_argument("--R", help="also sample the last R-almost-prime index (comma-separated R)")
    p.add_argument("--json", help="summary JSON for the --R samples")

    p = sub.add_parser("nmax-run", parents=[common], help="samples of the last R-almost-prime index")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--C", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--R", required=True, help="comma-separated thresholds")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--t-lo", type=int, default=20)
    p.add_argument("--t-hi", type=int, default=200)
    p.add_argument("--samples-csv")

    p = sub.add_parser("orbit", parents=[common], help="Omega ratio series along an orbit")
    p.add_argument("--named")
    p.add_argument("--gamma", help="a,b,c,d row-major; entries may be p/q")
    p.add_argument("--v0", help="x,y")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--allow-nonhyperbolic", action="store_true")
    p.add_argument("--svg")
    p.add_argument("--beta-lines", default="2")

    p = sub.add_parser("sporadic", parents=[common], help="indices with both pair members prime")
    p.add_argument("--pair", choices=["FF", "LL", "FL"], required=True)
    p.add_argument("--nmax", type=int, default=1000)

    p = sub.add_parser("surd", parents=[common], help="convergent series of (P + sqrt D)/Q")
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--json")
    p.add_argument("--svg")

    p = sub.add_parser("forms", parents=[common], help="solutions of Q(x, y) = t grouped into orbits")
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--C", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--no-strict", action="store_true", help="allow t that is not square-free")
    p.add_argument("--both-signs", action="store_true")
    p.add_argument("--json")

    p = sub.add_parser("figure", parents=[common], help="reproduce one of the six ratio figures")
    p.add_argument("figure_id", type=int)
    p.add_argument("--nmax", type=int, default=SELF_FACTOR_LIMIT)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--json")
    p.add_argument("--svg")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    ns = parser.parse_args(argv)
    if ns.config:
        try:
            cfg = RunConfig.from_text(Path(ns.config).read_text(encoding="utf-8"))
            ns = parser.parse_args(cfg.to_argv(parser))
        except (UsageError, OSError) as exc:
            parser.error(str(exc))
    if ns.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        tables = _load_tables(getattr(ns, "table", None) or ())
        if ns.save_config:
            write_atomic(ns.save_config, config_from_args(parser, ns).to_text())
        text = COMMANDS[ns.command](ns, tables)
        if ns.output:
            write_atomic(ns.output, text)
        else:
            sys.stdout.write(text)
    except (TableFormatError, TableIntegrityError) as exc:
        print(f"toralsieve: factor table rejected: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, KeyError) as exc:
        print(f"toralsieve: usage error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, LookupError, OSError) as exc:
        print(f"toralsieve: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
