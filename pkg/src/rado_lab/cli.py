"""rado-lab command line: analyze, solutions, primes, hyper, color, mc.

Exit status: 0 on success, 2 when a verdict came back unknown, 1 on error.
Resolution order for settings: built-in defaults, then --config, then flags.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click
from click.core import ParameterSource

from . import __version__
from .coloring import DEFAULT_BUDGET_NODES, find_proper_coloring, is_A_r_rado, min_monochromatic
from .exact import ExactLogValue, RationalPower, format_fraction
from .groundsets import GroundSet, parse_ground
from .hypergraph import (
    OrderedHypergraph,
    complete_graph,
    from_graph_copies,
    from_solutions,
    hat_p_hypergraph,
    m2_density,
    p_conditions_report,
    rado_minimal_reduce,
    restriction,
)
from .matrices import (
    IntegerMatrix,
    UndefinedParameterError,
    columns_condition,
    is_abundant,
    is_irredundant,
    is_translation_invariant,
    m_parameter,
    rank_rational,
)
from .montecarlo import (
    DEFAULT_MC_BUDGET,
    ap_second_moment,
    estimate_rado_prob,
    threshold_fit,
    write_csv,
)
from .primes import ap_density_report
from .solutions import (
    ProjectedSolutionQuery,
    compatibility_report,
    count_solutions,
    extendability,
    k_distinct_stats,
    key_bounds_check,
    projected_solutions,
    richness,
    threshold_table,
)
from .structures import KINDS, detect_structure

COMMANDS = ("analyze", "solutions", "primes", "hyper", "color", "mc")


class ConfigError(click.ClickException):
    exit_code = 1


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class ExperimentConfig:
    command: str
    matrix: Optional[str] = None
    ground: Tuple[str, ...] = ()
    r: int = 2
    p: Tuple[float, ...] = ()
    trials: int = 100
    seed: int = 0
    budget_nodes: Optional[int] = None
    threads: int = 1
    out: Optional[str] = None
    json: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)

    COMMON = ("matrix", "ground", "r", "p", "trials", "seed", "budget_nodes", "threads", "out", "json")

    def resolved(self) -> Dict[str, Any]:
        d = {name: getattr(self, name) for name in self.COMMON}
        d["ground"] = list(self.ground)
        d["p"] = list(self.p)
        d.update(self.options)
        return {"command": self.command, **{k: v for k, v in sorted(d.items()) if k not in ("out", "json", "threads")}}

    def header_lines(self) -> List[str]:
        return [
            f"# rado-lab {__version__}",
            "# config: " + json.dumps(self.resolved(), sort_keys=True),
            f"# seed: {self.seed}",
        ]

    def load_matrix(self) -> IntegerMatrix:
        if self.matrix is None:
            raise ConfigError(f"{self.command} needs --matrix")
        return _matrix_from(self.matrix)

    def grounds(self) -> List[GroundSet]:
        return [parse_ground(g) for g in self.ground]


def _matrix_from(source: str) -> IntegerMatrix:
    path = Path(source)
    if path.exists():
        return IntegerMatrix.load(path)
    text = source.replace(";", "\n").replace(",", " ")
    if all(tok.lstrip("+-").isdigit() for tok in text.split()) and text.strip():
        return IntegerMatrix.parse(text)
    raise FileNotFoundError(f"matrix file not found: {source}")


def _read_config_file(path: str) -> Dict[str, Any]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    text = p.read_text()
    if text.lstrip().startswith("#"):
        # An output file: reuse the config echoed in its header.
        for line in text.splitlines():
            if line.startswith("# config: "):
                text = line[len("# config: ") :]
                break
        else:
            raise ConfigError(f"{path}: no '# config:' header line")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def parse_config(command: str, values: Dict[str, Any], explicit: Sequence[str] = (), config_path: Optional[str] = None) -> ExperimentConfig:
    """Merge defaults, an optional config file and explicitly given flags."""
    merged = dict(values)
    if config_path:
        file_values = _read_config_file(config_path)
        file_command = file_values.pop("command", command)
        if file_command != command:
            raise ConfigError(f"{config_path}: config is for '{file_command}', not '{command}'")
        for key, val in file_values.items():
            if key not in merged:
                raise ConfigError(f"{config_path}: unknown key '{key}'")
            if key not in explicit:
                merged[key] = tuple(val) if isinstance(val, list) else val
    common = {k: merged.pop(k) for k in ExperimentConfig.COMMON if k in merged}
    cfg = ExperimentConfig(command=command, options=merged, **common)
    cfg.ground = tuple(cfg.ground or ())
    cfg.p = tuple(float(x) for x in (cfg.p or ()))
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.r < 1:
        raise ConfigError(f"--r must be >= 1, got {cfg.r}")
    if cfg.trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {cfg.trials}")
    if cfg.seed < 0:
        raise ConfigError(f"--seed must be >= 0, got {cfg.seed}")
    if cfg.threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {cfg.threads}")
    for p in cfg.p:
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"--p must lie in [0, 1], got {p}")
    if cfg.matrix is not None:
        try:
            _matrix_from(cfg.matrix)
        except FileNotFoundError as exc:
            raise ConfigError(f"--matrix: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"--matrix {cfg.matrix}: {exc}") from exc
    for g in cfg.ground:
        try:
            parse_ground(g)
        except (ValueError, FileNotFoundError) as exc:
            raise ConfigError(f"--ground {g}: {exc}") from exc
    hyper = cfg.options.get("hyper")
    if hyper and not Path(hyper).exists():
        raise ConfigError(f"--hyper: hypergraph file not found: {hyper}")
    for key in ("out", "json"):
        target = getattr(cfg, key)
        if target and not Path(target).resolve().parent.exists():
            raise ConfigError(f"--{key}: directory does not exist for {target}")


# ---------------------------------------------------------------------------
# Rendering


def _exact(x: Any) -> Any:
    """JSON form of exact values: "num/den" plus a float where useful."""
    if isinstance(x, Fraction):
        return {"exact": format_fraction(x), "float": float(x)}
    if isinstance(x, (ExactLogValue, RationalPower)):
        return {"exact": x.render(), "float": float(x)}
    return x


def _cols(W: Sequence[int]) -> str:
    return "{" + ",".join(map(str, W)) + "}"


def _parse_cols(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    if text is None:
        return None
    text = text.strip().strip("{}")
    if not text:
        return ()
    try:
        return tuple(sorted(int(t) for t in text.replace(",", " ").split()))
    except ValueError as exc:
        raise ConfigError(f"bad column set {text!r}; use e.g. 1,2") from exc


def _parse_tuple(text: str) -> Tuple[int, ...]:
    return tuple(int(t) for t in text.strip().strip("()").replace(",", " ").split())


class Output:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.report: Dict[str, Any] = {}
        self.tables: List[Tuple[str, Sequence[str], List[List[Any]]]] = []
        self.unknown = False

    def line(self, text: str) -> None:
        click.echo(text)

    def table(self, name: str, columns: Sequence[str], rows: List[List[Any]]) -> None:
        self.tables.append((name, columns, rows))
        click.echo(f"[{name}]")
        click.echo(",".join(columns))
        for row in rows:
            click.echo(",".join(str(v) for v in row))

    def finish(self) -> int:
        cfg = self.cfg
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write("\n".join(cfg.header_lines()) + "\n")
                for name, columns, rows in self.tables:
                    if len(self.tables) > 1:
                        fh.write(f"# table: {name}\n")
                    fh.write(",".join(columns) + "\n")
                    for row in rows:
                        fh.write(",".join(str(v) for v in row) + "\n")
        if cfg.json:
            payload = {
                "header": {"tool": f"rado-lab {__version__}", "config": cfg.resolved(), "seed": cfg.seed},
                **self.report,
            }
            Path(cfg.json).write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
        return 2 if self.unknown else 0


# ---------------------------------------------------------------------------
# Commands


def run_analyze(cfg: ExperimentConfig, out: Output) -> None:
    A = cfg.load_matrix()
    full = tuple(range(1, A.k + 1))
    report: Dict[str, Any] = {"matrix": [list(r) for r in A.rows], "rank_Q": rank_rational(A, full)}
    cert = columns_condition(A)
    report["partition_regular"] = cert is not None
    report["columns_condition_Q"] = cert.render() if cert else None
    out.line(f"matrix: {A.rows}")
    out.line(f"rank over Q: {report['rank_Q']}")
    out.line(f"columns condition over Q: {'yes' if cert else 'no'}")
    if cert:
        out.line(cert.render())
    grounds: Dict[str, Any] = {}
    targets: List[Tuple[str, Any, Optional[GroundSet]]] = [("Q", "Q", None)]
    targets += [(S.spec, S, S) for S in cfg.grounds()]
    for name, over, S in targets:
        entry: Dict[str, Any] = {}
        try:
            m = m_parameter(A, over)
            entry["m"] = _exact(m.value)
            entry["m_witnesses"] = [sorted(W) for W in m.witnesses]
            entry["strictly_balanced"] = m.strictly_balanced
            out.line(f"[{name}] m = {m.render()} (~{float(m):.6g}), witnesses {[sorted(W) for W in m.witnesses]}, "
                     f"strictly balanced: {m.strictly_balanced}")
        except UndefinedParameterError as exc:
            entry["m"] = None
            entry["m_error"] = str(exc)
            out.line(f"[{name}] m undefined: {exc}")
        if S is not None:
            rank = S.rank_provider().rank(A, full)
            entry["rank"] = _exact(rank)
            out.line(f"[{name}] rank = {rank.render()}")
            if S.group is not None:
                s = S.exponent()
                c = columns_condition(A, s)
                entry["columns_condition_mod"] = s
                entry["columns_condition"] = c.render() if c else None
                entry["translation_invariant"] = is_translation_invariant(A, S.group)
                out.line(f"[{name}] {s}-columns condition: {'yes' if c else 'no'}")
                if c:
                    out.line(c.render())
                out.line(f"[{name}] translation invariant: {entry['translation_invariant']}")
            entry["abundant"] = is_abundant(A, S)
            entry["irredundant"] = is_irredundant(A, S)
            out.line(f"[{name}] abundant: {entry['abundant']}; irredundant: {entry['irredundant']}")
        grounds[name] = entry
    report["over"] = grounds
    out.report.update(report)


def run_solutions(cfg: ExperimentConfig, out: Output) -> None:
    A = cfg.load_matrix()
    grounds = cfg.grounds()
    if not grounds:
        raise ConfigError("solutions needs at least one --ground")
    opts = cfg.options
    W = _parse_cols(opts.get("W"))
    Y = _parse_cols(opts.get("Y"))
    rows: List[List[Any]] = []
    per: Dict[str, Any] = {}
    for S in grounds:
        entry: Dict[str, Any] = {"size": S.size}
        total = count_solutions(A, S)
        stats = k_distinct_stats(A, S)
        entry["solutions"] = total
        entry["k_distinct"] = stats.distinct
        out.line(f"[{S.spec}] |Sol| = {total}; k-distinct = {stats.distinct} (ratio {format_fraction(stats.ratio)})")
        if W is not None or Y is not None:
            q = ProjectedSolutionQuery(W or (), Y if Y is not None else tuple(range(1, A.k + 1)),
                                       tuple(_parse_tuple(t) for t in opts.get("w0") or ()))
            res = projected_solutions(A, S, q, listing=bool(opts.get("list")))
            entry["projected"] = {"W": list(q.W), "Y": list(q.Y), "w0": [list(t) for t in q.w0], "count": res.count}
            out.line(f"[{S.spec}] |Sol(w0, {_cols(q.W)}, {_cols(q.Y)})| = {res.count}")
            if res.rows is not None:
                entry["projected"]["rows"] = [list(r) for r in res.rows]
                for r in res.rows:
                    out.line("  " + " ".join(map(str, r)))
        table = threshold_table(A, S)
        for e in table.entries:
            p = e.p
            rows.append([S.spec, _cols(e.W), e.count, p.render() if p else "inf", float(p) if p else "inf"])
        entry["p_hat"] = _exact(table.p_hat)
        entry["p_hat_maximizers"] = [list(m) for m in table.maximizers]
        entry["warnings"] = list(table.warnings)
        out.line(f"[{S.spec}] p_hat = {table.p_hat.render()} at {[_cols(m) for m in table.maximizers]}")
        rich = richness(A, S)
        entry["richness"] = _exact(rich) if isinstance(rich, Fraction) else rich
        ext = extendability(A, S)
        entry["extendability"] = {"B": _exact(ext.B), "W": list(ext.W), "Y": list(ext.Y), "method": ext.method}
        out.line(f"[{S.spec}] richness = {format_fraction(rich) if isinstance(rich, Fraction) else rich}; "
                 f"extendability B = {format_fraction(ext.B)} ({ext.method})")
        kb = key_bounds_check(A, S, samples=opts.get("samples"), seed=cfg.seed)
        entry["key_bounds"] = {"applicable": kb.applicable, "passed": kb.passed, "checked": kb.checked,
                               "violations": len(kb.violations)}
        out.line(f"[{S.spec}] " + kb.render().splitlines()[0])
        per[S.spec] = entry
    out.table("threshold", ["ground", "W", "count", "p_W", "p_W_float"], rows)
    out.report["grounds"] = per
    if len(grounds) >= 2:
        rep = compatibility_report(A, grounds, _parse_cols(opts.get("X")))
        crow = []
        for row in rep.rows:
            for e in row.entries:
                crow.append([row.spec, e.x_source, _cols(e.X), _cols(e.W), _cols(e.W2), e.value.render(), float(e.value)])
        out.table("compatibility", ["ground", "x_source", "X", "W", "W2", "value", "value_float"], crow)
        trends = {f"{s}:{_cols(X)}:{_cols(Wa)}:{_cols(Wb)}": t for (s, X, Wa, Wb), t in rep.entry_trend.items()}
        out.report["compatibility_trend"] = trends
        out.report["weak_trend"] = {_cols(k): v for k, v in rep.weak_trend.items()}
        out.report["strong_trend"] = {_cols(k): v for k, v in rep.strong_trend.items()}
        for key, t in trends.items():
            out.line(f"trend {key}: {t}")


def run_primes(cfg: ExperimentConfig, out: Output) -> None:
    ns = cfg.options.get("n") or ()
    if not ns:
        raise ConfigError("primes needs at least one --n")
    k = int(cfg.options.get("k") or 3)
    rows = [[r.n, r.count, repr(r.count_ratio), r.max_through, repr(r.through_ratio)] for r in ap_density_report(k, ns)]
    out.table("ap_density", ["n", "count", "count_ratio", "max_through", "through_ratio"], rows)
    out.report["k"] = k
    out.report["rows"] = rows


def _load_hypergraph(cfg: ExperimentConfig) -> List[OrderedHypergraph]:
    opts = cfg.options
    if opts.get("hyper"):
        return [OrderedHypergraph.load(opts["hyper"])]
    if opts.get("graph"):
        F = _parse_graph(opts["graph"])
        ns = opts.get("n") or ()
        if not ns:
            raise ConfigError("--graph needs at least one --n")
        return [from_graph_copies(F, int(n)) for n in ns]
    A = cfg.load_matrix()
    grounds = cfg.grounds()
    if not grounds:
        raise ConfigError("hyper needs --hyper, --graph or --matrix with --ground")
    return [from_solutions(A, S) for S in grounds]


def _parse_graph(text: str) -> List[Tuple[str, str]]:
    """"K3" for a complete graph, or an edge list such as "a-b,b-c"."""
    t = text.strip()
    if t[:1] in "Kk" and t[1:].isdigit():
        return complete_graph(int(t[1:]))
    edges = []
    for part in t.split(","):
        a, sep, b = part.strip().partition("-")
        if not sep or not a or not b:
            raise ConfigError(f"bad graph edge {part!r}; use e.g. 0-1,1-2")
        edges.append((a, b))
    return edges


def run_hyper(cfg: ExperimentConfig, out: Output) -> None:
    opts = cfg.options
    family = _load_hypergraph(cfg)
    rows = []
    for i, H in enumerate(family):
        entry: Dict[str, Any] = {"v": H.v, "e": H.e, "k": H.k}
        out.line(f"[{i}] k = {H.k}, v = {H.v}, e = {H.e}")
        if opts.get("restrict"):
            R = restriction(H, _parse_cols(opts["restrict"]) or ())
            entry["restriction"] = {"W": opts["restrict"], "e": R.e}
            out.line(f"[{i}] restriction to {opts['restrict']}: e = {R.e}")
        table = hat_p_hypergraph(H)
        for e in table.entries:
            rows.append([i, H.v, _cols(e.W), e.edges, e.f.render() if e.f else "inf", float(e.f) if e.f else "inf"])
        entry["p_hat"] = _exact(table.p_hat)
        out.line(f"[{i}] p_hat = {table.p_hat.render()}")
        for kind in opts.get("detect") or ():
            w = detect_structure(H, kind, opts.get("max_length"), cfg.budget_nodes or 10**6)
            entry.setdefault("structures", {})[kind] = [sorted(e) for e in w.edges] if w else None
            out.line(f"[{i}] {kind}: {w.render(H) if w else 'none'}")
        if opts.get("minimal"):
            M = rado_minimal_reduce(H, cfg.r, cfg.budget_nodes)
            entry["rado_minimal"] = [list(e) for e in M.edge_tuples()]
            out.line(f"[{i}] {cfg.r}-Ramsey-minimal core: {M.e} edges")
            if opts.get("save"):
                M.save(opts["save"])
        elif opts.get("save") and len(family) == 1:
            H.save(opts["save"])
        out.report.setdefault("hypergraphs", []).append(entry)
    out.table("f_W", ["index", "v", "W", "edges", "f_W", "f_W_float"], rows)
    if opts.get("p_report"):
        rep = p_conditions_report(family, _parse_cols(opts.get("X")))
        out.report["p_trends"] = rep.trends
        for key, t in rep.trends.items():
            out.line(f"trend {key}: {t}")
    if opts.get("graph"):
        out.report["m2"] = _exact(m2_density(_parse_graph(opts["graph"])))


def run_color(cfg: ExperimentConfig, out: Output) -> None:
    opts = cfg.options
    budget = cfg.budget_nodes or DEFAULT_BUDGET_NODES
    if opts.get("hyper"):
        H = OrderedHypergraph.load(opts["hyper"])
        verdicts = [("hypergraph", find_proper_coloring(H, cfg.r, budget), H)]
    else:
        A = cfg.load_matrix()
        grounds = cfg.grounds()
        if not grounds:
            raise ConfigError("color needs --ground or --hyper")
        if opts.get("min_mono"):
            for S in grounds:
                mm = min_monochromatic(A, S, cfg.r, mode=opts.get("mode") or "exhaustive",
                                       samples=opts.get("samples") or 200, seed=cfg.seed)
                out.line(f"[{S.spec}] min monochromatic = {mm.value} ({'exact' if mm.exact else 'upper bound'})")
                out.report.setdefault("min_mono", {})[S.spec] = {"value": mm.value, "exact": mm.exact,
                                                                   "coloring": list(mm.coloring.colors)}
            return
        verdicts = [(S.spec, is_A_r_rado(A, S, cfg.r, budget), S) for S in grounds]
    for name, v, obj in verdicts:
        out.line(f"[{name}] r = {cfg.r}: {v.verdict} ({v.nodes} nodes, {v.millis:.1f} ms)")
        if v.certificate is not None:
            labels = [obj.label(i) for i in range(len(v.certificate))]
            out.line("coloring: " + v.certificate.to_text(labels).replace("\n", " "))
        out.report.setdefault("verdicts", {})[name] = v.to_json()
        if v.verdict == "unknown":
            out.unknown = True


def run_mc(cfg: ExperimentConfig, out: Output) -> None:
    opts = cfg.options
    budget = cfg.budget_nodes or DEFAULT_MC_BUDGET
    if opts.get("second_moment"):
        ns = opts.get("n") or ()
        if not ns or not cfg.p:
            raise ConfigError("--second-moment needs --n and --p")
        rows = []
        for n in ns:
            for p in cfg.p:
                sm = ap_second_moment(int(n), int(opts.get("k") or 3), p, cfg.trials, cfg.seed)
                rows.append([n, p, sm.ap_count, format_fraction(sm.expectation), float(sm.expectation),
                             sm.pairs_one, sm.pairs_two_plus, float(sm.variance), float(sm.variance_bound),
                             repr(sm.simulated_mean), repr(sm.simulated_se), cfg.trials, cfg.seed])
                out.report.setdefault("second_moment", []).append(sm.summary())
        out.table("second_moment", ["n", "p", "aps", "mean_exact", "mean_float", "pairs_one", "pairs_two_plus",
                                    "variance", "variance_bound", "sim_mean", "sim_se", "trials", "seed"], rows)
        return
    A = cfg.load_matrix()
    grounds = cfg.grounds()
    if not grounds:
        raise ConfigError("mc needs at least one --ground")
    if opts.get("threshold_fit"):
        fit = threshold_fit(A, grounds, cfg.r, cfg.trials, cfg.seed, budget, cfg.threads,
                            ratio=float(opts.get("ratio") or 1.2))
        rows = fit.csv_rows()
        out.table("mc", list(_mc_columns()), rows)
        out.report.update(fit.summary())
        for m in fit.members:
            status = m.error or ("usable" if m.usable else "not usable")
            out.line(f"n = {m.n}: p_half = {m.p_half} in [{m.p_lo}, {m.p_hi}] ({status})")
        out.line(f"slope = {fit.slope} +- {fit.slope_se}; reference = {fit.reference_slope}")
        unknowns = sum(pt.unknowns for m in fit.members for pt in m.points)
        out.unknown = unknowns > 0
        return
    if not cfg.p:
        raise ConfigError("mc needs --p values or --threshold-fit")
    rows = []
    unknowns = 0
    for S in grounds:
        for p in cfg.p:
            est = estimate_rado_prob(A, S, cfg.r, p, cfg.trials, cfg.seed, budget, cfg.threads)
            rows.append(est.csv_row())
            unknowns += est.unknowns
            out.report.setdefault("estimates", []).append(
                {"n": est.n, "p": p, "estimate": est.estimate, "ci": [est.ci_lo, est.ci_hi], "unknown_rate": est.unknown_rate}
            )
    out.table("mc", list(_mc_columns()), rows)
    out.unknown = unknowns > 0


def _mc_columns() -> Sequence[str]:
    from .montecarlo import CSV_COLUMNS

    return CSV_COLUMNS


RUNNERS = {
    "analyze": run_analyze,
    "solutions": run_solutions,
    "primes": run_primes,
    "hyper": run_hyper,
    "color": run_color,
    "mc": run_mc,
}


def run_command(cfg: ExperimentConfig) -> int:
    out = Output(cfg)
    for line in cfg.header_lines():
        click.echo(line)
    RUNNERS[cfg.command](cfg, out)
    return out.finish()


# ---------------------------------------------------------------------------
# click wiring


def common_options(f):
    opts = [
        click.option("--config", "config_path", type=str, default=None, help="JSON config file (or a previous output file)."),
        click.option("--matrix", type=str, default=None, help="Matrix file, one row per line, or inline rows like '1 1 -1'."),
        click.option("--ground", type=str, multiple=True, help="Ground set, e.g. interval:100, cyclic:36, power:Z4:3."),
        click.option("--r", "r", type=int, default=2, show_default=True, help="Number of colors."),
        click.option("--p", "p", type=float, multiple=True, help="Sampling probability (repeatable)."),
        click.option("--trials", type=int, default=100, show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--budget-nodes", "budget_nodes", type=int, default=None, help="Search node budget."),
        click.option("--threads", type=int, default=1, envvar="RADO_THREADS", show_default=True),
        click.option("--out", type=str, default=None, help="CSV output path."),
        click.option("--json", "json", type=str, default=None, help="JSON output path."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _dispatch(command: str) -> int:
    ctx = click.get_current_context()
    values = dict(ctx.params)
    config_path = values.pop("config_path", None)
    explicit = [
        name for name in values
        if ctx.get_parameter_source(name) in (ParameterSource.COMMANDLINE, ParameterSource.ENVIRONMENT)
    ]
    cfg = parse_config(command, values, explicit, config_path)
    return run_command(cfg)


@click.group()
@click.version_option(__version__, prog_name="rado-lab")
def cli() -> None:
    """Exact arithmetic-Ramsey quantities, Rado verdicts and threshold experiments."""


@cli.command()
@common_options
def analyze(**_: Any) -> int:
    """Ranks, columns conditions, m-parameters, abundance, irredundancy."""
    return _dispatch("analyze")


@cli.command()
@common_options
@click.option("--W", "W", type=str, default=None, help="Fixed columns W, e.g. 1,2.")
@click.option("--Y", "Y", type=str, default=None, help="Projection columns Y.")
@click.option("--w0", multiple=True, help="Element fixed at each column of W, in order.")
@click.option("--list", "list", is_flag=True, help="List the projected solutions.")
@click.option("--X", "X", type=str, default=None, help="X for the compatibility report.")
@click.option("--samples", type=int, default=None, help="Sampled triples for the key-bounds check.")
def solutions(**_: Any) -> int:
    """Solution counts, projections, p_W tables, richness, extendability, key bounds."""
    return _dispatch("solutions")


@cli.command()
@common_options
@click.option("--n", "n", type=int, multiple=True, help="Prime bound (repeatable).")
@click.option("--k", "k", type=int, default=3, show_default=True)
def primes(**_: Any) -> int:
    """Sieve, k-AP counts and the density report."""
    return _dispatch("primes")


@cli.command()
@common_options
@click.option("--hyper", type=str, default=None, help="Hypergraph file.")
@click.option("--graph", type=str, default=None, help="Graph F for copy hypergraphs: K3 or a-b,b-c.")
@click.option("--n", "n", type=int, multiple=True, help="Sizes of K_n for --graph.")
@click.option("--restrict", type=str, default=None)
@click.option("--detect", type=click.Choice(KINDS), multiple=True)
@click.option("--max-length", "max_length", type=int, default=None)
@click.option("--minimal", is_flag=True, help="Greedy Rado-minimal core.")
@click.option("--p-report", "p_report", is_flag=True, help="(P1)-(P5) trend report over the family.")
@click.option("--X", "X", type=str, default=None)
@click.option("--save", type=str, default=None, help="Write the hypergraph (or its core) to this file.")
def hyper(**_: Any) -> int:
    """Build, restrict and inspect ordered hypergraphs."""
    return _dispatch("hyper")


@cli.command()
@common_options
@click.option("--rado", is_flag=True, help="Decide the (A,r)-Rado property (default).")
@click.option("--hyper", type=str, default=None, help="Decide r-Ramsey for a hypergraph file.")
@click.option("--min-mono", "min_mono", is_flag=True)
@click.option("--mode", type=click.Choice(["exhaustive", "sampled"]), default="exhaustive")
@click.option("--samples", type=int, default=200)
def color(**_: Any) -> int:
    """Rado and Ramsey verdicts with certificates; minimum monochromatic counts."""
    return _dispatch("color")


@cli.command()
@common_options
@click.option("--estimate", is_flag=True, help="Estimate P[rado] at each --p (default).")
@click.option("--threshold-fit", "threshold_fit", is_flag=True)
@click.option("--ratio", type=float, default=1.2, show_default=True, help="Bracket width for bisection.")
@click.option("--second-moment", "second_moment", is_flag=True)
@click.option("--n", "n", type=int, multiple=True)
@click.option("--k", "k", type=int, default=3, show_default=True)
def mc(**_: Any) -> int:
    """Monte Carlo estimates, threshold fits and second moments."""
    return _dispatch("mc")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="rado-lab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except (ValueError, FileNotFoundError, RuntimeError, OverflowError, MemoryError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return int(rv or 0)


def run() -> None:
    sys.exit(main())
