"""Run configurations, report rows and their CSV / JSON / text renderings."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from . import latin, rna, snake, tsptw
from .search import SearchLimits, SearchResult, State, make_figure_tree, search

PROBLEMS = ("tsptw", "snake", "latin", "rna", "tree")
ALGOS = ("lds", "ns")
MAX_LEVEL = 16
TIMEOUT_ENV = "NSLDS_TIMEOUT_SECONDS"
CSV_HEADER = ("instance", "algo", "level", "var", "sym", "mac", "score", "solved",
              "seconds", "playout_steps", "terminated_by")


class SpecError(ValueError):
    pass


@dataclass
class RunSpec:
    problem: str
    algo: str = "ns"
    level: int = 1
    instance: Optional[str] = None
    puzzle: Optional[str] = None
    target: Optional[str] = None
    locks: Optional[str] = None
    order: Optional[int] = None
    var: Optional[str] = None
    sym: Optional[bool] = None
    mac: Optional[bool] = None
    dimension: Optional[int] = None
    start_path: Optional[Tuple[int, ...]] = None
    max_seconds: Optional[float] = None
    step_budget: int = 0

    _ONLY = {
        "order": "latin", "var": "latin", "sym": "latin", "mac": "latin",
        "dimension": "snake", "start_path": "snake",
        "puzzle": "rna", "target": "rna", "locks": "rna",
    }

    @classmethod
    def from_dict(cls, d: dict, base: Optional[Path] = None) -> "RunSpec":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise SpecError(f"unknown run fields: {sorted(unknown)}")
        d = dict(d)
        for flag in ("sym", "mac"):
            if isinstance(d.get(flag), str):
                d[flag] = _on_off(d[flag])
        if d.get("start_path") is not None:
            d["start_path"] = tuple(d["start_path"])
        if base is not None and d.get("instance") and not os.path.isabs(d["instance"]):
            d["instance"] = str(base / d["instance"])
        spec = cls(**d)
        spec.validate()
        return spec

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise SpecError(f"unknown problem {self.problem!r}")
        if self.algo not in ALGOS:
            raise SpecError(f"unknown algorithm {self.algo!r}")
        if not isinstance(self.level, int) or not 0 <= self.level <= MAX_LEVEL:
            raise SpecError(f"level must be an integer in 0..{MAX_LEVEL}")
        for name, owner in self._ONLY.items():
            if getattr(self, name) is not None and self.problem != owner:
                raise SpecError(f"--{name.replace('_', '-')} only applies to {owner}")
        if self.problem == "latin":
            if self.order is None:
                raise SpecError("latin needs --order")
            if self.var is not None and self.var not in latin.VAR_HEURISTICS:
                raise SpecError(f"--var must be one of {latin.VAR_HEURISTICS}")
        if self.problem == "snake" and self.dimension is None:
            raise SpecError("snake needs --dimension")
        if self.problem == "tsptw" and not self.instance:
            raise SpecError("tsptw needs an instance file")
        if self.problem == "rna":
            if self.target is None and not self.instance:
                raise SpecError("rna needs --target or an instance file")
            if self.target is not None and self.instance:
                raise SpecError("give either --target or an instance file, not both")
        if self.problem == "tree" and self.instance not in (None, "figure"):
            raise SpecError("tree only knows the 'figure' instance")
        if self.max_seconds is not None and self.max_seconds < 0:
            raise SpecError("timeout must be >= 0")
        if self.step_budget < 0:
            raise SpecError("step budget must be >= 0")

    def limits(self) -> SearchLimits:
        seconds = self.max_seconds
        if seconds is None:
            seconds = float(os.environ.get(TIMEOUT_ENV, "0") or 0)
        return SearchLimits(seconds, self.step_budget)

    def latin_config(self) -> latin.LatinConfig:
        return latin.LatinConfig(self.order, self.var or "deg", bool(self.sym), bool(self.mac))


def _on_off(text: str) -> bool:
    t = text.lower()
    if t in ("on", "yes", "true", "1"):
        return True
    if t in ("off", "no", "false", "0"):
        return False
    raise SpecError(f"expected on/off, got {text!r}")


@dataclass
class ReportRow:
    instance: str
    algo: str
    level: int
    var: Optional[str]
    sym: Optional[bool]
    mac: Optional[bool]
    score: Optional[float]
    solved: bool
    seconds: float
    playout_steps: int
    terminated_by: str
    error: Optional[str] = None


def build_root(spec: RunSpec) -> Tuple[str, State]:
    """Instance label and root state for a validated spec."""
    if spec.problem == "tree":
        return "figure", make_figure_tree()
    if spec.problem == "latin":
        cfg = spec.latin_config()
        return f"latin-{cfg.n}", latin.initial_state(cfg)
    if spec.problem == "snake":
        if spec.start_path:
            return f"snake-{spec.dimension}", snake.SnakeState.from_path(spec.dimension, spec.start_path)
        return f"snake-{spec.dimension}", snake.SnakeState(spec.dimension)
    if spec.problem == "tsptw":
        path = Path(spec.instance)
        inst = tsptw.load_tsptw(path.read_text(), name=path.stem)
        return inst.name, tsptw.TsptwState.initial(inst)
    if spec.target is not None:
        puzzle = rna.parse_dot_bracket(spec.target, name="target", locked=spec.locks)
    else:
        puzzles = rna.load_puzzles(Path(spec.instance).read_text())
        if spec.puzzle is not None:
            found = [p for p in puzzles if p.name == spec.puzzle]
            if not found:
                raise SpecError(f"no puzzle named {spec.puzzle!r} in {spec.instance}")
            puzzle = found[0]
        elif len(puzzles) == 1:
            puzzle = puzzles[0]
        else:
            raise SpecError("instance file holds several puzzles; pick one with --puzzle")
    return puzzle.name, rna.RnaState(puzzle)


def execute(spec: RunSpec) -> Tuple[ReportRow, SearchResult]:
    spec.validate()
    label, root = build_root(spec)
    t0 = time.perf_counter()
    result = search(spec.algo, root, spec.level, spec.limits())
    seconds = time.perf_counter() - t0
    is_latin = spec.problem == "latin"
    cfg = spec.latin_config() if is_latin else None
    row = ReportRow(
        instance=label,
        algo=spec.algo,
        level=spec.level,
        var=cfg.var_heuristic if cfg else None,
        sym=cfg.symmetry if cfg else None,
        mac=cfg.mac if cfg else None,
        score=result.best_score,
        solved=result.solved,
        seconds=round(seconds, 6),
        playout_steps=result.stats.playout_steps,
        terminated_by=result.terminated_by.value,
    )
    return row, result


def run(spec: RunSpec) -> ReportRow:
    return execute(spec)[0]


def _safe_run(spec: RunSpec) -> ReportRow:
    try:
        return run(spec)
    except Exception as exc:  # recorded as an error row, suite carries on
        return ReportRow(
            instance=spec.instance or spec.problem, algo=spec.algo, level=spec.level,
            var=spec.var, sym=spec.sym, mac=spec.mac, score=None, solved=False,
            seconds=0.0, playout_steps=0, terminated_by="error",
            error=f"{type(exc).__name__}: {exc}",
        )


def run_suite(specs: Sequence[RunSpec], parallelism: int = 1) -> List[ReportRow]:
    """Run specs independently; rows come back in spec order."""
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    specs = list(specs)
    if parallelism == 1 or len(specs) <= 1:
        return [_safe_run(s) for s in specs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_safe_run, specs))


def load_manifest(path: str) -> List[RunSpec]:
    p = Path(path)
    data = json.loads(p.read_text())
    if isinstance(data, dict):
        data = data.get("runs", [])
    if not isinstance(data, list):
        raise SpecError("manifest must be a list of runs or {\"runs\": [...]}")
    return [RunSpec.from_dict(d, base=p.parent) for d in data]


# -- rendering ----------------------------------------------------------------

def format_number(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if x.is_integer():
        return str(int(x))
    return f"{x:.2f}"


def _flag(v: Optional[bool]) -> str:
    return "" if v is None else ("yes" if v else "no")


def result_cell(row: ReportRow) -> str:
    """Solved runs show their time; the rest show ``<score> in <time>s``."""
    if row.error:
        return "error"
    if row.solved:
        return f"{row.seconds:.2f}s"
    return f"{format_number(row.score)} in {row.seconds:.2f}s"


def to_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            r.instance, r.algo, r.level, r.var or "", _flag(r.sym), _flag(r.mac),
            format_number(r.score), "true" if r.solved else "false",
            f"{r.seconds:.2f}", r.playout_steps, r.terminated_by,
        ])
    return buf.getvalue()


def to_json(rows: Iterable[ReportRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"


def from_json(text: str) -> List[ReportRow]:
    return [ReportRow(**d) for d in json.loads(text)]


def to_table(rows: Iterable[ReportRow]) -> str:
    head = ("instance", "algo", "level", "var", "sym", "mac", "result", "steps", "end")
    body = [
        (r.instance, r.algo.upper(), str(r.level),
         r.var or "", _flag(r.sym), _flag(r.mac), result_cell(r),
         str(r.playout_steps), r.terminated_by)
        for r in rows
    ]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip()
             for line in [head, *body]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


EMITTERS = {"csv": to_csv, "json": to_json, "table": to_table}


def emit(rows: Iterable[ReportRow], fmt: str = "table") -> str:
    try:
        return EMITTERS[fmt](list(rows))
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}") from None


def render_solution(state: State) -> str:
    if isinstance(state, latin.LatinState):
        return latin.format_pairs(*state.grids())
    if isinstance(state, snake.SnakeState):
        return ",".join(map(str, state.path))
    if isinstance(state, tsptw.TsptwState):
        return " ".join(map(str, state.visited + (0,)))
    if isinstance(state, rna.RnaState):
        return f"{state.sequence}\n{rna.fold(state.sequence) if None not in state.seq else ''}"
    return repr(state)
