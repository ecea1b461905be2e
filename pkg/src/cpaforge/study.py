"""End-to-end study: front-end -> profile -> partitions -> candidate adders -> costs."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .adders import UNIFORM_KINDS, AdderKind, AdderSpec, compose_hybrid, gen_adder
from .config import ConfigError, read_config
from .costmodel import DEFAULT_SEED, DEFAULT_VECTORS, CostReport, CostTables, area, estimate_activity, load_tables, power
from .multiplier import build_front_end
from .partition import DegenerateProfile, closed_form_partition, compare_table, detect_regions, recommend
from .timing import ArrivalProfile, DelayModel, completion_time, cpa_input_profile, load_model
from .verify import check_adder, check_multiplier

log = logging.getLogger(__name__)


class StudyError(RuntimeError):
    def __init__(self, stage: str, n: int | None, message: str, verification: bool = False):
        where = f"n={n} " if n is not None else ""
        super().__init__(f"[{stage}] {where}{message}")
        self.stage = stage
        self.n = n
        self.verification = verification


@dataclass(frozen=True)
class StudyConfig:
    ns: tuple[int, ...] = (8, 16, 32, 64)
    model_path: str | None = None
    tables_path: str | None = None
    vectors: int = DEFAULT_VECTORS
    seed: int = DEFAULT_SEED
    out_dir: str | None = None
    verify_vectors: int = 1000
    max_fanout: int | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if not self.ns or any(n < 4 for n in self.ns):
            raise ConfigError(f"operand widths must be >= 4, got {self.ns}")
        if self.vectors < 1 or self.verify_vectors < 1:
            raise ConfigError("vector counts must be positive")


_KEYS = {
    "n": "ns",
    "model": "model_path",
    "tables": "tables_path",
    "vectors": "vectors",
    "seed": "seed",
    "out": "out_dir",
    "verify_vectors": "verify_vectors",
    "max_fanout": "max_fanout",
    "epsilon": "epsilon",
}


def load_config(path) -> StudyConfig:
    """TOML key/value file; keys: n, model, tables, vectors, seed, out, verify_vectors, max_fanout, epsilon.

    Relative model/tables/out paths resolve against the config file's directory.
    """
    data = read_config(path)
    unknown = set(data) - set(_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    base = Path(path).parent
    kw = {}
    for key, value in data.items():
        if key == "n":
            value = tuple(int(v) for v in (value if isinstance(value, list) else [value]))
        elif key in ("model", "tables", "out"):
            value = str(base / value)
        kw[_KEYS[key]] = value
    return StudyConfig(**kw)


@dataclass
class StudyReport:
    config: dict
    sizes: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"config": self.config, "sizes": self.sizes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def cost_rows(self) -> list[dict]:
        return [dict(n=s["n"], **c) for s in self.sizes for c in s["costs"]]

    def costs_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "name", "completion", "area", "power"])
        for r in self.cost_rows():
            w.writerow([r["n"], r["name"], r["completion"], r["area"], r["power"]])
        return buf.getvalue()

    def partitions_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "source", "r1_end", "r2_end", "w1", "w2", "w3", "offset_r1_end", "offset_r2_end"])
        for s in self.sizes:
            cmp = s.get("comparison")
            for src in ("detected", "closed_form"):
                p = s["partitions"].get(src)
                if p is None:
                    continue
                off = cmp["offsets"] if cmp and src == "detected" else {"r1_end": 0, "r2_end": 0}
                w.writerow([s["n"], src, p["r1"][1], p["r2"][1], *p["widths"], off["r1_end"], off["r2_end"]])
        return buf.getvalue()


def _cost(name: str, nl, profile, model, tables, vectors, seed) -> CostReport:
    act = estimate_activity(nl, vectors, seed)
    return CostReport(name, completion_time(nl, profile, model).time, area(nl, tables), power(nl, act, tables), seed, vectors)


def study_size(n: int, config: StudyConfig, model: DelayModel, tables: CostTables) -> dict:
    stage = "front-end"
    try:
        fe = build_front_end(n, config.max_fanout)
        stage = "verify-front-end"
        res = check_multiplier(fe.netlist, vectors=config.verify_vectors, seed=config.seed)
        if not res:
            raise StudyError(stage, n, f"counterexample {res.counterexample}", verification=True)
        stage = "profile"
        profile = cpa_input_profile(fe, model)
        stage = "partition"
        eps = model.flat_tolerance if config.epsilon is None else config.epsilon
        closed = closed_form_partition(n)
        try:
            detected = detect_regions(profile, eps)
            comparison = compare_table(profile, detected, closed)
            detect_note = None
        except DegenerateProfile as exc:
            detected, comparison, detect_note = None, None, str(exc)
        rec = recommend(closed, n)

        stage = "costs"
        designs = [(k.value, gen_adder(AdderSpec(k, 2 * n))) for k in UNIFORM_KINDS]
        designs.append((AdderKind.HYBRID.value, compose_hybrid(rec.partition, rec.kinds)))
        costs = []
        for name, nl in designs:
            res = check_adder(nl, vectors=config.verify_vectors, seed=config.seed)
            if not res:
                raise StudyError("verify-adder", n, f"{name}: counterexample {res.counterexample}", verification=True)
            costs.append(asdict(_cost(name, nl, profile, model, tables, config.vectors, config.seed)))
    except StudyError:
        raise
    except Exception as exc:
        raise StudyError(stage, n, str(exc)) from exc

    by_name = {c["name"]: c for c in costs}
    hyb = by_name["HYBRID"]["completion"]
    best = min(by_name[k.value]["completion"] for k in UNIFORM_KINDS)
    return {
        "n": n,
        "profile": list(profile.arrivals),
        "epsilon": eps,
        "partitions": {
            "detected": detected.to_dict() if detected else None,
            "closed_form": closed.to_dict(),
        },
        "detect_note": detect_note,
        "comparison": comparison,
        "recommendation": rec.to_dict(),
        "costs": costs,
        "summary": {
            "hybrid_le_rca": hyb <= by_name["RCA"]["completion"],
            "hybrid_over_best_uniform": hyb / best,
            "fastest_uniform": min(UNIFORM_KINDS, key=lambda k: (by_name[k.value]["completion"], k.value)).value,
        },
    }


def run_study(config: StudyConfig) -> StudyReport:
    try:
        model = load_model(config.model_path) if config.model_path else DelayModel()
        tables = load_tables(config.tables_path) if config.tables_path else CostTables()
    except Exception as exc:
        raise StudyError("config", None, str(exc)) from exc
    report = StudyReport(
        {
            "n": list(config.ns),
            "vectors": config.vectors,
            "seed": config.seed,
            "verify_vectors": config.verify_vectors,
            "max_fanout": config.max_fanout,
            "delays": {k.value: v for k, v in model.delays.items()},
            "area": {k.value: v for k, v in tables.area.items()},
            "power": {k.value: v for k, v in tables.power.items()},
        }
    )
    for n in config.ns:
        log.info("study n=%d", n)
        report.sizes.append(study_size(n, config, model, tables))
    if config.out_dir:
        write_artifacts(report, config.out_dir)
    return report


def write_artifacts(report: StudyReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "study.json").write_text(report.to_json())
    (out / "costs.csv").write_text(report.costs_csv())
    (out / "partitions.csv").write_text(report.partitions_csv())
    for s in report.sizes:
        (out / f"profile_n{s['n']}.csv").write_text(ArrivalProfile(s["n"], s["profile"]).to_csv())
