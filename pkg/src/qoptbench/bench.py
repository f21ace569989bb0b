"""Benchmark harness: suites, algorithm dispatch, metrics, persistence, reports.

Twelve algorithm tags cover the variational drivers (vqe, qaoa), both
imaginary-time solvers under constant and annealing schedules (qite_a,
itqa_a, qite_af, itqa_af), direct integration (qite_sim, itqa_sim), the
same with bond-dimension truncation (qite_tn, itqa_tn), simulated annealing
of the real-time schedule (qa_sim), and classical annealing (sa).
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .annealing import SaConfig, sa_solve
from .dynamics import imag_time_evolve, qa_schedule, real_time_evolve
from .pauli import PauliSum, simplify, to_matrix
from .problems import (
    GroundTruth,
    ProblemInstance,
    gen_knapsack,
    gen_maxcut,
    gen_numpart,
    gen_spinglass,
    ground_truth_for,
    build_hamiltonian,
)
from .qite import QiteConfig, run_qite
from .states import StateVector, basis_state, fidelity_to_subspace, plus_state
from .variational import VariationalConfig, run_qaoa, run_vqe

ALGORITHMS = (
    "vqe",
    "qaoa",
    "qite_a",
    "qite_af",
    "itqa_a",
    "itqa_af",
    "qite_sim",
    "itqa_sim",
    "qite_tn",
    "itqa_tn",
    "qa_sim",
    "sa",
)

RESULTS_HEADER = (
    "instance_id,kind,n,algorithm,fidelity,success_fraction,final_energy,"
    "ground_energy,wall_time_s,seed,config_hash,error"
)
SUMMARY_HEADER = "kind,algorithm,count,min,q1,median,q3,max"

_GENERATORS = {
    "maxcut": gen_maxcut,
    "numpart": gen_numpart,
    "knapsack": gen_knapsack,
    "spinglass": gen_spinglass,
}

# (dt, T, steps) per problem family for the imaginary-time solvers
_SCHEDULE_TABLE = {
    "maxcut": (1e-1, 1e3, 10000),
    "spinglass": (1e-1, 1e3, 10000),
    "numpart": (1e-5, 0.2, 20000),
    "knapsack": (1e-7, 1e-3, 10000),
}


@dataclass(frozen=True)
class BenchConfig:
    """Shipped defaults reproduce the full benchmarking protocol."""

    p: int = 100
    reps: int = 2
    budget: int = 5000
    sweeps: int = 10000
    shots: int = 1000
    qa_T: float = 20.0
    qa_dt: float = 1e-2
    lam: float = 1e-6
    dt_override: float | None = None
    T_override: float | None = None
    sa_diagonal_part: bool = False
    base_seed: int = 0


@dataclass
class RunRecord:
    instance_id: str
    kind: str
    n: int
    algorithm: str
    fidelity: float | None
    success_fraction: float | None
    final_energy: float | None
    ground_energy: float
    wall_time_s: float
    seed: int
    config_hash: str
    error: str = ""


@dataclass
class SummaryStats:
    kind: str
    algorithm: str
    count: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def make_suite(kind: str, count: int = 250, n: int = 5, base_seed: int = 0, **kwargs):
    """Deterministic instance list; instance i uses seed base_seed + i."""
    if kind not in _GENERATORS:
        raise ValueError(f"unknown kind {kind!r}; valid: {sorted(_GENERATORS)}")
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = _GENERATORS[kind]
    return [gen(n, seed=base_seed + i, **kwargs) for i in range(count)]


def default_schedule_params(kind: str) -> tuple[float, float, int]:
    """(dt, T, steps) table used by every imaginary-time solver."""
    if kind not in _SCHEDULE_TABLE:
        raise ValueError(f"unknown kind {kind!r}")
    return _SCHEDULE_TABLE[kind]


def derive_seed(base_seed: int, instance_id: str, algorithm: str) -> int:
    digest = hashlib.sha256(
        f"{base_seed}:{instance_id}:{algorithm}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def config_hash(snapshot: dict) -> str:
    canon = json.dumps(snapshot, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def score(state_or_counts, truth: GroundTruth) -> tuple[float, float | None]:
    """(fidelity, success_fraction or None) for a final state or a counts map.

    Sampled solvers report the optimal-shot share in both slots so box plots
    can mix the two metrics the way the benchmark protocol does.
    """
    if truth is None:
        raise ValueError("scoring needs a ground truth")
    if isinstance(state_or_counts, StateVector):
        fid = fidelity_to_subspace(state_or_counts, truth.subspace)
        return float(np.clip(fid, 0.0, 1.0)), None
    counts = state_or_counts
    if truth.optimal_bitstrings is None:
        raise ValueError("sampled scoring needs optimal bitstrings")
    total = sum(counts.values())
    if total == 0:
        raise ValueError("empty counts map")
    optimal = set(truth.optimal_bitstrings)
    hits = sum(c for b, c in counts.items() if b in optimal)
    frac = hits / total
    return frac, frac


def _schedule_params(kind: str, cfg: BenchConfig) -> tuple[float, float]:
    dt, T, _ = default_schedule_params(kind)
    if cfg.dt_override is not None:
        dt = cfg.dt_override
    if cfg.T_override is not None:
        T = cfg.T_override
    return dt, T


def _anneal_normalized(h: PauliSum) -> tuple[PauliSum, float]:
    """Strip identity terms and rescale to unit max coefficient.

    Mirrors hardware auto-scaling so one annealing (T, dt) works across the
    very different energy scales of the four families; the ground subspace
    is unchanged.  Returns the schedule Hamiltonian and the scale used.
    """
    stripped = PauliSum(
        h.n_qubits, tuple(t for t in simplify(h).terms if not t.is_identity)
    )
    scale = stripped.max_abs_coeff()
    if scale == 0.0:
        return stripped, 1.0
    return (1.0 / scale) * stripped, scale


def run_one(
    inst: ProblemInstance,
    algorithm: str,
    cfg: BenchConfig,
    h: PauliSum | None = None,
    truth: GroundTruth | None = None,
) -> RunRecord:
    """Execute one (instance, algorithm) cell; failures land in the record."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; valid: {ALGORITHMS}")
    h = h if h is not None else build_hamiltonian(inst)
    truth = truth if truth is not None else ground_truth_for(inst)
    seed = derive_seed(cfg.base_seed, inst.instance_id, algorithm)
    snapshot = _config_snapshot(inst, algorithm, cfg)
    started = time.perf_counter()
    try:
        fidelity, success, energy = _dispatch(inst, algorithm, cfg, h, truth, seed)
        error = ""
    except Exception as exc:  # recorded, never aborts the matrix
        fidelity = success = energy = None
        error = f"{type(exc).__name__}: {exc}"
    wall = time.perf_counter() - started
    record = RunRecord(
        instance_id=inst.instance_id,
        kind=inst.kind,
        n=inst.n,
        algorithm=algorithm,
        fidelity=fidelity,
        success_fraction=success,
        final_energy=energy,
        ground_energy=truth.energy,
        wall_time_s=wall,
        seed=seed,
        config_hash=config_hash(snapshot),
        error=error,
    )
    if error == "":
        _check_variational_bound(record)
    return record


def _check_variational_bound(record: RunRecord):
    floor = record.ground_energy - 1e-6 * max(1.0, abs(record.ground_energy))
    if record.final_energy is not None and record.final_energy < floor:
        raise AssertionError(
            f"{record.algorithm} on {record.instance_id}: energy "
            f"{record.final_energy} below ground {record.ground_energy}"
        )


def _config_snapshot(inst: ProblemInstance, algorithm: str, cfg: BenchConfig) -> dict:
    snap = {"algorithm": algorithm, "base_seed": cfg.base_seed}
    if algorithm in ("vqe", "qaoa"):
        snap.update(p=cfg.p, reps=cfg.reps, budget=cfg.budget)
        if algorithm == "qaoa" and inst.kind == "spinglass":
            snap["phase_separator"] = "dense"
    elif algorithm == "sa":
        snap.update(sweeps=cfg.sweeps, shots=cfg.shots)
        if inst.kind == "spinglass":
            snap["diagonal_part"] = cfg.sa_diagonal_part
    elif algorithm == "qa_sim":
        snap.update(qa_T=cfg.qa_T, qa_dt=cfg.qa_dt, rescaled=True)
    else:
        dt, T = _schedule_params(inst.kind, cfg)
        snap.update(dt=dt, T=T, lam=cfg.lam)
        if algorithm in ("qite_a", "itqa_a"):
            snap["reps"] = cfg.reps
        if algorithm in ("qite_af", "itqa_af"):
            snap["basis"] = "complete"
        if algorithm in ("qite_tn", "itqa_tn"):
            snap["bond_dim"] = inst.n
    return snap


def _dispatch(inst, algorithm, cfg, h, truth, seed):
    n = inst.n
    if algorithm == "vqe":
        vcfg = VariationalConfig("vqe", reps=cfg.reps, budget=cfg.budget, seed=seed)
        result, state = run_vqe(h, vcfg)
        fid, success = score(state, truth)
        return fid, success, result.best_value
    if algorithm == "qaoa":
        vcfg = VariationalConfig("qaoa", p=cfg.p, budget=cfg.budget, seed=seed)
        result, state = run_qaoa(h, vcfg)
        fid, success = score(state, truth)
        return fid, success, result.best_value
    if algorithm in ("qite_a", "itqa_a", "qite_af", "itqa_af"):
        dt, T = _schedule_params(inst.kind, cfg)
        qcfg = QiteConfig(
            mode="ansatz_based" if algorithm.endswith("_a") else "ansatz_free",
            dt=dt,
            T=T,
            schedule_kind="qa" if algorithm.startswith("itqa") else "constant",
            lam=cfg.lam,
            reps=cfg.reps,
            seed=seed,
        )
        traj, info = run_qite(h, qcfg, truth)
        fid, success = score(traj.final_state, truth)
        final_energy = _problem_energy(h, traj.final_state)
        return fid, success, final_energy
    if algorithm in ("qite_sim", "itqa_sim", "qite_tn", "itqa_tn"):
        dt, T = _schedule_params(inst.kind, cfg)
        bond = n if algorithm.endswith("_tn") else None
        sched = qa_schedule(h, T) if algorithm.startswith("itqa") else h
        traj = imag_time_evolve(sched, plus_state(n), dt, T=T, truth=truth, bond_dim=bond)
        fid, success = score(traj.final_state, truth)
        return fid, success, _problem_energy(h, traj.final_state)
    if algorithm == "qa_sim":
        h_anneal, _scale = _anneal_normalized(h)
        traj = real_time_evolve(
            qa_schedule(h_anneal, cfg.qa_T), plus_state(n), cfg.qa_dt, truth=truth
        )
        fid, success = score(traj.final_state, truth)
        return fid, success, _problem_energy(h, traj.final_state)
    if algorithm == "sa":
        sa_cfg = SaConfig(
            sweeps=cfg.sweeps,
            shots=cfg.shots,
            seed=seed,
            diagonal_part=cfg.sa_diagonal_part,
        )
        if inst.kind == "spinglass":
            counts, _, best = sa_solve(h, sa_cfg, truth=None)
            fid = _mean_basis_fidelity(counts, n, truth)
            return fid, fid, best
        counts, success, best = sa_solve(h, sa_cfg, truth)
        fid, success = score(counts, truth)
        return fid, success, best
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _problem_energy(h: PauliSum, state: StateVector) -> float:
    amps = state.amps
    return float(np.real(np.vdot(amps, to_matrix(h) @ amps)))


def _mean_basis_fidelity(counts, n, truth) -> float:
    """Shot-weighted ground-subspace population of annealed basis states."""
    total = sum(counts.values())
    acc = 0.0
    for bits, c in counts.items():
        state = basis_state(n, int(bits, 2))
        acc += c * fidelity_to_subspace(state, truth.subspace)
    return float(np.clip(acc / total, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Matrix execution and persistence


def record_to_row(r: RunRecord) -> str:
    def fmt(x):
        return "" if x is None else repr(float(x))

    return ",".join(
        [
            r.instance_id,
            r.kind,
            str(r.n),
            r.algorithm,
            fmt(r.fidelity),
            fmt(r.success_fraction),
            fmt(r.final_energy),
            repr(float(r.ground_energy)),
            repr(float(r.wall_time_s)),
            str(r.seed),
            r.config_hash,
            r.error.replace(",", ";").replace("\n", " "),
        ]
    )


def read_records(path) -> list[RunRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = RESULTS_HEADER.split(",")
        if reader.fieldnames != expected:
            raise ValueError(f"unexpected results header {reader.fieldnames}")
        for lineno, row in enumerate(reader, 2):
            try:
                records.append(
                    RunRecord(
                        instance_id=row["instance_id"],
                        kind=row["kind"],
                        n=int(row["n"]),
                        algorithm=row["algorithm"],
                        fidelity=float(row["fidelity"]) if row["fidelity"] else None,
                        success_fraction=(
                            float(row["success_fraction"])
                            if row["success_fraction"]
                            else None
                        ),
                        final_energy=(
                            float(row["final_energy"]) if row["final_energy"] else None
                        ),
                        ground_energy=float(row["ground_energy"]),
                        wall_time_s=float(row["wall_time_s"]),
                        seed=int(row["seed"]),
                        config_hash=row["config_hash"],
                        error=row["error"],
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ValueError(f"malformed results row on line {lineno}") from exc
    return records


def _existing_pairs(path) -> set[tuple[str, str]]:
    try:
        return {(r.instance_id, r.algorithm) for r in read_records(path)}
    except FileNotFoundError:
        return set()


def run_matrix(
    instances,
    algorithms,
    cfg: BenchConfig = BenchConfig(),
    out_path=None,
    workers: int = 1,
    resume: bool = False,
    progress=None,
) -> list[RunRecord]:
    """Run every (instance, algorithm) cell once, in canonical order.

    Records stream to ``out_path`` as they complete, so an interrupted
    matrix can be resumed (already-present pairs are skipped).  Worker
    threads compute cells concurrently; the writer preserves canonical
    order, so an uninterrupted run always produces the same row order.
    """
    for tag in algorithms:
        if tag not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {tag!r}; valid: {ALGORITHMS}")
    ids = [inst.instance_id for inst in instances]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate instance ids in suite")
    done = _existing_pairs(out_path) if (resume and out_path) else set()
    tasks = [
        (inst, tag)
        for inst in instances
        for tag in algorithms
        if (inst.instance_id, tag) not in done
    ]

    prepared = {}
    for inst in instances:
        if inst.instance_id not in prepared:
            h = build_hamiltonian(inst)
            prepared[inst.instance_id] = (h, ground_truth_for(inst))

    def work(task):
        inst, tag = task
        h, truth = prepared[inst.instance_id]
        return run_one(inst, tag, cfg, h=h, truth=truth)

    writer = None
    if out_path:
        fresh = not done
        writer = open(out_path, "a" if done else "w")
        if fresh:
            writer.write(RESULTS_HEADER + "\n")
            writer.flush()

    records = []
    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = pool.map(work, tasks)
                for rec in results:
                    records.append(rec)
                    if writer:
                        writer.write(record_to_row(rec) + "\n")
                        writer.flush()
                    if progress:
                        progress(rec)
        else:
            for task in tasks:
                rec = work(task)
                records.append(rec)
                if writer:
                    writer.write(record_to_row(rec) + "\n")
                    writer.flush()
                if progress:
                    progress(rec)
    finally:
        if writer:
            writer.close()
    return records


def sweep_qaoa(
    kind: str,
    p_values,
    n_values,
    instances_per_cell: int,
    base_seed: int = 0,
    cfg: BenchConfig = BenchConfig(),
) -> list[RunRecord]:
    """Full factorial (p, n) sweep with a fresh deterministic suite per cell."""
    if any(n > 12 for n in n_values):
        raise ValueError("sweep limited to n <= 12 (dense realization guard)")
    records = []
    cell = 0
    for p in p_values:
        for n in n_values:
            suite = make_suite(
                kind,
                count=instances_per_cell,
                n=n,
                base_seed=base_seed + cell * instances_per_cell,
            )
            cell_cfg = replace(cfg, p=p, base_seed=base_seed)
            records.extend(run_matrix(suite, ["qaoa"], cell_cfg))
            cell += 1
    return records


# ---------------------------------------------------------------------------
# Aggregation and rendering


def aggregate(records) -> list[SummaryStats]:
    """Fidelity quartiles per (kind, algorithm); error rows are skipped."""
    groups: dict[tuple[str, str], list[float]] = {}
    for r in records:
        if r.fidelity is None:
            continue
        groups.setdefault((r.kind, r.algorithm), []).append(r.fidelity)
    out = []
    for (kind, algo) in sorted(groups):
        vals = np.array(groups[(kind, algo)])
        q1, med, q3 = np.percentile(vals, [25, 50, 75], method="linear")
        out.append(
            SummaryStats(
                kind,
                algo,
                len(vals),
                float(vals.min()),
                float(q1),
                float(med),
                float(q3),
                float(vals.max()),
            )
        )
    return out


def summary_to_csv(stats: list[SummaryStats]) -> str:
    lines = [SUMMARY_HEADER]
    for s in stats:
        lines.append(
            f"{s.kind},{s.algorithm},{s.count},{s.minimum!r},{s.q1!r},"
            f"{s.median!r},{s.q3!r},{s.maximum!r}"
        )
    return "\n".join(lines) + "\n"


def render_boxplot(stats: list[SummaryStats]) -> str:
    """Standalone SVG with one quartile box per (kind, algorithm)."""
    if not stats:
        raise ValueError("nothing to render")
    kinds = sorted({s.kind for s in stats})
    algos = sorted({s.algorithm for s in stats})
    box_w, gap, group_gap, left, top, plot_h = 16, 6, 40, 60, 20, 300
    group_w = len(algos) * (box_w + gap)
    width = left + len(kinds) * (group_w + group_gap) + 20
    height = top + plot_h + 80

    def x_of(kind, algo):
        gi = kinds.index(kind)
        ai = algos.index(algo)
        return left + gi * (group_w + group_gap) + ai * (box_w + gap)

    def y_of(v):
        return top + plot_h * (1.0 - v)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y_of(tick)
        parts.append(
            f'<line x1="{left - 6}" y1="{y:.1f}" x2="{width - 20}" y2="{y:.1f}" '
            'stroke="#cccccc" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 10}" y="{y + 4:.1f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{tick:.2f}</text>'
        )
    palette = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860",
               "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd", "#4878cf", "#6acc65"]
    for s in stats:
        x = x_of(s.kind, s.algorithm)
        color = palette[algos.index(s.algorithm) % len(palette)]
        cx = x + box_w / 2.0
        parts.append(
            f'<line x1="{cx:.1f}" y1="{y_of(s.minimum):.1f}" x2="{cx:.1f}" '
            f'y2="{y_of(s.maximum):.1f}" stroke="{color}" stroke-width="1"/>'
        )
        parts.append(
            f'<rect x="{x:.1f}" y="{y_of(s.q3):.1f}" width="{box_w}" '
            f'height="{max(0.5, y_of(s.q1) - y_of(s.q3)):.1f}" fill="{color}" '
            'fill-opacity="0.55" stroke="black" stroke-width="0.6"/>'
        )
        parts.append(
            f'<line x1="{x:.1f}" y1="{y_of(s.median):.1f}" x2="{x + box_w:.1f}" '
            f'y2="{y_of(s.median):.1f}" stroke="black" stroke-width="1.4"/>'
        )
    for kind in kinds:
        gx = left + kinds.index(kind) * (group_w + group_gap) + group_w / 2.0
        parts.append(
            f'<text x="{gx:.1f}" y="{top + plot_h + 20}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{kind}</text>'
        )
    for i, algo in enumerate(algos):
        lx = left + i * 90
        ly = top + plot_h + 45 + 14 * (i // max(1, (width - left) // 90))
        lx = left + (i % max(1, (width - left) // 90)) * 90
        color = palette[i % len(palette)]
        parts.append(
            f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" fill="{color}" '
            'fill-opacity="0.55" stroke="black" stroke-width="0.6"/>'
        )
        parts.append(
            f'<text x="{lx + 14}" y="{ly}" font-size="11" '
            f'font-family="sans-serif">{algo}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
