"""Chunked, seeded ensemble runs and the catalog of named experiments.

A run is a list of :class:`Series`. Each series draws its samples in fixed-size
chunks; chunk ``c`` of series ``k`` always uses random stream ``(seed, k*2**32 + c)``,
so outputs are identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .interaction import (
    InteractionSpec,
    distinct_couplings,
    final_entropies,
    final_entropy,
    parse_interaction,
    support_final_entropies,
)
from .measures import dicke_Q_batch, dicke_support, entanglement_entropy, global_entanglement_batch
from .sampling import (
    MAX_ATTEMPTS,
    EnergyConstrainedSampler,
    EnsembleSpec,
    InfeasibleEnsembleError,
    boundary_state_2q,
    cluster_batch,
    dicke_batch,
    dicke_embed,
    haar_batch,
    make_rng,
    separable_batch,
)
from .statevec import PureState
from .stats import DEFAULT_BIN_WIDTH, DEFAULT_MIN_COUNT, Moments, summarize

CHUNK = 1 << 14
REJECTION_CHUNK = 1 << 16
DENSE_DICKE_MAX_QUBITS = 12


@dataclass(frozen=True)
class Series:
    """One sampled ensemble evaluated under one or more named interactions."""

    label: str
    ensemble: EnsembleSpec
    interactions: tuple  # ((name, InteractionSpec), ...)
    anchor: str | None = None  # label of the separable series supplying the Q=0 mean
    tags: tuple = ()  # extra (key, value) pairs for the summary


@dataclass
class SeriesResult:
    series: Series
    q: np.ndarray
    s: dict
    attempts: int
    stream_counts: list
    moments: dict = field(default_factory=dict)


def evaluate_chunk(series: Series, seed: int, stream: int, size: int):
    """Draw one chunk and return ``(q, {name: s}, attempts)``."""
    ens = series.ensemble
    rng = make_rng(seed, stream)
    n = ens.n_qubits
    if ens.kind == "dicke":
        coeffs = dicke_batch(n, ens.N, size, rng)
        q = dicke_Q_batch(coeffs, n, ens.N)
        s = {}
        dense = None
        support = dicke_support(n, ens.N)
        for name, spec in series.interactions:
            try:
                s[name] = support_final_entropies(coeffs, support, spec)
            except ValueError:
                if n > DENSE_DICKE_MAX_QUBITS:
                    raise ValueError(
                        f"{name}: rotated couplings on {n}-qubit Dicke states need the dense path "
                        f"(n <= {DENSE_DICKE_MAX_QUBITS})"
                    ) from None
                if dense is None:
                    dense = dicke_embed(coeffs, n, ens.N)
                s[name] = final_entropies(dense, spec)
        return q, s, size
    if ens.kind == "energy_constrained":
        sampler = EnergyConstrainedSampler(n, ens.E, ens.effective_delta)
        batch = sampler.attempt(size, rng)
        attempts = size
    elif ens.kind == "haar":
        batch, attempts = haar_batch(n, size, rng), size
    elif ens.kind == "separable":
        batch, attempts = separable_batch(n, size, rng), size
    elif ens.kind == "clusters":
        batch, attempts = cluster_batch(ens.partition, size, rng), size
    else:  # pragma: no cover - EnsembleSpec validates kinds
        raise ValueError(ens.kind)
    q = global_entanglement_batch(batch)
    s = {name: final_entropies(batch, spec) for name, spec in series.interactions}
    return q, s, attempts


def _chunk_job(args):
    return evaluate_chunk(*args)


def _stream(series_index: int, chunk: int) -> int:
    return (series_index << 32) + chunk


def run_series(series: Series, seed: int, series_index: int = 0, pool=None, workers: int = 1) -> SeriesResult:
    ens = series.ensemble
    names = [name for name, _ in series.interactions]
    qs, ss, counts = [], {k: [] for k in names}, []
    attempts = 0
    mapper = pool.map if pool is not None else map

    if ens.kind != "energy_constrained":
        n_chunks = math.ceil(ens.count / CHUNK)
        sizes = [min(CHUNK, ens.count - c * CHUNK) for c in range(n_chunks)]
        jobs = ((series, seed, _stream(series_index, c), sizes[c]) for c in range(n_chunks))
        for q, s, att in mapper(_chunk_job, jobs):
            qs.append(q)
            for k in names:
                ss[k].append(s[k])
            counts.append(len(q))
            attempts += att
    else:
        have, c = 0, 0
        limit = MAX_ATTEMPTS * ens.count
        while have < ens.count:
            if attempts >= limit:
                raise InfeasibleEnsembleError(
                    f"{series.label}: accepted {have} of {attempts} attempts "
                    f"(rate {have / max(attempts, 1):.2e}); E={ens.E}, delta={ens.effective_delta} "
                    f"looks infeasible for {ens.n_qubits} qubits",
                    attempts,
                    have,
                )
            batch_jobs = [
                (series, seed, _stream(series_index, c + j), REJECTION_CHUNK) for j in range(max(1, workers))
            ]
            c += len(batch_jobs)
            for q, s, att in mapper(_chunk_job, batch_jobs):
                if have >= ens.count:
                    break
                attempts += att
                take = min(len(q), ens.count - have)
                qs.append(q[:take])
                for k in names:
                    ss[k].append(s[k][:take])
                counts.append(take)
                have += take
    q = np.concatenate(qs) if qs else np.zeros(0)
    s = {k: np.concatenate(v) if v else np.zeros(0) for k, v in ss.items()}
    moments = {}
    for k in names:
        m = Moments()
        off = 0
        for cnt in counts:
            if cnt:
                m = m.merge(Moments.from_arrays(q[off : off + cnt], s[k][off : off + cnt]))
            off += cnt
        moments[k] = m
    return SeriesResult(series, q, s, attempts, counts, moments)


# -- experiment catalog -------------------------------------------------------


@dataclass
class RunConfig:
    experiment: str
    qubits: list | None = None
    samples: int = 10_000
    seed: int = 0
    workers: int = 1
    ensemble: str | None = None
    interaction: str | None = None
    interacting: list | None = None
    bin_width: float = DEFAULT_BIN_WIDTH
    min_count: int = DEFAULT_MIN_COUNT
    delta: float | None = None
    out: str | None = None
    summary: str | None = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _haar_pair(n, count, interactions, label, anchored=True):
    sep_label = f"{label}-separable"
    main = Series(label, EnsembleSpec("haar", n, count), interactions, sep_label if anchored else None)
    if not anchored:
        return [main]
    return [main, Series(sep_label, EnsembleSpec("separable", n, count), interactions)]


def _fig2(cfg: RunConfig):
    out = []
    for n in cfg.qubits or [2, 3, 4, 5, 6]:
        inter = (("z", distinct_couplings(n, "z")),)
        out += _haar_pair(n, cfg.samples, inter, f"haar-{n}q")
    return out


def _fig3(cfg: RunConfig):
    out = []
    for n in cfg.qubits or [2, 3, 4]:
        ks = [k for k in (cfg.interacting or range(1, n + 1)) if 1 <= k <= n]
        if not ks:
            raise ValueError(f"no valid --interacting value for {n} qubits")
        inter = tuple((f"z-k{k}", distinct_couplings(n, "z", k)) for k in ks)
        out += _haar_pair(n, cfg.samples, inter, f"haar-{n}q")
    return out


FIG4_PARTITIONS = ((1, 1, 1, 1, 1, 1), (2, 2, 2), (3, 3), (4, 2), (5, 1), (6,))


def _fig4(cfg: RunConfig):
    n = 6
    inter = (("z", distinct_couplings(n, "z")),)
    out = [Series("separable-6q", EnsembleSpec("separable", n, cfg.samples), inter)]
    for part in FIG4_PARTITIONS:
        lbl = "clusters-" + "+".join(map(str, part))
        out.append(Series(lbl, EnsembleSpec("clusters", n, cfg.samples, partition=part), inter, "separable-6q"))
    return out


ENERGY_LEVELS = {2: (0.5, 0.2, 0.1, 0.05), 3: (0.5, 0.2, 0.1)}


def _energy(cfg: RunConfig, sizes):
    out = []
    for n in cfg.qubits or sizes:
        inter = (("z", distinct_couplings(n, "z")), ("x", distinct_couplings(n, "x")))
        for E in ENERGY_LEVELS.get(n, (0.5,)):
            ens = EnsembleSpec("energy_constrained", n, cfg.samples, E=E, delta=cfg.delta)
            out.append(Series(f"energy-{n}q-E{E}", ens, inter, tags=(("E", E),)))
    return out


DICKE_CASES = ((4, 1), (4, 2), (6, 1), (6, 2), (6, 3))


def _dicke(cfg: RunConfig):
    out = []
    for n, N in DICKE_CASES:
        if cfg.qubits and n not in cfg.qubits:
            continue
        inter = (("z", distinct_couplings(n, "z")), ("x", distinct_couplings(n, "x")))
        out.append(Series(f"dicke-{n}q-N{N}", EnsembleSpec("dicke", n, cfg.samples, N=N), inter, tags=(("N", N),)))
    return out


def _appE(cfg: RunConfig):
    out = _dicke(cfg)
    for n in sorted({n for n, _ in DICKE_CASES}):
        if cfg.qubits and n not in cfg.qubits:
            continue
        inter = (("z", distinct_couplings(n, "z")), ("x", distinct_couplings(n, "x")))
        out.append(Series(f"haar-{n}q", EnsembleSpec("haar", n, cfg.samples), inter))
    return out


def _fig8(cfg: RunConfig):
    out = []
    for n in cfg.qubits or [2, 4, 8, 16, 32, 64]:
        inter = (("z", distinct_couplings(n, "z")),)
        out.append(Series(f"dicke-{n}q-N1", EnsembleSpec("dicke", n, cfg.samples, N=1), inter, tags=(("N", 1),)))
    return out


def fig1_curves(points: int = 101):
    """Deterministic two-qubit curves ``(S_E(0), S_N(inf))``.

    Families: ``g1|00> + g2|11>`` and ``g1(|00>+|11>) + g2(|01>+|10>)``, each under
    one- and two-qubit couplings along z and x. Returns a list of dicts with the
    family, interaction name and the two coordinate arrays.
    """
    interactions = {
        "z,i": parse_interaction("z,i"),
        "z,2z": parse_interaction("z,2z"),
        "x,i": parse_interaction("x,i"),
        "x,2x": parse_interaction("x,2x"),
    }
    angles = np.linspace(0.0, np.pi / 4, points)
    families = {
        "g1|00>+g2|11>": lambda a: np.array([np.cos(a), 0, 0, np.sin(a)]),
        "g1(|00>+|11>)+g2(|01>+|10>)": lambda a: np.array([np.cos(a), np.sin(a), np.sin(a), np.cos(a)]) / np.sqrt(2),
    }
    diagonal = {("g1|00>+g2|11>", "z,i"), ("g1|00>+g2|11>", "z,2z"),
                ("g1(|00>+|11>)+g2(|01>+|10>)", "x,i"), ("g1(|00>+|11>)+g2(|01>+|10>)", "x,2x")}
    curves = []
    for fam, make in families.items():
        states = []
        for a in angles:
            v = make(a)
            states.append(PureState.from_dense(v / np.linalg.norm(v)))
        se = np.array([entanglement_entropy(st) for st in states])
        for name, spec in interactions.items():
            sn = np.array([final_entropy(st, spec) for st in states])
            curves.append({"family": fam, "interaction": name, "s_e": se, "s_n": sn,
                           "schmidt_aligned": (fam, name) in diagonal})
    return curves


def boundary_curve(E: float, points: int = 2001, spec: InteractionSpec | None = None):
    """``(x, Q, S)`` along the boundary family at fixed ``E`` (default: ``sigma_z`` couplings)."""
    from .measures import global_entanglement

    spec = spec or distinct_couplings(2, "z")
    xs = np.linspace(0.0, min(E, 1.0 - E), points)
    states = [boundary_state_2q(E, x) for x in xs]
    return xs, np.array([global_entanglement(st) for st in states]), np.array(
        [final_entropy(st, spec) for st in states]
    )


REGISTRY = {
    "fig1": ("two-qubit state families gamma1|00>+gamma2|11> etc.: S_N(inf) vs S_E(0)", None),
    "fig2": ("Haar ensembles n=2..6, sigma_z on all qubits, with separable anchors", _fig2),
    "table600": ("alias of fig2 (Haar means, variances, anchors, Q_max extrapolation)", _fig2),
    "fig3": ("partial interaction: first k of n qubits coupled, n=2..4", _fig3),
    "table602": ("alias of fig3 (mean final entropy per interacting count)", _fig3),
    "fig4": ("6-qubit products of Haar clusters with different entanglement depth", _fig4),
    "fig5": ("2-qubit energy-constrained ensembles, sigma_z and sigma_x", lambda c: _energy(c, [2])),
    "fig6": ("3-qubit energy-constrained ensembles, sigma_z and sigma_x", lambda c: _energy(c, [3])),
    "appC": ("energy-constrained means for 2 and 3 qubits", lambda c: _energy(c, [2, 3])),
    "fig7": ("generalized Dicke states n=4 (N=1,2) and n=6 (N=1,2,3), sigma_z and sigma_x", _dicke),
    "dicke-table": ("alias of fig7 (angles and correlations of least-squares lines)", _dicke),
    "appE": ("Dicke means and variances with Haar columns for comparison", _appE),
    "fig8": ("Dicke N=1 under sigma_z for n=2..64 (sparse path above 12 qubits)", _fig8),
}


def registry() -> dict:
    """Experiment name -> one-line description."""
    return {k: v[0] for k, v in REGISTRY.items()}


def build_series(cfg: RunConfig) -> list:
    if cfg.experiment == "sample":
        return [_sample_series(cfg)]
    if cfg.experiment not in REGISTRY:
        raise KeyError(f"unknown experiment {cfg.experiment!r}")
    builder = REGISTRY[cfg.experiment][1]
    if builder is None:
        return []
    return builder(cfg)


def _sample_series(cfg: RunConfig) -> Series:
    from .sampling import parse_ensemble

    if not cfg.qubits or len(cfg.qubits) != 1:
        raise ValueError("sample needs exactly one --qubits value")
    n = cfg.qubits[0]
    ens = parse_ensemble(cfg.ensemble or "haar", n, cfg.samples, cfg.seed)
    if ens.kind == "energy_constrained" and cfg.delta is not None and ens.delta is None:
        ens = EnsembleSpec(ens.kind, n, cfg.samples, E=ens.E, delta=cfg.delta)
    if cfg.interaction:
        spec = parse_interaction(cfg.interaction)
        if spec.n_qubits != n:
            raise ValueError(f"interaction has {spec.n_qubits} qubits, --qubits is {n}")
        name = cfg.interaction
    else:
        k = cfg.interacting[0] if cfg.interacting else None
        spec = distinct_couplings(n, "z", k)
        name = "z" if k is None else f"z-k{k}"
    return Series(f"{ens.to_text()}-{n}q", ens, ((name, spec),))


# -- running and writing ------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def run_experiment(cfg: RunConfig):
    """Execute ``cfg``; returns ``(csv_text, summary_dict)``.

    The summary dict carries one entry per (series, interaction) and a ``manifest``
    block with everything needed to repeat the run.
    """
    t0 = time.perf_counter()
    if cfg.experiment == "fig1":
        return _run_fig1(cfg, t0)
    series = build_series(cfg)
    workers = max(1, int(cfg.workers or 1))
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        results = [run_series(s, cfg.seed, i, pool, workers) for i, s in enumerate(series)]
    finally:
        if pool is not None:
            pool.shutdown()
    by_label = {r.series.label: r for r in results}

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["q", "s", "series", "n_qubits", "ensemble", "interaction"])
    entries = []
    for res in results:
        ser = res.series
        ens = ser.ensemble
        for name, spec in ser.interactions:
            s = res.s[name]
            writer.writerows(
                (_fmt(a), _fmt(b), ser.label, ens.n_qubits, ens.to_text(), name) for a, b in zip(res.q, s)
            )
            anchor_mean = None
            if ser.anchor is not None:
                anchor_mean = by_label[ser.anchor].moments[name].mean_s
            summ = (
                summarize(res.q, s, anchor_mean, ens.n_qubits / 2, cfg.bin_width, cfg.min_count, res.moments[name])
                if len(s) >= 2
                else None
            )
            entries.append(
                {
                    "series": ser.label,
                    "n_qubits": ens.n_qubits,
                    "ensemble": ens.to_text(),
                    "interaction": name,
                    "interaction_spec": spec.to_text(),
                    **dict(ser.tags),
                    "attempts": res.attempts,
                    "accepted": int(len(res.q)),
                    "acceptance_rate": len(res.q) / res.attempts if res.attempts else None,
                    "summary": None if summ is None else summ.to_dict(),
                }
            )
    manifest = _manifest(cfg, t0, {r.series.label: r.stream_counts for r in results},
                         {r.series.label: r.attempts for r in results})
    summary = {"experiment": cfg.experiment, "results": entries, "manifest": manifest}
    return buf.getvalue(), summary


def _run_fig1(cfg: RunConfig, t0: float):
    curves = fig1_curves()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["q", "s", "series", "n_qubits", "ensemble", "interaction"])
    entries = []
    for c in curves:
        writer.writerows((_fmt(a), _fmt(b), c["family"], 2, "fig1", c["interaction"]) for a, b in zip(c["s_e"], c["s_n"]))
        dev = c["s_n"] - c["s_e"]
        entries.append(
            {
                "series": c["family"],
                "interaction": c["interaction"],
                "schmidt_aligned": c["schmidt_aligned"],
                "max_abs_diagonal_deviation": float(np.max(np.abs(dev))),
                "min_gap_above_diagonal": float(np.min(dev)),
            }
        )
    manifest = _manifest(cfg, t0, {}, {})
    return buf.getvalue(), {"experiment": "fig1", "results": entries, "manifest": manifest}


def _manifest(cfg: RunConfig, t0: float, streams: dict, attempts: dict) -> dict:
    return {
        "tool": "dephase-lab",
        "version": __version__,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "chunk_size": CHUNK,
        "rejection_chunk_size": REJECTION_CHUNK,
        "stream_rule": "series k, chunk c -> Philox(SeedSequence(seed, spawn_key=(k*2**32 + c,)))",
        "per_stream_sample_counts": streams,
        "attempts": attempts,
        "wall_time_s": time.perf_counter() - t0,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
    }


def write_outputs(cfg: RunConfig, csv_text: str, summary: dict, stdout=None) -> None:
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(csv_text)
    else:
        (stdout or sys.stdout).write(csv_text)
    if cfg.summary:
        with open(cfg.summary, "w") as fh:
            json.dump(summary, fh, indent=2, default=_json_default)
            fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def config_from_manifest(manifest: dict) -> RunConfig:
    return RunConfig(**manifest["config"])


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


__all__ = [
    "REGISTRY",
    "RunConfig",
    "Series",
    "SeriesResult",
    "boundary_curve",
    "build_series",
    "config_from_manifest",
    "evaluate_chunk",
    "fig1_curves",
    "registry",
    "run_experiment",
    "run_series",
    "write_outputs",
]
