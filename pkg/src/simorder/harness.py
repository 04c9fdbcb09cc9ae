"""Synthetic matrices, dataset statistics and algorithm comparisons.

Pattern generators draw the named structure under the identity ordering.
:func:`run_experiment` computes one ordering per algorithm and scores every
graph of the collection under it.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, GraphCollection, Ordering
from .metrics import linear_arrangement, morans_i, normalized_linear_arrangement
from .orderers import OrdererConfig, OrderingResult, compute_ordering

log = logging.getLogger(__name__)

PATTERN_KINDS = ("block", "off_diagonal_block", "line_star", "bands", "noise", "bandwidth_anti")
ANTI_PATTERNS = ("noise", "bandwidth_anti")


@dataclass(frozen=True)
class PatternSpec:
    """Parameters of a synthetic matrix.

    ``blocks``: block sizes (block / off-diagonal block); ``centers``: star
    vertices (line/star); ``width`` and ``offsets``: stripe thickness and
    distances from the diagonal (bands) or band half-width (bandwidth
    anti-pattern); ``p``: cell probability (noise).
    """

    kind: str
    n: int
    blocks: Optional[tuple] = None
    loops: bool = True
    centers: Optional[tuple] = None
    width: int = 1
    offsets: Optional[tuple] = None
    p: float = 0.5
    exact_density: bool = True
    seed: int = 0

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "PatternSpec":
        d = dict(d)
        for key in ("blocks", "centers", "offsets"):
            if d.get(key) is not None:
                d[key] = tuple(int(x) for x in d[key])
        return cls(**d)


@dataclass(frozen=True)
class ComplementarySpec:
    """Two cliques in one graph, the biclique joining them in another."""

    sizes: tuple = (8, 8)
    p: float = 0.0
    seed: int = 0
    shuffle: bool = True

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ComplementarySpec":
        d = dict(d)
        d.pop("kind", None)
        if "sizes" in d:
            d["sizes"] = tuple(int(x) for x in d["sizes"])
        return cls(**d)


def _symmetric_noise(n: int, p: float, rng: np.random.Generator, exact: bool) -> np.ndarray:
    iu = np.triu_indices(n)
    cells = len(iu[0])
    if exact:
        # fix the number of upper-triangle cells so density matches p closely
        on = np.zeros(cells, dtype=bool)
        on[rng.choice(cells, size=int(round(p * cells)), replace=False)] = True
    else:
        on = rng.random(cells) < p
    A = np.zeros((n, n), dtype=bool)
    A[iu] = on
    return A | A.T


def _default_blocks(n: int) -> tuple:
    return (n // 2, n - n // 2)


def generate_pattern(spec: PatternSpec) -> Graph:
    """Symmetric matrix realising ``spec.kind`` under the identity ordering."""
    n = spec.n
    if n < 2:
        raise ValueError("patterns need n >= 2")
    kind = spec.kind
    A = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    if kind in ("block", "off_diagonal_block"):
        blocks = spec.blocks or _default_blocks(n)
        if sum(blocks) != n or min(blocks) < 1:
            raise ValueError(f"block sizes {blocks} do not partition n={n}")
        label = np.repeat(np.arange(len(blocks)), blocks)
        same = label[:, None] == label[None, :]
        if kind == "block":
            A = same.copy()
            if not spec.loops:
                np.fill_diagonal(A, False)
        else:
            A = ~same
    elif kind == "line_star":
        centers = spec.centers if spec.centers is not None else (n // 4, (3 * n) // 4)
        if any(not 0 <= c < n for c in centers):
            raise ValueError(f"star centres {centers} out of range for n={n}")
        for c in centers:
            A[c, :] = True
            A[:, c] = True
        if not spec.loops:
            np.fill_diagonal(A, False)
    elif kind == "bands":
        offsets = spec.offsets if spec.offsets is not None else (max(1, n // 4),)
        width = max(1, spec.width if spec.width > 1 else max(2, n // 8))
        gap = np.abs(idx[:, None] - idx[None, :])
        for off in offsets:
            if off < 0 or off >= n:
                raise ValueError(f"band offset {off} out of range for n={n}")
            A |= (gap >= off) & (gap < off + width)
    elif kind == "noise":
        if not 0.0 <= spec.p <= 1.0:
            raise ValueError("noise probability must lie in [0, 1]")
        A = _symmetric_noise(n, spec.p, np.random.default_rng(spec.seed), spec.exact_density)
    elif kind == "bandwidth_anti":
        if spec.width < 1:
            raise ValueError("band width must be >= 1")
        gap = np.abs(idx[:, None] - idx[None, :])
        odd = (idx[:, None] + idx[None, :]) % 2 == 1
        A = (gap <= spec.width) & odd
    else:
        raise ValueError(f"unknown pattern kind {kind!r}; expected one of {PATTERN_KINDS}")
    return Graph(A, name=kind)


def matched_anti_patterns(pattern: Graph, seed: int = 0) -> dict[str, Graph]:
    """Noise and bandwidth anti-patterns with the same n and (nearly) the same density."""
    n = pattern.n
    density = pattern.density
    noise = generate_pattern(PatternSpec("noise", n, p=density, seed=seed))
    best = None
    for w in range(1, n):
        g = generate_pattern(PatternSpec("bandwidth_anti", n, width=w))
        gap = abs(g.density - density)
        if best is None or gap < best[0]:
            best = (gap, g)
    return {"noise": noise, "bandwidth_anti": best[1]}


def generate_complementary(spec: ComplementarySpec) -> GraphCollection:
    """Two-graph collection whose noiseless union is complete off the diagonal.

    Graph 1 holds one clique per group, graph 2 the biclique between the two
    groups. Each cell of each graph is flipped with probability ``p``
    (symmetrically). With ``shuffle`` the vertex ids are randomly permuted
    so that id order carries no hint of the groups.
    """
    if len(spec.sizes) != 2 or min(spec.sizes) < 2:
        raise ValueError("need two clique sizes, each >= 2")
    n = int(sum(spec.sizes))
    rng = np.random.default_rng(spec.seed)
    label = np.repeat([0, 1], spec.sizes)
    same = label[:, None] == label[None, :]
    cliques = same & ~np.eye(n, dtype=bool)
    biclique = ~same
    graphs = []
    for name, A in (("cliques", cliques), ("biclique", biclique)):
        if spec.p > 0:
            A = A ^ _symmetric_noise(n, spec.p, rng, exact=False)
        graphs.append(Graph(A, name=name))
    coll = GraphCollection(graphs, labels=[f"v{i}" for i in range(n)])
    if spec.shuffle:
        coll = coll.permuted(rng.permutation(n))
    return coll


def planted_two_block(n: int, seed: int = 0, p_in: float = 0.9, p_out: float = 0.1) -> Graph:
    """Random graph with two planted dense groups (used to sanity-check NN-2OPT)."""
    rng = np.random.default_rng(seed)
    while True:
        cut = int(rng.integers(1, n))
        label = (np.arange(n) >= cut).astype(int)
        label = label[rng.permutation(n)]
        prob = np.where(label[:, None] == label[None, :], p_in, p_out)
        upper = np.triu(rng.random((n, n)) < prob)
        A = upper | upper.T
        g = Graph(A, name=f"two_block_{seed}")
        if not g.is_degenerate():
            return g


# -- dataset statistics ---------------------------------------------------------

@dataclass(frozen=True)
class DatasetStats:
    k: int
    n: int
    density_mean: float
    density_std: float
    change_mean: Optional[float]
    change_std: Optional[float]

    def as_percent(self) -> dict:
        pct = lambda x: None if x is None else 100.0 * x  # noqa: E731
        return {"k": self.k, "n": self.n,
                "density_mean_pct": pct(self.density_mean), "density_std_pct": pct(self.density_std),
                "change_mean_pct": pct(self.change_mean), "change_std_pct": pct(self.change_std)}


def dataset_stats(collection: GraphCollection) -> DatasetStats:
    """Density m/n^2 per graph and changed cells between consecutive graphs over n^2.

    Standard deviations are population deviations. Change statistics are
    ``None`` for a single graph.
    """
    n2 = collection.n ** 2
    dens = [g.m / n2 for g in collection]
    stack = collection.stack()
    changes = [int(np.count_nonzero(stack[i] != stack[i + 1])) / n2
               for i in range(collection.k - 1)]
    return DatasetStats(
        k=collection.k, n=collection.n,
        density_mean=statistics.fmean(dens), density_std=statistics.pstdev(dens),
        change_mean=statistics.fmean(changes) if changes else None,
        change_std=statistics.pstdev(changes) if changes else None,
    )


# -- experiments --------------------------------------------------------------------

def lower_median(values: Sequence[float]) -> float:
    return statistics.median_low(values)


def summarize(values: Sequence[float]) -> dict:
    return {"min": min(values), "median": lower_median(values), "mean": statistics.fmean(values)}


@dataclass
class ExperimentReport:
    dataset: str
    stats: DatasetStats
    algorithms: list                       # algorithm names, in run order
    results: dict                          # name -> OrderingResult
    rows: list = field(default_factory=list)   # per (algorithm, graph) scores
    summary: dict = field(default_factory=dict)
    la_max: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dataset", "algorithm", "graph", "graph_name", "morans_i",
                    "linear_arrangement", "normalized_la"])
        for r in self.rows:
            w.writerow([self.dataset, r["algorithm"], r["graph"], r["graph_name"],
                        repr(r["morans_i"]), r["linear_arrangement"], repr(r["normalized_la"])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "conventions": {"std": "population", "median": "lower",
                            "change": "consecutive graphs", "linear_arrangement": "single counting",
                            "degenerate_moran": "+1"},
            "stats": asdict(self.stats),
            "algorithms": self.algorithms,
            "la_max": self.la_max,
            "results": {k: v.to_dict() for k, v in self.results.items()},
            "rows": self.rows,
            "summary": self.summary,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SIMORDER_THREADS", "1")))
    except ValueError:
        return 1


def score_collection(collection: GraphCollection, ordering: Ordering) -> list[tuple[float, int]]:
    """(Moran's I, linear arrangement) of every graph under one ordering."""
    return [(morans_i(g, ordering), linear_arrangement(g, ordering)) for g in collection]


def _build_summary(rows, names) -> dict:
    summary = {}
    for name in names:
        mine = [r for r in rows if r["algorithm"] == name]
        summary[name] = {
            "morans_i": summarize([r["morans_i"] for r in mine]),
            "normalized_la": summarize([r["normalized_la"] for r in mine]),
        }
    return summary


def run_experiment(collection: GraphCollection, algorithms: Sequence[OrdererConfig],
                   dataset: str = "dataset", graph_index: Optional[int] = None) -> ExperimentReport:
    """Order the collection with every algorithm and score each graph.

    Linear arrangement is normalised by its maximum over all algorithms and
    graphs of this collection.
    """
    algorithms = list(algorithms)
    if not algorithms:
        raise ValueError("need at least one algorithm")
    names = [a.name for a in algorithms]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate algorithms in {names}")

    def job(cfg):
        return compute_ordering(collection, cfg, graph_index=graph_index)

    threads = _threads()
    if threads > 1 and len(algorithms) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, algorithms))
    else:
        results = [job(cfg) for cfg in algorithms]

    raw = []
    for name, res in zip(names, results):
        for gi, (mi, la) in enumerate(score_collection(collection, res.ordering)):
            raw.append((name, gi, mi, la))
    nla = normalized_linear_arrangement([r[3] for r in raw])
    rows = [{"algorithm": name, "graph": gi, "graph_name": collection[gi].name,
             "morans_i": mi, "linear_arrangement": la, "normalized_la": v}
            for (name, gi, mi, la), v in zip(raw, nla)]
    return ExperimentReport(
        dataset=dataset, stats=dataset_stats(collection), algorithms=names,
        results=dict(zip(names, results)), rows=rows,
        summary=_build_summary(rows, names), la_max=max(r[3] for r in raw),
    )


def verify_report(report: ExperimentReport, collection: GraphCollection, tol: float = 0.0) -> list[str]:
    """Re-score every reported ordering; return a list of mismatches (empty if consistent)."""
    problems = []
    la_max = 0
    for name in report.algorithms:
        res = report.results[name]
        rescored = score_collection(collection, res.ordering)
        for r in (r for r in report.rows if r["algorithm"] == name):
            mi, la = rescored[r["graph"]]
            la_max = max(la_max, la)
            if abs(mi - r["morans_i"]) > tol or la != r["linear_arrangement"]:
                problems.append(f"{name} graph {r['graph']}: reported "
                                f"({r['morans_i']}, {r['linear_arrangement']}) rescored ({mi}, {la})")
    if la_max != report.la_max:
        problems.append(f"la_max {report.la_max} != {la_max}")
    nla = normalized_linear_arrangement([r["linear_arrangement"] for r in report.rows])
    for r, v in zip(report.rows, nla):
        if abs(v - r["normalized_la"]) > tol:
            problems.append(f"{r['algorithm']} graph {r['graph']}: normalized LA {r['normalized_la']} != {v}")
    if _build_summary(report.rows, report.algorithms) != report.summary:
        problems.append("summary statistics do not match the per-graph table")
    return problems


MAIN_ALGORITHMS = ("U-LO-l2", "C-LO-l2", "U-LO-deltai", "C-LO-deltai", "U-BC", "C-BC")
ALL_ALGORITHMS = ("U-LO-l2", "U-LO-l2sq", "U-LO-deltai", "U-LO-deltaisq",
                  "C-LO-l2", "C-LO-l2sq", "C-LO-deltai", "C-LO-deltaisq", "U-BC", "C-BC")


def synthetic_suite(seed: int = 0) -> dict[str, GraphCollection]:
    """Three small seeded collections for the bench command."""
    rng = np.random.default_rng(seed)
    suite = {"complementary": generate_complementary(ComplementarySpec((8, 8), p=0.05, seed=seed))}

    # slowly drifting community structure, 8 snapshots
    n = 24
    base = np.repeat(np.arange(3), 8)
    graphs = []
    label = base.copy()
    for t in range(8):
        movers = rng.choice(n, size=2, replace=False)
        label[movers] = rng.integers(0, 3, size=2)
        prob = np.where(label[:, None] == label[None, :], 0.8, 0.08)
        up = np.triu(rng.random((n, n)) < prob)
        graphs.append(Graph(up | up.T, name=f"t{t}"))
    dyn = GraphCollection(graphs)
    suite["drifting_blocks"] = dyn.permuted(rng.permutation(n))

    # one graph per pattern kind on a shared, shuffled vertex set
    n = 20
    pats = [generate_pattern(PatternSpec(kind, n, seed=seed)) for kind in
            ("block", "off_diagonal_block", "line_star", "bands")]
    suite["patterns"] = GraphCollection(pats).permuted(rng.permutation(n))
    return suite
