"""Constraint-based structure discovery on i.i.d.-style samples.

The skeleton search walks conditioning-set sizes upward from zero.  At size
l it visits ordered adjacent pairs (i, j) whose candidate pool adj(i) minus j
holds at least l nodes, and tests i against j given every size-l subset of
that pool in lexicographic order, deleting the edge and recording the first
separating set found.  The search stops once no pair has a pool larger than
the current size (or a configured cap is hit).  Orientation then marks
colliders: for every non-adjacent pair, each common neighbour outside the
recorded separating set becomes the tip of two arrowheads, and the remaining
undirected edges are closed under the standard propagation rules.

Arrowhead demands that contradict each other (both directions requested for
one edge) cancel: the edge stays undirected and the conflict is reported as
a diagnostic instead of silently picking a side.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Mapping

import numpy as np

from .citests import (
    CiOutcome,
    CiQuery,
    CiTestError,
    GaussianCiConfig,
    HsicConfig,
    gaussian_ci_test,
    hsic_ci_test,
    sample_covariance,
)
from .data import DataMatrix
from .graphs import Dag, Pdag, Skeleton, d_separated, meek_closure

__all__ = [
    "BACKENDS",
    "CiDecision",
    "CiQueryError",
    "PcConfig",
    "PcResult",
    "SepSets",
    "decisions_to_csv",
    "find_skeleton",
    "oracle_ci",
    "orient",
    "pc",
    "population_pc",
    "sepset_key",
]

BACKENDS = ("gaussian", "hsic", "oracle")

# Separating sets are keyed by the unordered pair, stored as (min, max).
SepSets = dict[tuple[int, int], tuple[int, ...]]


def sepset_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class CiQueryError(RuntimeError):
    """A CI backend failed; carries the query that triggered the failure."""

    def __init__(self, query: CiQuery, cause: Exception):
        k = ", ".join(str(c + 1) for c in query.k)
        super().__init__(
            f"CI test failed for query ({query.i + 1}, {query.j + 1} | {{{k}}}): {cause}"
        )
        self.query = query


@dataclass(frozen=True)
class CiDecision:
    """One logged test: the query, the numbers it produced, the verdict."""

    i: int
    j: int
    k: tuple[int, ...]
    statistic: float
    threshold: float
    independent: bool


@dataclass(frozen=True)
class PcConfig:
    """Backend selection and search policy.

    max_cond_size None means the default cap p - 2 (every size a pool can
    reach).  node_order permutes the visit order of both pair enumeration
    and subset enumeration; identity when None.  stable snapshots each
    node's neighbourhood at the start of a level so deletions within the
    level cannot influence later conditioning pools.
    """

    backend: str = "gaussian"
    gaussian: GaussianCiConfig | None = None
    hsic: HsicConfig | None = None
    truth: Dag | None = None
    max_cond_size: int | None = None
    node_order: tuple[int, ...] | None = None
    stable: bool = False

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.backend == "oracle" and self.truth is None:
            raise ValueError("oracle backend requires truth")
        if self.max_cond_size is not None and self.max_cond_size < 0:
            raise ValueError(f"max_cond_size must be nonnegative, got {self.max_cond_size}")
        if self.node_order is not None:
            object.__setattr__(self, "node_order", tuple(int(v) for v in self.node_order))


@dataclass(frozen=True)
class PcResult:
    pdag: Pdag
    skeleton: Skeleton
    sepsets: SepSets
    decisions: tuple[CiDecision, ...]
    diagnostics: tuple[str, ...]


def find_skeleton(
    ci: Callable[[CiQuery], CiOutcome],
    p: int,
    config: PcConfig = PcConfig(),
    log: list[CiDecision] | None = None,
) -> tuple[Skeleton, SepSets]:
    """Level-wise edge removal starting from the complete graph.

    Returns the surviving skeleton and the separating set recorded for every
    removed edge (so the table covers exactly the non-adjacent pairs).  The
    exact query sequence is a pure function of p, the configuration, and the
    CI answers, which makes decision logs replayable.
    """
    if p < 1:
        raise ValueError(f"need at least one node, got p={p}")
    order = config.node_order if config.node_order is not None else tuple(range(p))
    if sorted(order) != list(range(p)):
        raise ValueError(f"node_order must be a permutation of 0..{p - 1}")
    pos = {v: rank for rank, v in enumerate(order)}
    max_cond = config.max_cond_size if config.max_cond_size is not None else max(p - 2, 0)

    adj: dict[int, set[int]] = {v: set(range(p)) - {v} for v in range(p)}
    seps: SepSets = {}

    level = 0
    while True:
        pools = {v: frozenset(adj[v]) for v in range(p)} if config.stable else None
        for i in order:
            for j in order:
                if i == j or j not in adj[i]:
                    continue
                base = (pools[i] if pools is not None else adj[i]) - {j}
                if len(base) < level:
                    continue
                candidates = sorted(base, key=pos.__getitem__)
                for k in combinations(candidates, level):
                    query = CiQuery(i, j, k)
                    try:
                        outcome = ci(query)
                    except CiTestError as exc:
                        raise CiQueryError(query, exc) from exc
                    if log is not None:
                        log.append(
                            CiDecision(i, j, tuple(k), outcome.statistic,
                                       outcome.threshold, outcome.independent)
                        )
                    if outcome.independent:
                        adj[i].discard(j)
                        adj[j].discard(i)
                        seps[sepset_key(i, j)] = tuple(k)
                        break
        done = all(len(adj[i] - {j}) <= level for i in range(p) for j in adj[i])
        if done or level >= max_cond:
            break
        level += 1

    edges = frozenset((i, j) for i in range(p) for j in adj[i] if i < j)
    return Skeleton(p, edges), seps


def orient(
    skeleton: Skeleton,
    sepsets: Mapping[tuple[int, int], Iterable[int]],
    diagnostics: list[str] | None = None,
) -> Pdag:
    """Collider orientation from separating sets, then rule propagation.

    The separating-set table must cover every non-adjacent pair.  All
    arrowhead demands are collected before any is applied; a pair demanded
    in both directions stays undirected and adds a diagnostic message.
    """
    p = skeleton.p
    norm: SepSets = {}
    for key, s in sepsets.items():
        a, b = key
        if a == b:
            raise ValueError(f"separating-set key ({a}, {b}) repeats a node")
        pair = sepset_key(int(a), int(b))
        if not (0 <= pair[0] and pair[1] < p):
            raise ValueError(f"separating-set key {key} out of range for p={p}")
        if skeleton.has_edge(*pair):
            raise ValueError(
                f"separating-set entry for adjacent pair ({pair[0] + 1}, {pair[1] + 1})"
            )
        members = tuple(sorted(int(c) for c in s))
        if any(not 0 <= c < p for c in members):
            raise ValueError(f"separating set {members} out of range for p={p}")
        if pair[0] in members or pair[1] in members:
            raise ValueError(
                f"separating set for ({pair[0] + 1}, {pair[1] + 1}) contains an endpoint"
            )
        norm[pair] = members

    demands: set[tuple[int, int]] = set()
    for i in range(p):
        for j in range(i + 1, p):
            if skeleton.has_edge(i, j):
                continue
            if (i, j) not in norm:
                raise ValueError(
                    f"separating-set table missing non-adjacent pair ({i + 1}, {j + 1})"
                )
            sep = norm[(i, j)]
            for c in sorted(skeleton.adjacent(i) & skeleton.adjacent(j)):
                if c not in sep:
                    demands.add((i, c))
                    demands.add((j, c))

    conflicted: set[tuple[int, int]] = set()
    for a, b in demands:
        if (b, a) in demands:
            conflicted.add(sepset_key(a, b))
    if diagnostics is not None:
        for a, b in sorted(conflicted):
            diagnostics.append(
                f"conflicting collider orientations for edge {a + 1}-{b + 1}; "
                "left undirected"
            )

    directed = frozenset(
        (a, b) for a, b in demands if sepset_key(a, b) not in conflicted
    )
    oriented_pairs = {sepset_key(a, b) for a, b in directed}
    undirected = frozenset(e for e in skeleton.edges if e not in oriented_pairs)
    return meek_closure(Pdag(p, directed, undirected))


def oracle_ci(truth: Dag) -> Callable[[CiQuery], CiOutcome]:
    """A CI answerer that reads separation facts straight off a known graph."""

    def ci(query: CiQuery) -> CiOutcome:
        independent = d_separated(truth, {query.i}, {query.j}, query.k)
        return CiOutcome.decide(0.0 if independent else 1.0, 0.5)

    return ci


def _make_ci(values: np.ndarray, config: PcConfig) -> Callable[[CiQuery], CiOutcome]:
    if config.backend == "gaussian":
        gcfg = config.gaussian if config.gaussian is not None else GaussianCiConfig(alpha=0.05)
        cov = sample_covariance(values)

        def ci(query: CiQuery) -> CiOutcome:
            return gaussian_ci_test(cov, query, gcfg)

        return ci
    if config.backend == "hsic":
        if config.hsic is None:
            raise ValueError("hsic backend requires an HsicConfig with a threshold policy")
        hcfg = config.hsic

        def ci(query: CiQuery) -> CiOutcome:
            z = values[:, list(query.k)] if query.k else None
            return hsic_ci_test(values[:, query.i], values[:, query.j], z, hcfg)

        return ci
    return oracle_ci(config.truth)


def pc(data: DataMatrix | np.ndarray, config: PcConfig = PcConfig()) -> PcResult:
    """Skeleton search plus orientation on one sample matrix."""
    values = data.values if isinstance(data, DataMatrix) else np.asarray(data, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"data must be two-dimensional, got shape {values.shape}")
    p = values.shape[1]
    ci = _make_ci(values, config)
    log: list[CiDecision] = []
    skeleton, seps = find_skeleton(ci, p, config, log)
    diagnostics: list[str] = []
    pdag = orient(skeleton, seps, diagnostics)
    return PcResult(pdag, skeleton, seps, tuple(log), tuple(diagnostics))


def population_pc(
    truth: Dag,
    *,
    max_cond_size: int | None = None,
    node_order: tuple[int, ...] | None = None,
    stable: bool = False,
) -> Pdag:
    """Run the search against exact separation facts of a known graph.

    With a perfect oracle the output equals the orientation-equivalence
    summary of the truth, which is what the sample version converges to.
    """
    config = PcConfig(
        backend="oracle",
        truth=truth,
        max_cond_size=max_cond_size,
        node_order=node_order,
        stable=stable,
    )
    skeleton, seps = find_skeleton(oracle_ci(truth), truth.p, config)
    return orient(skeleton, seps)


def decisions_to_csv(decisions: Iterable[CiDecision]) -> str:
    """Render a decision log with 1-based indices, conditioning set space-joined."""
    lines = ["i,j,k,statistic,threshold,independent"]
    for d in decisions:
        k = " ".join(str(c + 1) for c in d.k)
        lines.append(
            f"{d.i + 1},{d.j + 1},{k},{d.statistic!r},{d.threshold!r},"
            f"{str(d.independent).lower()}"
        )
    return "\n".join(lines) + "\n"
