"""Marginal product models scored by minimum description length.

A model partitions the gene indices into disjoint groups and keeps, for each
group, the frequency table of the allele patterns observed in a reference
population. Its description length is the model complexity

    Cm = log2(N + 1) * sum_i (2**S_i - 1)

plus the compressed population complexity ``Cp = N * sum_i E(M_i)``, where
``E`` is the Shannon entropy (bits) of a group's marginal distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

Partition = Sequence[Sequence[int]]

# Merges must lower Cm + Cp by more than this to be accepted.
MERGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MarginalTable:
    genes: tuple[int, ...]
    outcomes: np.ndarray  # (k, S) observed allele patterns, lexicographic order
    counts: np.ndarray    # (k,)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.n


@dataclass(frozen=True)
class MdlScore:
    model: float
    population: float

    @property
    def combined(self) -> float:
        return self.model + self.population


def _pack(rows: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(rows.shape[1] - 1, -1, -1, dtype=np.int64)
    return rows.astype(np.int64) @ weights


def marginal_table(pop: np.ndarray, genes: Iterable[int]) -> MarginalTable:
    genes = tuple(int(g) for g in genes)
    rows = pop[:, list(genes)]
    if len(genes) <= 62:
        keys, first, counts = np.unique(_pack(rows), return_index=True, return_counts=True)
        outcomes = rows[first]
    else:
        outcomes, counts = np.unique(rows, axis=0, return_counts=True)
    return MarginalTable(genes, outcomes.astype(np.uint8), counts.astype(np.int64))


def entropy_of_group(table: MarginalTable) -> float:
    p = table.probabilities
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def model_complexity(partition: Partition, n: int) -> float:
    if n < 1:
        raise ValueError("population size must be at least 1")
    return math.log2(n + 1) * sum(2.0 ** len(g) - 1.0 for g in partition)


def compressed_complexity(partition: Partition, pop: np.ndarray) -> float:
    pop = np.asarray(pop)
    return len(pop) * sum(entropy_of_group(marginal_table(pop, g)) for g in partition)


def mdl_score(partition: Partition, pop: np.ndarray) -> MdlScore:
    return MdlScore(model_complexity(partition, len(pop)), compressed_complexity(partition, pop))


@dataclass(frozen=True)
class MpmModel:
    tables: tuple[MarginalTable, ...]
    n: int
    length: int

    @property
    def partition(self) -> tuple[tuple[int, ...], ...]:
        return tuple(t.genes for t in self.tables)

    def dump(self) -> str:
        lines = []
        for t in self.tables:
            probs = " ".join(
                f"{''.join(map(str, o))}={p:.6g}" for o, p in zip(t.outcomes.tolist(), t.probabilities)
            )
            lines.append(f"[{','.join(map(str, t.genes))}] {probs}")
        return "\n".join(lines)


def _clogc(counts: np.ndarray) -> np.ndarray:
    """Elementwise c*log2(c) with 0*log2(0) = 0."""
    counts = np.asarray(counts, dtype=float)
    out = np.zeros_like(counts)
    nz = counts > 0
    out[nz] = counts[nz] * np.log2(counts[nz])
    return out


@numba.njit(cache=True)
def _joint_clogc_dense(codes, k, table, ks, rows, limit):
    out = np.full(len(rows), np.nan)
    counts = np.zeros(limit, dtype=np.int64)
    for t in range(len(rows)):
        m = rows[t]
        km = ks[m]
        space = k * km
        if space > limit:
            continue
        other = table[m]
        for r in range(len(codes)):
            counts[codes[r] * km + other[r]] += 1
        s = 0.0
        for c in range(space):
            v = counts[c]
            if v > 0:
                s += v * np.log2(v)
                counts[c] = 0
        out[t] = s
    return out


def _joint_clogc(codes: np.ndarray, k: int, table: np.ndarray, ks: np.ndarray,
                 rows: np.ndarray) -> np.ndarray:
    """Sum of c*log2(c) over the joint table of one group with each group in ``rows``."""
    limit = max(4 * len(codes), 1 << 12)
    out = _joint_clogc_dense(codes, k, table, ks, rows, limit)
    for t in np.flatnonzero(np.isnan(out)):
        m = rows[t]
        _, counts = np.unique(codes * ks[m] + table[m], return_counts=True)
        out[t] = _clogc(counts).sum()
    return out


def _relabel(joint: np.ndarray, space: int) -> np.ndarray:
    """Compact joint codes onto 0..k-1, preserving their order."""
    if space <= 4 * len(joint) + 64:
        present = np.bincount(joint, minlength=space) > 0
        return (np.cumsum(present) - 1)[joint]
    return np.unique(joint, return_inverse=True)[1].ravel()


def _pair_counts(pop: np.ndarray) -> np.ndarray:
    """Gram matrix of the allele columns: n11[i, j] = #rows with both genes set."""
    n11 = np.zeros((pop.shape[1],) * 2)
    for lo in range(0, len(pop), 1 << 16):
        x = pop[lo:lo + (1 << 16)].astype(np.float32)
        n11 += (x.T @ x).astype(float)
    return n11


def greedy_mpm_search(pop: np.ndarray) -> MpmModel:
    """Greedy bottom-up merging from the all-singletons partition.

    Each step applies the pairwise merge with the largest decrease of Cm + Cp;
    ties go to the lexicographically smallest pair of group positions. Merge
    deltas are cached and only the row of the newly merged group is rescored.
    """
    pop = np.asarray(pop, dtype=np.uint8)
    n, length = pop.shape
    if n == 0:
        raise ValueError("cannot model an empty population")
    cm_unit = math.log2(n + 1)
    n_log_n = n * math.log2(n)

    # A group lives in the slot of its smallest gene, so slot order is
    # group-position order and the flat argmin breaks ties lexicographically.
    members: list[list[int]] = [[i] for i in range(length)]
    alive = np.ones(length, dtype=bool)
    codes = np.ascontiguousarray(pop.T, dtype=np.int64)
    ks = np.full(length, 2, dtype=np.int64)
    sizes = np.ones(length)
    ones = pop.sum(axis=0).astype(float)
    own = _clogc(ones) + _clogc(n - ones)

    n11 = _pair_counts(pop)
    n10 = ones[:, None] - n11
    n01 = ones[None, :] - n11
    n00 = n - n11 - n10 - n01
    joint = _clogc(n11) + _clogc(n10) + _clogc(n01) + _clogc(n00)
    delta = cm_unit + (-n_log_n - joint + own[:, None] + own[None, :])
    delta[np.tril_indices(length)] = np.inf

    while True:
        flat = int(np.argmin(delta))
        i, j = divmod(flat, length)
        if not delta[i, j] < -MERGE_TOLERANCE:
            break
        merged = _relabel(codes[i] * ks[j] + codes[j], int(ks[i] * ks[j]))
        codes[i] = merged
        ks[i] = int(merged.max()) + 1
        members[i] += members[j]
        sizes[i] += sizes[j]
        own[i] = _clogc(np.bincount(merged)).sum()
        alive[j] = False
        delta[j, :] = np.inf
        delta[:, j] = np.inf

        rest = np.flatnonzero(alive)
        rest = rest[rest != i]
        if not len(rest):
            break
        # Cp can drop by at most N*min(H_i, H_m); pairs that cannot pay for
        # their extra model bits are never accepted and need no scoring.
        d_cm = cm_unit * (2.0 ** sizes[i] - 1.0) * (2.0 ** sizes[rest] - 1.0)
        entropy_n = n_log_n - own
        hopeful = d_cm - np.minimum(entropy_n[i], entropy_n[rest]) < -MERGE_TOLERANCE
        d = np.full(len(rest), np.inf)
        if hopeful.any():
            cand = rest[hopeful]
            jc = _joint_clogc(merged, int(ks[i]), codes, ks, cand)
            d[hopeful] = d_cm[hopeful] + (-n_log_n - jc + own[i] + own[cand])
        lower, upper = rest < i, rest > i
        delta[rest[lower], i] = d[lower]
        delta[i, rest[upper]] = d[upper]

    groups = [sorted(members[s]) for s in np.flatnonzero(alive)]
    tables = tuple(marginal_table(pop, g) for g in groups)
    return MpmModel(tables, n, pop.shape[1])


def model_from_partition(pop: np.ndarray, partition: Partition) -> MpmModel:
    pop = np.asarray(pop, dtype=np.uint8)
    return MpmModel(tuple(marginal_table(pop, g) for g in partition), len(pop), pop.shape[1])


def sample_population(model: MpmModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` genomes; groups are sampled independently of one another."""
    out = np.empty((n, model.length), dtype=np.uint8)
    for t in model.tables:
        cum = np.cumsum(t.probabilities)
        idx = np.searchsorted(cum, rng.random(n), side="right")
        np.minimum(idx, len(t.counts) - 1, out=idx)
        out[:, list(t.genes)] = t.outcomes[idx]
    return out


def sample_individual(model: MpmModel, rng: np.random.Generator) -> np.ndarray:
    return sample_population(model, 1, rng)[0]
