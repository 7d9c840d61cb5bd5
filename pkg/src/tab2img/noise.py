"""Stochastic noise features: budget allocation, corruption, generation.

The grid leaves total_budget free cells; plan() splits that budget over the
original features either evenly (HoNG) or proportionally to importance via
largest-remainder apportionment (HeNG). generate() then creates each noisy
copy with an auto-power loop: corrupt at power 0.2, measure the association
with the source, and halve the power (at most 6 times) until the association
clears the target; failures keep the best attempt and carry a best-effort flag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .correlation import association
from .dataset import BINARY, CATEGORICAL, NUMERICAL, TypedDataset
from .featsel import ImportanceVector
from .seeding import substream

GAUSSIAN = "GAUSSIAN"
SWN = "SWN"
ZMN = "ZMN"
SPN = "SPN"

HONG = "HoNG"
HENG = "HeNG"

START_POWER = 0.2
MAX_HALVINGS = 6


class NoiseError(ValueError):
    pass


def type_for_kind(kind: str) -> str:
    # ZMN also applies to binary features; plans default to the symmetric SPN
    if kind == NUMERICAL:
        return GAUSSIAN
    if kind == CATEGORICAL:
        return SWN
    return SPN


@dataclass(frozen=True)
class PlanEntry:
    count: int
    noise_type: str | None
    power: float


@dataclass(frozen=True)
class NoisePlan:
    mode: str
    total_budget: int
    entries: tuple


def plan(
    importance: ImportanceVector | None,
    n_features: int,
    total_budget: int,
    mode: str,
    kinds: tuple | None = None,
) -> NoisePlan:
    """Allocate total_budget noisy-copy counts over n_features sources.

    HoNG: round-robin even split, earlier features take the remainder.
    HeNG: largest-remainder apportionment of total_budget * weight; requires
    an importance vector of matching length; remainder ties break by index.
    """
    if n_features < 1:
        raise NoiseError("n_features must be >= 1")
    if total_budget < 0:
        raise NoiseError("total_budget must be >= 0")
    if mode == HONG:
        base, extra = divmod(total_budget, n_features)
        counts = [base + (1 if i < extra else 0) for i in range(n_features)]
    elif mode == HENG:
        if importance is None:
            raise NoiseError("HeNG requires an importance vector")
        w = np.asarray(importance.normalized, dtype=np.float64)
        if len(w) != n_features:
            raise NoiseError(
                f"importance length {len(w)} != n_features {n_features}"
            )
        quotas = total_budget * w
        counts = [int(math.floor(q)) for q in quotas]
        leftover = total_budget - sum(counts)
        remainders = quotas - np.floor(quotas)
        order = np.lexsort((np.arange(n_features), -remainders))
        for i in order[:leftover]:
            counts[int(i)] += 1
    else:
        raise NoiseError(f"unknown mode {mode!r}")
    entries = tuple(
        PlanEntry(
            count=c,
            noise_type=type_for_kind(kinds[i].kind) if kinds is not None else None,
            power=START_POWER,
        )
        for i, c in enumerate(counts)
    )
    return NoisePlan(mode=mode, total_budget=total_budget, entries=entries)


def corrupt(column: np.ndarray, kind: str, noise_type: str, power: float,
            rng: np.random.Generator) -> np.ndarray:
    """Return a corrupted copy of a normalized column.

    GAUSSIAN (numerical only): add N(0, power * std) noise, clipped back into
    the observed range. SWN (categorical): floor(power * n) positions, drawn
    without replacement, each replaced by a different observed level chosen
    uniformly. ZMN / SPN (binary): the same mask set to the minimum, or to
    minimum/maximum by fair coin flip.
    """
    if not 0.0 <= power <= 1.0:
        raise NoiseError(f"power {power} outside [0, 1]")
    allowed = {GAUSSIAN: NUMERICAL, SWN: CATEGORICAL, ZMN: BINARY, SPN: BINARY}
    if noise_type not in allowed:
        raise NoiseError(f"unknown noise type {noise_type!r}")
    if kind != allowed[noise_type]:
        raise NoiseError(f"{noise_type} does not apply to a {kind} feature")
    column = np.asarray(column, dtype=np.float64)
    out = column.copy()
    n = len(column)
    if noise_type == GAUSSIAN:
        sigma = power * float(np.std(column))
        out = column + rng.normal(0.0, 1.0, n) * sigma
        return np.clip(out, float(column.min()), float(column.max()))
    k = int(math.floor(power * n))
    if k == 0:
        return out
    mask = rng.permutation(n)[:k]
    if noise_type == ZMN:
        out[mask] = column.min()
        return out
    if noise_type == SPN:
        lo, hi = float(column.min()), float(column.max())
        coin = rng.integers(0, 2, size=k)
        out[mask] = np.where(coin == 1, hi, lo)
        return out
    levels = np.unique(column)
    if len(levels) < 2:
        return out
    for pos in mask:
        pool = levels[levels != out[pos]]
        out[pos] = pool[rng.integers(len(pool))]
    return out


@dataclass(frozen=True)
class NoisyFeature:
    name: str
    source_index: int
    source_name: str
    noise_type: str
    planned_power: float
    achieved_power: float
    achieved_assoc: float
    assoc_kind: str
    degenerate: bool
    best_effort: bool
    column: np.ndarray


@dataclass(frozen=True)
class AugmentedDataset:
    """Normalized dataset plus its generated noisy features, in plan order."""

    base: TypedDataset
    noisy: tuple

    @property
    def n_features_total(self) -> int:
        return self.base.n_features + len(self.noisy)

    def all_names(self) -> tuple:
        return self.base.feature_names + tuple(nf.name for nf in self.noisy)

    def all_kinds(self) -> tuple:
        return self.base.kinds + tuple(self.base.kinds[nf.source_index] for nf in self.noisy)

    def all_columns(self) -> tuple:
        return self.base.columns + tuple(nf.column for nf in self.noisy)

    def lineage(self) -> dict:
        out = {name: name for name in self.base.feature_names}
        out.update({nf.name: nf.source_name for nf in self.noisy})
        return out

    def to_typed(self) -> TypedDataset:
        extra = np.zeros((self.base.n_samples, len(self.noisy)), dtype=bool)
        return replace(
            self.base,
            feature_names=self.all_names(),
            kinds=self.all_kinds(),
            columns=self.all_columns(),
            missing_mask=np.concatenate([self.base.missing_mask, extra], axis=1),
        )


def generate(ds: TypedDataset, noise_plan: NoisePlan, seed: int,
             target_min_assoc: float = 0.9) -> AugmentedDataset:
    """Create every planned noisy feature with the auto-power loop.

    Per copy, powers 0.2, 0.1, ... (six halvings at most) are tried until the
    absolute association with the source reaches target_min_assoc; each
    attempt draws from its own seed substream, so results are reproducible and
    independent of neighboring copies. An unreachable target keeps the best
    attempt and flags it best-effort; degenerate associations (constant
    source) are flagged the same way.
    """
    if len(noise_plan.entries) != ds.n_features:
        raise NoiseError(
            f"plan covers {len(noise_plan.entries)} features, dataset has {ds.n_features}"
        )
    taken = set(ds.feature_names)
    noisy: list = []
    for f, entry in enumerate(noise_plan.entries):
        kind = ds.kinds[f].kind
        ntype = entry.noise_type or type_for_kind(kind)
        source = ds.columns[f]
        for c in range(entry.count):
            best = None
            accepted = False
            for attempt in range(MAX_HALVINGS + 1):
                power = entry.power / (2 ** attempt)
                rng = substream(seed, "noise", f, c, attempt)
                col = corrupt(source, kind, ntype, power, rng)
                res, tag = association(col, source, kind, kind)
                strength = -1.0 if res.degenerate else abs(res.value)
                if best is None or strength > best[0]:
                    best = (strength, power, col, res, tag)
                if not res.degenerate and abs(res.value) >= target_min_assoc:
                    accepted = True
                    break
            _, power, col, res, tag = best
            name = f"{ds.feature_names[f]}_n{c + 1}"
            while name in taken:
                name += "x"
            taken.add(name)
            noisy.append(
                NoisyFeature(
                    name=name,
                    source_index=f,
                    source_name=ds.feature_names[f],
                    noise_type=ntype,
                    planned_power=entry.power,
                    achieved_power=power,
                    achieved_assoc=res.value,
                    assoc_kind=tag,
                    degenerate=res.degenerate,
                    best_effort=not accepted,
                    column=col,
                )
            )
    return AugmentedDataset(base=ds, noisy=tuple(noisy))
