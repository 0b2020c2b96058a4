"""Dataset conditioning: exact deduplication, seeded stratified sampling,
ineffective-feature pruning, and z-score normalization fitted on training
data only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleSplit, SchemaMismatch, UnknownFeatureName
from .kdd import AttackClass, Dataset

# Features with no discriminating value on the stock corpus; pruned by default.
DEFAULT_PRUNE = (
    "is_host_login",
    "num_outbound_cmds",
    "urgent",
    "su_attempted",
    "land",
    "num_failed_logins",
)

DEFAULT_MINORITY = (AttackClass.PROBE, AttackClass.R2L, AttackClass.U2R)


@dataclass(frozen=True)
class DedupeResult:
    dataset: Dataset
    n_input: int
    n_output: int

    @property
    def reduction_rate(self) -> float:
        return 0.0 if self.n_input == 0 else 1.0 - self.n_output / self.n_input


def dedupe(ds: Dataset) -> DedupeResult:
    """Drop exact duplicates (all features AND the label equal), keeping the
    first occurrence of each and preserving survivor order."""
    if len(ds) == 0:
        return DedupeResult(ds, 0, 0)
    keys = ds.row_keys()
    _, first = np.unique(keys, return_index=True)
    keep = np.sort(first)
    return DedupeResult(ds.take(keep), len(ds), keep.size)


@dataclass(frozen=True)
class SplitSpec:
    """Sampling plan: minority classes are fully enumerated 2/3-1/3, the rest
    fill the remaining slots proportionally to their deduplicated frequencies."""

    train_size: int = 20000
    test_size: int = 10000
    minority_classes: tuple[AttackClass, ...] = DEFAULT_MINORITY
    seed: int = 0


@dataclass
class SplitManifest:
    """Reproducibility record for one split."""

    seed: int
    train_size: int
    test_size: int
    minority_classes: tuple[str, ...]
    rounding_rule: str
    per_class: dict[str, dict[str, int]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "seed": self.seed,
            "train_size": self.train_size,
            "test_size": self.test_size,
            "minority_classes": list(self.minority_classes),
            "rounding_rule": self.rounding_rule,
            "per_class": self.per_class,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class SplitResult:
    train: Dataset
    test: Dataset
    manifest: SplitManifest


def _round_half_up_two_thirds(n: int) -> int:
    # round-half-up(2n/3), in exact integer arithmetic
    return (4 * n + 3) // 6


def _largest_remainder(slots: int, weights: dict[AttackClass, int]) -> dict[AttackClass, int]:
    """Apportion `slots` proportionally to integer weights; remainders broken
    largest-first, then by class order."""
    total = sum(weights.values())
    if total == 0:
        if slots > 0:
            raise InfeasibleSplit("no records available for proportional fill")
        return {c: 0 for c in weights}
    alloc = {}
    rems = []
    assigned = 0
    for c in sorted(weights, key=int):
        num = slots * weights[c]
        alloc[c] = num // total
        assigned += alloc[c]
        rems.append((-(num % total), int(c), c))
    for _, _, c in sorted(rems)[: slots - assigned]:
        alloc[c] += 1
    return alloc


def stratified_split(ds: Dataset, spec: SplitSpec) -> SplitResult:
    """Deterministic seeded split of a deduplicated dataset.

    Minority classes contribute all their records, round-half-up(2n/3) to
    train and the rest to test; remaining slots are filled from the other
    classes by largest-remainder apportionment over their frequencies.
    Output record order follows the input dataset order.
    """
    hist = ds.class_histogram()
    if spec.train_size + spec.test_size > len(ds):
        raise InfeasibleSplit(
            f"requested {spec.train_size}+{spec.test_size} records, dataset has {len(ds)}"
        )
    minority = tuple(spec.minority_classes)
    majority = tuple(c for c in AttackClass if c not in minority)

    train_quota: dict[AttackClass, int] = {}
    test_quota: dict[AttackClass, int] = {}
    if spec.test_size == 0:
        # Degenerate plan: everything requested goes to the one split, so
        # minority classes are enumerated into train outright.
        for c in minority:
            train_quota[c] = hist[c]
            test_quota[c] = 0
    else:
        for c in minority:
            t = _round_half_up_two_thirds(hist[c])
            train_quota[c] = t
            test_quota[c] = hist[c] - t

    min_train = sum(train_quota.values())
    min_test = sum(test_quota.values())
    if min_train > spec.train_size or min_test > spec.test_size:
        raise InfeasibleSplit(
            f"minority quotas ({min_train} train, {min_test} test) exceed requested sizes"
        )

    maj_weights = {c: hist[c] for c in majority}
    train_fill = _largest_remainder(spec.train_size - min_train, maj_weights)
    test_fill = _largest_remainder(spec.test_size - min_test, maj_weights)
    for c in majority:
        train_quota[c] = train_fill[c]
        test_quota[c] = test_fill[c]
        if train_quota[c] + test_quota[c] > hist[c]:
            raise InfeasibleSplit(
                f"class {c.tag}: need {train_quota[c]}+{test_quota[c]} records, have {hist[c]}"
            )

    rng = np.random.Generator(np.random.PCG64(spec.seed))
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    manifest = SplitManifest(
        seed=spec.seed,
        train_size=spec.train_size,
        test_size=spec.test_size,
        minority_classes=tuple(c.tag for c in minority),
        rounding_rule="minority train = round-half-up(2n/3); majority = largest-remainder proportional fill",
    )
    for c in AttackClass:
        pool = np.flatnonzero(ds.class_codes == int(c))
        pool = pool[rng.permutation(pool.size)]
        t, s = train_quota[c], test_quota[c]
        train_idx.append(pool[:t])
        test_idx.append(pool[t:t + s])
        manifest.per_class[c.tag] = {"available": int(hist[c]), "train": t, "test": s}
    if spec.test_size == 0:
        manifest.notes.append("test_size=0: minority classes fully enumerated into train")

    train = ds.take(np.sort(np.concatenate(train_idx)))
    test = ds.take(np.sort(np.concatenate(test_idx)))
    return SplitResult(train, test, manifest)


def prune_features(ds: Dataset, names) -> Dataset:
    """Remove the named features, reindexing the schema; record count and
    labels are untouched."""
    names = list(names)
    unknown = [n for n in names if n not in ds.schema.names]
    if unknown:
        raise UnknownFeatureName(f"not in schema: {unknown}")
    keep = [n for n in ds.schema.names if n not in set(names)]
    return select_features(ds, keep)


def select_features(ds: Dataset, keep) -> Dataset:
    """Keep only the named features (original order), reindexing the schema."""
    keep = list(keep)
    unknown = [n for n in keep if n not in ds.schema.names]
    if unknown:
        raise UnknownFeatureName(f"not in schema: {unknown}")
    schema = ds.schema.subset(keep)
    num_cols = [ds.schema.slot[n][1] for n in schema.numeric_names]
    nom_cols = [ds.schema.slot[n][1] for n in schema.nominal_names]
    numeric = ds.numeric[:, num_cols] if num_cols else np.zeros((len(ds), 0))
    nominal = ds.nominal[:, nom_cols] if nom_cols else np.zeros((len(ds), 0), dtype=np.int32)
    return Dataset(schema, numeric, nominal, ds.labels, ds.class_codes, ds.taxonomy)


class NormalizationStats:
    """Per-numeric-feature mean and population standard deviation, fitted on
    training data; nominal features pass through unchanged."""

    def __init__(self, feature_names, mu, sigma, n: int):
        self.feature_names = tuple(feature_names)
        self.mu = np.asarray(mu, dtype=np.float64)
        self.sigma = np.asarray(sigma, dtype=np.float64)
        self.n = int(n)
        if self.mu.shape != (len(self.feature_names),) or self.sigma.shape != self.mu.shape:
            raise ValueError("stats shape mismatch")
        if (self.sigma < 0).any():
            raise ValueError("negative sigma")

    def to_json_obj(self) -> dict:
        return {
            "features": list(self.feature_names),
            "mu": [repr(float(v)) for v in self.mu],
            "sigma": [repr(float(v)) for v in self.sigma],
            "n": self.n,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "NormalizationStats":
        return cls(
            obj["features"],
            [float(v) for v in obj["mu"]],
            [float(v) for v in obj["sigma"]],
            obj["n"],
        )


def fit_normalizer(train: Dataset) -> NormalizationStats:
    """Mean and population standard deviation of every numeric feature."""
    if len(train) == 0:
        raise ValueError("cannot fit normalization statistics on an empty dataset")
    mu = train.numeric.mean(axis=0)
    sigma = np.sqrt(((train.numeric - mu) ** 2).mean(axis=0))
    return NormalizationStats(train.schema.numeric_names, mu, sigma, len(train))


def apply_normalizer(ds: Dataset, stats: NormalizationStats) -> Dataset:
    """Map numeric values to (v - mu) / sigma; zero-spread features map to 0."""
    if tuple(ds.schema.numeric_names) != stats.feature_names:
        raise SchemaMismatch(
            f"normalization fitted for {stats.feature_names}, dataset has {ds.schema.numeric_names}"
        )
    safe = np.where(stats.sigma == 0.0, 1.0, stats.sigma)
    numeric = (ds.numeric - stats.mu) / safe
    numeric[:, stats.sigma == 0.0] = 0.0
    return Dataset(ds.schema, numeric, ds.nominal, ds.labels, ds.class_codes, ds.taxonomy)


def render_manifest(
    manifest: SplitManifest,
    dedupe_result: DedupeResult | None = None,
    extra: dict | None = None,
) -> str:
    """Structured text report for a preprocessing run (deterministic)."""
    lines = ["#chids-manifest v1"]
    if dedupe_result is not None:
        lines.append(f"dedupe.input = {dedupe_result.n_input}")
        lines.append(f"dedupe.output = {dedupe_result.n_output}")
        lines.append(f"dedupe.reduction_rate_pct = {dedupe_result.reduction_rate * 100:.2f}")
    lines.append(f"split.seed = {manifest.seed}")
    lines.append(f"split.train_size = {manifest.train_size}")
    lines.append(f"split.test_size = {manifest.test_size}")
    lines.append(f"split.minority_classes = {','.join(manifest.minority_classes)}")
    lines.append(f"split.rounding_rule = {manifest.rounding_rule}")
    for tag, row in manifest.per_class.items():
        lines.append(
            f"split.class.{tag} = available={row['available']} train={row['train']} test={row['test']}"
        )
    for note in manifest.notes:
        lines.append(f"split.note = {note}")
    if extra:
        for key in extra:
            lines.append(f"{key} = {extra[key]}")
    return "\n".join(lines) + "\n"


def manifest_to_json(manifest: SplitManifest) -> str:
    return json.dumps(manifest.to_json_obj(), indent=2, sort_keys=True)
