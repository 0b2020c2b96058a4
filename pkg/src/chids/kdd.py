"""KDD-format connection records: feature schema, parsing, class taxonomy, datasets.

A record is one line of 41 comma-separated feature values plus a label
(optionally suffixed with a period). Datasets are held columnar: numeric
features in one float64 matrix, nominal features as integer codes into
per-feature symbol domains that grow in first-sighting order during ingest.
"""

from __future__ import annotations

import enum
import gzip
import json
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DataError,
    DatasetParseError,
    FieldCountMismatch,
    IoError,
    NumericParseError,
    SchemaMismatch,
    UnknownLabel,
    UnknownNominalSymbol,
)

log = logging.getLogger(__name__)

NUMERIC = "numeric"
NOMINAL = "nominal"

# Standard 41-feature connection-record schema: 34 numeric + 7 nominal
# (protocol_type, service, flag, land, logged_in, is_host_login,
# is_guest_login are the symbolic ones).
FEATURE_TABLE: tuple[tuple[str, str], ...] = (
    ("duration", NUMERIC),
    ("protocol_type", NOMINAL),
    ("service", NOMINAL),
    ("flag", NOMINAL),
    ("src_bytes", NUMERIC),
    ("dst_bytes", NUMERIC),
    ("land", NOMINAL),
    ("wrong_fragment", NUMERIC),
    ("urgent", NUMERIC),
    ("hot", NUMERIC),
    ("num_failed_logins", NUMERIC),
    ("logged_in", NOMINAL),
    ("num_compromised", NUMERIC),
    ("root_shell", NUMERIC),
    ("su_attempted", NUMERIC),
    ("num_root", NUMERIC),
    ("num_file_creations", NUMERIC),
    ("num_shells", NUMERIC),
    ("num_access_files", NUMERIC),
    ("num_outbound_cmds", NUMERIC),
    ("is_host_login", NOMINAL),
    ("is_guest_login", NOMINAL),
    ("count", NUMERIC),
    ("srv_count", NUMERIC),
    ("serror_rate", NUMERIC),
    ("srv_serror_rate", NUMERIC),
    ("rerror_rate", NUMERIC),
    ("srv_rerror_rate", NUMERIC),
    ("same_srv_rate", NUMERIC),
    ("diff_srv_rate", NUMERIC),
    ("srv_diff_host_rate", NUMERIC),
    ("dst_host_count", NUMERIC),
    ("dst_host_srv_count", NUMERIC),
    ("dst_host_same_srv_rate", NUMERIC),
    ("dst_host_diff_srv_rate", NUMERIC),
    ("dst_host_same_src_port_rate", NUMERIC),
    ("dst_host_srv_diff_host_rate", NUMERIC),
    ("dst_host_serror_rate", NUMERIC),
    ("dst_host_srv_serror_rate", NUMERIC),
    ("dst_host_rerror_rate", NUMERIC),
    ("dst_host_srv_rerror_rate", NUMERIC),
)


class AttackClass(enum.IntEnum):
    """Five traffic classes; the integer order is the fixed tie-break order."""

    NORMAL = 0
    DOS = 1
    PROBE = 2
    R2L = 3
    U2R = 4

    @property
    def tag(self) -> str:
        return self.name.lower()

    @classmethod
    def from_tag(cls, tag: str) -> "AttackClass":
        return cls[tag.upper()]


N_CLASSES = len(AttackClass)


@dataclass(frozen=True)
class FeatureDef:
    index: int
    name: str
    kind: str


class FeatureSchema:
    """Ordered feature definitions plus mutable nominal symbol domains.

    Domains grow in first-sighting order during lenient ingest; strict
    parsing rejects symbols outside the recorded domain.
    """

    def __init__(self, defs: Sequence[FeatureDef], domains: dict[str, list[str]] | None = None):
        self.features: tuple[FeatureDef, ...] = tuple(defs)
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError("duplicate feature names")
        if [f.index for f in self.features] != list(range(len(self.features))):
            raise ValueError("feature indices must be contiguous from 0")
        self.names: tuple[str, ...] = tuple(names)
        self.kind_of: dict[str, str] = {f.name: f.kind for f in self.features}
        self.numeric_names: tuple[str, ...] = tuple(f.name for f in self.features if f.kind == NUMERIC)
        self.nominal_names: tuple[str, ...] = tuple(f.name for f in self.features if f.kind == NOMINAL)
        # name -> (kind, column slot within the numeric or nominal matrix)
        self.slot: dict[str, tuple[str, int]] = {}
        for name in self.numeric_names:
            self.slot[name] = (NUMERIC, self.numeric_names.index(name))
        for name in self.nominal_names:
            self.slot[name] = (NOMINAL, self.nominal_names.index(name))
        self.domains: dict[str, list[str]] = {n: [] for n in self.nominal_names}
        if domains:
            for name, syms in domains.items():
                if name in self.domains:
                    self.domains[name] = list(syms)
        self._codes: dict[str, dict[str, int]] = {
            n: {s: i for i, s in enumerate(d)} for n, d in self.domains.items()
        }

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def n_numeric(self) -> int:
        return len(self.numeric_names)

    @property
    def n_nominal(self) -> int:
        return len(self.nominal_names)

    @classmethod
    def default(cls) -> "FeatureSchema":
        return cls([FeatureDef(i, n, k) for i, (n, k) in enumerate(FEATURE_TABLE)])

    def code(self, name: str, symbol: str, add: bool = False) -> int:
        """Code of `symbol` in `name`'s domain; -1 if absent, appended when add=True."""
        codes = self._codes[name]
        c = codes.get(symbol, -1)
        if c < 0 and add:
            c = len(self.domains[name])
            self.domains[name].append(symbol)
            codes[symbol] = c
        return c

    def symbol(self, name: str, code: int) -> str:
        return self.domains[name][code]

    def subset(self, keep: Sequence[str]) -> "FeatureSchema":
        """New schema with only `keep` features, in original order, reindexed."""
        keep_set = set(keep)
        defs = []
        domains = {}
        for f in self.features:
            if f.name in keep_set:
                defs.append(FeatureDef(len(defs), f.name, f.kind))
                if f.kind == NOMINAL:
                    domains[f.name] = list(self.domains[f.name])
        return FeatureSchema(defs, domains)

    def same_layout(self, other: "FeatureSchema") -> bool:
        return self.names == other.names and [f.kind for f in self.features] == [
            f.kind for f in other.features
        ]

    def copy(self) -> "FeatureSchema":
        return FeatureSchema(self.features, {n: list(d) for n, d in self.domains.items()})

    def to_json_obj(self) -> dict:
        return {
            "features": [[f.name, f.kind] for f in self.features],
            "domains": {n: list(d) for n, d in self.domains.items()},
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FeatureSchema":
        defs = [FeatureDef(i, n, k) for i, (n, k) in enumerate(obj["features"])]
        return cls(defs, obj.get("domains", {}))


class ClassTaxonomy:
    """Total mapping from the 23 raw labels onto the five classes."""

    def __init__(self, members: dict[AttackClass, Sequence[str]]):
        self.members = {c: tuple(members.get(c, ())) for c in AttackClass}
        self.label_class: dict[str, AttackClass] = {}
        for cls_, labels in self.members.items():
            for lab in labels:
                lab = lab.lower()
                if lab in self.label_class:
                    raise ValueError(f"label {lab!r} mapped twice")
                self.label_class[lab] = cls_

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.label_class)

    def classify(self, label: str) -> AttackClass:
        cls_ = self.label_class.get(label.lower())
        if cls_ is None:
            raise UnknownLabel(f"unknown label {label!r}")
        return cls_


DEFAULT_TAXONOMY = ClassTaxonomy(
    {
        AttackClass.NORMAL: ("normal",),
        AttackClass.DOS: ("back", "land", "neptune", "pod", "smurf", "teardrop"),
        AttackClass.PROBE: ("ipsweep", "nmap", "portsweep", "satan"),
        AttackClass.R2L: (
            "ftp_write",
            "guess_passwd",
            "imap",
            "multihop",
            "phf",
            "spy",
            "warezclient",
            "warezmaster",
        ),
        AttackClass.U2R: ("buffer_overflow", "loadmodule", "perl", "rootkit"),
    }
)


def classify_label(label: str, taxonomy: ClassTaxonomy = DEFAULT_TAXONOMY) -> AttackClass:
    """Class of a raw label (case-insensitive, trailing period tolerated)."""
    label = label.strip().lower()
    if label.endswith("."):
        label = label[:-1]
    return taxonomy.classify(label)


@dataclass(frozen=True)
class KddRecord:
    """One connection sample: 41 typed values plus the raw label.

    Numeric values are floats, nominal values their symbol strings. `label`
    is None for unlabeled records (only produced when explicitly allowed).
    """

    values: tuple
    label: str | None


def parse_record(
    line: str,
    schema: FeatureSchema,
    strict: bool = False,
    allow_unlabeled: bool = False,
) -> KddRecord:
    """Parse one comma-separated record line.

    Labels are lower-cased and stripped of a trailing period. In strict mode
    a nominal symbol outside the schema's domain is an error; otherwise it is
    appended to the domain.
    """
    fields = line.rstrip("\r\n").split(",")
    n = schema.n_features
    if len(fields) == n + 1:
        raw_label: str | None = fields[n].strip()
    elif allow_unlabeled and len(fields) == n:
        raw_label = None
    else:
        raise FieldCountMismatch(f"expected {n + 1} fields, got {len(fields)}")
    values = []
    for fd, raw in zip(schema.features, fields):
        raw = raw.strip()
        if fd.kind == NUMERIC:
            try:
                v = float(raw)
            except ValueError:
                raise NumericParseError(fd.index, raw) from None
            if not math.isfinite(v):
                raise NumericParseError(fd.index, raw)
            values.append(v)
        else:
            if strict and schema.code(fd.name, raw) < 0:
                raise UnknownNominalSymbol(f"feature {fd.name}: unknown symbol {raw!r}")
            schema.code(fd.name, raw, add=True)
            values.append(raw)
    label = None
    if raw_label is not None:
        label = raw_label.lower()
        if label.endswith("."):
            label = label[:-1]
    return KddRecord(tuple(values), label)


def serialize_record(record: KddRecord) -> str:
    """Inverse of parse_record (floats via repr, so the round trip is exact)."""
    parts = [repr(v) if isinstance(v, float) else str(v) for v in record.values]
    if record.label is not None:
        parts.append(record.label)
    return ",".join(parts)


class Dataset:
    """Columnar record store bound to a schema and a taxonomy.

    `numeric` is (n, n_numeric) float64, `nominal` (n, n_nominal) int32 codes
    into the schema domains, `class_codes` int32 AttackClass values (-1 marks
    an unlabeled record). Instances are treated as immutable.
    """

    def __init__(
        self,
        schema: FeatureSchema,
        numeric: np.ndarray,
        nominal: np.ndarray,
        labels: np.ndarray,
        class_codes: np.ndarray,
        taxonomy: ClassTaxonomy = DEFAULT_TAXONOMY,
    ):
        self.schema = schema
        self.labels = np.asarray(labels, dtype=object)
        n = len(self.labels)
        self.numeric = np.asarray(numeric, dtype=np.float64).reshape(n, schema.n_numeric)
        self.nominal = np.asarray(nominal, dtype=np.int32).reshape(n, schema.n_nominal)
        self.class_codes = np.asarray(class_codes, dtype=np.int32)
        self.taxonomy = taxonomy
        self.parse_errors: list[tuple[int, str]] = []
        if not (len(self.labels) == len(self.class_codes) == self.numeric.shape[0] == self.nominal.shape[0]):
            raise ValueError("column length mismatch")

    def __len__(self) -> int:
        return self.numeric.shape[0]

    @property
    def n(self) -> int:
        return len(self)

    def class_histogram(self) -> dict[AttackClass, int]:
        labeled = self.class_codes[self.class_codes >= 0]
        counts = np.bincount(labeled, minlength=N_CLASSES)
        return {c: int(counts[c]) for c in AttackClass}

    def column(self, name: str) -> np.ndarray:
        kind, j = self.schema.slot[name]
        return self.numeric[:, j] if kind == NUMERIC else self.nominal[:, j]

    def record(self, i: int) -> KddRecord:
        values = []
        for f in self.schema.features:
            kind, j = self.schema.slot[f.name]
            if kind == NUMERIC:
                values.append(float(self.numeric[i, j]))
            else:
                values.append(self.schema.symbol(f.name, int(self.nominal[i, j])))
        label = self.labels[i]
        return KddRecord(tuple(values), None if label is None else str(label))

    def iter_records(self) -> Iterator[KddRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.schema,
            self.numeric[idx],
            self.nominal[idx],
            self.labels[idx],
            self.class_codes[idx],
            self.taxonomy,
        )

    def row_keys(self) -> np.ndarray:
        """One opaque sortable key per record covering all features AND the label.

        Numeric values are compared by bit pattern (ingest never produces
        NaN or -0.0), so exact duplicates get identical keys.
        """
        n = len(self)
        labs = np.array(["" if l is None else l for l in self.labels])
        _, lab_codes = np.unique(labs, return_inverse=True)
        parts = [
            np.ascontiguousarray(self.numeric).view(np.uint64),
            self.nominal.astype(np.uint64),
            lab_codes.astype(np.uint64).reshape(n, 1),
        ]
        packed = np.ascontiguousarray(np.concatenate(parts, axis=1))
        return packed.view(np.dtype((np.void, packed.shape[1] * 8))).reshape(n)

    @classmethod
    def from_records(
        cls,
        records: Iterable[KddRecord],
        schema: FeatureSchema | None = None,
        taxonomy: ClassTaxonomy = DEFAULT_TAXONOMY,
    ) -> "Dataset":
        schema = schema if schema is not None else FeatureSchema.default()
        records = list(records)
        n = len(records)
        numeric = np.zeros((n, schema.n_numeric))
        nominal = np.zeros((n, schema.n_nominal), dtype=np.int32)
        labels = np.empty(n, dtype=object)
        codes = np.full(n, -1, dtype=np.int32)
        for i, r in enumerate(records):
            if len(r.values) != schema.n_features:
                raise SchemaMismatch(f"record {i}: {len(r.values)} values vs {schema.n_features} features")
            for f in schema.features:
                kind, j = schema.slot[f.name]
                v = r.values[f.index]
                if kind == NUMERIC:
                    numeric[i, j] = float(v)
                else:
                    nominal[i, j] = schema.code(f.name, str(v), add=True)
            labels[i] = r.label
            if r.label is not None:
                codes[i] = int(taxonomy.classify(r.label))
        return cls(schema, numeric, nominal, labels, codes, taxonomy)


def _first_sighting_codes(values: np.ndarray, existing: list[str]) -> tuple[np.ndarray, list[str]]:
    """Factorize string values, keeping `existing` symbol order and appending
    unseen symbols in first-appearance order."""
    uniq, first_pos, inverse = np.unique(values, return_index=True, return_inverse=True)
    known = {s: i for i, s in enumerate(existing)}
    vocab = list(existing)
    rank = np.empty(len(uniq), dtype=np.int64)
    new_syms = [(first_pos[k], k) for k, u in enumerate(uniq) if u not in known]
    for k, u in enumerate(uniq):
        if u in known:
            rank[k] = known[u]
    for pos, k in sorted(new_syms):
        rank[k] = len(vocab)
        vocab.append(str(uniq[k]))
    return rank[inverse], vocab


def _open_maybe_gzip(path):
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="ascii", newline="")
    return open(path, "rt", encoding="ascii", newline="")


def load_dataset(
    path,
    schema: FeatureSchema | None = None,
    taxonomy: ClassTaxonomy = DEFAULT_TAXONOMY,
    strict: bool = False,
    error_budget: int = 100,
    chunk_lines: int = 131072,
) -> Dataset:
    """Load a KDD-format file (plain or gzip) into a columnar Dataset.

    Bad lines are collected with their line numbers and skipped; once more
    than `error_budget` accumulate (or immediately, in strict mode) the load
    aborts with DatasetParseError. Surviving errors are kept on
    `dataset.parse_errors`.
    """
    schema = schema if schema is not None else FeatureSchema.default()
    n_feat = schema.n_features
    num_slots = [schema.slot[f.name][1] if f.kind == NUMERIC else -1 for f in schema.features]
    errors: list[tuple[int, str]] = []

    def note(line_no, msg):
        errors.append((line_no, msg))
        if strict or len(errors) > error_budget:
            raise DatasetParseError(errors)

    numeric_chunks: list[np.ndarray] = []
    nominal_raw: list[list[np.ndarray]] = [[] for _ in schema.nominal_names]
    label_chunks: list[np.ndarray] = []
    code_chunks: list[np.ndarray] = []

    try:
        fh = _open_maybe_gzip(path)
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from exc

    with fh:
        line_no = 0
        while True:
            lines = fh.readlines(chunk_lines * 64)
            if not lines:
                break
            rows = []
            for raw in lines:
                line_no += 1
                s = raw.rstrip("\r\n")
                if not s.strip():
                    continue
                fields = s.split(",")
                if len(fields) != n_feat + 1:
                    note(line_no, f"expected {n_feat + 1} fields, got {len(fields)}")
                    continue
                rows.append((line_no, fields))
            if not rows:
                continue

            # Numeric columns: vectorized parse, with a per-value rescue pass
            # to locate offenders when the bulk conversion fails.
            cols = list(zip(*(flds for _, flds in rows)))
            keep = np.ones(len(rows), dtype=bool)
            num_mat = np.zeros((len(rows), schema.n_numeric))
            for f in schema.features:
                if f.kind != NUMERIC:
                    continue
                col = np.array(cols[f.index])
                j = num_slots[f.index]
                try:
                    vals = col.astype(np.float64)
                except ValueError:
                    vals = np.zeros(len(rows))
                    for i, raw in enumerate(col):
                        try:
                            vals[i] = float(raw)
                        except ValueError:
                            note(rows[i][0], f"feature {f.index}: not a number: {raw!r}")
                            keep[i] = False
                bad = ~np.isfinite(vals)
                if bad.any():
                    for i in np.flatnonzero(bad):
                        if keep[i]:
                            note(rows[i][0], f"feature {f.index}: not finite")
                            keep[i] = False
                num_mat[:, j] = vals

            # Labels: strip trailing period, lower-case, classify.
            labs = np.array([flds[n_feat].strip() for _, flds in rows], dtype=object)
            labs = np.array([l[:-1].lower() if l.endswith(".") else l.lower() for l in labs], dtype=object)
            codes = np.full(len(rows), -1, dtype=np.int32)
            for i, l in enumerate(labs):
                cls_ = taxonomy.label_class.get(l)
                if cls_ is None:
                    note(rows[i][0], f"unknown label {l!r}")
                    keep[i] = False
                else:
                    codes[i] = int(cls_)

            kept = np.flatnonzero(keep)
            numeric_chunks.append(num_mat[kept])
            label_chunks.append(labs[kept])
            code_chunks.append(codes[kept])
            for jn, name in enumerate(schema.nominal_names):
                idx = schema.names.index(name)
                nominal_raw[jn].append(np.array(cols[idx], dtype="U32")[kept])

    if numeric_chunks:
        numeric = np.concatenate(numeric_chunks)
        labels = np.concatenate(label_chunks)
        class_codes = np.concatenate(code_chunks)
        n = numeric.shape[0]
        nominal = np.zeros((n, schema.n_nominal), dtype=np.int32)
        for jn, name in enumerate(schema.nominal_names):
            col = np.concatenate(nominal_raw[jn]) if nominal_raw[jn] else np.array([], dtype="U32")
            if strict:
                known = set(schema.domains[name])
                unseen = set(col.tolist()) - known
                if unseen:
                    raise UnknownNominalSymbol(f"feature {name}: unknown symbols {sorted(unseen)!r}")
            codes_col, vocab = _first_sighting_codes(col, schema.domains[name])
            schema.domains[name][:] = vocab
            schema._codes[name] = {s: i for i, s in enumerate(vocab)}
            nominal[:, jn] = codes_col
    else:
        numeric = np.zeros((0, schema.n_numeric))
        nominal = np.zeros((0, schema.n_nominal), dtype=np.int32)
        labels = np.empty(0, dtype=object)
        class_codes = np.zeros(0, dtype=np.int32)

    ds = Dataset(schema, numeric, nominal, labels, class_codes, taxonomy)
    ds.parse_errors = errors
    if errors:
        log.warning("%s: skipped %d bad line(s)", path, len(errors))
    return ds


CACHE_MAGIC = "#chids-dataset v1"


def save_cache(ds: Dataset, path) -> None:
    """Write a dataset to the versioned delimited cache format."""
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(CACHE_MAGIC + "\n")
            fh.write("#schema " + json.dumps(ds.schema.to_json_obj(), separators=(",", ":")) + "\n")
            for r in ds.iter_records():
                fh.write(serialize_record(r) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_cache(path, taxonomy: ClassTaxonomy = DEFAULT_TAXONOMY) -> Dataset:
    try:
        fh = open(path, "r", encoding="ascii")
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from exc
    with fh:
        magic = fh.readline().rstrip("\n")
        if magic != CACHE_MAGIC:
            raise DataError(f"{path}: not a chids dataset cache (got {magic!r})")
        schema_line = fh.readline().rstrip("\n")
        if not schema_line.startswith("#schema "):
            raise DataError(f"{path}: missing schema header")
        schema = FeatureSchema.from_json_obj(json.loads(schema_line[len("#schema "):]))
        records = []
        for line in fh:
            if not line.strip():
                continue
            records.append(parse_record(line, schema, strict=True, allow_unlabeled=True))
    return Dataset.from_records(records, schema, taxonomy)
