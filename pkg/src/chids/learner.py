"""Misuse classifiers: a gain-ratio decision-tree builder, a PART-style
decision-list learner that repeatedly grows partial pruned trees and keeps
the best-coverage leaf as the next rule, a majority baseline, and versioned
text serialization for all three.

All training is deterministic: candidate splits are examined in schema
order, split ties break on feature index then threshold, leaf ties break on
total training frequency then class order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from . import kernels
from .errors import DataError, IoError, SchemaMismatch
from .kdd import NOMINAL, NUMERIC, AttackClass, Dataset, KddRecord, N_CLASSES


@dataclass(frozen=True)
class TreeParams:
    min_leaf: int = 2          # smallest admissible branch size
    confidence: float = 0.25   # pessimistic-error confidence factor
    prune: bool = True


class Leaf:
    __slots__ = ("dist", "klass")

    def __init__(self, dist: np.ndarray, klass: AttackClass):
        self.dist = np.asarray(dist, dtype=np.int64)
        self.klass = klass


class Split:
    __slots__ = ("feature", "kind", "threshold", "symbols", "children", "majority_child", "dist")

    def __init__(self, feature, kind, threshold, symbols, children, majority_child, dist):
        self.feature = feature
        self.kind = kind                    # numeric | nominal
        self.threshold = threshold          # numeric only
        self.symbols = symbols              # nominal only: tuple of branch symbols
        self.children = children
        self.majority_child = majority_child
        self.dist = np.asarray(dist, dtype=np.int64)


@dataclass(frozen=True)
class RuleTest:
    feature: str
    op: str          # "==" (nominal), "<=" or ">" (numeric)
    value: object    # symbol string or float


@dataclass(frozen=True)
class Rule:
    tests: tuple[RuleTest, ...]
    klass: AttackClass
    coverage: int
    errors: int


class _ModelBase:
    def __init__(self, feature_names, feature_kinds):
        self.feature_names = tuple(feature_names)
        self.feature_kinds = tuple(feature_kinds)

    def _check(self, ds: Dataset) -> None:
        if tuple(ds.schema.names) != self.feature_names or tuple(
            f.kind for f in ds.schema.features
        ) != self.feature_kinds:
            raise SchemaMismatch("dataset schema differs from the model's training schema")

    def _check_record(self, record: KddRecord) -> None:
        if len(record.values) != len(self.feature_names):
            raise SchemaMismatch(
                f"record has {len(record.values)} values, model expects {len(self.feature_names)}"
            )


class MajorityModel(_ModelBase):
    """Predicts the majority training class unconditionally."""

    kind = "majority"

    def __init__(self, klass: AttackClass, feature_names, feature_kinds):
        super().__init__(feature_names, feature_kinds)
        self.klass = klass

    def predict_dataset(self, ds: Dataset) -> np.ndarray:
        self._check(ds)
        return np.full(len(ds), int(self.klass), dtype=np.int32)

    def predict_record(self, record: KddRecord) -> AttackClass:
        self._check_record(record)
        return self.klass


class DecisionTree(_ModelBase):
    kind = "tree"

    def __init__(self, root, feature_names, feature_kinds):
        super().__init__(feature_names, feature_kinds)
        self.root = root

    def predict_dataset(self, ds: Dataset) -> np.ndarray:
        self._check(ds)
        out = np.zeros(len(ds), dtype=np.int32)
        self._route(self.root, ds, np.arange(len(ds)), out)
        return out

    def _route(self, node, ds, idx, out):
        if idx.size == 0:
            return
        if isinstance(node, Leaf):
            out[idx] = int(node.klass)
            return
        if node.kind == NUMERIC:
            col = ds.column(node.feature)[idx]
            mask = col <= node.threshold
            self._route(node.children[0], ds, idx[mask], out)
            self._route(node.children[1], ds, idx[~mask], out)
        else:
            # unseen symbols (codes outside the training branches) route to
            # the majority child
            domain_size = max(len(ds.schema.domains[node.feature]), 1)
            lut = np.full(domain_size, node.majority_child, dtype=np.int64)
            for ci, sym in enumerate(node.symbols):
                code = ds.schema.code(node.feature, sym)
                if 0 <= code < domain_size:
                    lut[code] = ci
            codes = ds.column(node.feature)[idx]
            assign = lut[codes]
            for ci, child in enumerate(node.children):
                self._route(child, ds, idx[assign == ci], out)

    def predict_record(self, record: KddRecord) -> AttackClass:
        self._check_record(record)
        pos = {n: i for i, n in enumerate(self.feature_names)}
        node = self.root
        while isinstance(node, Split):
            v = record.values[pos[node.feature]]
            if node.kind == NUMERIC:
                node = node.children[0] if float(v) <= node.threshold else node.children[1]
            else:
                try:
                    node = node.children[node.symbols.index(str(v))]
                except ValueError:
                    node = node.children[node.majority_child]
        return node.klass


class RuleSet(_ModelBase):
    """Ordered decision list; the first matching rule wins, otherwise the
    default class applies."""

    kind = "part"

    def __init__(self, rules, default: AttackClass, feature_names, feature_kinds):
        super().__init__(feature_names, feature_kinds)
        self.rules = tuple(rules)
        self.default = default

    def _test_mask(self, ds: Dataset, test: RuleTest) -> np.ndarray:
        col = ds.column(test.feature)
        if test.op == "==":
            return col == ds.schema.code(test.feature, str(test.value))
        if test.op == "<=":
            return col <= float(test.value)
        return col > float(test.value)

    def predict_dataset(self, ds: Dataset) -> np.ndarray:
        self._check(ds)
        out = np.full(len(ds), int(self.default), dtype=np.int32)
        unassigned = np.ones(len(ds), dtype=bool)
        for rule in self.rules:
            if not unassigned.any():
                break
            m = unassigned.copy()
            for t in rule.tests:
                m &= self._test_mask(ds, t)
                if not m.any():
                    break
            out[m] = int(rule.klass)
            unassigned &= ~m
        return out

    def predict_record(self, record: KddRecord) -> AttackClass:
        self._check_record(record)
        pos = {n: i for i, n in enumerate(self.feature_names)}
        for rule in self.rules:
            ok = True
            for t in rule.tests:
                v = record.values[pos[t.feature]]
                if t.op == "==":
                    ok = str(v) == str(t.value)
                elif t.op == "<=":
                    ok = float(v) <= float(t.value)
                else:
                    ok = float(v) > float(t.value)
                if not ok:
                    break
            if ok:
                return rule.klass
        return self.default


def predict(model, target):
    """Classify a single KddRecord or a whole Dataset with any model kind."""
    if isinstance(target, Dataset):
        return model.predict_dataset(target)
    return model.predict_record(target)


# --- pessimistic error estimate (upper confidence bound on leaf errors) ---

@lru_cache(maxsize=None)
def _z_quantile(confidence: float) -> float:
    return NormalDist().inv_cdf(1.0 - confidence)


def added_errors(n: float, e: float, confidence: float = 0.25) -> float:
    """Extra errors to charge a leaf with n records and e observed mistakes,
    at the given one-sided confidence."""
    if n <= 0:
        return 0.0
    if e < 1:
        base = n * (1.0 - confidence ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (added_errors(n, 1, confidence) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = _z_quantile(confidence)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (
        1 + z * z / n
    )
    return r * n - e


def _entropy_vec(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class _Candidate:
    findex: int
    feature: str
    kind: str
    gain: float
    split_info: float
    threshold: float | None

    @property
    def ratio(self) -> float:
        return self.gain / self.split_info


class _Grower:
    """Shared machinery for full trees and PART partial trees over one
    training dataset."""

    def __init__(self, ds: Dataset, params: TreeParams):
        self.ds = ds
        self.params = params
        self.y = ds.class_codes.astype(np.int64)
        if (self.y < 0).any():
            raise ValueError("training requires labeled records")
        self.class_totals = np.bincount(self.y, minlength=N_CLASSES)
        self._order = 0

    def leaf_class(self, counts: np.ndarray) -> AttackClass:
        top = counts.max()
        cands = [c for c in range(N_CLASSES) if counts[c] == top]
        best = min(cands, key=lambda c: (-self.class_totals[c], c))
        return AttackClass(best)

    def _node_counts(self, idx) -> np.ndarray:
        return np.bincount(self.y[idx], minlength=N_CLASSES)

    def _pessimistic(self, counts: np.ndarray, klass: AttackClass) -> float:
        n = int(counts.sum())
        e = n - int(counts[int(klass)])
        return e + added_errors(n, e, self.params.confidence)

    def _candidates(self, idx, counts, used_nominal) -> list[_Candidate]:
        n = idx.size
        h_node = _entropy_vec(counts)
        out = []
        for f in self.ds.schema.features:
            kind, j = self.ds.schema.slot[f.name]
            if kind == NUMERIC:
                gv, gcounts = kernels.group_counts(
                    self.ds.numeric[idx, j], self.y[idx], N_CLASSES
                )
                res = kernels.best_group_cut(gcounts, self.params.min_leaf)
                if res is None:
                    continue
                pos, gain, n_left, _hp, _hl, _hr = res
                thr = (float(gv[pos - 1]) + float(gv[pos])) / 2.0
                p_l = n_left / n
                p_r = (n - n_left) / n
                si = -(p_l * math.log2(p_l)) - (p_r * math.log2(p_r))
                out.append(_Candidate(f.index, f.name, NUMERIC, gain, si, thr))
            else:
                if f.name in used_nominal:
                    continue
                dom = len(self.ds.schema.domains[f.name])
                if dom < 2:
                    continue
                codes = self.ds.nominal[idx, j].astype(np.int64)
                table = np.bincount(
                    codes * N_CLASSES + self.y[idx], minlength=dom * N_CLASSES
                ).reshape(dom, N_CLASSES)
                sizes = table.sum(axis=1)
                if int((sizes >= self.params.min_leaf).sum()) < 2:
                    continue
                cond = 0.0
                for b in range(dom):
                    if sizes[b] > 0:
                        cond += (sizes[b] / n) * _entropy_vec(table[b])
                gain = h_node - cond
                si = _entropy_vec(sizes)
                if si <= 0.0:
                    continue
                out.append(_Candidate(f.index, f.name, NOMINAL, gain, si, None))
        return out

    def _choose(self, cands: list[_Candidate]) -> _Candidate | None:
        if not cands:
            return None
        mean_gain = sum(c.gain for c in cands) / len(cands)
        eligible = [c for c in cands if c.gain >= mean_gain - 1e-12]
        return min(eligible, key=lambda c: (-c.ratio, c.findex))

    def _partition(self, idx, cand: _Candidate):
        """Child index arrays plus the branch descriptors for `cand`."""
        kind, j = self.ds.schema.slot[cand.feature]
        if kind == NUMERIC:
            col = self.ds.numeric[idx, j]
            mask = col <= cand.threshold
            return [idx[mask], idx[~mask]], None
        symbols = tuple(self.ds.schema.domains[cand.feature])
        codes = self.ds.nominal[idx, j]
        return [idx[codes == c] for c in range(len(symbols))], symbols

    # --- full tree ---

    def grow_tree(self, idx, used_nominal=frozenset()):
        counts = self._node_counts(idx)
        klass = self.leaf_class(counts)
        if (counts > 0).sum() <= 1 or idx.size < 2 * self.params.min_leaf:
            return Leaf(counts, klass)
        cand = self._choose(self._candidates(idx, counts, used_nominal))
        if cand is None:
            return Leaf(counts, klass)
        subsets, symbols = self._partition(idx, cand)
        used = used_nominal | {cand.feature} if cand.kind == NOMINAL else used_nominal
        children = []
        for sub in subsets:
            if sub.size == 0:
                children.append(Leaf(np.zeros(N_CLASSES, dtype=np.int64), klass))
            else:
                children.append(self.grow_tree(sub, used))
        majority = int(np.argmax([s.size for s in subsets]))
        return Split(cand.feature, cand.kind, cand.threshold, symbols, children, majority, counts)

    def prune_tree(self, node):
        if isinstance(node, Leaf):
            return node
        node.children = [self.prune_tree(ch) for ch in node.children]
        subtree_err = sum(self._subtree_errors(ch) for ch in node.children)
        klass = self.leaf_class(node.dist)
        leaf_err = self._pessimistic(node.dist, klass)
        if leaf_err <= subtree_err + 0.1:
            return Leaf(node.dist, klass)
        return node

    def _subtree_errors(self, node) -> float:
        if isinstance(node, Leaf):
            return self._pessimistic(node.dist, node.klass)
        return sum(self._subtree_errors(ch) for ch in node.children)

    # --- partial tree (rule extraction) ---

    def expand_partial(self, idx, used_nominal, path):
        """Returns (node, leaves) where leaves are (path, leaf, order) for
        every actual leaf in this subtree. Children are expanded lowest
        class-entropy first; expansion of further children stops as soon as
        one child fails to settle into a leaf, and a fully-leafed node is
        collapsed when the pessimistic error favors it."""
        counts = self._node_counts(idx)
        klass = self.leaf_class(counts)
        if (counts > 0).sum() <= 1 or idx.size < 2 * self.params.min_leaf:
            return self._make_leaf(counts, klass, path)
        cand = self._choose(self._candidates(idx, counts, used_nominal))
        if cand is None:
            return self._make_leaf(counts, klass, path)
        subsets, symbols = self._partition(idx, cand)
        used = used_nominal | {cand.feature} if cand.kind == NOMINAL else used_nominal
        entropies = [
            (_entropy_vec(self._node_counts(s)) if s.size else 0.0, i)
            for i, s in enumerate(subsets)
        ]
        children: list = [None] * len(subsets)
        leaves: list = []
        stopped = False
        for _, i in sorted(entropies):
            sub = subsets[i]
            if sub.size == 0:
                children[i] = Leaf(np.zeros(N_CLASSES, dtype=np.int64), klass)
                continue
            child, sub_leaves = self.expand_partial(sub, used, path + [self._branch_test(cand, symbols, i)])
            children[i] = child
            leaves.extend(sub_leaves)
            if not isinstance(child, Leaf):
                stopped = True
                break
        if not stopped:
            subtree_err = sum(
                self._pessimistic(ch.dist, ch.klass) for ch in children if ch is not None
            )
            if self._pessimistic(counts, klass) <= subtree_err + 0.1:
                return self._make_leaf(counts, klass, path)
        for i, ch in enumerate(children):
            if ch is None:  # unexpanded stub; never a rule candidate
                children[i] = Leaf(self._node_counts(subsets[i]), self.leaf_class(self._node_counts(subsets[i])))
        majority = int(np.argmax([s.size for s in subsets]))
        node = Split(cand.feature, cand.kind, cand.threshold, symbols, children, majority, counts)
        return node, leaves

    def _make_leaf(self, counts, klass, path):
        leaf = Leaf(counts, klass)
        self._order += 1
        return leaf, [(tuple(path), leaf, self._order)]

    def _branch_test(self, cand: _Candidate, symbols, i):
        if cand.kind == NUMERIC:
            return RuleTest(cand.feature, "<=" if i == 0 else ">", cand.threshold)
        return RuleTest(cand.feature, "==", symbols[i])

    def extract_rule(self, idx) -> Rule:
        """Best-coverage leaf of one partial tree over `idx`, as a rule."""
        _, leaves = self.expand_partial(idx, frozenset(), [])
        viable = [(p, l, o) for p, l, o in leaves if int(l.dist.sum()) > 0]
        path, leaf, _ = min(viable, key=lambda t: (-int(t[1].dist.sum()), t[2]))
        cov = int(leaf.dist.sum())
        err = cov - int(leaf.dist[int(leaf.klass)])
        return Rule(_merge_tests(path), leaf.klass, cov, err)


def _merge_tests(path) -> tuple[RuleTest, ...]:
    """Collapse repeated numeric tests on one feature into the tightest
    bounds, preserving first-appearance feature order."""
    lo: dict[str, float] = {}
    hi: dict[str, float] = {}
    eq: dict[str, str] = {}
    order: list[str] = []
    for t in path:
        if t.feature not in order:
            order.append(t.feature)
        if t.op == "==":
            eq[t.feature] = t.value
        elif t.op == "<=":
            hi[t.feature] = min(hi.get(t.feature, math.inf), t.value)
        else:
            lo[t.feature] = max(lo.get(t.feature, -math.inf), t.value)
    tests = []
    for f in order:
        if f in eq:
            tests.append(RuleTest(f, "==", eq[f]))
        if f in lo:
            tests.append(RuleTest(f, ">", lo[f]))
        if f in hi:
            tests.append(RuleTest(f, "<=", hi[f]))
    return tuple(tests)


def build_tree(train: Dataset, params: TreeParams | None = None) -> DecisionTree:
    """Gain-ratio decision tree over the whole training set (pruned by
    pessimistic error unless params.prune is off)."""
    params = params or TreeParams()
    g = _Grower(train, params)
    root = g.grow_tree(np.arange(len(train)))
    if params.prune:
        root = g.prune_tree(root)
    return DecisionTree(root, train.schema.names, [f.kind for f in train.schema.features])


def build_partial_tree_rule(residual: Dataset, params: TreeParams | None = None) -> Rule:
    """One partial-tree iteration over `residual`: grow, prune on the fly,
    return the rule of the best-coverage leaf."""
    if len(residual) == 0:
        raise ValueError("residual is empty")
    params = params or TreeParams()
    return _Grower(residual, params).extract_rule(np.arange(len(residual)))


def _rule_mask(ds: Dataset, idx: np.ndarray, rule: Rule) -> np.ndarray:
    m = np.ones(idx.size, dtype=bool)
    for t in rule.tests:
        col = ds.column(t.feature)[idx]
        if t.op == "==":
            m &= col == ds.schema.code(t.feature, str(t.value))
        elif t.op == "<=":
            m &= col <= float(t.value)
        else:
            m &= col > float(t.value)
    return m


def train_part(train: Dataset, params: TreeParams | None = None) -> RuleSet:
    """Separate-and-conquer loop: extract the best partial-tree rule, drop
    the records it covers, repeat until nothing is left."""
    if len(train) == 0:
        raise ValueError("training set is empty")
    params = params or TreeParams()
    g = _Grower(train, params)
    residual = np.arange(len(train))
    rules = []
    while residual.size:
        rule = g.extract_rule(residual)
        covered = _rule_mask(train, residual, rule)
        if not covered.any():
            raise AssertionError("extracted rule covers nothing; learner invariant broken")
        rules.append(rule)
        residual = residual[~covered]
    default = g.leaf_class(g.class_totals)
    return RuleSet(rules, default, train.schema.names, [f.kind for f in train.schema.features])


def train_majority_baseline(train: Dataset) -> MajorityModel:
    if len(train) == 0:
        raise ValueError("training set is empty")
    counts = np.bincount(train.class_codes[train.class_codes >= 0], minlength=N_CLASSES)
    top = counts.max()
    best = min(
        (c for c in range(N_CLASSES) if counts[c] == top),
        key=lambda c: (-counts[c], c),
    )
    return MajorityModel(
        AttackClass(best), train.schema.names, [f.kind for f in train.schema.features]
    )


# --- serialization -------------------------------------------------------

MODEL_MAGIC = "#chids-model v1"
_SYMBOL_RE = re.compile(r"^[^\s,]+$")


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    s = str(v)
    if not _SYMBOL_RE.match(s):
        raise DataError(f"symbol {s!r} is not serializable (whitespace or comma)")
    return s


def _fmt_rule(rule: Rule) -> str:
    if rule.tests:
        cond = " AND ".join(f"{t.feature} {t.op} {_fmt_value(t.value)}" for t in rule.tests)
    else:
        cond = "TRUE"
    return f"rule IF {cond} THEN {rule.klass.tag} cov={rule.coverage} err={rule.errors}"


_RULE_RE = re.compile(r"^rule IF (.+) THEN (\w+) cov=(\d+) err=(\d+)$")


def _parse_rule(line: str, kinds: dict[str, str]) -> Rule:
    m = _RULE_RE.match(line)
    if not m:
        raise DataError(f"bad rule line: {line!r}")
    cond, tag, cov, err = m.groups()
    tests = []
    if cond != "TRUE":
        for part in cond.split(" AND "):
            feat, op, val = part.split(" ", 2)
            if op not in ("==", "<=", ">"):
                raise DataError(f"bad operator in rule: {part!r}")
            value = val if kinds.get(feat) == NOMINAL else float(val)
            tests.append(RuleTest(feat, op, value))
    return Rule(tuple(tests), AttackClass.from_tag(tag), int(cov), int(err))


def _write_node(fh, node, depth: int) -> None:
    pad = " " * depth
    dist = ",".join(str(int(v)) for v in node.dist)
    if isinstance(node, Leaf):
        fh.write(f"{pad}leaf {node.klass.tag} dist={dist}\n")
        return
    if node.kind == NUMERIC:
        fh.write(
            f"{pad}split numeric {node.feature} {node.threshold!r} "
            f"majority={node.majority_child} dist={dist}\n"
        )
    else:
        syms = ",".join(_fmt_value(s) for s in node.symbols)
        fh.write(
            f"{pad}split nominal {node.feature} {syms} "
            f"majority={node.majority_child} dist={dist}\n"
        )
    for child in node.children:
        _write_node(fh, child, depth + 1)


def _parse_nodes(lines: list[str], pos: int, depth: int):
    line = lines[pos]
    body = line[depth:]
    if line[:depth] != " " * depth or body.startswith(" "):
        raise DataError(f"bad tree indentation at line {pos}: {line!r}")
    parts = body.split(" ")
    dist = np.array([int(v) for v in parts[-1].split("=", 1)[1].split(",")], dtype=np.int64)
    if parts[0] == "leaf":
        return Leaf(dist, AttackClass.from_tag(parts[1])), pos + 1
    _, kind, feature = parts[0], parts[1], parts[2]
    majority = int(parts[-2].split("=", 1)[1])
    if kind == NUMERIC:
        threshold = float(parts[3])
        n_children, symbols = 2, None
    else:
        symbols = tuple(parts[3].split(","))
        threshold = None
        n_children = len(symbols)
    children = []
    nxt = pos + 1
    for _ in range(n_children):
        child, nxt = _parse_nodes(lines, nxt, depth + 1)
        children.append(child)
    return Split(feature, kind, threshold, symbols, children, majority, dist), nxt


def save_model(model, path) -> None:
    """Versioned structured-text model file (round-trippable)."""
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(MODEL_MAGIC + "\n")
            fh.write(f"kind {model.kind}\n")
            feats = ",".join(
                f"{n}:{k}" for n, k in zip(model.feature_names, model.feature_kinds)
            )
            fh.write(f"features {feats}\n")
            if isinstance(model, MajorityModel):
                fh.write(f"default {model.klass.tag}\n")
            elif isinstance(model, RuleSet):
                fh.write(f"default {model.default.tag}\n")
                for rule in model.rules:
                    fh.write(_fmt_rule(rule) + "\n")
            elif isinstance(model, DecisionTree):
                _write_node(fh, model.root, 0)
            else:
                raise DataError(f"unknown model type {type(model).__name__}")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_model(path):
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from exc
    if not lines or lines[0] != MODEL_MAGIC:
        raise DataError(f"{path}: not a chids model file")
    kind = lines[1].split(" ", 1)[1]
    pairs = [p.split(":") for p in lines[2].split(" ", 1)[1].split(",")]
    names = tuple(p[0] for p in pairs)
    kinds = tuple(p[1] for p in pairs)
    kind_of = dict(pairs)
    body = [ln for ln in lines[3:] if ln.strip()]
    if kind == "majority":
        return MajorityModel(AttackClass.from_tag(body[0].split(" ", 1)[1]), names, kinds)
    if kind == "part":
        default = AttackClass.from_tag(body[0].split(" ", 1)[1])
        rules = [_parse_rule(ln, kind_of) for ln in body[1:]]
        return RuleSet(rules, default, names, kinds)
    if kind == "tree":
        root, _ = _parse_nodes(body, 0, 0)
        return DecisionTree(root, names, kinds)
    raise DataError(f"{path}: unknown model kind {kind!r}")
