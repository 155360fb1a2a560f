"""Dataset container, ARFF/CSV ingestion, label filtering and a PCA helper.

ARFF files follow the MULAN layout: numeric (or nominal) feature attributes
followed by ``{0,1}`` label attributes.  Which attributes are labels is
decided by the caller, by name or by counting from the end.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, NonBinaryLabel, NoVariance, ParseError, UnknownLabelName

LABEL_PREFIX = "label:"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Features ``X`` (leading column of ones) and binary labels ``Y``."""

    X: np.ndarray
    Y: np.ndarray
    feature_names: tuple = ()
    label_names: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y)
        if Y.ndim == 1:
            Y = Y[:, None]
        if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
            raise DimensionMismatch(f"X is {X.shape}, Y is {Y.shape}")
        if X.shape[1] < 1 or not np.all(X[:, 0] == 1.0):
            raise DimensionMismatch("first column of X must be all ones")
        if not np.all(np.isfinite(X)):
            raise ParseError("features contain NaN or infinite values")
        if not np.all((Y == 0) | (Y == 1)):
            raise NonBinaryLabel("labels must be 0/1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y.astype(np.int8))
        if not self.feature_names:
            object.__setattr__(self, "feature_names", tuple(f"x{j}" for j in range(1, X.shape[1])))
        if not self.label_names:
            object.__setattr__(self, "label_names", tuple(f"y{k}" for k in range(Y.shape[1])))
        if len(self.feature_names) != X.shape[1] - 1 or len(self.label_names) != Y.shape[1]:
            raise DimensionMismatch("name lists do not match matrix shapes")

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.feature_names == other.feature_names and self.label_names == other.label_names
                and np.array_equal(self.X, other.X) and np.array_equal(self.Y, other.Y))

    __hash__ = None

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        """Feature count including the intercept."""
        return self.X.shape[1]

    @property
    def K(self):
        return self.Y.shape[1]

    def subset(self, rows):
        return Dataset(self.X[rows], self.Y[rows], self.feature_names, self.label_names, self.name)

    def standardized(self):
        """Copy with non-intercept features centred and scaled to unit variance."""
        F = self.X[:, 1:]
        sd = F.std(axis=0)
        sd[sd == 0] = 1.0
        X = np.hstack([np.ones((self.n, 1)), (F - F.mean(axis=0)) / sd])
        return Dataset(X, self.Y, self.feature_names, self.label_names, self.name)


def from_features(F, Y, feature_names=(), label_names=(), name=""):
    """Build a :class:`Dataset` from raw features (no intercept column)."""
    F = np.asarray(F, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    X = np.hstack([np.ones((F.shape[0], 1)), F])
    return Dataset(X, Y, tuple(feature_names), tuple(label_names), name)


# ---------------------------------------------------------------- ARFF

_ATTR_RE = re.compile(r"@attribute\s+('(?:[^'\\]|\\.)*'|\"(?:[^\"\\]|\\.)*\"|\S+)\s+(.*)$", re.I)


def _unquote(tok):
    tok = tok.strip()
    if len(tok) >= 2 and tok[0] == tok[-1] and tok[0] in "'\"":
        return re.sub(r"\\(.)", r"\1", tok[1:-1])
    return tok


def _split_values(text):
    return [_unquote(v) for v in next(csv.reader([text], skipinitialspace=True, quotechar="'"))]


@dataclass
class _Attribute:
    name: str
    kind: str  # "numeric" or "nominal"
    values: tuple = ()


def _parse_header(lines):
    attrs = []
    for lineno, raw in lines:
        line = raw.strip()
        low = line.lower()
        if low.startswith("@relation"):
            continue
        if low.startswith("@data"):
            return attrs, lineno
        if low.startswith("@attribute"):
            m = _ATTR_RE.match(line)
            if not m:
                raise ParseError(f"malformed attribute declaration {line!r}", lineno)
            name, spec = _unquote(m.group(1)), m.group(2).strip()
            if spec.startswith("{"):
                if not spec.endswith("}"):
                    raise ParseError("unterminated nominal value list", lineno)
                attrs.append(_Attribute(name, "nominal", tuple(_split_values(spec[1:-1]))))
            elif spec.lower() in ("numeric", "real", "integer"):
                attrs.append(_Attribute(name, "numeric"))
            else:
                raise ParseError(f"unsupported attribute type {spec!r}", lineno)
            continue
        raise ParseError(f"unexpected header line {line!r}", lineno)
    raise ParseError("missing @data section")


def _nominal_codes(attr):
    """Map nominal values to floats: numeric-looking categories keep their value."""
    try:
        return {v: float(v) for v in attr.values}
    except ValueError:
        return {v: float(i) for i, v in enumerate(attr.values)}


def parse_arff(text, label_names=None, label_count=None, name=""):
    """Parse ARFF text; see :func:`load_arff`."""
    numbered = [(i + 1, ln) for i, ln in enumerate(text.splitlines())]
    numbered = [(i, ln) for i, ln in numbered if ln.strip() and not ln.lstrip().startswith("%")]
    attrs, data_line = _parse_header(numbered)
    if not attrs:
        raise ParseError("no attributes declared")
    names = [a.name for a in attrs]

    if label_names is not None:
        missing = [nm for nm in label_names if nm not in names]
        if missing:
            raise UnknownLabelName(f"labels not found: {missing}")
        label_idx = [names.index(nm) for nm in label_names]
    elif label_count is not None:
        if not 1 <= label_count <= len(attrs) - 1:
            raise ParseError(f"label count {label_count} out of range")
        label_idx = list(range(len(attrs) - label_count, len(attrs)))
    else:
        raise ValueError("give label_names or label_count")
    feature_idx = [j for j in range(len(attrs)) if j not in set(label_idx)]

    codes = [_nominal_codes(a) if a.kind == "nominal" else None for a in attrs]
    rows = []
    for lineno, raw in numbered:
        if lineno <= data_line:
            continue
        line = raw.strip()
        if line.startswith("{"):
            if not line.endswith("}"):
                raise ParseError("unterminated sparse row", lineno)
            vals = ["0"] * len(attrs)
            body = line[1:-1].strip()
            for item in filter(None, (s.strip() for s in body.split(","))):
                try:
                    idx, v = item.split(None, 1)
                    vals[int(idx)] = _unquote(v)
                except (ValueError, IndexError):
                    raise ParseError(f"bad sparse entry {item!r}", lineno) from None
        else:
            vals = _split_values(line)
            if len(vals) != len(attrs):
                raise ParseError(f"expected {len(attrs)} values, found {len(vals)}", lineno)
        row = []
        for j, v in enumerate(vals):
            if v == "?":
                raise ParseError(f"missing value for attribute {names[j]!r}", lineno)
            if codes[j] is not None:
                if v not in codes[j]:
                    raise ParseError(f"value {v!r} not declared for {names[j]!r}", lineno)
                row.append(codes[j][v])
            else:
                try:
                    row.append(float(v))
                except ValueError:
                    raise ParseError(f"non-numeric value {v!r} for {names[j]!r}", lineno) from None
        rows.append(row)

    A = np.array(rows, dtype=float).reshape(len(rows), len(attrs))
    Y = A[:, label_idx]
    if not np.all((Y == 0) | (Y == 1)):
        bad = [names[j] for j, c in zip(label_idx, Y.T) if not np.all((c == 0) | (c == 1))]
        raise NonBinaryLabel(f"non-binary label attributes: {bad}")
    return from_features(A[:, feature_idx], Y.astype(np.int8),
                         [names[j] for j in feature_idx], [names[j] for j in label_idx], name)


def load_arff(path, label_names=None, label_count=None):
    """Load a MULAN-style ARFF file (dense or sparse rows).

    Exactly one of ``label_names`` / ``label_count`` (labels are the last
    ``label_count`` attributes) selects the label attributes.  Nominal
    feature attributes are kept as a single numeric column: categories that
    look like numbers keep their value, others get their declaration index.
    """
    path = Path(path)
    return parse_arff(path.read_text(), label_names, label_count, name=path.stem)


def _fmt(v):
    return format(float(v), ".17g")


def save_arff(dataset, path, relation=None):
    out = io.StringIO()
    out.write(f"@relation '{relation or dataset.name or 'dataset'}'\n\n")
    for nm in dataset.feature_names:
        out.write(f"@attribute '{nm}' numeric\n")
    for nm in dataset.label_names:
        out.write(f"@attribute '{nm}' {{0,1}}\n")
    out.write("\n@data\n")
    for x, y in zip(dataset.X[:, 1:], dataset.Y):
        out.write(",".join([_fmt(v) for v in x] + [str(int(v)) for v in y]) + "\n")
    Path(path).write_text(out.getvalue())


# ---------------------------------------------------------------- CSV

def load_csv(path, label_count=None):
    """Load a CSV with a header row.

    Label columns are those whose name starts with ``label:`` or, when
    ``label_count`` is given, the last ``label_count`` columns.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty CSV file", 1) from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(row)}", lineno)
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    if label_count is not None:
        label_idx = list(range(len(header) - label_count, len(header)))
    else:
        label_idx = [j for j, h in enumerate(header) if h.startswith(LABEL_PREFIX)]
    if not label_idx:
        raise ParseError("no label columns found")
    feature_idx = [j for j in range(len(header)) if j not in set(label_idx)]
    A = np.array(rows, dtype=float).reshape(len(rows), len(header))
    if np.isnan(A).any():
        raise ParseError("missing values are not supported")
    Y = A[:, label_idx]
    if not np.all((Y == 0) | (Y == 1)):
        raise NonBinaryLabel("label columns must be 0/1")
    strip = lambda h: h[len(LABEL_PREFIX):] if h.startswith(LABEL_PREFIX) else h  # noqa: E731
    return from_features(A[:, feature_idx], Y, [header[j] for j in feature_idx],
                         [strip(header[j]) for j in label_idx], name=path.stem)


def save_csv(dataset, path):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(dataset.feature_names) + [LABEL_PREFIX + nm for nm in dataset.label_names])
        for x, y in zip(dataset.X[:, 1:], dataset.Y):
            w.writerow([_fmt(v) for v in x] + [str(int(v)) for v in y])


def load_dataset(path, label_count=None, label_names=None):
    """Dispatch on file extension (``.arff`` or anything else as CSV)."""
    path = Path(path)
    if path.suffix.lower() == ".arff":
        return load_arff(path, label_names=label_names, label_count=label_count)
    return load_csv(path, label_count=label_count)


# ---------------------------------------------------------------- preprocessing

def top_k_labels(dataset, k):
    """Keep the ``k`` most frequent labels and drop rows that become all-0 or all-1.

    Frequency ties go to the lower original index.  With ``k == 1`` every row
    is degenerate, so that case is rejected.
    """
    if not 1 <= k <= dataset.K:
        raise ValueError(f"k must be in [1, {dataset.K}]")
    if k == 1:
        raise ValueError("k=1 leaves only all-0 or all-1 rows")
    counts = dataset.Y.sum(axis=0)
    order = sorted(range(dataset.K), key=lambda j: (-counts[j], j))
    keep = sorted(order[:k])
    Y = dataset.Y[:, keep]
    s = Y.sum(axis=1)
    rows = (s > 0) & (s < k)
    return Dataset(dataset.X[rows], Y[rows], dataset.feature_names,
                   tuple(dataset.label_names[j] for j in keep), dataset.name)


def subsample(dataset, n, seed=0):
    """Random subset of ``n`` rows (original order kept)."""
    if n >= dataset.n:
        return dataset
    rng = np.random.default_rng(seed)
    return dataset.subset(np.sort(rng.choice(dataset.n, size=n, replace=False)))


def first_principal_component(X, tol=1e-12, max_iter=10_000, seed=0):
    """Scores on, and explained-variance share of, the leading principal axis.

    Uses power iteration on the covariance of the centred rows.  A leading
    column of ones (intercept) is ignored automatically.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a 2-D array with at least two rows")
    if X.shape[1] > 1 and np.all(X[:, 0] == 1.0):
        X = X[:, 1:]
    C = X - X.mean(axis=0)
    S = C.T @ C / (X.shape[0] - 1)
    total = np.trace(S)
    if not total > 0:
        raise NoVariance("all rows are identical")
    v = np.random.default_rng(seed).standard_normal(S.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = S @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            break
        w /= nw
        lam_new = w @ S @ w
        if np.linalg.norm(w - v) < tol or abs(lam_new - lam) <= tol * total:
            v, lam = w, lam_new
            break
        v, lam = w, lam_new
    return C @ v, float(lam / total)
