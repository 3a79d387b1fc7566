"""Dataset loading/writing, the synthetic benchmark and train/test splits.

On disk, observations are rows. In memory a :class:`Dataset` stores features
as rows (``X`` is d x n), which is the layout every scoring pass walks.
"""

import csv
import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from land.kernelmap import CLASSIFICATION, REGRESSION, Target
from land.numerics import ValidationError

MAX_CLASSES = 32


class DatasetParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    target: Target
    names: tuple
    target_name: str = "y"

    @property
    def d(self):
        return self.X.shape[0]

    @property
    def n(self):
        return self.X.shape[1]

    @property
    def task(self):
        return self.target.kind

    def subset(self, idx):
        idx = np.asarray(idx)
        t = self.target
        if t.kind == CLASSIFICATION:
            labels = np.asarray(t.classes, dtype=object)[t.values[idx]]
            target = _classification_target(labels.tolist())
        else:
            target = Target.regression(t.values[idx])
        return Dataset(self.X[:, idx].copy(), target, self.names, self.target_name)


def _classification_target(labels):
    # keep numeric labels numeric so class order is numeric, not lexical
    try:
        arr = np.asarray([float(v) for v in labels])
        if np.all(arr == np.round(arr)):
            return Target.classification(arr.astype(np.int64))
        return Target.classification(arr)
    except (TypeError, ValueError):
        return Target.classification(np.asarray([str(v) for v in labels]))


def infer_task(raw):
    """``classification`` iff the target is non-numeric or has <= 32 distinct integers."""
    try:
        vals = np.asarray([float(v) for v in raw])
    except ValueError:
        return CLASSIFICATION
    if np.all(np.isfinite(vals)) and np.all(vals == np.round(vals)) and np.unique(vals).size <= MAX_CLASSES:
        return CLASSIFICATION
    return REGRESSION


def make_target(raw, task="auto"):
    if task == "auto":
        task = infer_task(raw)
    if task == CLASSIFICATION:
        return _classification_target(raw)
    if task != REGRESSION:
        raise ValidationError(f"unknown task {task!r}")
    try:
        return Target.regression([float(v) for v in raw])
    except ValueError as exc:
        raise ValidationError(f"regression target is not numeric: {exc}") from None


def _parse_float(cell, line):
    try:
        v = float(cell)
    except ValueError:
        raise DatasetParseError(f"cannot parse {cell!r} as a number", line) from None
    if not np.isfinite(v):
        raise DatasetParseError(f"non-finite value {cell!r}", line)
    return v


def _read_csv(fh, header):
    reader = csv.reader(fh)
    names = None
    rows, raw_y = [], []
    width = None
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if header and names is None:
            names = [c.strip() for c in row]
            width = len(row)
            continue
        if width is None:
            width = len(row)
        if len(row) != width:
            raise DatasetParseError(f"expected {width} columns, found {len(row)}", lineno)
        if width < 2:
            raise DatasetParseError("need at least one feature column and a target column", lineno)
        rows.append([_parse_float(c.strip(), lineno) for c in row[:-1]])
        raw_y.append(row[-1].strip())
    if names is not None:
        feature_names, target_name = tuple(names[:-1]), names[-1]
    else:
        feature_names, target_name = None, "y"
    return rows, raw_y, feature_names, target_name


def _read_libsvm(fh):
    entries, raw_y = [], []
    d = 0
    for lineno, line in enumerate(fh, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        raw_y.append(parts[0])
        feats = {}
        for tok in parts[1:]:
            idx, sep, val = tok.partition(":")
            if not sep:
                raise DatasetParseError(f"malformed pair {tok!r}", lineno)
            try:
                k = int(idx)
            except ValueError:
                raise DatasetParseError(f"bad feature index {idx!r}", lineno) from None
            if k < 1:
                raise DatasetParseError(f"feature indices are 1-based, got {k}", lineno)
            feats[k - 1] = _parse_float(val, lineno)
            d = max(d, k)
        entries.append(feats)
    rows = []
    for feats in entries:
        row = [0.0] * d
        for k, v in feats.items():
            row[k] = v
        rows.append(row)
    return rows, raw_y, None, "y"


def load_dataset(path, fmt="csv", header=False, task="auto"):
    """Read a CSV (target last) or LIBSVM file into a feature-major Dataset."""
    with open(path, newline="") as fh:
        if fmt == "csv":
            rows, raw_y, names, target_name = _read_csv(fh, header)
        elif fmt == "libsvm":
            rows, raw_y, names, target_name = _read_libsvm(fh)
        else:
            raise ValidationError(f"unknown format {fmt!r}")
    if not rows:
        raise DatasetParseError("file contains no observations")
    X = np.asarray(rows, dtype=np.float64).T
    if X.shape[0] < 1 or X.shape[1] < 2:
        raise DatasetParseError(f"need d >= 1 and n >= 2, got d={X.shape[0]}, n={X.shape[1]}")
    if names is None:
        names = tuple(f"x{k}" for k in range(X.shape[0]))
    return Dataset(np.ascontiguousarray(X), make_target(raw_y, task), tuple(names), target_name)


def atomic_write_text(path, text):
    """Write ``text`` to a temp file next to ``path``, then rename over it."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    return format(float(v), ".17g")


def dataset_to_csv(ds, header=True):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(list(ds.names) + [ds.target_name])
    t = ds.target
    if t.kind == CLASSIFICATION:
        ys = [str(t.classes[i]) for i in t.values]
    else:
        ys = [_fmt(v) for v in t.values]
    for i in range(ds.n):
        w.writerow([_fmt(v) for v in ds.X[:, i]] + [ys[i]])
    return buf.getvalue()


def write_csv(ds, path, header=True):
    atomic_write_text(path, dataset_to_csv(ds, header))


def synth_generate(n, d_relevant=3, d_irrelevant=997, d_redundant=1000,
                   output_noise=0.1, redundancy_noise=0.01, seed=0):
    """Synthetic benchmark with relevant, irrelevant and redundant features.

    ``X1..X{r+i}`` are i.i.d. standard normal, ``Y = X1 * exp(X2) + X3 +
    output_noise * E``, and copy ``k`` is ``X_k + redundancy_noise * E_k`` for
    the first ``d_redundant`` base features. Copies are appended after the
    base features.
    """
    if d_relevant != 3:
        raise ValidationError("the benchmark response uses exactly 3 relevant features")
    if n < 2 or d_irrelevant < 0 or d_redundant < 0:
        raise ValidationError("invalid synthetic dataset sizes")
    base = d_relevant + d_irrelevant
    if d_redundant > base:
        raise ValidationError("d_redundant cannot exceed the number of base features")
    rng = np.random.default_rng(seed)
    Xb = rng.standard_normal((base, n))
    e_y = rng.standard_normal(n)
    e_c = rng.standard_normal((d_redundant, n))
    y = Xb[0] * np.exp(Xb[1]) + Xb[2] + output_noise * e_y
    X = np.vstack([Xb, Xb[:d_redundant] + redundancy_noise * e_c])
    names = tuple(f"X{k + 1}" for k in range(X.shape[0]))
    return Dataset(np.ascontiguousarray(X), Target.regression(y), names, "Y")


def split(ds, train_fraction, seed):
    """Seeded shuffle split; class targets are stratified with each class kept in train."""
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    n = ds.n
    if ds.task == CLASSIFICATION:
        train = []
        for c in range(ds.target.n_classes):
            members = np.flatnonzero(ds.target.values == c)
            if members.size == 0:
                raise ValidationError(f"class {ds.target.classes[c]!r} has no observations")
            members = rng.permutation(members)
            k = int(round(train_fraction * members.size))
            k = min(max(k, 1), members.size)
            train.extend(members[:k].tolist())
        train = np.sort(np.asarray(train))
    else:
        k = int(round(train_fraction * n))
        if not 1 <= k <= n - 1:
            raise ValidationError(f"split of n={n} at {train_fraction} leaves an empty side")
        train = np.sort(rng.permutation(n)[:k])
    test = np.setdiff1d(np.arange(n), train)
    if test.size == 0:
        raise ValidationError("test split is empty")
    return ds.subset(train), ds.subset(test)
