"""Dataset ingestion, standardization, splitting and synthetic data."""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .estimators import CLASSIFICATION, REGRESSION
from .kernels import kernel_matrix


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    task: str = REGRESSION
    name: str = "dataset"
    # noiseless targets, when known (synthetic data only)
    y_clean: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise ValueError(f"unknown task {self.task!r}")
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise ValueError(f"X must be (N, D) and y (N,), got {self.X.shape} and {self.y.shape}")
        if not np.isfinite(self.X).all() or not np.isfinite(self.y).all():
            raise ValueError("dataset contains non-finite values")
        if self.task == CLASSIFICATION and not np.isin(self.y, (-1.0, 1.0)).all():
            raise ValueError("classification labels must be -1 or +1")

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]


def _encode_labels(y, task, source):
    if task == REGRESSION:
        return y
    values = set(np.unique(y).tolist())
    if values <= {0.0, 1.0}:
        return np.where(y > 0, 1.0, -1.0)
    if values <= {-1.0, 1.0}:
        return y
    raise ValueError(f"{source}: classification labels must be in {{0, 1}} or {{-1, +1}}, got {sorted(values)[:5]}")


def load_csv(path, label_column=-1, task=REGRESSION, delimiter=",", has_header=None, name=None):
    """Read a numeric CSV file into a :class:`Dataset`.

    Parameters
    ----------
    path : str or path-like
    label_column : int or str
        Column index (negative counts from the end) or header name.
        Defaults to the last column.
    task : {"regression", "classification"}
        Classification labels ``{0, 1}`` are mapped to ``{-1, +1}``.
    delimiter : str
    has_header : bool, optional
        If omitted, the first row is treated as a header when any of its
        cells fails to parse as a number.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter)]
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: file is empty")

    def numeric(cell):
        try:
            float(cell)
            return True
        except ValueError:
            return False

    if has_header is None:
        has_header = not all(numeric(c) for c in rows[0])
    header = [c.strip() for c in rows[0]] if has_header else None
    body = rows[1:] if has_header else rows
    if not body:
        raise ValueError(f"{path}: no data rows")

    width = len(body[0]) if header is None else len(header)
    data = np.empty((len(body), width))
    first_line = 2 if has_header else 1
    for i, row in enumerate(body):
        if len(row) != width:
            raise ValueError(f"{path}: line {first_line + i} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell == "":
                raise ValueError(f"{path}: missing value at line {first_line + i}, column {j + 1}")
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise ValueError(f"{path}: non-numeric value {cell!r} at line {first_line + i}, column {j + 1}") from None
    if not np.isfinite(data).all():
        i, j = np.argwhere(~np.isfinite(data))[0]
        raise ValueError(f"{path}: non-finite value at line {first_line + i}, column {j + 1}")

    if isinstance(label_column, str):
        if header is None:
            raise ValueError("label column given by name but the file has no header")
        label_column = header.index(label_column)
    label_column = label_column % width
    y = _encode_labels(data[:, label_column], task, path)
    X = np.delete(data, label_column, axis=1)
    return Dataset(np.ascontiguousarray(X), y, task, name or str(path))


def write_csv(dataset, path, header=True):
    """Write features followed by the label column, at full precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"x{j}" for j in range(dataset.n_features)] + ["y"])
        for x, y in zip(dataset.X, dataset.y):
            w.writerow([repr(float(v)) for v in x] + [repr(float(y))])


@dataclass(frozen=True)
class StandardizationParams:
    mean: np.ndarray
    scale: np.ndarray
    constant: np.ndarray  # bool mask of zero-variance columns

    def apply(self, X):
        Z = (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
        Z[:, self.constant] = 0.0
        return Z

    def save(self, path, prefix=""):
        with open(path, "a") as fh:
            fh.write(format_params(self, prefix))

    @classmethod
    def from_text(cls, text, prefix=""):
        kv = {}
        for line in text.splitlines():
            if "=" in line:
                k, v = line.split("=", 1)
                kv[k.strip()] = v.strip()

        def arr(key, dtype=float):
            s = kv[prefix + key]
            return np.array([dtype(t) for t in s.split(",")] if s else [], dtype=dtype)

        return cls(arr("mean"), arr("scale"), arr("constant", int).astype(bool))


def format_params(params, prefix=""):
    fmt = lambda a: ",".join(repr(float(v)) for v in a)  # noqa: E731
    return (f"{prefix}mean = {fmt(params.mean)}\n"
            f"{prefix}scale = {fmt(params.scale)}\n"
            f"{prefix}constant = {','.join(str(int(c)) for c in params.constant)}\n")


def standardize(dataset, stats_from=None):
    """Z-score each column using statistics from the rows ``stats_from``.

    Zero-variance columns are mapped to 0 and flagged in
    ``params.constant``. Returns ``(standardized_dataset, params)``.
    """
    X = dataset.X
    rows = X if stats_from is None else X[np.asarray(stats_from, dtype=np.intp)]
    if rows.shape[0] == 0:
        raise ValueError("stats_from is empty")
    mean = rows.mean(0)
    std = rows.std(0)
    constant = ~(std > 1e-12 * np.maximum(1.0, np.abs(mean)))
    scale = np.where(constant, 1.0, std)
    params = StandardizationParams(mean, scale, constant)
    return replace(dataset, X=params.apply(X)), params


@dataclass(frozen=True)
class SplitPlan:
    labeled: np.ndarray
    unlabeled: np.ndarray
    test: np.ndarray
    seed: object = None

    @property
    def pool(self):
        """Training rows (labeled first, then unlabeled)."""
        return np.concatenate([self.labeled, self.unlabeled])


def make_split(N, n_labeled, test_fraction=0.2, seed=0):
    """Random disjoint labeled / unlabeled / test assignment of ``N`` rows.

    The test set takes ``round(test_fraction * N)`` rows; the labeled set is
    drawn uniformly from the remaining pool.
    """
    if not 0 <= test_fraction < 1:
        raise ValueError("test_fraction must lie in [0, 1)")
    n_test = int(round(test_fraction * N))
    if n_labeled < 1 or n_labeled + n_test > N:
        raise ValueError(f"cannot take {n_labeled} labeled and {n_test} test rows from {N}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(N)
    test = np.sort(perm[:n_test])
    pool = perm[n_test:]
    labeled = np.sort(pool[:n_labeled])
    unlabeled = np.sort(pool[n_labeled:])
    return SplitPlan(labeled, unlabeled, test, seed)


def synth_rkhs(spec, N, D, k_centers=20, noise_std=0.1, seed=0, name=None):
    """Regression data whose target lies in the kernel's RKHS.

    ``X ~ U[-1, 1]^D`` and ``y = sum_k c_k k(x, u_k) + noise`` with centers
    ``u_k ~ U[-1, 1]^D`` and ``c_k ~ N(0, 1)``. The noiseless targets are
    kept in ``y_clean``.
    """
    if k_centers < 1:
        raise ValueError("k_centers must be at least 1")
    rng = np.random.default_rng(seed)
    U = rng.uniform(-1.0, 1.0, size=(k_centers, D))
    c = rng.normal(size=k_centers)
    X = rng.uniform(-1.0, 1.0, size=(N, D))
    f = kernel_matrix(spec, X, U) @ c
    y = f + noise_std * rng.normal(size=N)
    return Dataset(X, y, REGRESSION, name or f"synth_rkhs(sigma={spec.sigma:g},N={N},D={D})", f)
