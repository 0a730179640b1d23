"""Error rate against planted labels and the metrics report."""
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError
from .fairness import per_cluster_balance


def _labels(x):
    return np.asarray(getattr(x, "labels", x), dtype=np.int64)


def confusion_matrix(pred, truth, k):
    """``C[a, b]`` = number of nodes predicted ``a`` with true label ``b``."""
    pred, truth = _labels(pred), _labels(truth)
    if pred.shape != truth.shape:
        raise ValidationError(f"label arrays differ in length: {len(pred)} vs {len(truth)}")
    for name, lab in (("pred", pred), ("truth", truth)):
        if len(lab) and (lab.min() < 0 or lab.max() >= k):
            raise ValidationError(f"{name} labels must lie in [0, {k})")
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (pred, truth), 1)
    return C


def optimal_permutation(confusion):
    """Permutation ``pi`` maximizing ``sum_l confusion[l, pi[l]]``.

    Among optimal permutations the lexicographically smallest is returned:
    positions are fixed left to right, each taking the smallest column that
    still admits an optimal completion.
    """
    C = np.asarray(confusion, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValidationError("confusion matrix must be square")
    k = len(C)
    r, c = linear_sum_assignment(C, maximize=True)
    best = C[r, c].sum()
    tol = 1e-9 * max(1.0, abs(best))
    perm = np.empty(k, dtype=np.int64)
    free = list(range(k))
    acc = 0.0
    for row in range(k):
        for col in free:
            rest_rows = list(range(row + 1, k))
            rest_cols = [x for x in free if x != col]
            tail = 0.0
            if rest_rows:
                sub = C[np.ix_(rest_rows, rest_cols)]
                rr, cc = linear_sum_assignment(sub, maximize=True)
                tail = sub[rr, cc].sum()
            if acc + C[row, col] + tail >= best - tol:
                perm[row] = col
                acc += C[row, col]
                free.remove(col)
                break
    return perm


def error_rate(pred, truth, k):
    """``(1/k) min_U ||V U - V*||_F`` over label permutations.

    For 0/1 indicator matrices ``||V U - V*||_F^2 = 2 (n - overlap)`` where
    overlap is the trace of the permuted confusion matrix, so the minimum is
    an assignment problem on the ``k x k`` confusion matrix.
    """
    C = confusion_matrix(pred, truth, k)
    perm = optimal_permutation(C)
    overlap = C[np.arange(k), perm].sum()
    n = C.sum()
    return float(np.sqrt(2.0 * (n - overlap)) / k)


@dataclass
class MetricsReport:
    average_balance: float | None
    per_cluster_balance: list
    ncut: float | None
    cluster_sizes: list
    error_rate: float | None = None
    timings_ms: dict = field(default_factory=dict)

    def to_dict(self):
        """Plain dict; ``error_rate`` is left out without truth, balances without groups."""
        d = asdict(self)
        order = ["error_rate", "average_balance", "per_cluster_balance", "ncut",
                 "cluster_sizes", "timings_ms"]
        out = {key: d[key] for key in order}
        if self.error_rate is None:
            del out["error_rate"]
        if self.average_balance is None:
            del out["average_balance"], out["per_cluster_balance"]
        return out

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d):
        return cls(**{key: d.get(key) for key in (
            "average_balance", "per_cluster_balance", "ncut", "cluster_sizes", "error_rate",
            "timings_ms")})

    def without_timings(self):
        d = self.to_dict()
        d.pop("timings_ms")
        return d


def compile_report(assignment, partition=None, graph=None, truth=None, timings=None):
    """Collect the evaluation metrics of one clustering.

    ``error_rate`` needs ``truth``; balance needs ``partition``; the NCut
    value needs ``graph``. Missing inputs leave the field ``None``.
    """
    from .baseline import ncut_value

    labels = _labels(assignment)
    k = getattr(assignment, "k", None) or int(labels.max()) + 1
    n = len(labels)
    for name, obj, size in (("partition", partition, getattr(partition, "n", None)),
                            ("graph", graph, getattr(graph, "n", None)),
                            ("truth", truth, None if truth is None else len(truth))):
        if obj is not None and size != n:
            raise ValidationError(f"{name} covers {size} nodes, assignment has {n}")
    sizes = np.bincount(labels, minlength=k).tolist()
    avg, per = None, []
    if partition is not None:
        per, _ = per_cluster_balance(partition, labels, k)
        avg = float(np.mean(per))
    ncut = None
    if graph is not None and all(sizes):
        try:
            ncut = ncut_value(graph, labels, k)
        except ValidationError:
            ncut = None
    err = None if truth is None else error_rate(labels, truth, k)
    return MetricsReport(average_balance=avg, per_cluster_balance=per, ncut=ncut,
                         cluster_sizes=sizes, error_rate=err, timings_ms=dict(timings or {}))
