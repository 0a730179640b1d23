"""Protected-group partitions, the centered fairness matrix and balance."""
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupPartition:
    """Assignment of every node to one of ``h`` protected groups.

    ``group_of`` holds dense ids ``0..h-1``; use :meth:`from_labels` for
    arbitrary labels.
    """

    group_of: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.group_of, dtype=np.int64)
        if g.ndim != 1 or len(g) == 0:
            raise ValidationError("group labels must be a nonempty 1-d array")
        if g.min() < 0:
            raise ValidationError("group ids must be >= 0")
        sizes = np.bincount(g)
        if (sizes == 0).any():
            raise ValidationError(f"group ids must be dense; empty groups {np.flatnonzero(sizes == 0).tolist()}")
        g.flags.writeable = False
        object.__setattr__(self, "group_of", g)
        object.__setattr__(self, "_sizes", sizes)

    @classmethod
    def from_labels(cls, labels):
        """Re-index arbitrary labels densely, in sorted label order."""
        _, dense = np.unique(np.asarray(labels), return_inverse=True)
        return cls(dense.ravel())

    @property
    def n(self):
        return len(self.group_of)

    @property
    def h(self):
        return len(self._sizes)

    @property
    def group_sizes(self):
        return self._sizes.copy()

    def restrict(self, nodes):
        """Partition induced on ``nodes`` (re-indexed if a group vanishes)."""
        return GroupPartition.from_labels(self.group_of[np.asarray(nodes)])


def build_fairness_matrix(p):
    """Dense ``n x (h-1)`` matrix ``F[i, s] = [group(i) == s] - |V_s|/n``.

    The last group is omitted; any single omission spans the same constraints.
    """
    if p.h < 2:
        raise ValidationError(f"need at least 2 groups, got h={p.h}")
    s = np.arange(p.h - 1)
    F = (p.group_of[:, None] == s[None, :]).astype(np.float64)
    F -= p.group_sizes[:-1] / p.n
    return F


def _counts(p, members):
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise ValidationError("balance of an empty cluster is undefined")
    return np.bincount(p.group_of[members], minlength=p.h)


def _balance_from_counts(counts):
    if len(counts) < 2:
        return 1.0
    lo, hi = counts.min(), counts.max()
    if lo == 0:
        return 0.0
    # min over ordered pairs of c_s / c_s' is attained at min/max
    return float(lo / hi)


def balance(p, cluster_members):
    """Smallest ratio of group counts inside one cluster; 0 if a group is absent."""
    return _balance_from_counts(_counts(p, cluster_members))


def per_cluster_balance(p, labels, k):
    """Balance of every cluster ``0..k-1``; empty clusters get 0.

    Returns ``(values, empty)`` where ``empty`` lists the empty cluster ids.
    """
    labels = np.asarray(labels, dtype=np.int64)
    table = np.zeros((k, p.h), dtype=np.int64)
    np.add.at(table, (labels, p.group_of), 1)
    values, empty = [], []
    for c in range(k):
        if table[c].sum() == 0:
            empty.append(c)
            values.append(0.0)
        else:
            values.append(_balance_from_counts(table[c]))
    return values, empty


def average_balance(p, assignment, k=None):
    """Mean balance over the ``k`` clusters of ``assignment``.

    ``assignment`` is a ClusterAssignment or a label array.
    """
    labels = getattr(assignment, "labels", assignment)
    if k is None:
        k = getattr(assignment, "k", None) or int(np.max(labels)) + 1
    values, empty = per_cluster_balance(p, labels, k)
    if empty:
        log.warning("empty clusters %s counted with balance 0", empty)
    return float(np.mean(values))


def fairness_residual(F, x):
    """``||F^T x|| / ||x||`` with the denominator floored at 1e-300."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.linalg.norm(F.T @ x) / max(np.linalg.norm(x), 1e-300))


def load_groups(path):
    """Read a group file; returns a GroupPartition with dense ids.

    Accepts one label per line (line i is node i) or ``node,group`` CSV rows,
    optionally with a non-numeric header row.
    """
    by_node = {}
    plain = []
    with open(path, encoding="utf-8") as fh:
        rows = [(i, ln.strip()) for i, ln in enumerate(fh, start=1)]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise ParseError(f"{path}: no group labels")
    csv = "," in rows[0][1]
    if csv and not rows[0][1].split(",")[0].strip().lstrip("-").isdigit():
        rows = rows[1:]
    for lineno, ln in rows:
        try:
            if csv:
                node, grp = (int(t) for t in ln.split(","))
                if node in by_node:
                    raise ParseError(f"node {node} listed twice", lineno)
                by_node[node] = grp
            else:
                plain.append(int(ln))
        except ValueError:
            raise ParseError(f"cannot parse {ln!r}", lineno) from None
    if csv:
        n = max(by_node) + 1
        if sorted(by_node) != list(range(n)):
            raise ValidationError(f"{path}: group file must cover nodes 0..{n - 1}")
        plain = [by_node[i] for i in range(n)]
    return GroupPartition.from_labels(np.array(plain))


def save_groups(path, labels):
    with open(path, "w", encoding="utf-8") as fh:
        for x in np.asarray(labels).tolist():
            fh.write(f"{x}\n")
