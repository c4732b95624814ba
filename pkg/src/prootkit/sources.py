"""Matrix sources for the CLI and the test harness.

A source is either a MatrixMarket file or a synthetic description
(identity, diagonal, or a seeded random SPD matrix with a target condition
number).  The textual form used on the command line is

    identity:N | diag:v1,v2,... | random-spd:N,COND,SEED | mm:PATH | PATH
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .mmio import read_matrix_market


def gen_random_spd(n, cond_target, seed):
    """Seeded random SPD matrix with 2-norm condition near cond_target.

    Q D Q^T with Q from the QR factorization of a seeded Gaussian matrix
    and D log-uniform in [1/cond_target, 1] with both endpoints forced, so
    the spectrum (hence the condition number) is pinned up to roundoff.
    Deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if cond_target < 1.0:
        raise ValueError("cond_target must be >= 1")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    if n == 1:
        evals = np.ones(1)
    else:
        logs = rng.uniform(np.log(1.0 / cond_target), 0.0, size=n)
        logs.sort()
        logs[0] = np.log(1.0 / cond_target)
        logs[-1] = 0.0
        evals = np.exp(logs)
    a = (q * evals) @ q.T
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class MatrixSource:
    kind: str  # mm_file | random_spd | diag | identity
    path: Optional[str] = None
    n: Optional[int] = None
    cond_target: Optional[float] = None
    seed: Optional[int] = None
    entries: Optional[Tuple[float, ...]] = None

    @property
    def label(self):
        if self.kind == "mm_file":
            return self.path
        if self.kind == "identity":
            return "identity:%d" % self.n
        if self.kind == "diag":
            return "diag:" + ",".join("%g" % v for v in self.entries)
        return "random-spd:%d,%g,%d" % (self.n, self.cond_target, self.seed)


def parse_source(text):
    """Parse the CLI source syntax into a MatrixSource."""
    kind, sep, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "identity" and sep:
        try:
            n = int(rest)
        except ValueError:
            raise ValueError("identity:N needs an integer, got %r" % rest)
        return MatrixSource("identity", n=n)
    if kind == "diag" and sep:
        try:
            entries = tuple(float(v) for v in rest.split(","))
        except ValueError:
            raise ValueError("diag:v1,v2,... needs numbers, got %r" % rest)
        return MatrixSource("diag", entries=entries)
    if kind == "random-spd" and sep:
        parts = rest.split(",")
        if len(parts) != 3:
            raise ValueError("random-spd takes N,COND,SEED, got %r" % rest)
        try:
            n, cond, seed = int(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ValueError("random-spd takes N,COND,SEED, got %r" % rest)
        return MatrixSource("random_spd", n=n, cond_target=cond, seed=seed)
    if kind == "mm" and sep:
        return MatrixSource("mm_file", path=rest)
    return MatrixSource("mm_file", path=text)


def load_source(source):
    """Materialize a MatrixSource as a dense array."""
    if source.kind == "mm_file":
        return read_matrix_market(source.path)
    if source.kind == "identity":
        return np.eye(source.n)
    if source.kind == "diag":
        return np.diag(np.asarray(source.entries, dtype=np.float64))
    if source.kind == "random_spd":
        return gen_random_spd(source.n, source.cond_target, source.seed)
    raise ValueError("unknown source kind %r" % source.kind)
