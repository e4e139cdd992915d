"""System description files and the random system generator used by the sweeps."""

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import FiniteSystem, Measure
from .errors import TEntropyError
from .transfer import TransferOperator


class SpecError(TEntropyError):
    """Malformed system file; ``field`` and ``line`` locate the problem when known."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


@dataclass
class SystemSpec:
    n: int
    alpha: list
    weights: list
    potential: Optional[list] = None
    measure: Optional[list] = None

    def system(self):
        return FiniteSystem(np.asarray(self.alpha, dtype=np.int64))

    def operator(self):
        return TransferOperator(self.system(), np.asarray(self.weights, dtype=np.float64))

    def phi(self):
        if self.potential is None:
            return np.zeros(self.n)
        return np.asarray(self.potential, dtype=np.float64)

    def to_dict(self):
        out = {"n": self.n, "alpha": list(self.alpha), "weights": list(self.weights)}
        if self.potential is not None:
            out["potential"] = list(self.potential)
        if self.measure is not None:
            out["measure"] = list(self.measure)
        return out

    def dumps(self):
        return json.dumps(self.to_dict())

    def digest(self):
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:12]


def _number_list(doc, key, n, kind, required=True):
    if key not in doc:
        if required:
            raise SpecError("missing", field=key)
        return None
    val = doc[key]
    if not isinstance(val, list):
        raise SpecError("must be an array", field=key)
    if len(val) != n:
        raise SpecError(f"has length {len(val)}, expected n = {n}", field=key)
    out = []
    for i, v in enumerate(val):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SpecError(f"entry {i} is not a number: {v!r}", field=key)
        if kind is int:
            if float(v) != int(v):
                raise SpecError(f"entry {i} is not an integer: {v!r}", field=key)
            v = int(v)
        else:
            v = float(v)
            if not np.isfinite(v):
                raise SpecError(f"entry {i} is not finite", field=key)
        out.append(v)
    return out


def parse_spec(text):
    """Parse and validate a JSON system spec."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise SpecError("top level must be an object")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SpecError("must be a positive integer", field="n")
    alpha = _number_list(doc, "alpha", n, int)
    for i, a in enumerate(alpha):
        if not 0 <= a < n:
            raise SpecError(f"entry {i} = {a} is outside [0, {n - 1}]", field="alpha")
    weights = _number_list(doc, "weights", n, float)
    for i, w in enumerate(weights):
        if w < 0:
            raise SpecError(f"entry {i} = {w} is negative", field="weights")
    potential = _number_list(doc, "potential", n, float, required=False)
    measure = _number_list(doc, "measure", n, float, required=False)
    if measure is not None:
        if any(m < 0 for m in measure):
            raise SpecError("entries must be nonnegative", field="measure")
        if abs(sum(measure) - 1.0) > 1e-9:
            raise SpecError(f"sums to {sum(measure)!r}, expected 1", field="measure")
    return SystemSpec(n, alpha, weights, potential, measure)


def load_spec(path):
    with open(path) as fh:
        return parse_spec(fh.read())


def as_probability(values):
    """Measure from a system-file vector, absorbing the 1e-9 slack the file format allows."""
    w = np.asarray(values, dtype=np.float64)
    return Measure(w / w.sum())


def random_spec(rng, max_points, zero_prob=0.1):
    """Random system: uniform map, ``ln w ~ U[-2, 2]``, ``phi ~ U[-1, 1]``.

    Each weight is zeroed independently with probability ``zero_prob`` to
    exercise the ``-inf`` conventions.
    """
    n = int(rng.integers(1, max_points + 1))
    alpha = rng.integers(0, n, size=n)
    weights = np.exp(rng.uniform(-2.0, 2.0, size=n))
    weights[rng.random(n) < zero_prob] = 0.0
    phi = rng.uniform(-1.0, 1.0, size=n)
    return SystemSpec(n, alpha.tolist(), weights.tolist(), phi.tolist())
