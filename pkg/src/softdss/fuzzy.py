"""Fuzzy primitives: membership functions, linguistic variables, Mamdani inference.

Membership functions come in four parametric shapes (gaussian, generalized
bell, trapezoid, triangle).  Every shape knows how to evaluate itself, how
to differentiate itself with respect to its own parameters (the backbone of
gradient tuning), and how to translate itself along the axis, which is what
"moving the center" means uniformly across shapes.

Mamdani inference uses product implication (activation scales the consequent
set), pointwise-max aggregation on a uniform discretization of the output
range, and centroid defuzzification.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

OUTPUT_GRID_POINTS = 201


# ---------------------------------------------------------------------------
# membership function shapes
# ---------------------------------------------------------------------------

class GaussianMF:
    """exp(-(x - center)^2 / (2 sigma^2)), parameters (center, sigma)."""

    shape = "gaussian"
    __slots__ = ("c", "sigma")

    def __init__(self, center: float, sigma: float):
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.c = float(center)
        self.sigma = float(sigma)

    @property
    def params(self):
        return (self.c, self.sigma)

    def with_params(self, params):
        return GaussianMF(*params)

    def evaluate(self, x):
        z = (np.asarray(x, dtype=float) - self.c) / self.sigma
        return np.exp(-0.5 * z * z)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        mu = self.evaluate(x)
        d = x - self.c
        dc = mu * d / self.sigma**2
        ds = mu * d * d / self.sigma**3
        return np.stack([dc, ds], axis=-1)

    @property
    def center(self) -> float:
        return self.c

    def translate(self, delta: float) -> "GaussianMF":
        return GaussianMF(self.c + delta, self.sigma)

    def center_gradient(self, x):
        return self.gradient(x)[..., 0]

    def centroid(self) -> float:
        return self.c


class GBellMF:
    """Generalized bell 1 / (1 + ((x - center)/a)^(2b)), parameters (a, b, center)."""

    shape = "gbell"
    __slots__ = ("a", "b", "c")

    def __init__(self, a: float, b: float, center: float):
        if a <= 0 or b <= 0:
            raise ValueError(f"gbell needs a > 0 and b > 0, got a={a}, b={b}")
        self.a = float(a)
        self.b = float(b)
        self.c = float(center)

    @property
    def params(self):
        return (self.a, self.b, self.c)

    def with_params(self, params):
        return GBellMF(*params)

    def _t(self, x):
        z = (np.asarray(x, dtype=float) - self.c) / self.a
        return z * z

    def evaluate(self, x):
        with np.errstate(over="ignore"):
            u = self._t(x) ** self.b
        return 1.0 / (1.0 + u)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        t = self._t(x)
        with np.errstate(over="ignore", invalid="ignore"):
            u = t**self.b
            mu = 1.0 / (1.0 + u)
            core = u * mu * mu  # u / (1 + u)^2, -> 0 for u -> inf
        core = np.where(np.isfinite(u), core, 0.0)
        pos = t > 0
        da = 2.0 * self.b * core / self.a
        with np.errstate(divide="ignore", invalid="ignore"):
            db = np.where(pos, -core * np.log(np.where(pos, t, 1.0)), 0.0)
            dc = np.where(pos, 2.0 * self.b * core / np.where(pos, x - self.c, 1.0), 0.0)
        return np.stack([da, db, dc], axis=-1)

    @property
    def center(self) -> float:
        return self.c

    def translate(self, delta: float) -> "GBellMF":
        return GBellMF(self.a, self.b, self.c + delta)

    def center_gradient(self, x):
        return self.gradient(x)[..., 2]

    def centroid(self) -> float:
        return self.c


class TrapezoidMF:
    """Piecewise-linear trapezoid with knots a <= b <= c <= d."""

    shape = "trapezoid"
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: float, b: float, c: float, d: float):
        if not (a <= b <= c <= d):
            raise ValueError(f"trapezoid knots must be ordered, got {(a, b, c, d)}")
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)

    @property
    def params(self):
        return (self.a, self.b, self.c, self.d)

    def with_params(self, params):
        return TrapezoidMF(*params)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.shape(x))
        out = np.where((x >= self.b) & (x <= self.c), 1.0, out)
        if self.b > self.a:
            rising = (x > self.a) & (x < self.b)
            out = np.where(rising, (x - self.a) / (self.b - self.a), out)
        if self.d > self.c:
            falling = (x > self.c) & (x < self.d)
            out = np.where(falling, (self.d - x) / (self.d - self.c), out)
        return out

    def gradient(self, x):
        # at kinks: one-sided derivative from the left
        x = np.asarray(x, dtype=float)
        zeros = np.zeros(np.shape(x))
        da, db, dc, dd = zeros.copy(), zeros.copy(), zeros.copy(), zeros.copy()
        if self.b > self.a:
            r = (x > self.a) & (x <= self.b)
            w = (self.b - self.a) ** 2
            da = np.where(r, (x - self.b) / w, da)
            db = np.where(r, -(x - self.a) / w, db)
        if self.d > self.c:
            f = (x > self.c) & (x <= self.d)
            w = (self.d - self.c) ** 2
            dc = np.where(f, (self.d - x) / w, dc)
            dd = np.where(f, (x - self.c) / w, dd)
        return np.stack([da, db, dc, dd], axis=-1)

    @property
    def center(self) -> float:
        return 0.5 * (self.b + self.c)

    def translate(self, delta: float) -> "TrapezoidMF":
        return TrapezoidMF(self.a + delta, self.b + delta, self.c + delta, self.d + delta)

    def center_gradient(self, x):
        return self.gradient(x).sum(axis=-1)

    def centroid(self) -> float:
        den = 3.0 * ((self.d + self.c) - (self.a + self.b))
        if den == 0:  # degenerate spike
            return self.center
        num = (self.d**2 + self.c**2 + self.c * self.d) - (self.a**2 + self.b**2 + self.a * self.b)
        return num / den


class TriangleMF:
    """Piecewise-linear triangle with knots a <= b <= c, peak at b."""

    shape = "triangle"
    __slots__ = ("a", "b", "c")

    def __init__(self, a: float, b: float, c: float):
        if not (a <= b <= c):
            raise ValueError(f"triangle knots must be ordered, got {(a, b, c)}")
        self.a, self.b, self.c = float(a), float(b), float(c)

    @property
    def params(self):
        return (self.a, self.b, self.c)

    def with_params(self, params):
        return TriangleMF(*params)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.shape(x))
        if self.b > self.a:
            rising = (x > self.a) & (x < self.b)
            out = np.where(rising, (x - self.a) / (self.b - self.a), out)
        if self.c > self.b:
            falling = (x > self.b) & (x < self.c)
            out = np.where(falling, (self.c - x) / (self.c - self.b), out)
        return np.where(x == self.b, 1.0, out)

    def gradient(self, x):
        # at kinks: one-sided derivative from the left
        x = np.asarray(x, dtype=float)
        zeros = np.zeros(np.shape(x))
        da, db, dc = zeros.copy(), zeros.copy(), zeros.copy()
        if self.b > self.a:
            r = (x > self.a) & (x <= self.b)
            w = (self.b - self.a) ** 2
            da = np.where(r, (x - self.b) / w, da)
            db = np.where(r, -(x - self.a) / w, db)
        if self.c > self.b:
            f = (x > self.b) & (x <= self.c)
            w = (self.c - self.b) ** 2
            db = np.where(f, (self.c - x) / w, db)
            dc = np.where(f, (x - self.b) / w, dc)
        return np.stack([da, db, dc], axis=-1)

    @property
    def center(self) -> float:
        return self.b

    def translate(self, delta: float) -> "TriangleMF":
        return TriangleMF(self.a + delta, self.b + delta, self.c + delta)

    def center_gradient(self, x):
        return self.gradient(x).sum(axis=-1)

    def centroid(self) -> float:
        return (self.a + self.b + self.c) / 3.0


MF_SHAPES = {
    "gaussian": GaussianMF,
    "gbell": GBellMF,
    "trapezoid": TrapezoidMF,
    "triangle": TriangleMF,
}

MembershipFunction = GaussianMF | GBellMF | TrapezoidMF | TriangleMF


def mf_eval(mf: MembershipFunction, x):
    """Membership degree(s) of x, always in [0, 1]."""
    return mf.evaluate(x)


def mf_grad(mf: MembershipFunction, x):
    """Analytic partials of mf_eval w.r.t. each shape parameter.

    Piecewise-linear shapes return the one-sided derivative from the left
    at their kinks.
    """
    return mf.gradient(x)


def mf_to_dict(mf: MembershipFunction) -> dict:
    return {"shape": mf.shape, "params": [float(p) for p in mf.params]}


def mf_from_dict(d: dict) -> MembershipFunction:
    try:
        cls = MF_SHAPES[d["shape"]]
    except KeyError:
        raise ValueError(f"unknown membership shape {d.get('shape')!r}") from None
    return cls(*d["params"])


# ---------------------------------------------------------------------------
# linguistic variables and rule machinery
# ---------------------------------------------------------------------------

class LinguisticVariable:
    """A named input or output dimension partitioned into labeled fuzzy sets."""

    def __init__(self, name: str, lo: float, hi: float, mfs, labels=None):
        if not lo < hi:
            raise ValueError(f"variable {name!r} needs lo < hi, got [{lo}, {hi}]")
        mfs = list(mfs)
        if not mfs:
            raise ValueError(f"variable {name!r} needs at least one membership function")
        if labels is None:
            labels = [f"mf{i}" for i in range(len(mfs))]
        labels = list(labels)
        if len(labels) != len(mfs):
            raise ValueError(f"variable {name!r}: {len(labels)} labels for {len(mfs)} MFs")
        for mf in mfs:
            if not lo <= mf.center <= hi:
                raise ValueError(
                    f"variable {name!r}: MF center {mf.center} outside [{lo}, {hi}]"
                )
        self.name = name
        self.lo = float(lo)
        self.hi = float(hi)
        self.mfs = mfs
        self.labels = labels

    @property
    def n_mfs(self) -> int:
        return len(self.mfs)

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def clip(self, x):
        """Values outside the declared physical range are clipped before evaluation."""
        return np.clip(x, self.lo, self.hi)

    def fuzzify(self, x):
        """Degrees of all MFs at x; shape = x.shape + (n_mfs,)."""
        cx = self.clip(np.asarray(x, dtype=float))
        return np.stack([mf.evaluate(cx) for mf in self.mfs], axis=-1)

    def replace_mfs(self, mfs) -> "LinguisticVariable":
        return LinguisticVariable(self.name, self.lo, self.hi, mfs, self.labels)

    @classmethod
    def uniform(cls, name, lo, hi, n_mfs, shape="gaussian", labels=None):
        """Evenly spread MFs whose neighbours cross near degree 0.5.

        Centers sit on a uniform grid over [lo, hi]; widths follow from the
        grid spacing, adjusted per shape so adjacent sets intersect at 0.5.
        Triangles come out isosceles.
        """
        if n_mfs < 1:
            raise ValueError("n_mfs must be >= 1")
        lo, hi = float(lo), float(hi)
        if n_mfs == 1:
            centers = [0.5 * (lo + hi)]
            h = hi - lo
        else:
            h = (hi - lo) / (n_mfs - 1)
            centers = [lo + i * h for i in range(n_mfs)]
        mfs = []
        for c in centers:
            if shape == "gaussian":
                mfs.append(GaussianMF(c, h / (2.0 * math.sqrt(2.0 * math.log(2.0)))))
            elif shape == "gbell":
                mfs.append(GBellMF(h / 2.0, 2.0, c))
            elif shape == "trapezoid":
                mfs.append(TrapezoidMF(c - 0.75 * h, c - 0.25 * h, c + 0.25 * h, c + 0.75 * h))
            elif shape == "triangle":
                mfs.append(TriangleMF(c - h, c, c + h))
            else:
                raise ValueError(f"unknown membership shape {shape!r}")
        return cls(name, lo, hi, mfs, labels)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "range": [self.lo, self.hi],
            "mfs": [dict(mf_to_dict(mf), label=lab) for mf, lab in zip(self.mfs, self.labels)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinguisticVariable":
        mfs = [mf_from_dict(m) for m in d["mfs"]]
        labels = [m.get("label", f"mf{i}") for i, m in enumerate(d["mfs"])]
        return cls(d["name"], d["range"][0], d["range"][1], mfs, labels)


def grid_partition(variables) -> list[tuple[int, ...]]:
    """Cartesian product of MF indices, one antecedent tuple per rule.

    Tuples come out in lexicographic order; 4 variables x 3 MFs gives the
    canonical 81-rule grid.
    """
    variables = list(variables)
    if not variables:
        raise ValueError("grid_partition needs at least one variable")
    return list(itertools.product(*(range(v.n_mfs) for v in variables)))


def firing_strength(variables, antecedent, x, tnorm: str = "product") -> float:
    """T-norm of the antecedent's membership degrees at x.

    Product is the default and the only T-norm used anywhere in training;
    min exists purely as an evaluation-time option.
    """
    if tnorm not in ("product", "min"):
        raise ValueError(f"tnorm must be 'product' or 'min', got {tnorm!r}")
    degrees = [
        float(var.mfs[idx].evaluate(var.clip(xi)))
        for var, idx, xi in zip(variables, antecedent, x)
    ]
    if tnorm == "min":
        return min(degrees)
    w = 1.0
    for d in degrees:
        w *= d
    return w


# ---------------------------------------------------------------------------
# Mamdani model and inference
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MamdaniRule:
    """If inputs match `antecedent` then output is MF `consequent`, weighted."""

    antecedent: tuple[int, ...]
    consequent: int
    weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"rule weight must be in [0, 1], got {self.weight}")


class InferenceResult(NamedTuple):
    output: float
    fired: bool


@dataclass
class MamdaniModel:
    inputs: list[LinguisticVariable]
    output: LinguisticVariable
    rules: list[MamdaniRule]

    def __post_init__(self):
        for rule in self.rules:
            if len(rule.antecedent) != len(self.inputs):
                raise ValueError(f"antecedent {rule.antecedent} does not match input count")
            for var, idx in zip(self.inputs, rule.antecedent):
                if not 0 <= idx < var.n_mfs:
                    raise ValueError(f"antecedent index {idx} out of range for {var.name!r}")
            if not 0 <= rule.consequent < self.output.n_mfs:
                raise ValueError(f"consequent index {rule.consequent} out of range")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.output.lo + self.output.hi)

    def output_grid(self) -> np.ndarray:
        return np.linspace(self.output.lo, self.output.hi, OUTPUT_GRID_POINTS)

    def activations(self, x, tnorm: str = "product") -> np.ndarray:
        """Rule weight times T-norm of antecedent degrees, per rule."""
        return np.array(
            [
                r.weight * firing_strength(self.inputs, r.antecedent, x, tnorm)
                for r in self.rules
            ]
        )

    def infer(self, x, tnorm: str = "product") -> InferenceResult:
        """Crisp output by scaling implication, max aggregation, centroid.

        When no rule fires the midpoint of the output range is returned and
        the `fired` flag is False.  `tnorm="min"` is an evaluation-time
        alternative; training always uses the product.
        """
        acts = self.activations(x, tnorm)
        if not np.any(acts > 0):
            return InferenceResult(self.midpoint, False)
        grid = self.output_grid()
        cons = np.stack([self.output.mfs[r.consequent].evaluate(grid) for r in self.rules])
        agg = (acts[:, None] * cons).max(axis=0)
        den = agg.sum()
        if den == 0:
            return InferenceResult(self.midpoint, False)
        return InferenceResult(float(agg @ grid / den), True)

    def infer_batch(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized inference over a sample matrix.

        Rules sharing a consequent MF are collapsed through their maximal
        activation before aggregation, which is exact for the scaling
        implication.  Returns (outputs, fired_mask).
        """
        X = np.asarray(X, dtype=float)
        P = X.shape[0]
        mu = [var.fuzzify(X[:, v]) for v, var in enumerate(self.inputs)]
        acts = np.ones((P, len(self.rules)))
        for i, rule in enumerate(self.rules):
            for v, idx in enumerate(rule.antecedent):
                acts[:, i] *= mu[v][:, idx]
            acts[:, i] *= rule.weight
        m_out = self.output.n_mfs
        act_by_cons = np.zeros((P, m_out))
        for j in range(m_out):
            cols = [i for i, r in enumerate(self.rules) if r.consequent == j]
            if cols:
                act_by_cons[:, j] = acts[:, cols].max(axis=1)
        grid = self.output_grid()
        cons_vals = np.stack([mf.evaluate(grid) for mf in self.output.mfs])
        agg = (act_by_cons[:, :, None] * cons_vals[None, :, :]).max(axis=1)
        den = agg.sum(axis=1)
        fired = den > 0
        safe = np.where(fired, den, 1.0)
        out = np.where(fired, agg @ grid / safe, self.midpoint)
        return out, fired

    def rmse(self, X, y) -> float:
        out, _ = self.infer_batch(X)
        return float(np.sqrt(np.mean((out - np.asarray(y, dtype=float)) ** 2)))

    def to_dict(self) -> dict:
        return {
            "inputs": [v.to_dict() for v in self.inputs],
            "output": self.output.to_dict(),
            "rules": [
                {"antecedent": list(r.antecedent), "consequent": r.consequent, "weight": r.weight}
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MamdaniModel":
        return cls(
            inputs=[LinguisticVariable.from_dict(v) for v in d["inputs"]],
            output=LinguisticVariable.from_dict(d["output"]),
            rules=[
                MamdaniRule(tuple(r["antecedent"]), r["consequent"], r["weight"])
                for r in d["rules"]
            ],
        )


def mamdani_infer(model: MamdaniModel, x) -> InferenceResult:
    return model.infer(x)
