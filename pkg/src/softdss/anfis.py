"""Takagi-Sugeno fuzzy network with hybrid learning.

The model grid-partitions its input variables into rules whose consequents
are linear in the inputs.  A forward pass fuzzifies (layer 2), takes product
firing strengths (layer 3), normalizes them (layer 4), weights the linear
rule outputs (layer 5) and sums (layer 6).

Hybrid learning alternates, once per epoch:
  * consequent identification by least squares with the premises frozen,
    which is globally optimal in the consequent subspace, then
  * steepest descent on the membership parameters with the consequents
    frozen, with step length k along the normalized gradient direction
    (learning rate = k / ||gradient||).
The step size k adapts by two heuristics: four consecutive error reductions
grow it by 10%, four strictly alternating changes shrink it by 10%.

The epoch error is measured after the consequent update and before the
premise update, so the least-squares optimality is observable per epoch.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateCoverageError, SingularSystemError
from .fuzzy import LinguisticVariable, grid_partition
from .linalg import lse_batch, rls_solve
from .report import TrainReport

DEFAULT_STEP_SIZE = 0.01
_MIN_WIDTH_FACTOR = 1e-6


@dataclass(frozen=True)
class AnfisModel:
    """Premise variables (parameter set S1) plus per-rule linear consequents (set S2)."""

    inputs: list[LinguisticVariable]
    rules: list[tuple[int, ...]]
    consequents: np.ndarray  # (n_rules, n_inputs + 1), last column is the constant term

    def __post_init__(self):
        n_rules = len(self.rules)
        want = (n_rules, len(self.inputs) + 1)
        if self.consequents.shape != want:
            raise ValueError(f"consequents must have shape {want}, got {self.consequents.shape}")

    @classmethod
    def grid(cls, inputs, consequents=None) -> "AnfisModel":
        """Grid-partitioned model; consequents start at zero unless given."""
        inputs = list(inputs)
        rules = grid_partition(inputs)
        if consequents is None:
            consequents = np.zeros((len(rules), len(inputs) + 1))
        return cls(inputs=inputs, rules=rules, consequents=np.asarray(consequents, dtype=float))

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    def rule_index(self) -> np.ndarray:
        return np.asarray(self.rules, dtype=int)

    # -- premise parameter vector ------------------------------------------

    def premise_vector(self) -> np.ndarray:
        """All MF shape parameters flattened: variable order, MF order, parameter order."""
        out = []
        for var in self.inputs:
            for mf in var.mfs:
                out.extend(mf.params)
        return np.array(out)

    def with_premise_vector(self, vec, project: bool = True) -> "AnfisModel":
        """Rebuild the model from a flat premise vector.

        With `project` enabled the raw parameters are repaired first (widths
        clamped positive, knots re-sorted, centers pulled back into range) so
        gradient steps can never produce an invalid shape.
        """
        vec = np.asarray(vec, dtype=float)
        pos = 0
        new_inputs = []
        for var in self.inputs:
            new_mfs = []
            for mf in var.mfs:
                n = len(mf.params)
                params = vec[pos : pos + n]
                pos += n
                if project:
                    params = _project_params(mf.shape, params, var.lo, var.hi)
                new_mfs.append(mf.with_params(tuple(params)))
            new_inputs.append(var.replace_mfs(new_mfs))
        if pos != vec.shape[0]:
            raise ValueError(f"premise vector length {vec.shape[0]} != expected {pos}")
        return replace(self, inputs=new_inputs)

    def to_dict(self) -> dict:
        return {
            "inputs": [v.to_dict() for v in self.inputs],
            "rules": [list(r) for r in self.rules],
            "consequents": self.consequents.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnfisModel":
        return cls(
            inputs=[LinguisticVariable.from_dict(v) for v in d["inputs"]],
            rules=[tuple(r) for r in d["rules"]],
            consequents=np.asarray(d["consequents"], dtype=float),
        )


def _project_params(shape, params, lo, hi):
    """Pull raw parameters back onto the valid set for their shape."""
    params = np.asarray(params, dtype=float).copy()
    min_width = _MIN_WIDTH_FACTOR * (hi - lo)
    if shape == "gaussian":
        params[0] = np.clip(params[0], lo, hi)
        params[1] = max(params[1], min_width)
    elif shape == "gbell":
        params[0] = max(params[0], min_width)
        params[1] = max(params[1], _MIN_WIDTH_FACTOR)
        params[2] = np.clip(params[2], lo, hi)
    elif shape in ("triangle", "trapezoid"):
        params.sort()
        center = params[1] if shape == "triangle" else 0.5 * (params[1] + params[2])
        params += np.clip(center, lo, hi) - center
    return params


# ---------------------------------------------------------------------------
# forward pass
# ---------------------------------------------------------------------------

@dataclass
class ForwardTrace:
    """Every intermediate layer of a batch forward pass, kept for backprop."""

    x: np.ndarray            # clipped inputs (P, d)
    memberships: list        # per variable: (P, n_mfs) degrees (layer 2)
    w: np.ndarray            # firing strengths (P, R) (layer 3)
    wsum: np.ndarray         # (P,)
    wbar: np.ndarray         # normalized strengths (P, R) (layer 4)
    xa: np.ndarray           # inputs with appended 1 (P, d + 1)
    regressors: np.ndarray   # (P, R * (d + 1)): wbar outer xa, flattened per rule


def forward_batch(model: AnfisModel, X) -> tuple[np.ndarray, ForwardTrace]:
    """Outputs and full trace for a batch of samples."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_inputs:
        raise ValueError(f"expected {model.n_inputs} inputs, got {X.shape[1]}")
    Xc = np.column_stack([var.clip(X[:, v]) for v, var in enumerate(model.inputs)])
    memberships = [var.fuzzify(Xc[:, v]) for v, var in enumerate(model.inputs)]
    ridx = model.rule_index()
    P, R = Xc.shape[0], model.n_rules
    w = np.ones((P, R))
    for v in range(model.n_inputs):
        w *= memberships[v][:, ridx[:, v]]
    wsum = w.sum(axis=1)
    dead = wsum <= 0.0
    if np.any(dead):
        raise DegenerateCoverageError(
            f"no rule fires for sample {int(np.argmax(dead))}; cannot normalize"
        )
    wbar = w / wsum[:, None]
    xa = np.column_stack([Xc, np.ones(P)])
    regressors = (wbar[:, :, None] * xa[:, None, :]).reshape(P, R * (model.n_inputs + 1))
    y = regressors @ model.consequents.ravel()
    return y, ForwardTrace(Xc, memberships, w, wsum, wbar, xa, regressors)


def anfis_forward(model: AnfisModel, x) -> tuple[float, ForwardTrace]:
    """Single-sample forward pass."""
    y, trace = forward_batch(model, np.atleast_2d(x))
    return float(y[0]), trace


def build_regressor_row(trace: ForwardTrace, index: int = 0) -> np.ndarray:
    """Least-squares row for one sample: per rule (wbar*x1, ..., wbar*xd, wbar).

    Its dot product with the flattened consequent matrix reproduces the
    forward output exactly.
    """
    return trace.regressors[index]


# ---------------------------------------------------------------------------
# hybrid learning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepSizeController:
    """Adaptive step size k with a window of the last five epoch errors."""

    k: float = DEFAULT_STEP_SIZE
    history: tuple[float, ...] = ()

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError(f"step size must be positive, got {self.k}")


def update_step_size(controller: StepSizeController, new_error: float) -> StepSizeController:
    """Apply the two step-size heuristics after an epoch.

    Four consecutive reductions: k grows 10% and the window resets.  Four
    strictly alternating increase/decrease transitions: k shrinks 10% and
    the window resets.  Anything else leaves k untouched.
    """
    if new_error < 0:
        raise ValueError(f"error must be >= 0, got {new_error}")
    hist = (controller.history + (float(new_error),))[-5:]
    if len(hist) == 5:
        diffs = np.diff(hist)
        if np.all(diffs < 0):
            return StepSizeController(controller.k * 1.1, (hist[-1],))
        signs = np.sign(diffs)
        if np.all(signs != 0) and np.all(signs[1:] == -signs[:-1]):
            return StepSizeController(controller.k * 0.9, (hist[-1],))
    return StepSizeController(controller.k, hist)


def premise_gradient(model: AnfisModel, trace: ForwardTrace, residuals) -> np.ndarray:
    """Gradient of E = 1/2 sum(residual^2) w.r.t. the flat premise vector.

    Backpropagates through the normalization and product layers; the
    product derivative is computed from exclusion products so a zero
    membership never divides.
    """
    residuals = np.asarray(residuals, dtype=float)
    P, R = trace.w.shape
    f = trace.xa @ model.consequents.T                    # (P, R) rule outputs
    y = (trace.wbar * f).sum(axis=1)
    coef = residuals[:, None] * (f - y[:, None]) / trace.wsum[:, None]
    ridx = model.rule_index()
    parts = []
    for v, var in enumerate(model.inputs):
        w_excl = np.ones((P, R))
        for u in range(model.n_inputs):
            if u != v:
                w_excl *= trace.memberships[u][:, ridx[:, u]]
        gv = coef * w_excl
        x_v = trace.x[:, v]
        for j, mf in enumerate(var.mfs):
            cols = ridx[:, v] == j
            de_dmu = gv[:, cols].sum(axis=1)
            parts.append(mf.gradient(x_v).T @ de_dmu)
    return np.concatenate(parts)


def _apply_premise_step(model: AnfisModel, grad: np.ndarray, k: float) -> AnfisModel:
    """Move every premise parameter by -eta * grad with eta = k / ||grad||."""
    norm = float(np.sqrt(grad @ grad))
    if norm == 0.0:
        return model
    return model.with_premise_vector(model.premise_vector() - (k / norm) * grad)


def _identify_consequents(regressors, y, engine, gamma):
    if engine == "rls" or regressors.shape[0] < regressors.shape[1]:
        # an underdetermined batch is always singular; gamma*I regularizes it
        return rls_solve(regressors, y, gamma)
    try:
        return lse_batch(regressors, y)
    except SingularSystemError:
        return rls_solve(regressors, y, gamma)


def hybrid_epoch(
    model: AnfisModel,
    X,
    y,
    controller: StepSizeController,
    engine: str = "batch",
    gamma: float = 1e6,
) -> tuple[AnfisModel, float]:
    """One forward (consequent LSE) plus one backward (premise descent) pass.

    Returns the updated model and the epoch RMSE, measured after the
    consequent update and before the premise update.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[0] == 0:
        raise ValueError("training data must be non-empty")
    _, trace = forward_batch(model, X)
    flat = _identify_consequents(trace.regressors, y, engine, gamma)
    model = replace(model, consequents=flat.reshape(model.n_rules, model.n_inputs + 1))
    residuals = trace.regressors @ flat - y
    rmse = float(np.sqrt(np.mean(residuals**2)))
    grad = premise_gradient(model, trace, residuals)
    model = _apply_premise_step(model, grad, controller.k)
    return model, rmse


def backprop_epoch(
    model: AnfisModel, X, y, controller: StepSizeController
) -> tuple[AnfisModel, float]:
    """Premise-only epoch: consequents stay fixed, RMSE measured pre-update."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] == 0:
        raise ValueError("training data must be non-empty")
    pred, trace = forward_batch(model, X)
    residuals = pred - y
    rmse = float(np.sqrt(np.mean(residuals**2)))
    grad = premise_gradient(model, trace, residuals)
    model = _apply_premise_step(model, grad, controller.k)
    return model, rmse


def anfis_train(
    model: AnfisModel,
    train: tuple,
    test: tuple | None,
    epochs: int,
    mode: str = "hybrid",
    k0: float = DEFAULT_STEP_SIZE,
    engine: str = "batch",
    seed: int = 0,
) -> tuple[AnfisModel, TrainReport]:
    """Train for a fixed number of epochs in hybrid or backprop-only mode."""
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if mode not in ("hybrid", "backprop"):
        raise ValueError(f"mode must be 'hybrid' or 'backprop', got {mode!r}")
    X, y = train
    controller = StepSizeController(k0)
    curve = []
    start = time.perf_counter()
    for _ in range(epochs):
        if mode == "hybrid":
            model, rmse = hybrid_epoch(model, X, y, controller, engine=engine)
        else:
            model, rmse = backprop_epoch(model, X, y, controller)
        curve.append(rmse)
        controller = update_step_size(controller, rmse)
    if mode == "hybrid":
        # consequents are defined by least squares given the premises; after the
        # last premise step re-identify them so the returned model is coherent
        _, trace = forward_batch(model, X)
        flat = _identify_consequents(trace.regressors, np.asarray(y, dtype=float), engine, 1e6)
        model = replace(model, consequents=flat.reshape(model.n_rules, model.n_inputs + 1))
    pred, _ = forward_batch(model, X)
    final_train = float(np.sqrt(np.mean((pred - np.asarray(y, dtype=float)) ** 2)))
    final_test = None
    if test is not None:
        Xt, yt = test
        pt, _ = forward_batch(model, Xt)
        final_test = float(np.sqrt(np.mean((pt - np.asarray(yt, dtype=float)) ** 2)))
    report = TrainReport(curve, final_train, final_test, time.perf_counter() - start, seed)
    return model, report
