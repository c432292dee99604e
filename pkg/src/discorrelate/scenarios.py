"""Figure scenarios, single-point evaluation, loss curves, sweeps and the analytic/oracle diff.

Scenario ids follow the figure panels (``fig1``, ``fig3a`` .. ``fig6c``) plus
``custom``.  Each id maps to a ``kind`` (which circuit or state to build)
and default parameters; user overrides are merged on top.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from . import analytic, oracle, states
from .analysis import (DiscorrelationScore, JointDistribution, discorrelation_metric,
                       joint_distribution, logarithmic_negativity, reference_for)
from .errors import SpecError
from .fock import DensityOperator, PureState, tensor_product, to_density
from .optics import BeamSplitter, LossPoint, loss_channel

SQRT8 = math.sqrt(8)
DEFAULT_DIM_CAP = 64
LOSS_GRID = tuple(round(0.1 * k, 10) for k in range(11))
# the herald cannot fire once every photon before it is lost
HERALDED_LOSS_GRID = LOSS_GRID[:-1]

CIRCUIT_KINDS = ("coherent", "smsv", "tmsv")
KINDS = CIRCUIT_KINDS + ("displaced", "coherent_inputs", "smsv_inputs", "tmsv_state", "hom")


@dataclass(frozen=True)
class Scenario:
    id: str
    kind: str
    description: str
    defaults: dict = field(default_factory=dict)
    series: tuple = ()
    metric: str = ""


def _coh(t, beta_factor, dim=30):
    return dict(alpha=SQRT8, beta_factor=beta_factor, t=t, dim=dim)


def _sq(t, lam_b_factor):
    return dict(lam=1.0, lam_b_factor=lam_b_factor, t=t, dim=30, edge=True)


# Named states compared under loss.
LOSS_STATES = {
    "hom": dict(kind="hom", dim=3),
    "displaced": dict(kind="displaced", alpha=SQRT8, dim=40),
    "fig3c": dict(kind="coherent", **_coh(math.sqrt(2 / 30), 1)),
    "tmsv": dict(kind="tmsv_state", lam=1 / 3, dim=30),
    "not-discorrelated": dict(kind="coherent", **_coh(0.5, 1j)),
}
DISCORRELATED = ("hom", "displaced", "fig3c")

SCENARIOS = {s.id: s for s in [
    Scenario("fig1", "displaced", "single photon displaced by a coherent state on a 50:50 splitter",
             dict(alpha=SQRT8, dim=40)),
    Scenario("fig3a", "coherent_inputs", "product of the two coherent inputs",
             dict(alpha=SQRT8, beta_factor=1, dim=30)),
    Scenario("fig3b", "coherent", "coherent inputs a quarter turn apart; not discorrelated",
             _coh(math.sqrt(2 / 30), 1j)),
    Scenario("fig3c", "coherent", "equal coherent inputs, t^2 = 2/30", _coh(math.sqrt(2 / 30), 1)),
    Scenario("fig3d", "coherent", "equal coherent inputs, t^2 = 2/15; n+m = 14 suppressed",
             _coh(math.sqrt(2 / 15), 1)),
    Scenario("fig4a", "smsv_inputs", "product of the two squeezed-vacuum inputs",
             dict(lam=1.0, lam_b_factor=1, dim=30, edge=True)),
    Scenario("fig4b", "smsv", "opposite squeezing, t^2 = 2/9", _sq(math.sqrt(2 / 9), -1)),
    Scenario("fig4c", "smsv", "equal squeezing, t^2 = 2/9", _sq(math.sqrt(2 / 9), 1)),
    Scenario("fig4d", "smsv", "equal squeezing, t^2 = 2/5", _sq(math.sqrt(2 / 5), 1)),
    Scenario("fig5a", "tmsv_state", "two-mode squeezed vacuum input",
             dict(lam=1.0, dim=30, edge=True)),
    Scenario("fig5b", "tmsv", "two-mode squeezed input, t^2 = 2/15",
             dict(lam=1.0, t=math.sqrt(2 / 15), dim=30, edge=True)),
    Scenario("fig5c", "tmsv", "two-mode squeezed input, balanced splitters; n+m = 4 suppressed",
             dict(lam=1.0, t=1 / math.sqrt(2), dim=30, edge=True)),
    Scenario("fig6a", "loss", "logarithmic negativity versus symmetric output loss",
             dict(loss_point=LossPoint.AFTER_DISCORRELATION),
             series=("hom", "displaced", "fig3c", "tmsv", "not-discorrelated"), metric="E_N"),
    Scenario("fig6b", "loss", "discorrelation versus symmetric output loss",
             dict(loss_point=LossPoint.AFTER_DISCORRELATION),
             series=("hom", "displaced", "fig3c", "tmsv"), metric="D"),
    Scenario("fig6c", "loss", "discorrelation versus loss at three circuit locations",
             dict(), series=("fig3c",), metric="D"),
    Scenario("custom", "custom", "user-specified circuit; pass --kind", dict(dim=30)),
]}


@dataclass(frozen=True)
class ScenarioSpec:
    """A scenario id plus user overrides; ``None`` means use the scenario default."""

    scenario: str
    kind: Optional[str] = None
    state: Optional[str] = None
    alpha: Optional[complex] = None
    beta: Optional[complex] = None
    alpha_phase: Optional[float] = None
    beta_phase: Optional[float] = None
    lam: Optional[complex] = None
    lam_b: Optional[complex] = None
    t: Optional[float] = None
    dim: Optional[int] = None
    loss: Optional[float] = None
    loss_point: Optional[LossPoint] = None
    edge: bool = False


def dim_cap() -> int:
    raw = os.environ.get("DISCORR_DIM_CAP", str(DEFAULT_DIM_CAP))
    try:
        return int(raw)
    except ValueError:
        raise SpecError(f"DISCORR_DIM_CAP must be an integer, got {raw!r}") from None


def resolve(spec: ScenarioSpec) -> dict:
    """Merge scenario defaults and overrides into a flat, validated parameter dict."""
    if spec.scenario not in SCENARIOS:
        raise SpecError(f"unknown scenario {spec.scenario!r}; choose from {sorted(SCENARIOS)}")
    sc = SCENARIOS[spec.scenario]
    if sc.kind == "loss":
        name = spec.state or ("fig3c" if "fig3c" in sc.series else sc.series[0])
        if name not in LOSS_STATES:
            raise SpecError(f"unknown state {name!r}; choose from {sorted(LOSS_STATES)}")
        p = dict(LOSS_STATES[name], state=name, **sc.defaults)
    elif sc.kind == "custom":
        if spec.kind not in KINDS:
            raise SpecError(f"custom scenarios need --kind, one of {list(KINDS)}")
        p = dict(sc.defaults, kind=spec.kind)
    else:
        if spec.state is not None:
            raise SpecError(f"--state only applies to fig6 scenarios, not {spec.scenario}")
        p = dict(sc.defaults, kind=sc.kind)
    p["scenario"] = spec.scenario
    for key in ("alpha", "beta", "lam", "lam_b", "t", "dim", "loss", "loss_point"):
        value = getattr(spec, key)
        if value is not None:
            p[key] = value
    if spec.edge:
        p["edge"] = True
    if "alpha" in p and "beta" not in p and "beta_factor" in p:
        p["beta"] = p["alpha"] * p["beta_factor"]
    if "lam" in p and "lam_b" not in p and "lam_b_factor" in p:
        p["lam_b"] = p["lam"] * p["lam_b_factor"]
    for key in ("alpha", "beta"):
        phase = getattr(spec, key + "_phase")
        if phase is not None:
            if key not in p:
                raise SpecError(f"--{key}-phase given but {p['kind']} has no {key}")
            p[key] = states.amplitude(abs(p[key]), phase)
    p.pop("beta_factor", None)
    p.pop("lam_b_factor", None)
    p.setdefault("edge", False)
    p.setdefault("loss_point", LossPoint.AFTER_DISCORRELATION)
    _validate(p)
    return p


def _validate(p: dict) -> None:
    kind = p["kind"]
    dim = p.get("dim")
    if dim is None or int(dim) != dim or dim < 3:
        raise SpecError(f"dim must be an integer >= 3, got {dim!r}")
    if dim > dim_cap():
        raise SpecError(f"dim={dim} exceeds DISCORR_DIM_CAP={dim_cap()}")
    if kind in CIRCUIT_KINDS:
        t = p.get("t")
        if t is None or not 0 < float(np.real(t)) < 1 or abs(np.imag(t)) > 0:
            raise SpecError(f"t must be real and strictly between 0 and 1, got {t!r}")
        p["t"] = float(np.real(t))
    if kind in ("coherent", "coherent_inputs") and ("alpha" not in p or "beta" not in p):
        raise SpecError("coherent circuits need --alpha and --beta")
    if kind in ("smsv", "smsv_inputs") and ("lam" not in p or "lam_b" not in p):
        raise SpecError("squeezed-vacuum circuits need --lambda (and optionally --lambda-b)")
    if kind in ("tmsv", "tmsv_state") and "lam" not in p:
        raise SpecError("two-mode squeezed states need --lambda")
    if kind == "displaced" and "alpha" not in p:
        raise SpecError("the displaced-photon scenario needs --alpha")
    loss = p.get("loss")
    if loss is not None:
        loss = float(np.real(loss))
        if not 0 <= loss <= 1:
            raise SpecError(f"loss must lie in [0, 1], got {loss}")
        p["loss"] = loss
    lp = p["loss_point"]
    if not isinstance(lp, LossPoint):
        try:
            p["loss_point"] = LossPoint(lp)
        except ValueError:
            raise SpecError(f"unknown loss point {lp!r}") from None
    if loss and kind not in CIRCUIT_KINDS and p["loss_point"] is not LossPoint.AFTER_DISCORRELATION:
        raise SpecError(f"{kind} states only support loss after discorrelation (loss point 'output')")


# -- building states --------------------------------------------------------------

def circuit_config(p: dict, loss: float = 0.0) -> oracle.CircuitConfig:
    kind, dim = p["kind"], p["dim"]
    bs = BeamSplitter.from_t(p["t"])
    lossy = ((p["loss_point"], 1.0 - loss),) if loss > 0 else ()
    if kind == "coherent":
        return oracle.CircuitConfig(states.coherent(p["alpha"], dim),
                                    states.coherent(p["beta"], dim), bs=bs, loss=lossy)
    if kind == "smsv":
        return oracle.CircuitConfig(states.smsv(p["lam"], dim, p["edge"]),
                                    states.smsv(p["lam_b"], dim, p["edge"]), bs=bs, loss=lossy)
    if kind == "tmsv":
        return oracle.CircuitConfig(input_ab=states.tmsv(p["lam"], dim, p["edge"]),
                                    bs=bs, loss=lossy)
    raise SpecError(f"{kind} is not a heralded circuit")


def plain_state(p: dict) -> PureState:
    kind, dim = p["kind"], p["dim"]
    if kind == "displaced":
        return oracle.simulate_displaced_photon(p["alpha"], dim)
    if kind == "coherent_inputs":
        return tensor_product(states.coherent(p["alpha"], dim), states.coherent(p["beta"], dim))
    if kind == "smsv_inputs":
        return tensor_product(states.smsv(p["lam"], dim, p["edge"]),
                              states.smsv(p["lam_b"], dim, p["edge"]))
    if kind == "tmsv_state":
        return states.tmsv(p["lam"], dim, p["edge"])
    if kind == "hom":
        return states.hom_state(dim)
    raise SpecError(f"{kind} is a heralded circuit")


def build(p: dict, loss: float = 0.0) -> tuple[Union[PureState, DensityOperator], Optional[float]]:
    """Output state and herald probability (``None`` for unheralded states)."""
    if p["kind"] in CIRCUIT_KINDS:
        return oracle.simulate_discorrelation_circuit(circuit_config(p, loss))
    psi = plain_state(p)
    if loss > 0:
        rho = to_density(psi)
        return loss_channel(loss_channel(rho, 0, 1 - loss), 1, 1 - loss), None
    return psi, None


@dataclass(frozen=True, eq=False)
class Evaluation:
    params: dict
    state: Union[PureState, DensityOperator]
    distribution: JointDistribution
    herald_probability: Optional[float]
    log_negativity: float
    discorrelation: DiscorrelationScore
    discarded: float

    def summary(self) -> dict:
        return {
            "parameters": encode_params(self.params),
            "herald_probability": self.herald_probability,
            "same_count_probability": self.distribution.same_count_prob,
            "discorrelation": self.discorrelation.value,
            "reference_same_count_probability": self.discorrelation.reference_same_prob,
            "log_negativity": self.log_negativity,
            "discarded_weight": self.discarded,
            "output_dim": self.distribution.probs.shape[0],
        }


def evaluate(p: dict, loss: Optional[float] = None,
             reference: Optional[JointDistribution] = None) -> Evaluation:
    """Build the state for ``p`` at the given loss and compute every observable.

    The discorrelation reference defaults to a coherent pair matched to the
    lossless state's marginal means.
    """
    if loss is None:
        loss = p.get("loss") or 0.0
    state, prob = build(p, loss)
    if reference is None:
        lossless = state if loss == 0 else build(p, 0.0)[0]
        reference = reference_for(lossless)
    jd = joint_distribution(state)
    return Evaluation(dict(p, loss=loss), state, jd, prob, logarithmic_negativity(state),
                      discorrelation_metric(jd, reference), state.discarded)


# -- curves and sweeps --------------------------------------------------------------

def _workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))


def _parallel(fn: Callable, items: list) -> list:
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        return list(pool.map(fn, items))


def _row(series: str, ref_name: str, point: LossPoint, loss: float, ev: Evaluation) -> dict:
    return {"series": series, "reference": ref_name, "loss_point": point.value,
            "loss": loss, "E_N": ev.log_negativity, "D": ev.discorrelation.value,
            "herald_probability": ev.herald_probability}


def loss_curves(spec: ScenarioSpec, grid=None) -> list[dict]:
    """Rows for a fig6 panel: one per (series, reference, loss point, loss value).

    fig6b also scores the TMSV against the reference of each discorrelated
    state it is plotted with, since the TMSV has no discorrelated baseline of
    its own.
    """
    sc = SCENARIOS[spec.scenario]
    if sc.kind != "loss":
        raise SpecError(f"{spec.scenario} is not a loss scenario")
    names = (spec.state,) if spec.state else sc.series
    if spec.loss_point is not None or sc.id != "fig6c":
        points = (spec.loss_point or LossPoint.AFTER_DISCORRELATION,)
    else:
        points = tuple(LossPoint)
    if grid is None:
        pre_herald = any(p is not LossPoint.AFTER_DISCORRELATION for p in points)
        grid = HERALDED_LOSS_GRID if pre_herald else LOSS_GRID
    params = {n: resolve(replace(spec, state=n, loss=None, loss_point=None)) for n in names}
    refs = {n: reference_for(build(params[n])[0]) for n in names}
    if sc.id == "fig6b" and "tmsv" in names:
        for n in DISCORRELATED:
            if n not in refs:
                refs[n] = reference_for(build(resolve(replace(spec, state=n, alpha=None, t=None,
                                                              dim=None, loss=None)))[0])
    jobs = []
    for n in names:
        ref_names = [n]
        if sc.id == "fig6b" and n == "tmsv":
            ref_names += list(DISCORRELATED)
        for point in points:
            for r in ref_names:
                for loss in grid:
                    jobs.append((n, r, point, float(loss)))

    def run(job):
        n, r, point, loss = job
        p = dict(params[n], loss_point=point, loss=loss)
        _validate(p)
        return _row(n, r, point, loss, evaluate(p, loss, refs[r]))

    return _ordered(_parallel(run, jobs), ("series", "reference", "loss_point", "loss"))


def _ordered(rows: list[dict], keys: tuple) -> list[dict]:
    return sorted(rows, key=lambda r: tuple(r[k] for k in keys))


SWEEP_PARAMS = ("loss", "t", "phase")


def run_sweep(spec: ScenarioSpec, param: str, values) -> list[dict]:
    """Evaluate one state over a parameter grid; rows sorted by parameter value."""
    if param not in SWEEP_PARAMS:
        raise SpecError(f"sweep parameter must be one of {SWEEP_PARAMS}")
    values = [float(v) for v in values]
    if not 0 < len(values) <= 10_000:
        raise SpecError("sweep grid must have between 1 and 10^4 points")
    base = resolve(spec)
    reference = reference_for(build(dict(base, loss=0.0))[0])

    def run(value):
        p = dict(base)
        loss = p.get("loss") or 0.0
        if param == "loss":
            loss = value
        elif param == "t":
            if p["kind"] not in CIRCUIT_KINDS:
                raise SpecError(f"t is not a parameter of {p['kind']} states")
            p["t"] = value
        else:
            key = {"coherent": "beta", "coherent_inputs": "beta",
                   "smsv": "lam_b", "smsv_inputs": "lam_b"}.get(p["kind"])
            if key is None:
                raise SpecError(f"phase sweeps need a second input; {p['kind']} has none")
            p[key] = abs(p[key]) * complex(math.cos(value), math.sin(value))
        p["loss"] = loss
        _validate(p)
        ref = reference if param == "loss" else None
        ev = evaluate(p, loss, ref)
        return {"param": param, "value": value, "E_N": ev.log_negativity,
                "D": ev.discorrelation.value, "herald_probability": ev.herald_probability}

    return _ordered(_parallel(run, values), ("value",))


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Output of :func:`run_scenario`: a probability grid or a table of curve rows."""

    summary: dict
    grid: Optional[np.ndarray] = None
    rows: Optional[list] = None


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Evaluate a scenario at one operating point, or trace its loss curves.

    Loss scenarios without an explicit ``loss`` return curve rows; everything
    else returns the joint photon-number grid and its summary.
    """
    sc = SCENARIOS.get(spec.scenario)
    if sc is not None and sc.kind == "loss" and spec.loss is None:
        rows = loss_curves(spec)
        summary = {"scenario": spec.scenario, "rows": len(rows),
                   "parameters": encode_params(resolve(spec))}
        return ScenarioResult(summary, rows=rows)
    ev = evaluate(resolve(spec))
    return ScenarioResult(ev.summary(), grid=ev.distribution.probs)


# -- analytic versus oracle ---------------------------------------------------------

@dataclass(frozen=True)
class DiffReport:
    checks: dict
    max_discrepancy: float
    herald_discrepancy: Optional[float]
    tolerance: float
    herald_tolerance: float

    @property
    def passed(self) -> bool:
        ok = self.max_discrepancy <= self.tolerance
        if self.herald_discrepancy is not None:
            ok = ok and self.herald_discrepancy <= self.herald_tolerance
        return ok

    def as_dict(self) -> dict:
        return {"checks": self.checks, "max_discrepancy": self.max_discrepancy,
                "herald_discrepancy": self.herald_discrepancy, "tolerance": self.tolerance,
                "herald_tolerance": self.herald_tolerance, "passed": self.passed}


def aligned_discrepancy(a: np.ndarray, b: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    """Max elementwise ``|a - e^{i phi} b|`` after normalizing both grids.

    ``phi`` matches the phases at the largest-magnitude entry of ``a``;
    ``mask`` restricts the comparison to entries both sides represent
    faithfully.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if mask is not None:
        a = np.where(mask, a, 0)
        b = np.where(mask, b, 0)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    k = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(b[k]) == 0:
        return float(np.max(np.abs(a - b)))
    phase = a[k] / abs(a[k]) * abs(b[k]) / b[k]
    return float(np.max(np.abs(a - phase * b)))


def _pad(grid: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    out[: grid.shape[0], : grid.shape[1]] = grid
    return out


AnalyticOverrides = dict


def run_diff(spec: ScenarioSpec, tolerance: float = 1e-9, herald_tolerance: float = 1e-8,
             overrides: Optional[AnalyticOverrides] = None) -> DiffReport:
    """Compare the closed-form grids against the circuit oracle for one scenario.

    ``overrides`` maps analytic function names to replacements; the test
    suite uses it to check that a corrupted formula is caught.
    """
    f = dict(heralded_grid=analytic.heralded_grid,
             displaced_photon_grid=analytic.displaced_photon_grid,
             coherent_output_grid=analytic.coherent_output_grid,
             entangled_output_grid=analytic.entangled_output_grid)
    f.update(overrides or {})
    p = resolve(spec)
    if p.get("loss"):
        raise SpecError("diff compares lossless grids; drop --loss")
    kind = p["kind"]
    checks = {}
    herald = None
    if kind == "displaced":
        psi = oracle.simulate_displaced_photon(p["alpha"], p["dim"])
        d = psi.dims[0]
        n = np.arange(d)
        # output sector n+m carries the coherent component n+m-1 < dim
        mask = (n[:, None] + n[None, :]) <= p["dim"]
        checks["displaced_photon"] = aligned_discrepancy(
            f["displaced_photon_grid"](p["alpha"], d), psi.coeffs, mask)
    elif kind in CIRCUIT_KINDS:
        cfg = circuit_config(p)
        amps = oracle.heralded_amplitudes(cfg)
        d = amps.shape[0]
        prob = float(np.sum(np.abs(amps) ** 2))
        if kind == "tmsv":
            grid = f["entangled_output_grid"](cfg.input_ab.coeffs, cfg.bs, d)
            checks["entangled_output"] = aligned_discrepancy(grid, amps)
        else:
            ca, cb = cfg.input_a.coeffs, cfg.input_b.coeffs
            grid = f["heralded_grid"](ca, cb, cfg.bs, d)
            checks["heralded"] = aligned_discrepancy(grid, amps)
            if kind == "coherent" and abs(p["alpha"] - p["beta"]) < 1e-15:
                n = np.arange(d)
                block = (n[:, None] <= p["dim"] - 2) & (n[None, :] <= p["dim"] - 2)
                checks["coherent_output"] = aligned_discrepancy(
                    f["coherent_output_grid"](p["alpha"], cfg.bs, d), amps, block)
        herald = abs(float(np.sum(np.abs(grid) ** 2)) - prob)
    else:
        raise SpecError(f"{p['scenario']} has no analytic counterpart to diff against")
    return DiffReport(checks, max(checks.values()), herald, tolerance, herald_tolerance)


# -- serialization helpers ------------------------------------------------------------

def _encode(v):
    if isinstance(v, LossPoint):
        return v.value
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return {"re": v.real, "im": v.imag}
    if isinstance(v, np.generic):
        return v.item()
    return v


COMPLEX_PARAMS = ("alpha", "beta", "lam", "lam_b")


def encode_params(p: dict) -> dict:
    return {k: _encode(complex(v) if k in COMPLEX_PARAMS else v) for k, v in sorted(p.items())}
