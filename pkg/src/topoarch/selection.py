"""Topological architecture selection: fit the width phase model from sweep
records and recommend minimal first-layer widths from a dataset's thresholded
persistent homology."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .data import LabeledPointCloud
from .errors import InsufficientDataError, InvalidParameterError
from .persistence import BettiProfile, ThresholdPolicy, compute_persistence, threshold_features
from .rips import build_rips

PHASE_FIXTURE = "phase_model.json"
DEFAULT_INTERCEPT = 2.0


@dataclass(frozen=True)
class PhaseEstimator:
    """Width lower-bound model: h_phase(b0, b1) >= b1 * C * b0**(1/ell) + intercept."""

    C: float
    intercept: float = DEFAULT_INTERCEPT
    ell: int = 1
    low_confidence: bool = False
    source: str = ""

    def __post_init__(self):
        if self.C <= 0:
            raise InvalidParameterError(f"C must be positive, got {self.C}")
        if self.ell < 1:
            raise InvalidParameterError(f"ell must be >= 1, got {self.ell}")

    def feature(self, beta0: int, beta1: int) -> float:
        return beta1 * self.C * beta0 ** (1.0 / self.ell)

    def width_floor(self, beta0: int) -> float:
        """Component-count floor on the width: C * beta0**(1/ell)."""
        return self.C * beta0 ** (1.0 / self.ell)


def estimate_h_phase(est: PhaseEstimator, beta0: int, beta1: int) -> int:
    """Ceiling of the phase formula, at least 1."""
    if beta0 < 1 or beta1 < 0:
        raise InvalidParameterError(f"need beta0 >= 1, beta1 >= 0, got ({beta0}, {beta1})")
    return max(1, math.ceil(est.feature(beta0, beta1) + est.intercept))


def minimal_expressive_widths(records):
    """Per homology cell, the smallest h0 whose trained region reached full
    expressivity (E >= 1 in dimensions 0 and 1) in at least one trial."""
    cells = {}
    for r in records:
        if r.e_h0 is None or r.e_h1 is None:
            continue
        if r.e_h0 >= 1.0 and r.e_h1 >= 1.0:
            key = (r.beta0_data, r.beta1_data)
            cells[key] = min(cells.get(key, np.inf), r.h0)
    return {k: int(v) for k, v in cells.items() if np.isfinite(v)}


def fit_phase_model(records, ell: int = 1, intercept: float = DEFAULT_INTERCEPT) -> PhaseEstimator:
    """Least-squares fit of the minimal fully-expressive width against the
    feature b1 * b0**(1/ell) with the intercept held fixed."""
    m_star = minimal_expressive_widths(records)
    if not m_star:
        raise InsufficientDataError("no homology cell has a fully-expressive architecture")
    xs, ys = [], []
    for (b0, b1), m in sorted(m_star.items()):
        x = b1 * b0 ** (1.0 / ell)
        if x > 0:
            xs.append(x)
            ys.append(m - intercept)
    if not xs:
        raise InsufficientDataError(
            "all fully-expressive cells have beta1 = 0; the slope is unconstrained")
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    c = float(xs @ ys / (xs @ xs))
    c = max(c, 1e-9)
    est = PhaseEstimator(C=c, intercept=intercept, ell=ell,
                         low_confidence=len(xs) < 2, source="fit")
    residuals = {f"{b0},{b1}": m - (est.feature(b0, b1) + intercept)
                 for (b0, b1), m in sorted(m_star.items())}
    object.__setattr__(est, "_residuals", residuals)
    object.__setattr__(est, "_m_star", {f"{b0},{b1}": m for (b0, b1), m in sorted(m_star.items())})
    return est


def fit_affine_phase_model(records):
    """Comparison-only alternative: unconstrained affine fit
    m* ~ a*beta0 + b*beta1 + c."""
    m_star = minimal_expressive_widths(records)
    if len(m_star) < 3:
        raise InsufficientDataError("affine fit needs at least 3 homology cells")
    a = np.array([[b0, b1, 1.0] for (b0, b1) in sorted(m_star)])
    y = np.array([m_star[k] for k in sorted(m_star)])
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    return {"beta0": float(coef[0]), "beta1": float(coef[1]),
            "intercept": float(coef[2]), "rms_residual": float(np.sqrt(np.mean(resid**2)))}


def load_phase_fixture():
    """The repository's fitted phase model (produced by the replication
    sweep script and shipped as package data)."""
    with resources.files("topoarch.fixtures").joinpath(PHASE_FIXTURE).open() as fh:
        return json.load(fh)


def default_estimators(depths=(1, 2, 3, 4)):
    """Estimators for each depth, reusing the depth-1 fitted coefficient
    inside the ell-th-root form."""
    fx = load_phase_fixture()
    c = float(fx["C"])
    return [PhaseEstimator(C=c, intercept=float(fx.get("intercept", DEFAULT_INTERCEPT)),
                           ell=ell, source=f"fixture:{fx.get('version', '?')}")
            for ell in depths]


@dataclass
class SelectionReport:
    class_profiles: dict                # label -> BettiProfile tuple
    combined_profile: tuple
    policy: dict
    cutoffs: dict                       # label -> {dim: cutoff}
    recommendations: dict               # ell -> h_phase estimate
    floors: dict                        # ell -> width floor (Eq-1-style)
    estimator_coefficients: dict
    eps_max: float
    subsample: int
    warnings: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def to_json_obj(self):
        return {
            "schema": 1,
            "class_profiles": {str(k): list(v) for k, v in self.class_profiles.items()},
            "combined_profile": list(self.combined_profile),
            "policy": self.policy,
            "cutoffs": {str(k): {str(p): c for p, c in v.items()} for k, v in self.cutoffs.items()},
            "recommendations": {str(k): v for k, v in self.recommendations.items()},
            "floors": {str(k): v for k, v in self.floors.items()},
            "estimator_coefficients": self.estimator_coefficients,
            "eps_max": self.eps_max,
            "subsample": self.subsample,
            "warnings": self.warnings,
            "provenance": self.provenance,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_json_obj(), indent=indent, sort_keys=True)

    def to_text(self):
        lines = ["topological architecture selection"]
        lines.append(f"  scale eps_max: {self.eps_max}")
        for label, prof in sorted(self.class_profiles.items()):
            lines.append(f"  class {label}: profile {tuple(prof)}")
        b0, b1 = self.combined_profile[0], self.combined_profile[1]
        lines.append(f"  combined profile: (b0={b0}, b1={b1})")
        lines.append(f"  policy: {self.policy}")
        for ell in sorted(self.recommendations):
            lines.append(
                f"  depth {ell}: h_phase >= {self.recommendations[ell]}"
                f" (component floor {self.floors[ell]:.2f})")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        return "\n".join(lines) + "\n"


def select(cloud: LabeledPointCloud, eps_max: float, policy: ThresholdPolicy = None,
           estimators=None, max_dim: int = 2, subsample: int = 1000,
           seed: int = 0, keep_diagrams: bool = False) -> SelectionReport:
    """Per-class persistence -> thresholded profiles -> class-wise maximum ->
    width recommendations per depth. Deterministic given inputs."""
    if cloud.n < 2:
        raise InvalidParameterError("need at least two points")
    if estimators is None:
        estimators = default_estimators()

    class_profiles = {}
    cutoffs = {}
    diagrams = {}
    warns = []
    for label in (0, 1):
        pts = cloud.class_points(label)
        if pts.shape[0] == 0:
            class_profiles[label] = BettiProfile((0,))
            continue
        if subsample and pts.shape[0] > subsample:
            idx = np.sort(np.random.default_rng(seed).choice(pts.shape[0], subsample, replace=False))
            pts = pts[idx]
        cx = build_rips(pts, eps_max=eps_max, max_dim=max_dim)
        diagram = compute_persistence(cx)
        profile = threshold_features(diagram, policy)
        n_finite_kept = sum(profile.as_tuple()) - diagram.n_essential(0)
        if n_finite_kept <= 0 and len(diagram) > diagram.n_essential(0):
            msg = f"threshold discarded every finite feature for class {label}"
            warnings.warn(msg)
            warns.append(msg)
        class_profiles[label] = profile
        cutoffs[label] = profile.cutoffs
        if keep_diagrams:
            diagrams[label] = diagram

    b0 = max(p[0] for p in class_profiles.values())
    b1 = max(p[1] for p in class_profiles.values())
    combined = (max(b0, 1), b1)

    recommendations = {}
    floors = {}
    coeffs = {}
    for est in estimators:
        recommendations[est.ell] = estimate_h_phase(est, combined[0], combined[1])
        floors[est.ell] = est.width_floor(combined[0])
        coeffs[est.ell] = {"C": est.C, "intercept": est.intercept, "source": est.source}

    report = SelectionReport(
        class_profiles={k: v.as_tuple() for k, v in class_profiles.items()},
        combined_profile=combined,
        policy=(policy or ThresholdPolicy()).describe(),
        cutoffs=cutoffs,
        recommendations=recommendations,
        floors=floors,
        estimator_coefficients=coeffs,
        eps_max=float(eps_max),
        subsample=int(subsample),
        warnings=warns,
    )
    if keep_diagrams:
        report.provenance["diagrams"] = {str(k): v.to_json_obj() for k, v in diagrams.items()}
    return report
