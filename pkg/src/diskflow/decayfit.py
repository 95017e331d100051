"""Log-log decay-rate fitting and the theorem-level verdict suites.

A fit is an ordinary least-squares slope of log(value) against log(t)
inside a stated window.  Windows must hold at least 20 samples and span
at least half a decade; fits that touch times past the grid's trust
horizon R^2/16 carry a truncation flag and are excluded from acceptance
gates by the callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class DecayReport:
    quantity: str
    fitted_exponent: float
    target_exponent: float | None
    window: tuple
    residual: float  # RMS of the log-log fit
    truncation_flag: bool
    n_points: int
    passed: bool | None = None
    tolerance: float | None = None


def fit_decay(
    t,
    values,
    window,
    trust_horizon=None,
    quantity: str = "",
    target: float | None = None,
    tolerance: float | None = None,
) -> DecayReport:
    """Least-squares slope of log(values) vs log(t) on the window."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    if np.any(values[mask] <= 0.0):
        raise FitError("nonpositive values inside the fit window")
    if np.count_nonzero(mask) < 20:
        raise FitError(f"need >= 20 samples in window, have {np.count_nonzero(mask)}")
    tw, yw = t[mask], values[mask]
    if np.log10(tw.max() / tw.min()) < 0.5:
        raise FitError("window spans less than half a decade")
    lt, ly = np.log(tw), np.log(yw)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lt + intercept)) ** 2)))
    truncated = bool(trust_horizon is not None and hi > trust_horizon)
    passed = None
    if target is not None and tolerance is not None:
        passed = bool(abs(slope - target) <= tolerance) and not truncated
    return DecayReport(
        quantity=quantity,
        fitted_exponent=float(slope),
        target_exponent=target,
        window=(float(lo), float(hi)),
        residual=resid,
        truncation_flag=truncated,
        n_points=int(np.count_nonzero(mask)),
        passed=passed,
        tolerance=tolerance,
    )


def theorem_main3_suite(
    t, norms_by_p, ell, q, window, trust_horizon, tolerance=0.15
):
    """Decay verdicts for the finite-energy theorem at exponent q.

    ``norms_by_p`` maps p to the ||v(t)||_p series.  Targets: the norm
    slope is -(1/q - 1/p), the |ell| slope is -1/q.
    """
    reports = []
    for p, series in sorted(norms_by_p.items()):
        target = -(1.0 / q - 1.0 / p)
        reports.append(
            fit_decay(
                t, series, window, trust_horizon,
                quantity=f"v_L{p:g}", target=target, tolerance=tolerance,
            )
        )
    ell = np.asarray(ell, dtype=float)
    mask = ell > 0
    reports.append(
        fit_decay(
            np.asarray(t)[mask], ell[mask], window, trust_horizon,
            quantity="ell", target=-1.0 / q, tolerance=tolerance,
        )
    )
    return reports


def oseen_stability_suite(
    t, remainder_by_p, ell, q, t0, window, trust_horizon, margin=0.02
):
    """Verdicts for vortex stability: limit-zero remainders QUALIFY by a
    strictly negative slope of t^{1/2-1/p} ||v - alpha Theta||_p, and the
    weighted body speed (t-t0)^{1/q} |ell| must not grow."""
    t = np.asarray(t, dtype=float)
    reports = []
    for p, series in sorted(remainder_by_p.items()):
        weighted = np.asarray(series) * t ** (0.5 - 1.0 / p)
        rep = fit_decay(
            t, weighted, window, trust_horizon,
            quantity=f"weighted_remainder_L{p:g}",
        )
        reports.append(
            DecayReport(
                quantity=rep.quantity,
                fitted_exponent=rep.fitted_exponent,
                target_exponent=0.0,
                window=rep.window,
                residual=rep.residual,
                truncation_flag=rep.truncation_flag,
                n_points=rep.n_points,
                passed=bool(rep.fitted_exponent < -margin) and not rep.truncation_flag,
                tolerance=margin,
            )
        )
    ell = np.asarray(ell, dtype=float)
    mask = (ell > 0) & (t > t0)
    weighted = ell[mask] * (t[mask] - t0) ** (1.0 / q)
    shifted = t[mask] - t0
    rep = fit_decay(shifted, weighted, window, trust_horizon, quantity="weighted_ell")
    reports.append(
        DecayReport(
            quantity=rep.quantity,
            fitted_exponent=rep.fitted_exponent,
            target_exponent=0.0,
            window=rep.window,
            residual=rep.residual,
            truncation_flag=rep.truncation_flag,
            n_points=rep.n_points,
            passed=bool(rep.fitted_exponent <= 0.05) and not rep.truncation_flag,
            tolerance=0.05,
        )
    )
    return reports


def verdict_rows(reports):
    """Flatten reports into CSV-ready rows."""
    rows = []
    for r in reports:
        rows.append({
            "quantity": r.quantity,
            "fitted": r.fitted_exponent,
            "target": r.target_exponent if r.target_exponent is not None else "",
            "window_lo": r.window[0],
            "window_hi": r.window[1],
            "residual": r.residual,
            "truncated": int(r.truncation_flag),
            "passed": "" if r.passed is None else int(r.passed),
        })
    return rows
