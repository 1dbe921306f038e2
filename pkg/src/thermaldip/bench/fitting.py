"""Gaussian dip fits: ``baseline * (1 - c * exp(-((x - center)/width)^2))``."""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from ..errors import FitError, InvalidInputError

__all__ = ["FitResult", "fit_dip", "dip_model"]


@dataclass(frozen=True)
class FitResult:
    """Fitted dip parameters.

    ``contrast`` is clipped to [0, 1] and forced to 0 when the dip is not
    significant (|c| < 3 sigma); ``contrast_raw`` keeps the signed estimate.
    """

    baseline: float
    depth: float
    center: float
    width: float
    contrast: float
    residual_rms: float
    contrast_raw: float
    contrast_stderr: float
    width_stderr: float
    width_reliable: bool
    chi2_red: float | None = None


def dip_model(x, baseline, contrast, center, width):
    return baseline * (1.0 - contrast * np.exp(-(((x - center) / width) ** 2)))


def _initial(x, y):
    n = x.size
    edge = max(1, n // 5)
    base = float(np.median(np.concatenate([y[:edge], y[-edge:]])))
    k = int(np.argmin(y))
    depth = base - float(y[k])
    half = base - 0.5 * depth
    below = np.count_nonzero(y < half)
    step = (x[-1] - x[0]) / max(n - 1, 1)
    fwhm = max(below, 1) * step
    return base, depth / base if base else 0.0, x[k], fwhm / (2.0 * math.sqrt(math.log(2.0)))


def fit_dip(result, fixed_center=None, fixed_width=None, significance=3.0):
    """Least-squares dip fit of a :class:`ScanResult` joint curve.

    Uses the per-point ``stderr`` as weights when any is positive.  With
    ``fixed_center`` and ``fixed_width`` given the model is linear in
    (baseline, baseline*c) and is solved directly; that is the robust way to
    bound the contrast of a flat curve.

    Raises
    ------
    InvalidInputError
        Fewer than 7 points.
    FitError
        The nonlinear fit did not converge on data that does show a dip.
    """
    x = np.asarray(result.grid, dtype=float)
    y = np.asarray(result.joint, dtype=float)
    err = np.asarray(result.stderr, dtype=float)
    if x.size < 7:
        raise InvalidInputError(f"need at least 7 points to fit a dip, got {x.size}")
    sigma = err if np.all(err > 0) else None
    scale = (x[-1] - x[0]) / 10.0 or 1.0
    xs = x / scale

    if fixed_center is not None and fixed_width is not None:
        return _linear_fit(x, y, sigma, fixed_center, fixed_width, significance)

    p0 = list(_initial(xs, y))
    p0[3] = max(p0[3], 1e-3)
    lower = [0.0, -1.0, xs[0], 1e-6]
    upper = [np.inf, 1.0, xs[-1], 10.0 * (xs[-1] - xs[0])]
    if fixed_center is not None:
        lower[2] = fixed_center / scale - 1e-12
        upper[2] = fixed_center / scale + 1e-12
        p0[2] = fixed_center / scale
    if fixed_width is not None:
        lower[3] = fixed_width / scale * (1 - 1e-12)
        upper[3] = fixed_width / scale * (1 + 1e-12)
        p0[3] = fixed_width / scale
    p0 = np.clip(p0, lower, upper)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, pcov = curve_fit(
                dip_model, xs, y, p0=p0, sigma=sigma, absolute_sigma=sigma is not None,
                bounds=(lower, upper), maxfev=20000,
            )
    except (RuntimeError, ValueError) as exc:
        flat = np.ptp(y) <= 6.0 * (np.median(err) if sigma is not None else 0.0)
        if flat:
            return _flat_result(x, y, sigma, significance)
        raise FitError(f"dip fit did not converge: {exc}", {"p0": list(p0), "y": y.tolist()}) from None
    perr = np.sqrt(np.abs(np.diag(pcov))) if np.all(np.isfinite(pcov)) else np.full(4, np.inf)
    resid = y - dip_model(xs, *popt)
    baseline, c, center, width = popt
    return _assemble(x, resid, sigma, baseline, c, perr[1], center * scale, width * scale, perr[3] * scale, significance)


def _assemble(x, resid, sigma, baseline, c, c_err, center, width, width_err, significance):
    significant = c > 0 and (not math.isfinite(c_err) or abs(c) >= significance * c_err)
    span = x[-1] - x[0]
    reliable = bool(significant and span >= 4.0 * width and math.isfinite(width_err))
    contrast = min(max(c, 0.0), 1.0) if significant else 0.0
    chi2 = None
    if sigma is not None:
        chi2 = float(np.sum((resid / sigma) ** 2) / max(x.size - 4, 1))
    return FitResult(
        baseline=float(baseline),
        depth=float(baseline * contrast),
        center=float(center),
        width=float(width),
        contrast=float(contrast),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        contrast_raw=float(c),
        contrast_stderr=float(c_err),
        width_stderr=float(width_err),
        width_reliable=reliable,
        chi2_red=chi2,
    )


def _linear_fit(x, y, sigma, center, width, significance):
    g = np.exp(-(((x - center) / width) ** 2))
    design = np.column_stack([np.ones_like(x), -g])
    w = np.ones_like(y) if sigma is None else 1.0 / sigma
    coef, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    cov = np.linalg.inv((design * w[:, None]).T @ (design * w[:, None]))
    resid = y - design @ coef
    if sigma is None:
        dof = max(x.size - 2, 1)
        cov = cov * float(np.sum(resid**2) / dof)
    baseline, amp = coef
    # c = amp / baseline; first-order error propagation
    c = amp / baseline
    grad = np.array([-amp / baseline**2, 1.0 / baseline])
    c_err = float(np.sqrt(grad @ cov @ grad))
    return _assemble(x, resid, sigma, baseline, c, c_err, center, width, 0.0, significance)


def _flat_result(x, y, sigma, significance):
    # no dip to locate: bound the contrast at the scan centre with a nominal width
    center = 0.5 * (x[0] + x[-1])
    width = (x[-1] - x[0]) / 8.0
    out = _linear_fit(x, y, sigma, center, width, significance)
    return FitResult(**{**out.__dict__, "width_reliable": False, "width_stderr": math.inf})
