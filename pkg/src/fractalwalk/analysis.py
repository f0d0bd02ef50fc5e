"""Scaling fits, regime-transition detection, and length calibration.

Detection routines return None for "not found"; exceptions are reserved
for malformed inputs.  Default thresholds (event mass epsilon = 0.02,
plateau delta = 0.002, exponent band 0.15) are deliberate knobs: the
phenomena they mark have no sharp definition, so every one of them is
exposed on the CLI and sweepable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .errors import DomainError, ShapeError
from .evolution import ProbabilitySeries
from .lattice import Lattice, fractal_meta, landmark_sites
from .observables import ObservableTable, build_observable_table

DEFAULT_EPSILON = 0.02
DEFAULT_BAND = 0.15
DEFAULT_DELTA = 0.002
DEFAULT_MIN_SPAN = 5
DEFAULT_SLOPE_WINDOW = 11

#: fits ignore this many leading grid points (log of tiny variance is noise)
FIT_SKIP_INITIAL = 2

#: variance level that must be crossed before the normal-regime fit starts
NORMAL_FIT_FLOOR = 0.05

#: sustained windows required for the fractal-onset criterion
ONSET_RUN = 5

#: saturation: relative variance growth per unit tau must stay below this
SATURATION_GROWTH = 0.01

#: tau width of each averaging window used by saturation detection; must
#: straddle the slow post-saturation swing (period ~6 tau on the gasket)
#: or the swing itself reads as growth
SATURATION_WINDOW_TAU = 8.0

#: oscillation: trough prominence as a fraction of the saturation level
OSCILLATION_PROMINENCE = 0.005


@dataclass(frozen=True)
class SlopeCurve:
    """Sliding-window log-log slope estimates.

    ``tau`` holds window centres, ``exponent`` the fitted local exponents.
    ``skipped`` lists centre indices of windows dropped because they
    contained a nonpositive time or value.
    """

    tau: np.ndarray
    exponent: np.ndarray
    skipped: tuple[int, ...] = ()

    def __post_init__(self):
        self.tau.setflags(write=False)
        self.exponent.setflags(write=False)


@dataclass(frozen=True)
class ScalingFit:
    tau_lo: float
    tau_hi: float
    exponent: float
    intercept: float
    r_squared: float
    n_samples: int


@dataclass(frozen=True)
class RegimeReport:
    """Event times, scaling fits, and plateau/saturation findings of one run."""

    kind: str
    input_site: int
    first_void_tau: float | None
    l_f_tau: float | None
    farthest_tau: float | None
    saturation_tau: float | None
    normal_fit: ScalingFit | None
    fractal_fit: ScalingFit | None
    plateaus: tuple[tuple[float, float], ...]
    oscillation_detected: bool
    slope_curve: SlopeCurve
    probe_length_a: float
    farthest_distance: float
    epsilon: float = DEFAULT_EPSILON
    slope_window: int = DEFAULT_SLOPE_WINDOW

    def event_taus(self) -> dict[str, float]:
        """Present events by name, for calibration and reporting."""
        out = {}
        for name, value in (
            ("first_void", self.first_void_tau),
            ("l_f", self.l_f_tau),
            ("farthest", self.farthest_tau),
            ("saturation", self.saturation_tau),
        ):
            if value is not None:
                out[name] = float(value)
        return out


@dataclass(frozen=True)
class CalibrationConfig:
    """Anchor one detected event to a physical propagation length in mm."""

    anchor_event: str          # "first_void" or "farthest"
    anchor_mm: float

    def __post_init__(self):
        if self.anchor_event not in ("first_void", "farthest"):
            raise DomainError(
                f"anchor_event must be 'first_void' or 'farthest', got {self.anchor_event!r}"
            )
        if not self.anchor_mm > 0:
            raise DomainError(f"anchor_mm must be positive, got {self.anchor_mm}")


@dataclass(frozen=True)
class CalibrationResult:
    anchor_event: str
    anchor_mm: float
    anchor_tau: float
    scale_s: float                         # mm per unit tau
    events_mm: dict[str, float] = field(default_factory=dict)

    def to_mm(self, tau: float) -> float:
        return self.scale_s * tau


# ---------------------------------------------------------------------------
# slope estimation and power-law fits


def loglog_slope(times, values, window: int = DEFAULT_SLOPE_WINDOW) -> SlopeCurve:
    """Local power-law exponents by sliding least squares in log-log space.

    Each window of ``window`` consecutive samples yields one
    (tau_center, exponent) pair; windows containing a nonpositive time or
    value are skipped and flagged.  Exact on pure power laws to 1e-9.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.shape != values.shape or times.ndim != 1:
        raise ShapeError(f"times {times.shape} and values {values.shape} must match, 1-d")
    if window < 5 or window % 2 == 0:
        raise DomainError(f"window must be an odd integer >= 5, got {window}")
    if times.size < window:
        raise DomainError(f"need at least {window} samples, got {times.size}")

    half = window // 2
    centers = []
    slopes = []
    skipped = []
    for start in range(times.size - window + 1):
        center = start + half
        t = times[start:start + window]
        v = values[start:start + window]
        if t.min() <= 0.0 or v.min() <= 0.0:
            skipped.append(center)
            continue
        lt = np.log(t)
        lv = np.log(v)
        lt_c = lt - lt.mean()
        slope = float(np.dot(lt_c, lv) / np.dot(lt_c, lt_c))
        centers.append(times[center])
        slopes.append(slope)
    return SlopeCurve(
        tau=np.asarray(centers), exponent=np.asarray(slopes), skipped=tuple(skipped)
    )


def fit_powerlaw(times, values, tau_lo: float, tau_hi: float,
                 skip_initial: int = FIT_SKIP_INITIAL) -> ScalingFit | None:
    """Least-squares power-law fit of values against times over a tau window.

    The first ``skip_initial`` grid points are excluded regardless of the
    window.  Returns None when fewer than 5 usable samples remain.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    mask = (times >= tau_lo) & (times <= tau_hi) & (times > 0.0) & (values > 0.0)
    mask[:skip_initial] = False
    if int(mask.sum()) < 5:
        return None
    lt = np.log(times[mask])
    lv = np.log(values[mask])
    slope, intercept = np.polyfit(lt, lv, 1)
    fitted = slope * lt + intercept
    ss_res = float(((lv - fitted) ** 2).sum())
    ss_tot = float(((lv - lv.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return ScalingFit(
        tau_lo=float(times[mask].min()),
        tau_hi=float(times[mask].max()),
        exponent=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        n_samples=int(mask.sum()),
    )


# ---------------------------------------------------------------------------
# event detection


def detect_event(series: ProbabilitySeries, landmark_set, epsilon: float = DEFAULT_EPSILON):
    """Earliest grid tau with total probability >= epsilon on a site set.

    Returns None when the threshold is never reached on the grid.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    ids = np.asarray(sorted(landmark_set), dtype=np.int64)
    if ids.size == 0:
        raise DomainError("landmark set is empty")
    if ids.min() < 0 or ids.max() >= series.n_sites:
        raise ShapeError(f"landmark ids outside 0..{series.n_sites - 1}")
    mass = series.probabilities[:, ids].sum(axis=1)
    hits = np.flatnonzero(mass >= epsilon)
    return float(series.times[hits[0]]) if hits.size else None


def detect_fractal_onset(slope_curve: SlopeCurve, d_f: float, band: float = DEFAULT_BAND,
                         after_tau: float = 0.0, run: int = ONSET_RUN):
    """Earliest window centre after ``after_tau`` where the local exponent
    enters d_f +- band and stays there for ``run`` consecutive windows.

    Returns the entry tau, or None without a sustained entry.
    """
    if not band > 0:
        raise DomainError(f"band must be positive, got {band}")
    tau = slope_curve.tau
    inside = np.abs(slope_curve.exponent - d_f) <= band
    eligible = tau > after_tau
    n = tau.size
    for i in range(n - run + 1):
        if eligible[i] and inside[i:i + run].all():
            return float(tau[i])
    return None


def detect_plateaus(polya_curve, delta: float = DEFAULT_DELTA,
                    min_span: int = DEFAULT_MIN_SPAN, times=None):
    """Greedy maximal flat stretches of a curve: max - min <= delta.

    Scans left to right, extending each stretch as far as possible; kept
    stretches span at least ``min_span`` samples.  Returns a list of
    (start, end) pairs in tau when ``times`` is given, else index pairs
    (inclusive).
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if min_span < 2:
        raise DomainError(f"min_span must be at least 2, got {min_span}")
    p = np.asarray(polya_curve, dtype=np.float64)
    spans = []
    i = 0
    n = p.size
    while i < n:
        lo = hi = p[i]
        j = i
        while j + 1 < n:
            lo2 = min(lo, p[j + 1])
            hi2 = max(hi, p[j + 1])
            if hi2 - lo2 > delta:
                break
            lo, hi = lo2, hi2
            j += 1
        if j - i + 1 >= min_span:
            spans.append((i, j))
            i = j + 1
        else:
            i += 1
    if times is None:
        return spans
    times = np.asarray(times, dtype=np.float64)
    return [(float(times[a]), float(times[b])) for a, b in spans]


def detect_saturation_and_oscillation(times, variance, farthest_tau,
                                      growth_limit: float = SATURATION_GROWTH,
                                      window_tau: float = SATURATION_WINDOW_TAU,
                                      prominence: float = OSCILLATION_PROMINENCE):
    """Variance saturation after the farthest-site event, plus oscillation.

    At each candidate tau the variance is averaged over the ``window_tau``
    stretch before and after it; the relative growth between the two means,
    per unit tau, must stay below ``growth_limit`` from the saturation
    point onward.  Saturation is the earliest such tau at or after
    ``farthest_tau``.  Averaging (rather than pointwise rates) keeps the
    post-saturation oscillation itself from counting as growth.

    Oscillation requires at least two local maxima of the raw curve after
    saturation with prominence at least ``prominence`` of the mean
    saturated level.  Returns (saturation_tau or None, bool); a None
    ``farthest_tau`` short-circuits to (None, False).  Assumes a uniform
    time grid.
    """
    if farthest_tau is None:
        return None, False
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(variance, dtype=np.float64)
    if t.shape != v.shape or t.ndim != 1:
        raise ShapeError(f"times {t.shape} and variance {v.shape} must match, 1-d")
    n = t.size
    if n < 3:
        return None, False
    dt = (t[-1] - t[0]) / (n - 1)
    w = max(1, int(round(window_tau / dt)))
    if 2 * w >= n:
        return None, False

    csum = np.concatenate(([0.0], np.cumsum(v)))
    before = (csum[w:n - w + 1] - csum[:n - 2 * w + 1]) / w
    after = (csum[2 * w:] - csum[w:n - w + 1]) / w
    rates = (after - before) / (np.maximum(before, 1e-300) * (w * dt))
    centers = t[w:w + rates.size]
    # ok[i]: every window pair from i onward stays below the limit
    bad = rates >= growth_limit
    ok = ~np.flip(np.maximum.accumulate(np.flip(bad)))
    hits = np.flatnonzero(ok & (centers >= farthest_tau))
    if hits.size == 0:
        return None, False
    sat_tau = float(centers[hits[0]])

    tail = v[t >= sat_tau]
    level = float(tail.mean())
    if tail.size < 3 or level <= 0:
        return sat_tau, False
    peaks, _ = find_peaks(tail, prominence=prominence * level)
    return sat_tau, bool(peaks.size >= 2)


def calibrate_length(report: RegimeReport, config: CalibrationConfig):
    """Map dimensionless event times to physical mm via one anchored event.

    scale_s = anchor_mm / anchor_event_tau; every other detected event is
    converted to a mm prediction.  Returns None when the anchor event was
    not detected (not-found propagation).
    """
    events = report.event_taus()
    anchor_tau = events.get(config.anchor_event)
    if anchor_tau is None or anchor_tau <= 0.0:
        return None
    scale = config.anchor_mm / anchor_tau
    return CalibrationResult(
        anchor_event=config.anchor_event,
        anchor_mm=float(config.anchor_mm),
        anchor_tau=float(anchor_tau),
        scale_s=float(scale),
        events_mm={name: float(scale * tau) for name, tau in events.items()},
    )


# ---------------------------------------------------------------------------
# end-to-end regime analysis


def build_regime_report(lattice: Lattice, series: ProbabilitySeries,
                        table: ObservableTable | None = None,
                        epsilon: float = DEFAULT_EPSILON,
                        slope_window: int = DEFAULT_SLOPE_WINDOW,
                        band: float = DEFAULT_BAND,
                        delta: float = DEFAULT_DELTA,
                        min_span: int = DEFAULT_MIN_SPAN) -> RegimeReport:
    """Run the full regime analysis for one fractal evolution.

    Computes observables, detects the first-void / fractal-onset /
    farthest-site / saturation events, fits the normal and fractal
    scaling windows, and collects Polya plateaus.  Requires a fractal
    lattice (landmarks are void-based).
    """
    marks = landmark_sites(lattice, series.input_site)
    if table is None:
        table = build_observable_table(series, lattice)
    meta = fractal_meta(lattice.kind)
    slope_curve = loglog_slope(table.times, table.variance, window=slope_window)

    first_void_tau = detect_event(series, marks.first_void_boundary, epsilon)
    farthest_tau = detect_event(series, marks.farthest_set, epsilon)
    l_f_tau = None
    if first_void_tau is not None:
        l_f_tau = detect_fractal_onset(
            slope_curve, meta.fractal_dimension, band=band, after_tau=first_void_tau
        )

    normal_fit = None
    if first_void_tau is not None:
        crossed = np.flatnonzero(table.variance > NORMAL_FIT_FLOOR)
        if crossed.size:
            lo = float(table.times[crossed[0]])
            if lo < first_void_tau:
                normal_fit = fit_powerlaw(table.times, table.variance, lo, first_void_tau)

    fractal_fit = None
    if l_f_tau is not None:
        hi = farthest_tau if farthest_tau is not None else float(table.times[-1])
        fractal_fit = fit_powerlaw(table.times, table.variance, l_f_tau, hi)

    saturation_tau, oscillation = detect_saturation_and_oscillation(
        table.times, table.variance, farthest_tau
    )
    plateaus = detect_plateaus(table.polya, delta=delta, min_span=min_span,
                               times=table.times)

    return RegimeReport(
        kind=lattice.kind.value,
        input_site=series.input_site,
        first_void_tau=first_void_tau,
        l_f_tau=l_f_tau,
        farthest_tau=farthest_tau,
        saturation_tau=saturation_tau,
        normal_fit=normal_fit,
        fractal_fit=fractal_fit,
        plateaus=tuple(plateaus),
        oscillation_detected=oscillation,
        slope_curve=slope_curve,
        probe_length_a=marks.probe_length_a,
        farthest_distance=marks.farthest_distance,
        epsilon=epsilon,
        slope_window=slope_window,
    )
