"""Monte Carlo harmonic / excursion measure estimators and exact reference values.

Excursion estimates launch walks at distance ε from the source set along its
normal and count hits of the target before returning to the source or the
rest of the boundary; ``length(V) · E[1{hit}/ε]`` estimates the measure.
All reductions use exactly rounded summation, so results do not depend on
evaluation order.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .domains import Arc, BoundaryArc, Circle, Crosscut, CrosscutList, Ray, Segment, compile_geometry, extract_crosscuts
from .geometry import CircleSpec
from .stochastic import (
    PURPOSE_WALK,
    FixedStep,
    WalkOnSpheres,
    simulate_walks,
)

EXC_SHELL_REL = 1e-3  # WoS absorption shell relative to the launch offset ε
MAX_EPS_HALVINGS = 30


# ------------------------------------------------------------------ estimates


def _fsum_mean_var(x):
    x = np.asarray(x, dtype=np.float64).ravel()
    n = x.size
    if n == 0:
        return math.nan, math.nan
    m = math.fsum(x) / n
    if n < 2:
        return m, math.nan
    var = math.fsum((x - m) ** 2) / (n - 1)
    return m, var


@dataclass
class MeasureEstimate:
    mean: float
    stderr: float
    n: int
    ci95: tuple = None
    scheme: str = None
    epsilon: float = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mean = float(self.mean)
        self.stderr = float(self.stderr)
        self.n = int(self.n)
        if self.ci95 is None:
            self.ci95 = (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)
        self.ci95 = tuple(float(c) for c in self.ci95)

    @classmethod
    def from_samples(cls, samples, **kw):
        m, var = _fsum_mean_var(samples)
        n = int(np.size(samples))
        se = math.sqrt(var / n) if n > 1 else math.nan
        return cls(m, se, n, **kw)

    def within(self, value, k=3.0):
        return abs(self.mean - value) <= k * self.stderr

    def to_dict(self):
        d = asdict(self)
        d["ci95"] = list(self.ci95)
        if self.epsilon is None:
            d.pop("epsilon")
        if not self.extra:
            d.pop("extra")
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["ci95"] = tuple(d["ci95"])
        return cls(**d)


def joint_stderr(a, b):
    return math.hypot(a.stderr, b.stderr)


# ------------------------------------------------------------------ harmonic measure


def _scheme_name(scheme):
    return "FixedStep" if isinstance(scheme, FixedStep) else "WalkOnSpheres"


def _extra_targets(domain, labels):
    out = []
    if hasattr(domain, "negative_axis_target"):
        t = domain.negative_axis_target()
        if t.label in labels:
            out.append(t)
    return out


def harmonic_measure(domain, z, target_label, n, rng, scheme=None, targets=()):
    """Estimate h_D(z, V) for the boundary arc (or extra absorbing target) ``target_label``.

    ``targets`` are additional absorbing sets (e.g. a crosscut treated as a
    barrier); for :class:`RayComplement` the label ``'(-inf,0)'`` is added
    automatically.
    """
    z = complex(z)
    if not bool(np.asarray(domain.contains(np.array([z])))[0]):
        raise ValueError(f"start point {z} is not inside the domain")
    labels = list(target_label) if isinstance(target_label, (list, tuple)) else [target_label]
    targets = list(targets) + _extra_targets(domain, labels)
    geom = compile_geometry(list(domain.boundary()) + targets)
    missing = [lab for lab in labels if lab not in geom.label_names]
    if missing:
        raise ValueError(f"unknown target label(s) {missing}; known: {geom.label_names}")
    batch = simulate_walks(geom, np.full(int(n), z), rng.with_purpose(PURPOSE_WALK), scheme, domain.scale)
    hits = batch.label_mask(labels).astype(np.float64)
    return MeasureEstimate.from_samples(hits, scheme=_scheme_name(scheme))


# ------------------------------------------------------------------ set handling


def _as_pieces(obj, domain=None):
    """Primitives of an arc-like object; a string is a boundary label of ``domain``."""
    if isinstance(obj, str):
        return tuple(domain.arc(obj).pieces), obj
    if isinstance(obj, BoundaryArc):
        return tuple(obj.pieces), obj.label
    if isinstance(obj, Crosscut):
        return (obj.primitive(),), None
    if isinstance(obj, CircleSpec):
        return (Circle(obj.center, obj.radius),), None
    if isinstance(obj, (Segment, Ray, Arc, Circle)):
        return (obj,), None
    if isinstance(obj, (list, tuple, CrosscutList)):
        pieces = []
        for o in obj:
            pieces.extend(_as_pieces(o, domain)[0])
        return tuple(pieces), None
    raise TypeError(f"cannot interpret {obj!r} as a set of arcs")


def _piece_length(p):
    L = p.length()
    if not math.isfinite(L):
        raise ValueError("source set must have finite length")
    return L


def _canonical_normal(p, s):
    if isinstance(p, Segment):
        return p.left_normal(s)
    return p.outward_normal(s)


def _reference_points(pieces, k=64):
    pts = []
    for p in pieces:
        if hasattr(p, "point"):
            pts.append(p.point(np.linspace(0.0, 1.0, k)))
        else:  # rays: sample near the origin
            pts.append(p.origin + p.direction * np.linspace(0.0, 10.0, k))
    return np.concatenate(pts)


def _preferred_side(p, w_points):
    """+1 if the canonical normal of piece ``p`` faces the target points, else -1."""
    if isinstance(p, Segment):
        d = p.q - p.p
        rel = w_points - 0.5 * (p.p + p.q)
        cross = np.median((d.conjugate() * rel).imag)
        return 1.0 if cross >= 0 else -1.0
    return 1.0 if np.median(np.abs(w_points - p.center)) > p.radius else -1.0


@dataclass
class _Launches:
    points: np.ndarray
    weights: np.ndarray  # length(V) / ε_local
    resampled: int
    dropped: int


def _launch_points(domain, v_pieces, w_pieces, eps, n, gen, side="auto"):
    lengths = np.array([_piece_length(p) for p in v_pieces])
    total = float(lengths.sum())
    idx = gen.choice(len(v_pieces), size=n, p=lengths / total)
    s = gen.random(n)
    w_ref = _reference_points(w_pieces)
    v = np.empty(n, dtype=np.complex128)
    nrm = np.empty(n, dtype=np.complex128)
    pref = np.empty(n)
    for k, p in enumerate(v_pieces):
        m = idx == k
        v[m] = p.point(s[m])
        nrm[m] = _canonical_normal(p, s[m])
        if side == "auto":
            pref[m] = _preferred_side(p, w_ref)
        else:
            pref[m] = float(side)
    eps_loc = np.full(n, float(eps))
    pts = np.empty(n, dtype=np.complex128)
    todo = np.ones(n, dtype=bool)
    resampled = 0
    for halving in range(MAX_EPS_HALVINGS + 1):
        if not todo.any():
            break
        i = np.nonzero(todo)[0]
        plus = v[i] + eps_loc[i] * nrm[i]
        minus = v[i] - eps_loc[i] * nrm[i]
        in_p = np.asarray(domain.contains(plus))
        in_m = np.asarray(domain.contains(minus))
        if side != "auto":
            in_p &= pref[i] > 0
            in_m &= pref[i] < 0
        both = in_p & in_m
        use_plus = (in_p & ~in_m) | (both & (pref[i] > 0))
        use_minus = (in_m & ~in_p) | (both & (pref[i] < 0))
        pts[i[use_plus]] = plus[use_plus]
        pts[i[use_minus]] = minus[use_minus]
        done = use_plus | use_minus
        todo[i[done]] = False
        if todo.any():
            if halving == 0:
                resampled += int(todo.sum())
            eps_loc[todo] *= 0.5
    dropped = int(todo.sum())
    weights = np.where(todo, 0.0, total / eps_loc)
    pts[todo] = np.nan
    return _Launches(pts, weights, resampled, dropped)


def _excursion_run(domain, v_pieces, v_label, w_pieces, w_label, eps, n, rng, unit0,
                   tracked=(), side="auto", scheme=None, absorb_target=True):
    """One batch at offset ε: returns (per-sample weights, WalkBatch, launches)."""
    gen = rng.with_purpose(PURPOSE_WALK + 16).generator(unit0)
    launch = _launch_points(domain, v_pieces, w_pieces, eps, n, gen, side)
    absorbing = [a for a in domain.boundary() if a.label not in (v_label, w_label)]
    absorbing.append(BoundaryArc("__V", tuple(v_pieces)))
    if w_pieces and absorb_target:
        absorbing.append(BoundaryArc("__W", tuple(w_pieces)))
    geom = compile_geometry(absorbing, list(tracked))
    ok = launch.weights > 0
    if scheme is None:
        eps_min = float(np.min(np.where(ok, launch.weights, np.inf)))
        shell = EXC_SHELL_REL * (_total_length(v_pieces) / eps_min if ok.any() else eps)
        scheme = WalkOnSpheres(eps_abs=shell)
    starts = np.where(ok, launch.points, 0j)
    batch = simulate_walks(geom, starts[ok], rng.with_purpose(PURPOSE_WALK), scheme, domain.scale,
                           unit0=unit0)
    return launch, ok, batch


def _total_length(pieces):
    return float(sum(_piece_length(p) for p in pieces))


@dataclass
class ExcursionEstimate(MeasureEstimate):
    """Excursion estimate; ``raw`` holds the plain estimates at ε and ε/2."""

    raw: dict = field(default_factory=dict)
    resampled: int = 0
    dropped: int = 0

    def to_dict(self):
        d = super().to_dict()
        d["raw"] = {k: v.to_dict() for k, v in self.raw.items()}
        return d


def _estimate_from_hits(launch, ok, hits, eps, scheme):
    vals = np.zeros(launch.weights.size)
    vals[ok] = launch.weights[ok] * hits
    return MeasureEstimate.from_samples(vals, scheme=scheme, epsilon=eps)


def _richardson(e1, e2, eps, scheme, launches):
    mean = 2.0 * e2.mean - e1.mean
    se = math.sqrt(4.0 * e2.stderr**2 + e1.stderr**2)
    resampled = sum(lc.resampled for lc in launches)
    dropped = sum(lc.dropped for lc in launches)
    return ExcursionEstimate(
        mean, se, e1.n + e2.n, scheme=scheme, epsilon=eps,
        raw={"eps": e1, "eps/2": e2}, resampled=resampled, dropped=dropped,
    )


def excursion_measure(domain, V, W, epsilon, n, rng, richardson=True, side="auto", scheme=None):
    """Estimate exc_D(V, W) with launch offset ``epsilon`` and ``n`` launches per offset.

    ``V`` and ``W`` may be boundary labels, :class:`BoundaryArc`, crosscuts,
    circles or lists of those.  With ``richardson`` the estimate is
    ``2·E(ε/2) − E(ε)``; both raw values are kept in ``raw``.  Launch points
    that fall outside the domain are retried with a halved local ε (counted
    in ``resampled``).  ``side`` forces the launch side relative to the
    canonical normal (left normal for segments, outward for arcs).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    v_pieces, v_label = _as_pieces(V, domain)
    w_pieces, w_label = _as_pieces(W, domain)
    name = _scheme_name(scheme)
    launches, ests = [], []
    eps_list = (epsilon, 0.5 * epsilon) if richardson else (epsilon,)
    for j, eps in enumerate(eps_list):
        launch, ok, batch = _excursion_run(domain, v_pieces, v_label, w_pieces, w_label, eps, int(n), rng,
                                           j * int(n), side=side, scheme=scheme)
        hits = batch.label_mask("__W").astype(np.float64)
        launches.append(launch)
        ests.append(_estimate_from_hits(launch, ok, hits, eps, name))
    if not richardson:
        e = ests[0]
        return ExcursionEstimate(e.mean, e.stderr, e.n, scheme=name, epsilon=epsilon, raw={"eps": e},
                                 resampled=launches[0].resampled, dropped=launches[0].dropped)
    return _richardson(ests[0], ests[1], epsilon, name, launches)


# ------------------------------------------------------------------ exact values


def rectangle_excursion_exact(L):
    """Closed-form excursion value e^{-L} between the sides of length π of the L×π rectangle."""
    if L <= 0:
        raise ValueError("L must be positive")
    return math.exp(-L)


def extremal_length(L):
    """Extremal length L/π of the L×π rectangle between its sides of length π."""
    if L <= 0:
        raise ValueError("L must be positive")
    return L / math.pi


def rectangle_excursion_series(L, terms=200):
    """Excursion measure between the π-sides of the L×π rectangle under the
    ε⁻¹·h normalisation, by separation of variables:
    Σ_{k odd} 8 / (k π sinh(k L)).
    """
    if L <= 0:
        raise ValueError("L must be positive")
    total = 0.0
    for k in range(1, 2 * terms, 2):
        kl = k * L
        if kl > 700:
            break
        total += 8.0 / (k * math.pi * math.sinh(kl))
    return total


def annulus_excursion_exact(inner, outer):
    """2π/(s−r) between C_s (inner, radius e^{-s}) and C_r (outer, radius e^{-r})."""
    s, r = inner.log_radius_neg, outer.log_radius_neg
    if not s > r:
        raise ValueError("inner circle must have smaller radius than outer")
    return 2.0 * math.pi / (s - r)


# ------------------------------------------------------------------ crosscut statistics


@dataclass
class CrosscutVisitStats:
    expected_visits: MeasureEstimate
    hit_circle_prob: MeasureEstimate
    per_crosscut_probs: list
    closed_component: bool = False

    def to_dict(self):
        return {
            "expected_visits": self.expected_visits.to_dict(),
            "hit_circle_prob": self.hit_circle_prob.to_dict(),
            "per_crosscut_probs": [p.to_dict() for p in self.per_crosscut_probs],
            "closed_component": self.closed_component,
        }


def _tracked_sets(domain, circle):
    cuts = extract_crosscuts(domain, circle)
    if cuts.closed_component:
        return [BoundaryArc("crosscut0", (Circle(circle.center, circle.radius),))], True
    return [c.as_arc(f"crosscut{i}") for i, c in enumerate(cuts)], False


def crosscut_visit_stats(domain, z, circle, n, rng, scheme=None, tracked=None):
    """Visits of the crosscuts of ``circle`` in ``domain`` by Brownian motion from ``z``.

    Each walk counts the distinct crosscuts it touches before leaving the
    domain; a circle lying wholly inside the domain is one tracked object.
    ``tracked`` overrides the crosscut list with arbitrary sets.
    """
    z = complex(z)
    if not bool(np.asarray(domain.contains(np.array([z])))[0]):
        raise ValueError(f"start point {z} is not inside the domain")
    if circle is not None and abs(abs(z - circle.center) - circle.radius) <= 1e-12 * circle.radius:
        raise ValueError("start point lies on the circle")
    if scheme is None:
        scheme = FixedStep()
    closed = False
    if tracked is None:
        tracked, closed = _tracked_sets(domain, circle)
    geom = compile_geometry(list(domain.boundary()), list(tracked))
    batch = simulate_walks(geom, np.full(int(n), z), rng.with_purpose(PURPOSE_WALK), scheme, domain.scale)
    visits = batch.visits.astype(np.float64)
    name = _scheme_name(scheme)
    per = [MeasureEstimate.from_samples(visits[:, g], scheme=name) for g in range(visits.shape[1])]
    counts = visits.sum(axis=1)
    ev = MeasureEstimate.from_samples(counts, scheme=name)
    # the mean of the count is reported as the sum of the per-crosscut means
    ev = MeasureEstimate(math.fsum(p.mean for p in per), ev.stderr, ev.n, scheme=name)
    hit = MeasureEstimate.from_samples((counts > 0).astype(np.float64), scheme=name)
    return CrosscutVisitStats(ev, hit, per, closed)


@dataclass
class CrosscutSumResult:
    """(sum over crosscuts, whole-circle) excursion estimates from the same launches.

    ``margin`` estimates ``2·whole − sum`` with a paired standard error.
    """

    sum_estimate: MeasureEstimate
    whole_estimate: MeasureEstimate
    per_crosscut: list
    margin: MeasureEstimate

    def __iter__(self):
        return iter((self.sum_estimate, self.whole_estimate))

    def holds(self, k=3.0):
        """Factor-2 bound sum ≤ 2·whole, with ``k`` paired standard errors of slack."""
        return self.margin.mean >= -k * self.margin.stderr


def _source_pieces(domain, source):
    cuts = extract_crosscuts(domain, source)
    if cuts.closed_component:
        return (Circle(source.center, source.radius),)
    return tuple(c.primitive() for c in cuts)


def excursion_sum_over_crosscuts(domain, source, target, n, rng, epsilon=None, richardson=False, scheme=None):
    """Σ_η exc_D(C_source ∩ D, η) over the crosscuts η of the target circle, and
    exc_D(C_source ∩ D, C_target ∩ D), all from one set of launches.

    Crosscuts are tracked (visit-recorded, not absorbing) so that each per-η
    indicator is "η reached before returning to the source or the boundary".
    """
    v_pieces = _source_pieces(domain, source)
    if not v_pieces:
        raise ValueError("source circle does not meet the domain")
    tracked, _ = _tracked_sets(domain, target)
    if not tracked:
        raise ValueError("target circle does not meet the domain")
    w_pieces = tuple(p for arc in tracked for p in arc.pieces)
    if epsilon is None:
        epsilon = 1e-2 * min(abs(source.radius - target.radius), domain.scale)
    name = _scheme_name(scheme)
    eps_list = (epsilon, 0.5 * epsilon) if richardson else (epsilon,)
    sums, wholes, margins, pers = [], [], [], []
    for j, eps in enumerate(eps_list):
        launch, ok, batch = _excursion_run(domain, v_pieces, None, w_pieces, None, eps, int(n), rng, j * int(n),
                                           tracked=tracked, scheme=scheme, absorb_target=False)
        vis = batch.visits.astype(np.float64)
        w = launch.weights[ok]
        full = lambda x: np.concatenate([x, np.zeros(int(np.sum(~ok)))])  # noqa: E731
        per = [MeasureEstimate.from_samples(full(w * vis[:, g]), scheme=name, epsilon=eps)
               for g in range(vis.shape[1])]
        s_vals = full(w * vis.sum(axis=1))
        w_vals = full(w * (vis.sum(axis=1) > 0))
        sums.append(MeasureEstimate.from_samples(s_vals, scheme=name, epsilon=eps))
        wholes.append(MeasureEstimate.from_samples(w_vals, scheme=name, epsilon=eps))
        margins.append(MeasureEstimate.from_samples(2.0 * w_vals - s_vals, scheme=name, epsilon=eps))
        pers.append(per)
    if richardson:
        combine = lambda a, b: _richardson(a, b, epsilon, name, [])  # noqa: E731
        return CrosscutSumResult(combine(sums[0], sums[1]), combine(wholes[0], wholes[1]),
                                 [combine(a, b) for a, b in zip(pers[0], pers[1])],
                                 combine(margins[0], margins[1]))
    return CrosscutSumResult(sums[0], wholes[0], pers[0], margins[0])
