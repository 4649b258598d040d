"""Chordal, radial and two-sided radial SLE traces from discretized Loewner flows.

The driving function is piecewise constant in capacity time, taking on each
step the value at the end of the step (so a refined step shrinks both its
duration and its increment), and every step is an exact elementary slit map:

* chordal (``∂g = a/(g − U)``): the inverse step is
  ``f(w) = U + sqrt((w − U)² − 2aΔ)`` and the new tip is ``U + i·sqrt(2aΔ)``;
* radial (``∂L = a·cot(L − U)``, ``z = e^{2iL}``): with ``p = e^{i(L−U)}``
  the flow conserves ``e^{at}·(p + 1/p)``, so the inverse step is the root
  inside the unit disk of ``p'² − e^{aΔ}(p + 1/p)·p' + 1 = 0``.

The tip after ``n`` steps is the image of the last driving point under the
inverse maps applied in reverse order (an O(n) "zipper" per tip).  A step is
bridge-split whenever its tip moves more than ``frac·ρ`` with ρ the distance
scale to the nearest target circle, so circles are resolved where it
matters.  The conformal radius of 0 after radial time ``t`` is exactly
``e^{−2at}``.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import njit, prange
from .geometry import CircleSpec, PolylineCurve, segment_distance
from .mobius import DiskToHalfPlane
from .rng import STATE_SIZE, rng_init, rng_normal
from .stochastic import (
    PURPOSE_DRIVING,
    THETA_SUBSTEP,
    ThetaIntegrationError,
    ThetaPath,
    driving_increment,
    theta_euler,
)

CHORDAL, RADIAL, TWO_SIDED = 0, 1, 2
ST_OK, ST_STOPPED, ST_REFINE, ST_BUDGET, ST_THETA = 0, 1, 2, 3, 4
STATUS_TEXT = {
    ST_OK: "ok",
    ST_STOPPED: "stopped",
    ST_REFINE: "refinement budget exceeded",
    ST_BUDGET: "step budget exceeded",
    ST_THETA: "theta integration failure",
}
REFINE_FRAC = 0.1
DEFAULT_MAX_STEPS = 200_000
STACK = 160
MIN_DT_POWER = 52  # smallest piece is dt_base·2^-52


class SleError(RuntimeError):
    """Numerical failure of a sampler (refinement or step budget)."""

    def __init__(self, message, status=None, time=None):
        super().__init__(message)
        self.status, self.time = status, time


def check_kappa(kappa):
    kappa = float(kappa)
    if not (0.0 < kappa <= 4.0):
        raise ValueError(f"kappa must lie in (0, 4] for trace extraction, got {kappa}")
    return kappa


# ------------------------------------------------------------------ kinds


@dataclass(frozen=True)
class Chordal:
    name = "chordal"


@dataclass(frozen=True)
class Radial:
    name = "radial"


@dataclass(frozen=True)
class TwoSidedRadial:
    theta: float
    name = "two-sided"


# ------------------------------------------------------------------ elementary maps


@njit
def chordal_inverse_step(w, u, c):
    """Inverse vertical-slit map: U + sqrt(x − c)·sqrt(x + c), x = w − U, c = sqrt(2aΔ)."""
    x = w - u
    if x.imag < 0.0 or (x.imag == 0.0):
        x = complex(x.real, 0.0)
    return u + cmath.sqrt(x - c) * cmath.sqrt(x + c)


@njit
def chordal_forward_step(z, u, c):
    """Forward slit map U + x·sqrt(1 + (c/x)²) (branch cut on the slit)."""
    x = z - u
    if x == 0:
        return complex(u, 0.0)
    r = c / x
    return u + x * cmath.sqrt(1.0 + r * r)


@njit
def radial_root_inside(p, e, em1):
    """Root inside the unit disk of q² − e(p + 1/p)q + 1 = 0, with em1 = e² − 1."""
    q = 1.0 / p
    b = e * (p + q)
    d = p - q
    s = cmath.sqrt(e * e * d * d + 4.0 * em1)
    r1 = 0.5 * (b + s)
    r2 = 0.5 * (b - s)
    big = r1 if abs(r1) >= abs(r2) else r2
    return 1.0 / big


@njit
def _rho(x, y, tcx, tcy, tr):
    best = np.inf
    for j in range(tr.shape[0]):
        d = abs(math.hypot(x - tcx[j], y - tcy[j]) - tr[j])
        v = max(tr[j], d)
        if v < best:
            best = v
    return best


@njit
def _tip(kind, n, us, ps, qs, rots, u_new, dt, a):
    if kind == CHORDAL:
        w = complex(u_new, math.sqrt(2.0 * a * dt))
        for k in range(n - 1, -1, -1):
            w = chordal_inverse_step(w, us[k], ps[k])
        return w
    em1 = math.expm1(2.0 * a * dt)
    e = math.exp(a * dt)
    p = complex(1.0 / (e + math.sqrt(em1)), 0.0)
    if n == 0:
        return p * p * cmath.exp(2j * u_new)
    rot = cmath.exp(1j * (u_new - us[n - 1]))
    for k in range(n - 1, -1, -1):
        p = p * rot
        p = radial_root_inside(p, ps[k], qs[k])
        if k > 0:
            rot = rots[k - 1]
    return p * p * cmath.exp(2j * us[0])


@njit
def _grow_f(x, n):
    y = np.empty(2 * x.shape[0], dtype=x.dtype)
    y[:n] = x[:n]
    return y


@njit
def trace_kernel(kind, a, theta0, dt_base, t_end, frac, tcx, tcy, tr, r_T, r_stop, max_steps, state):
    """Sample one trace.

    Targets are circles (tcx, tcy, tr).  Event summaries per target ``j``:
    ``min_after[j]`` — min distance to the centre after the trace first
    reaches ``|z| >= r_T`` (from the start when ``r_T <= 0``); ``tau[j]`` —
    first time the trace enters the closed disc; ``max_after[j]`` — max
    distance to the centre from ``tau[j]`` on.  The run stops at ``t_end`` or,
    once past ``r_T``, when ``|tip| > r_stop`` (if ``r_stop > 0``).
    """
    nt = tr.shape[0]
    cap = 512
    us = np.empty(cap)
    ps = np.empty(cap)
    qs = np.empty(cap)
    rots = np.empty(cap, dtype=np.complex128)
    vz = np.empty(cap + 1, dtype=np.complex128)
    vt = np.empty(cap + 1)
    vu = np.empty(cap + 1)
    vth = np.empty(cap + 1)
    z_prev = complex(0.0, 0.0) if kind == CHORDAL else complex(1.0, 0.0)
    vz[0] = z_prev
    vt[0] = 0.0
    vu[0] = 0.0
    vth[0] = theta0
    n = 0
    t = 0.0
    u = 0.0
    theta = theta0
    active = r_T <= 0.0
    T = 0.0 if active else -1.0
    min_after = np.full(nt, np.inf)
    tau = np.full(nt, -1.0)
    max_after = np.full(nt, -1.0)
    for j in range(nt):
        dz = abs(z_prev - complex(tcx[j], tcy[j]))
        if active:
            min_after[j] = dz
        if dz <= tr[j]:
            tau[j] = 0.0
            max_after[j] = dz
    dt_min = dt_base * 2.0 ** (-MIN_DT_POWER)
    dt_prop = dt_base
    status = ST_OK
    sdt = np.empty(STACK)
    sdw = np.empty(STACK)
    done = False
    while not done and t < t_end * (1.0 - 1e-14):
        if n >= max_steps:
            status = ST_BUDGET
            break
        dt = min(dt_prop, t_end - t)
        sdt[0] = dt
        sdw[0] = math.sqrt(dt) * rng_normal(state)
        top = 1
        last = dt
        while top > 0:
            top -= 1
            pdt = sdt[top]
            pdw = sdw[top]
            split = False
            new_theta = theta
            if kind == TWO_SIDED:
                m = min(theta, math.pi - theta)
                new_theta = np.nan
                if pdt <= THETA_SUBSTEP * m * m:
                    new_theta = theta_euler(theta, pdt, pdw, 2, a)
                if new_theta != new_theta:
                    split = True
                du = driving_increment(theta, pdt, pdw, 2, a)
            else:
                du = pdw
            tip = complex(0.0, 0.0)
            if not split:
                tip = _tip(kind, n, us, ps, qs, rots, u + du, pdt, a)
                if nt > 0:
                    lim = frac * min(_rho(z_prev.real, z_prev.imag, tcx, tcy, tr),
                                     _rho(tip.real, tip.imag, tcx, tcy, tr))
                    if abs(tip - z_prev) > lim:
                        split = True
            if split:
                if 0.5 * pdt < dt_min or top + 2 > STACK:
                    status = ST_THETA if kind == TWO_SIDED and new_theta != new_theta else ST_REFINE
                    done = True
                    break
                half = 0.5 * pdt
                w1 = 0.5 * pdw + math.sqrt(0.25 * pdt) * rng_normal(state)
                sdt[top] = half
                sdw[top] = pdw - w1
                sdt[top + 1] = half
                sdw[top + 1] = w1
                top += 2
                continue
            # accept the piece
            if n + 1 >= us.shape[0]:
                us = _grow_f(us, n)
                ps = _grow_f(ps, n)
                qs = _grow_f(qs, n)
                rots = _grow_f(rots, n)
            if n + 2 >= vz.shape[0]:
                vz = _grow_f(vz, n + 1)
                vt = _grow_f(vt, n + 1)
                vu = _grow_f(vu, n + 1)
                vth = _grow_f(vth, n + 1)
            u += du
            us[n] = u
            if kind == CHORDAL:
                ps[n] = math.sqrt(2.0 * a * pdt)
            else:
                ps[n] = math.exp(a * pdt)
                qs[n] = math.expm1(2.0 * a * pdt)
                if n > 0:
                    rots[n - 1] = cmath.exp(1j * (u - us[n - 1]))
            n += 1
            t += pdt
            theta = new_theta
            vz[n] = tip
            vt[n] = t
            vu[n] = u
            vth[n] = theta
            last = pdt
            # events on segment z_prev -> tip
            if not active:
                if abs(tip) >= r_T:
                    active = True
                    T = t
                    for j in range(nt):
                        min_after[j] = abs(tip - complex(tcx[j], tcy[j]))
            else:
                for j in range(nt):
                    d = segment_distance(tcx[j], tcy[j], z_prev.real, z_prev.imag, tip.real, tip.imag)
                    if d < min_after[j]:
                        min_after[j] = d
            for j in range(nt):
                dz = abs(tip - complex(tcx[j], tcy[j]))
                if tau[j] < 0.0:
                    d = segment_distance(tcx[j], tcy[j], z_prev.real, z_prev.imag, tip.real, tip.imag)
                    if d <= tr[j]:
                        tau[j] = t
                        max_after[j] = max(tr[j], dz)
                elif dz > max_after[j]:
                    max_after[j] = dz
            z_prev = tip
            if active and r_stop > 0.0 and abs(tip) > r_stop:
                status = ST_STOPPED
                done = True
                break
        dt_prop = min(dt_base, 2.0 * last)
    return (status, t, n, T, min_after, tau, max_after,
            vz[: n + 1], vt[: n + 1], vu[: n + 1], vth[: n + 1], us[:n].copy(), ps[:n].copy())


@njit(parallel=True)
def trace_batch(n_rep, unit0, kind, a, theta0, dt_base, t_end, frac, tcx, tcy, tr, r_T, r_stop, max_steps,
                key0, key1, purpose):
    """Event summaries for ``n_rep`` independent traces; replicate i uses counter block unit0 + i."""
    nt = tr.shape[0]
    status = np.empty(n_rep, dtype=np.int64)
    steps = np.empty(n_rep, dtype=np.int64)
    t_fin = np.empty(n_rep)
    T = np.empty(n_rep)
    min_after = np.empty((n_rep, nt))
    tau = np.empty((n_rep, nt))
    max_after = np.empty((n_rep, nt))
    for i in prange(n_rep):
        state = np.empty(STATE_SIZE, dtype=np.uint64)
        rng_init(state, key0, key1, np.uint64(unit0 + i), purpose)
        res = trace_kernel(kind, a, theta0, dt_base, t_end, frac, tcx, tcy, tr, r_T, r_stop, max_steps, state)
        status[i] = res[0]
        t_fin[i] = res[1]
        steps[i] = res[2]
        T[i] = res[3]
        for j in range(nt):
            min_after[i, j] = res[4][j]
            tau[i, j] = res[5][j]
            max_after[i, j] = res[6][j]
    return status, t_fin, steps, T, min_after, tau, max_after


# ------------------------------------------------------------------ samples


@dataclass
class DrivingFunction:
    times: np.ndarray
    values: np.ndarray

    def increments(self):
        return np.diff(self.values)

    def normalized_increments(self):
        """Increments divided by sqrt(Δt); standard normal for Brownian driving."""
        return np.diff(self.values) / np.sqrt(np.diff(self.times))


@dataclass
class SleCurveSample:
    curve: PolylineCurve
    kind: object
    kappa: float
    a: float
    d: float
    dt_base: float
    seed: dict
    driving: DrivingFunction
    theta: ThetaPath = None
    stop_criterion: dict = field(default_factory=dict)
    status: str = "ok"
    # elementary-map parameters (driving value and sqrt(2aΔ) or e^{aΔ} per step)
    step_u: np.ndarray = None
    step_dt: np.ndarray = None

    def simple_check(self):
        """Self-intersection report of the polyline (tol_self = 1e-7·diameter).

        Tips are joined by chords while each step's exact hull piece is a
        curved arc, so chords of steps i and i+2 can cut a sharp corner;
        ``max_index_gap`` shows whether violations are only such step-scale
        artifacts.
        """
        pairs = self.curve.self_intersection_pairs()
        gap = int(np.max(pairs[:, 1] - pairs[:, 0])) if pairs.shape[0] else 0
        return {"violations": int(pairs.shape[0]), "max_index_gap": gap}

    def sidecar(self):
        out = {
            "kind": self.kind.name,
            "kappa": self.kappa,
            "a": self.a,
            "d": self.d,
            "dt_base": self.dt_base,
            "seed": self.seed,
            "stop_criterion": self.stop_criterion,
            "n_vertices": len(self.curve),
            "status": self.status,
            "simple_check": self.simple_check(),
        }
        if isinstance(self.kind, TwoSidedRadial):
            out["theta"] = self.kind.theta
        return out


def _targets_arrays(targets):
    targets = list(targets or ())
    cx = np.array([c.center.real for c in targets], dtype=np.float64)
    cy = np.array([c.center.imag for c in targets], dtype=np.float64)
    r = np.array([c.radius for c in targets], dtype=np.float64)
    return cx, cy, r


def _run_single(kind_code, kind, kappa, theta0, dt_base, t_end, rng, targets, frac, max_steps, stop):
    kappa = check_kappa(kappa)
    if dt_base <= 0 or t_end <= 0:
        raise ValueError("dt_base and the stopping time must be positive")
    a = 2.0 / kappa
    cx, cy, r = _targets_arrays(targets)
    state = rng.with_purpose(PURPOSE_DRIVING).kernel_state(0)
    res = trace_kernel(kind_code, a, float(theta0), float(dt_base), float(t_end), float(frac), cx, cy, r,
                       0.0, 0.0, int(max_steps), state)
    status, t, n = int(res[0]), float(res[1]), int(res[2])
    vz, vt, vu, vth, us, ps = res[7], res[8], res[9], res[10], res[11], res[12]
    if status == ST_THETA:
        raise ThetaIntegrationError(f"theta left (0, pi) near t={t:.6g} despite sub-stepping", t, vth[-1])
    if status not in (ST_OK, ST_STOPPED):
        raise SleError(f"{STATUS_TEXT[status]} at t={t:.6g} after {n} steps (dt_base={dt_base})", status, t)
    if kind_code == CHORDAL:
        dts = ps**2 / (2.0 * a)
    else:
        dts = np.log(ps) / a
    theta_path = None
    if kind_code == TWO_SIDED:
        theta_path = ThetaPath(vt.copy(), vth.copy(), np.concatenate([[0.0], np.diff(vu)]), 2, a)
    curve = PolylineCurve(vz.copy(), vt.copy(), simple_expected=True,
                          meta={"kind": kind.name, "kappa": kappa})
    return SleCurveSample(
        curve=curve, kind=kind, kappa=kappa, a=a, d=1.0 + kappa / 8.0, dt_base=float(dt_base),
        seed={"master_seed": rng.master_seed, "stream_index": rng.stream_index},
        driving=DrivingFunction(vt.copy(), vu.copy()), theta=theta_path, stop_criterion=stop,
        status=STATUS_TEXT[status], step_u=us, step_dt=dts,
    )


def sample_chordal(kappa, dt_base, t_max, rng, targets=(), frac=REFINE_FRAC, max_steps=DEFAULT_MAX_STEPS):
    """Chordal SLE_κ in the upper half-plane from 0, up to capacity time ``t_max``.

    ``targets`` (CircleSpec list) switch on spatial refinement near those circles.
    """
    return _run_single(CHORDAL, Chordal(), kappa, 0.0, dt_base, t_max, rng, targets, frac, max_steps,
                       {"t_max": float(t_max)})


def sample_radial(kappa, dt_base, t_max, rng, targets=(), frac=REFINE_FRAC, max_steps=DEFAULT_MAX_STEPS):
    """Radial SLE_κ in the unit disk from 1 towards 0, up to radial capacity time ``t_max``."""
    return _run_single(RADIAL, Radial(), kappa, math.pi / 2, dt_base, t_max, rng, targets, frac, max_steps,
                       {"t_max": float(t_max)})


def radial_time_for_conformal_radius(cr, a):
    """Radial capacity time at which the conformal radius of 0 equals ``cr``."""
    if not (0.0 < cr < 1.0):
        raise ValueError("conformal radius must lie in (0, 1)")
    return -math.log(cr) / (2.0 * a)


def sample_two_sided_radial(kappa, theta, dt_base, conformal_radius_stop, rng, targets=(), frac=REFINE_FRAC,
                            max_steps=DEFAULT_MAX_STEPS):
    """Two-sided radial SLE_κ from 1 to e^{2iθ} through 0, stopped when the
    conformal radius of 0 drops to ``conformal_radius_stop``."""
    kappa = check_kappa(kappa)
    if not (0.0 < theta < math.pi):
        raise ValueError("theta must lie in (0, pi)")
    t_stop = radial_time_for_conformal_radius(conformal_radius_stop, 2.0 / kappa)
    return _run_single(TWO_SIDED, TwoSidedRadial(float(theta)), kappa, theta, dt_base, t_stop, rng, targets,
                       frac, max_steps, {"conformal_radius": float(conformal_radius_stop), "t_stop": t_stop})


# ------------------------------------------------------------------ forward maps


def chordal_forward(sample, z):
    """g_t(z) for the chordal sample's composed slit maps; returns (g(z), tip image)."""
    a = sample.a
    w = complex(z)
    for u, dt in zip(sample.step_u, sample.step_dt):
        w = chordal_forward_step(w, u, math.sqrt(2.0 * a * dt))
    tip = sample.step_u[-1] if len(sample.step_u) else 0.0
    return w, complex(tip, 0.0)


def radial_forward(sample, z):
    """g_t(z) for the radial composed maps (disk to disk, 0 fixed); returns (g(z), tip image)."""
    a = sample.a
    us, dts = sample.step_u, sample.step_dt
    if len(us) == 0:
        return complex(z), 1 + 0j
    p = cmath.sqrt(complex(z) * cmath.exp(-2j * us[0]))
    for k, (u, dt) in enumerate(zip(us, dts)):
        if k > 0:
            p *= cmath.exp(-1j * (u - us[k - 1]))
        p = radial_root_inside(p, math.exp(-a * dt), math.expm1(-2.0 * a * dt))
    return p * p * cmath.exp(2j * us[-1]), cmath.exp(2j * us[-1])


def _radial_boundary_angle(sample, phi):
    """Track x = L(w) − U (mod π) for the boundary point w = e^{2iφ} under the composed maps.

    Along a step with constant driving, cos x evolves as e^{−aΔ}·cos x.
    """
    a = sample.a
    x = phi
    prev = 0.0
    for u, dt in zip(sample.step_u, sample.step_dt):
        x = (x - (u - prev)) % math.pi
        prev = u
        x = math.acos(math.exp(-a * dt) * math.cos(x))
    return x


def sle_sin_function(state, zeta, w=None):
    """sin arg g(ζ) with g mapping the slit domain to ℍ, tip → 0 and the
    target w → ∞ (w = ∞ for chordal; e^{2iθ} for two-sided radial by default).

    ``state`` is an :class:`SleCurveSample`; use :func:`empty_state` for the
    empty hull.
    """
    zeta = complex(zeta)
    verts = state.curve.vertices
    scale = max(1.0, float(np.max(np.abs(verts))))
    if len(verts) > 1:
        from .geometry import distance_point_to_curve

        if distance_point_to_curve(zeta, state.curve) <= 1e-12 * scale:
            raise ValueError("point lies on the hull")
    if isinstance(state.kind, Chordal):
        if zeta.imag <= 0:
            raise ValueError("point must lie in the upper half-plane")
        g, tip = chordal_forward(state, zeta)
        rel = g - tip
        if rel.imag <= 0:
            raise ValueError("point swallowed by the hull")
        return rel.imag / abs(rel)
    if abs(zeta) >= 1:
        raise ValueError("point must lie in the unit disk")
    if w is None:
        if not isinstance(state.kind, TwoSidedRadial):
            raise ValueError("target boundary point w is required for radial states")
        w = cmath.exp(2j * state.kind.theta)
    phi = cmath.phase(complex(w)) / 2.0 % math.pi
    x = _radial_boundary_angle(state, phi) if len(state.step_u) else phi
    if not (0.0 < x < math.pi):
        raise ValueError("target point swallowed by the hull")
    g, tip = radial_forward(state, zeta)
    rot = g / tip
    h = DiskToHalfPlane(math.pi - x)(rot)
    if h.imag <= 0:
        raise ValueError("point swallowed by the hull")
    return h.imag / abs(h)


def empty_state(kind=None, kappa=4.0):
    """State with no hull (identity map), for chordal by default."""
    kind = kind or Chordal()
    start = 0j if isinstance(kind, Chordal) else 1 + 0j
    a = 2.0 / kappa
    curve = PolylineCurve(np.array([start]), np.array([0.0]))
    return SleCurveSample(curve, kind, kappa, a, 1 + kappa / 8, 0.0, {}, DrivingFunction(np.zeros(1), np.zeros(1)),
                          step_u=np.zeros(0), step_dt=np.zeros(0))


# ------------------------------------------------------------------ Green's functions


@dataclass(frozen=True)
class GreensParams:
    kappa: float
    c_hat: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.kappa < 8.0):
            raise ValueError("kappa must lie in (0, 8)")

    @property
    def a(self):
        return 2.0 / self.kappa

    @property
    def d(self):
        return 1.0 + self.kappa / 8.0

    @property
    def disk_to_half_plane_constant(self):
        """2^{2−d}: ratio of the covariance-transported disk value to ĉ·sin^{4a−1}θ."""
        return 2.0 ** (2.0 - self.d)


def greens_half_plane(zeta, params):
    """ĉ·(Im ζ)^{d−2}·(sin arg ζ)^{4a−1}; ``math.inf`` on the real line (d < 2)."""
    zeta = complex(zeta)
    if zeta.imag < 0:
        raise ValueError("zeta must lie in the closed upper half-plane")
    if zeta.imag == 0:
        return math.inf
    s = zeta.imag / abs(zeta)
    return params.c_hat * zeta.imag ** (params.d - 2.0) * s ** (4.0 * params.a - 1.0)


def greens_disk_center(theta, params, normalization="disk"):
    """Green's function at 0 of the unit disk for the curve from 1 to e^{2iθ}.

    ``normalization='disk'`` returns ĉ·sin^{4a−1}θ (ĉ as the disk constant);
    ``'half_plane'`` uses the half-plane ĉ, which transports to the disk with
    the extra factor 2^{2−d}.
    """
    if not (0.0 < theta < math.pi):
        raise ValueError("theta must lie in (0, pi)")
    v = params.c_hat * math.sin(theta) ** (4.0 * params.a - 1.0)
    if normalization == "half_plane":
        return params.disk_to_half_plane_constant * v
    if normalization != "disk":
        raise ValueError("normalization must be 'disk' or 'half_plane'")
    return v


def greens_disk_center_via_half_plane(theta, params):
    """|g′(0)|^{2−d}·G_ℍ(g(0)) with g the Möbius map 1 → 0, e^{−2iθ} → ∞, 0 → e^{iθ}.

    By conjugation symmetry the value for the target e^{2iθ} equals the one for
    e^{−2iθ}.
    """
    g = DiskToHalfPlane(theta)
    deriv = abs(g.derivative(0.0))
    return deriv ** (2.0 - params.d) * greens_half_plane(g(0.0), params)


def greens_consistency_residual(theta, params):
    """Relative gap between the two formula paths (covariance vs closed form)."""
    via = greens_disk_center_via_half_plane(theta, params)
    closed = greens_disk_center(theta, params, normalization="half_plane")
    return abs(via - closed) / abs(closed)


def circles_from_r(rs, center=0j):
    return [CircleSpec(float(r), complex(center)) for r in rs]
