"""Planar Brownian walks, Brownian bridges and the angular SDE of radial SLE."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import njit, prange
from .domains import ABSORB, TRACK, compile_geometry, nearest_primitive, prim_cross, prim_project
from .rng import STATE_SIZE, RngStream, rng_init, rng_normal, rng_uniform

DEFAULT_MAX_STEPS = 10_000_000
EPS_ABS_REL = 1e-4
FIXED_STEP_REL = 1e-3
FAR_FIELD = 8.0
THETA_SUBSTEP = 0.05
MAX_SPLIT_DEPTH = 48

WALK_OK, WALK_BUDGET = 0, 1
PURPOSE_WALK, PURPOSE_THETA, PURPOSE_BRIDGE, PURPOSE_DRIVING = 1, 2, 3, 4


class WalkError(RuntimeError):
    pass


class ThetaIntegrationError(RuntimeError):
    def __init__(self, message, time=None, theta=None, dt=None):
        super().__init__(message)
        self.time, self.theta, self.dt = time, theta, dt


@dataclass(frozen=True)
class WalkOnSpheres:
    eps_abs: float = None  # absolute; default EPS_ABS_REL * domain scale


@dataclass(frozen=True)
class FixedStep:
    h: float = None  # Gaussian step std; default FIXED_STEP_REL * domain scale
    eps_abs: float = None
    far_field: bool = True  # sphere jumps while every live set is > FAR_FIELD·h away


@dataclass
class WalkOutcome:
    exit_point: complex
    exit_label: str
    visited_crosscuts: list = field(default_factory=list)
    steps: int = 0


# ------------------------------------------------------------------ walk kernels


@njit
def _absorb(j, kind, par, x, y):
    return prim_project(kind[j], par[j], x, y)


@njit
def _wos_walk(x, y, kind, par, label, role, group, cs, ccx, ccy, cr, eps, max_steps, state, visited, seq):
    order = 0
    for step in range(max_steps):
        d, j = nearest_primitive(x, y, kind, par, role, group, visited, cs, ccx, ccy, cr)
        if j < 0:
            return x, y, -1, step, WALK_BUDGET
        if d < eps:
            if role[j] == TRACK:
                visited[group[j]] = 1
                seq[group[j]] = order
                order += 1
                continue
            px, py = _absorb(j, kind, par, x, y)
            return px, py, label[j], step, WALK_OK
        phi = 2.0 * math.pi * rng_uniform(state)
        x += d * math.cos(phi)
        y += d * math.sin(phi)
    return x, y, -1, max_steps, WALK_BUDGET


@njit
def _fixed_walk(x, y, kind, par, label, role, group, cs, ccx, ccy, cr, h, eps, max_steps, state, visited, seq,
                far):
    order = 0
    n_prim = kind.shape[0]
    for step in range(max_steps):
        d, j = nearest_primitive(x, y, kind, par, role, group, visited, cs, ccx, ccy, cr)
        if j < 0:
            return x, y, -1, step, WALK_BUDGET
        if d < eps and role[j] == ABSORB:
            px, py = _absorb(j, kind, par, x, y)
            return px, py, label[j], step, WALK_OK
        if far and d > FAR_FIELD * h:
            # no live set within reach of a few steps: exit the free disc in one go
            rad = d - 0.5 * FAR_FIELD * h
            phi = 2.0 * math.pi * rng_uniform(state)
            x += rad * math.cos(phi)
            y += rad * math.sin(phi)
            continue
        nx = x + h * rng_normal(state)
        ny = y + h * rng_normal(state)
        if math.hypot(nx - x, ny - y) >= d:
            # resolve crossings along the step in order of occurrence
            while True:
                best_u = 2.0
                best_j = -1
                for k in range(n_prim):
                    if role[k] == TRACK and visited[group[k]] != 0:
                        continue
                    u = prim_cross(kind[k], par[k], x, y, nx, ny)
                    if u >= 0.0 and u < best_u:
                        best_u = u
                        best_j = k
                if best_j < 0:
                    break
                if role[best_j] == ABSORB:
                    return x + best_u * (nx - x), y + best_u * (ny - y), label[best_j], step + 1, WALK_OK
                visited[group[best_j]] = 1
                seq[group[best_j]] = order
                order += 1
        x = nx
        y = ny
    return x, y, -1, max_steps, WALK_BUDGET


@njit(parallel=True)
def run_walks(sx, sy, kind, par, label, role, group, cs, ccx, ccy, cr, n_groups,
              scheme, h, eps, max_steps, key0, key1, purpose, unit0):
    """Independent walks; walk i uses counter block ``unit0 + i`` of the stream."""
    n = sx.shape[0]
    g = max(n_groups, 1)
    ex = np.empty(n)
    ey = np.empty(n)
    lab = np.empty(n, dtype=np.int64)
    steps = np.empty(n, dtype=np.int64)
    status = np.empty(n, dtype=np.int64)
    seq = np.full((n, g), -1, dtype=np.int64)
    for i in prange(n):
        state = np.empty(STATE_SIZE, dtype=np.uint64)
        rng_init(state, key0, key1, np.uint64(unit0 + i), purpose)
        visited = np.zeros(g, dtype=np.int64)
        row = np.full(g, -1, dtype=np.int64)
        if scheme == 0:
            a, b, c, s, st = _wos_walk(sx[i], sy[i], kind, par, label, role, group, cs, ccx, ccy, cr,
                                       eps, max_steps, state, visited, row)
        else:
            a, b, c, s, st = _fixed_walk(sx[i], sy[i], kind, par, label, role, group, cs, ccx, ccy, cr,
                                         h, eps, max_steps, state, visited, row, scheme == 1)
        ex[i] = a
        ey[i] = b
        lab[i] = c
        steps[i] = s
        status[i] = st
        for k in range(g):
            seq[i, k] = row[k]
    return ex, ey, lab, steps, status, seq


@dataclass
class WalkBatch:
    exit_points: np.ndarray
    exit_labels: np.ndarray
    steps: np.ndarray
    visit_order: np.ndarray  # (n, groups); -1 = not visited, else visit rank
    label_names: list

    def label_mask(self, names):
        if isinstance(names, str):
            names = [names]
        idx = [self.label_names.index(n) for n in names if n in self.label_names]
        return np.isin(self.exit_labels, idx)

    @property
    def visits(self):
        return self.visit_order >= 0


def resolve_scheme(scheme, scale):
    if scheme is None:
        scheme = WalkOnSpheres()
    if isinstance(scheme, WalkOnSpheres):
        eps = scheme.eps_abs if scheme.eps_abs is not None else EPS_ABS_REL * scale
        return 0, 0.0, eps
    if isinstance(scheme, FixedStep):
        h = scheme.h if scheme.h is not None else FIXED_STEP_REL * scale
        eps = scheme.eps_abs if scheme.eps_abs is not None else 1e-3 * h
        return (1 if scheme.far_field else 2), h, eps
    raise TypeError(f"unknown walk scheme {scheme!r}")


def simulate_walks(geometry, starts, rng, scheme=None, scale=1.0, max_steps=DEFAULT_MAX_STEPS, unit0=0):
    """Run one walk per start point against a compiled geometry."""
    starts = np.atleast_1d(np.asarray(starts, dtype=np.complex128))
    code, h, eps = resolve_scheme(scheme, scale)
    k0, k1 = rng.key
    ex, ey, lab, steps, status, seq = run_walks(
        np.ascontiguousarray(starts.real), np.ascontiguousarray(starts.imag), *geometry.arrays(),
        geometry.n_groups, code, h, eps, max_steps, k0, k1, np.uint64(rng.purpose), unit0,
    )
    if np.any(status != WALK_OK):
        bad = int(np.argmax(status != WALK_OK))
        raise WalkError(
            f"walk {bad} from {starts[bad]} exceeded the step budget ({max_steps}); likely a geometry bug"
        )
    return WalkBatch(ex + 1j * ey, lab, steps, seq[:, : geometry.n_groups], geometry.label_names)


def walk_to_boundary(domain, start, scheme=None, tracked_crosscuts=(), rng=None,
                     max_steps=DEFAULT_MAX_STEPS, targets=(), unit=0):
    """Single Brownian walk from ``start`` until it leaves ``domain``.

    ``targets`` are extra absorbing sets inside the domain (their labels are
    reported as exit labels); ``tracked_crosscuts`` are recorded on visit.
    """
    start = complex(start)
    if not bool(np.asarray(domain.contains(np.array([start])))[0]):
        raise ValueError(f"start point {start} is not inside the domain")
    if rng is None:
        rng = RngStream(0)
    tracked = [c.as_arc(f"crosscut{i}") if hasattr(c, "as_arc") else c for i, c in enumerate(tracked_crosscuts)]
    geom = compile_geometry(list(domain.boundary()) + list(targets), tracked)
    batch = simulate_walks(geom, [start], rng.with_purpose(PURPOSE_WALK), scheme, domain.scale, max_steps, unit)
    order = batch.visit_order[0]
    visited = [int(g) for g in np.argsort(order, kind="stable") if order[g] >= 0]
    return WalkOutcome(
        complex(batch.exit_points[0]),
        batch.label_names[int(batch.exit_labels[0])],
        visited,
        int(batch.steps[0]),
    )


# ------------------------------------------------------------------ bridge


@njit
def _bridge_refine(increments, dt, factor, state):
    n = increments.shape[0]
    out = np.empty(n * factor)
    sd = math.sqrt(dt / factor)
    for i in range(n):
        s = 0.0
        for j in range(factor):
            z = sd * rng_normal(state)
            out[i * factor + j] = z
            s += z
        shift = (s - increments[i]) / factor
        big = abs(increments[i])
        for j in range(factor):
            out[i * factor + j] -= shift
            big += abs(out[i * factor + j])
        # snap the free values to the float spacing at the largest magnitude
        # involved, so partial sums and the residual are exact (shift <= ulps)
        q = np.nextafter(big, np.inf) - big
        acc = 0.0
        for j in range(factor - 1):
            v = out[i * factor + j]
            if q > 1e-290:
                v = np.round(v / q) * q
            out[i * factor + j] = v
            acc += v
        last = increments[i] - acc
        # nudge by ulps so the left-to-right sum reproduces the input whenever
        # that is representable (always within one rounding otherwise)
        out[i * factor + factor - 1] = last
        for _ in range(4):
            s = acc + last
            if s == increments[i]:
                out[i * factor + factor - 1] = last
                break
            last = np.nextafter(last, np.inf if s < increments[i] else -np.inf)
    return out


def brownian_bridge_refine(increments, dt, factor, rng, unit=0):
    """Refine Brownian increments on a grid of step ``dt`` to step ``dt / factor``.

    Sub-increments are exact conditional (bridge) samples and each group of
    ``factor`` sums back (left to right) to the corresponding input increment,
    bit-exactly whenever floating point allows it and within one rounding
    otherwise.
    """
    factor = int(factor)
    if factor < 2:
        raise ValueError("factor must be >= 2")
    inc = np.ascontiguousarray(np.atleast_1d(np.asarray(increments, dtype=np.float64)))
    state = rng.with_purpose(PURPOSE_BRIDGE).kernel_state(unit)
    return _bridge_refine(inc, float(dt), factor, state)


# ------------------------------------------------------------------ angular SDE


@njit
def theta_euler(theta, dt, dw, mult, a):
    """One Euler step of dΘ = mult·a·cotΘ dt ± dW; nan if it leaves (0, π).

    The noise sign is -1 for the radial equation (dW = dU) and +1 for the
    two-sided one.
    """
    drift = mult * a * math.cos(theta) / math.sin(theta)
    sign = -1.0 if mult == 1 else 1.0
    new = theta + drift * dt + sign * dw
    if new <= 0.0 or new >= math.pi:
        return np.nan
    return new


@njit
def driving_increment(theta, dt, dw, mult, a):
    """Increment of the driving function U over a step starting at Θ = theta."""
    if mult == 1:
        return dw
    return -(a * math.cos(theta) / math.sin(theta) * dt + dw)


@njit
def _theta_path(theta0, t_max, dt_base, mult, a, state, record):
    cap = 1024
    ts = np.empty(cap)
    th = np.empty(cap)
    du = np.empty(cap)
    ts[0] = 0.0
    th[0] = theta0
    du[0] = 0.0
    n = 1
    t = 0.0
    theta = theta0
    sdt = np.empty(MAX_SPLIT_DEPTH + 2)
    sdw = np.empty(MAX_SPLIT_DEPTH + 2)
    while t < t_max * (1.0 - 1e-15):
        dt = min(dt_base, t_max - t)
        top = 0
        sdt[0] = dt
        sdw[0] = math.sqrt(dt) * rng_normal(state)
        top = 1
        while top > 0:
            top -= 1
            pdt = sdt[top]
            pdw = sdw[top]
            m = min(theta, math.pi - theta)
            new = np.nan
            if pdt <= THETA_SUBSTEP * m * m:
                new = theta_euler(theta, pdt, pdw, mult, a)
            if new != new:
                if top + 2 > MAX_SPLIT_DEPTH:
                    return ts, th, du, n, theta, t, pdt, 1
                # bridge split: first half pushed last so it is processed first
                half = 0.5 * pdt
                w1 = 0.5 * pdw + math.sqrt(0.25 * pdt) * rng_normal(state)
                sdt[top] = half
                sdw[top] = pdw - w1
                sdt[top + 1] = half
                sdw[top + 1] = w1
                top += 2
                continue
            inc = driving_increment(theta, pdt, pdw, mult, a)
            theta = new
            t += pdt
            if record:
                if n == cap:
                    cap *= 2
                    ts2 = np.empty(cap)
                    th2 = np.empty(cap)
                    du2 = np.empty(cap)
                    ts2[:n] = ts[:n]
                    th2[:n] = th[:n]
                    du2[:n] = du[:n]
                    ts, th, du = ts2, th2, du2
                ts[n] = t
                th[n] = theta
                du[n] = inc
                n += 1
    return ts, th, du, n, theta, t, 0.0, 0


@njit(parallel=True)
def theta_endpoints(n_paths, theta0, t_max, dt_base, mult, a, key0, key1, purpose, unit0=0):
    out = np.empty(n_paths)
    status = np.zeros(n_paths, dtype=np.int64)
    for i in prange(n_paths):
        state = np.empty(STATE_SIZE, dtype=np.uint64)
        rng_init(state, key0, key1, np.uint64(unit0 + i), purpose)
        _, _, _, _, theta, _, _, st = _theta_path(theta0, t_max, dt_base, mult, a, state, False)
        out[i] = theta
        status[i] = st
    return out, status


@dataclass
class ThetaPath:
    times: np.ndarray
    theta: np.ndarray
    driving_reconstruction: np.ndarray  # U increments; entry 0 is 0
    drift_multiple: int
    a: float

    def driving(self):
        return np.cumsum(self.driving_reconstruction)

    def reintegration_residual(self):
        """max |Θ_{k+1} - (Θ_k + a cotΘ_k dt - dU_k)| over steps."""
        th, dt = self.theta, np.diff(self.times)
        pred = th[:-1] + self.a / np.tan(th[:-1]) * dt - self.driving_reconstruction[1:]
        return float(np.max(np.abs(th[1:] - pred))) if dt.size else 0.0


def _check_theta_args(drift_multiple, a, theta0, t_max):
    if drift_multiple not in (1, 2):
        raise ValueError("drift_multiple must be 1 (radial) or 2 (two-sided radial)")
    if not (0.0 < theta0 < math.pi):
        raise ValueError("theta0 must lie in (0, pi)")
    if not (a >= 0.5):
        raise ValueError("a = 2/kappa must correspond to kappa in (0, 4]")
    if t_max <= 0:
        raise ValueError("t_max must be positive")


def simulate_theta(drift_multiple, a, theta0, t_max, rng, dt_base=1e-3, unit=0):
    """Euler–Maruyama path of the angular process with adaptive sub-stepping.

    Steps are bridge-split until dt <= 0.05·min(Θ, π-Θ)² and the step stays
    inside (0, π); failure beyond the split budget raises
    :class:`ThetaIntegrationError`.
    """
    _check_theta_args(drift_multiple, a, theta0, t_max)
    state = rng.with_purpose(PURPOSE_THETA).kernel_state(unit)
    ts, th, du, n, theta, t, bad_dt, status = _theta_path(
        float(theta0), float(t_max), float(dt_base), int(drift_multiple), float(a), state, True
    )
    if status:
        raise ThetaIntegrationError(
            f"theta left (0, pi) at t={t:.6g} (theta={theta:.3e}) even with dt={bad_dt:.3e}",
            t, theta, bad_dt,
        )
    return ThetaPath(ts[:n].copy(), th[:n].copy(), du[:n].copy(), int(drift_multiple), float(a))


def simulate_theta_endpoints(drift_multiple, a, theta0, t_max, n_paths, rng, dt_base=1e-3, unit0=0):
    """Θ at ``t_max`` for ``n_paths`` independent paths (path i uses unit unit0 + i)."""
    _check_theta_args(drift_multiple, a, theta0, t_max)
    k0, k1 = rng.key
    out, status = theta_endpoints(
        int(n_paths), float(theta0), float(t_max), float(dt_base), int(drift_multiple), float(a),
        k0, k1, np.uint64(PURPOSE_THETA), int(unit0),
    )
    if np.any(status):
        raise ThetaIntegrationError(f"{int(np.sum(status != 0))} paths failed to stay inside (0, pi)")
    return out
