"""Shortest curvature-bounded paths with forward and reverse motion.

Computes the optimal word over the complete CSC / CCC / CCCC / CCSC /
CCSCC families, so the returned length is the exact minimum and therefore
usable as an admissible lower bound for car-like search.

Internally poses are normalized to a start at the origin and a unit
turning radius; curve segment parameters are angles, straight parameters
are in radius units.
"""
from __future__ import annotations

import math

try:
    from numba import njit as _njit

    def njit(fn):
        return _njit(cache=True, fastmath=False)(fn)
except ImportError:  # pragma: no cover - numba is an optional accelerator
    def njit(fn):
        return fn

EPS = 1e-10
Segment = tuple[str, float]  # ("L" | "S" | "R", signed normalized length)


def _mod2pi(x: float) -> float:
    v = math.fmod(x, 2.0 * math.pi)
    if v < -math.pi:
        v += 2.0 * math.pi
    elif v > math.pi:
        v -= 2.0 * math.pi
    return v


def _polar(x: float, y: float) -> tuple[float, float]:
    return math.hypot(x, y), math.atan2(y, x)


def _tau_omega(u, v, xi, eta, phi):
    delta = _mod2pi(u - v)
    a = math.sin(u) - math.sin(delta)
    b = math.cos(u) - math.cos(delta) - 1.0
    t1 = math.atan2(eta * a - xi * b, xi * a + eta * b)
    t2 = 2.0 * (math.cos(delta) - math.cos(v) - math.cos(u)) + 3.0
    tau = _mod2pi(t1 + math.pi) if t2 < 0 else _mod2pi(t1)
    omega = _mod2pi(tau - u + v - phi)
    return tau, omega


def _lp_sp_lp(x, y, phi):
    u, t = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if t >= -EPS:
        v = _mod2pi(phi - t)
        if v >= -EPS:
            return t, u, v
    return None


def _lp_sp_rp(x, y, phi):
    u1, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if u1 * u1 >= 4.0:
        u = math.sqrt(u1 * u1 - 4.0)
        theta = math.atan2(2.0, u)
        t = _mod2pi(t1 + theta)
        v = _mod2pi(t - phi)
        if t >= -EPS and v >= -EPS:
            return t, u, v
    return None


def _lp_rm_l(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    u1, theta = _polar(xi, eta)
    if u1 <= 4.0:
        u = -2.0 * math.asin(0.25 * u1)
        t = _mod2pi(theta + 0.5 * u + math.pi)
        v = _mod2pi(phi - t + u)
        if t >= -EPS and u <= EPS:
            return t, u, v
    return None


def _lp_rup_lum_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = 0.25 * (2.0 + math.hypot(xi, eta))
    if rho <= 1.0:
        u = math.acos(rho)
        t, v = _tau_omega(u, -u, xi, eta, phi)
        if t >= -EPS and v <= EPS:
            return t, u, v
    return None


def _lp_rum_lum_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = (20.0 - xi * xi - eta * eta) / 16.0
    if 0.0 <= rho <= 1.0:
        u = -math.acos(rho)
        if u >= -0.5 * math.pi:
            t, v = _tau_omega(u, u, xi, eta, phi)
            if t >= -EPS and v >= -EPS:
                return t, u, v
    return None


def _lp_rm_sm_lm(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho, theta = _polar(xi, eta)
    if rho >= 2.0:
        r = math.sqrt(rho * rho - 4.0)
        u = 2.0 - r
        t = _mod2pi(theta + math.atan2(r, -2.0))
        v = _mod2pi(phi - 0.5 * math.pi - t)
        if t >= -EPS and u <= EPS and v <= EPS:
            return t, u, v
    return None


def _lp_rm_sm_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho, theta = _polar(-eta, xi)
    if rho >= 2.0:
        t = theta
        u = 2.0 - rho
        v = _mod2pi(t + 0.5 * math.pi - phi)
        if t >= -EPS and u <= EPS and v <= EPS:
            return t, u, v
    return None


def _lp_rm_s_lm_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho, _ = _polar(xi, eta)
    if rho >= 2.0:
        u = 4.0 - math.sqrt(rho * rho - 4.0)
        if u <= EPS:
            t = _mod2pi(math.atan2((4.0 - u) * xi - 2.0 * eta,
                                   -2.0 * xi + (u - 4.0) * eta))
            v = _mod2pi(t - phi)
            if t >= -EPS and v >= -EPS:
                return t, u, v
    return None


class _Best:
    __slots__ = ("length", "segments")

    def __init__(self):
        self.length = math.inf
        self.segments: list[Segment] = []

    def offer(self, types: str, lengths: tuple[float, ...]):
        total = sum(abs(s) for s in lengths)
        if total < self.length - 1e-13:
            self.length = total
            self.segments = [(k, s) for k, s in zip(types, lengths) if abs(s) > EPS]


_HALF_PI = 0.5 * math.pi


def _csc(x, y, phi, best: _Best):
    r = _lp_sp_lp(x, y, phi)
    if r:
        best.offer("LSL", r)
    r = _lp_sp_lp(-x, y, -phi)
    if r:
        best.offer("LSL", (-r[0], -r[1], -r[2]))
    r = _lp_sp_lp(x, -y, -phi)
    if r:
        best.offer("RSR", r)
    r = _lp_sp_lp(-x, -y, phi)
    if r:
        best.offer("RSR", (-r[0], -r[1], -r[2]))
    r = _lp_sp_rp(x, y, phi)
    if r:
        best.offer("LSR", r)
    r = _lp_sp_rp(-x, y, -phi)
    if r:
        best.offer("LSR", (-r[0], -r[1], -r[2]))
    r = _lp_sp_rp(x, -y, -phi)
    if r:
        best.offer("RSL", r)
    r = _lp_sp_rp(-x, -y, phi)
    if r:
        best.offer("RSL", (-r[0], -r[1], -r[2]))


def _ccc(x, y, phi, best: _Best):
    r = _lp_rm_l(x, y, phi)
    if r:
        best.offer("LRL", r)
    r = _lp_rm_l(-x, y, -phi)
    if r:
        best.offer("LRL", (-r[0], -r[1], -r[2]))
    r = _lp_rm_l(x, -y, -phi)
    if r:
        best.offer("RLR", r)
    r = _lp_rm_l(-x, -y, phi)
    if r:
        best.offer("RLR", (-r[0], -r[1], -r[2]))
    # backwards variants: solve the reversed problem and flip the word
    xb = x * math.cos(phi) + y * math.sin(phi)
    yb = x * math.sin(phi) - y * math.cos(phi)
    r = _lp_rm_l(xb, yb, phi)
    if r:
        best.offer("LRL", (r[2], r[1], r[0]))
    r = _lp_rm_l(-xb, yb, -phi)
    if r:
        best.offer("LRL", (-r[2], -r[1], -r[0]))
    r = _lp_rm_l(xb, -yb, -phi)
    if r:
        best.offer("RLR", (r[2], r[1], r[0]))
    r = _lp_rm_l(-xb, -yb, phi)
    if r:
        best.offer("RLR", (-r[2], -r[1], -r[0]))


def _cccc(x, y, phi, best: _Best):
    r = _lp_rup_lum_rm(x, y, phi)
    if r:
        best.offer("LRLR", (r[0], r[1], -r[1], r[2]))
    r = _lp_rup_lum_rm(-x, y, -phi)
    if r:
        best.offer("LRLR", (-r[0], -r[1], r[1], -r[2]))
    r = _lp_rup_lum_rm(x, -y, -phi)
    if r:
        best.offer("RLRL", (r[0], r[1], -r[1], r[2]))
    r = _lp_rup_lum_rm(-x, -y, phi)
    if r:
        best.offer("RLRL", (-r[0], -r[1], r[1], -r[2]))
    r = _lp_rum_lum_rp(x, y, phi)
    if r:
        best.offer("LRLR", (r[0], r[1], r[1], r[2]))
    r = _lp_rum_lum_rp(-x, y, -phi)
    if r:
        best.offer("LRLR", (-r[0], -r[1], -r[1], -r[2]))
    r = _lp_rum_lum_rp(x, -y, -phi)
    if r:
        best.offer("RLRL", (r[0], r[1], r[1], r[2]))
    r = _lp_rum_lum_rp(-x, -y, phi)
    if r:
        best.offer("RLRL", (-r[0], -r[1], -r[1], -r[2]))


def _ccsc(x, y, phi, best: _Best):
    r = _lp_rm_sm_lm(x, y, phi)
    if r:
        best.offer("LRSL", (r[0], -_HALF_PI, r[1], r[2]))
    r = _lp_rm_sm_lm(-x, y, -phi)
    if r:
        best.offer("LRSL", (-r[0], _HALF_PI, -r[1], -r[2]))
    r = _lp_rm_sm_lm(x, -y, -phi)
    if r:
        best.offer("RLSR", (r[0], -_HALF_PI, r[1], r[2]))
    r = _lp_rm_sm_lm(-x, -y, phi)
    if r:
        best.offer("RLSR", (-r[0], _HALF_PI, -r[1], -r[2]))
    r = _lp_rm_sm_rm(x, y, phi)
    if r:
        best.offer("LRSR", (r[0], -_HALF_PI, r[1], r[2]))
    r = _lp_rm_sm_rm(-x, y, -phi)
    if r:
        best.offer("LRSR", (-r[0], _HALF_PI, -r[1], -r[2]))
    r = _lp_rm_sm_rm(x, -y, -phi)
    if r:
        best.offer("RLSL", (r[0], -_HALF_PI, r[1], r[2]))
    r = _lp_rm_sm_rm(-x, -y, phi)
    if r:
        best.offer("RLSL", (-r[0], _HALF_PI, -r[1], -r[2]))
    # backwards
    xb = x * math.cos(phi) + y * math.sin(phi)
    yb = x * math.sin(phi) - y * math.cos(phi)
    r = _lp_rm_sm_lm(xb, yb, phi)
    if r:
        best.offer("LSRL", (r[2], r[1], -_HALF_PI, r[0]))
    r = _lp_rm_sm_lm(-xb, yb, -phi)
    if r:
        best.offer("LSRL", (-r[2], -r[1], _HALF_PI, -r[0]))
    r = _lp_rm_sm_lm(xb, -yb, -phi)
    if r:
        best.offer("RSLR", (r[2], r[1], -_HALF_PI, r[0]))
    r = _lp_rm_sm_lm(-xb, -yb, phi)
    if r:
        best.offer("RSLR", (-r[2], -r[1], _HALF_PI, -r[0]))
    r = _lp_rm_sm_rm(xb, yb, phi)
    if r:
        best.offer("RSRL", (r[2], r[1], -_HALF_PI, r[0]))
    r = _lp_rm_sm_rm(-xb, yb, -phi)
    if r:
        best.offer("RSRL", (-r[2], -r[1], _HALF_PI, -r[0]))
    r = _lp_rm_sm_rm(xb, -yb, -phi)
    if r:
        best.offer("LSLR", (r[2], r[1], -_HALF_PI, r[0]))
    r = _lp_rm_sm_rm(-xb, -yb, phi)
    if r:
        best.offer("LSLR", (-r[2], -r[1], _HALF_PI, -r[0]))


def _ccscc(x, y, phi, best: _Best):
    r = _lp_rm_s_lm_rp(x, y, phi)
    if r:
        best.offer("LRSLR", (r[0], -_HALF_PI, r[1], -_HALF_PI, r[2]))
    r = _lp_rm_s_lm_rp(-x, y, -phi)
    if r:
        best.offer("LRSLR", (-r[0], _HALF_PI, -r[1], _HALF_PI, -r[2]))
    r = _lp_rm_s_lm_rp(x, -y, -phi)
    if r:
        best.offer("RLSRL", (r[0], -_HALF_PI, r[1], -_HALF_PI, r[2]))
    r = _lp_rm_s_lm_rp(-x, -y, phi)
    if r:
        best.offer("RLSRL", (-r[0], _HALF_PI, -r[1], _HALF_PI, -r[2]))


def reeds_shepp_segments(q0, q1, radius: float) -> list[Segment]:
    """Optimal segment word from pose q0 to q1; lengths normalized by radius."""
    dx = q1[0] - q0[0]
    dy = q1[1] - q0[1]
    dth = q1[2] - q0[2]
    c, s = math.cos(q0[2]), math.sin(q0[2])
    x = (c * dx + s * dy) / radius
    y = (-s * dx + c * dy) / radius
    best = _Best()
    _csc(x, y, dth, best)
    _ccc(x, y, dth, best)
    _cccc(x, y, dth, best)
    _ccsc(x, y, dth, best)
    _ccscc(x, y, dth, best)
    return best.segments


# -- fast length-only evaluation (hot path of the search heuristic) --------
#
# Mirrors the solvers above with branch-free result tuples so the whole
# evaluation can be jitted. test_reeds_shepp cross-checks both paths.

@njit
def _n_mod2pi(x):
    v = x % (2.0 * math.pi)
    if v > math.pi:
        v -= 2.0 * math.pi
    return v


@njit
def _n_tau_omega(u, v, xi, eta, phi):
    delta = _n_mod2pi(u - v)
    a = math.sin(u) - math.sin(delta)
    b = math.cos(u) - math.cos(delta) - 1.0
    t1 = math.atan2(eta * a - xi * b, xi * a + eta * b)
    t2 = 2.0 * (math.cos(delta) - math.cos(v) - math.cos(u)) + 3.0
    tau = _n_mod2pi(t1 + math.pi) if t2 < 0 else _n_mod2pi(t1)
    omega = _n_mod2pi(tau - u + v - phi)
    return tau, omega


@njit
def _n_lp_sp_lp(x, y, phi):
    u = math.hypot(x - math.sin(phi), y - 1.0 + math.cos(phi))
    t = math.atan2(y - 1.0 + math.cos(phi), x - math.sin(phi))
    if t >= -EPS:
        v = _n_mod2pi(phi - t)
        if v >= -EPS:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_lp_sp_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    u1 = math.hypot(xi, eta)
    t1 = math.atan2(eta, xi)
    if u1 * u1 >= 4.0:
        u = math.sqrt(u1 * u1 - 4.0)
        theta = math.atan2(2.0, u)
        t = _n_mod2pi(t1 + theta)
        v = _n_mod2pi(t - phi)
        if t >= -EPS and v >= -EPS:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_lp_rm_l(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    u1 = math.hypot(xi, eta)
    theta = math.atan2(eta, xi)
    if u1 <= 4.0:
        u = -2.0 * math.asin(0.25 * u1)
        t = _n_mod2pi(theta + 0.5 * u + math.pi)
        v = _n_mod2pi(phi - t + u)
        if t >= -EPS and u <= EPS:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_lp_rup_lum_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = 0.25 * (2.0 + math.hypot(xi, eta))
    if rho <= 1.0:
        u = math.acos(rho)
        t, v = _n_tau_omega(u, -u, xi, eta, phi)
        if t >= -EPS and v <= EPS:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_lp_rum_lum_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = (20.0 - xi * xi - eta * eta) / 16.0
    if 0.0 <= rho <= 1.0:
        u = -math.acos(rho)
        if u >= -0.5 * math.pi:
            t, v = _n_tau_omega(u, u, xi, eta, phi)
            if t >= -EPS and v >= -EPS:
                return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_lp_rm_sm_lm(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho = math.hypot(xi, eta)
    theta = math.atan2(eta, xi)
    if rho >= 2.0:
        r = math.sqrt(rho * rho - 4.0)
        u = 2.0 - r
        t = _n_mod2pi(theta + math.atan2(r, -2.0))
        v = _n_mod2pi(phi - 0.5 * math.pi - t)
        if t >= -EPS and u <= EPS and v <= EPS:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_lp_rm_sm_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = math.hypot(-eta, xi)
    theta = math.atan2(xi, -eta)
    if rho >= 2.0:
        t = theta
        u = 2.0 - rho
        v = _n_mod2pi(t + 0.5 * math.pi - phi)
        if t >= -EPS and u <= EPS and v <= EPS:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_lp_rm_s_lm_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = math.hypot(xi, eta)
    if rho >= 2.0:
        u = 4.0 - math.sqrt(rho * rho - 4.0)
        if u <= EPS:
            t = _n_mod2pi(math.atan2((4.0 - u) * xi - 2.0 * eta,
                                     -2.0 * xi + (u - 4.0) * eta))
            v = _n_mod2pi(t - phi)
            if t >= -EPS and v >= -EPS:
                return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit
def _n_length(x, y, phi):
    best = math.inf
    half_pi = 0.5 * math.pi
    for fx, fphi in ((x, phi), (-x, -phi)):
        for sy in (1.0, -1.0):
            a, b = fx, sy * y
            ph = fphi if sy > 0 else -fphi
            ok, t, u, v = _n_lp_sp_lp(a, b, ph)
            if ok:
                tot = abs(t) + abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_sp_rp(a, b, ph)
            if ok:
                tot = abs(t) + abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rm_l(a, b, ph)
            if ok:
                tot = abs(t) + abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rup_lum_rm(a, b, ph)
            if ok:
                tot = abs(t) + 2.0 * abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rum_lum_rp(a, b, ph)
            if ok:
                tot = abs(t) + 2.0 * abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rm_sm_lm(a, b, ph)
            if ok:
                tot = abs(t) + half_pi + abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rm_sm_rm(a, b, ph)
            if ok:
                tot = abs(t) + half_pi + abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rm_s_lm_rp(a, b, ph)
            if ok:
                tot = abs(t) + math.pi + abs(u) + abs(v)
                if tot < best:
                    best = tot
            # backwards variants of the asymmetric families
            bx = a * math.cos(ph) + b * math.sin(ph)
            by = a * math.sin(ph) - b * math.cos(ph)
            ok, t, u, v = _n_lp_rm_l(bx, by, ph)
            if ok:
                tot = abs(t) + abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rm_sm_lm(bx, by, ph)
            if ok:
                tot = abs(t) + half_pi + abs(u) + abs(v)
                if tot < best:
                    best = tot
            ok, t, u, v = _n_lp_rm_sm_rm(bx, by, ph)
            if ok:
                tot = abs(t) + half_pi + abs(u) + abs(v)
                if tot < best:
                    best = tot
    return best


@njit
def rs_length_metric(x0, y0, th0, x1, y1, th1, radius):
    """Jitted metric reeds-shepp length between two poses."""
    dx = x1 - x0
    dy = y1 - y0
    c = math.cos(th0)
    s = math.sin(th0)
    return _n_length((c * dx + s * dy) / radius,
                     (-s * dx + c * dy) / radius,
                     _n_mod2pi(th1 - th0)) * radius


def reeds_shepp_length(q0, q1, radius: float) -> float:
    """Metric length of the shortest curvature-bounded path between poses."""
    return rs_length_metric(q0[0], q0[1], q0[2], q1[0], q1[1], q1[2], radius)


def apply_segment(pose, kind: str, s: float, radius: float):
    """Advance a metric pose along one normalized segment."""
    x, y, th = pose
    if kind == "S":
        return (x + s * radius * math.cos(th), y + s * radius * math.sin(th), th)
    if kind == "L":
        return (x + radius * (math.sin(th + s) - math.sin(th)),
                y + radius * (math.cos(th) - math.cos(th + s)),
                th + s)
    if kind == "R":
        return (x + radius * (math.sin(th) - math.sin(th - s)),
                y + radius * (math.cos(th - s) - math.cos(th)),
                th - s)
    raise ValueError(f"unknown segment kind {kind!r}")
