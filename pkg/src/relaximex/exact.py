"""Exact Riemann solution of the ideal-gas Euler equations.

Used as a reference for shock-tube problems; it does not share code with the
relaxation solver. The scaled system with Mach parameter M is the standard one
for the pressure p / M^2, which is how ``mach`` enters here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


def _pressure_function(p, rho, u, pk, gamma):
    """Velocity jump across a shock (p > pk) or rarefaction (p <= pk)."""
    c = np.sqrt(gamma * pk / rho)
    if p > pk:
        A = 2.0 / ((gamma + 1.0) * rho)
        B = (gamma - 1.0) / (gamma + 1.0) * pk
        return (p - pk) * np.sqrt(A / (p + B))
    return 2.0 * c / (gamma - 1.0) * ((p / pk) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)


@dataclass
class ExactRiemann:
    """Star pressure and velocity plus a sampler for the self-similar solution."""

    left: tuple
    right: tuple
    gamma: float
    p_star: float
    u_star: float

    @classmethod
    def solve(cls, left, right, gamma=1.4) -> "ExactRiemann":
        rl, ul, pl = map(float, left)
        rr, ur, pr = map(float, right)
        cl, cr = np.sqrt(gamma * pl / rl), np.sqrt(gamma * pr / rr)
        if 2.0 * (cl + cr) / (gamma - 1.0) <= ur - ul:
            raise ValueError("initial data generate vacuum")

        def f(p):
            return (_pressure_function(p, rl, ul, pl, gamma)
                    + _pressure_function(p, rr, ur, pr, gamma) + ur - ul)

        lo, hi = 1e-14 * min(pl, pr), max(pl, pr)
        while f(hi) < 0:
            hi *= 2.0
        p_star = brentq(f, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)
        u_star = 0.5 * (ul + ur) + 0.5 * (_pressure_function(p_star, rr, ur, pr, gamma)
                                          - _pressure_function(p_star, rl, ul, pl, gamma))
        return cls((rl, ul, pl), (rr, ur, pr), gamma, p_star, u_star)

    def star_densities(self):
        g = self.gamma
        out = []
        for rho, _, p in (self.left, self.right):
            if self.p_star > p:
                q = self.p_star / p
                gm = (g - 1.0) / (g + 1.0)
                out.append(rho * (q + gm) / (gm * q + 1.0))
            else:
                out.append(rho * (self.p_star / p) ** (1.0 / g))
        return tuple(out)

    def wave_speeds(self):
        """(left wave, contact, right wave) speeds; rarefactions report their heads."""
        g = self.gamma
        (rl, ul, pl), (rr, ur, pr) = self.left, self.right
        cl, cr = np.sqrt(g * pl / rl), np.sqrt(g * pr / rr)
        if self.p_star > pl:
            sl = ul - cl * np.sqrt((g + 1) / (2 * g) * self.p_star / pl + (g - 1) / (2 * g))
        else:
            sl = ul - cl
        if self.p_star > pr:
            sr = ur + cr * np.sqrt((g + 1) / (2 * g) * self.p_star / pr + (g - 1) / (2 * g))
        else:
            sr = ur + cr
        return sl, self.u_star, sr

    def sample(self, xi):
        """(rho, u, p) at similarity coordinates ``xi = (x - x0) / t``."""
        xi = np.asarray(xi, dtype=float)
        g = self.gamma
        rho = np.empty_like(xi)
        u = np.empty_like(xi)
        p = np.empty_like(xi)
        rsl, rsr = self.star_densities()
        for side, sign in ((0, -1.0), (1, 1.0)):
            rk, uk, pk = self.left if side == 0 else self.right
            ck = np.sqrt(g * pk / rk)
            rs = rsl if side == 0 else rsr
            mask = (xi < self.u_star) if side == 0 else (xi >= self.u_star)
            x = xi[mask]
            r_, u_, p_ = (np.full_like(x, rs), np.full_like(x, self.u_star),
                          np.full_like(x, self.p_star))
            if self.p_star > pk:
                q = self.p_star / pk
                s = uk + sign * ck * np.sqrt((g + 1) / (2 * g) * q + (g - 1) / (2 * g))
                outside = sign * (x - s) > 0
                r_[outside], u_[outside], p_[outside] = rk, uk, pk
            else:
                head = uk + sign * ck
                cs = ck * (self.p_star / pk) ** ((g - 1) / (2 * g))
                tail = self.u_star + sign * cs
                outside = sign * (x - head) > 0
                fan = ~outside & (sign * (x - tail) > 0)
                r_[outside], u_[outside], p_[outside] = rk, uk, pk
                xf = x[fan]
                base = 2.0 / (g + 1) - sign * (g - 1) / ((g + 1) * ck) * (uk - xf)
                r_[fan] = rk * base ** (2.0 / (g - 1))
                u_[fan] = 2.0 / (g + 1) * (-sign * ck + (g - 1) / 2.0 * uk + xf)
                p_[fan] = pk * base ** (2.0 * g / (g - 1))
            rho[mask], u[mask], p[mask] = r_, u_, p_
        return rho, u, p


def exact_solution(left, right, x, t, x0=0.5, gamma=1.4, mach=1.0):
    """Sample the scaled-Euler Riemann solution at positions ``x`` and time ``t``.

    States are (rho, u, p) in scheme units; ``p`` is divided by M^2 for the
    standard solve and scaled back afterwards.
    """
    m2 = mach**2
    sol = ExactRiemann.solve((left[0], left[1], left[2] / m2),
                             (right[0], right[1], right[2] / m2), gamma)
    x = np.asarray(x, dtype=float)
    if t <= 0:
        is_left = x < x0
        return tuple(np.where(is_left, l, r) for l, r in zip(left, right))
    rho, u, p = sol.sample((x - x0) / t)
    return rho, u, p * m2


def cell_averaged_solution(left, right, grid, t, x0=0.5, gamma=1.4, mach=1.0, sub=16):
    """Cell averages of the exact solution by ``sub``-point midpoint quadrature."""
    h = grid.dx
    offsets = (np.arange(sub) + 0.5) / sub - 0.5
    xs = grid.centers(0)[:, None] + h * offsets[None, :]
    rho, u, p = exact_solution(left, right, xs.ravel(), t, x0, gamma, mach)
    return tuple(q.reshape(xs.shape).mean(axis=1) for q in (rho, u, p))
