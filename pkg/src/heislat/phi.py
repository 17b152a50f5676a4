"""Almost periodic components of the limiting error profile.

For each squarefree m free of prime factors p = 3 mod 4 there is a component
phi_m(t): a double series over moduli d and integers k of phases
sin/cos(2 pi (k/d) t - pi/4) weighted by representation counts of m k^2.
Truncated at d <= d_max the component is periodic with period lcm(1..d_max),
which makes exact-period quadrature possible downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arithmetic import (
    chi4,
    has_prime_factor_3_mod_4,
    is_squarefree,
    r2,
    r2_weighted,
    r2_weighted_chi,
    rho_chi_q,
    rho_q,
    two_square_reps,
    xi,
    zeta_value,
)

QUARTER = math.pi / 4


def component_vanishes(m: int) -> bool:
    """phi_m is identically zero unless m is squarefree with no p = 3 mod 4."""
    return not is_squarefree(m) or has_prime_factor_3_mod_4(m)


@dataclass
class PhiTruncation:
    """Term list of phi_m truncated to moduli d <= d_max and k <= k_max.

    Each term is coef * sin(2 pi (k/d) t - pi/4), or cosine when is_cos.
    """

    q: int
    m: int
    d_max: int
    k_max: int
    k: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    coef: np.ndarray = field(repr=False)
    is_cos: np.ndarray = field(repr=False)

    @property
    def period(self) -> int:
        return math.lcm(*range(1, self.d_max + 1))

    def __call__(self, t) -> np.ndarray:
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.zeros_like(t)
        for k, d, c, isc in zip(self.k, self.d, self.coef, self.is_cos):
            arg = 2 * math.pi * (k / d) * t - QUARTER
            out += c * (np.cos(arg) if isc else np.sin(arg))
        return out[0] if scalar else out

    def grid_values(self, n_points: int) -> np.ndarray:
        """Values at t_j = j * period / n_points for j = 0..n_points-1.

        n_points must be a multiple of the period; every term then repeats
        after n_points * d / period samples, so the oscillation is computed
        on one short cycle and tiled.
        """
        P = self.period
        if n_points % P:
            raise ValueError("n_points must be a multiple of the period")
        out = np.zeros(n_points)
        for k, d, c, isc in zip(self.k, self.d, self.coef, self.is_cos):
            cycle = n_points * int(d) // P
            j = np.arange(cycle, dtype=np.float64)
            arg = 2 * math.pi * (int(k) * j) / cycle * 1.0 - QUARTER
            block = c * (np.cos(arg) if isc else np.sin(arg))
            out.reshape(P // int(d), cycle)[:] += block
        return out


@lru_cache(maxsize=None)
def _reps_cached(n: int) -> tuple:
    return tuple(two_square_reps(n))


def build_phi(q: int, m: int, d_max: int = 128, k_max: int = 128) -> PhiTruncation:
    """Assemble the truncated term list of phi_m."""
    if q < 3 or m < 1:
        raise ValueError("need q >= 3 and m >= 1")
    ks, ds, coefs, coss = [], [], [], []
    if not component_vanishes(m):
        scale = 1.0 / m**0.75
        if q % 2 == 0:
            pref = rho_q(q) / (2 * math.pi) * scale
            for d in range(1, d_max + 1):
                x = xi(d, q)
                if not x:
                    continue
                for k in range(1, k_max + 1):
                    w = r2_weighted(m * k * k, d, q, list(_reps_cached(m * k * k)))
                    if w:
                        ks.append(k)
                        ds.append(d)
                        coefs.append(pref * x * w / (d ** (q - 1.5) * k**1.5))
                        coss.append(False)
        else:
            pref = 2 ** (q - 2) * rho_chi_q(q) / math.pi * scale
            sign = (-1) ** ((q + 1) // 2)
            for d in range(1, d_max + 1):
                cd = chi4(d)
                if cd:
                    for k in range(1, k_max + 1):
                        w = r2_weighted(m * k * k, d, q, list(_reps_cached(m * k * k)))
                        if w:
                            ks.append(k)
                            ds.append(d)
                            coefs.append(pref * cd * w / (d ** (q - 1.5) * k**1.5))
                            coss.append(False)
                elif d % 4 == 0:
                    for k in range(1, k_max + 1):
                        w = r2_weighted_chi(m * k * k, d, q, list(_reps_cached(m * k * k)))
                        if w:
                            ks.append(k)
                            ds.append(d)
                            coefs.append(pref * sign * 2**q * w / (d ** (q - 1.5) * k**1.5))
                            coss.append(True)
    return PhiTruncation(
        q=q,
        m=m,
        d_max=d_max,
        k_max=k_max,
        k=np.array(ks, dtype=np.int64),
        d=np.array(ds, dtype=np.int64),
        coef=np.array(coefs, dtype=np.float64),
        is_cos=np.array(coss, dtype=bool),
    )


def phi_value(q: int, m: int, t, d_max: int = 128, k_max: int = 128) -> np.ndarray:
    """phi_m(t) from the truncated series (d <= d_max, k <= k_max)."""
    return build_phi(q, m, d_max, k_max)(t)


def phi_truncated(q: int, m: int, t, n: int, k_max: int = 128) -> np.ndarray:
    """Modulus-truncated component: moduli d <= n only."""
    return build_phi(q, m, n, k_max)(t)


@lru_cache(maxsize=None)
def divisor_counts(limit: int) -> np.ndarray:
    tau_arr = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        tau_arr[d::d] += 1
    return tau_arr


@lru_cache(maxsize=None)
def _sum_tau_sq_full() -> float:
    # sum over k of tau(k)^2 / k^(3/2) = zeta(3/2)^4 / zeta(3)
    return zeta_value(1.5) ** 4 / zeta_value(3.0)


def _sum_tau_sq_partial(k_max: int) -> float:
    tau_arr = divisor_counts(k_max)[1:].astype(np.float64)
    k = np.arange(1, k_max + 1, dtype=np.float64)
    return float(np.sum(tau_arr**2 / k**1.5))


def _modulus_weight_sums(q: int, d_max: int) -> tuple[float, float]:
    """(partial, tail) of sum over d of |branch weight| d^(3/2-q).

    Branch weights: for even q, |xi(d;q)|; for odd q, |chi4(d)| on odd d and
    2^q on d = 0 mod 4.  Full sums reduce to zeta values.
    """
    s = q - 1.5
    z = zeta_value(s)
    if q % 2 == 0:
        full = 0.0
        full += (1 - 2.0**-s) * z  # d odd
        full += abs(xi(2, q)) * 2.0**-s * (1 - 2.0**-s) * z  # d = 2 mod 4
        full += abs(xi(4, q)) * 4.0**-s * z  # d = 0 mod 4
        partial = sum(abs(xi(d, q)) * d**-s for d in range(1, d_max + 1))
    else:
        full = (1 - 2.0**-s) * z + 2**q * 4.0**-s * z
        partial = 0.0
        for d in range(1, d_max + 1):
            if d % 2:
                partial += d**-s
            elif d % 4 == 0:
                partial += 2**q * d**-s
    return partial, max(full - partial, 0.0)


def amplitude_prefactor(q: int) -> float:
    """Prefactor of the phi series (absolute value, both parities)."""
    if q % 2 == 0:
        return rho_q(q) / (2 * math.pi)
    return 2 ** (q - 2) * rho_chi_q(q) / math.pi


def sup_bound(q: int, m: int) -> float:
    """Majorant for sup |phi_m| via r2(m k^2) <= r2(m) tau(k)^2."""
    if component_vanishes(m):
        return 0.0
    d_part, d_tail = _modulus_weight_sums(q, 0)
    return amplitude_prefactor(q) * r2(m) / m**0.75 * d_tail * _sum_tau_sq_full()


def tail_bound_for(q: int, m: int, d_max: int, k_max: int) -> float:
    """Bound on the sup-norm of the terms dropped by the (d_max, k_max) box.

    Uses |r2(m k^2, d; q)| <= r2(m) tau(k)^2, valid for the contributing m
    (squarefree, no prime factor 3 mod 4), and exact zeta expressions for
    the completed k and d sums.
    """
    if component_vanishes(m):
        return 0.0
    k_full = _sum_tau_sq_full()
    k_part = _sum_tau_sq_partial(k_max)
    k_tail = max(k_full - k_part, 0.0)
    d_part, d_tail = _modulus_weight_sums(q, d_max)
    dropped = d_part * k_tail + d_tail * k_full
    return amplitude_prefactor(q) * r2(m) / m**0.75 * dropped


def partial_sum_phi(q: int, M: int, x, d_max: int = 128, k_max: int = 128) -> np.ndarray:
    """Sum over m <= M of phi_m(sqrt(m) x^2), evaluated on an array of x.

    This is the Voronoi-type series' limit profile truncated to its first
    M components; its L2 distance (in x) to the normalized error shrinks
    as M grows.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    x2 = x * x
    out = np.zeros_like(x)
    for m in range(1, M + 1):
        if component_vanishes(m):
            continue
        trunc = build_phi(q, m, d_max, k_max)
        root = math.sqrt(m)
        for k, d, c, isc in zip(trunc.k, trunc.d, trunc.coef, trunc.is_cos):
            arg = 2 * math.pi * (int(k) * root / int(d)) * x2 - QUARTER
            out += c * (np.cos(arg) if isc else np.sin(arg))
    return out
