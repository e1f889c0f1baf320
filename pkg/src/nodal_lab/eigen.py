"""Exact Laplace eigenfunctions on the model manifolds and their harmonic lift.

Torus eigenfunctions are real trigonometric polynomials
``sum a_k cos(k.x) + b_k sin(k.x)`` over lattice vectors with ``|k|^2 = lam``
(one representative per pair ``+-k``).  Sphere eigenfunctions are real
spherical harmonics of one degree ``l``, evaluated in a stereographic chart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PreconditionError
from .geometry import Manifold, chart_to_xyz

# --- lattice bookkeeping -------------------------------------------------


def _is_representative(k) -> bool:
    for c in k:
        if c != 0:
            return c > 0
    return False


def lattice_vectors(dim: int, lam: int) -> list:
    """All integer vectors with ``|k|^2 == lam`` in lexicographic order."""
    r = math.isqrt(lam)
    out = []
    if dim == 2:
        for n in range(-r, r + 1):
            m2 = lam - n * n
            m = math.isqrt(m2)
            if m * m == m2:
                out.extend([(n, -m), (n, m)] if m else [(n, 0)])
    elif dim == 3:
        for n in range(-r, r + 1):
            for m in range(-r, r + 1):
                k2 = lam - n * n - m * m
                if k2 < 0:
                    continue
                k = math.isqrt(k2)
                if k * k == k2:
                    out.extend([(n, m, -k), (n, m, k)] if k else [(n, m, 0)])
    else:
        raise PreconditionError(f"unsupported torus dimension {dim}")
    return out


def torus_representatives(dim: int, lam: int) -> list:
    """One lattice vector per pair ``+-k`` (first nonzero component positive)."""
    if lam == 0:
        return [(0,) * dim]
    return [k for k in lattice_vectors(dim, lam) if _is_representative(k)]


def eigenvalue_list(manifold, lam_max: float) -> list:
    """Eigenvalues ``<= lam_max`` with multiplicities, increasing."""
    manifold = Manifold.parse(manifold)
    if lam_max < 1:
        raise PreconditionError("lam_max must be >= 1")
    if manifold is Manifold.SPHERE2:
        out, l = [], 0
        while l * (l + 1) <= lam_max:
            out.append((l * (l + 1), 2 * l + 1))
            l += 1
        return out
    r = math.isqrt(int(math.floor(lam_max)))
    ax = np.arange(-r, r + 1) ** 2
    if manifold.dim == 2:
        norms = ax[:, None] + ax[None, :]
    else:
        norms = ax[:, None, None] + ax[None, :, None] + ax[None, None, :]
    counts = np.bincount(norms.ravel())
    return [(int(v), int(c)) for v, c in enumerate(counts[: int(lam_max) + 1]) if c]


def is_eigenvalue(manifold, lam) -> bool:
    manifold = Manifold.parse(manifold)
    if lam != int(lam) or lam < 0:
        return False
    lam = int(lam)
    if manifold is Manifold.SPHERE2:
        l = degree_of(lam)
        return l is not None
    return lam == 0 or bool(lattice_vectors(manifold.dim, lam))


def degree_of(lam: int):
    l = int((math.isqrt(4 * lam + 1) - 1) // 2)
    return l if l * (l + 1) == lam else None


def nearest_eigenvalue(manifold, target: float) -> int:
    manifold = Manifold.parse(manifold)
    if manifold is Manifold.SPHERE2:
        l = max(0, round((math.sqrt(4 * target + 1) - 1) / 2))
        cands = [m * (m + 1) for m in (l - 1, l, l + 1) if m >= 0]
        return min(cands, key=lambda v: (abs(v - target), v))
    lo = hi = int(round(target))
    while True:
        for v in (lo, hi):
            if v >= 1 and is_eigenvalue(manifold, v):
                return v
        lo, hi = lo - 1, hi + 1


# --- trigonometric polynomials ---------------------------------------------


@dataclass(frozen=True)
class TrigPolynomial:
    """Real trigonometric polynomial ``sum a_j cos(k_j.x) + b_j sin(k_j.x)``.

    Frequencies may be any real vectors; integer frequencies make the
    polynomial 2*pi periodic and enable FFT grid evaluation.
    """

    freqs: np.ndarray
    cos_coef: np.ndarray
    sin_coef: np.ndarray

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.freqs, dtype=float))
        a = np.asarray(self.cos_coef, dtype=float).ravel()
        b = np.asarray(self.sin_coef, dtype=float).ravel()
        if not (len(k) == len(a) == len(b)):
            raise PreconditionError("freqs and coefficients must have equal length")
        for name, v in (("freqs", k), ("cos_coef", a), ("sin_coef", b)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def dim(self) -> int:
        return self.freqs.shape[1]

    @property
    def complex_coef(self) -> np.ndarray:
        """``c_j`` with ``u = Re sum c_j exp(i k_j.x)``."""
        return self.cos_coef - 1j * self.sin_coef

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x)
        phase = x @ self.freqs.T
        return np.cos(phase) @ self.cos_coef + np.sin(phase) @ self.sin_coef

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x)
        phase = x @ self.freqs.T
        w = -np.sin(phase) * self.cos_coef + np.cos(phase) * self.sin_coef
        return w @ self.freqs

    def hessian_trace(self, x) -> np.ndarray:
        """Exact Laplacian, used only as a cross-check."""
        x = np.asarray(x)
        phase = x @ self.freqs.T
        k2 = np.sum(self.freqs ** 2, axis=1)
        return -(np.cos(phase) @ (self.cos_coef * k2) + np.sin(phase) @ (self.sin_coef * k2))

    def scaled(self, c: float) -> "TrigPolynomial":
        return TrigPolynomial(self.freqs, c * self.cos_coef, c * self.sin_coef)

    def translated(self, shift) -> "TrigPolynomial":
        """``x -> p(x - shift)``."""
        ks = self.freqs @ np.asarray(shift, dtype=float)
        cs, sn = np.cos(ks), np.sin(ks)
        a = self.cos_coef * cs - self.sin_coef * sn
        b = self.sin_coef * cs + self.cos_coef * sn
        return TrigPolynomial(self.freqs, a, b)

    def sup_bound(self) -> float:
        return float(np.sum(np.hypot(self.cos_coef, self.sin_coef)))

    def grid(self, n: int, offset: float = 0.5) -> np.ndarray:
        """Values on the periodic grid ``x_i = (i + offset) * 2pi / n`` (endpoint excluded).

        Uses one inverse FFT, exact up to rounding when ``n > 2 max|k_i|``.
        """
        kint = np.rint(self.freqs).astype(int)
        if not np.array_equal(kint, self.freqs):
            raise PreconditionError("FFT grid needs integer frequencies")
        if np.any(2 * np.abs(kint) >= n):
            raise PreconditionError(f"grid of {n} points aliases frequency {np.abs(kint).max()}")
        d = self.dim
        h = 2.0 * math.pi / n
        spec = np.zeros((n,) * d, dtype=complex)
        c = self.complex_coef * np.exp(1j * (kint @ np.full(d, offset * h)))
        for sign in (1, -1):
            idx = tuple(((sign * kint[:, a]) % n) for a in range(d))
            vals = 0.5 * (c if sign == 1 else np.conj(c))
            np.add.at(spec, idx, vals)
        return np.real(np.fft.ifftn(spec)) * n ** d

    def mass_on_cubes(self, centers, half_sides) -> np.ndarray:
        """Exact ``int_q p(x)^2 dx`` for axis-aligned cubes, vectorised over cubes.

        With ``z_j = c_j exp(i k_j.center)`` the integral is
        ``vol/2 Re sum_jj' [z_j z_j' S+_jj' + z_j conj(z_j') S-_jj']`` where
        ``S+-`` are products of sinc factors of ``(k_j +- k_j') a``.
        """
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        half_sides = np.broadcast_to(np.asarray(half_sides, dtype=float), (len(centers),))
        out = np.empty(len(centers))
        k = self.freqs
        c = self.complex_coef
        for a in np.unique(half_sides):
            sel = np.flatnonzero(half_sides == a)
            s_plus = np.prod(np.sinc((k[:, None, :] + k[None, :, :]) * a / math.pi), axis=-1)
            s_minus = np.prod(np.sinc((k[:, None, :] - k[None, :, :]) * a / math.pi), axis=-1)
            vol = (2.0 * a) ** self.dim
            chunk = max(1, 4_000_000 // max(1, len(c)))
            for s in range(0, len(sel), chunk):
                idx = sel[s:s + chunk]
                z = np.exp(1j * (centers[idx] @ k.T)) * c
                acc = np.sum(z * (z @ s_plus.T), axis=1) + np.sum(z * (np.conj(z) @ s_minus.T), axis=1)
                out[idx] = 0.5 * vol * acc.real
        return out


# --- spherical harmonics -------------------------------------------------------


def _legendre_stripped(l: int, z):
    """``Q[m](z) = Pbar_lm(theta) / sin(theta)^m`` for m = 0..l.

    ``Pbar`` are orthonormal associated Legendre functions (no Condon-Shortley
    phase), so that ``Pbar_lm(theta) e^{i m phi}`` has unit L2 norm on S^2.
    Computed by the standard three-term recurrence in the degree, started
    from the sectoral terms; stable to degree a few hundred.
    """
    z = np.asarray(z)
    out = []
    kmm = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(l + 1):
        if m > 0:
            kmm *= math.sqrt((2 * m + 1) / (2.0 * m))
        p_prev2 = np.full_like(z, kmm)
        if l == m:
            out.append(p_prev2)
            continue
        p_prev = math.sqrt(2 * m + 3) * z * kmm
        a_prev = math.sqrt(2 * m + 3)
        for n in range(m + 2, l + 1):
            a_n = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            p_prev2, p_prev = p_prev, a_n * (z * p_prev - p_prev2 / a_prev)
            a_prev = a_n
        out.append(p_prev)
    return out


def real_harmonic_sum(l: int, coef, xyz) -> np.ndarray:
    """``sum_m coef[m + l] Y_lm(x, y, z)`` for real orthonormal harmonics.

    ``Y_l0 = Q_0(z)``, ``Y_lm = sqrt2 Q_m(z) Re (x+iy)^m`` and
    ``Y_l,-m = sqrt2 Q_m(z) Im (x+iy)^m`` for m > 0.  Pure polynomial
    arithmetic, so complex input is allowed.
    """
    xyz = np.asarray(xyz)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    q = _legendre_stripped(l, z)
    total = coef[l] * q[0]
    cm, sm = np.ones_like(x), np.zeros_like(x)
    s2 = math.sqrt(2.0)
    for m in range(1, l + 1):
        cm, sm = x * cm - y * sm, x * sm + y * cm
        cp, cn = coef[l + m], coef[l - m]
        if cp or cn:
            total = total + s2 * q[m] * (cp * cm + cn * sm)
    return total


# --- eigenfunctions ---------------------------------------------------------


@dataclass(frozen=True)
class Eigenfunction:
    """Exact eigenfunction: a finite real mode expansion with one eigenvalue.

    ``modes`` holds ``(index, coefficient)`` pairs.  Torus indices are
    ``("cos", k)`` / ``("sin", k)`` with ``k`` a lattice representative;
    sphere indices are ``(l, m)`` with ``-l <= m <= l``.
    """

    manifold: Manifold
    lam: int
    modes: tuple

    def __post_init__(self):
        object.__setattr__(self, "manifold", Manifold.parse(self.manifold))
        modes = tuple((self._norm_index(i), float(c)) for i, c in self.modes)
        object.__setattr__(self, "modes", modes)
        if not modes or not any(c != 0.0 for _, c in modes):
            raise PreconditionError("eigenfunction needs at least one nonzero coefficient")
        for idx, _ in modes:
            if self._mode_eigenvalue(idx) != self.lam:
                raise PreconditionError(f"mode {idx} does not have eigenvalue {self.lam}")

    def _norm_index(self, idx):
        if self.manifold is Manifold.SPHERE2:
            return (int(idx[0]), int(idx[1]))
        kind, k = idx
        k = tuple(int(v) for v in k)
        if len(k) != self.manifold.dim:
            raise PreconditionError(f"mode {idx} has wrong dimension")
        if kind not in ("cos", "sin"):
            raise PreconditionError(f"unknown mode kind {kind!r}")
        if any(k) and not _is_representative(k):
            # cos(-k.x) = cos(k.x), sin(-k.x) = -sin(k.x); callers use the helpers.
            raise PreconditionError(f"mode vector {k} is not a canonical representative")
        return (kind, k)

    def _mode_eigenvalue(self, idx):
        if self.manifold is Manifold.SPHERE2:
            l, m = idx
            if abs(m) > l:
                raise PreconditionError(f"invalid harmonic index {idx}")
            return l * (l + 1)
        return sum(v * v for v in idx[1])

    @property
    def dim(self) -> int:
        return self.manifold.dim

    @property
    def sqrt_lam(self) -> float:
        return math.sqrt(self.lam)

    @cached_property
    def trig(self) -> TrigPolynomial:
        """Torus eigenfunctions as a :class:`TrigPolynomial`."""
        if self.manifold is Manifold.SPHERE2:
            raise PreconditionError("sphere eigenfunctions are not trigonometric polynomials")
        acc = {}
        for (kind, k), c in self.modes:
            a, b = acc.get(k, (0.0, 0.0))
            acc[k] = (a + c, b) if kind == "cos" else (a, b + c)
        ks = sorted(acc)
        return TrigPolynomial(np.array(ks, dtype=float),
                              np.array([acc[k][0] for k in ks]),
                              np.array([acc[k][1] for k in ks]))

    @cached_property
    def degree(self) -> int:
        return degree_of(self.lam)

    @cached_property
    def sphere_coef(self) -> np.ndarray:
        l = self.degree
        coef = np.zeros(2 * l + 1)
        for (_, m), c in self.modes:
            coef[l + m] += c
        return coef

    def __call__(self, p, chart: str | None = None) -> np.ndarray:
        return evaluate(self, p, chart)

    def gradient(self, p, chart: str | None = None) -> np.ndarray:
        return gradient(self, p, chart)

    def scaled(self, c: float) -> "Eigenfunction":
        return Eigenfunction(self.manifold, self.lam, tuple((i, c * v) for i, v in self.modes))

    def translated(self, shift) -> "Eigenfunction":
        """Torus translate ``x -> u(x - shift)``; still an eigenfunction."""
        t = self.trig.translated(shift)
        return from_trig(self.manifold, self.lam, t)

    def l2_norm(self) -> float:
        if self.manifold is Manifold.SPHERE2:
            return float(np.linalg.norm(self.sphere_coef))
        t = self.trig
        vol = self.manifold.volume
        zero = ~np.any(t.freqs != 0, axis=1)
        sq = np.where(zero, vol * t.cos_coef ** 2, 0.5 * vol * (t.cos_coef ** 2 + t.sin_coef ** 2))
        return float(math.sqrt(np.sum(sq)))

    def sup_bound(self) -> float:
        """Cheap upper bound for ``sup |u|`` (sum of mode amplitudes)."""
        if self.manifold is Manifold.SPHERE2:
            l = self.degree
            return float(np.sum(np.abs(self.sphere_coef)) * math.sqrt((2 * l + 1) / (4 * math.pi)))
        return self.trig.sup_bound()

    def lift(self) -> "LiftedFunction":
        return lift(self)


def from_trig(manifold, lam: int, t: TrigPolynomial) -> Eigenfunction:
    modes = []
    for k, a, b in zip(t.freqs.astype(int), t.cos_coef, t.sin_coef):
        k = tuple(int(v) for v in k)
        if a != 0.0 or not any(k):
            modes.append((("cos", k), a))
        if b != 0.0 and any(k):
            modes.append((("sin", k), b))
    return Eigenfunction(manifold, lam, tuple(modes))


def basis_indices(manifold, lam: int) -> list:
    """Index set of the real eigenspace basis, in a fixed order."""
    manifold = Manifold.parse(manifold)
    if not is_eigenvalue(manifold, lam):
        raise PreconditionError(f"{lam} is not an eigenvalue of {manifold.value}")
    lam = int(lam)
    if manifold is Manifold.SPHERE2:
        l = degree_of(lam)
        return [(l, m) for m in range(-l, l + 1)]
    reps = torus_representatives(manifold.dim, lam)
    if lam == 0:
        return [("cos", reps[0])]
    return [(kind, k) for k in reps for kind in ("cos", "sin")]


def synth_random(manifold, lam, seed: int) -> Eigenfunction:
    """Gaussian random eigenfunction normalised to unit L2 norm."""
    manifold = Manifold.parse(manifold)
    idx = basis_indices(manifold, lam)
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal(len(idx))
    u = Eigenfunction(manifold, int(lam), tuple(zip(idx, coef)))
    return u.scaled(1.0 / u.l2_norm())


def product_mode(*factors) -> Eigenfunction:
    """Torus product of 1D factors, e.g. ``product_mode(("sin", 3), ("sin", 4))``.

    ``"sin", 3`` in slot 0 means ``sin(3 x_0)``.  A frequency of 0 with ``"cos"``
    gives a constant factor.
    """
    dim = len(factors)
    if dim not in (2, 3):
        raise PreconditionError("product modes need 2 or 3 factors")
    # expand each factor in complex exponentials and multiply out
    terms = {(0,) * dim: 1.0 + 0j}
    for axis, (kind, n) in enumerate(factors):
        n = int(n)
        if kind == "cos":
            parts = [(n, 0.5), (-n, 0.5)]
        elif kind == "sin":
            parts = [(n, -0.5j), (-n, 0.5j)]
        else:
            raise PreconditionError(f"unknown factor {kind!r}")
        new = {}
        for k, c in terms.items():
            for s, w in parts:
                kk = k[:axis] + (k[axis] + s,) + k[axis + 1:]
                new[kk] = new.get(kk, 0) + c * w
        terms = new
    manifold = Manifold.TORUS2 if dim == 2 else Manifold.TORUS3
    lam = sum(int(n) ** 2 for _, n in factors)
    modes = []
    for k, c in sorted(terms.items()):
        if abs(c) < 1e-15:
            continue
        if not any(k):
            modes.append((("cos", k), c.real))
        elif _is_representative(k):
            # c e^{ikx} + conj(c) e^{-ikx} = 2 Re(c) cos(kx) - 2 Im(c) sin(kx)
            if abs(c.real) > 1e-15:
                modes.append((("cos", k), 2 * c.real))
            if abs(c.imag) > 1e-15:
                modes.append((("sin", k), -2 * c.imag))
    return Eigenfunction(manifold, lam, tuple(modes))


def sectoral(l: int, kind: str = "cos") -> Eigenfunction:
    """Sectoral harmonic ``~ sin^l(theta) cos(l phi)`` (or ``sin``), unit L2 norm."""
    m = l if kind == "cos" else -l
    return Eigenfunction(Manifold.SPHERE2, l * (l + 1), (((l, m), 1.0),))


def constant(manifold, value: float = 1.0) -> Eigenfunction:
    manifold = Manifold.parse(manifold)
    idx = (0, 0) if manifold is Manifold.SPHERE2 else ("cos", (0,) * manifold.dim)
    c = value * (math.sqrt(4 * math.pi) if manifold is Manifold.SPHERE2 else 1.0)
    return Eigenfunction(manifold, 0, ((idx, c),))


def evaluate(u: Eigenfunction, p, chart: str | None = None) -> np.ndarray:
    """Value of ``u`` at chart points ``p`` of shape ``(..., dim)``."""
    if u.manifold is Manifold.SPHERE2:
        xyz = chart_to_xyz(p, chart or "north")
        return real_harmonic_sum(u.degree, u.sphere_coef, xyz)
    return u.trig(np.asarray(p, dtype=float))


def gradient(u: Eigenfunction, p, chart: str | None = None) -> np.ndarray:
    """Gradient of ``u`` in chart coordinates.

    Tori: analytic.  Sphere: complex-step differentiation of the polynomial
    form, exact to rounding.
    """
    if u.manifold is not Manifold.SPHERE2:
        return u.trig.gradient(np.asarray(p, dtype=float))
    p = np.asarray(p, dtype=float)
    h = 1e-30
    out = np.empty(p.shape)
    for a in range(2):
        pc = p.astype(complex)
        pc[..., a] += 1j * h
        out[..., a] = np.imag(evaluate(u, pc, chart)) / h
    return out


def riemannian_grad_norm(u: Eigenfunction, p, chart: str | None = None) -> np.ndarray:
    g = np.linalg.norm(gradient(u, p, chart), axis=-1)
    if u.manifold is Manifold.SPHERE2:
        from .geometry import conformal_factor

        g = g / conformal_factor(p)
    return g


# --- harmonic lift ------------------------------------------------------------


@dataclass(frozen=True)
class LiftedFunction:
    """``h(xi, t) = u(xi) exp(sqrt(lam) t)``, harmonic on ``M x R``."""

    base: Eigenfunction

    @property
    def lam(self) -> int:
        return self.base.lam

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def manifold(self) -> Manifold:
        return self.base.manifold

    def __call__(self, p, chart: str | None = None) -> np.ndarray:
        p = np.asarray(p)
        return evaluate(self.base, p[..., :-1], chart) * np.exp(self.base.sqrt_lam * p[..., -1])

    def gradient(self, p, chart: str | None = None) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        e = np.exp(self.base.sqrt_lam * p[..., -1])
        g = gradient(self.base, p[..., :-1], chart) * e[..., None]
        gt = evaluate(self.base, p[..., :-1], chart) * e * self.base.sqrt_lam
        return np.concatenate([g, gt[..., None]], axis=-1)

    def scaled(self, c: float) -> "LiftedFunction":
        return LiftedFunction(self.base.scaled(c))

    def t_mass(self, t_center: float, half: float) -> float:
        """``int_{t_center-half}^{t_center+half} e^{2 sqrt(lam) t} dt`` in closed form."""
        s = self.base.sqrt_lam
        return math.exp(2 * s * t_center) * math.sinh(2 * s * half) / s


def lift(u: Eigenfunction) -> LiftedFunction:
    if u.lam <= 0:
        raise PreconditionError("the lift of a lam = 0 eigenfunction is constant in t")
    return LiftedFunction(u)


def random_trig_polynomial(dim: int, n_terms: int, max_freq: float, seed: int,
                           integer: bool = False) -> TrigPolynomial:
    """Random trigonometric polynomial (not an eigenfunction), for property tests."""
    rng = np.random.default_rng(seed)
    if integer:
        k = rng.integers(-int(max_freq), int(max_freq) + 1, size=(n_terms, dim)).astype(float)
    else:
        k = rng.uniform(-max_freq, max_freq, size=(n_terms, dim))
    return TrigPolynomial(k, rng.standard_normal(n_terms), rng.standard_normal(n_terms))
