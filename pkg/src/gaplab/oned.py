"""One-dimensional eigenvalue solvers with measure potentials and log-concave
weights, the tangent-increment constraint class, and the sharp bound checks
around the values 2, 3 and 4.

Conventions
-----------
* The canonical interval is I_PI = (-pi/2, pi/2).
* A measure potential is density samples plus point atoms plus a finiteness
  domain; the problem is posed on the finiteness domain (the potential is
  treated as +inf outside, i.e. Dirichlet conditions move inward).
* Eigenvalues are reported together with a Richardson extrapolation from
  grids n and 2n (assuming second order) and the two-grid error estimate
  |value(2n) - value(n)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    DegenerateWeight,
    NotLogConcave,
    PreconditionError,
    SolverFailed,
)

EPS_A = 1e-8        # slack in the tangent-increment admissibility test
EPS_MONO = 1e-10    # monotonicity slack for profiles
EPS_W = 1e-14       # relative floor for vanishing weights
DEFAULT_N = 2048


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise PreconditionError(f"empty interval ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.a, other.a), min(self.b, other.b))


I_PI = Interval(-math.pi / 2, math.pi / 2)


def centered(length: float) -> Interval:
    return Interval(-length / 2, length / 2)


@dataclass
class GridFunction1D:
    """Uniform-grid samples of a scalar function on an interval."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.x.shape != self.values.shape:
            raise PreconditionError("grid/value shape mismatch")

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])

    def __call__(self, t):
        return np.interp(t, self.x, self.values)


@dataclass
class MeasurePotential:
    """Nonnegative Borel measure on an interval: absolutely continuous density
    samples, point atoms, and a finiteness domain outside which it is +inf."""

    interval: Interval
    dom: Interval
    density: np.ndarray
    atoms: tuple = ()
    density_fn: object = None   # optional exact evaluator, overrides samples

    def __post_init__(self):
        self.density = np.asarray(self.density, dtype=float)
        if not (self.interval.a - 1e-12 <= self.dom.a and self.dom.b <= self.interval.b + 1e-12):
            raise PreconditionError("finiteness domain exceeds the grid interval")
        finite = self.density[np.isfinite(self.density)]
        if finite.size and finite.min() < -1e-12 * max(1.0, abs(finite).max()):
            raise PreconditionError("negative density")
        if any(m < 0 for _, m in self.atoms):
            raise PreconditionError("negative atom mass")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.interval.a, self.interval.b, len(self.density))

    def density_at(self, x: np.ndarray) -> np.ndarray:
        if self.density_fn is not None:
            return np.asarray(self.density_fn(x), dtype=float)
        g = self.grid
        vals = np.where(np.isfinite(self.density), self.density, 0.0)
        return np.interp(x, g, vals)

    @classmethod
    def from_callable(cls, fn, dom: Interval, interval: Interval = I_PI, n: int = 4097, atoms=()):
        x = np.linspace(interval.a, interval.b, n)
        inside = (x > dom.a) & (x < dom.b)
        vals = np.zeros(n)
        vals[inside] = fn(x[inside])
        return cls(interval, dom, vals, tuple(atoms), density_fn=fn)

    @classmethod
    def zero(cls, dom: Interval = I_PI):
        return cls(dom, dom, np.zeros(9), (), density_fn=lambda x: np.zeros_like(x))

    def to_json(self) -> dict:
        return {
            "grid": {"a": self.interval.a, "b": self.interval.b, "n": len(self.density)},
            "density": [float(v) for v in self.density],
            "atoms": [[float(x), float(m)] for x, m in self.atoms],
            "dom": [self.dom.a, self.dom.b],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MeasurePotential":
        g = data["grid"]
        interval = Interval(float(g["a"]), float(g["b"]))
        dom = Interval(*map(float, data.get("dom", [g["a"], g["b"]])))
        density = np.asarray(data.get("density", np.zeros(int(g["n"]))), dtype=float)
        atoms = tuple((float(x), float(m)) for x, m in data.get("atoms", []))
        return cls(interval, dom, density, atoms)


@dataclass
class Weight1D:
    """Positive weight samples on a uniform grid."""

    interval: Interval
    samples: np.ndarray
    fn: object = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or len(self.samples) < 3:
            raise PreconditionError("need at least 3 weight samples")
        if self.samples.max() <= 0:
            raise DegenerateWeight("weight has no positive part")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.interval.a, self.interval.b, len(self.samples))

    def at(self, x: np.ndarray) -> np.ndarray:
        if self.fn is not None:
            return np.asarray(self.fn(x), dtype=float)
        return np.interp(x, self.grid, self.samples)

    @classmethod
    def from_callable(cls, fn, interval: Interval, n: int = 4097):
        x = np.linspace(interval.a, interval.b, n)
        return cls(interval, fn(x), fn=fn)

    def is_log_concave(self, tol: float = 1e-8):
        """Discrete log-concavity: second differences of log(samples) on the
        positive part must not exceed tol (scaled by the log range)."""
        s = self.samples
        pos = s > EPS_W * s.max()
        i0, i1 = np.argmax(pos), len(s) - np.argmax(pos[::-1])
        ls = np.log(s[i0:i1])
        if len(ls) < 3:
            return True, 0.0
        d2 = ls[2:] - 2 * ls[1:-1] + ls[:-2]
        worst = float(d2.max())
        return worst <= tol * (1.0 + np.ptp(ls)), worst


@dataclass
class MonotoneProfile:
    """Grid samples of an increasing extended-real function on I_PI with a
    finiteness domain; the carrier of the tangent-increment constraint
    inherited from log-derivatives of first eigenfunctions."""

    x: np.ndarray
    values: np.ndarray
    dom: Interval

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        fx, fv = self.finite_part()
        if len(fv) >= 2:
            rng = max(1.0, float(fv[-1] - fv[0]))
            if np.any(np.diff(fv) < -EPS_MONO * rng):
                raise PreconditionError("profile not nondecreasing on its domain")

    def finite_part(self):
        m = np.isfinite(self.values)
        return self.x[m], self.values[m]

    def interp(self, t):
        fx, fv = self.finite_part()
        return np.interp(t, fx, fv)

    @classmethod
    def from_callable(cls, fn, dom: Interval = I_PI, n: int = 4096):
        x = np.linspace(I_PI.a, I_PI.b, n + 1)
        vals = np.full(n + 1, np.inf)
        vals[x < dom.a] = -np.inf
        inside = (x >= dom.a) & (x <= dom.b)
        # keep strictly inside the open domain where fn may blow up
        safe = inside.copy()
        safe[inside] = (x[inside] > dom.a + 1e-12) & (x[inside] < dom.b - 1e-12)
        vals[safe] = fn(x[safe])
        vals[inside & ~safe] = np.interp(x[inside & ~safe], x[safe], vals[safe])
        return cls(x, vals, dom)

    def shifted(self, c: float) -> "MonotoneProfile":
        return MonotoneProfile(self.x, self.values + c, self.dom)

    def potential(self, factor_der: float = 1.0, factor_sq: float = 1.0) -> MeasurePotential:
        """Measure factor_der * psi' + factor_sq * psi^2.

        Cell increments of the sampled profile carry the derivative measure:
        increments below the jump threshold become piecewise-constant density,
        the rest become point atoms at the cell midpoints."""
        fx, fv = self.finite_part()
        if len(fx) < 3:
            raise PreconditionError("profile domain too small")
        hs = float(fx[1] - fx[0])
        inc = np.diff(fv)
        theta = max(1e-12, math.sqrt(hs / (fx[-1] - fx[0])) * float(fv[-1] - fv[0]))
        jumps = inc > theta
        pc = np.where(jumps, 0.0, inc) / hs
        mids = 0.5 * (fx[:-1] + fx[1:])
        atoms = tuple(
            (float(m), float(factor_der * dv))
            for m, dv in zip(mids[jumps], inc[jumps])
        )
        edges = fx

        def density(t):
            t = np.asarray(t, dtype=float)
            idx = np.clip(np.searchsorted(edges, t) - 1, 0, len(pc) - 1)
            psi_t = np.interp(t, fx, fv)
            return factor_der * pc[idx] + factor_sq * psi_t**2

        n = len(self.x)
        xall = np.linspace(I_PI.a, I_PI.b, n)
        inside = (xall > fx[0]) & (xall < fx[-1])
        samples = np.zeros(n)
        samples[inside] = density(xall[inside])
        return MeasurePotential(I_PI, Interval(float(fx[0]), float(fx[-1])),
                                samples, atoms, density_fn=density)


@dataclass
class EigenResult1D:
    value: float
    eigenfunction: GridFunction1D
    grid_size: int
    extrapolated_value: float
    error_estimate: float
    endpoint_blowup: bool = False


@dataclass
class AdmissibilityReport:
    ok: bool
    worst_pair: tuple
    worst_deficit: float


def is_admissible_profile(psi: MonotoneProfile, eps: float = EPS_A) -> AdmissibilityReport:
    """Test the increment constraint psi(y) - psi(x) >= 2 tan((y-x)/2) over
    all grid pairs x < y in the finiteness domain; returns the most violated
    pair (largest deficit of the constraint)."""
    fx, fv = psi.finite_part()
    worst = (None, None)
    worst_def = -np.inf
    n = len(fx)
    chunk = max(1, int(4e6) // max(n, 1))
    for s in range(0, n - 1, chunk):
        e = min(n - 1, s + chunk)
        dx = fx[None, s + 1:] - fx[s:e, None]
        dv = fv[None, s + 1:] - fv[s:e, None]
        upper = dx > 0
        need = 2.0 * np.tan(np.where(upper, dx, 0.0) / 2.0)
        deficit = np.where(upper, need - dv, -np.inf)
        k = np.unravel_index(np.argmax(deficit), deficit.shape)
        if deficit[k] > worst_def:
            worst_def = float(deficit[k])
            worst = (float(fx[s + k[0]]), float(fx[s + 1 + k[1]]))
    return AdmissibilityReport(worst_def <= eps, worst, worst_def)


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

def _dirichlet_value(lo, hi, m, q: MeasurePotential, want_vec=False):
    h = (hi - lo) / (m + 1)
    x = lo + h * np.arange(1, m + 1)
    diag = 2.0 / h**2 + q.density_at(x)
    for ax, mass in q.atoms:
        if lo < ax < hi and mass > 0:
            i = int(np.clip(round((ax - lo) / h) - 1, 0, m - 1))
            diag[i] += mass / h
    off = np.full(m - 1, -1.0 / h**2)
    try:
        if want_vec:
            w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
            return float(w[0]), x, v[:, 0], h
        w = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0), eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise SolverFailed(f"tridiagonal eigensolve failed: {exc}") from exc
    return float(w[0])


def dirichlet_eig1(I: Interval, q: MeasurePotential, n: int = DEFAULT_N) -> EigenResult1D:
    """Smallest eigenvalue of -v'' + q v = lambda v with v = 0 at the ends of
    the finiteness domain (symmetric tridiagonal finite differences; atoms are
    lumped onto the nearest grid node)."""
    if n < 64:
        raise PreconditionError("grid size must be at least 64")
    lo, hi = max(I.a, q.dom.a), min(I.b, q.dom.b)
    if not hi > lo:
        raise PreconditionError("empty finiteness domain")
    v1, x, vec, h = _dirichlet_value(lo, hi, n, q, want_vec=True)
    v2 = _dirichlet_value(lo, hi, 2 * n, q)
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    nrm = math.sqrt(h * float(np.dot(vec, vec)))
    fn = GridFunction1D(x, vec / nrm)
    dens_ends = q.density_at(np.array([x[0], x[-1]]))
    blowup = bool(np.max(dens_ends) > 10.0 * 2.0 / h**2)
    return EigenResult1D(v1, fn, n, (4 * v2 - v1) / 3.0, abs(v2 - v1), blowup)


def _neumann_values(lo, hi, m, weight_at, k=2, want_vec=False):
    h = (hi - lo) / m
    xc = lo + h * (np.arange(m) + 0.5)
    xe = lo + h * np.arange(1, m)
    pe = np.asarray(weight_at(xe), dtype=float)
    pc = np.asarray(weight_at(xc), dtype=float)
    floor = EPS_W * max(pe.max(), pc.max())
    pe = np.maximum(pe, floor)
    pc = np.maximum(pc, floor)
    diag = np.zeros(m)
    diag[:-1] += pe
    diag[1:] += pe
    diag /= h**2
    off = -pe / h**2
    s = 1.0 / np.sqrt(pc)
    try:
        if want_vec:
            w, vecs = eigh_tridiagonal(diag * s * s, off * s[:-1] * s[1:],
                                       select="i", select_range=(0, k - 1))
            return w, xc, vecs * s[:, None], h, pc
        w = eigh_tridiagonal(diag * s * s, off * s[:-1] * s[1:],
                             select="i", select_range=(0, k - 1), eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise SolverFailed(f"tridiagonal eigensolve failed: {exc}") from exc
    return w


def neumann_weighted_eig1(I: Interval, p: Weight1D, n: int = DEFAULT_N) -> EigenResult1D:
    """Smallest nonzero eigenvalue of -(p v')' = mu p v with natural boundary
    conditions; the constant mode (eigenvalue ~0) is discarded."""
    lo, hi = max(I.a, p.interval.a), min(I.b, p.interval.b)
    if not hi > lo:
        raise PreconditionError("empty weight domain")
    sm = p.samples
    interior = sm[1:-1] if len(sm) > 2 else sm
    if np.mean(interior <= EPS_W * sm.max()) > 0.05:
        raise DegenerateWeight("weight vanishes on a set of positive measure")
    w1, xc, vecs, h, pc = _neumann_values(lo, hi, n, p.at, want_vec=True)
    w2 = _neumann_values(lo, hi, 2 * n, p.at)
    mu1, mu1f = float(w1[1]), float(w2[1])
    vec = vecs[:, 1]
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    nrm = math.sqrt(h * float(np.dot(vec, vec)))
    fn = GridFunction1D(xc, vec / nrm)
    return EigenResult1D(mu1, fn, n, (4 * mu1f - mu1) / 3.0, abs(mu1f - mu1))


def measure_from_weight(p: Weight1D, tol: float = 1e-8):
    """Split a positive log-concave weight into its profile
    psi = -(log p^(1/2))' and the measure psi' + psi^2.

    Jump discontinuities of psi (from kinks of log p) become atoms with mass
    equal to the jump; the rest is carried as density."""
    s = p.samples
    g = p.grid
    pos = s > EPS_W * s.max()
    i0, i1 = np.argmax(pos), len(s) - np.argmax(pos[::-1])
    if i1 - i0 < 4:
        raise DegenerateWeight("weight has too small a positive part")
    xs, vals = g[i0:i1], np.log(s[i0:i1])
    hs = float(xs[1] - xs[0])
    psi_mid = -np.diff(vals) / (2.0 * hs)
    rng = max(1.0, float(np.ptp(psi_mid)))
    if np.any(np.diff(psi_mid) < -tol * rng):
        raise NotLogConcave("negative mass in the profile derivative")
    # profile at nodes: average adjacent midpoint values, one-sided at the ends
    node_vals = np.empty(len(xs))
    node_vals[1:-1] = 0.5 * (psi_mid[:-1] + psi_mid[1:])
    node_vals[0], node_vals[-1] = psi_mid[0], psi_mid[-1]
    node_vals = np.maximum.accumulate(node_vals)  # iron out roundoff wiggles
    full = np.full(len(g), np.inf)
    full[g < xs[0]] = -np.inf
    full[i0:i1] = node_vals
    profile = MonotoneProfile(g, full, Interval(float(xs[0]), float(xs[-1])))
    return profile, profile.potential()


# ---------------------------------------------------------------------------
# Canonical potentials and profile generators
# ---------------------------------------------------------------------------

def tan_profile(n: int = 4096) -> MonotoneProfile:
    return MonotoneProfile.from_callable(np.tan, I_PI, n)


def scaled_tan_profile(s: float, n: int = 4096) -> MonotoneProfile:
    if s < 1.0:
        raise PreconditionError("scale below 1 leaves the admissible class")
    return MonotoneProfile.from_callable(lambda x: np.tan(s * x) / s,
                                         centered(math.pi / s), n)


def truncated_tan_profile(d: float, n: int = 4096) -> MonotoneProfile:
    """tan restricted to the centered interval of length d <= pi."""
    if not 0 < d <= math.pi:
        raise PreconditionError("domain length must lie in (0, pi]")
    return MonotoneProfile.from_callable(np.tan, centered(d), n)


def random_admissible_profile(rng: np.random.Generator, n: int = 2048) -> MonotoneProfile:
    """Seeded admissible profile: tan(s x)/s on its natural domain, an
    additive constant, and up to two upward steps (step mixtures keep the
    increment constraint since steps only add to increments)."""
    s = 1.0 if rng.random() < 0.3 else float(rng.uniform(1.0, 2.5))
    c = float(rng.uniform(-1.0, 1.0))
    dom = centered(math.pi / s)
    k = int(rng.integers(0, 3))
    locs = np.sort(rng.uniform(dom.a + 0.1 * dom.length, dom.b - 0.1 * dom.length, size=k))
    heights = np.abs(rng.normal(0.0, 0.6, size=k))

    def fn(x):
        out = np.tan(s * np.asarray(x)) / s + c
        for L, hgt in zip(locs, heights):
            out = out + hgt * (np.asarray(x) >= L)
        return out

    return MonotoneProfile.from_callable(fn, dom, n)


def canonical_potential(name: str) -> MeasurePotential:
    """Named benchmark potentials on I_PI with exact densities."""
    table = {
        "zero": lambda x: np.zeros_like(x),
        "tan2": lambda x: 2.0 * np.tan(x) ** 2,
        "tan3": lambda x: 1.0 + 2.0 * np.tan(x) ** 2,
        "tan4": lambda x: 2.0 * (1.0 + np.tan(x) ** 2),
    }
    if name not in table:
        raise ValueError(f"unknown potential {name!r}; choose from {sorted(table)}")
    return MeasurePotential.from_callable(table[name], I_PI)


# ---------------------------------------------------------------------------
# Bound checks
# ---------------------------------------------------------------------------

def check_sharp_lower_bound(psi: MonotoneProfile, n: int = DEFAULT_N) -> dict:
    """lambda_1(I_d, psi' + psi^2) >= 3 for admissible profiles, with the
    truncation excess recorded against (pi - d)^3."""
    adm = is_admissible_profile(psi)
    if not adm.ok:
        raise PreconditionError(f"profile violates the increment constraint by {adm.worst_deficit:.2e}")
    res = dirichlet_eig1(I_PI, psi.potential(), n)
    tol = 3.0 * res.error_estimate
    d = psi.dom.length
    excess = res.extrapolated_value - 3.0
    out = {
        "lambda1": res.value,
        "extrapolated": res.extrapolated_value,
        "error_estimate": res.error_estimate,
        "tol": tol,
        "dom_length": d,
        "excess": excess,
        "passed": res.extrapolated_value >= 3.0 - tol,
    }
    if d < math.pi - 1e-9:
        out["implied_truncation_constant"] = excess / (math.pi - d) ** 3
    return out


def check_split_lower_bounds(psi: MonotoneProfile, n: int = DEFAULT_N) -> dict:
    """lambda_1(2 psi^2) >= 2, lambda_1(2 psi') >= 4, and the concavity
    splitting lambda_1(psi' + psi^2) >= (lambda_1(2 psi') + lambda_1(2 psi^2))/2."""
    adm = is_admissible_profile(psi)
    if not adm.ok:
        raise PreconditionError(f"profile violates the increment constraint by {adm.worst_deficit:.2e}")
    sq = dirichlet_eig1(I_PI, psi.potential(factor_der=0.0, factor_sq=2.0), n)
    der = dirichlet_eig1(I_PI, psi.potential(factor_der=2.0, factor_sq=0.0), n)
    both = dirichlet_eig1(I_PI, psi.potential(), n)
    tol_sq, tol_der = 3.0 * sq.error_estimate, 3.0 * der.error_estimate
    tol_split = 3.0 * (both.error_estimate + 0.5 * (sq.error_estimate + der.error_estimate))
    half_sum = 0.5 * (sq.extrapolated_value + der.extrapolated_value)
    return {
        "lambda1_sq": sq.extrapolated_value,
        "lambda1_der": der.extrapolated_value,
        "lambda1_full": both.extrapolated_value,
        "passed_sq": sq.extrapolated_value >= 2.0 - tol_sq,
        "passed_der": der.extrapolated_value >= 4.0 - tol_der,
        "passed_split": both.extrapolated_value >= half_sum - tol_split,
        "tols": (tol_sq, tol_der, tol_split),
    }


def check_affine_refinement(f: MonotoneProfile, h: Weight1D, m: int,
                            n: int = DEFAULT_N) -> dict:
    """Refined bound for psi = f + g/2 with g = -(log h)', h power-concave and
    affine across the core interval: when lambda_1 <= 7,
    lambda_1 >= 3 + (8 K / (m pi^2)) (1 - h_min/h_max)^2 for some K > 0.

    The absolute constant is not computable; the report carries the implied K
    sample so sweeps can assert its positivity."""
    ok_lc, worst = h.is_log_concave()
    hs = np.asarray(h.samples, dtype=float)
    if hs.min() <= 0:
        raise PreconditionError("weight must be strictly positive")
    root = hs ** (1.0 / m)
    d2 = root[2:] - 2 * root[1:-1] + root[:-2]
    if d2.max() > 1e-8 * (1.0 + np.ptp(root)):
        raise PreconditionError("weight is not (1/m)-concave")
    g = h.grid
    core = (g >= -math.pi / 8) & (g <= math.pi / 8)
    if core.sum() < 4:
        raise PreconditionError("weight grid does not resolve the core interval")
    A = np.stack([g[core], np.ones(core.sum())], axis=1)
    coef, *_ = np.linalg.lstsq(A, hs[core], rcond=None)
    resid = np.abs(hs[core] - A @ coef).max()
    if resid > 1e-6 * hs.max():
        raise PreconditionError("weight is not affine across the core interval")
    # grow the affine interval [a, b] outward while the fit keeps holding
    fit = coef[0] * g + coef[1]
    okfit = np.abs(hs - fit) <= 1e-6 * hs.max()
    i_lo = int(np.argmax(core))
    a_i, b_i = i_lo, int(len(g) - np.argmax(core[::-1]) - 1)
    while a_i > 0 and okfit[a_i - 1]:
        a_i -= 1
    while b_i < len(g) - 1 and okfit[b_i + 1]:
        b_i += 1
    ha, hb = float(hs[a_i]), float(hs[b_i])

    log_h = np.log(hs)
    g_nodes = np.gradient(log_h, g)
    psi_vals = f.values + 0.5 * (-np.interp(f.x, g, g_nodes))
    dom = Interval(max(f.dom.a, h.interval.a), min(f.dom.b, h.interval.b))
    psi = MonotoneProfile(f.x, np.where(np.isfinite(f.values), psi_vals, f.values), dom)

    res = dirichlet_eig1(I_PI, psi.potential(), n)
    lam = res.extrapolated_value
    ratio_term = (1.0 - min(ha, hb) / max(ha, hb)) ** 2
    rhs_factor = 8.0 / (m * math.pi**2) * ratio_term
    out = {
        "lambda1": lam,
        "error_estimate": res.error_estimate,
        "h_ratio_term": ratio_term,
        "rhs_factor": rhs_factor,
        "hypothesis_met": lam <= 7.0,
        "log_concavity_residual": worst,
    }
    if lam > 7.0:
        out["note"] = "hypothesis not met (lambda1 > 7); implication vacuous"
        out["passed"] = True
        return out
    excess = lam - 3.0
    out["excess"] = excess
    out["implied_K"] = excess / rhs_factor if rhs_factor > 0 else math.inf
    out["passed"] = lam >= 3.0 - 3.0 * res.error_estimate
    return out
