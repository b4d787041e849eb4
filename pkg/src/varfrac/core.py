"""Product-integration core for the variable-order fractional integral.

Implements (R f)(t) = (1/Gamma(a(t))) * int_0^t (t-s)^(a(t)-1) f(s) ds and
the right-sided companion (Q f)(t) over [t, r] by product integration: f is
replaced by its declared interpolant and the weakly singular kernel is
integrated exactly on every cell through closed-form moments.  Because the
quadrature mesh is merged with the nodes of f, the result is exact up to
roundoff for piecewise-linear and piecewise-constant inputs; the graded mesh
only matters when f is itself a resampled approximation of something else.

Also provides the gamma function together with its global minimum K0, exact
L_p norms of grid functions, the Hardy-Littlewood maximal function evaluated
over its critical radii, a first-difference Besov norm, and the
cell-averaging projection onto piecewise constants.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma as _scipy_gamma

from .orders import OrderFunction

__all__ = [
    "NumericalError",
    "GAMMA_MIN_LOCATION",
    "K0",
    "gamma",
    "QuadratureConfig",
    "GridFunction",
    "kernel_moment",
    "kernel_moment_right",
    "rl_values",
    "rl_apply",
    "q_values",
    "q_apply",
    "lp_norm",
    "maximal_values",
    "maximal_function",
    "besov_norm",
    "project_average",
    "thread_count",
    "parallel_map",
]


class NumericalError(ArithmeticError):
    """A computation failed numerically (nonpositive order, bad quadrature, ...)."""


#: argmin of the gamma function on (0, inf)
GAMMA_MIN_LOCATION = 1.4616321449683623

#: global minimum of the gamma function on (0, inf), ~0.8856031944
K0 = float(_scipy_gamma(GAMMA_MIN_LOCATION))


def gamma(x):
    """Gamma function for strictly positive arguments (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if arr.size and np.min(arr) <= 0.0:
        raise ValueError("gamma requires strictly positive arguments")
    out = _scipy_gamma(arr)
    if arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class QuadratureConfig:
    """Product-integration parameters.

    n_cells graded cells per target with node map s_j = t*(1 - (1 - j/n)^grading)
    refining toward the kernel singularity; abs_tol is the absolute tolerance
    consumed by verification and refinement checks, not by the (exact) cell
    integration itself.
    """

    n_cells: int = 256
    grading: float = 2.0
    abs_tol: float = 1e-8

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError(f"n_cells must be >= 2, got {self.n_cells}")
        if self.grading < 1.0:
            raise ValueError(f"grading must be >= 1, got {self.grading}")
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")


_GAUSS_X16, _GAUSS_W16 = leggauss(16)


def kernel_moment(t, a, u, v, k: int = 0):
    """Exact int_u^v (t-s)^(a-1) s^k ds for k in {0, 1}, with u < v <= t, a > 0.

    Uses (t-u)^a and (t-v)^a directly, which stays stable as v -> t.
    Arrays broadcast over u, v.
    """
    if k not in (0, 1):
        raise ValueError("moment degree k must be 0 or 1")
    if np.any(np.asarray(a) <= 0.0):
        raise NumericalError(f"kernel exponent must be positive, got {a}")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u >= v) or np.any(u < -1e-12) or np.any(v > t + 1e-12):
        raise ValueError("need 0 <= u < v <= t")
    big = np.clip(t - u, 0.0, None)
    small = np.clip(t - v, 0.0, None)
    m0 = (big**a - small**a) / a
    if k == 0:
        return m0
    return t * m0 - (big ** (a + 1.0) - small ** (a + 1.0)) / (a + 1.0)


def kernel_moment_right(t, a, u, v, k: int = 0):
    """Exact int_u^v (s-t)^(a-1) s^k ds for k in {0, 1}, with t <= u < v, a > 0."""
    if k not in (0, 1):
        raise ValueError("moment degree k must be 0 or 1")
    if np.any(np.asarray(a) <= 0.0):
        raise NumericalError(f"kernel exponent must be positive, got {a}")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u >= v) or np.any(u < t - 1e-12):
        raise ValueError("need t <= u < v")
    big = np.clip(v - t, 0.0, None)
    small = np.clip(u - t, 0.0, None)
    m0 = (big**a - small**a) / a
    if k == 0:
        return m0
    return t * m0 + (big ** (a + 1.0) - small ** (a + 1.0)) / (a + 1.0)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A function on an interval, stored as nodes/values with an interpretation.

    interpretation "linear" is the continuous piecewise-linear interpolant;
    "step" is piecewise constant taking the value of the LEFT node on each
    cell (right-continuous; the final node's value closes the last cell).
    Calling the object evaluates the interpolant with zero extension outside
    [nodes[0], nodes[-1]].  Instances are immutable.
    """

    nodes: np.ndarray
    values: np.ndarray
    interpretation: str = "linear"

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("need at least two nodes")
        if values.shape != nodes.shape:
            raise ValueError("values must match nodes in shape")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if nodes[0] < -1e-12 or nodes[-1] > 1.0 + 1e-12:
            raise ValueError("nodes must lie within [0, 1]")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if self.interpretation not in ("linear", "step"):
            raise ValueError(
                f"interpretation must be 'linear' or 'step', got {self.interpretation!r}"
            )
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_cum", None)

    # -- basic queries ---------------------------------------------------

    @property
    def domain(self) -> tuple[float, float]:
        return (float(self.nodes[0]), float(self.nodes[-1]))

    def __call__(self, t):
        """Interpolant value, zero outside the domain (scalar in, float out)."""
        arr = np.asarray(t, dtype=float)
        a, b = self.nodes[0], self.nodes[-1]
        inside = (arr >= a) & (arr <= b)
        if self.interpretation == "linear":
            out = np.where(inside, np.interp(arr, self.nodes, self.values), 0.0)
        else:
            idx = np.clip(
                np.searchsorted(self.nodes, arr, side="right") - 1,
                0,
                len(self.nodes) - 2,
            )
            out = np.where(inside, self.values[idx], 0.0)
        if arr.ndim == 0:
            return float(out)
        return out

    def one_sided_limits(self, t: float) -> tuple[float, float]:
        """(f(t-), f(t+)) of the zero-extended interpolant."""
        a, b = self.domain
        if self.interpretation == "linear":
            left = float(self(t)) if a < t <= b else 0.0
            right = float(self(t)) if a <= t < b else 0.0
        else:
            right = float(self(t)) if a <= t < b else 0.0
            if a < t <= b:
                idx = int(np.searchsorted(self.nodes, t, side="left")) - 1
                left = float(self.values[max(idx, 0)])
            else:
                left = 0.0
        return (left, right)

    # -- integration -----------------------------------------------------

    def _cumulative_nodes(self) -> np.ndarray:
        cum = object.__getattribute__(self, "_cum")
        if cum is None:
            h = np.diff(self.nodes)
            if self.interpretation == "linear":
                cells = h * (self.values[:-1] + self.values[1:]) / 2.0
            else:
                cells = h * self.values[:-1]
            cum = np.concatenate(([0.0], np.cumsum(cells)))
            object.__setattr__(self, "_cum", cum)
        return cum

    def cumulative_at(self, x):
        """Exact int_{-inf}^x of the (zero-extended) interpolant."""
        cum = self._cumulative_nodes()
        arr = np.asarray(x, dtype=float)
        clipped = np.clip(arr, self.nodes[0], self.nodes[-1])
        idx = np.clip(
            np.searchsorted(self.nodes, clipped, side="right") - 1,
            0,
            len(self.nodes) - 2,
        )
        dx = clipped - self.nodes[idx]
        v0 = self.values[idx]
        if self.interpretation == "linear":
            h = self.nodes[idx + 1] - self.nodes[idx]
            vx = v0 + (self.values[idx + 1] - v0) * dx / h
            out = cum[idx] + dx * (v0 + vx) / 2.0
        else:
            out = cum[idx] + v0 * dx
        if arr.ndim == 0:
            return float(out)
        return out

    def integrate(self, a: float | None = None, b: float | None = None) -> float:
        """Exact integral of the interpolant over [a, b] (default: full domain)."""
        lo, hi = self.domain
        a = lo if a is None else a
        b = hi if b is None else b
        if a > b:
            raise ValueError(f"need a <= b, got [{a}, {b}]")
        return float(self.cumulative_at(b) - self.cumulative_at(a))

    # -- algebra (same interpretation and domain) -------------------------

    def __abs__(self) -> "GridFunction":
        if self.interpretation == "step":
            return GridFunction(self.nodes, np.abs(self.values), "step")
        v = self.values
        cross = np.nonzero(v[:-1] * v[1:] < 0.0)[0]
        roots = self.nodes[cross] + (self.nodes[cross + 1] - self.nodes[cross]) * (
            v[cross] / (v[cross] - v[cross + 1])
        )
        nodes = np.unique(np.concatenate((self.nodes, roots)))
        return GridFunction(nodes, np.abs(self(nodes)), "linear")

    def _combine(self, other: "GridFunction", sign: float) -> "GridFunction":
        if not isinstance(other, GridFunction):
            return NotImplemented
        if other.interpretation != self.interpretation:
            raise ValueError("cannot combine different interpretations")
        if other.domain != self.domain:
            raise ValueError("cannot combine different domains")
        nodes = np.unique(np.concatenate((self.nodes, other.nodes)))
        return GridFunction(
            nodes, self(nodes) + sign * other(nodes), self.interpretation
        )

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return GridFunction(self.nodes, float(c) * self.values, self.interpretation)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    # -- construction and serialization -----------------------------------

    @classmethod
    def from_callable(
        cls,
        fn: Callable,
        n: int = 257,
        a: float = 0.0,
        b: float = 1.0,
        interpretation: str = "linear",
    ) -> "GridFunction":
        """Sample fn on n uniform nodes over [a, b]."""
        if n < 2:
            raise ValueError("need n >= 2 sample nodes")
        x = np.linspace(a, b, n)
        vals = np.asarray(fn(x), dtype=float)
        if vals.shape != x.shape:
            vals = np.array([float(fn(xx)) for xx in x])
        return cls(x, vals, interpretation)

    def to_csv(self, path) -> None:
        """Write `# interpretation=...`, a header row, then node,value rows (LF)."""
        lines = [f"# interpretation={self.interpretation}", "node,value"]
        # builtin-float repr round-trips exactly; numpy scalar repr does not parse
        lines.extend(
            f"{float(x)!r},{float(v)!r}" for x, v in zip(self.nodes, self.values)
        )
        _atomic_write_text(path, "\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        interpretation = "linear"
        nodes: list[float] = []
        values: list[float] = []
        with open(path, newline="") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].strip().partition("=")
                    if key.strip() == "interpretation":
                        interpretation = val.strip()
                    continue
                if line.startswith("node"):
                    continue
                parts = line.split(",")
                if len(parts) < 2:
                    raise ValueError(f"{path}:{lineno}: need two columns")
                nodes.append(float(parts[0]))
                values.append(float(parts[1]))
        return cls(np.asarray(nodes), np.asarray(values), interpretation)


def _atomic_write_text(path, text: str) -> None:
    """Write via a temp file + rename so failures never leave partial output."""
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# -- the fractional integral ----------------------------------------------


def _merged_mesh(
    f: GridFunction, lo: float, hi: float, cfg: QuadratureConfig, singular_at: str
) -> np.ndarray:
    """Graded mesh on [lo, hi] merged with the nodes of f inside the interval."""
    j = np.arange(cfg.n_cells + 1) / cfg.n_cells
    if singular_at == "right":
        graded = hi - (hi - lo) * (1.0 - j) ** cfg.grading
    else:
        graded = lo + (hi - lo) * j**cfg.grading
    inner = f.nodes[(f.nodes > lo) & (f.nodes < hi)]
    mesh = np.unique(np.concatenate((graded, inner, [lo, hi])))
    # np.unique can keep points closer than roundoff; drop empty cells
    keep = np.concatenate(([True], np.diff(mesh) > 0.0))
    return mesh[keep]


def _cell_coeffs(f: GridFunction, mesh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell representation f(s) = c0 + c1*s on the merged mesh.

    The mesh contains f's domain endpoints wherever they fall inside the
    integration range, so each cell lies entirely inside or outside the
    support of f; outside cells get c0 = c1 = 0 (zero extension).
    """
    u, v = mesh[:-1], mesh[1:]
    lo, hi = f.domain
    mid = (u + v) / 2.0
    inside = (mid >= lo) & (mid <= hi)
    if f.interpretation == "step":
        c0 = np.where(inside, f(u), 0.0)
        return c0, np.zeros_like(c0)
    fu, fv = f(u), f(v)
    with np.errstate(invalid="ignore"):
        c1 = np.where(inside, (fv - fu) / (v - u), 0.0)
    c0 = np.where(inside, fu - c1 * u, 0.0)
    return c0, c1


def rl_values(
    alpha: OrderFunction,
    f: GridFunction,
    targets,
    cfg: QuadratureConfig | None = None,
) -> np.ndarray:
    """(R f)(t) at each target t, exact for the declared interpolant of f.

    The target t = 0 returns 0 (integral over an empty interval).  Raises
    NumericalError when alpha(t) <= 0 at a positive target.
    """
    cfg = cfg or QuadratureConfig()
    ts = np.atleast_1d(np.asarray(targets, dtype=float))
    if ts.size == 0:
        raise ValueError("empty targets")
    if np.min(ts) < -1e-12 or np.max(ts) > 1.0 + 1e-12:
        raise ValueError("targets must lie within [0, 1]")
    out = np.empty(ts.size)
    for i, t in enumerate(np.clip(ts, 0.0, 1.0)):
        if t == 0.0:
            out[i] = 0.0
            continue
        a = alpha.eval(t)
        if a <= 0.0:
            raise NumericalError(f"order is nonpositive at target t={t}: alpha={a}")
        mesh = _merged_mesh(f, 0.0, t, cfg, singular_at="right")
        c0, c1 = _cell_coeffs(f, mesh)
        u, v = mesh[:-1], mesh[1:]
        big = t - u
        small = t - v
        m0 = (big**a - small**a) / a
        total = float(np.dot(c0, m0))
        if np.any(c1):
            m1 = t * m0 - (big ** (a + 1.0) - small ** (a + 1.0)) / (a + 1.0)
            total += float(np.dot(c1, m1))
        out[i] = total / gamma(a)
    return out


def rl_apply(
    alpha: OrderFunction,
    f: GridFunction,
    targets,
    cfg: QuadratureConfig | None = None,
) -> GridFunction:
    """rl_values packaged as a piecewise-linear GridFunction on the targets."""
    ts = np.asarray(targets, dtype=float)
    return GridFunction(ts, rl_values(alpha, f, ts, cfg), "linear")


def q_values(
    alpha: OrderFunction,
    f: GridFunction,
    targets,
    cfg: QuadratureConfig | None = None,
) -> np.ndarray:
    """(Q f)(t) = (1/Gamma(a(t))) int_t^r (s-t)^(a(t)-1) f(s) ds, r = right end of f."""
    cfg = cfg or QuadratureConfig()
    r = f.domain[1]
    ts = np.atleast_1d(np.asarray(targets, dtype=float))
    if ts.size == 0:
        raise ValueError("empty targets")
    if np.min(ts) < -1e-12 or np.max(ts) > r + 1e-12:
        raise ValueError(f"targets must lie within [0, {r}]")
    out = np.empty(ts.size)
    for i, t in enumerate(np.clip(ts, 0.0, r)):
        if t == r:
            out[i] = 0.0
            continue
        a = alpha.eval(t)
        if a <= 0.0:
            raise NumericalError(f"order is nonpositive at target t={t}: alpha={a}")
        mesh = _merged_mesh(f, t, r, cfg, singular_at="left")
        c0, c1 = _cell_coeffs(f, mesh)
        u, v = mesh[:-1], mesh[1:]
        big = v - t
        small = u - t
        m0 = (big**a - small**a) / a
        total = float(np.dot(c0, m0))
        if np.any(c1):
            m1 = t * m0 + (big ** (a + 1.0) - small ** (a + 1.0)) / (a + 1.0)
            total += float(np.dot(c1, m1))
        out[i] = total / gamma(a)
    return out


def q_apply(
    alpha: OrderFunction,
    f: GridFunction,
    targets,
    cfg: QuadratureConfig | None = None,
) -> GridFunction:
    ts = np.asarray(targets, dtype=float)
    return GridFunction(ts, q_values(alpha, f, ts, cfg), "linear")


# -- norms ------------------------------------------------------------------


def lp_norm(f: GridFunction, p) -> float:
    """L_p norm of the interpolant over its domain.

    Exact for p in {1, 2, inf} (both interpretations) and for every p on step
    functions; composite 16-point Gauss per linear cell otherwise.
    """
    if p != np.inf and p < 1.0:
        raise ValueError(f"need p >= 1, got {p}")
    if p == np.inf:
        # essential sup: the closing value of a step function lives on a null set
        if f.interpretation == "step":
            return float(np.max(np.abs(f.values[:-1])))
        return float(np.max(np.abs(f.values)))
    h = np.diff(f.nodes)
    if f.interpretation == "step":
        return float(np.dot(h, np.abs(f.values[:-1]) ** p) ** (1.0 / p))
    if p == 1.0:
        return abs(f).integrate()
    v0, v1 = f.values[:-1], f.values[1:]
    if p == 2.0:
        return float(np.sqrt(np.dot(h, (v0 * v0 + v0 * v1 + v1 * v1) / 3.0)))
    g = abs(f)
    u, v = g.nodes[:-1], g.nodes[1:]
    mid = (u + v) / 2.0
    half = (v - u) / 2.0
    x = mid[:, None] + half[:, None] * _GAUSS_X16[None, :]
    w = half[:, None] * _GAUSS_W16[None, :]
    vals = np.interp(x, g.nodes, g.values)
    return float(np.sum(w * vals**p) ** (1.0 / p))


# -- maximal function ---------------------------------------------------------


def maximal_values(f: GridFunction, targets) -> np.ndarray:
    """Hardy-Littlewood maximal function sup_{r>0} (1/2r) int_{t-r}^{t+r} |f|.

    |f| is extended by zero outside its domain.  The supremum is taken over
    the exact critical radii: every radius at which a window endpoint crosses
    a node, the stationary radii of the per-piece quadratic window mass, and
    the r -> 0 limit (the mean of the one-sided limits of |f|).  This is
    exact for piecewise-constant f and a certified lower bound otherwise.
    """
    g = abs(f)
    ts = np.atleast_1d(np.asarray(targets, dtype=float))
    if ts.size == 0:
        raise ValueError("empty targets")
    out = np.empty(ts.size)
    for i, t in enumerate(ts):
        lims = g.one_sided_limits(t)
        best = (lims[0] + lims[1]) / 2.0
        radii = np.unique(np.abs(g.nodes - t))
        radii = radii[radii > 0.0]
        if radii.size:
            mass = g.cumulative_at(t + radii) - g.cumulative_at(t - radii)
            best = max(best, float(np.max(mass / (2.0 * radii))))
            # interior stationary radii: on each piece between consecutive
            # critical radii the window mass N(r) is quadratic, and
            # d/dr [N/2r] = 0 at r = sqrt(c/a) for N = a r^2 + b r + c
            r0, r1 = radii[:-1], radii[1:]
            if r0.size:
                rm = (r0 + r1) / 2.0
                n0 = g.cumulative_at(t + r0) - g.cumulative_at(t - r0)
                nm = g.cumulative_at(t + rm) - g.cumulative_at(t - rm)
                n1 = g.cumulative_at(t + r1) - g.cumulative_at(t - r1)
                with np.errstate(divide="ignore", invalid="ignore"):
                    aa = 2.0 * (n0 - 2.0 * nm + n1) / (r1 - r0) ** 2
                    bb = (n1 - n0) / (r1 - r0) - aa * (r0 + r1)
                    cc = n0 - aa * r0 * r0 - bb * r0
                    rstar = np.sqrt(cc / aa)
                ok = np.isfinite(rstar) & (rstar > r0) & (rstar < r1)
                if np.any(ok):
                    rs = rstar[ok]
                    ms = g.cumulative_at(t + rs) - g.cumulative_at(t - rs)
                    best = max(best, float(np.max(ms / (2.0 * rs))))
        out[i] = best
    return out


def maximal_function(f: GridFunction, targets) -> GridFunction:
    ts = np.asarray(targets, dtype=float)
    return GridFunction(ts, maximal_values(f, ts), "linear")


# -- Besov norm and averaging projection --------------------------------------


def besov_norm(f: GridFunction, p, smoothness: float, h_grid) -> float:
    """||f||_p + sup_h h^(-smoothness) ||f(.+h) - f(.)||_{L_p[0, 1-h]}.

    The supremum runs over the finite h_grid only, so the result is a lower
    estimate of the Besov norm; acceptance-style checks must use it on the
    <= side of inequalities.  First differences are formed exactly from the
    interpolant.
    """
    if not 0.0 < smoothness < 1.0:
        raise ValueError(f"smoothness index must be in (0, 1), got {smoothness}")
    hs = np.atleast_1d(np.asarray(h_grid, dtype=float))
    lo, hi = f.domain
    span = hi - lo
    if hs.size == 0 or np.min(hs) <= 0.0 or np.max(hs) > span + 1e-12:
        raise ValueError("h_grid must lie inside (0, domain span]")
    best = 0.0
    for h in np.clip(hs, 0.0, span):
        if h == span:
            # the difference domain degenerates to the single point {lo}
            diff = abs(float(f(hi)) - float(f(lo)))
            norm = diff if p == np.inf else 0.0
        else:
            cut = hi - h
            nodes = np.concatenate(
                (f.nodes[f.nodes < cut], f.nodes - h, [lo, cut])
            )
            nodes = np.unique(nodes)
            nodes = nodes[(nodes >= lo) & (nodes <= cut)]
            dvals = f(nodes + h) - f(nodes)
            norm = lp_norm(GridFunction(nodes, dvals, f.interpretation), p)
        best = max(best, norm / h**smoothness)
    return lp_norm(f, p) + best


def project_average(f: GridFunction, n: int) -> GridFunction:
    """Projection onto piecewise constants over n equal cells (exact cell means)."""
    if n < 1:
        raise ValueError(f"need n >= 1 cells, got {n}")
    lo, hi = f.domain
    edges = np.linspace(lo, hi, n + 1)
    cum = f.cumulative_at(edges)
    means = np.diff(cum) / np.diff(edges)
    return GridFunction(edges, np.append(means, means[-1]), "step")


def thread_count() -> int:
    """Worker-thread cap read from the VARFRAC_THREADS environment variable."""
    raw = os.environ.get("VARFRAC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def parallel_map(fn: Callable, items) -> list:
    """Map fn over items preserving order, threaded when VARFRAC_THREADS > 1.

    Each item is computed independently, so the result is identical for any
    thread count; the setting only changes wall time.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
