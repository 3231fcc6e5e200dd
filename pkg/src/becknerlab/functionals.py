"""Constant-plus-Gaussian-bump test functions, Gaussian expectations and
the inequality checks built on them.

A test function is ``f(x) = c + sum_i a_i exp(-sum_k lam_ik (x_k - m_ik)**2 / 2)``
with ``c > 0``, ``a_i >= 0`` and per-axis precisions ``lam_ik >= 0``
(``lam = 1/sigma**2``; a zero precision makes the bump constant along that
axis). The family is closed under the heat semigroup, and value, gradient
and Hessian are available in closed form.
"""

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources

import numpy as np
from scipy.special import roots_hermitenorm

from .deficit import BecknerParams, big_f, hoelder_constant
from .errors import ConfigurationError, DomainError
from .reports import CheckReport
from .specfun import gamma

__all__ = [
    "TestFunction",
    "GaussQuadSpec",
    "NodalData",
    "gauss_expect",
    "nodal_data",
    "lp_norm",
    "i_p",
    "grad_energy",
    "check_beckner_family",
    "check_hoelder",
    "check_classic",
    "check_poincare_improved",
    "check_all",
    "inequality_tolerance",
    "load_corpus",
    "generate_corpus",
]

P_ONE_TOL = 1e-9
MAX_NODES = 4000
CHUNK = 1 << 17


class TestFunction:
    """Positive constant plus a nonnegative mixture of Gaussian bumps.

    Parameters
    ----------
    dimension : int
    constant : float
        ``c > 0``, the infimum of f.
    amplitudes : (K,) array_like
    centers : (K, d) array_like
    precisions : (K, d) array_like
        Inverse squared widths per axis; 0 means flat along that axis.
    """

    __test__ = False  # not a pytest class

    def __init__(self, dimension, constant, amplitudes=(), centers=(), precisions=()):
        d = int(dimension)
        if d < 1:
            raise DomainError("dimension must be >= 1")
        c = float(constant)
        if not c > 0:
            raise DomainError("constant must be positive")
        a = np.asarray(amplitudes, dtype=float).reshape(-1)
        k = a.size
        m = np.asarray(centers, dtype=float).reshape(k, d) if k else np.zeros((0, d))
        lam = np.asarray(precisions, dtype=float).reshape(k, d) if k else np.zeros((0, d))
        if np.any(~(a >= 0)):
            raise DomainError("amplitudes must be nonnegative")
        if np.any(~(lam >= 0)) or np.any(~np.isfinite(lam)) or np.any(~np.isfinite(m)):
            raise DomainError("precisions must be finite and nonnegative, centers finite")
        self.dimension = d
        self.constant = c
        self.amplitudes = a
        self.centers = m
        self.precisions = lam
        for arr in (a, m, lam):
            arr.setflags(write=False)

    @classmethod
    def from_bumps(cls, dimension, constant, bumps):
        """Build from ``[(amplitude, center, sigma), ...]`` with isotropic sigma."""
        bumps = list(bumps)
        d = int(dimension)
        amps = [float(b[0]) for b in bumps]
        centers = [np.broadcast_to(np.asarray(b[1], dtype=float), (d,)) for b in bumps]
        sig = [float(b[2]) for b in bumps]
        if any(not s > 0 for s in sig):
            raise DomainError("sigma must be positive")
        prec = [np.full(d, 1.0 / s**2) for s in sig]
        return cls(d, constant, amps, np.array(centers).reshape(-1, d), np.array(prec).reshape(-1, d))

    # -- JSON -------------------------------------------------------------

    def to_dict(self):
        bumps = []
        for a, m, lam in zip(self.amplitudes, self.centers, self.precisions):
            if np.any(lam <= 0) or np.ptp(lam) > 1e-12 * lam.max():
                raise ConfigurationError("only isotropic, non-flat bumps are serializable")
            bumps.append({"amplitude": float(a), "center": m.tolist(), "sigma": float(1.0 / math.sqrt(lam[0]))})
        return {"dimension": self.dimension, "constant": self.constant, "bumps": bumps}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigurationError("test function document must be an object")
        extra = set(doc) - {"dimension", "constant", "bumps"}
        missing = {"dimension", "constant", "bumps"} - set(doc)
        if extra or missing:
            raise ConfigurationError(f"bad test function fields: unknown {sorted(extra)}, missing {sorted(missing)}")
        d = doc["dimension"]
        if not isinstance(d, int) or isinstance(d, bool):
            raise ConfigurationError("dimension must be an integer")
        bumps = []
        for b in doc["bumps"]:
            if not isinstance(b, dict) or set(b) != {"amplitude", "center", "sigma"}:
                raise ConfigurationError(f"bad bump fields: {b!r}")
            center = b["center"]
            if not isinstance(center, list) or len(center) != d:
                raise ConfigurationError("center length must equal dimension")
            bumps.append((b["amplitude"], center, b["sigma"]))
        try:
            return cls.from_bumps(d, doc["constant"], bumps)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    # -- structure --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TestFunction):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.constant == other.constant
            and np.array_equal(self.amplitudes, other.amplitudes)
            and np.array_equal(self.centers, other.centers)
            and np.array_equal(self.precisions, other.precisions)
        )

    def __hash__(self):
        return hash((self.dimension, self.constant, self.amplitudes.tobytes(), self.centers.tobytes(),
                     self.precisions.tobytes()))

    def __repr__(self):
        return f"TestFunction(d={self.dimension}, c={self.constant:g}, bumps={self.amplitudes.size})"

    @property
    def sup_bound(self):
        return self.constant + float(self.amplitudes.sum())

    @property
    def is_constant(self):
        return not np.any(self.amplitudes > 0)

    def heat_evolve(self, s):
        """``x -> E f(x + W_s)``; a Gaussian convolution with variance s."""
        s = float(s)
        if not s >= 0:
            raise DomainError("heat evolution time must be nonnegative")
        if s == 0:
            return self
        lam = self.precisions
        grow = 1.0 + s * lam
        amps = self.amplitudes * np.prod(grow, axis=1) ** -0.5
        return TestFunction(self.dimension, self.constant, amps, self.centers, lam / grow)

    def embed(self, dimension):
        """The same function viewed on a higher-dimensional space (flat in new axes)."""
        extra = int(dimension) - self.dimension
        if extra < 0:
            raise DomainError("cannot embed into a lower dimension")
        k = self.amplitudes.size
        m = np.hstack([self.centers, np.zeros((k, extra))])
        lam = np.hstack([self.precisions, np.zeros((k, extra))])
        return TestFunction(dimension, self.constant, self.amplitudes, m, lam)

    # -- evaluation -------------------------------------------------------

    def _parts(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1 and self.dimension == 1:
            x = x[:, None]
        if x.shape[-1] != self.dimension:
            raise ConfigurationError(f"points have dimension {x.shape[-1]}, expected {self.dimension}")
        diff = x[..., None, :] - self.centers
        e = self.amplitudes * np.exp(-0.5 * np.sum(self.precisions * diff * diff, axis=-1))
        return diff, e

    def __call__(self, x):
        _, e = self._parts(x)
        return self.constant + e.sum(axis=-1)

    def gradient(self, x):
        diff, e = self._parts(x)
        return -np.einsum("...k,kj,...kj->...j", e, self.precisions, diff)

    def hessian(self, x):
        diff, e = self._parts(x)
        g = self.precisions * diff
        h = np.einsum("...k,...ki,...kj->...ij", e, g, g)
        h -= np.einsum("...k,ki->...i", e, self.precisions)[..., None] * np.eye(self.dimension)
        return h

    def value_grad_hess(self, x):
        diff, e = self._parts(x)
        g = self.precisions * diff
        val = self.constant + e.sum(axis=-1)
        grad = -np.einsum("...k,...kj->...j", e, g)
        hess = np.einsum("...k,...ki,...kj->...ij", e, g, g)
        hess -= np.einsum("...k,ki->...i", e, self.precisions)[..., None] * np.eye(self.dimension)
        return val, grad, hess


# ---------------------------------------------------------------------------
# Gaussian expectations


@dataclass(frozen=True)
class GaussQuadSpec:
    """Tensor Gauss-Hermite rule for the standard Gaussian measure.

    Attributes
    ----------
    nodes_per_axis : baseline node count.
    max_tensor_dim : largest dimension handled by the tensor rule.
    mc_fallback : sample count for higher dimensions (0 disables).
    adaptive : raise the node count for narrow bumps (see :func:`node_count`).
    prune : drop tensor nodes whose weight is below this value.
    seed : seed of the Monte Carlo fallback.
    """

    nodes_per_axis: int = 80
    max_tensor_dim: int = 3
    mc_fallback: int = 0
    adaptive: bool = True
    prune: float = 1e-18
    seed: int = 0

    def __post_init__(self):
        if self.nodes_per_axis < 1:
            raise DomainError("nodes_per_axis must be positive")

    def doubled(self):
        return GaussQuadSpec(2 * self.nodes_per_axis, self.max_tensor_dim, self.mc_fallback,
                             self.adaptive, self.prune, self.seed)


DEFAULT_GQ = GaussQuadSpec()


@lru_cache(maxsize=16)
def _hermite_1d(n):
    x, w = roots_hermitenorm(n)
    return x, w / math.sqrt(2.0 * math.pi)


def node_count(f, quad):
    """Nodes per axis used for ``f``.

    Powers and logarithms of f are analytic in a strip around the real
    axis whose half-width shrinks like ``sigma / sqrt(log(sup f / c))``
    for a bump of width sigma on top of the constant c, and Gauss-Hermite
    needs ``n`` growing like the inverse square of that width; its nodes
    also thin out away from the origin. The baseline count is scaled by
    the largest ``0.4 lam (1 + log(sup f / c)) (1 + |m|**2 / 9)`` over
    bumps of precision lam and centre m, when that exceeds 1.
    """
    n = quad.nodes_per_axis
    if quad.adaptive and f is not None and f.precisions.size:
        spread = 1.0 + math.log(f.sup_bound / f.constant)
        lam = f.precisions.max(axis=1)
        offset = 1.0 + np.sum(f.centers**2, axis=1) / 9.0
        scale = float(np.max(0.4 * lam * spread * offset))
        n = int(math.ceil(n * max(1.0, scale)))
    return min(n, MAX_NODES)


def tensor_rule(dimension, n, prune=1e-18):
    """Pruned tensor Gauss-Hermite nodes ``(m, d)`` and weights ``(m,)``."""
    x, w = _hermite_1d(n)
    keep = w > prune
    x, w = x[keep], w[keep]
    wts = w
    for _ in range(dimension - 1):
        wts = np.multiply.outer(wts, w)
    idx = np.nonzero(wts > prune)
    return np.stack([x[i] for i in idx], axis=-1), wts[idx]


def gauss_expect(g, quad=DEFAULT_GQ, dimension=1, f=None, return_se=False):
    """``int g d gamma_d`` by tensor Gauss-Hermite (d <= max_tensor_dim).

    ``g`` maps an ``(n, d)`` array of points to ``(n,)`` values. ``f``, if
    given, only informs the node count. Higher dimensions use plain Monte
    Carlo with ``quad.mc_fallback`` samples; ``return_se`` then also
    returns the standard error (0 for the tensor rule).
    """
    d = int(dimension)
    if d <= quad.max_tensor_dim:
        pts, wts = tensor_rule(d, node_count(f, quad), quad.prune)
        val = float(np.dot(wts, g(pts)))
        return (val, 0.0) if return_se else val
    if quad.mc_fallback <= 0:
        raise ConfigurationError(f"dimension {d} exceeds the tensor rule and no Monte Carlo fallback is set")
    rng = np.random.default_rng(quad.seed)
    pts = rng.standard_normal((quad.mc_fallback, d))
    vals = np.asarray(g(pts), dtype=float)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(vals.size))
    return (mean, se) if return_se else mean


class NodalData:
    """f, grad f and Hessian of f on the quadrature nodes, with weights.

    All functionals of one test function are computed from one instance.
    """

    def __init__(self, f, quad=DEFAULT_GQ):
        d = f.dimension
        if d > quad.max_tensor_dim:
            if quad.mc_fallback <= 0:
                raise ConfigurationError(f"dimension {d} needs the Monte Carlo fallback")
            rng = np.random.default_rng(quad.seed)
            pts = rng.standard_normal((quad.mc_fallback, d))
            wts = np.full(quad.mc_fallback, 1.0 / quad.mc_fallback)
        else:
            pts, wts = tensor_rule(d, node_count(f, quad), quad.prune)
        self.f = f
        self.weights = wts / wts.sum()
        wts = self.weights
        self.val = np.empty(wts.size)
        self.grad_sq = np.empty(wts.size)
        mean_grad = np.zeros(d)
        mean_hess = np.zeros((d, d))
        # chunked so that the Hessians of millions of 3-d nodes never coexist
        for lo in range(0, wts.size, CHUNK):
            sl = slice(lo, lo + CHUNK)
            val, grad, hess = f.value_grad_hess(pts[sl])
            self.val[sl] = val
            self.grad_sq[sl] = np.sum(grad**2, axis=-1)
            mean_grad += wts[sl] @ grad
            mean_hess += np.tensordot(wts[sl], hess, axes=1)
        self.mean_grad = mean_grad
        self.mean_hess = mean_hess

    def mean(self, arr):
        return float(np.dot(self.weights, arr))

    @cached_property
    def mass(self):
        return self.mean(self.val)

    def power_mean(self, p):
        return self.mean(self.val**p)

    @cached_property
    def rel_dev(self):
        """``g = f/m - 1``; its weighted mean vanishes up to rounding."""
        return self.val / self.mass - 1.0

    def i_p(self, p):
        """``I_p`` written as ``m**p E[(1+g)**p - 1 - p g] / (p - 1)``.

        Subtracting the mean-zero linear term pointwise avoids the
        cancellation of ``E f**p - m**p`` when f is nearly constant.
        """
        p = float(p)
        if not p > 0:
            raise DomainError("p must be positive")
        m = self.mass
        g = self.rel_dev
        lg = np.log1p(g)
        if abs(p - 1.0) < P_ONE_TOL:
            return m * self.mean((1.0 + g) * lg - g)
        return m**p * self.mean(np.expm1(p * lg) - p * g) / (p - 1.0)

    def grad_energy(self, r):
        return self.mean(self.val**r * self.grad_sq)

    def lp_norm(self, p):
        return self.power_mean(p) ** (1.0 / p)

    def grad_norm_moment(self, r):
        return self.mean(self.grad_sq ** (0.5 * r))


def nodal_data(f, quad=DEFAULT_GQ):
    return NodalData(f, quad)


def lp_norm(f, p, quad=DEFAULT_GQ):
    """``(int f**p d gamma)**(1/p)`` (not a norm for p < 1)."""
    return NodalData(f, quad).lp_norm(p)


def i_p(f, p, quad=DEFAULT_GQ):
    """``I_p(f)``; the entropy ``int f log(f / |f|_1)`` when ``|p - 1| < 1e-9``."""
    return NodalData(f, quad).i_p(p)


def grad_energy(f, r, quad=DEFAULT_GQ):
    """``int f**r |grad f|**2 d gamma``."""
    return NodalData(f, quad).grad_energy(r)


# ---------------------------------------------------------------------------
# inequality reports


def inequality_tolerance(rhs):
    return 1e-8 * max(1.0, abs(rhs))


def _ineq(name, lhs, rhs, **inputs):
    return CheckReport(name, lhs, rhs, inequality_tolerance(rhs), kind="inequality", inputs=inputs)


def _nd(f, quad, data):
    return data if data is not None else NodalData(f, quad)


def check_beckner_family(f, p, quad=DEFAULT_GQ, data=None):
    """Beckner's inequality at p and, where available, its improvement.

    Improvements: the p = 4/3 and p = 6/5 polynomial forms and, inside the
    guard band of :class:`BecknerParams`, the F-improved form.
    """
    p = float(p)
    nd = _nd(f, quad, data)
    reports = []
    ip = nd.i_p(p)
    rhs = 0.5 * p * nd.grad_energy(p - 2.0)
    if 1.0 < p <= 2.0:
        reports.append(_ineq(f"beckner[p={p:g}]", ip, rhs, p=p))
    if abs(p - 4.0 / 3.0) < 1e-12:
        lhs = ip + nd.i_p(2.0 / 3.0) ** 2 / 3.0
        reports.append(_ineq("beckner_improved_4/3", lhs, rhs, p=p, base_lhs=ip))
    elif abs(p - 1.2) < 1e-12:
        lhs = ip + 3.0 / 25.0 * nd.i_p(0.4) ** 3
        reports.append(_ineq("beckner_improved_6/5", lhs, rhs, p=p, base_lhs=ip))
    else:
        try:
            params = BecknerParams(p)
        except DomainError:
            params = None
        if params is not None:
            s = nd.i_p(2.0 * p - 2.0) / (p - 1.0)
            x = nd.lp_norm(2.0 * p - 2.0)
            term = p * (p - 1.0) * (2.0 - p) / 4.0 * big_f(params, max(s, 0.0), x)
            reports.append(_ineq(f"beckner_improved[p={p:g}]", ip + term, rhs, p=p, base_lhs=ip, s=s, x=x))
    if not reports:
        raise DomainError(f"no Beckner-type inequality for p={p}")
    return reports


def check_hoelder(f, p, q, quad=DEFAULT_GQ, data=None):
    """``I_p <= C(p, q) I_q**(p/q)``; for q = 1 also its explicit lower bound on I_1."""
    nd = _nd(f, quad, data)
    p, q = float(p), float(q)
    const = hoelder_constant(p, q)
    lhs = nd.i_p(p)
    iq = max(nd.i_p(q), 0.0)
    reports = [_ineq(f"hoelder[p={p:g},q={q:g}]", lhs, const * iq ** (p / q), p=p, q=q)]
    if abs(q - 1.0) < 1e-12 and p < 1.0:
        gap = max((1.0 - p) * nd.i_p(p), 0.0)  # m**p - E f**p
        reports.append(_ineq(f"hoelder_entropy_lower[p={p:g}]", gamma(1.0 - p) ** (1.0 / p) * gap ** (1.0 / p), iq, p=p))
    return reports


def check_classic(f, quad=DEFAULT_GQ, data=None, phi_power=1.5):
    """Log-Sobolev, Poincare, the two entropy corollaries and Phi-entropies."""
    nd = _nd(f, quad, data)
    i1 = nd.i_p(1.0)
    i2 = nd.i_p(2.0)
    e2 = nd.grad_energy(0.0)
    reports = [
        _ineq("log_sobolev", i1, 0.5 * nd.grad_energy(-1.0)),
        _ineq("poincare", i2, e2),
        _ineq("entropy_grad_l2", i1, math.sqrt(math.pi / 2.0) * math.sqrt(e2)),
        _ineq(
            "entropy_grad_l3/2",
            i1,
            2.0 ** (5.0 / 3.0) * math.pi / (3.0 ** (5.0 / 6.0) * gamma(1.0 / 3.0))
            * nd.grad_norm_moment(1.5) ** (2.0 / 3.0),
        ),
    ]
    # Phi-entropies E phi(f) - phi(E f) of x log x, x**2 and x**r are
    # I_1, I_2 and (r - 1) I_r
    family = {"xlogx": (i1, lambda x: 1.0 / x), "x^2": (i2, lambda x: 2.0 + 0.0 * x)}
    r = float(phi_power)
    family[f"x^{r:g}"] = ((r - 1.0) * nd.i_p(r), lambda x: r * (r - 1.0) * x ** (r - 2.0))
    for name, (lhs, phi2) in family.items():
        rhs = 0.5 * nd.mean(phi2(nd.val) * nd.grad_sq)
        reports.append(_ineq(f"phi_entropy[{name}]", lhs, rhs))
    return reports


def check_poincare_improved(f, quad=DEFAULT_GQ, data=None):
    """The two improved Poincare inequalities and the comparison of their bounds."""
    nd = _nd(f, quad, data)
    i2 = nd.i_p(2.0)
    e2 = nd.grad_energy(0.0)
    mg = float(np.sum(nd.mean_grad**2))
    alpha0 = float(np.sum(nd.mean_hess**2))
    rhs1 = 0.5 * e2 + 0.5 * mg
    rhs2 = e2 / 3.0 + 2.0 * mg / 3.0 + alpha0 / 6.0
    return [
        _ineq("poincare_improved_1", i2, rhs1),
        _ineq("poincare_improved_2", i2, rhs2),
        _ineq("poincare_improved_chain", rhs2, rhs1),
        _ineq("alpha0_bound", alpha0, e2 - mg),
    ]


BECKNER_P = (1.2, 4.0 / 3.0, 1.5, 1.8, 2.0)
IMPROVED_P = (1.45, 1.6, 1.9)
HOELDER_PAIRS = ((1.0, 2.0), (1.0, 1.5), (0.5, 1.0), (2.0, 3.0))


def check_all(f, quad=DEFAULT_GQ):
    """Every inequality report for one test function."""
    nd = NodalData(f, quad)
    reports = []
    reports += check_classic(f, quad, nd)
    for p in BECKNER_P + IMPROVED_P:
        reports += check_beckner_family(f, p, quad, nd)
    for p, q in HOELDER_PAIRS:
        reports += check_hoelder(f, p, q, quad, nd)
    reports += check_poincare_improved(f, quad, nd)
    return reports


# ---------------------------------------------------------------------------
# standard corpus


def generate_corpus(count=100, seed=20240917):
    """Seeded random test functions: d in {1,2,3}, 1-4 bumps,
    c in [0.1, 5], a in [0, 5], sigma in [0.3, 3], |m| <= 3."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(1, 4))
        k = int(rng.integers(1, 5))
        c = float(rng.uniform(0.1, 5.0))
        bumps = []
        for _ in range(k):
            a = float(rng.uniform(0.0, 5.0))
            direction = rng.standard_normal(d)
            direction /= np.linalg.norm(direction)
            m = direction * 3.0 * rng.uniform() ** (1.0 / d)
            sigma = float(rng.uniform(0.3, 3.0))
            bumps.append((a, m.tolist(), sigma))
        out.append(TestFunction.from_bumps(d, c, bumps))
    return out


def load_corpus(path=None):
    """Read a corpus document; ``None`` or ``"standard"`` loads the bundled one.

    Returns ``(functions, mc_grade_indices)``.
    """
    if path is None or path == "standard":
        text = resources.files("becknerlab.data").joinpath("standard_corpus.json").read_text()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read corpus {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"corpus is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) - {"functions", "mc_grade", "seed"} or "functions" not in doc:
        raise ConfigurationError("corpus must be an object with 'functions' (and optional 'mc_grade', 'seed')")
    funcs = [TestFunction.from_dict(d) for d in doc["functions"]]
    grade = [int(i) for i in doc.get("mc_grade", [])]
    if any(not 0 <= i < len(funcs) for i in grade):
        raise ConfigurationError("mc_grade index out of range")
    return funcs, grade
