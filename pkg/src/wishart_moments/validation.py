"""Numerical oracles for the symbolic engine.

Two independent routes are provided: Monte Carlo estimation from simulated
Wishart matrices, and finite differences of the closed-form moment
generating function at Theta = 0.

Sampling is organised in fixed-size blocks.  Block ``k`` draws its normals
from ``PCG64(SeedSequence(seed, spawn_key=(k,)))``, so sample ``t`` depends
only on (seed, t) and estimates are bit-identical for any stream count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .engine import COMPLEX, REAL, MomentSpec, WishartParams, evaluate, expand_moment
from .errors import (
    BranchUndefined,
    FlavorMismatch,
    MeanMismatch,
    NotPositiveDefinite,
    NotSymmetric,
    OrderTooHigh,
    Singular,
)

RNG_NAME = "numpy PCG64 via SeedSequence(seed, spawn_key=(block,))"
DEFAULT_BLOCK = 1 << 14
Z_MAX = 5.0
FD_REL_TOL = 1e-4


def _synthesize_means(delta: np.ndarray, nu: int, is_complex: bool) -> np.ndarray:
    """Mean vectors (rows) whose outer-product sum is ``delta``."""
    lam, vec = np.linalg.eigh(delta)
    scale = max(float(np.abs(lam).max(initial=0.0)), 1.0)
    if lam.min(initial=0.0) < -1e-12 * scale:
        raise MeanMismatch("delta is not positive semidefinite")
    keep = lam > 1e-12 * scale
    rank = int(keep.sum())
    if rank > nu:
        raise MeanMismatch(f"rank(delta)={rank} exceeds nu={nu}")
    dtype = complex if is_complex else float
    means = np.zeros((nu, delta.shape[0]), dtype=dtype)
    means[:rank] = (vec[:, keep] * np.sqrt(lam[keep])).T
    return means


@dataclass
class SimulationConfig:
    """Monte Carlo settings; ``params.nu`` must be a positive integer."""

    params: WishartParams
    samples: int = 1_000_000
    seed: int = 0
    streams: int = 1
    mean_vectors: Sequence | None = None
    block_size: int = DEFAULT_BLOCK
    chol: np.ndarray = field(init=False, repr=False)
    means: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        prm = self.params
        nu = prm.nu
        if float(nu) != int(nu) or int(nu) < 1:
            raise ValueError(f"sampling needs a positive integer nu, got {nu}")
        self.nu = int(nu)
        if self.samples < 1 or self.streams < 1 or self.block_size < 1:
            raise ValueError("samples, streams and block_size must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        is_complex = prm.flavor == COMPLEX
        eig = np.linalg.eigvalsh(prm.sigma)
        if eig.min() <= 1e-10 * eig.max():
            raise NotPositiveDefinite("sigma must be positive definite for sampling")
        self.chol = np.linalg.cholesky(prm.sigma)
        if self.mean_vectors is None:
            self.means = _synthesize_means(prm.delta, self.nu, is_complex)
        else:
            means = np.array(self.mean_vectors, dtype=complex if is_complex else float)
            if means.shape != (self.nu, prm.p):
                raise MeanMismatch(f"expected {self.nu} mean vectors of length {prm.p}")
            self.means = means
        recon = self.means.T @ self.means.conj()
        scale = max(float(np.abs(prm.delta).max(initial=0.0)), 1.0)
        if not np.allclose(recon, prm.delta, rtol=1e-12, atol=1e-12 * scale):
            raise MeanMismatch("mean vectors do not reproduce delta")


def sample_gaussian_rows(config: SimulationConfig, block: int) -> np.ndarray:
    """The Gaussian rows behind one block of Wishart draws, shape (B, nu, p).

    Real rows are N(mu_t, Sigma); complex rows are circular CN(mu_t, Sigma)
    built as mu_t + L (u + i v) / sqrt(2).
    """
    seq = np.random.SeedSequence(int(config.seed), spawn_key=(block,))
    rng = np.random.Generator(np.random.PCG64(seq))
    B, nu, p = config.block_size, config.nu, config.params.p
    if config.params.flavor == REAL:
        u = rng.standard_normal((B, nu, p))
        return config.means + u @ config.chol.T
    u = rng.standard_normal((B, nu, p, 2))
    return config.means + ((u[..., 0] + 1j * u[..., 1]) / math.sqrt(2.0)) @ config.chol.T


def _sample_block(config: SimulationConfig, block: int) -> np.ndarray:
    """Draw ``block_size`` Wishart matrices, shape (B, p, p)."""
    x = sample_gaussian_rows(config, block)
    if config.params.flavor == REAL:
        return np.einsum("bti,btj->bij", x, x)
    return np.einsum("bti,btj->bij", x, x.conj())


def sample_real_wishart(config: SimulationConfig, t: int) -> np.ndarray:
    if config.params.flavor != REAL:
        raise FlavorMismatch("config is not real")
    return _sample_block(config, t // config.block_size)[t % config.block_size]


def sample_complex_wishart(config: SimulationConfig, t: int) -> np.ndarray:
    if config.params.flavor != COMPLEX:
        raise FlavorMismatch("config is not complex")
    return _sample_block(config, t // config.block_size)[t % config.block_size]


def sample_block(config: SimulationConfig, block: int) -> np.ndarray:
    """Samples ``block*B .. (block+1)*B - 1`` as one array."""
    return _sample_block(config, block)


# -- running moments ---------------------------------------------------------


@dataclass(frozen=True)
class Moments:
    """Count, mean and centred sum of squares; merged with Chan's formula."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, x: np.ndarray) -> Moments:
        if x.size == 0:
            return cls()
        mu = float(x.mean())
        return cls(int(x.size), mu, float(((x - mu) ** 2).sum()))

    def merge(self, other: Moments) -> Moments:
        if other.n == 0:
            return self
        if self.n == 0:
            return other
        n = self.n + other.n
        d = other.mean - self.mean
        mean = self.mean + d * other.n / n
        m2 = self.m2 + other.m2 + d * d * self.n * other.n / n
        return Moments(n, mean, m2)

    @property
    def std_error(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def spec_products(spec: MomentSpec, W: np.ndarray) -> np.ndarray:
    """prod_k W[:, a_k, b_k] for a stack of matrices."""
    out = np.ones(W.shape[0], dtype=W.dtype)
    for a, b in spec.factors:
        out = out * W[:, a - 1, b - 1]
    return out


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    std_error: float
    n_samples: int
    reference: float
    z_score: float
    imag_estimate: float | None = None
    imag_std_error: float | None = None
    imag_reference: float | None = None
    imag_z_score: float | None = None
    rng: str = RNG_NAME

    def passed(self, z_max: float = Z_MAX) -> bool:
        ok = abs(self.z_score) < z_max
        if self.imag_z_score is not None:
            ok = ok and abs(self.imag_z_score) < z_max
        return ok


def _z(estimate, reference, se):
    if se > 0:
        return (estimate - reference) / se
    return 0.0 if estimate == reference else math.copysign(math.inf, estimate - reference)


def _imag_z(im: Moments, ref: complex, real_mean: float) -> float:
    # Products like w12*w21 are real up to rounding; their imaginary parts
    # are pure round-off and carry no sampling information.
    if abs(im.mean - ref.imag) <= 1e-12 * max(1.0, abs(ref), abs(real_mean)):
        return 0.0
    return _z(im.mean, ref.imag, im.std_error)


def _mc_accumulate(specs: Sequence[MomentSpec], config: SimulationConfig):
    """Per-spec (real, imag) Moments over ``config.samples`` draws."""
    B = config.block_size
    n_blocks = -(-config.samples // B)

    def run_block(k):
        W = _sample_block(config, k)[: min(B, config.samples - k * B)]
        out = []
        for spec in specs:
            x = spec_products(spec, W)
            out.append((Moments.of(np.real(x)), Moments.of(np.imag(x)) if np.iscomplexobj(x) else None))
        return out

    if config.streams > 1:
        with ThreadPoolExecutor(max_workers=config.streams) as pool:
            per_block = list(pool.map(run_block, range(n_blocks)))
    else:
        per_block = [run_block(k) for k in range(n_blocks)]
    totals = []
    for i in range(len(specs)):
        re, im = Moments(), (Moments() if specs[i].flavor == COMPLEX else None)
        # Fixed block order keeps the merged floats bit-identical.
        for blk in per_block:
            re = re.merge(blk[i][0])
            if im is not None:
                im = im.merge(blk[i][1])
        totals.append((re, im))
    return totals


def _check_flavor(spec: MomentSpec, params: WishartParams):
    if spec.flavor != params.flavor:
        raise FlavorMismatch(f"spec is {spec.flavor} but parameters are {params.flavor}")


def estimate_moments_mc(specs: Sequence[MomentSpec], config: SimulationConfig, references=None) -> list[EstimateReport]:
    """Estimate several moments from one shared sample set."""
    for spec in specs:
        _check_flavor(spec, config.params)
    if references is None:
        references = [evaluate(expand_moment(s), config.params) for s in specs]
    reports = []
    for (re, im), ref in zip(_mc_accumulate(specs, config), references):
        ref = complex(ref)
        se = re.std_error
        kw = {}
        if im is not None:
            kw = dict(
                imag_estimate=im.mean,
                imag_std_error=im.std_error,
                imag_reference=ref.imag,
                imag_z_score=_imag_z(im, ref, re.mean),
            )
        reports.append(EstimateReport(re.mean, se, re.n, ref.real, _z(re.mean, ref.real, se), **kw))
    return reports


def estimate_moment_mc(spec: MomentSpec, config: SimulationConfig, reference=None) -> EstimateReport:
    refs = None if reference is None else [reference]
    return estimate_moments_mc([spec], config, refs)[0]


# -- moment generating function ---------------------------------------------


def mgf_eval(params: WishartParams, theta) -> complex | float:
    """E[exp(tr(Theta W))] in closed form.

    Real: det(I - 2 Theta Sigma)^(-nu/2) exp(tr((I - 2 Theta Sigma)^-1 Theta Delta)),
    Theta symmetric.  Complex: det(I - Theta Sigma)^(-nu) exp(tr((I - Theta
    Sigma)^-1 Theta Delta)); the expression is analytic in the p*p entries
    of Theta, so any square Theta near 0 is accepted there.
    """
    p = params.p
    nu = params.nu
    if params.flavor == REAL:
        theta = np.asarray(theta, dtype=float)
        if not np.array_equal(theta, theta.T):
            raise NotSymmetric("real Theta must be symmetric")
        A = np.eye(p) - 2.0 * theta @ params.sigma
        det = float(np.linalg.det(A))
        if det == 0.0:
            raise Singular("I - 2 Theta Sigma is singular")
        power = -nu / 2.0
        if det < 0 and float(power) != int(power):
            raise BranchUndefined("negative determinant with non-integer nu/2")
        lead = det**power
        expo = float(np.trace(np.linalg.solve(A, theta @ params.delta)))
        return lead * math.exp(expo)
    theta = np.asarray(theta, dtype=complex)
    A = np.eye(p) - theta @ params.sigma
    det = complex(np.linalg.det(A))
    if det == 0:
        raise Singular("I - Theta Sigma is singular")
    if float(nu) != int(nu) and det.imag == 0 and det.real < 0:
        raise BranchUndefined("determinant on the branch cut with non-integer nu")
    lead = det ** (-int(nu)) if float(nu) == int(nu) else det ** (-nu)
    expo = complex(np.trace(np.linalg.solve(A, theta @ params.delta)))
    return lead * np.exp(expo)


_STENCILS = {
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
}


def default_step(order: int) -> float:
    return 1e-5 if order <= 1 else 1e-4


def _directions(spec: MomentSpec) -> list[tuple[np.ndarray, int]]:
    """Theta directions whose derivative brings down each distinct factor."""
    counts: dict = {}
    for pr in spec.factors:
        counts[pr] = counts.get(pr, 0) + 1
    out = []
    for (a, b), r in counts.items():
        E = np.zeros((spec.p, spec.p))
        if spec.flavor == REAL:
            # Symmetric Theta with off-diagonal t/2 so that d/dt tr(Theta W) = w_ab.
            if a == b:
                E[a - 1, a - 1] = 1.0
            else:
                E[a - 1, b - 1] = E[b - 1, a - 1] = 0.5
        else:
            # tr(Theta W) = sum Theta_ij W_ji, so w_ab pairs with Theta_ba.
            E[b - 1, a - 1] = 1.0
        out.append((E, r))
    return out


def mgf_moment_fd(spec: MomentSpec, params: WishartParams, h: float | None = None):
    """Mixed partial derivative of the MGF at Theta = 0 by central differences.

    Each distinct factor of multiplicity r gets the r-th order central
    stencil; the stencils are combined as a tensor product.  Total order is
    limited to 3.
    """
    _check_flavor(spec, params)
    if spec.p != params.p:
        raise ValueError("dimension mismatch between spec and parameters")
    order = spec.n
    if order > 3:
        raise OrderTooHigh(f"finite differences support order <= 3, got {order}")
    if order == 0:
        return mgf_eval(params, np.zeros((params.p, params.p)))
    h = default_step(order) if h is None else float(h)
    if h <= 0:
        raise ValueError("step must be positive")
    dirs = _directions(spec)
    total = 0.0
    for offsets in product(*(sorted(_STENCILS[r].items()) for _, r in dirs)):
        theta = np.zeros((params.p, params.p))
        weight = 1.0
        for (E, _), (k, w) in zip(dirs, offsets):
            theta = theta + k * h * E
            weight *= w
        total = total + weight * mgf_eval(params, theta)
    total = total / h**order
    if params.flavor == REAL:
        return float(np.real(total))
    return complex(total)


# -- combined report -----------------------------------------------------------


@dataclass(frozen=True)
class CrossCheckReport:
    symbolic: complex | float
    mc: EstimateReport | None
    fd_value: complex | float | None
    fd_rel_err: float | None
    passed: bool

    def to_json_obj(self) -> dict:
        sym = complex(self.symbolic)
        obj = {
            "symbolic": sym.real,
            "mc": None,
            "fd": None,
            "pass": self.passed,
        }
        if sym.imag != 0:
            obj["symbolic_imag"] = sym.imag
        if self.mc is not None:
            mc = self.mc
            obj["mc"] = {"estimate": mc.estimate, "se": mc.std_error, "n": mc.n_samples, "z": mc.z_score}
            if mc.imag_z_score is not None:
                obj["mc"].update(imag_estimate=mc.imag_estimate, imag_se=mc.imag_std_error, imag_z=mc.imag_z_score)
            obj["rng"] = mc.rng
        if self.fd_value is not None:
            obj["fd"] = {"value": complex(self.fd_value).real, "rel_err": self.fd_rel_err}
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def relative_error(value, reference) -> float:
    """|value - reference| / |reference|, or the absolute error when reference is 0."""
    diff = abs(complex(value) - complex(reference))
    ref = abs(complex(reference))
    return diff / ref if ref > 0 else diff


def cross_check(spec: MomentSpec, params: WishartParams, config: SimulationConfig | None = None,
                tolerances: dict | None = None, use_fd: bool = True, h: float | None = None) -> CrossCheckReport:
    """Compare the symbolic value with Monte Carlo and (order <= 3) MGF differences.

    ``tolerances`` keys: ``z_max`` (default 5) and ``fd_rel`` (default 1e-4).
    """
    tol = {"z_max": Z_MAX, "fd_rel": FD_REL_TOL, **(tolerances or {})}
    _check_flavor(spec, params)
    symbolic = evaluate(expand_moment(spec), params)
    passed = True
    mc = None
    if config is not None:
        mc = estimate_moment_mc(spec, config, reference=symbolic)
        passed = passed and mc.passed(tol["z_max"])
    fd_value = fd_err = None
    if use_fd and spec.n <= 3:
        fd_value = mgf_moment_fd(spec, params, h)
        fd_err = relative_error(fd_value, symbolic)
        passed = passed and fd_err < tol["fd_rel"]
    return CrossCheckReport(symbolic, mc, fd_value, fd_err, passed)
