"""Monte Carlo check of the tensor CLT with random Kraus-type matrices.

``M_k = lam I + sigma W_k`` with ``W_k`` real symmetric Gaussian (GOE scaling:
off-diagonal variance ``1/d``, diagonal ``2/d``), and

    Delta = (delta sqrt(n))^{-1} sum_k (M_k x M_k - C).

Two knobs control how closely this follows the limiting statement:

``centering``
    ``"exact"`` subtracts ``C = E[M_k x M_k] = lam^2 I + sigma^2 E[W x W]``;
    ``"limit"`` subtracts only ``lam^2 I``.  The latter leaves a rank-one
    spike of height ``~ sqrt(n) sigma^2 / delta`` that dominates the fourth
    moment at moderate ``d``.
``normalization``
    ``"ensemble"`` uses ``delta`` built from the finite-``d`` variance
    ``sigma^2 (1 + 1/d)`` of the spectral measure of ``M_k``; ``"limit"`` uses
    ``sigma^2`` itself.

Moments ``(1/d^2) tr(Delta^p)`` are computed from dense matrix powers
(``tr(A^{i+j}) = <A^i, A^j>`` for symmetric ``A``), never eigenvalues.
Every trial draws from its own Philox stream spawned from one
``SeedSequence``, so trials are order-independent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from tensorclt.errors import CapExceededError, DomainError
from tensorclt.free_moments import to_fraction
from tensorclt.limit_law import mu_q_moments_fast, q_from_params

DIM_CAP = 64
GENERATOR = "numpy.random.Philox via SeedSequence(seed).spawn(trials)"


@dataclass(frozen=True)
class SimConfig:
    d: int = 50
    n: int = 100
    lam: float = 1.0
    sigma: float = 1.0
    trials: int = 20
    seed: int = 20240601
    pmax: int = 4
    centering: str = "exact"
    normalization: str = "ensemble"
    dim_cap: int = DIM_CAP

    def __post_init__(self):
        if self.d < 2:
            raise DomainError(f"d must be >= 2, got {self.d}")
        if self.n < 1 or self.trials < 1:
            raise DomainError("n and trials must be >= 1")
        if self.pmax < 2 or self.pmax % 2:
            raise DomainError(f"pmax must be an even integer >= 2, got {self.pmax}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.centering not in ("exact", "limit"):
            raise DomainError(f"unknown centering {self.centering!r}")
        if self.normalization not in ("ensemble", "limit"):
            raise DomainError(f"unknown normalization {self.normalization!r}")
        if self.d > self.dim_cap:
            raise CapExceededError(
                f"d={self.d} exceeds the dimension cap {self.dim_cap} (matrix side d^2={self.d ** 2})"
            )
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def q(self) -> Fraction:
        return q_from_params(to_fraction(self.lam), to_fraction(self.sigma) ** 2)

    @property
    def delta(self) -> float:
        s2 = self.sigma**2
        if self.normalization == "ensemble":
            s2 *= 1 + 1 / self.d
        return math.sqrt(s2 * (s2 + 2 * self.lam**2))


@dataclass
class SimResult:
    config: SimConfig
    orders: list[int]
    means: list[float]
    std_errors: list[float]
    reference: list[Fraction]
    z_scores: list[float]
    generator: str = GENERATOR
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    def rows(self) -> list[dict]:
        return [
            {
                "p": p,
                "empirical_mean": m,
                "std_error": s,
                "reference": r,
                "z_score": z,
            }
            for p, m, s, r, z in zip(self.orders, self.means, self.std_errors, self.reference, self.z_scores)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["p", "empirical_mean", "std_error", "reference", "z_score"])
        for row in self.rows():
            writer.writerow([row["p"], repr(row["empirical_mean"]), repr(row["std_error"]),
                             str(row["reference"]), repr(row["z_score"])])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "format_version": "1",
            "config": asdict(self.config),
            "q": str(self.config.q),
            "generator": self.generator,
            "rows": [dict(r, reference=str(r["reference"])) for r in self.rows()],
        }
        return json.dumps(payload, indent=2)


def trial_generators(seed: int, trials: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(trials)]


def sample_wigner(d: int, rng: np.random.Generator, count: int | None = None) -> np.ndarray:
    """Real symmetric Gaussian matrix (or a stack of ``count`` of them)."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    shape = (d, d) if count is None else (count, d, d)
    g = rng.standard_normal(shape)
    return (g + np.swapaxes(g, -1, -2)) / math.sqrt(2 * d)


def wigner_tensor_expectation(d: int) -> np.ndarray:
    """``E[W x W]`` as a ``d^2 x d^2`` matrix: ``(delta_ij delta_kl + delta_il delta_jk) / d``."""
    eye = np.eye(d)
    e = np.einsum("ij,kl->ijkl", eye, eye) + np.einsum("il,jk->ijkl", eye, eye)
    return e.reshape(d * d, d * d) / d


def kron_square_sum(ms: np.ndarray) -> np.ndarray:
    """``sum_k M_k x M_k`` for a stack ``(n, d, d)``, via one matrix product."""
    n, d, _ = ms.shape
    flat = ms.reshape(n, d * d)
    gram = flat.T @ flat  # [(i,k),(j,l)] = sum_n M[i,k] M[j,l]
    return gram.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def build_delta(config: SimConfig, rng: np.random.Generator | None = None,
                wigners: np.ndarray | None = None) -> np.ndarray:
    """One sample of ``Delta / delta`` (already divided by ``delta sqrt(n)``)."""
    d, n = config.d, config.n
    if wigners is None:
        if rng is None:
            rng = trial_generators(config.seed, 1)[0]
        wigners = sample_wigner(d, rng, count=n)
    ms = config.lam * np.eye(d) + config.sigma * wigners
    total = kron_square_sum(ms)
    total[np.diag_indices(d * d)] -= n * config.lam**2
    if config.centering == "exact":
        total -= n * config.sigma**2 * wigner_tensor_expectation(d)
    return total / (config.delta * math.sqrt(n))


def normalized_traces(delta: np.ndarray, pmax: int) -> np.ndarray:
    """``[(1/N) tr(Delta^p) for p = 0..pmax]`` with ``N`` the matrix side."""
    size = delta.shape[0]
    half = pmax // 2
    powers = [np.eye(size), delta]
    for _ in range(2, half + 1):
        powers.append(powers[-1] @ delta)
    out = np.empty(pmax + 1)
    for p in range(pmax + 1):
        i = min(p, half)
        j = p - i
        out[p] = np.vdot(powers[i], powers[j]) / size
    out[0] = 1.0
    return out


def _run_trial(config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    return normalized_traces(build_delta(config, rng), config.pmax)


def empirical_moments(config: SimConfig, workers: int = 1) -> SimResult:
    rngs = trial_generators(config.seed, config.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = np.array(list(pool.map(lambda r: _run_trial(config, r), rngs)))
    else:
        samples = np.array([_run_trial(config, r) for r in rngs])
    means = samples.mean(axis=0)
    if config.trials > 1:
        ses = samples.std(axis=0, ddof=1) / math.sqrt(config.trials)
    else:
        ses = np.zeros(config.pmax + 1)
    ses[0] = 0.0
    reference = list(mu_q_moments_fast(config.pmax, config.q).moments)
    z = []
    for m, s, r in zip(means, ses, reference):
        diff = float(m) - float(r)
        if s > 0:
            z.append(diff / float(s))
        else:
            z.append(0.0 if diff == 0 else math.copysign(math.inf, diff))
    return SimResult(
        config=config,
        orders=list(range(config.pmax + 1)),
        means=[float(m) for m in means],
        std_errors=[float(s) for s in ses],
        reference=reference,
        z_scores=z,
        samples=samples,
    )
