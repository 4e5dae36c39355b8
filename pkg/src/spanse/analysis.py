"""Quantitative models: forgery bounds, decoder cost estimates, rejection rates.

Everything here is closed-form or Monte Carlo estimation; no attack is
executed. The decoder cost model covers a partial-Gaussian-elimination
attack whose reduced instance is solved by subset-sum-style list merging
(depth-b merge tree, list-size exponent nu, elimination fraction phi), with
an additional sqrt(p) discount when all p quasi-cyclic shifts of the target
syndrome are attacked at once. The rejection model predicts the
probability that a signing attempt yields a zero-free signature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binom as _binom

from .ldgm import codeword_from_generator, sample_generator
from .params import DensityPolynomial, ParameterSet
from .qcalg import SparseVector


class ConstraintError(ValueError):
    """An attack point violates one of the model's validity bounds."""


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def log2_binomial(m: int, t: int) -> float:
    """log2 of the binomial coefficient C(m, t) via log-gamma."""
    if t < 0 or t > m:
        raise ValueError(f"need 0 <= t <= m, got t={t}, m={m}")
    return (math.lgamma(m + 1) - math.lgamma(t + 1) - math.lgamma(m - t + 1)) / math.log(2)


@dataclass(frozen=True)
class BruteForceReport:
    """log2 of the chance that one uniform vector forges a given syndrome."""

    zero_free_log2: float  # n * log2((q-1)/q): all entries nonzero
    total_log2: float  # zero-free term minus r*log2(q) for the syndrome hit


def brute_force_log2(q: int, n: int, r: int) -> BruteForceReport:
    zero_free = n * math.log2((q - 1) / q)
    return BruteForceReport(zero_free, zero_free - r * math.log2(q))


# ---------------------------------------------------------------------------
# decoder cost model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AttackPoint:
    b: int  # merge-tree depth
    nu: float  # list-size exponent per reduced length
    phi: float  # eliminated fraction of n


@dataclass(frozen=True)
class CostReport:
    rho: float  # exponent (per n) of the final list size
    chi: float  # success exponent per n (before min with 0)
    iter_cost_log2: float
    success_prob_log2: float
    t_sdp_log2: float
    t_doom_log2: float  # assumes the sqrt(p) many-syndromes discount
    point: AttackPoint

    def as_dict(self) -> dict:
        return {
            "t_sdp_log2": self.t_sdp_log2,
            "t_doom_log2": self.t_doom_log2,
            "b": self.point.b,
            "nu": self.point.nu,
            "phi": self.point.phi,
        }


def _check_point(point: AttackPoint, n: int, R: float, q: int):
    if point.b < 1:
        raise ConstraintError(f"b={point.b} must be >= 1")
    if not (0.0 < point.phi < 1.0 - R):
        raise ConstraintError(f"phi={point.phi} outside (0, 1-R={1 - R})")
    b_max = math.floor(math.log2((1.0 - point.phi) * n))
    if point.b > b_max:
        raise ConstraintError(f"b={point.b} exceeds log2 of the reduced length ({b_max})")
    nu_max = 2.0 ** (-point.b) * math.log2(q - 1)
    if not (0.0 < point.nu < nu_max):
        raise ConstraintError(f"nu={point.nu} outside (0, {nu_max}) for b={point.b}")


def pge_ss_exponents(point: AttackPoint, *, n: int, k: int, q: int, p: int) -> CostReport:
    """Cost exponents of the list-merging decoder at a fixed attack point.

    After eliminating phi*n coordinates the residual code has length
    n' = (1-phi)n and rate R' = R/(1-phi). A depth-b merge tree with lists
    of size 2^{nu n'} leaves ~2^{rho n} candidates; an iteration succeeds
    with probability 2^{n min(0, chi)} where chi folds in the chance that
    the eliminated block stays zero-free.
    """
    R = k / n
    _check_point(point, n, R, q)
    b, nu, phi = point.b, point.nu, point.phi
    R_prime = R / (1.0 - phi)
    rho = ((b + 1) * nu - (1.0 - R_prime) * math.log2(q)) * (1.0 - phi)
    chi = rho + phi * math.log2(1.0 - 1.0 / q)
    iter_cost = max(nu * (1.0 - phi), rho) * n
    success = min(0.0, chi) * n
    t_sdp = iter_cost - success
    t_doom = t_sdp - 0.5 * math.log2(p)
    return CostReport(rho, chi, iter_cost, success, t_sdp, t_doom, point)


def pge_ss_for_params(point: AttackPoint, params: ParameterSet) -> CostReport:
    return pge_ss_exponents(point, n=params.n, k=params.k, q=params.q, p=params.p)


@dataclass(frozen=True)
class SearchConfig:
    phi_coarse: int = 2001
    phi_refine: int = 401
    refine_rounds: int = 2
    nu_step: float = 1e-4  # neighborhood probed around each exact kink


def _best_over_nu(b: int, phi: float, *, n: int, k: int, q: int, p: int,
                  nu_step: float) -> CostReport | None:
    """Minimize over nu at fixed (b, phi).

    The objective max(nu(1-phi), rho) - min(0, chi) is piecewise linear in
    nu, so the minimum sits on a kink or a boundary; we evaluate the kinks
    (where the two iteration-cost branches cross, and where chi changes
    sign) plus small neighborhoods around them.
    """
    R = k / n
    R_prime = R / (1.0 - phi)
    C = (1.0 - R_prime) * math.log2(q)
    D = math.log2(1.0 - 1.0 / q)  # negative
    nu_max = 2.0 ** (-b) * math.log2(q - 1)
    kinks = [C / b, (C - phi * D / (1.0 - phi)) / (b + 1)]
    candidates = []
    for nu0 in kinks:
        candidates.extend([nu0 - nu_step, nu0, nu0 + nu_step])
    candidates.append(nu_max * (1.0 - 1e-9))
    candidates.append(nu_step)
    best = None
    for nu in candidates:
        if not (0.0 < nu < nu_max):
            continue
        try:
            report = pge_ss_exponents(AttackPoint(b, nu, phi), n=n, k=k, q=q, p=p)
        except ConstraintError:
            continue
        if best is None or report.t_doom_log2 < best.t_doom_log2:
            best = report
    return best


def optimize_attack(*, n: int, k: int, q: int, p: int,
                    config: SearchConfig = SearchConfig()) -> CostReport:
    """Minimize t_doom_log2 over (b, nu, phi).

    b is swept exhaustively; phi runs on a coarse grid followed by local
    refinements; nu is resolved exactly at each (b, phi) through the
    piecewise-linear kink structure of the objective.
    """
    R = k / n
    phi_hi = (1.0 - R) * (1.0 - 1e-9)
    best = None
    for b in range(1, math.floor(math.log2(n)) + 1):
        if 2.0 ** (-b) * math.log2(q - 1) <= 0:
            break
        lo, hi = phi_hi * 1e-6, phi_hi
        grid = np.linspace(lo, hi, config.phi_coarse)
        local_best = None
        for _ in range(config.refine_rounds + 1):
            for phi in grid:
                report = _best_over_nu(b, float(phi), n=n, k=k, q=q, p=p,
                                       nu_step=config.nu_step)
                if report is None:
                    continue
                if local_best is None or report.t_doom_log2 < local_best.t_doom_log2:
                    local_best = report
            if local_best is None:
                break
            step = grid[1] - grid[0]
            center = local_best.point.phi
            lo = max(phi_hi * 1e-6, center - 2 * step)
            hi = min(phi_hi, center + 2 * step)
            grid = np.linspace(lo, hi, config.phi_refine)
        if local_best is not None and (best is None or
                                       local_best.t_doom_log2 < best.t_doom_log2):
            best = local_best
    if best is None:
        raise ConstraintError("no feasible attack point found")
    return best


def optimize_attack_for_params(params: ParameterSet,
                               config: SearchConfig = SearchConfig()) -> CostReport:
    return optimize_attack(n=params.n, k=params.k, q=params.q, p=params.p, config=config)


# ---------------------------------------------------------------------------
# rejection-rate model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RejectionReport:
    p_zero_entry: float  # probability one signature entry is 0 mod q
    p_valid: float  # probability a whole attempt is accepted
    expected_attempts: float

    def as_dict(self) -> dict:
        return {
            "p_valid": self.p_valid,
            "expected_attempts": self.expected_attempts,
        }


def _fold_mod_q(pmf: np.ndarray, q: int) -> np.ndarray:
    out = np.zeros(q)
    for start in range(0, pmf.size, q):
        chunk = pmf[start : start + q]
        out[: chunk.size] += chunk
    return out


@dataclass
class RejectionModel:
    """Entry-value distributions for one signing attempt.

    The masked vector v = e + c has two independent contributions per
    signature entry: the codeword part (weight concentrated near m_g*w_g)
    and the sparse syndrome part (weight exactly w). Each contributes a
    sum of Bernoulli(d1) picks through the dense transform, reduced mod q.

    weight_model selects how the codeword weight z is treated:
    "binomial" draws z ~ Bin(n, rho_c) truncated at zmax (the per-entry
    Bernoulli model); "fixed" pins z at m_g*w_g, matching the sampler's
    near-constant codeword weight.
    """

    params: ParameterSet
    weight_model: str = "binomial"
    rho_c: float = field(init=False)
    rho_S: float = field(init=False)
    codeword_dist: np.ndarray = field(init=False)  # Pr[c-part = x mod q]
    pattern_dist: np.ndarray = field(init=False)  # Pr[e-part = x mod q]

    def __post_init__(self):
        ps = self.params
        if not ps.density.is_binary():
            raise ValueError("analytic model requires a binary density; use Monte Carlo")
        n, q, w = ps.n, ps.q, ps.w
        self.rho_c = 1.0 - (1.0 - ps.w_g / n) ** ps.m_g
        self.rho_S = float(ps.density.d1)
        if self.weight_model == "binomial":
            zmax = min(n, 4 * ps.m_g * ps.w_g)
            zs = np.arange(zmax + 1)
            pz = _binom.pmf(zs, n, self.rho_c)
            pz = pz / pz.sum()
        elif self.weight_model == "fixed":
            zs = np.array([min(n, ps.m_g * ps.w_g)])
            pz = np.array([1.0])
        else:
            raise ValueError(f"unknown weight model {self.weight_model!r}")
        dist = np.zeros(q)
        for z, pzv in zip(zs, pz):
            if pzv == 0.0:
                continue
            pmf = _binom.pmf(np.arange(z + 1), z, self.rho_S)
            dist += pzv * _fold_mod_q(pmf, q)
        self.codeword_dist = dist / dist.sum()
        ppat = _binom.pmf(np.arange(w + 1), w, self.rho_S)
        self.pattern_dist = _fold_mod_q(ppat, q)

    def p_zero_entry(self) -> float:
        q = self.params.q
        return float(
            np.dot(self.codeword_dist, self.pattern_dist[(q - np.arange(q)) % q])
        )

    def report(self) -> RejectionReport:
        p0 = self.p_zero_entry()
        p_valid = (1.0 - p0) ** self.params.n
        expected = math.inf if p_valid == 0.0 else 1.0 / p_valid
        return RejectionReport(p0, p_valid, expected)


def rejection_rate_analytic(params: ParameterSet,
                            weight_model: str = "binomial") -> RejectionReport:
    """Closed-form acceptance probability for binary densities."""
    return RejectionModel(params, weight_model).report()


# ---------------------------------------------------------------------------
# Monte Carlo rejection estimation
# ---------------------------------------------------------------------------

def _simulate_batch(params: ParameterSet, density: DensityPolynomial,
                    trials: int, seed) -> int:
    """Count accepted attempts among `trials`, with one shared code sample.

    Per trial the masked vector v = e + c is built exactly as in signing
    (real sparse codeword plus a fresh weight-w pattern in the last r
    positions). Each signature entry is an independent sum
    sum_j v_j * X_j with X_j i.i.d. from the density, so for each distinct
    value g in v's support the contribution across all n entries is read
    off a multinomial draw over the density's values — no dense n x n
    matrix is ever materialized.
    """
    rng = np.random.default_rng(seed)
    q, n, k, r, w = params.q, params.n, params.k, params.r, params.w
    pairs = [(v, pr) for v, pr in density.value_probabilities() if pr > 0]
    dvals = np.array([v for v, _ in pairs], dtype=np.int64)
    dprobs = np.array([float(pr) for _, pr in pairs])
    dprobs /= dprobs.sum()
    G = sample_generator(params, rng)
    accepted = 0
    for _ in range(trials):
        c = codeword_from_generator(G, params, params.m_g, rng)
        epos = rng.choice(r, size=w, replace=False)
        e = SparseVector(n, k + np.sort(epos), np.ones(w, dtype=np.int64), q)
        v = c.add(e)
        sigma = np.zeros(n, dtype=np.int64)
        for g in np.unique(v.values):
            t_g = int(np.count_nonzero(v.values == g))
            counts = rng.multinomial(t_g, dprobs, size=n)
            sigma += int(g) * (counts @ dvals)
        if np.all(sigma % q != 0):
            accepted += 1
    return accepted


def rejection_rate_montecarlo(
    params: ParameterSet,
    density: DensityPolynomial,
    trials: int,
    seed: int | None = None,
    batch_size: int = 1000,
    workers: int = 1,
) -> tuple[float, float]:
    """Estimated acceptance probability and its binomial standard error.

    Batches reuse one sampled generator (its influence enters only through
    the codeword weight distribution); per-batch seeds are spawned from
    the base seed, so results are reproducible at any parallelism degree.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    sizes = [batch_size] * (trials // batch_size)
    if trials % batch_size:
        sizes.append(trials % batch_size)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_simulate_batch,
                                   [params] * len(sizes), [density] * len(sizes),
                                   sizes, seeds))
    else:
        counts = [_simulate_batch(params, density, sz, sd)
                  for sz, sd in zip(sizes, seeds)]
    accepted = sum(counts)
    p_hat = accepted / trials
    stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 1.0 / trials) / trials)
    return p_hat, stderr


# ---------------------------------------------------------------------------
# sizes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SizeReport:
    pk_symbols: float
    pk_packed_bytes: float  # ceil(log2 q) bits per symbol
    pk_disk_bytes: float  # one byte per symbol plus header
    sig_bytes: float
    log2_Ns: float  # number of distinct syndromes C(r, w)
    log2_Nc: float  # number of masking codewords C(k, m_g)

    def as_dict(self) -> dict:
        return {
            "pk_packed_bytes": self.pk_packed_bytes,
            "log2_Ns": self.log2_Ns,
            "log2_Nc": self.log2_Nc,
        }


def size_counts(*, n: float, r: float, p: float, q: int, w: int, m_g: int,
                theta_bytes: int = 32, header_bytes: int = 0) -> SizeReport:
    """Size arithmetic on raw dimensions (kept separate from ParameterSet so
    non-block-divisible reference dimensions can be evaluated as pure
    numbers)."""
    symbols = r * n / p
    bits = math.ceil(math.log2(q))
    return SizeReport(
        pk_symbols=symbols,
        pk_packed_bytes=symbols * bits / 8.0,
        pk_disk_bytes=symbols + header_bytes,
        sig_bytes=n + theta_bytes + header_bytes,
        log2_Ns=log2_binomial(int(r), w),
        log2_Nc=log2_binomial(int(n - r), m_g),
    )


def size_report(params: ParameterSet, theta_bytes: int = 32) -> SizeReport:
    from .serial import serialize_params

    header = len(serialize_params(params))
    return size_counts(n=params.n, r=params.r, p=params.p, q=params.q,
                       w=params.w, m_g=params.m_g,
                       theta_bytes=theta_bytes, header_bytes=header)
