"""Monte-Carlo evaluation of MRC/MRT relaying and random-matrix moment checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .analytic import DesignPoint, RateReport, SystemParams, harvested_power
from .propagation import LargeScaleProfile, Scenario, beta_profile

# trials per vectorised batch; fixed so results never depend on it
_CHUNK = 128


@dataclass(frozen=True)
class ChannelRealization:
    g_s: np.ndarray
    g_d: np.ndarray


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float | None  # None when n_trials == 1
    n_trials: int
    seed: int

    @classmethod
    def from_samples(cls, samples, seed: int) -> "MCEstimate":
        x = np.asarray(samples, dtype=float).ravel()
        n = x.size
        if n < 1:
            raise ValueError("need at least one sample")
        mean = math.fsum(x) / n
        se = None
        if n > 1:
            var = math.fsum((x - mean) ** 2) / (n - 1)
            se = math.sqrt(var / n)
        return cls(mean, se, n, seed)

    def z_score(self, target: float) -> float | None:
        if self.std_error is None:
            return None
        if self.std_error == 0:
            return 0.0 if self.mean == target else math.copysign(math.inf, self.mean - target)
        return (self.mean - target) / self.std_error


def sample_channel(profile: LargeScaleProfile, n_antennas: int,
                   rng: np.random.Generator) -> ChannelRealization:
    """Draw ``G = H diag(beta)^(1/2)`` for both hops (sources first)."""
    k = profile.k_pairs
    h_s = rngmod.complex_normal(rng, (n_antennas, k))
    h_d = rngmod.complex_normal(rng, (n_antennas, k))
    return ChannelRealization(h_s * np.sqrt(profile.beta_s), h_d * np.sqrt(profile.beta_d))


def _gram_terms(g: np.ndarray):
    """Column energies and inter-column interference, batched over leading axes."""
    gram = np.conj(np.swapaxes(g, -1, -2)) @ g
    energy = np.real(np.diagonal(gram, axis1=-2, axis2=-1))
    interf = np.sum(np.abs(gram) ** 2, axis=-1) - energy**2
    # cancellation can leave tiny negatives when columns are orthogonal
    return energy, np.maximum(interf, 0.0)


def _mrc_sinr(g_s, rho, p_s, sigma2_r):
    energy, interf = _gram_terms(g_s)
    num = rho * p_s * energy**2
    den = rho * p_s * interf + energy * sigma2_r
    return np.divide(num, den, out=np.zeros_like(num), where=energy > 0)


def _mrt_sinr(g_d, p_relay, alpha, sigma2_d):
    energy, interf = _gram_terms(g_d)
    gain = p_relay * alpha**2
    return gain * energy**2 / (gain * interf + sigma2_d)


def mrc_sinr_instant(g_s: np.ndarray, rho: float, params: SystemParams, k: int | None = None):
    """Instantaneous post-MRC SINR at the relay for pair ``k`` (all pairs if None)."""
    out = _mrc_sinr(np.asarray(g_s), rho, params.p_s, params.sigma2_r)
    return out if k is None else float(out[..., k])


def mrt_sinr_instant(g_d: np.ndarray, p_relay: float, alpha: float, params: SystemParams,
                     k: int | None = None):
    """Instantaneous SINR at destination ``k`` under MRT precoding."""
    out = _mrt_sinr(np.asarray(g_d), p_relay, alpha, params.sigma2_d)
    return out if k is None else float(out[..., k])


def mrt_alpha(profile: LargeScaleProfile, n_antennas: int) -> float:
    """Power normalisation so the average relay transmit power equals P_R."""
    return 1.0 / math.sqrt(n_antennas * math.fsum(profile.beta_d))


@dataclass(frozen=True)
class MCRateResult:
    report: RateReport  # trial averages; sinr fields hold mean instantaneous SINR
    pair: list[MCEstimate]
    sum_rate: MCEstimate


def _draw_batch(seed, key, trials, n, k):
    hs = np.empty((len(trials), n, k), dtype=complex)
    hd = np.empty_like(hs)
    for i, t in enumerate(trials):
        g = rngmod.stream(seed, *key, t)
        hs[i] = rngmod.complex_normal(g, (n, k))
        hd[i] = rngmod.complex_normal(g, (n, k))
    return hs, hd


def mc_rate_report(scenario: Scenario | LargeScaleProfile, design: DesignPoint,
                   params: SystemParams, n_trials: int, seed: int,
                   key: tuple[int, ...] = (), harvest: str = "expected") -> MCRateResult:
    """Ergodic rates from ``n_trials`` independent fading blocks.

    Trial ``t`` draws its channels from the stream ``(seed, CHANNEL, *key, t)``;
    the draws match ``sample_channel`` on that stream. ``harvest`` selects the
    relay power: ``"expected"`` uses the closed-form average for every trial,
    ``"instantaneous"`` harvests ``eta(1-rho)p_s ||G_S||_F^2`` per block.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if harvest not in ("expected", "instantaneous"):
        raise ValueError(f"unknown harvest mode {harvest!r}")
    if isinstance(scenario, Scenario):
        profile = beta_profile(scenario, design.tilt, params.pattern, params.nu)
    else:
        profile = scenario
    n, k = params.n_antennas, profile.k_pairs
    rho = design.rho
    p_relay = harvested_power(profile, rho, params)
    alpha = mrt_alpha(profile, n)
    sq_s, sq_d = np.sqrt(profile.beta_s), np.sqrt(profile.beta_d)

    g_mac = np.empty((n_trials, k))
    g_bc = np.empty((n_trials, k))
    for start in range(0, n_trials, _CHUNK):
        trials = range(start, min(start + _CHUNK, n_trials))
        hs, hd = _draw_batch(seed, (rngmod.CHANNEL, *key), trials, n, k)
        gs, gd = hs * sq_s, hd * sq_d
        if harvest == "expected":
            p_r = p_relay
        else:
            p_r = (params.eta * (1 - rho) * params.p_s
                   * np.sum(np.abs(gs) ** 2, axis=(1, 2)))[:, None]
        g_mac[trials.start:trials.stop] = _mrc_sinr(gs, rho, params.p_s, params.sigma2_r)
        g_bc[trials.start:trials.stop] = _mrt_sinr(gd, p_r, alpha, params.sigma2_d)

    r_mac = params.prelog * np.log2(1 + g_mac)
    r_bc = params.prelog * np.log2(1 + g_bc)
    r_pair = np.minimum(r_mac, r_bc)
    sums = np.array([math.fsum(row) for row in r_pair])

    def col_mean(a):
        return np.array([math.fsum(a[:, j]) / n_trials for j in range(k)])

    pair_est = [MCEstimate.from_samples(r_pair[:, j], seed) for j in range(k)]
    report = RateReport(col_mean(g_mac), col_mean(g_bc), col_mean(r_mac), col_mean(r_bc),
                        np.array([e.mean for e in pair_est]), math.fsum(sums) / n_trials)
    return MCRateResult(report, pair_est, MCEstimate.from_samples(sums, seed))


def mc_hardening_sinr(profile: LargeScaleProfile, rho: float, params: SystemParams,
                      n_trials: int, seed: int, key: tuple[int, ...] = ()):
    """Use-and-then-forget SINRs with every expectation replaced by a sample mean.

    The closed-form bounds are these ratios with the moments evaluated
    analytically, so the two converge to each other as ``n_trials`` grows.
    Channels come from the same streams as :func:`mc_rate_report`.
    Returns ``(sinr_mac, sinr_bc)`` K-vectors.
    """
    if n_trials < 2:
        raise ValueError("need at least two trials for a variance")
    n, k = params.n_antennas, profile.k_pairs
    p_relay = harvested_power(profile, rho, params)
    alpha = mrt_alpha(profile, n)
    e_s = np.empty((n_trials, k))
    i_s = np.empty((n_trials, k))
    e_d = np.empty((n_trials, k))
    i_d = np.empty((n_trials, k))
    for start in range(0, n_trials, _CHUNK):
        trials = range(start, min(start + _CHUNK, n_trials))
        hs, hd = _draw_batch(seed, (rngmod.CHANNEL, *key), trials, n, k)
        e_s[start:trials.stop], i_s[start:trials.stop] = _gram_terms(hs * np.sqrt(profile.beta_s))
        e_d[start:trials.stop], i_d[start:trials.stop] = _gram_terms(hd * np.sqrt(profile.beta_d))

    def mean(a):
        return np.array([math.fsum(a[:, j]) / n_trials for j in range(k)])

    def var(a):
        m = mean(a)
        return np.array([math.fsum((a[:, j] - m[j]) ** 2) / (n_trials - 1) for j in range(k)])

    rp = rho * params.p_s
    sinr_mac = rp * mean(e_s) ** 2 / (rp * var(e_s) + rp * mean(i_s) + mean(e_s) * params.sigma2_r)
    gain = p_relay * alpha**2
    sinr_bc = gain * mean(e_d) ** 2 / (gain * var(e_d) + gain * mean(i_d) + params.sigma2_d)
    return sinr_mac, sinr_bc


@dataclass(frozen=True)
class MomentReport:
    """Ensemble estimates of the random-matrix identities behind the closed forms.

    ``e_var_ratio`` is Var||g_k||^2 / (N beta_k^2) pooled over k, ``e_cross``
    is E|h_k^H h_j|^2 over j != k (None when K == 1).
    """

    n_antennas: int
    k_pairs: int
    sum_beta_s: float
    e_h4: MCEstimate
    e_v2: MCEstimate
    e_sigma2: MCEstimate
    e_trace: MCEstimate
    e_var_ratio: MCEstimate
    e_cross: MCEstimate | None
    n_discarded: int = 0

    def targets(self) -> dict[str, float]:
        n, k = self.n_antennas, self.k_pairs
        out = {"e_h4": 2.0, "e_v2": 1.0 / k, "e_sigma2": float(n),
               "e_trace": n * self.sum_beta_s, "e_var_ratio": 1.0}
        if self.e_cross is not None:
            out["e_cross"] = float(n)
        return out

    def rows(self):
        """``(name, estimate, target)`` for every identity that applies."""
        return [(name, getattr(self, name), target) for name, target in self.targets().items()]


def _svd_moments(h: np.ndarray):
    """Per-trial mean |v_ii|^2 and mean sigma_i^2; NaN marks a failed SVD."""
    t, _, k = h.shape
    try:
        _, sv, vh = np.linalg.svd(h, full_matrices=False)
    except np.linalg.LinAlgError:
        sv = np.full((t, k), np.nan)
        vh = np.full((t, k, k), np.nan, dtype=complex)
        for i in range(t):
            try:
                _, sv[i], vh[i] = np.linalg.svd(h[i], full_matrices=False)
            except np.linalg.LinAlgError:
                pass
    v2 = np.mean(np.abs(np.diagonal(vh, axis1=-2, axis2=-1)) ** 2, axis=-1)
    return v2, np.mean(sv**2, axis=-1)


def moment_suite(n_antennas: int, k_pairs: int, profile: LargeScaleProfile | None,
                 n_trials: int, seed: int) -> MomentReport:
    """Estimate the Haar/Gaussian moments used to derive the closed forms.

    Each trial draws one N x K matrix ``H`` of i.i.d. CN(0, 1) entries from
    stream ``(seed, MOMENTS, t)`` and records:

    * the entry-average of ``|h|^4`` (target 2),
    * the diagonal average of ``|v_ii|^2`` from ``H = U S V^H`` (target 1/K),
    * the average squared singular value (target N),
    * ``trace(G G^H)`` with ``G = H diag(beta)^(1/2)`` (target N sum(beta)),
    * the column energies ``||h_k||^2`` for the pooled variance ratio,
    * the average ``|h_k^H h_j|^2`` over ordered pairs j != k (target N).

    A trial whose SVD fails is dropped from every estimate and counted.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    n, k = n_antennas, k_pairs
    beta = np.ones(k) if profile is None else profile.beta_s
    if beta.size != k:
        raise ValueError("profile size does not match k_pairs")

    h4 = np.empty(n_trials)
    v2 = np.empty(n_trials)
    s2 = np.empty(n_trials)
    tr = np.empty(n_trials)
    cross = np.empty(n_trials)
    energy = np.empty((n_trials, k))
    for start in range(0, n_trials, _CHUNK):
        stop = min(start + _CHUNK, n_trials)
        h = np.empty((stop - start, n, k), dtype=complex)
        for i, t in enumerate(range(start, stop)):
            h[i] = rngmod.complex_normal(rngmod.stream(seed, rngmod.MOMENTS, t), (n, k))
        a2 = np.abs(h) ** 2
        h4[start:stop] = np.mean(a2**2, axis=(1, 2))
        e = a2.sum(axis=1)
        energy[start:stop] = e
        tr[start:stop] = e @ beta
        v2[start:stop], s2[start:stop] = _svd_moments(h)
        if k == 1:
            # a 1x1 unitary has unit modulus exactly
            v2[start:stop] = np.where(np.isfinite(v2[start:stop]), 1.0, np.nan)
        if k > 1:
            _, interf = _gram_terms(h)
            cross[start:stop] = interf.sum(axis=1) / (k * (k - 1))

    ok = np.isfinite(v2)
    n_bad = int(np.count_nonzero(~ok))

    x = energy[ok].ravel()
    m = x.size
    mean = math.fsum(x) / m
    dev = x - mean
    var = math.fsum(dev**2) / (m - 1) if m > 1 else 0.0
    var_se = None
    if m > 1 and ok.sum() > 1:
        m4 = math.fsum(dev**4) / m
        var_se = math.sqrt(max(m4 - var**2, 0.0) / m) / n
    var_ratio = MCEstimate(var / n, var_se, int(ok.sum()), seed)

    return MomentReport(
        n_antennas=n, k_pairs=k, sum_beta_s=math.fsum(beta),
        e_h4=MCEstimate.from_samples(h4[ok], seed),
        e_v2=MCEstimate.from_samples(v2[ok], seed),
        e_sigma2=MCEstimate.from_samples(s2[ok], seed),
        e_trace=MCEstimate.from_samples(tr[ok], seed),
        e_var_ratio=var_ratio,
        e_cross=MCEstimate.from_samples(cross[ok], seed) if k > 1 else None,
        n_discarded=n_bad,
    )
