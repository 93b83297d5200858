"""Analytic reference curves and the Monte Carlo BER harness.

The no-sneak-path probability sums, over the counts (u, v) of LRS cells
sharing the target's row and column, the chance that none of the u*v
candidate rectangles has an LRS diagonal cell with a failed selector.
It feeds a two-term lower bound on BER: unaffected cells fail like a
midpoint detector in Gaussian noise, affected cells like a detector
separating the parasitic HRS level from LRS.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erfc, gammaln, logsumexp, xlogy

from . import codec as gs
from .channel import ChannelParams, random_array, transmit
from .detectors import DetectMode, ThresholdDetector, classify_array, pipeline_detect
from .rng import STREAM_DATA, STREAM_FAILURES, STREAM_NOISE, derive_rng


def q_function(x):
    """Standard Gaussian tail probability Q(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / np.sqrt(2.0))


@dataclass(frozen=True)
class BoundInput:
    n: int
    q: float
    p_f: float
    r0: float = 1000.0
    r1: float = 100.0
    r_sp: float = 250.0
    sigma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        ChannelParams(n=self.n, r0=self.r0, r1=self.r1, r_sp=self.r_sp,
                      sigma=self.sigma, p_f=self.p_f)

    @classmethod
    def from_params(cls, params: ChannelParams, q: float = 0.5) -> "BoundInput":
        return cls(n=params.n, q=q, p_f=params.p_f, r0=params.r0, r1=params.r1,
                   r_sp=params.r_sp, sigma=params.sigma)


def p_nonsp(b: BoundInput) -> float:
    """Probability that a cell has no active sneak-path configuration."""
    k = b.n - 1
    u = np.arange(k + 1)
    log_binom = gammaln(k + 1) - gammaln(u + 1) - gammaln(k - u + 1)
    log_q = xlogy(u, b.q) + xlogy(k - u, 1.0 - b.q)
    log_marg = log_binom + log_q  # log C(k,u) q^u (1-q)^(k-u), per axis
    uv = np.outer(u, u)
    log_surv = xlogy(uv, 1.0 - b.p_f * b.q)
    total = logsumexp(log_marg[:, None] + log_marg[None, :] + log_surv)
    return float(np.clip(np.exp(total), 0.0, 1.0))


def simulate_nonsp_fraction(b: BoundInput, cells: int, seed: int,
                            batch: int = 20000) -> float:
    """Monte Carlo estimate of the no-active-sneak-path probability.

    Samples one target cell per independently drawn array so the returned
    fraction is a mean of i.i.d. indicators; cells inside a single array
    are correlated, which would invalidate a plain binomial error bar.
    """
    if cells < 1:
        raise ValueError("cells must be >= 1")
    rng = np.random.default_rng(seed)
    n = b.n
    clear = 0
    done = 0
    while done < cells:
        m = min(batch, cells - done)
        a = rng.random((m, n, n)) < b.q
        fails = rng.random((m, n, n)) < b.p_f
        # Active configurations for the corner target: an LRS cell in its row,
        # one in its column, and a failed LRS cell on the opposite corner.
        diag = a[:, 1:, 1:] & fails[:, 1:, 1:]
        counts = np.einsum("bv,buv,bu->b", a[:, 0, 1:], diag, a[:, 1:, 0])
        clear += int((counts == 0).sum())
        done += m
    return clear / cells


def ber_lower_bound(b: BoundInput) -> float:
    """Two-level Gaussian-tail lower bound on detected-cell BER."""
    if b.sigma == 0.0:
        return 0.0
    p = p_nonsp(b)
    r0_sp = 1.0 / (1.0 / b.r0 + 1.0 / b.r_sp)
    return float(p * q_function((b.r0 - b.r1) / (2.0 * b.sigma))
                 + (1.0 - p) * q_function((r0_sp - b.r1) / (2.0 * b.sigma)))


# --- Monte Carlo harness -------------------------------------------------

MIDPOINT = "midpoint"          # plain middle-point threshold on every array
MLP_ALL = "mlp_all"            # network detection on every array
PIPELINE_DL = "pipeline_dl"    # classify, re-detect affected arrays with the net
PIPELINE_THRESHOLD = "pipeline_threshold"  # re-detect with the derived threshold


@dataclass
class Scenario:
    """One detector + channel + (optional) code composition to simulate."""

    detector: str
    params: ChannelParams
    codec: gs.CodecConfig | None = None
    q: float = 0.5
    model: object = None
    spi_detector: ThresholdDetector | None = None
    name: str | None = None

    def __post_init__(self):
        if self.detector not in (MIDPOINT, MLP_ALL, PIPELINE_DL, PIPELINE_THRESHOLD):
            raise ValueError(f"unknown detector {self.detector!r}")
        if self.detector in (MLP_ALL, PIPELINE_DL) and self.model is None:
            raise ValueError(f"{self.detector} needs a trained model")
        if self.detector == PIPELINE_THRESHOLD and self.spi_detector is None:
            raise ValueError("pipeline_threshold needs a derived threshold")
        if self.codec is not None and self.params.n % self.codec.m != 0:
            raise ValueError("array side must be a multiple of the sub-array side")

    @property
    def rate(self) -> float:
        return 1.0 if self.codec is None else self.codec.rate

    @property
    def label(self) -> str:
        return self.name if self.name is not None else self.detector


@dataclass
class BerEstimate:
    detector: str
    sigma: float
    p_f: float
    rate: float
    trials: int
    cells: int
    errors: int
    ber: float
    ci95: float
    seed: int
    user_errors: int = 0
    user_bits: int = 0
    trial_errors: np.ndarray | None = None

    @property
    def user_ber(self) -> float:
        return self.user_errors / self.user_bits if self.user_bits else 0.0


def binomial_ci95(errors: int, cells: int) -> float:
    """Half-width of the normal-approximation 95% interval on a proportion."""
    if cells == 0:
        return 0.0
    p = errors / cells
    return 1.96 * np.sqrt(max(p * (1.0 - p), 1.0 / cells) / cells)


def array_level_se(est: BerEstimate) -> float:
    """Standard error of the BER treating whole arrays as the sample unit.

    Errors within one array are correlated (a single failed selector can
    flip several cells), so the per-cell binomial error bar understates
    the true spread; the across-trial variance does not.
    """
    if est.trial_errors is None or est.trials < 2:
        raise ValueError("estimate carries no per-trial error counts")
    cells_per_trial = est.cells / est.trials
    return float(np.std(est.trial_errors, ddof=1)
                 / cells_per_trial / np.sqrt(est.trials))


def le_zscore(a: BerEstimate, b: BerEstimate) -> float:
    """Standardized BER difference (a - b) using array-level errors."""
    se = np.hypot(array_level_se(a), array_level_se(b))
    return float((a.ber - b.ber) / se)


def confidently_le(a: BerEstimate, b: BerEstimate, z: float = 1.645) -> bool:
    """One-sided 95% test of the claim BER(a) <= BER(b).

    The claim includes equality, so it is rejected only when ``a``
    measures higher than ``b`` by more than ``z`` standard errors of the
    difference; a statistical tie is consistent with the claim.
    """
    return le_zscore(a, b) <= z


def write_trial(scn: Scenario, master_seed: int, trial: int):
    """Generate one stored array (and its side information) for a trial."""
    data_rng = derive_rng(master_seed, trial, STREAM_DATA)
    if scn.codec is not None:
        payload = (data_rng.random(gs.payload_length(scn.codec, scn.params.n)) < scn.q)
        payload = payload.astype(np.int64)
        enc = gs.encode_array(payload, scn.codec, scn.params.n)
        return payload, enc.bits, enc.weights, scn.codec.m
    bits = random_array(scn.params.n, scn.q, data_rng)
    return None, bits, [int(bits.sum())], scn.params.n


def detect_trial(scn: Scenario, reads: np.ndarray, weights: list[int], tile: int) -> np.ndarray:
    if scn.detector == MIDPOINT:
        return ThresholdDetector.midpoint(scn.params).detect(reads)
    if scn.detector == MLP_ALL:
        from .mlp import hard_decide
        return hard_decide(scn.model, reads)
    mode = DetectMode.DL if scn.detector == PIPELINE_DL else DetectMode.DL_THRESHOLD
    est, _ = pipeline_detect(reads, weights, tile, scn.params, mode,
                             model=scn.model, spi_detector=scn.spi_detector)
    return est


def estimate_ber(scn: Scenario, trials: int, master_seed: int) -> BerEstimate:
    """Run independent encode -> channel -> detect passes and count errors."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    errors = 0
    cells = 0
    user_errors = 0
    user_bits = 0
    trial_errors = np.zeros(trials, dtype=np.int64)
    for trial in range(trials):
        payload, bits, weights, tile = write_trial(scn, master_seed, trial)
        fail_rng = derive_rng(master_seed, trial, STREAM_FAILURES)
        noise_rng = derive_rng(master_seed, trial, STREAM_NOISE)
        _, _, reads = transmit(bits, scn.params, fail_rng, noise_rng)
        est = detect_trial(scn, reads, weights, tile)
        trial_errors[trial] = int((est != bits).sum())
        errors += int(trial_errors[trial])
        cells += bits.size
        if payload is not None:
            decoded = gs.decode_array(est, scn.codec)
            user_errors += int((decoded != payload).sum())
            user_bits += payload.size
    return BerEstimate(
        detector=scn.label, sigma=scn.params.sigma, p_f=scn.params.p_f,
        rate=scn.rate, trials=trials, cells=cells, errors=errors,
        ber=errors / cells, ci95=binomial_ci95(errors, cells), seed=master_seed,
        user_errors=user_errors, user_bits=user_bits, trial_errors=trial_errors,
    )


def empirical_one_density(scn: Scenario, master_seed: int, trials: int = 200) -> float:
    """Post-coding '1'-density, used as q when bounding coded scenarios."""
    ones = 0
    cells = 0
    for trial in range(trials):
        _, bits, _, _ = write_trial(scn, master_seed, trial)
        ones += int(bits.sum())
        cells += bits.size
    return ones / cells


def bound_for_scenario(scn: Scenario, master_seed: int = 0) -> float:
    """Eq.-style lower bound at the scenario's operating point."""
    q = scn.q if scn.codec is None else empirical_one_density(scn, master_seed)
    return ber_lower_bound(BoundInput.from_params(scn.params, q))
