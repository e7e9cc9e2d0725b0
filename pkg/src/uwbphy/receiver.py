"""Matched-filter synchronization and the three demodulators.

All receivers share one structure: slice the received signal into
frames, look only at the code-predicted chip inside each frame, and
decide the bit from correlations (BPAM, PPM) or windowed energy (OOK).

    BPAM: one correlation against the template; sign decides.
    PPM : two correlations, at the nominal and the delta-shifted
          position; the larger one decides.
    OOK : square-and-integrate over the chip window; a calibrated
          threshold decides.

Every comparison tie decodes as bit 1 so the quantized datapath, where
ties are reachable, stays deterministic.

The datapath field selects between the floating-point reference and a
quantized mode in which both the received samples and the template
pass through the same ADC model before correlation; accumulators stay
in double precision either way.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import correlate

from .channel import quantize_array
from .errors import (
    InvalidParams,
    RateMismatch,
    SchemeMismatch,
    UncalibratedThreshold,
    WindowTooSmall,
)
from .framing import chip_offsets_for_frames, chip_samples, require_code
from .transmitter import BPAM, OOK, PPM, check_pulse_fits, delta_samples, place_pulse_train
from .waveform import SampledSignal


@dataclass(frozen=True)
class ReceiverConfig:
    """Everything a receiver needs to know about the link.

    template: unit-energy sampled pulse at the received sample rate.
    integration_window: OOK energy window, seconds (defaults to the
        template support).
    threshold: OOK decision threshold in energy units; must be
        calibrated before demod_ook runs.
    datapath: None for the floating-point reference, or a
        QuantizerConfig for the quantized mode.
    """

    mod: object
    params: object
    code: object
    template: SampledSignal
    integration_window: float = None
    threshold: float = None
    datapath: object = None

    def __post_init__(self):
        require_code(self.code, self.params)
        check_pulse_fits(self.mod, self.params, self.template)
        if self.integration_window is None:
            object.__setattr__(
                self,
                "integration_window",
                (len(self.template) - 1) / self.template.sample_rate,
            )
        if not 0.0 < self.integration_window <= self.params.t_c * (1 + 1e-12):
            raise InvalidParams(
                f"integration_window {self.integration_window:g} s must be "
                f"in (0, t_c = {self.params.t_c:g}]"
            )
        if self.threshold is not None and self.threshold < 0.0:
            raise InvalidParams(
                f"threshold must be >= 0, got {self.threshold}"
            )

    @property
    def sample_rate(self):
        return self.template.sample_rate

    @property
    def chip_len(self):
        return chip_samples(self.params, self.sample_rate)

    @property
    def frame_len(self):
        return self.params.n_c * self.chip_len

    def with_threshold(self, threshold):
        return replace(self, threshold=threshold)


@dataclass(frozen=True)
class SyncEstimate:
    """Matched-filter timing estimate: integer sample offset and the
    correlation metric at the peak."""

    offset: int
    peak_metric: float


GENIE_SYNC = SyncEstimate(offset=0, peak_metric=math.inf)


def _check_rx(rx, cfg):
    if rx.sample_rate != cfg.sample_rate:
        raise RateMismatch(
            f"rx at {rx.sample_rate:g} S/s but template at "
            f"{cfg.sample_rate:g} S/s"
        )


def _datapath_arrays(rx, cfg):
    """Received and template sample arrays after the configured ADC."""
    if cfg.datapath is None:
        return rx.samples, cfg.template.samples
    return (
        quantize_array(rx.samples, cfg.datapath),
        quantize_array(cfg.template.samples, cfg.datapath),
    )


def _frames(x, offset, frame_len):
    """View the tail of x from offset as whole frames: (n, frame_len)."""
    n = (len(x) - offset) // frame_len
    if n <= 0:
        return np.zeros((0, frame_len)), 0
    flat = x[offset:offset + n * frame_len]
    return flat.reshape(n, frame_len), n


def _window_sums(view, starts, width, tpl=None):
    """Per-frame window statistics.

    With tpl: correlation of each frame's [start, start+width) window
    against tpl. Without: energy sum of squares over the window.
    Frames are grouped by start offset so each group is one matrix op.
    """
    n, frame_len = view.shape
    out = np.empty(n, dtype=np.float64)
    for s in np.unique(starts):
        rows = np.nonzero(starts == s)[0]
        w = min(width, frame_len - s)
        block = view[rows, s:s + w]
        if tpl is None:
            out[rows] = np.einsum("ij,ij->i", block, block)
        else:
            out[rows] = block @ tpl[:w]
    return out


def synchronize(rx, cfg, search_window, n_sync_frames):
    """Estimate the timing offset with a matched filter.

    Correlates the received signal against an n_sync_frames all-ones
    preamble laid out by the active code, over candidate lags
    0..search_window, and returns the argmax (ties broken toward the
    smallest lag).

    Raises WindowTooSmall for search_window < 1 and InvalidParams when
    the signal cannot even contain the preamble.
    """
    _check_rx(rx, cfg)
    search_window = int(search_window)
    if search_window < 1:
        raise WindowTooSmall(
            f"search_window must cover at least one lag, got {search_window}"
        )
    rxs, tpl = _datapath_arrays(rx, cfg)
    preamble = place_pulse_train(
        np.ones(int(n_sync_frames), dtype=np.int64),
        cfg.mod,
        cfg.params,
        cfg.code,
        SampledSignal(tpl, cfg.sample_rate),
    )
    if len(rx) < len(preamble):
        raise InvalidParams(
            f"received signal ({len(rx)} samples) shorter than the "
            f"{len(preamble)}-sample preamble"
        )
    metric = correlate(rxs, preamble.samples, mode="valid") / cfg.sample_rate
    lags = min(search_window, len(metric) - 1)
    best = int(np.argmax(metric[:lags + 1]))
    return SyncEstimate(offset=best, peak_metric=float(metric[best]))


def _chip_starts(cfg, n):
    return chip_offsets_for_frames(cfg.code, n) * cfg.chip_len


def demod_bpam(rx, cfg, sync=GENIE_SYNC):
    """Decode BPAM: bit 1 iff the template correlation at the
    code-predicted position is >= 0."""
    if cfg.mod.scheme != BPAM:
        raise SchemeMismatch(f"BPAM demodulator got scheme {cfg.mod.scheme!r}")
    _check_rx(rx, cfg)
    rxs, tpl = _datapath_arrays(rx, cfg)
    view, n = _frames(rxs, sync.offset, cfg.frame_len)
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    corr = _window_sums(view, _chip_starts(cfg, n), len(tpl), tpl)
    return (corr >= 0.0).astype(np.uint8)


def demod_ppm(rx, cfg, sync=GENIE_SYNC):
    """Decode PPM from the double correlation: bit 1 iff the shifted
    position's correlation is >= the nominal one."""
    if cfg.mod.scheme != PPM:
        raise SchemeMismatch(f"PPM demodulator got scheme {cfg.mod.scheme!r}")
    _check_rx(rx, cfg)
    rxs, tpl = _datapath_arrays(rx, cfg)
    view, n = _frames(rxs, sync.offset, cfg.frame_len)
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    starts = _chip_starts(cfg, n)
    shift = delta_samples(cfg.mod, cfg.sample_rate)
    r0 = _window_sums(view, starts, len(tpl), tpl)
    r1 = _window_sums(view, starts + shift, len(tpl), tpl)
    return (r1 >= r0).astype(np.uint8)


def demod_ook(rx, cfg, sync=GENIE_SYNC):
    """Decode OOK by energy detection: bit 1 iff the windowed energy at
    the code-predicted position is >= the calibrated threshold."""
    if cfg.mod.scheme != OOK:
        raise SchemeMismatch(f"OOK demodulator got scheme {cfg.mod.scheme!r}")
    if cfg.threshold is None:
        raise UncalibratedThreshold(
            "OOK threshold is unset; run calibrate_ook_threshold first"
        )
    _check_rx(rx, cfg)
    rxs, _ = _datapath_arrays(rx, cfg)
    view, n = _frames(rxs, sync.offset, cfg.frame_len)
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    width = int(round(cfg.integration_window * cfg.sample_rate))
    energy = _window_sums(view, _chip_starts(cfg, n), width) / cfg.sample_rate
    return (energy >= cfg.threshold).astype(np.uint8)


_DEMODS = {OOK: demod_ook, BPAM: demod_bpam, PPM: demod_ppm}


def demodulate(rx, cfg, sync=GENIE_SYNC):
    """Scheme-dispatching demodulator."""
    return _DEMODS[cfg.mod.scheme](rx, cfg, sync)


def calibrate_ook_threshold(
    cfg, ebn0_db, energy_per_bit, n_calibration_frames, rng_seed
):
    """Pick the OOK threshold as the midpoint between the empirical
    mean energies of noise-only and pulse-plus-noise windows.

    Deterministic under a fixed seed. With the no-noise sentinel the
    means are exact, giving half the windowed pulse energy.
    """
    if n_calibration_frames < 100:
        raise InvalidParams(
            f"need at least 100 calibration frames, got {n_calibration_frames}"
        )
    if not energy_per_bit > 0.0:
        raise InvalidParams(
            f"energy_per_bit must be positive, got {energy_per_bit}"
        )
    rate = cfg.sample_rate
    width = int(round(cfg.integration_window * rate))
    tpl = cfg.template.samples[:width]
    e_w = float(np.dot(tpl, tpl) / rate)
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.5 * e_w
    n0 = energy_per_bit / 10.0 ** (ebn0_db / 10.0)
    sigma = math.sqrt(0.5 * n0 * rate)
    rng = np.random.default_rng(rng_seed)
    n = int(n_calibration_frames)
    noise0 = sigma * rng.standard_normal((n, width))
    noise1 = sigma * rng.standard_normal((n, width))
    mean0 = float(np.mean(np.einsum("ij,ij->i", noise0, noise0))) / rate
    sig1 = tpl + noise1
    mean1 = float(np.mean(np.einsum("ij,ij->i", sig1, sig1))) / rate
    return 0.5 * (mean0 + mean1)
