"""Propagation and acquisition impairments: AWGN, clustered multipath,
and ADC quantization.

The multipath generator follows the Saleh-Valenzuela construction:
cluster starts arrive as a Poisson process, rays arrive as a Poisson
process within each cluster, and mean tap power decays exponentially
with both cluster start time and ray excess delay. Gains take a random
sign and the realization is normalized to unit energy, so it never
changes the link budget, only the dispersion.

Profile rates and decay constants are expressed in nanoseconds (the
natural scale for UWB channels and the unit used in profile files);
tap delays in a ChannelRealization are plain seconds like everything
else in the package.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import oaconvolve

from .errors import FormatError, InvalidParams
from .waveform import SampledSignal

# At or below this tap count a realization is applied by direct
# superposition (exact, testable sample-by-sample); denser realizations
# go through FFT convolution with a dense kernel.
_DIRECT_TAP_LIMIT = 32

# float64 has 52 mantissa bits: a finer lattice cannot be represented,
# so quantization at such widths degenerates to clipping.
_IDENTITY_BITS = 52


@dataclass(frozen=True)
class SvProfile:
    """Saleh-Valenzuela cluster/ray statistics.

    cluster_arrival_rate: Lambda, clusters per ns.
    ray_arrival_rate: lambda, rays per ns within a cluster.
    cluster_decay: Gamma, cluster power e-folding time, ns.
    ray_decay: gamma, ray power e-folding time, ns.
    mean_clusters: mean of the Poisson cluster count (at least one
        cluster is always drawn).
    max_excess_delay: hard truncation of the impulse response, ns.
    """

    cluster_arrival_rate: float
    ray_arrival_rate: float
    cluster_decay: float
    ray_decay: float
    mean_clusters: float
    max_excess_delay: float
    profile_id: str = "custom"

    def __post_init__(self):
        for name in (
            "cluster_arrival_rate",
            "ray_arrival_rate",
            "cluster_decay",
            "ray_decay",
            "mean_clusters",
            "max_excess_delay",
        ):
            if not getattr(self, name) > 0.0:
                raise InvalidParams(
                    f"{name} must be positive, got {getattr(self, name)}"
                )


# Residential-LOS-style parameter set.
CM1_LIKE = SvProfile(
    cluster_arrival_rate=0.047,
    ray_arrival_rate=1.54,
    cluster_decay=22.61,
    ray_decay=12.53,
    mean_clusters=3.0,
    max_excess_delay=200.0,
    profile_id="cm1-like",
)

_PROFILE_KEYS = (
    "cluster_arrival_rate",
    "ray_arrival_rate",
    "cluster_decay",
    "ray_decay",
    "mean_clusters",
    "max_excess_delay",
)


def load_profile_file(path, base=CM1_LIKE):
    """Parse a `key = value` profile file, overriding fields of base.

    Unknown keys are rejected. Blank lines and `#` comments are skipped.
    Values are in the SvProfile units (ns-based).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    fields = {k: getattr(base, k) for k in _PROFILE_KEYS}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise FormatError(f"{path}:{lineno}: expected `key = value`")
        if key not in _PROFILE_KEYS:
            raise FormatError(f"{path}:{lineno}: unknown profile key {key!r}")
        try:
            fields[key] = float(value.strip())
        except ValueError:
            raise FormatError(
                f"{path}:{lineno}: value for {key!r} is not a number"
            ) from None
    try:
        return SvProfile(profile_id=f"file:{path}", **fields)
    except InvalidParams as exc:
        raise FormatError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class ChannelRealization:
    """A discrete multipath channel: (delay seconds, gain) taps.

    Delays are nonnegative and strictly increasing; gains are
    normalized to unit energy at construction.
    """

    taps: tuple
    profile_id: str = "manual"

    def __post_init__(self):
        taps = tuple((float(d), float(g)) for d, g in self.taps)
        if not taps:
            raise InvalidParams("channel needs at least one tap")
        delays = [d for d, _ in taps]
        if delays[0] < 0.0 or any(
            b <= a for a, b in zip(delays, delays[1:])
        ):
            raise InvalidParams(
                "tap delays must be nonnegative and strictly increasing"
            )
        norm = math.sqrt(sum(g * g for _, g in taps))
        if norm == 0.0:
            raise InvalidParams("channel gains are all zero")
        taps = tuple((d, g / norm) for d, g in taps)
        object.__setattr__(self, "taps", taps)

    def delays(self):
        return np.array([d for d, _ in self.taps])

    def gains(self):
        return np.array([g for _, g in self.taps])


IDENTITY_CHANNEL = ChannelRealization(taps=((0.0, 1.0),), profile_id="identity")


def _poisson_arrivals(rng, rate_per_ns, window_ns):
    """Arrival times (ns) of a Poisson process on (0, window_ns]."""
    times = []
    t = 0.0
    # draw gaps in batches; expected count is rate * window
    batch = max(16, int(rate_per_ns * window_ns * 1.5) + 16)
    while True:
        gaps = rng.exponential(1.0 / rate_per_ns, size=batch)
        arrivals = t + np.cumsum(gaps)
        inside = arrivals[arrivals <= window_ns]
        times.append(inside)
        if len(inside) < len(arrivals):
            return np.concatenate(times)
        t = float(arrivals[-1])


def draw_channel(profile, rng_seed):
    """Draw one multipath realization from the profile.

    Cluster count is Poisson(mean_clusters) floored at 1; the first
    cluster starts at delay 0 and each cluster's first ray sits at its
    start. Everything past max_excess_delay is discarded, then gains
    are energy-normalized. Deterministic under a fixed seed.
    """
    rng = np.random.default_rng(rng_seed)
    window = profile.max_excess_delay
    n_clusters = max(1, int(rng.poisson(profile.mean_clusters)))
    cluster_gaps = rng.exponential(
        1.0 / profile.cluster_arrival_rate, size=n_clusters - 1
    )
    cluster_starts = np.concatenate(([0.0], np.cumsum(cluster_gaps)))

    delays = []
    powers = []
    for t_l in cluster_starts:
        if t_l > window:
            continue
        rays = np.concatenate(
            ([0.0], _poisson_arrivals(rng, profile.ray_arrival_rate, window - t_l))
        )
        delays.append(t_l + rays)
        powers.append(
            np.exp(-t_l / (2.0 * profile.cluster_decay))
            * np.exp(-rays / (2.0 * profile.ray_decay))
        )
    delay_ns = np.concatenate(delays)
    amp = np.concatenate(powers) * rng.choice((-1.0, 1.0), size=len(delay_ns))

    order = np.argsort(delay_ns, kind="stable")
    delay_ns = delay_ns[order]
    amp = amp[order]
    # merge the measure-zero case of coincident delays
    keep_delays = [delay_ns[0]]
    keep_amps = [amp[0]]
    for d, a in zip(delay_ns[1:], amp[1:]):
        if d == keep_delays[-1]:
            keep_amps[-1] += a
        else:
            keep_delays.append(d)
            keep_amps.append(a)
    taps = tuple(
        (d * 1e-9, a) for d, a in zip(keep_delays, keep_amps) if a != 0.0
    )
    return ChannelRealization(taps=taps, profile_id=profile.profile_id)


def apply_channel(signal, ch):
    """Convolve a signal with the realization: the superposition of
    delayed, scaled copies. Output is extended by the largest delay.

    Tap delays are rounded to the nearest sample period. Sparse
    realizations are applied exactly tap by tap; dense ones via FFT
    convolution (identical up to float rounding).
    """
    rate = signal.sample_rate
    d = np.rint(ch.delays() * rate).astype(np.int64)
    g = ch.gains()
    x = signal.samples
    out_len = len(x) + int(d[-1]) if len(x) else 0
    if len(x) == 0:
        return SampledSignal(np.zeros(0), rate, t0=signal.t0)
    if len(d) <= _DIRECT_TAP_LIMIT:
        out = np.zeros(out_len, dtype=np.float64)
        for di, gi in zip(d, g):
            out[di:di + len(x)] += gi * x
        return SampledSignal(out, rate, t0=signal.t0)
    h = np.zeros(int(d[-1]) + 1, dtype=np.float64)
    np.add.at(h, d, g)
    return SampledSignal(oaconvolve(x, h), rate, t0=signal.t0)


def add_awgn(signal, ebn0_db, energy_per_bit, rng_seed):
    """Add white Gaussian noise for a target Eb/N0.

    Per-sample variance is (N0/2) * sample_rate with
    N0 = energy_per_bit / 10^(ebn0_db/10). An infinite ebn0_db is the
    no-noise sentinel and returns the input unchanged.
    """
    if not energy_per_bit > 0.0:
        raise InvalidParams(
            f"energy_per_bit must be positive, got {energy_per_bit}"
        )
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return signal
    n0 = energy_per_bit / 10.0 ** (ebn0_db / 10.0)
    sigma = math.sqrt(0.5 * n0 * signal.sample_rate)
    rng = np.random.default_rng(rng_seed)
    noisy = signal.samples + sigma * rng.standard_normal(len(signal))
    return SampledSignal(noisy, signal.sample_rate, t0=signal.t0)


@dataclass(frozen=True)
class QuantizerConfig:
    """Mid-rise uniform quantizer: 2^bits levels over
    [-full_scale, +full_scale], clipping outside."""

    bits: int
    full_scale: float

    def __post_init__(self):
        if not isinstance(self.bits, (int, np.integer)) or not 1 <= self.bits <= 64:
            raise InvalidParams(f"bits must be an integer in [1, 64], got {self.bits}")
        object.__setattr__(self, "bits", int(self.bits))
        if not self.full_scale > 0.0:
            raise InvalidParams(
                f"full_scale must be positive, got {self.full_scale}"
            )


def quantize_array(x, q):
    """quantize() on a bare sample array."""
    x = np.asarray(x, dtype=np.float64)
    if q.bits >= _IDENTITY_BITS:
        return np.clip(x, -q.full_scale, q.full_scale)
    step = 2.0 * q.full_scale / (1 << q.bits)
    half_levels = 1 << (q.bits - 1)
    idx = np.clip(np.floor(x / step), -half_levels, half_levels - 1)
    return (idx + 0.5) * step


def quantize(signal, q):
    """Quantize a signal onto the mid-rise lattice of the config.

    Output samples are reconstruction values (still floats); the
    operation is idempotent and clips outside +/- full_scale.
    """
    return SampledSignal(
        quantize_array(signal.samples, q), signal.sample_rate, t0=signal.t0
    )
