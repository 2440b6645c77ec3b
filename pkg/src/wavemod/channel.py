"""AWGN and static multipath channels with perfect-CSI equalization.

All randomness is drawn from explicitly seeded generators, so identical
(spec, seed) pairs give bit-identical outputs.  Parallel Monte-Carlo
callers should derive per-trial seeds as seed sequences [master, trial]
to stay schedule independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DelayExceedsFrame,
    EmptyFrame,
    LengthMismatch,
    SingularChannel,
)
from . import modem
from .modem import (
    FOURIER,
    BasebandFrame,
    OfdmConfig,
    _unprecode,
    ofdm_demodulate,
)

ES_PER_SAMPLE = "es-per-sample"
EB_PER_BIT = "eb-per-bit"


@dataclass(frozen=True)
class AwgnSpec:
    """Noise level with an explicit SNR interpretation.

    * es-per-sample: snr_db is average signal power per sample over noise
      variance per (complex) sample.
    * eb-per-bit: snr_db is Eb/N0; the per-sample noise variance becomes
      measured_power * samples_per_bit / 10**(snr_db/10).  samples_per_bit
      counts useful body samples only (oversampling / bits_per_symbol for
      the multicarrier chains), so the cyclic-prefix overhead does not
      shift the SNR axis.
    """

    snr_db: float
    seed: int = 0
    reference: str = ES_PER_SAMPLE
    samples_per_bit: float = 1.0

    def __post_init__(self):
        if self.reference not in (ES_PER_SAMPLE, EB_PER_BIT):
            raise ConfigError(f"unknown SNR reference {self.reference!r}")
        if math.isnan(self.snr_db):
            raise ConfigError("snr_db must not be NaN")
        if self.samples_per_bit <= 0:
            raise ConfigError("samples_per_bit must be positive")

    def noise_variance(self, mean_power: float) -> float:
        if math.isinf(self.snr_db):
            return 0.0
        ratio = 10.0 ** (self.snr_db / 10.0)
        if self.reference == EB_PER_BIT:
            return mean_power * self.samples_per_bit / ratio
        return mean_power / ratio


def awgn(frame: BasebandFrame, spec: AwgnSpec) -> BasebandFrame:
    """Add circularly symmetric complex Gaussian noise, seeded."""
    samples = np.asarray(frame.samples, dtype=complex)
    if samples.size == 0:
        raise EmptyFrame("cannot add noise to an empty frame")
    variance = spec.noise_variance(float(np.mean(np.abs(samples) ** 2)))
    if variance == 0.0:
        return BasebandFrame(samples.copy(), frame.sample_rate, frame.meta)
    rng = np.random.default_rng(spec.seed)
    scale = np.sqrt(variance / 2.0)
    noise = scale * (rng.standard_normal(samples.size)
                     + 1j * rng.standard_normal(samples.size))
    return BasebandFrame(samples + noise, frame.sample_rate, frame.meta)


@dataclass
class MultipathSpec:
    """Static tapped-delay-line channel."""

    tap_delays: np.ndarray
    tap_gains: np.ndarray
    normalize: bool = True

    def __post_init__(self):
        self.tap_delays = np.asarray(self.tap_delays, dtype=np.int64)
        self.tap_gains = np.asarray(self.tap_gains, dtype=complex)
        if len(self.tap_delays) != len(self.tap_gains):
            raise LengthMismatch("tap delay and gain counts differ")
        if len(self.tap_delays) == 0:
            raise ConfigError("channel needs at least one tap")
        if self.tap_delays[0] != 0 or np.any(np.diff(self.tap_delays) < 0):
            raise ConfigError("tap delays must be nondecreasing and start at 0")
        if self.normalize:
            power = float(np.sum(np.abs(self.tap_gains) ** 2))
            if power == 0.0:
                raise ConfigError("cannot normalize an all-zero tap set")
            self.tap_gains = self.tap_gains / np.sqrt(power)

    @property
    def max_delay(self) -> int:
        return int(self.tap_delays[-1])

    def impulse_response(self) -> np.ndarray:
        ir = np.zeros(self.max_delay + 1, dtype=complex)
        np.add.at(ir, self.tap_delays, self.tap_gains)
        return ir

    @classmethod
    def identity(cls) -> "MultipathSpec":
        return cls(tap_delays=[0], tap_gains=[1.0 + 0.0j], normalize=False)

    @classmethod
    def ten_path(cls, seed: int = 424242, n_taps: int = 10,
                 decay_db_per_tap: float = 3.0) -> "MultipathSpec":
        """Default static fading profile: one tap per sample, exponentially
        decaying power (3 dB per tap), seeded uniform phases, unit power."""
        rng = np.random.default_rng(seed)
        delays = np.arange(n_taps)
        amplitude = 10.0 ** (-decay_db_per_tap * delays / 20.0)
        phases = rng.uniform(0.0, 2.0 * np.pi, n_taps)
        return cls(tap_delays=delays, tap_gains=amplitude * np.exp(1j * phases),
                   normalize=True)

    @classmethod
    def from_file(cls, path, normalize: bool = True) -> "MultipathSpec":
        """Load a profile: one `delay_samples gain_re gain_im` line per tap."""
        delays, gains = [], []
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise ConfigError(
                        f"bad channel profile line {raw!r} (want 3 fields)"
                    )
                delays.append(int(parts[0]))
                gains.append(float(parts[1]) + 1j * float(parts[2]))
        return cls(tap_delays=delays, tap_gains=gains, normalize=normalize)


def apply_multipath(frame: BasebandFrame, spec: MultipathSpec) -> BasebandFrame:
    """Linear convolution with the sparse tap set; output grows by max delay."""
    x = np.asarray(frame.samples, dtype=complex)
    if spec.max_delay >= len(x):
        raise DelayExceedsFrame(
            f"max delay {spec.max_delay} >= frame length {len(x)}"
        )
    out = np.zeros(len(x) + spec.max_delay, dtype=complex)
    for delay, gain in zip(spec.tap_delays, spec.tap_gains):
        out[delay:delay + len(x)] += gain * x
    return BasebandFrame(out, frame.sample_rate, frame.meta)


def equalize(frame: BasebandFrame, channel: MultipathSpec, cfg: OfdmConfig,
             eps: float = 1e-6) -> np.ndarray:
    """Perfect-CSI zero-forcing equalization, then demodulation to symbols.

    Fourier chain: the cyclic prefix is stripped (it must cover the channel
    memory), one-tap ZF is applied per occupied bin of the body DFT, and
    the result is fed through the inverse precoder.  Raises SingularChannel
    when any occupied bin of the channel response falls below eps.

    Wavelet-packet chain: the whole frame is deconvolved in the frequency
    domain with an eps**2 Tikhonov floor (the chain has no prefix), then
    demodulated normally.
    """
    samples = np.asarray(frame.samples, dtype=complex)
    if cfg.transform == FOURIER:
        m = cfg.body_length
        start = cfg.cp_length
        if len(samples) < start + m:
            raise LengthMismatch("frame shorter than cyclic prefix plus body")
        body = samples[start:start + m]
        response = np.fft.fft(channel.impulse_response(), n=m)
        n = cfg.n_subcarriers
        if cfg.tx_rolloff is not None:
            weights = modem.rrc_bin_weights(n, m, cfg.tx_rolloff)
            occupied = np.nonzero(weights > 1e-12)[0]
        else:
            occupied = np.concatenate([np.arange(n // 2),
                                       np.arange(m - n // 2, m)])
        if np.any(np.abs(response[occupied]) < eps):
            raise SingularChannel(
                "channel response below eps on an occupied subcarrier"
            )
        spectrum = np.fft.fft(body, norm="ortho")
        spectrum[occupied] /= response[occupied]
        if cfg.tx_rolloff is not None:
            vec = (spectrum * weights).reshape(cfg.oversampling, n).sum(axis=0)
        else:
            vec = np.concatenate([spectrum[: n // 2], spectrum[m - n // 2:]])
        return _unprecode(vec, cfg)
    # wavelet-packet: regularized full-frame deconvolution
    length = len(samples)
    response = np.fft.fft(channel.impulse_response(), n=length)
    spectrum = np.fft.fft(samples)
    deconv = spectrum * np.conj(response) / (np.abs(response) ** 2 + eps**2)
    body = np.fft.ifft(deconv)[:cfg.body_length]
    return ofdm_demodulate(
        BasebandFrame(body, frame.sample_rate, cfg), cfg
    )
