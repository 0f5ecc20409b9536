"""PHY/MAC/channel parameters.

Units are fixed across the package: watts, meters, microseconds, nodes/m^2.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

from . import kvtext


class Mode(str, enum.Enum):
    BASIC = "basic"
    RTS_CTS = "rts"

    @classmethod
    def parse(cls, value: "str | Mode") -> "Mode":
        if isinstance(value, Mode):
            return value
        v = str(value).strip().lower().replace("-", "").replace("_", "")
        if v in ("basic", "bas"):
            return cls.BASIC
        if v in ("rts", "rtscts"):
            return cls.RTS_CTS
        raise ValueError(f"unknown access mode {value!r}")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PhyMacConfig:
    """All constants needed by the analysis and the simulators.

    Defaults are IEEE 802.11a values
    (6 Mbps data rate, 500 B payload, carrier-sense threshold tuned for a
    70 m effective range).  ``mac_header_bits`` includes the 16-bit service
    field and 6 tail bits, so with 24 bits per OFDM symbol a 500 B payload
    occupies 177 symbols (728 us including the 20 us PLCP preamble+header).
    """

    tx_power_w: float = 1e-3
    noise_w: float = 1e-12
    cs_threshold_w: float = 1e-12 + math.pi * 1e-3 / (4 * 70.0**4)
    path_loss_exponent: float = 4.0
    slot_us: int = 9
    sifs_us: int = 16
    difs_us: int = 34
    phy_header_us: int = 20
    mac_header_bits: int = 246
    payload_bits: int = 4000
    symbol_rate: int = 24  # data bits per OFDM symbol at 6 Mbps
    symbol_us: int = 4
    rts_us: int = 52
    cts_us: int = 44
    ack_us: int = 44
    w0: int = 16
    max_backoff_stage: int = 6
    retry_limit: int = 7
    long_retry_limit: int = 4  # DES only: data frames sent after an RTS/CTS handshake
    mode: Mode = Mode.BASIC

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        self.validate()

    def validate(self) -> None:
        for name in ("tx_power_w", "noise_w", "cs_threshold_w"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive and finite, got {v}")
        if self.cs_threshold_w <= self.noise_w:
            raise ConfigError("cs_threshold_w must exceed noise_w")
        if self.path_loss_exponent != 4:
            raise ConfigError("only path_loss_exponent = 4 is supported")
        for name in ("slot_us", "sifs_us", "difs_us", "phy_header_us", "symbol_us",
                     "rts_us", "cts_us", "ack_us"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.symbol_rate <= 0:
            raise ConfigError("symbol_rate must be positive")
        if self.mac_header_bits < 0 or self.payload_bits < 0:
            raise ConfigError("frame sizes must be nonnegative")
        if self.w0 < 2:
            raise ConfigError("w0 must be at least 2")
        if self.max_backoff_stage < 0:
            raise ConfigError("max_backoff_stage must be nonnegative")
        # the reference set pairs m = 6 with K = 7, so only K > m is enforced.
        if self.retry_limit < self.max_backoff_stage + 1:
            raise ConfigError("retry_limit must be at least max_backoff_stage + 1")
        if self.long_retry_limit < 1:
            raise ConfigError("long_retry_limit must be at least 1")

    @property
    def payload_bytes(self) -> int:
        return self.payload_bits // 8

    def replace(self, **changes) -> "PhyMacConfig":
        return dataclasses.replace(self, **changes)

    def with_cs_range(self, range_m: float) -> "PhyMacConfig":
        """Return a copy whose carrier-sense threshold yields the given effective range."""
        gap = math.pi * self.tx_power_w / (4.0 * range_m**4)
        return self.replace(cs_threshold_w=self.noise_w + gap)

    def to_dict(self) -> dict[str, object]:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def to_kv(self) -> str:
        return kvtext.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, entries: dict[str, str], strict: bool = True) -> "PhyMacConfig":
        kwargs = {}
        names = {f.name: f for f in dataclasses.fields(cls)}
        for key, raw in entries.items():
            if key not in names:
                if strict:
                    raise ConfigError(f"unknown PHY/MAC key {key!r}")
                continue
            default = names[key].default
            if key == "mode":
                kwargs[key] = Mode.parse(raw)
            elif isinstance(default, int):
                kwargs[key] = int(raw)
            else:
                kwargs[key] = float(raw)
        return cls(**kwargs)

    @classmethod
    def from_kv(cls, text: str) -> "PhyMacConfig":
        return cls.from_dict(kvtext.loads(text))


def reference_config(mode: "Mode | str" = Mode.BASIC, payload_bytes: int = 500,
                     cs_range_m: float = 70.0) -> PhyMacConfig:
    """Reference 802.11a parameter set for a given mode, payload and effective CS range."""
    return PhyMacConfig(mode=Mode.parse(mode), payload_bits=8 * payload_bytes).with_cs_range(cs_range_m)
