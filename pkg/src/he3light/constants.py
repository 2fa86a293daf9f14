"""Physical constants, the 2^3S - 2^3P transition table and cell parameters.

Internal units are SI with angular frequencies in rad/s.  Detunings shown to
users are Delta/2pi in GHz.  Magnetic fields are in gauss.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from .angular import HalfInteger

TWO_PI = 2.0 * math.pi
GHZ = TWO_PI * 1e9  # rad/s per GHz of Delta/2pi


def ghz_to_rad(delta_ghz: float) -> float:
    return delta_ghz * GHZ


def rad_to_ghz(delta: float) -> float:
    return delta / GHZ


@dataclass(frozen=True)
class TransitionEntry:
    index: int
    offset: float  # rad/s, relative to C8
    F: HalfInteger
    J: int
    Fp: HalfInteger
    Jp: int

    @property
    def offset_ghz(self) -> float:
        return rad_to_ghz(self.offset)


@dataclass(frozen=True)
class TransitionTable:
    entries: Tuple[TransitionEntry, ...]
    c8_reference: float

    def __post_init__(self):
        if len(self.entries) != 9:
            raise ValueError("transition table needs exactly 9 entries")
        if self.entries[7].offset != 0.0:
            raise ValueError("C8 must be the origin")

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, index: int) -> TransitionEntry:
        """1-based lookup, matching the C1..C9 labels."""
        return self.entries[index - 1]

    def poles(self) -> Tuple[float, ...]:
        return tuple(e.offset for e in self.entries)


# (offset GHz, F, J, F', J')
_TABLE_GHZ = (
    (-32.6045, "1/2", 1, "3/2", 1),
    (-28.0929, "1/2", 1, "1/2", 1),
    (-27.6453, "3/2", 1, "5/2", 2),
    (-27.4238, "1/2", 1, "3/2", 2),
    (-25.8648, "3/2", 1, "3/2", 1),
    (-21.3532, "3/2", 1, "1/2", 1),
    (-20.6841, "3/2", 1, "3/2", 2),
    (0.0, "1/2", 1, "1/2", 0),
    (6.7397, "3/2", 1, "1/2", 0),
)
C8_FREQUENCY = TWO_PI * 276_726_257e6


@lru_cache(maxsize=None)
def default_transition_table() -> TransitionTable:
    entries = tuple(
        TransitionEntry(i + 1, ghz_to_rad(off), HalfInteger.of(F), J, HalfInteger.of(Fp), Jp)
        for i, (off, F, J, Fp, Jp) in enumerate(_TABLE_GHZ)
    )
    return TransitionTable(entries, C8_FREQUENCY)


@dataclass(frozen=True)
class PhysicalConstants:
    gamma_decay: float = 1e7          # s^-1
    wavelength: float = 1083e-9       # m
    gamma_ms: float = -TWO_PI * 2.802e6   # rad s^-1 G^-1
    gamma_nuc: float = -TWO_PI * 3.243e3  # rad s^-1 G^-1

    @property
    def sigma2(self) -> float:
        return 3 * self.wavelength ** 2 / TWO_PI

    @property
    def gamma_half(self) -> float:
        return 4 * self.gamma_ms / 3

    @property
    def gamma_threehalf(self) -> float:
        return 2 * self.gamma_ms / 3


@dataclass(frozen=True)
class CellParams:
    """Cell and beam parameters.

    The metastability-exchange times obey T/tau = N_cell/n_cell, so T is
    derived from the other three and never stored.  ``coupling_scale`` is the
    rate (s^-1 per photon) assigned to one unit of the dimensionless coupling
    (sigma2*Gamma/4A units, Delta in 2pi GHz) when couplings feed the
    dynamics; ``None`` means 1/tau.
    """

    N_cell: float = 1.0
    n_cell: float = 1e-6
    n_ph: float = 1e-3
    tau: float = 1.0
    beam_area: float = 1e-6
    B_x: Optional[float] = None
    M: float = 0.0
    coupling_scale: Optional[float] = None

    def __post_init__(self):
        if not self.n_cell > 0:
            raise ValueError("n_cell must be positive")
        if not self.N_cell >= self.n_cell:
            raise ValueError("N_cell must be >= n_cell")
        if not abs(self.M) <= 1:
            raise ValueError("|M| must be <= 1")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.B_x is None:
            object.__setattr__(self, "B_x", default_field(self.tau))

    @classmethod
    def from_ratio(cls, ratio: float, N_cell: float = 1.0, **kw) -> "CellParams":
        """Build from T/tau = N/n."""
        return cls(N_cell=N_cell, n_cell=N_cell / ratio, **kw)

    @classmethod
    def from_times(cls, T: float, tau: float, N_cell: float = 1.0, **kw) -> "CellParams":
        return cls(N_cell=N_cell, n_cell=N_cell * tau / T, tau=tau, **kw)

    @property
    def ratio(self) -> float:
        return self.N_cell / self.n_cell

    @property
    def T(self) -> float:
        return self.tau * self.ratio

    @property
    def gamma_f(self) -> float:
        return 1.0 / self.T

    @property
    def gamma_m(self) -> float:
        return 1.0 / self.tau

    @property
    def light_rate(self) -> float:
        return 1.0 / self.tau if self.coupling_scale is None else self.coupling_scale

    def with_(self, **kw) -> "CellParams":
        return replace(self, **kw)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict) -> "CellParams":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown cell parameters: {sorted(unknown)}")
        return cls(**d)


def default_field(tau: float = 1.0, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """B_x such that |gamma_3/2| * B_x * tau = 1e-2."""
    return 1e-2 / (abs(constants.gamma_threehalf) * tau)


def larmor_frequency(params: CellParams, which: str = "nuclear",
                     constants: PhysicalConstants = PhysicalConstants()) -> float:
    gamma = {"nuclear": constants.gamma_nuc, "half": constants.gamma_half,
             "threehalf": constants.gamma_threehalf}[which]
    return abs(gamma * params.B_x)


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    cell: CellParams = field(default_factory=CellParams)
    detuning_ghz: Optional[float] = None


def load_config(path) -> RunConfig:
    """Read a JSON config: {"cell": {...CellParams fields...}, "detuning_ghz": x}.

    A ``ratio`` key inside ``cell`` is accepted in place of ``n_cell``.
    """
    data = json.loads(Path(path).read_text())
    cell = dict(data.get("cell", {}))
    if "ratio" in cell:
        ratio = cell.pop("ratio")
        cell["n_cell"] = cell.get("N_cell", 1.0) / ratio
    return RunConfig(CellParams.from_dict(cell), data.get("detuning_ghz"))


def dump_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(json.dumps({"cell": cfg.cell.to_dict(), "detuning_ghz": cfg.detuning_ghz}, indent=2))
