"""TOML configuration for the enhancement and evaluation tools.

Example::

    seed = 0

    [ssdrc]
    beta = 0.3
    min_gain_db = -30.0
    max_gain_db = 21.0

    [drc]
    attack_ms = 2.0
    release_ms = 20.0
    gain_smooth_ms = 10.0
    ioec = [[-80.0, -80.0], [-30.0, -30.0], [0.0, -20.0]]

    [noise]
    ssn_snrs = [-10.0, -5.0, 0.0]
    csn_snrs = [-21.0, -14.0, -7.0]

    [siib]
    production_rho = 0.75

    [grid]
    systems = ["unprocessed", "ssdrc"]
    baseline = "unprocessed"

    [grid.external]
    lombard = "/data/lombard_tts"

Every key is optional; missing keys take the defaults shown.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .noise import CANONICAL_SNRS, LPC_ORDER, MASKER_LEVEL_DBFS, NoiseType
from .siib import SiibConfig
from .enhance import DrcConfig, IoecCurve, ShapingConfig, SsdrcConfig


@dataclass(frozen=True)
class NoiseConfig:
    ssn_snrs: tuple = CANONICAL_SNRS[NoiseType.SSN]
    csn_snrs: tuple = CANONICAL_SNRS[NoiseType.CSN]
    ssn_order: int = LPC_ORDER
    level_dbfs: float = MASKER_LEVEL_DBFS
    csn_offset_s: float = 0.0


@dataclass(frozen=True)
class GridConfig:
    systems: tuple = ("unprocessed", "ssdrc")
    baseline: str = "unprocessed"
    noise_types: tuple = ("SSN", "CSN")
    external: dict = field(default_factory=dict)
    workers: int = 1


@dataclass(frozen=True)
class Config:
    seed: int = 0
    ssdrc: SsdrcConfig = field(default_factory=SsdrcConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    siib: SiibConfig = field(default_factory=SiibConfig)
    grid: GridConfig = field(default_factory=GridConfig)

    def snapshot(self) -> dict:
        """Plain-data view, stable across runs (used in report manifests)."""
        return _plain(asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _pick(cls, table: dict, section: str, rename=None):
    rename = rename or {}
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in table.items():
        name = rename.get(key, key)
        if name not in known:
            raise ValueError(f"unknown key {key!r} in [{section}]")
        kwargs[name] = tuple(value) if isinstance(value, list) else value
    return kwargs


def config_from_dict(data: dict) -> Config:
    data = dict(data)
    unknown = set(data) - {"seed", "ssdrc", "drc", "noise", "siib", "grid"}
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")

    shaping = ShapingConfig(**_pick(ShapingConfig, data.get("ssdrc", {}), "ssdrc"))
    drc_table = dict(data.get("drc", {}))
    curve = drc_table.pop("ioec", None)
    drc_kwargs = _pick(DrcConfig, drc_table, "drc")
    if curve is not None:
        drc_kwargs["curve"] = IoecCurve(tuple(tuple(p) for p in curve))
    grid_table = dict(data.get("grid", {}))
    external = dict(grid_table.pop("external", {}))
    return Config(
        seed=int(data.get("seed", 0)),
        ssdrc=SsdrcConfig(shaping, DrcConfig(**drc_kwargs)),
        noise=NoiseConfig(**_pick(NoiseConfig, data.get("noise", {}), "noise")),
        siib=SiibConfig(**_pick(SiibConfig, data.get("siib", {}), "siib")),
        grid=GridConfig(**_pick(GridConfig, grid_table, "grid"), external=external),
    )


def load_config(path=None) -> Config:
    """Read a TOML config file; ``None`` gives the defaults."""
    if path is None:
        return Config()
    with open(Path(path), "rb") as fh:
        return config_from_dict(tomllib.load(fh))
