"""Flat key=value experiment configuration.

The file format is deliberately primitive: one ``key = value`` per line,
``#`` comments, no sections or nesting. Dotted key NAMES group related
settings (``decoder.t_max``); multi-arm sweeps list arm names under
``arms`` and override per-arm keys as ``arm.<name>.<key>``. Unknown keys
are rejected with their key path.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corrector import CorrectorConfig
from .decoder import DecoderConfig
from .errors import ConfigError
from .fixedpoint import parse_format

_CODE_KEYS = {"code.alist", "code.dist", "code.n", "code.seed"}
_SWEEP_KEYS = {"sweep.snr", "sweep.frames", "sweep.master_seed", "sweep.parallelism"}
_DECODER_KEYS = {
    "decoder.arithmetic", "decoder.t_max", "decoder.cnu", "decoder.nms_factor",
    "decoder.early_stop", "decoder.acc_bits",
}
_CORRECTOR_KEYS = {"corrector.enabled", "corrector.delta", "corrector.max_peel_rounds"}
_OTHER_KEYS = {"arms", "out.dir"}
_ARM_SUBKEYS = _DECODER_KEYS | _CORRECTOR_KEYS

KNOWN_KEYS = _CODE_KEYS | _SWEEP_KEYS | _DECODER_KEYS | _CORRECTOR_KEYS | _OTHER_KEYS


@dataclass
class ArmSpec:
    name: str
    dec_cfg: DecoderConfig
    cor_cfg: CorrectorConfig | None


@dataclass
class ExperimentConfig:
    alist_path: str | None
    dist_path: str | None
    code_n: int | None
    code_seed: int
    snr_list: list[float]
    frames: int
    master_seed: int
    parallelism: int
    arms: list[ArmSpec]
    out_dir: str | None
    raw: dict[str, str]


def parse_config_text(text: str) -> dict[str, str]:
    """key=value lines -> ordered dict; syntax errors carry line numbers."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def _validate_keys(cfg: dict[str, str]):
    for key in cfg:
        if key in KNOWN_KEYS:
            continue
        parts = key.split(".")
        if parts[0] == "arm" and len(parts) >= 3:
            subkey = ".".join(parts[2:])
            if subkey in _ARM_SUBKEYS:
                continue
            raise ConfigError(f"unknown config key {key!r} (arm override must be one of "
                              f"{sorted(_ARM_SUBKEYS)})")
        raise ConfigError(f"unknown config key {key!r}")


def _get(cfg, key, default=None):
    v = cfg.get(key, default)
    return v if v != "" else default


def _as_int(cfg, key, default=None):
    v = _get(cfg, key)
    if v is None:
        return default
    try:
        return int(v)
    except ValueError:
        raise ConfigError(f"{key}: expected integer, got {v!r}") from None


def _as_float(cfg, key, default=None):
    v = _get(cfg, key)
    if v is None:
        return default
    try:
        return float(v)
    except ValueError:
        raise ConfigError(f"{key}: expected number, got {v!r}") from None


def _as_bool(cfg, key, default=False):
    v = _get(cfg, key)
    if v is None:
        return default
    vl = v.lower()
    if vl in ("true", "yes", "1", "on"):
        return True
    if vl in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected boolean, got {v!r}")


def _build_decoder(cfg: dict[str, str], prefix: str) -> DecoderConfig:
    arith_text = _get(cfg, prefix + "decoder.arithmetic", "float")
    try:
        fmt = parse_format(arith_text)
    except ConfigError as e:
        raise ConfigError(f"{prefix}decoder.arithmetic: {e}") from None
    cnu = _get(cfg, prefix + "decoder.cnu")
    if cnu is not None and cnu.lower() == "auto":
        cnu = None
    nms_factor = 0.75
    if cnu is not None and cnu.startswith("normalized-min-sum:"):
        cnu, _, factor_text = cnu.partition(":")
        try:
            nms_factor = float(factor_text)
        except ValueError:
            raise ConfigError(f"{prefix}decoder.cnu: bad factor {factor_text!r}") from None
    nms_factor = _as_float(cfg, prefix + "decoder.nms_factor", nms_factor)
    try:
        return DecoderConfig(
            t_max=_as_int(cfg, prefix + "decoder.t_max", 15),
            arithmetic=fmt,
            cnu_kind=cnu,
            nms_factor=nms_factor,
            early_stop=_as_bool(cfg, prefix + "decoder.early_stop", True),
            acc_bits=_as_int(cfg, prefix + "decoder.acc_bits"),
        )
    except ValueError as e:
        raise ConfigError(f"{prefix}decoder: {e}") from None


def _build_corrector(cfg: dict[str, str], prefix: str) -> CorrectorConfig | None:
    if not _as_bool(cfg, prefix + "corrector.enabled", False):
        return None
    try:
        return CorrectorConfig(
            delta=_as_float(cfg, prefix + "corrector.delta", 165.0),
            max_peel_rounds=_as_int(cfg, prefix + "corrector.max_peel_rounds"),
        )
    except ValueError as e:
        raise ConfigError(f"{prefix}corrector: {e}") from None


def _arm_view(cfg: dict[str, str], arm: str) -> dict[str, str]:
    """Base keys overridden by this arm's ``arm.<name>.*`` entries."""
    view = {k: v for k, v in cfg.items() if not k.startswith("arm.")}
    marker = f"arm.{arm}."
    for k, v in cfg.items():
        if k.startswith(marker):
            view[k[len(marker):]] = v
    return view


def build_experiment(cfg: dict[str, str]) -> ExperimentConfig:
    _validate_keys(cfg)
    alist_path = _get(cfg, "code.alist")
    dist_path = _get(cfg, "code.dist")
    if (alist_path is None) == (dist_path is None):
        raise ConfigError("exactly one of code.alist / code.dist is required")
    code_n = _as_int(cfg, "code.n")
    if dist_path is not None and code_n is None:
        raise ConfigError("code.n is required with code.dist")

    snr_text = _get(cfg, "sweep.snr")
    if snr_text is None:
        raise ConfigError("sweep.snr is required")
    try:
        snr_list = [float(t) for t in snr_text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"sweep.snr: expected numbers, got {snr_text!r}") from None
    if not snr_list:
        raise ConfigError("sweep.snr: empty list")

    arm_names = _get(cfg, "arms")
    arms = []
    if arm_names is None:
        arms.append(ArmSpec("default", _build_decoder(cfg, ""), _build_corrector(cfg, "")))
    else:
        names = arm_names.replace(",", " ").split()
        if not names:
            raise ConfigError("arms: empty list")
        declared = {k.split(".")[1] for k in cfg if k.startswith("arm.")}
        unknown = declared - set(names)
        if unknown:
            raise ConfigError(f"arm.{sorted(unknown)[0]}.*: arm not listed in 'arms'")
        for name in names:
            view = _arm_view(cfg, name)
            arms.append(ArmSpec(name, _build_decoder(view, ""), _build_corrector(view, "")))

    frames = _as_int(cfg, "sweep.frames", 100)
    if frames < 1:
        raise ConfigError("sweep.frames must be >= 1")
    parallelism = _as_int(cfg, "sweep.parallelism", 1)
    if parallelism < 1:
        raise ConfigError("sweep.parallelism must be >= 1")

    return ExperimentConfig(
        alist_path=alist_path,
        dist_path=dist_path,
        code_n=code_n,
        code_seed=_as_int(cfg, "code.seed", 1),
        snr_list=snr_list,
        frames=frames,
        master_seed=_as_int(cfg, "sweep.master_seed", 1),
        parallelism=parallelism,
        arms=arms,
        out_dir=_get(cfg, "out.dir"),
        raw=dict(cfg),
    )


def load_experiment(path: str | Path, overrides: list[str] = ()) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    cfg = parse_config_text(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        cfg[key.strip()] = value.strip()
    return build_experiment(cfg)
