import argparse
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from dotenv import dotenv_values

from core.config import (
    DEFAULT_C_BOUNDS,
    DEFAULT_D_BOUNDS,
    DEFAULT_N_LIST,
    DEFAULT_OVERSAMPLE,
    DEFAULT_SEED,
    DEFAULT_SEEDS,
    DEFAULT_TOL,
    FULL_SWEEP_N_LIST,
    MIN_OVERSAMPLE,
    OUTPUT_DIR,
    VALID_ENGINES,
    VALID_FORMATS,
)
from core.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by every subcommand, validated on construction."""

    n_list: tuple = DEFAULT_N_LIST
    engine: str = "quadrature"
    tol: float = DEFAULT_TOL
    output_dir: Path = OUTPUT_DIR
    format: str = "csv"
    seed: int = DEFAULT_SEED
    oversample: int = DEFAULT_OVERSAMPLE
    n: Optional[int] = None
    full_sweep: bool = False
    alpha: Optional[float] = None
    c_bounds: tuple = DEFAULT_C_BOUNDS
    d_bounds: tuple = DEFAULT_D_BOUNDS
    seeds: int = DEFAULT_SEEDS
    plot_script: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(self.n_list))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        object.__setattr__(self, "c_bounds", tuple(self.c_bounds))
        object.__setattr__(self, "d_bounds", tuple(self.d_bounds))
        if not self.n_list:
            raise ConfigError("n_list is empty")
        if any(n < 1 for n in self.n_list):
            raise ConfigError(f"Every order must be >= 1, got {list(self.n_list)}")
        if self.n is not None and self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.engine not in VALID_ENGINES:
            raise ConfigError(f"Unknown engine '{self.engine}'. Use one of {sorted(VALID_ENGINES)}")
        if self.format not in VALID_FORMATS:
            raise ConfigError(f"Unknown format '{self.format}'. Use one of {sorted(VALID_FORMATS)}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.oversample < MIN_OVERSAMPLE:
            raise ConfigError(f"oversample must be >= {MIN_OVERSAMPLE}, got {self.oversample}")
        if self.alpha is not None and not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.seeds < 1:
            raise ConfigError(f"seeds must be >= 1, got {self.seeds}")
        for label, bounds in (("c", self.c_bounds), ("d", self.d_bounds)):
            if len(bounds) != 2:
                raise ConfigError(f"{label} bounds need two values, got {bounds}")
            lower, upper = bounds
            if not (lower > 0 and upper > 0):
                raise ConfigError(f"{label} bounds must be positive, got ({lower}, {upper})")
            if lower > upper:
                raise ConfigError(f"{label} lower bound {lower} exceeds upper bound {upper}")

    @property
    def suffix(self):
        return "csv" if self.format == "csv" else "jsonl"


def _int_list(text):
    return tuple(int(token) for token in str(text).split(",") if token.strip())


def _float_pair(text):
    values = tuple(float(token) for token in str(text).replace(" ", ",").split(",") if token.strip())
    if len(values) != 2:
        raise ValueError(f"expected two values, got '{text}'")
    return values


def _flag(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: '{text}'")


# config-file key -> (ExperimentConfig field, parser)
CONFIG_KEYS = {
    "N": ("n", int),
    "N_LIST": ("n_list", _int_list),
    "ENGINE": ("engine", str),
    "TOL": ("tol", float),
    "OVERSAMPLE": ("oversample", int),
    "SEED": ("seed", int),
    "OUT": ("output_dir", Path),
    "FORMAT": ("format", str),
    "FULL_SWEEP": ("full_sweep", _flag),
    "ALPHA": ("alpha", float),
    "C_BOUNDS": ("c_bounds", _float_pair),
    "D_BOUNDS": ("d_bounds", _float_pair),
    "SEEDS": ("seeds", int),
    "PLOT_SCRIPT": ("plot_script", _flag),
}


def load_config_file(path):
    """
    Read a KEY=value experiment file.

    Returns:
        Dict of ExperimentConfig field -> parsed value

    Raises:
        ConfigError: On a missing file, an unknown key or an unparsable value
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")

    values = {}
    for key, raw in dotenv_values(path).items():
        name = key.strip().upper()
        if name not in CONFIG_KEYS:
            raise ConfigError(f"Unknown config key '{key}' in {path}. Valid keys: {sorted(CONFIG_KEYS)}")
        if raw is None:
            raise ConfigError(f"Config key '{key}' in {path} has no value")
        target, parse = CONFIG_KEYS[name]
        try:
            values[target] = parse(raw)
        except ValueError as e:
            raise ConfigError(f"Invalid value for {name} in {path}: {e}") from e
    logger.info(f"Loaded {len(values)} settings from {path}")
    return values


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="KEY=value file mirroring the flags below")
    common.add_argument("--n", type=int, help="Single matrix order")
    common.add_argument("--n-list", type=_int_list, help="Comma-separated orders, e.g. 64,128,256")
    common.add_argument("--engine", choices=sorted(VALID_ENGINES), help="Fourier coefficient engine")
    common.add_argument("--tol", type=float, help="Absolute coefficient tolerance")
    common.add_argument("--oversample", type=int, help="Sampling factor of the fft engine")
    common.add_argument("--seed", type=int, help="Seed of the randomized checks")
    common.add_argument("--out", type=Path, help="Output directory")
    common.add_argument("--format", choices=sorted(VALID_FORMATS), help="Output file format")
    common.add_argument("--full-sweep", action="store_true", default=None, help="Run n up to 2048")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="toeplitz-conditioning",
        description="Conditioning experiments for Toeplitz matrices of distributed-order symbols.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("table1", parents=[common], help="Extreme eigenvalues of T_n(F_n)")
    subparsers.add_parser("table2", parents=[common], help="Extreme eigenvalues of T_n(eta)^-1 T_n(F_n)")

    figure = subparsers.add_parser("figure1", parents=[common], help="Both spectra as plot data")
    figure.add_argument("--plot-script", action="store_true", default=None, help="Also write a gnuplot script")

    checks = subparsers.add_parser("checks", parents=[common], help="Bound checks and diagnostics")
    checks.add_argument("--c-bounds", type=float, nargs=2, metavar=("LO", "HI"))
    checks.add_argument("--d-bounds", type=float, nargs=2, metavar=("LO", "HI"))
    checks.add_argument("--seeds", type=int, help="Number of random sandwich configurations")

    coeffs = subparsers.add_parser("coeffs", parents=[common], help="Dump Fourier coefficients")
    coeffs.add_argument("--alpha", type=float, help="Single power symbol instead of the aggregate")
    return parser


def resolve_config(args):
    """
    Merge built-in defaults, the optional config file and command-line flags.

    Flags win over the file, the file wins over the defaults. Without an
    explicit n_list, --n selects a single order and --full-sweep the long list.
    """
    values = load_config_file(args.config) if getattr(args, "config", None) else {}

    flag_fields = {
        "n": "n", "n_list": "n_list", "engine": "engine", "tol": "tol",
        "oversample": "oversample", "seed": "seed", "out": "output_dir",
        "format": "format", "full_sweep": "full_sweep", "alpha": "alpha",
        "c_bounds": "c_bounds", "d_bounds": "d_bounds", "seeds": "seeds",
        "plot_script": "plot_script",
    }
    for attr, target in flag_fields.items():
        value = getattr(args, attr, None)
        if value is not None:
            values[target] = value

    if "n_list" not in values:
        if values.get("full_sweep"):
            values["n_list"] = FULL_SWEEP_N_LIST
        elif values.get("n") is not None:
            values["n_list"] = (values["n"],)

    known = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in values.items() if k in known})
