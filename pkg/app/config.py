import os
from dataclasses import dataclass, fields, replace

from dotenv import load_dotenv

load_dotenv()
load_dotenv(os.path.join(os.path.dirname(__file__), "..", ".env.local"))


EIG_BACKEND = os.getenv("EIG_BACKEND", "jacobi")
WITNESS_MAX_ITER = int(os.getenv("WITNESS_MAX_ITER", "2000"))
WITNESS_TOL = float(os.getenv("WITNESS_TOL", "1e-9"))
WITNESS_RESTARTS = int(os.getenv("WITNESS_RESTARTS", "20"))
DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "0"))

_ENV_PREFIX = "ENTANGLE_TOL_"


@dataclass(frozen=True)
class Tolerances:
    hermitian_input: float = 1e-10
    eig_offdiag: float = 1e-12
    eig_max_sweeps: int = 100
    degenerate_gap: float = 1e-9
    orthonormal: float = 1e-9
    span_rank: float = 1e-8
    density: float = 1e-9
    unit_norm: float = 1e-9
    ppt: float = 1e-9
    kz_slack: float = 1e-12
    region_slack: float = 1e-12
    commutator: float = 1e-9
    oracle_change: float = 1e-10


def _coerce(name: str, raw: str):
    kind = int if name == "eig_max_sweeps" else float
    try:
        return kind(raw)
    except (TypeError, ValueError):
        raise ValueError(f"Tolerance {name} must be numeric, got {raw!r}")


def with_overrides(base: Tolerances, overrides: dict[str, str | float]) -> Tolerances:
    """
    Return a copy of `base` with the named entries replaced.
    Names are the Tolerances field names (case-insensitive).
    """
    known = {f.name for f in fields(Tolerances)}
    changes = {}
    for raw_name, raw_value in overrides.items():
        name = raw_name.strip().lower()
        if name not in known:
            raise ValueError(
                f"Unknown tolerance {raw_name!r}. Known: {', '.join(sorted(known))}"
            )
        changes[name] = _coerce(name, str(raw_value))
    return replace(base, **changes)


def load_tolerances() -> Tolerances:
    env = {}
    for f in fields(Tolerances):
        raw = os.getenv(_ENV_PREFIX + f.name.upper())
        if raw is not None:
            env[f.name] = raw
    return with_overrides(Tolerances(), env)


_current = load_tolerances()


def current_tolerances() -> Tolerances:
    return _current


def set_tolerances(tolerances: Tolerances) -> None:
    # Set once by the CLI before a command runs; library calls read it lazily.
    global _current
    _current = tolerances


def parse_override(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ValueError(f"Expected NAME=VALUE, got {text!r}")
    name, value = text.split("=", 1)
    return name.strip(), value.strip()
