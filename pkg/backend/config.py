# backend/config.py
import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


@dataclass
class Settings:
    allow_nonabelian_xi: bool = False  # caminho ξ não-abeliano (verificado)
    probe_depth: int = 10  # k máximo em y = 2^k
    suite_workers: int = 4
    log_level: str = "WARNING"


def load_settings() -> Settings:
    """Lê as configurações do ambiente (.env opcional). Nenhuma variável é obrigatória."""
    return Settings(
        allow_nonabelian_xi=_env_bool("HODGE_ALLOW_NONABELIAN_XI", False),
        probe_depth=max(1, _env_int("HODGE_PROBE_DEPTH", 10)),
        suite_workers=max(1, _env_int("HODGE_SUITE_WORKERS", 4)),
        log_level=os.getenv("HODGE_LOG_LEVEL", "WARNING").upper(),
    )
