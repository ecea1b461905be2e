"""Key/value config files (TOML)."""

from __future__ import annotations

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


def read_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def read_table(path, section: str) -> dict:
    """Top-level keys of ``path``, or the ``[section]`` table when present."""
    data = read_config(path)
    table = data.get(section, data)
    if not isinstance(table, dict):
        raise ConfigError(f"{path}: [{section}] must be a table")
    return {k: v for k, v in table.items() if not isinstance(v, dict)}
