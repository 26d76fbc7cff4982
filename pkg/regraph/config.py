"""Bench settings: defaults, environment and command-line flags."""

from __future__ import annotations

import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import voluptuous as vol

from .const import (
    CONF_METHODS,
    CONF_REPEAT_UP_TO,
    CONF_REPETITIONS,
    CONF_SEED,
    CONF_SERIAL,
    CONF_TIMEOUT_OVERRIDE,
    CONF_TIMEOUTS,
    CONF_WORKERS,
    DEFAULT_REPEAT_UP_TO,
    DEFAULT_REPETITIONS,
    DEFAULT_TIMEOUT_FALLBACK,
    DEFAULT_TIMEOUTS,
    DEFAULT_WORKERS,
    ENV_THREADS,
    METHOD_OPTIONS,
)

_LOGGER = logging.getLogger(__name__)


def _method_list(value: Any) -> list[str]:
    if isinstance(value, str):
        value = [v.strip() for v in value.split(",") if v.strip()]
    methods = vol.Schema([vol.In(METHOD_OPTIONS)])(value)
    if not methods:
        raise vol.Invalid("at least one method is required")
    return list(dict.fromkeys(methods))


def build_bench_schema(defaults: Mapping[str, Any] | None = None) -> vol.Schema:
    d = defaults or {}
    fields: dict[Any, Any] = {}

    fields[
        vol.Required(CONF_METHODS, default=d.get(CONF_METHODS, list(METHOD_OPTIONS)))
    ] = _method_list

    fields[
        vol.Optional(CONF_TIMEOUTS, default=d.get(CONF_TIMEOUTS, dict(DEFAULT_TIMEOUTS)))
    ] = {vol.Coerce(int): vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))}

    fields[
        vol.Optional(CONF_TIMEOUT_OVERRIDE, default=d.get(CONF_TIMEOUT_OVERRIDE))
    ] = vol.Any(None, vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False)))

    fields[
        vol.Optional(CONF_REPETITIONS, default=d.get(CONF_REPETITIONS, DEFAULT_REPETITIONS))
    ] = vol.All(vol.Coerce(int), vol.Range(min=1))

    fields[
        vol.Optional(CONF_REPEAT_UP_TO, default=d.get(CONF_REPEAT_UP_TO, DEFAULT_REPEAT_UP_TO))
    ] = vol.All(vol.Coerce(int), vol.Range(min=0))

    fields[
        vol.Optional(CONF_WORKERS, default=d.get(CONF_WORKERS, DEFAULT_WORKERS))
    ] = vol.All(vol.Coerce(int), vol.Range(min=0))

    fields[vol.Optional(CONF_SERIAL, default=d.get(CONF_SERIAL, False))] = vol.Boolean()

    fields[vol.Optional(CONF_SEED, default=d.get(CONF_SEED, 0))] = vol.Coerce(int)

    return vol.Schema(fields)


def resolve_workers(requested: int = DEFAULT_WORKERS, env: Mapping[str, str] | None = None) -> int:
    """``requested`` if positive, else REGRAPH_THREADS, else the CPU count."""
    if requested > 0:
        return requested
    env = os.environ if env is None else env
    raw = env.get(ENV_THREADS, "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise vol.Invalid(f"{ENV_THREADS} must be an integer, got {raw!r}") from None
        if value < 1:
            raise vol.Invalid(f"{ENV_THREADS} must be positive, got {value}")
        return value
    return os.cpu_count() or 1


@dataclass(frozen=True)
class BenchSettings:
    methods: tuple[str, ...]
    timeouts: dict[int, float]
    timeout_override: float | None
    repetitions: int
    repeat_up_to_n: int
    workers: int
    serial: bool
    seed: int

    def timeout_for(self, r: int) -> float:
        if self.timeout_override is not None:
            return self.timeout_override
        return self.timeouts.get(r, DEFAULT_TIMEOUT_FALLBACK)

    def repetitions_for(self, n: int) -> int:
        return self.repetitions if n <= self.repeat_up_to_n else 1


def resolve_bench_settings(
    flags: Mapping[str, Any] | None = None,
    *,
    env: Mapping[str, str] | None = None,
) -> BenchSettings:
    """Validate ``flags`` (None values mean "not given") over the defaults.

    Raises vol.Invalid on bad values.
    """
    given = {k: v for k, v in (flags or {}).items() if v is not None}
    data = build_bench_schema()(given)
    workers = 1 if data[CONF_SERIAL] else resolve_workers(data[CONF_WORKERS], env)
    settings = BenchSettings(
        methods=tuple(data[CONF_METHODS]),
        timeouts=dict(data[CONF_TIMEOUTS]),
        timeout_override=data[CONF_TIMEOUT_OVERRIDE],
        repetitions=data[CONF_REPETITIONS],
        repeat_up_to_n=data[CONF_REPEAT_UP_TO],
        workers=workers,
        serial=data[CONF_SERIAL],
        seed=data[CONF_SEED],
    )
    _LOGGER.debug("Bench settings: %s", settings)
    return settings
