"""Registry of runnable example systems, keyed by stable model name."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .. import canon
from ..actors import Emulator
from ..model import Model
from . import kv, vr


@dataclass(frozen=True)
class SystemSpec:
    """Everything the pipeline needs to explore and test one system."""

    name: str
    make_bounds: Callable[..., object]
    bounds_from_value: Callable[[canon.Record], object]
    make_model: Callable[[object], Model]
    make_emulator: Callable[[object], Emulator]
    mutants: Mapping[str, Callable[[object], Emulator]] = field(default_factory=dict)


def _kv_bounds(replicas=3, max_queries=1, max_views=0, max_gets=0, faults=()):
    del max_views  # the store has no views; accepted for CLI uniformity
    return kv.KvBounds(
        actors=replicas,
        max_sets=max_queries,
        max_gets=max_gets,
        allow_crash="crash" in faults,
        allow_drop="drop" in faults,
        allow_corrupt="corrupt" in faults,
    )


def _kv_bounds_from_value(value: canon.Record) -> kv.KvBounds:
    return kv.KvBounds(
        actors=value["actors"],
        max_sets=value["max_sets"],
        max_gets=value["max_gets"],
        allow_crash=value["allow_crash"],
        allow_drop=value["allow_drop"],
        allow_corrupt=value["allow_corrupt"],
    )


def _vr_bounds(replicas=3, max_queries=1, max_views=1, max_gets=0, faults=()):
    del max_gets, faults
    return vr.VrBounds(replicas=replicas, max_queries=max_queries, max_views=max_views)


def _vr_bounds_from_value(value: canon.Record) -> vr.VrBounds:
    return vr.VrBounds(
        replicas=value["replicas"],
        max_queries=value["max_queries"],
        max_views=value["max_views"],
    )


REGISTRY: dict[str, SystemSpec] = {
    "kv": SystemSpec(
        name="kv",
        make_bounds=_kv_bounds,
        bounds_from_value=_kv_bounds_from_value,
        make_model=kv.make_model,
        make_emulator=kv.make_emulator,
    ),
    "vr": SystemSpec(
        name="vr",
        make_bounds=_vr_bounds,
        bounds_from_value=_vr_bounds_from_value,
        make_model=vr.make_model,
        make_emulator=vr.make_emulator,
        mutants={
            name: (lambda bounds, _cls=cls: vr.make_emulator(bounds, _cls))
            for name, cls in vr.MUTANTS.items()
        },
    ),
}


def get_system(name: str) -> SystemSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown model {name!r} (known: {known})") from None
