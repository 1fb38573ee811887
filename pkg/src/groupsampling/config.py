"""Scenario configuration: strict parsing, validation and object construction.

Configurations are plain JSON.  Validation is strict: unknown keys anywhere
raise :class:`SchemaError` before any numerics run, so typos fail fast with
exit code 2 instead of silently changing a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError
from .groups import GroupSequence, GroupSpec, ProductSubgroup
from .models import SemidirectModel, SemidirectReduction, TranslationModel, semidirect_reduce
from .systems import SequenceMatrix, TransferMatrix

DEFAULT_TOLERANCES = {
    "frame": None,          # None selects the scale-aware default
    "residual": 1e-9,
    "left_inverse": 1e-9,
    "interpolation": 1e-8,
    "semidirect_residual": 1e-8,
    "foundation": 1e-10,
}

_LEFT_INVERSE_KINDS = ("moore_penrose", "mp", "family", "square")


def _require_keys(data: dict, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: expected an object, got {type(data).__name__}")
    unknown = set(data) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise SchemaError(f"{where}: missing keys {sorted(missing)}")


def _int_list(value, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise SchemaError(f"{where}: expected a non-empty list of integers")
    out = []
    for v in value:
        if not isinstance(v, int) or isinstance(v, bool):
            raise SchemaError(f"{where}: expected integers, got {v!r}")
        out.append(v)
    return tuple(out)


def _float_list(value, where: str) -> list[float]:
    if not isinstance(value, list):
        raise SchemaError(f"{where}: expected a list of numbers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"{where}: expected numbers, got {v!r}")
        out.append(float(v))
    return out


def parse_sequence(data: dict, group: GroupSpec, where: str) -> GroupSequence:
    _require_keys(data, {"moduli", "re", "im"}, {"moduli", "re"}, where)
    moduli = _int_list(data["moduli"], f"{where}.moduli")
    if moduli != group.moduli:
        raise SchemaError(f"{where}: moduli {list(moduli)} do not match the "
                          f"model group {list(group.moduli)}")
    re = _float_list(data["re"], f"{where}.re")
    im = _float_list(data.get("im", [0.0] * len(re)), f"{where}.im")
    if len(re) != group.order or len(im) != group.order:
        raise SchemaError(f"{where}: expected {group.order} values")
    return GroupSequence(group, np.asarray(re) + 1j * np.asarray(im))


def _parse_group(data: dict, where: str) -> GroupSpec:
    moduli = _int_list(data["moduli"], f"{where}.moduli")
    if any(m < 1 for m in moduli):
        raise SchemaError(f"{where}.moduli: moduli must be >= 1, got {list(moduli)}")
    return GroupSpec(moduli)


def _parse_strides(data, group: GroupSpec, where: str) -> ProductSubgroup:
    strides = _int_list(data, where)
    if len(strides) != group.ndim:
        raise SchemaError(f"{where}: expected {group.ndim} strides")
    for d, s in zip(strides, group.moduli):
        if d < 1 or s % d != 0:
            raise SchemaError(f"{where}: stride {d} does not divide modulus {s}")
    return ProductSubgroup(group, strides)


def parse_model(data: dict, where: str = "model"):
    if not isinstance(data, dict) or "type" not in data:
        raise SchemaError(f"{where}: expected an object with a 'type' key")
    kind = data["type"]
    if kind == "translation":
        _require_keys(data, {"type", "moduli", "H_strides", "phi", "generators"},
                      {"type", "moduli", "H_strides", "phi", "generators"}, where)
        group = _parse_group(data, where)
        sub = _parse_strides(data["H_strides"], group, f"{where}.H_strides")
        phi = parse_sequence(data["phi"], group, f"{where}.phi")
        gens = data["generators"]
        if not isinstance(gens, list) or not gens:
            raise SchemaError(f"{where}.generators: expected a non-empty list")
        generators = tuple(parse_sequence(g, group, f"{where}.generators[{i}]")
                           for i, g in enumerate(gens))
        return TranslationModel(group, phi, sub, generators)
    if kind == "semidirect":
        _require_keys(data, {"type", "moduli", "Gamma", "H_strides", "phi", "varphi"},
                      {"type", "moduli", "Gamma", "H_strides", "phi", "varphi"}, where)
        group = _parse_group(data, where)
        sub = _parse_strides(data["H_strides"], group, f"{where}.H_strides")
        phi = parse_sequence(data["phi"], group, f"{where}.phi")
        varphi = parse_sequence(data["varphi"], group, f"{where}.varphi")
        gamma = data["Gamma"]
        if gamma not in ("C1", "C2", "C4"):
            raise SchemaError(f"{where}.Gamma: expected one of C1, C2, C4, got {gamma!r}")
        try:
            return SemidirectModel(group, gamma, sub, phi, varphi)
        except ValueError as exc:
            raise SchemaError(f"{where}: {exc}") from exc
    raise SchemaError(f"{where}.type: expected 'translation' or 'semidirect', got {kind!r}")


@dataclass(eq=False)
class LeftInverseChoice:
    kind: str = "moore_penrose"
    seed: int | None = None
    scale: float = 1.0
    transfer: dict | None = None

    def parameter_for(self, system: SequenceMatrix) -> TransferMatrix | None:
        """Materialize the family parameter for a given system, if applicable."""
        if self.kind != "family":
            return None
        if self.transfer is not None:
            t = TransferMatrix.from_json_dict(self.transfer)
            return t
        rng = np.random.Generator(np.random.PCG64(0 if self.seed is None else self.seed))
        shape = (system.group.order, system.cols, system.rows)
        mats = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return TransferMatrix(system.group, self.scale * mats)


@dataclass(eq=False)
class ScenarioConfig:
    """One validated scenario: model, sampling system source, options."""

    name: str
    model: TranslationModel | SemidirectModel
    probes: list[GroupSequence] | None
    system: SequenceMatrix | None
    finite_index_strides: tuple[int, ...] | None
    left_inverse: LeftInverseChoice
    seed: int
    tolerances: dict = field(default_factory=dict)

    def tolerance(self, key: str) -> float | None:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    @property
    def is_semidirect(self) -> bool:
        return isinstance(self.model, SemidirectModel)

    def reduction(self) -> SemidirectReduction:
        if not self.is_semidirect:
            raise SchemaError("scenario is not a semidirect model")
        return semidirect_reduce(self.model)


def parse_config(data: dict) -> ScenarioConfig:
    allowed = {"name", "model", "probes", "system", "finite_index", "left_inverse",
               "seed", "tolerances"}
    _require_keys(data, allowed, {"name", "model"}, "config")
    name = data["name"]
    if not isinstance(name, str) or not name:
        raise SchemaError("config.name: expected a non-empty string")
    model = parse_model(data["model"])

    has_probes = "probes" in data
    has_system = "system" in data
    if has_probes == has_system:
        raise SchemaError("config: provide exactly one of 'probes' or 'system'")

    ambient = model.torus if isinstance(model, SemidirectModel) else model.ambient
    probes = None
    system = None
    if has_probes:
        raw = data["probes"]
        if not isinstance(raw, list) or not raw:
            raise SchemaError("config.probes: expected a non-empty list")
        probes = [parse_sequence(p, ambient, f"config.probes[{i}]")
                  for i, p in enumerate(raw)]
    else:
        raw = data["system"]
        _require_keys(raw, {"moduli", "rows", "cols", "entries"},
                      {"moduli", "rows", "cols", "entries"}, "config.system")
        try:
            system = SequenceMatrix.from_json_dict(raw)
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaError(f"config.system: {exc}") from exc

    finite_index = None
    if "finite_index" in data:
        if isinstance(model, SemidirectModel):
            raise SchemaError("config.finite_index: not supported for semidirect models")
        block = data["finite_index"]
        _require_keys(block, {"strides"}, {"strides"}, "config.finite_index")
        strides = _int_list(block["strides"], "config.finite_index.strides")
        habs = model.subgroup.abstract_group
        if len(strides) != habs.ndim:
            raise SchemaError(f"config.finite_index.strides: expected {habs.ndim} strides")
        for e, s in zip(strides, habs.moduli):
            if e < 1 or s % e != 0:
                raise SchemaError(
                    f"config.finite_index.strides: stride {e} does not divide {s}")
        finite_index = strides

    left = LeftInverseChoice()
    if "left_inverse" in data:
        block = data["left_inverse"]
        _require_keys(block, {"kind", "seed", "scale", "transfer"}, {"kind"},
                      "config.left_inverse")
        kind = block["kind"]
        if kind not in _LEFT_INVERSE_KINDS:
            raise SchemaError(f"config.left_inverse.kind: expected one of "
                              f"{_LEFT_INVERSE_KINDS}, got {kind!r}")
        seed = block.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise SchemaError("config.left_inverse.seed: expected an integer")
        scale = block.get("scale", 1.0)
        if isinstance(scale, bool) or not isinstance(scale, (int, float)):
            raise SchemaError("config.left_inverse.scale: expected a number")
        left = LeftInverseChoice(kind=kind, seed=seed, scale=float(scale),
                                 transfer=block.get("transfer"))

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise SchemaError("config.seed: expected an integer")

    tolerances = {}
    if "tolerances" in data:
        block = data["tolerances"]
        _require_keys(block, set(DEFAULT_TOLERANCES), set(), "config.tolerances")
        for key, value in block.items():
            if value is None and key == "frame":
                tolerances[key] = None
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SchemaError(f"config.tolerances.{key}: expected a number")
            tolerances[key] = float(value)

    return ScenarioConfig(name=name, model=model, probes=probes, system=system,
                          finite_index_strides=finite_index, left_inverse=left,
                          seed=seed, tolerances=tolerances)
