"""Named experiment presets, shipped as human-editable JSON files.

``table1`` reproduces the one-cluster size study (14 spiked-covariance
settings); ``fig4``/``fig5`` are the one-direction power sweeps and
``fig7``/``fig8`` the all-direction sweeps.  ``table1-rowK`` (K = 1..14)
selects a single setting.  Presets carry paper-fidelity replication
counts; ``desk_scale`` halves both the replications and the null draws.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import SigPalError
from .harness import GeneratorSpec, MethodConfig

_BASE_NAMES = ("table1", "fig4", "fig5", "fig7", "fig8")


@dataclass(frozen=True)
class Preset:
    """A named bundle of generator rows, methods and replication counts."""

    name: str
    description: str
    rows: tuple  # (label, GeneratorSpec) pairs
    methods: tuple
    reps: int
    n_sim: int
    alpha: float
    desk_scale: bool = False

    def scaled(self) -> "Preset":
        """Halve reps and null draws for a quick desk run."""
        return Preset(
            name=self.name,
            description=self.description,
            rows=self.rows,
            methods=self.methods,
            reps=max(1, self.reps // 2),
            n_sim=max(1, self.n_sim // 2),
            alpha=self.alpha,
            desk_scale=True,
        )


def _parse_payload(payload: dict, name: str) -> Preset:
    try:
        rows = tuple(
            (str(r["label"]), GeneratorSpec.from_dict(r["generator"])) for r in payload["rows"]
        )
        methods = tuple(MethodConfig.from_dict(m) for m in payload["methods"])
        return Preset(
            name=name,
            description=str(payload.get("description", "")),
            rows=rows,
            methods=methods,
            reps=int(payload["reps"]),
            n_sim=int(payload["n_sim"]),
            alpha=float(payload.get("alpha", 0.05)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SigPalError(f"malformed preset {name!r}: {exc}") from exc


def load_preset_file(path) -> Preset:
    """Parse a preset from a JSON file (same schema as the shipped ones)."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return _parse_payload(payload, str(payload.get("name", path)))


def available_presets() -> list[str]:
    names = list(_BASE_NAMES)
    table1 = _load_base("table1")
    names.extend(f"table1-row{i + 1}" for i in range(len(table1.rows)))
    return names


def _load_base(name: str) -> Preset:
    ref = resources.files("sigpal").joinpath("presets", f"{name}.json")
    with ref.open("r", encoding="utf-8") as fh:
        return _parse_payload(json.load(fh), name)


def load_preset(name: str) -> Preset:
    """Resolve a preset by name (``table1``, ``fig4``, ..., ``table1-rowK``)."""
    if name in _BASE_NAMES:
        return _load_base(name)
    if name.startswith("table1-row"):
        table1 = _load_base("table1")
        try:
            k = int(name.removeprefix("table1-row"))
        except ValueError:
            k = 0
        if 1 <= k <= len(table1.rows):
            return Preset(
                name=name,
                description=f"{table1.description} (setting {table1.rows[k - 1][0]} only)",
                rows=(table1.rows[k - 1],),
                methods=table1.methods,
                reps=table1.reps,
                n_sim=table1.n_sim,
                alpha=table1.alpha,
            )
    raise SigPalError(
        f"unknown preset {name!r}; available: {', '.join(available_presets())}"
    )
