"""
JSON experiment configuration files.

Schema version 1::

    {
      "version": 1,
      "name": "optional label",
      "defaults": {                       # optional, shared by every cell
        "alpha": 0.05, "replications": 500, "master_seed": 1,
        "framework": "gaussian",
        "cov": {"family": "ar1", "rho": 0.5},
        "signal": {"target_ratio": 0.1}
      },
      "scenarios": [                      # explicit cells
        {"n1": 100, "n2": 100, "p": 200, "signal": {"sparsity_fraction": 0.01}}
      ],
      "grids": [                          # cartesian products
        {"sizes": [[100, 100, 200]], "sparsity": [0, 0.01],
         "cov": [{"family": "ar1"}], "framework": ["gaussian"]}
      ]
    }

At least one of ``scenarios`` / ``grids`` must be present.
"""

import json
from importlib import resources
from pathlib import Path

from .harness import expand_grid
from .simulate import ScenarioConfig

CONFIG_VERSION = 1
_TOP_KEYS = {"version", "name", "description", "defaults", "scenarios", "grids"}
_DEFAULT_KEYS = {"alpha", "replications", "master_seed", "framework", "cov", "signal"}
_SCENARIO_KEYS = {"n1", "n2", "p"} | _DEFAULT_KEYS
_GRID_KEYS = {"sizes", "sparsity", "cov", "framework"}


class ConfigError(ValueError):
    pass


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {sorted(unknown)}")


def _merge(defaults, cell):
    out = dict(defaults)
    for key, value in cell.items():
        if key in ("cov", "signal"):
            out[key] = {**defaults.get(key, {}), **value}
        else:
            out[key] = value
    return out


def scenarios_from_dict(doc, replications=None, master_seed=None):
    """Expand a parsed config document into a list of ScenarioConfig.

    `replications` and `master_seed`, when given, override the file.
    """
    _check_keys(doc, _TOP_KEYS, "config")
    version = doc.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"version: unsupported config version {version!r}")
    defaults = dict(doc.get("defaults", {}))
    _check_keys(defaults, _DEFAULT_KEYS, "defaults")
    if replications is not None:
        defaults["replications"] = replications
    if master_seed is not None:
        defaults["master_seed"] = master_seed
    if "scenarios" not in doc and "grids" not in doc:
        raise ConfigError("config: needs 'scenarios' or 'grids'")

    cfgs = []
    try:
        for i, cell in enumerate(doc.get("scenarios", [])):
            _check_keys(cell, _SCENARIO_KEYS, f"scenarios[{i}]")
            merged = _merge(defaults, cell)
            if replications is not None:
                merged["replications"] = replications
            if master_seed is not None:
                merged["master_seed"] = master_seed
            cfgs.append(ScenarioConfig(**merged))
        for i, grid in enumerate(doc.get("grids", [])):
            _check_keys(grid, _GRID_KEYS, f"grids[{i}]")
            if "sizes" not in grid or "sparsity" not in grid:
                raise ConfigError(f"grids[{i}]: needs 'sizes' and 'sparsity'")
            covs = grid.get("cov")
            if covs is not None:
                covs = [{**defaults.get("cov", {}), **c} for c in covs]
            cfgs.extend(expand_grid(defaults, [tuple(s) for s in grid["sizes"]],
                                    grid["sparsity"], covs, grid.get("framework")))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if not cfgs:
        raise ConfigError("config: no scenarios defined")
    return cfgs


def bundled_configs():
    """Names of the configuration files shipped with the package."""
    return sorted(p.name[:-5] for p in resources.files("comptest.configs").iterdir()
                  if p.name.endswith(".json"))


def load_config(path_or_name, replications=None, master_seed=None):
    """Read a config file, or a bundled config by name (e.g. ``"table2_desk"``)."""
    path = Path(path_or_name)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif str(path_or_name) in bundled_configs():
        text = resources.files("comptest.configs").joinpath(f"{path_or_name}.json").read_text(
            encoding="utf-8")
    else:
        raise ConfigError(f"no config file or bundled config named {str(path_or_name)!r}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path_or_name}: invalid JSON ({exc})") from None
    return scenarios_from_dict(doc, replications, master_seed)
