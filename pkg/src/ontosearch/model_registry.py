# -*- coding: utf-8 -*-
"""
Collection of functions to manage the search model presets and their registry file
"""
import os
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from .wsd import PPRConfig


EXPANSIONS = ("none", "csa", "rcsa", "noise")

PRESETS = {
    "lexical": {"use_ne": False, "use_ww": False, "expansion": "none"},
    "ne_kw": {"use_ne": True, "use_ww": False, "expansion": "none"},
    "ww_kw": {"use_ne": False, "use_ww": True, "expansion": "none"},
    "ne_ww_kw": {"use_ne": True, "use_ww": True, "expansion": "none"},
    "csa": {"use_ne": False, "use_ww": False, "expansion": "csa"},
    "rcsa": {"use_ne": False, "use_ww": False, "expansion": "rcsa"},
    "semantic": {"use_ne": True, "use_ww": True, "expansion": "rcsa"},
}


@dataclass(frozen=True)
class ModelConfig:
    """
    Configuration of one search model.

    use_ne and use_ww gate the NE and WW annotation; expansion selects the query expansion.
    keyword_latents forces latent concepts to be rendered as keywords. interrogatives overrides
    the interrogative word table (None keeps the bundled one). noise_seed seeds the "noise"
    expansion baseline, which adds random fact-store concepts instead of related ones.
    """

    use_ne: bool = True
    use_ww: bool = True
    expansion: str = "rcsa"
    virtual_term_weight: float = 1.0
    latent_term_weight: float = 1.0
    wsd: PPRConfig = field(default_factory=PPRConfig)
    keyword_latents: bool = False
    fusion_window: int = 4
    idf_floor: float = 0.01
    interrogatives: dict = None
    noise_seed: int = 0

    def __post_init__(self):
        if self.expansion not in EXPANSIONS:
            raise ValueError(f"expansion {self.expansion} not valid. Must be one of {list(EXPANSIONS)}.")
        if self.virtual_term_weight < 0 or self.latent_term_weight < 0:
            raise ValueError("Term weight multipliers must be nonnegative.")
        if self.fusion_window < 0:
            raise ValueError(f"fusion_window must be nonnegative, got {self.fusion_window}.")
        if self.idf_floor <= 0:
            raise ValueError(f"idf_floor must be positive, got {self.idf_floor}.")


def model_config_to_dict(config):
    """
    Convert a ModelConfig to a plain dictionary, with the WSD parameters nested under "wsd".
    """
    return asdict(config)


def model_config_from_dict(dictionary, base=None):
    """
    Build a ModelConfig from a dictionary whose keys override a base configuration.

    Parameters
    ----------
    dictionary : dict
        The overriding keys. A "wsd" entry is a dictionary of PPRConfig fields.
    base : ModelConfig, optional
        The configuration to override. Default is ModelConfig().

    Returns
    -------
    ModelConfig
        The configuration.

    Raises
    ------
    ValueError
        If a key is not a ModelConfig or PPRConfig field.
    """
    if base is None:
        base = ModelConfig()
    known = {f.name for f in fields(ModelConfig)}
    ppr_known = {f.name for f in fields(PPRConfig)}
    dictionary = dict(dictionary)
    for key in dictionary:
        if key not in known:
            raise ValueError(f"Unknown model configuration key {key!r}. Valid keys are {sorted(known)}.")
    wsd = dictionary.pop("wsd", None)
    if wsd is not None:
        if isinstance(wsd, PPRConfig):
            dictionary["wsd"] = wsd
        else:
            for key in wsd:
                if key not in ppr_known:
                    raise ValueError(f"Unknown wsd configuration key {key!r}. Valid keys are {sorted(ppr_known)}.")
            dictionary["wsd"] = replace(base.wsd, **wsd)
    return replace(base, **dictionary)


def get_preset(preset):
    """
    Get the ModelConfig of a built-in preset.

    Parameters
    ----------
    preset : str
        One of lexical, ne_kw, ww_kw, ne_ww_kw, csa, rcsa, semantic.

    Returns
    -------
    ModelConfig
        The preset configuration.

    Raises
    ------
    ValueError
        If the preset is unknown.
    """
    if preset not in PRESETS:
        raise ValueError(f"Unknown preset {preset!r}. Available presets are {list(PRESETS)}.")
    return model_config_from_dict(PRESETS[preset])


def _check_if_model_registry_exists(path):
    if not os.path.exists(path):
        if path == "./model_registry.yaml":
            raise RuntimeError("Did you forgot to run create_model_registry()?")
        raise RuntimeError(f"Model registry {path} does not exist.")


def _save_model_registry(model_registry, path="./model_registry.yaml"):
    with open(path, "w") as f:
        for key, value in model_registry.items():
            yaml.safe_dump({key: value}, f, sort_keys=False)
            f.write("\n" * 2)


def create_model_registry(presets=None, path="./model_registry.yaml", reset=False):
    """
    Create the model registry yaml file with the given presets.

    Presets already in the file are kept unless reset is True.

    Parameters
    ----------
    presets : list of str, optional
        Built-in presets to register. Default is None: all seven presets.
    path : str, optional
        The path to the model registry file (default is "./model_registry.yaml").
    reset : bool, optional
        If True, registered presets are reset to their built-in values (default is False).

    Returns
    -------
    None
    """
    if presets is None:
        presets = list(PRESETS)

    model_registry = {}
    if os.path.exists(path):
        with open(path, "r") as f:
            model_registry = yaml.safe_load(f) or {}

    for preset in presets:
        if preset not in model_registry or reset:
            model_registry[preset] = model_config_to_dict(get_preset(preset))

    _save_model_registry(model_registry, path=path)


def get_model_from_registry(preset, path="./model_registry.yaml"):
    """
    Get the configuration of a preset from the model registry file.

    Parameters
    ----------
    preset : str
        The preset name.
    path : str, optional
        The path to the model registry file (default is "./model_registry.yaml").

    Returns
    -------
    ModelConfig
        The registered configuration.

    Raises
    ------
    ValueError
        If the preset is not in the registry.

    See also
    --------
    create_model_registry
    """
    _check_if_model_registry_exists(path)

    with open(path, "r") as f:
        model_registry = yaml.safe_load(f) or {}
    if preset not in model_registry:
        raise ValueError(
            f"Unknown preset {preset!r}. Available presets are {list(model_registry)}."
        )
    return model_config_from_dict(model_registry[preset])


def update_model_registry(dictionary, presets=None, path="./model_registry.yaml", overwrite=False):
    """
    Update the model registry file with a dictionary. Keys already set for a preset are only
    replaced when overwrite is True.

    Parameters
    ----------
    dictionary : dict
        ModelConfig keys and values.
    presets : list of str, optional
        Presets to update. Default is None: all presets in the registry.
    path : str, optional
        The path to the model registry file (default is "./model_registry.yaml").
    overwrite : bool, optional
        If True, existing keys are replaced by the provided values (default is False).

    Returns
    -------
    None
    """
    _check_if_model_registry_exists(path)

    with open(path, "r") as f:
        model_registry = yaml.safe_load(f) or {}

    if presets is None:
        presets = list(model_registry)

    for preset in presets:
        entry = model_registry[preset]
        for key, value in dictionary.items():
            if key not in entry or overwrite:
                entry[key] = value
        # Validate before saving
        model_config_from_dict(entry)

    _save_model_registry(model_registry, path=path)


def load_model_config(path=None, preset="semantic"):
    """
    Load the model configuration of a preset, overridden by the keys of a JSON or YAML config file.

    Parameters
    ----------
    path : str, optional
        Config file path. Default is None: the preset alone.
    preset : str, optional
        The preset name (default is "semantic").

    Returns
    -------
    ModelConfig
        The configuration.

    Raises
    ------
    ValueError
        If the preset or a config key is unknown.
    """
    config = get_preset(preset)
    if path is None:
        return config
    with open(path, "r") as f:
        overrides = yaml.safe_load(f) or {}
    if not isinstance(overrides, dict):
        raise ValueError(f"Config file {path} must hold a mapping, got {type(overrides).__name__}.")
    return model_config_from_dict(overrides, base=config)
