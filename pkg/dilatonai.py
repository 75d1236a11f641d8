#!/usr/bin/env python3
"""
Compute light propagation and light-pulse atom interferometer phases in a
linear gravitational potential with a dilaton background.

    ./dilatonai.py phase --set T_s=0.2
    ./dilatonai.py darkmatter -c data/darkmatter-resonance.yaml
    ./dilatonai.py validate

Scenario parameters come from the built-in defaults, then the YAML config
(top level keys and the section named after the scenario), then `--set`.
"""
import numpy as np
import argparse
import itertools
import yaml
import sys
import os

from copy import deepcopy
from pydoc import locate

import dilatonmodels.base as base

from dilatonmodels.base import log, warning
from dilatonmodels.core import GridError, PhysicsPreconditionError, QuadratureError

MODELDIR = "dilatonmodels"

DEFAULT_CONFIG = "dilatonai.yaml"

SCENARIOS = {
    "phase": "PhaseScenario",
    "gradiometer": "GradiometerScenario",
    "eep": "EepScenario",
    "darkmatter": "DarkMatterScenario",
    "optics-grid": "OpticsGridScenario",
    "validate": "ValidateScenario",
}


class ConfigError(ValueError):
    """
    Raised if the configuration cannot be used.
    """


class ValidationFailure(RuntimeError):
    """
    Raised if a validation run finds deviations above its tolerance.
    """


def get_scenario(name: str, **config):
    """
    Given a scenario kind, load its class from the MODELDIR package and set
    its parameters.
    """
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario '{name}', use one of {', '.join(SCENARIOS)}")
    impl = locate(f"{MODELDIR}.{SCENARIOS[name]}")
    if impl is None:
        raise ImportError(f"{MODELDIR}.{SCENARIOS[name]}")
    return impl(**config)


def parse_override(s: str) -> tuple:
    """
    Split 'key=value' and parse the value as YAML so numbers, booleans and
    lists keep their type.
    """
    key, sep, value = s.partition("=")
    if not sep or not key:
        raise ConfigError(f"override '{s}' is not of the form key=value")
    try:
        return key.strip(), yaml.safe_load(value)
    except yaml.YAMLError as e:
        raise ConfigError(f"override '{s}' has an unparseable value: {e}") from None


def axis_values(axis: dict) -> np.ndarray:
    steps = int(axis["steps"])
    if steps == 1:
        return np.array([float(axis["min"])])
    if axis.get("scale", "linear") == "log":
        return np.geomspace(float(axis["min"]), float(axis["max"]), steps)
    return np.linspace(float(axis["min"]), float(axis["max"]), steps)


def sweep_points(sweep: list) -> list:
    """
    Cartesian product of all sweep axes as a list of {name: value} points,
    the last axis varying fastest. No axes gives a single empty point.
    """
    names = [a["name"] for a in sweep]
    grids = [axis_values(a) for a in sweep]
    return [dict(zip(names, map(float, values))) for values in itertools.product(*grids)]


def coerce_parameter(name: str, value, default):
    """
    Bring `value` to the type of the scenario default. YAML reads `1e-9`
    as a string, so numbers are also accepted in text form.
    """

    def number(x):
        if isinstance(x, bool):
            raise ValueError
        return float(x)

    try:
        if isinstance(default, bool):
            if isinstance(value, bool):
                return value
        elif isinstance(default, int):
            x = number(value)
            if x.is_integer():
                return int(x)
        elif isinstance(default, float):
            return number(value)
        elif isinstance(default, str):
            if isinstance(value, str):
                return value
        elif isinstance(default, list):
            if all(isinstance(d, str) for d in default):
                if isinstance(value, str):
                    return value
                if isinstance(value, list) and all(isinstance(v, str) for v in value):
                    return value
            elif isinstance(value, list) and len(value) == len(default):
                return [number(v) for v in value]
        else:
            return value
    except (TypeError, ValueError):
        pass

    raise ConfigError(f"parameter '{name}' = {value!r} does not match the type of its default {default!r}")


def check_config(args):
    """
    Check config and set some defaults if necessary.
    """
    log(f"# Checking configuration")

    errors = []

    defaults = [
        ("quiet", False),
        ("out", f"{args['scenario']}.csv"),
        ("jobs", int(os.environ.get("DILATONAI_JOBS", 1))),
        ("parameters", {}),
        ("sweep", []),
    ]

    for arg, value in defaults:
        if args.get(arg) is None:
            log(f"'{arg}' not set, setting to default: {arg} = {value}")
            args[arg] = value

    try:
        known = locate(f"{MODELDIR}.{SCENARIOS[args['scenario']]}").defaults
    except (KeyError, AttributeError):
        raise ConfigError(f"unknown scenario '{args['scenario']}'") from None

    if not isinstance(args["parameters"], dict):
        errors.append("'parameters' must be a mapping of name: value")
    else:
        for k, v in args["parameters"].items():
            if k not in known:
                errors.append(f"unknown parameter '{k}' for scenario '{args['scenario']}'")
                continue
            try:
                args["parameters"][k] = coerce_parameter(k, v, known[k])
            except ConfigError as e:
                errors.append(str(e))

    try:
        args["jobs"] = int(args["jobs"])
        if args["jobs"] == 0:
            errors.append("'jobs' must be non-zero")
    except (TypeError, ValueError):
        errors.append(f"'jobs' must be an integer (got {args['jobs']})")

    if not isinstance(args["sweep"], list):
        errors.append("'sweep' must be a list of axes")
        args["sweep"] = []

    for axis in args["sweep"]:
        if not isinstance(axis, dict):
            errors.append(f"sweep axis {axis} must be a mapping")
            continue
        name = axis.get("name")
        if name not in known:
            errors.append(f"sweep axis '{name}' is not a parameter of scenario '{args['scenario']}'")
        for key in ("min", "max", "steps"):
            if key not in axis:
                errors.append(f"sweep axis '{name}' is missing '{key}'")
        for key in ("min", "max"):
            if key in axis:
                try:
                    axis[key] = coerce_parameter(f"{name}.{key}", axis[key], 0.0)
                except ConfigError as e:
                    errors.append(str(e))
                    axis.pop(key)
        if "steps" in axis and not (isinstance(axis["steps"], int) and axis["steps"] >= 1):
            errors.append(f"sweep axis '{name}' needs an integer 'steps' >= 1")
        scale = axis.setdefault("scale", "linear")
        if scale not in ("linear", "log"):
            errors.append(f"sweep axis '{name}' has unknown scale '{scale}'")
        if scale == "log" and not (axis.get("min", 0) > 0 and axis.get("max", 0) > 0):
            errors.append(f"log sweep axis '{name}' needs positive 'min' and 'max'")

    if errors:
        raise ConfigError("; ".join(errors))

    return args


def run(scenario=None, parameters=None, sweep=None, out=None, jobs=1, **args):
    """
    Evaluate the scenario on every sweep point and write one CSV row per
    point.
    """
    log("# Loading scenario")

    model = get_scenario(scenario, **deepcopy(parameters))
    if model.verbose:
        model.log = log

    log(f"Scenario: {scenario} -> {out}")
    for k, v in parameters.items():
        log(f"@{k} = {v}")

    points = sweep_points(sweep)

    for axis in sweep:
        log(f"Sweep: {axis['name']} in [{axis['min']}, {axis['max']}] ({axis['steps']} steps, {axis['scale']})")

    messages = {}
    for point in points[:1] + points[1:][-1:]:
        messages.update(dict.fromkeys(model.warnings(**{**model.parameters, **point})))
    for msg in messages:
        warning(msg)

    log("# Evaluating")

    n = model.evaluate_and_save(out, points, jobs)

    log(f"Wrote {n} rows to '{out}'")

    if getattr(model, "failures", 0):
        raise ValidationFailure(f"{model.failures} of {n} validation rows outside the tolerance, see '{out}'")


def cli_entry(*argv, **kwargs):
    """
    Parse settings from command line and settings file into `args`,
    run, and CLI interface.
    """
    from dilatonmodels import __version__

    parser = argparse.ArgumentParser(description="Dilaton gravity light propagation and atom interferometer phases.")

    parser.add_argument("scenario", choices=list(SCENARIOS))
    parser.add_argument("-c", "--config", default=None, metavar="yamlfile")
    parser.add_argument("-s", "--set", action="append", default=[], metavar="key=value", dest="overrides")
    parser.add_argument("-o", "--out", default=None)
    parser.add_argument("-j", "--jobs", type=int, default=None)
    parser.add_argument("-q", "--quiet", action="store_true", default=None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    cli = vars(parser.parse_args(list(argv) if argv else None))

    if cli["quiet"]:
        base.QUIET = True

    scenario = cli["scenario"]
    overrides = cli.pop("overrides")
    fn = cli.pop("config")
    args = {}

    # Try to load configuration file.

    try:

        with open(fn or DEFAULT_CONFIG) as fd:
            fargs = yaml.safe_load(fd) or {}

        if not isinstance(fargs, dict):
            raise ConfigError(f"configuration file '{fn or DEFAULT_CONFIG}' must hold a mapping")

        section = fargs.pop(scenario, None) or {}
        for name in SCENARIOS:
            fargs.pop(name, None)
        args = {**fargs, **section}

        log(f"Loading configuration from '{fn or DEFAULT_CONFIG}'")

    except yaml.YAMLError as e:
        warning(f"Configuration file '{fn or DEFAULT_CONFIG}' has incorrect YAML syntax: {e}")
        sys.exit(2)

    except FileNotFoundError:
        if fn is not None:
            warning(f"Configuration file '{fn}' not found.")
            sys.exit(2)
        log(f"No '{DEFAULT_CONFIG}' found, continuing without configuration file...")

    except ConfigError as e:
        warning(str(e))
        sys.exit(2)

    args = {**args, **{k: v for k, v in cli.items() if v is not None}}

    if args.get("quiet"):
        base.QUIET = True

    # Overwrite based on what is passed to main

    for k, v in kwargs.items():
        args[k] = v

    # Run this thing

    try:
        params = args.get("parameters") or {}
        if not isinstance(params, dict):
            raise ConfigError("'parameters' must be a mapping of name: value")
        args["parameters"] = dict(params)
        for s in overrides:
            k, v = parse_override(s)
            args["parameters"][k] = v

        args = check_config(args)

        run(**args)

        log("Finished.")

    except ConfigError as e:
        warning(f"Configuration Error: {e}")
        sys.exit(2)

    except (PhysicsPreconditionError, GridError) as e:
        warning(f"Physics Precondition Error: {e}")
        sys.exit(3)

    except (TypeError, ValueError) as e:
        warning(f"Configuration Error: {e}")
        sys.exit(2)

    except ValidationFailure as e:
        warning(f"Validation Failed: {e}")
        sys.exit(1)

    except QuadratureError as e:
        warning(f"Quadrature Error: {e} (estimate {e.estimate:.6e}, error {e.error:.3e})")
        sys.exit(1)

    except KeyboardInterrupt:
        warning(f"Processing interrupted, exiting...")
        sys.exit(130)


if __name__ == "__main__":
    cli_entry()
