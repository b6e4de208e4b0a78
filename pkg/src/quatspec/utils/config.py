"""
Module for configuration management

Two layers are kept here.  The library-wide ini layer (``set_config``,
``get``, ``get_int``, ``get_float``) holds logging settings and the
numerical tolerances.  The per-run JSON layer (``load_run_config``)
describes one invocation of a command line tool and is validated by the
pydantic models below, one per command.  Every record forbids extra keys,
so a misspelled key is an error rather than a silently ignored setting.
"""


import configparser
import json
import logging
import logging.handlers
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import (AfterValidator, BaseModel, ConfigDict, Field, StrictBool, StrictFloat,
                      StrictInt, StrictStr, ValidationError, field_validator)

from .errors import InvalidConfig

CONFIG_DEFAULTS = {
    'log_file': "",
    'log_level': "INFO",
    'log_file_max_bytes': "102400000",
    'log_file_backups': "5",
    # Discretisation
    'truncation': "8",
    'grid_resolution': "64",
    'derivative_scheme': "central",
    # Fiber solves
    'fiber_tol': "1e-7",
    'kernel_tol': "1e-6",
    'infinite_beta': "1e-12",
    'sheet_fraction': "0.9",
    'sheet_samples': "12",
    'fiber_method': "auto",
    'validate': "residual",
    # Branch tracing and collisions
    'max_halvings': "4",
    'continuation_step': "0.25",
    'collision_factor': "10",
    'double_point_tol': "1e-6",
    'handle_tol': "1e-3",
    'cutoff': "2.0",
    'cutoff_margin': "0.25",
    # Grid geometry
    'cross_tol': "5e-2",
    'zero_tol': "1e-3",
    'constant_tol': "1e-6",
    'degeneracy_tol': "1e-8",
    'frame_tol': "0.05",
    'frame_retries': "3",
    'coeff_tol': "1e-12",
    'underresolved_tol': "1e-6",
    'embed_fraction': "0.25",
    # Closed form models
    'oracle_window': "10",
    'threads': "1",
    'seed': "20240917",
}

configuration = configparser.ConfigParser(CONFIG_DEFAULTS) # pylint: disable=C0103

def set_config(config = None):
    """
    Set the configuration of the quatspec library

    :param config: config may be: A full path to a ini configuration file,
        a ConfigParser instance, or None, which will use all defaults.
    """
    global configuration # pylint: disable=C0103

    if isinstance(config, str):
        configuration = configparser.ConfigParser(CONFIG_DEFAULTS)
        configuration.read([config])
    elif isinstance(config, configparser.RawConfigParser):
        configuration = config
    elif config is None:
        print("Using built-in defaults")
        configuration = configparser.ConfigParser(CONFIG_DEFAULTS)
        configuration.add_section("quatspec")
    else:
        pass

    logger = logging.getLogger("quatspec")

    if configuration.has_option("quatspec", "log_file"):
        log_file = configuration.get("quatspec", "log_file")
        if log_file != "":
            logger.addHandler(logging.handlers.RotatingFileHandler(
                log_file,
                maxBytes=get_int("log_file_max_bytes"),
                backupCount=get_int("log_file_backups")))

    else:
        logger.addHandler(logging.StreamHandler())

    # Set the logging
    log_level = get("log_level")
    if log_level in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        logger.setLevel(getattr(logging, log_level))
    else:
        logger.setLevel(logging.WARNING)


def get(key, default=None):
    """
    Get the configuration value for key

    :param str key: The key in the configuration to retreive
    :returns: The value in the configuration, or the default
    """
    global configuration # pylint: disable=C0103

    try:
        return configuration.get("quatspec", key)
    except (configparser.NoOptionError, configparser.NoSectionError) as noe:
        # Check the defaults
        if key in CONFIG_DEFAULTS:
            return CONFIG_DEFAULTS[key]
        elif default is not None:
            return default
        else:
            raise noe


def get_int(key, default=None):
    """
    Get an integer from the configuration.

    :param str key: The key in the configuration to retreive
    :returns: The value in the configuration, or the default
    """
    return int(get(key, default))


def get_float(key, default=None):
    """
    Get a float from the configuration.

    :param str key: The key in the configuration to retreive
    :returns: The value in the configuration, or the default
    """
    return float(get(key, default))


# -- Run configurations -------------------------------------------------------

# Every tolerance of the ini layer may be overridden per run.
TOLERANCE_KEYS = [
    'fiber_tol', 'kernel_tol', 'infinite_beta', 'sheet_fraction', 'sheet_samples',
    'fiber_method', 'validate', 'max_halvings', 'continuation_step',
    'collision_factor', 'double_point_tol', 'handle_tol', 'cutoff_margin',
    'cross_tol', 'zero_tol', 'constant_tol', 'degeneracy_tol', 'frame_tol',
    'frame_retries', 'coeff_tol', 'underresolved_tol', 'embed_fraction',
    'oracle_window',
]

TWO_PI = 6.283185307179586

Number = Union[StrictInt, StrictFloat]
# A real number or a [re, im] pair, read with as_complex
ComplexValue = Union[StrictInt, StrictFloat, List[Number]]


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LatticeSpec(_Record):
    gamma1: ComplexValue = [TWO_PI, 0.0]
    gamma2: ComplexValue = [0.0, TWO_PI]


class VacuumSource(_Record):
    kind: Literal["vacuum"]
    alpha: ComplexValue = 0.0


class ConstantSource(_Record):
    kind: Literal["constant_q"]
    c: ComplexValue = 0.3
    alpha: ComplexValue = 0.0
    spin: Optional[List[StrictInt]] = None


class FourierSource(_Record):
    kind: Literal["fourier"]
    alpha: ComplexValue = 0.0
    modes: List[Any] = []


class HoloJsonSource(_Record):
    kind: Literal["holo_json"]
    path: StrictStr


class HomogeneousSource(_Record):
    kind: Literal["homogeneous"]
    theta: Number = 0.7853981633974483


class CliffordSource(_Record):
    kind: Literal["clifford"]


class GridJsonSource(_Record):
    kind: Literal["grid_json"]
    path: StrictStr


Source = Annotated[
    Union[VacuumSource, ConstantSource, FourierSource, HoloJsonSource,
          HomogeneousSource, CliffordSource, GridJsonSource],
    Field(discriminator="kind"),
]


class WindowSpec(_Record):
    re: List[Number] = [-1.0, 1.0]
    im: List[Number] = [-1.0, 1.0]

    @field_validator("re", "im")
    @classmethod
    def _interval(cls, value):
        if len(value) != 2 or value[0] > value[1]:
            raise ValueError("an interval is written as [lo, hi]")
        return value


class BranchSpec(_Record):
    a_start: ComplexValue = [0.75, 0.0]
    direction: ComplexValue = [1.0, 0.0]
    step: Number = 0.5
    count: StrictInt = 8
    b_hint: Optional[ComplexValue] = None


class OutputSpec(_Record):
    samples_csv: StrictStr = "spectrum.csv"
    branches_json: StrictStr = "branches.json"
    collisions_json: StrictStr = "collisions.json"
    family_json: StrictStr = "family.json"
    report_json: StrictStr = "verify.json"
    mesh_prefix: StrictStr = "member"


def _check_grid(value):
    if (len(value) != 2 or min(value) < 16):
        raise ValueError("grid must be [nx, ny] with at least 16 points per direction")
    return value


GridSize = Annotated[List[StrictInt], AfterValidator(_check_grid)]


class RunSchema(_Record):
    """
    Keys shared by every command.  Unset values fall back to the ini layer.
    """
    threads: Optional[StrictInt] = None
    truncation: Optional[StrictInt] = None
    cutoff: Optional[Number] = None
    derivative: Optional[StrictStr] = None
    tolerances: Dict[str, Union[StrictInt, StrictFloat, StrictStr]] = {}
    seed: Optional[StrictInt] = None
    output: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("tolerances")
    @classmethod
    def _known_tolerances(cls, value):
        unknown = sorted(set(value) - set(TOLERANCE_KEYS))
        if unknown:
            raise ValueError("unknown tolerance {}".format(", ".join(unknown)))
        return value


class SpectrumRun(RunSchema):
    source: Source = Field(default_factory=lambda: VacuumSource(kind="vacuum"))
    lattice: LatticeSpec = Field(default_factory=LatticeSpec)
    window: WindowSpec = Field(default_factory=WindowSpec)
    samples: StrictInt = 21
    compare: List[Any] = []

    @field_validator("samples")
    @classmethod
    def _enough_samples(cls, value):
        if value < 2:
            raise ValueError("at least 2 samples per direction are needed")
        return value


class DarbouxRun(RunSchema):
    source: Source = Field(default_factory=lambda: CliffordSource(kind="clifford"))
    grid: Optional[GridSize] = None
    samples: List[Any] = []
    branch: Optional[BranchSpec] = None
    rho_pairs: StrictBool = False
    drop_axis: StrictInt = 3


class VerifyRun(RunSchema):
    grid: GridSize = [64, 64]
    criteria: Optional[List[StrictStr]] = None
    draws: StrictInt = 20


class ExportMeshRun(RunSchema):
    source: Source = Field(default_factory=lambda: CliffordSource(kind="clifford"))
    grid: Optional[GridSize] = None
    drop_axis: StrictInt = 3


RUN_SCHEMAS = {
    'spectrum': SpectrumRun,
    'darboux': DarbouxRun,
    'verify': VerifyRun,
    'export-mesh': ExportMeshRun,
}


def as_complex(value):
    """
    Read a complex number written as a number or as a ``[re, im]`` pair.

    :param value: JSON value
    :returns: complex
    """
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidConfig("Complex values are written as [re, im], got {!r}".format(value))
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise InvalidConfig("Not a complex number: {!r}".format(value))


class RunConfig(object):
    """
    A validated run configuration for one command.

    Values not given in the JSON document fall back to the schema
    defaults, and tolerances fall back to the ini layer.
    """

    def __init__(self, command, values):
        self.command = command
        self.values = values

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        """
        Return a top level value, or default when it is unset.
        """
        value = self.values.get(key)
        return default if value is None else value

    def tolerance(self, key):
        """
        Return a tolerance, preferring the run override over the ini value.
        """
        override = self.values['tolerances'].get(key)
        if override is not None:
            return override
        default = CONFIG_DEFAULTS[key]
        value = get(key, default)
        try:
            return int(value) if value.isdigit() else float(value)
        except ValueError:
            return value

    def tolerances(self):
        """
        Return the full tolerance table for this run.
        """
        return {key: self.tolerance(key) for key in TOLERANCE_KEYS}

    @property
    def threads(self):
        return self.get('threads', get_int('threads'))

    @property
    def truncation(self):
        return self.get('truncation', get_int('truncation'))

    @property
    def cutoff(self):
        return float(self.get('cutoff', get_float('cutoff')))

    @property
    def derivative(self):
        scheme = self.get('derivative', get('derivative_scheme'))
        if scheme not in ('central', 'spectral'):
            raise InvalidConfig("Unknown derivative scheme '{}'".format(scheme))
        return scheme

    @property
    def seed(self):
        return self.get('seed', get_int('seed'))


def _describe(exc):
    return "; ".join("{}: {}".format(".".join(str(part) for part in err["loc"]) or "<root>", err["msg"])
                     for err in exc.errors())


def validate_run_config(command, doc):
    """
    Validate a parsed JSON run configuration.

    :param str command: One of the keys of ``RUN_SCHEMAS``
    :param dict doc: The parsed JSON document
    :returns: RunConfig
    :raises InvalidConfig: on unknown keys, wrong types or unknown commands
    """
    if command not in RUN_SCHEMAS:
        raise InvalidConfig("Unknown command '{}'".format(command))
    try:
        model = RUN_SCHEMAS[command].model_validate(doc)
    except ValidationError as exc:
        raise InvalidConfig("Invalid {} configuration: {}".format(command, _describe(exc)))
    return RunConfig(command, model.model_dump())


def load_run_config(path, command):
    """
    Load and validate a JSON run configuration from a file.

    :param str path: Location of the JSON document, or None for all defaults
    :param str command: The command the configuration is for
    :returns: RunConfig
    """
    if path is None:
        return validate_run_config(command, {})
    try:
        with open(path, 'r') as fobj:
            doc = json.load(fobj)
    except json.JSONDecodeError as exc:
        raise InvalidConfig("Malformed JSON in {}: {}".format(path, str(exc)))
    except OSError as exc:
        raise InvalidConfig("Unable to read {}: {}".format(path, str(exc)))
    return validate_run_config(command, doc)
