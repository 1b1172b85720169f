import json
import logging
from dataclasses import dataclass

from certified_deletion.bitvec import BitString
from certified_deletion.errors import ConfigurationError, ParameterError
from certified_deletion.hashcode import CODES, DEFAULT_CODE_NAME
from certified_deletion.logging import DEFAULT_LOG_LEVEL_STR
from certified_deletion.scheme import SchemeParams


DEFAULT_N = 128
DEFAULT_S = 384
DEFAULT_K = 128
DEFAULT_TAU = 32
DEFAULT_DELTA = 0.05
DEFAULT_TARGET_ETA = 2.0 ** -64
DEFAULT_WORKERS = 1
DEFAULT_SCENARIO = 'honest_epr'

RANDOMIZED_SUBCOMMANDS = ('keygen', 'decrypt', 'delete', 'simulate', 'robustness')
TRIAL_SUBCOMMANDS = ('simulate', 'robustness')
MAX_SEED = (1 << 64) - 1


class Configuration:
    def __init__(self, config_hash, logger=None):
        if not isinstance(config_hash, dict):
            raise ConfigurationError("configuration must be a JSON object, got {}".format(type(config_hash).__name__))
        self._config_hash = config_hash
        self._logger = (logger or logging.getLogger(__name__)).getChild("Configuration")

    def get_log_level(self):
        if 'log_level' in self._config_hash:
            return self._config_hash['log_level']
        else:
            return DEFAULT_LOG_LEVEL_STR

    def get_workers(self):
        return max(1, self._parse_int('workers', DEFAULT_WORKERS))

    def get_code(self):
        name = self._params_hash().get('code', DEFAULT_CODE_NAME)
        if name not in CODES:
            raise ConfigurationError(
                "Unknown code '{}'; must be one of: {}".format(name, ', '.join(sorted(CODES)))
            )
        return CODES[name]()

    def get_scheme_params(self):
        """
        Reads n, s, k, tau, delta and code, either at the top level or under "params" (the layout written by
        the planner); m and mu are derived.
        """
        params = self._params_hash()
        try:
            return SchemeParams.build(
                n=self._parse_int('n', DEFAULT_N, params),
                s=self._parse_int('s', DEFAULT_S, params),
                k=self._parse_int('k', DEFAULT_K, params),
                tau=self._parse_int('tau', DEFAULT_TAU, params),
                delta=self._parse_float('delta', DEFAULT_DELTA, params),
                code=self.get_code(),
                security=params.get('security'),
            )
        except ParameterError as e:
            raise ConfigurationError("Invalid scheme parameters: {}".format(e))

    def get_delta(self):
        return self._parse_float('delta', DEFAULT_DELTA, self._params_hash())

    def get_n(self):
        return self._parse_int('n', DEFAULT_N, self._params_hash())

    def get_target_eta(self):
        return self._parse_float('target_eta', DEFAULT_TARGET_ETA)

    def get_nu(self):
        """An explicit nu for eta evaluation, or None to minimize over nu."""
        if self._config_hash.get('nu') is None:
            return None
        return self._parse_float('nu', None)

    def get_noise_probability(self):
        return self._parse_float('noise_probability', 0.0)

    def get_scenario(self):
        return self._config_hash.get('scenario', DEFAULT_SCENARIO)

    def get_msg0(self, n):
        """The adversary's message as a '0'/'1' string; all ones by default."""
        bits = self._config_hash.get('msg0')
        if bits is None:
            return BitString.ones(n)
        if not isinstance(bits, str) or len(bits) != n or set(bits) - {'0', '1'}:
            raise ConfigurationError("msg0 must be a string of {} '0'/'1' characters, got {!r}".format(n, bits))
        return BitString.from_bits(bits)

    def _params_hash(self):
        params = self._config_hash.get('params', self._config_hash)
        if not isinstance(params, dict):
            raise ConfigurationError("'params' must be a JSON object")
        return params

    def _parse_int(self, conf_key, default_val, conf_hash=None):
        conf_hash = self._config_hash if conf_hash is None else conf_hash
        if conf_key in conf_hash:
            conf_val = conf_hash[conf_key]
            try:
                return int(conf_val)
            except (TypeError, ValueError):
                self._logger.warning(
                    "Invalid value for '%s': %s; the value must be an integer. Defaulting to %s",
                    conf_key,
                    conf_val,
                    default_val
                )

        return default_val

    def _parse_float(self, conf_key, default_val, conf_hash=None):
        conf_hash = self._config_hash if conf_hash is None else conf_hash
        if conf_key in conf_hash:
            conf_val = conf_hash[conf_key]
            try:
                return float(conf_val)
            except (TypeError, ValueError):
                self._logger.warning(
                    "Invalid value for '%s': %s; the value must be a number. Defaulting to %s",
                    conf_key,
                    conf_val,
                    default_val
                )

        return default_val


def load_config(source=None, logger=None):
    """
    source is a path to a JSON file or an inline JSON object; None gives the built-in defaults. Valid config as
    follows (every key optional):
    {
        "log_level": "warning",  # valid values: debug, info, warning, error, critical
        "workers": 1,  # worker processes for simulate and robustness
        "n": 128, "s": 384, "k": 128, "tau": 32, "delta": 0.05,  # scheme parameters; may also sit under "params"
        "code": "hamming8_4",  # one of hamming8_4, repetition2_1, identity1
        "target_eta": 5.421010862427522e-20,  # planner target
        "nu": null,  # fixed nu for params eval; null minimizes over nu
        "noise_probability": 0.0,  # per-qubit flip probability applied before the adversary
        "scenario": "honest_epr",  # oracle instances: honest_epr, product_state or computational_copy
        "msg0": "1"  # oracle instances: the adversary's message as a bit string
    }
    """
    if source is None:
        return Configuration({}, logger)
    if source.lstrip().startswith('{'):
        try:
            conf = json.loads(source)
        except json.JSONDecodeError as e:
            raise ConfigurationError("Cannot parse inline configuration: {}".format(e))
        return Configuration(conf, logger)

    try:
        with open(source, 'r') as conf_file:
            conf = json.load(conf_file)
    except OSError as e:
        raise ConfigurationError("Cannot open configuration file {}: {}".format(source, e))
    except json.JSONDecodeError as e:
        raise ConfigurationError("Cannot parse configuration file {}: {}".format(source, e))

    return Configuration(conf, logger)


@dataclass
class RunConfig:
    """One command-line invocation: the subcommand, its configuration and the file/seed flags."""
    subcommand: str
    config: Configuration
    action: str = None
    seed: int = None
    trials: int = None
    strategy: str = None
    in_path: str = None
    out_path: str = None
    key_path: str = None
    aux_path: str = None
    cert_path: str = None
    output_format: str = 'json'
    log_level: str = None
    log_file: str = None
    workers: int = None

    def validate(self):
        if self.subcommand in RANDOMIZED_SUBCOMMANDS and self.seed is None:
            raise ConfigurationError("'{}' is randomized and needs --seed".format(self.subcommand))
        if self.seed is not None and not 0 <= self.seed <= MAX_SEED:
            raise ConfigurationError("--seed must lie in [0, 2^64), got {}".format(self.seed))
        if self.subcommand in TRIAL_SUBCOMMANDS and (self.trials is None or self.trials < 1):
            raise ConfigurationError("'{}' needs --trials >= 1".format(self.subcommand))
        if self.output_format not in ('json', 'csv'):
            raise ConfigurationError("--format must be json or csv, got {}".format(self.output_format))
        if self.workers is not None and self.workers < 1:
            raise ConfigurationError("--workers must be at least 1, got {}".format(self.workers))
        return self

    def get_log_level(self):
        return self.log_level or self.config.get_log_level()

    def get_workers(self):
        return self.workers or self.config.get_workers()
