import logging
import os
import yaml

from collections import defaultdict
from copy import deepcopy
from pramsey.exceptions import InvalidInputError
from pramsey.utils import parse_bool, patch_config

logger = logging.getLogger(__name__)


class Config(object):
    """
    This class is responsible for:

      1) Building and giving access to the effective configuration from:
         * `Config.__DEFAULT_CONFIG` -- sane defaults for every section
         * `local_configuration` -- configuration from a YAML file or from
           the YAML document stored in the `PRAMSEY_CONFIGURATION` environment variable
         * `PRAMSEY_<SECTION>_<NAME>` environment variables, which win over the file

      2) Validating the numeric sections, so that the library code can trust them.

      3) Mimicking some of the `dict` interfaces to make it possible
         to work with it as with a plain `config` dictionary.
    """

    PRAMSEY_ENV_PREFIX = 'PRAMSEY_'
    PRAMSEY_CONFIG_VARIABLE = PRAMSEY_ENV_PREFIX + 'CONFIGURATION'

    __DEFAULT_CONFIG = {
        'tol': 1e-9,
        'seed': 0,
        'log': {
            'level': 'WARNING'
        },
        'pipeline': {
            'delta': None,
            'epsilon': None,
            'margin': 1e-6,
            'search_budget': 400,
            'max_span': 10,
            'window': 80,
            'grid': 64,
            'radius_split': 0.75,
            'delta_rounds': 8
        },
        'certificate': {
            'trials': 20,
            'sample_size': 60,
            'ground': 7,
            'coloring_checks': True
        },
        'search': {
            'budget': 2 ** 25,
            'samples': 1000,
            'block_size': 4096,
            'workers': 1
        }
    }

    __INT_PARAMETERS = {
        'pipeline': ('search_budget', 'max_span', 'window', 'grid', 'delta_rounds'),
        'certificate': ('trials', 'sample_size', 'ground'),
        'search': ('budget', 'samples', 'block_size', 'workers')
    }
    __FLOAT_PARAMETERS = {
        'pipeline': ('delta', 'epsilon', 'margin', 'radius_split'),
    }

    def __init__(self, config_file=None, environ=None):
        self._environ = os.environ if environ is None else environ
        self.__environment_configuration = self._build_environment_configuration(self._environ)

        self._config_file = config_file if config_file and os.path.isfile(config_file) else None
        if self._config_file:
            self._local_configuration = self._load_config_file()
        else:
            config_env = self._environ.get(self.PRAMSEY_CONFIG_VARIABLE)
            self._local_configuration = config_env and yaml.safe_load(config_env) or {}
            if not isinstance(self._local_configuration, dict):
                raise InvalidInputError('{0} is not a mapping'.format(self.PRAMSEY_CONFIG_VARIABLE))
            patch_config(self._local_configuration, self.__environment_configuration)

        self.__effective_configuration = self._build_effective_configuration(self._local_configuration)

    @property
    def config_file(self):
        return self._config_file

    def _load_config_file(self):
        """Loads the YAML file from filesystem and applies some values which were set via ENV"""
        with open(self._config_file) as f:
            config = yaml.safe_load(f) or {}
            if not isinstance(config, dict):
                raise InvalidInputError('Configuration file {0} is not a mapping'.format(self._config_file))
            patch_config(config, self.__environment_configuration)
            return config

    @staticmethod
    def _build_environment_configuration(environ):
        ret = defaultdict(dict)

        def _getenv(name):
            return environ.get(Config.PRAMSEY_ENV_PREFIX + name.upper())

        for param in ('tol', 'seed'):
            value = _getenv(param)
            if value:
                ret[param] = yaml.safe_load(value)

        def _set_section_values(section, params):
            for param in params:
                value = _getenv(section + '_' + param)
                if value:
                    ret[section][param] = yaml.safe_load(value)

        _set_section_values('log', ['level', 'format', 'dateformat', 'dir', 'file_size', 'file_num', 'loggers'])
        _set_section_values('pipeline', list(Config.__DEFAULT_CONFIG['pipeline']))
        _set_section_values('certificate', list(Config.__DEFAULT_CONFIG['certificate']))
        _set_section_values('search', list(Config.__DEFAULT_CONFIG['search']))

        return dict(ret)

    def _build_effective_configuration(self, local_configuration):
        config = deepcopy(self.__DEFAULT_CONFIG)
        for name, value in local_configuration.items():
            if isinstance(config.get(name), dict):
                if not isinstance(value, dict):
                    raise InvalidInputError('Section {0} must be a mapping'.format(name))
                config[name].update(deepcopy(value))
            else:
                config[name] = deepcopy(value)

        try:
            config['tol'] = float(config['tol'])
            config['seed'] = int(config['seed'])
            for section, names in self.__INT_PARAMETERS.items():
                for name in names:
                    config[section][name] = int(config[section][name])
            for section, names in self.__FLOAT_PARAMETERS.items():
                for name in names:
                    if config[section][name] is not None:
                        config[section][name] = float(config[section][name])
        except (TypeError, ValueError) as e:
            raise InvalidInputError('Invalid configuration value: {0}'.format(e))

        value = parse_bool(config['certificate']['coloring_checks'])
        if value is None:
            raise InvalidInputError('certificate.coloring_checks must be a boolean')
        config['certificate']['coloring_checks'] = value

        if config['tol'] < 0:
            raise InvalidInputError('tol must be nonnegative')
        if config['pipeline']['margin'] <= 0:
            raise InvalidInputError('pipeline.margin must be positive')
        if not 0 < config['pipeline']['radius_split'] < 1:
            raise InvalidInputError('pipeline.radius_split must lie strictly between 0 and 1')
        for name in ('delta', 'epsilon'):
            if config['pipeline'][name] is not None and config['pipeline'][name] <= 0:
                raise InvalidInputError('pipeline.{0} must be positive'.format(name))

        logger.debug('Effective configuration: %s', config)
        return config

    def get(self, key, default=None):
        return self.__effective_configuration.get(key, default)

    def __contains__(self, key):
        return key in self.__effective_configuration

    def __getitem__(self, key):
        return self.__effective_configuration[key]

    def copy(self):
        return deepcopy(self.__effective_configuration)
