import logging
import os

from copy import deepcopy
from logging.handlers import RotatingFileHandler
from pramsey.utils import deep_compare

logger = logging.getLogger(__name__)


class ToolkitLogger(object):

    """Applies the `log` section of the configuration to the root logger.

    Records go to stderr unless `dir` is set, in which case they go to a rotating
    `pramsey.log` file in that directory."""

    DEFAULT_LEVEL = 'WARNING'
    DEFAULT_FORMAT = '%(asctime)s %(levelname)s: %(message)s'
    LOG_FILE = 'pramsey.log'

    def __init__(self):
        self._root = logging.getLogger()
        self._config = None
        self.log_handler = None

    @staticmethod
    def _formatter_args(config):
        return config.get('format', ToolkitLogger.DEFAULT_FORMAT), config.get('dateformat') or None

    def _wants_file(self, config):
        return 'dir' in config

    def _replacement_handler(self, config):
        """Returns a new handler when the kind of destination changes, otherwise None"""
        if self._wants_file(config):
            if not isinstance(self.log_handler, RotatingFileHandler):
                return RotatingFileHandler(os.path.join(config['dir'], self.LOG_FILE))
        elif self.log_handler is None or isinstance(self.log_handler, RotatingFileHandler):
            return logging.StreamHandler()

    def _swap_handler(self, handler):
        self._root.addHandler(handler)
        old, self.log_handler = self.log_handler, handler
        if old is not None:
            self._root.removeHandler(old)
            try:
                old.close()
            except Exception:
                logger.exception('Can not close log handler %r', old)

    def _apply_levels(self, overrides):
        overrides = dict(overrides or {})
        manager = self._root.manager
        for name, existing in list(manager.loggerDict.items()):
            if isinstance(existing, logging.Logger):
                existing.setLevel(overrides.pop(name, logging.NOTSET))
        for name, level in overrides.items():
            logging.getLogger(name).setLevel(level)

    def reload_config(self, config):
        """Returns False when `config` equals the section applied last time"""
        if self._config is not None and deep_compare(self._config, config):
            return False

        self._root.setLevel(config.get('level', self.DEFAULT_LEVEL))

        fresh = self._replacement_handler(config)
        handler = fresh or self.log_handler
        if isinstance(handler, RotatingFileHandler):
            handler.maxBytes = int(config.get('file_size', 25000000))
            handler.backupCount = int(config.get('file_num', 4))

        previous = self._formatter_args(self._config or {})
        current = self._formatter_args(config)
        if fresh or previous != current:
            handler.setFormatter(logging.Formatter(*current))

        if fresh:
            self._swap_handler(fresh)

        self._config = deepcopy(config)
        self._apply_levels(config.get('loggers'))
        return True

    def shutdown(self):
        if self.log_handler is not None:
            self._root.removeHandler(self.log_handler)
            self.log_handler.close()
            self.log_handler = None
        self._config = None
