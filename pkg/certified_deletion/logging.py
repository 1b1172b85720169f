import logging
import os
import sys
from logging.handlers import TimedRotatingFileHandler
from certified_deletion.errors import ConfigurationError


LOG_FORMATTER = logging.Formatter('%(asctime)s %(levelname)s: %(message)s')
DEFAULT_LOG_LEVEL_STR = 'warning'


def get_logger(config_log_level, logger_name, log_file=None):
    conf_error = None

    logger = logging.getLogger(logger_name)
    log_handler = _find_handler(logger, log_file)
    if log_handler is None:
        if log_file is None:
            log_handler = logging.StreamHandler(sys.stderr)
        else:
            log_handler = TimedRotatingFileHandler(log_file, when='midnight', interval=1, backupCount=7)
        log_handler.setFormatter(LOG_FORMATTER)
        logger.addHandler(log_handler)

    try:
        log_level = _get_log_level(config_log_level)
    except ConfigurationError as ce:
        conf_error = ce
        log_level = _get_log_level(DEFAULT_LOG_LEVEL_STR)
    log_handler.setLevel(log_level)
    logger.setLevel(log_level)

    if conf_error:
        logger.warning("Error getting log level from configuration: %s", conf_error)

    return logger


def _find_handler(logger, log_file):
    """The handler a previous get_logger call attached for the same destination, if any."""
    for handler in logger.handlers:
        if log_file is None:
            if type(handler) is logging.StreamHandler and handler.stream is sys.stderr:
                return handler
        elif isinstance(handler, TimedRotatingFileHandler) and handler.baseFilename == os.path.abspath(log_file):
            return handler
    return None


def _get_log_level(config_log_level):
    if config_log_level.lower() == 'debug':
        return logging.DEBUG
    elif config_log_level.lower() == 'info':
        return logging.INFO
    elif config_log_level.lower() == 'warning':
        return logging.WARNING
    elif config_log_level.lower() == 'error':
        return logging.ERROR
    elif config_log_level.lower() == 'critical':
        return logging.CRITICAL
    else:
        raise ConfigurationError(
            "Invalid log level '{}' supplied; must be one of: debug, info, warning, error, or critical".format(
                config_log_level)
        )
