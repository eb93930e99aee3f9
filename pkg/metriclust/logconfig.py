"""
This module contains the LogConfig class, which is used to configure logging
for the clustering library and its command line.
"""

import logging
import os
import time

from rich.logging import RichHandler

VALID_LEVELS = ['debug', 'info', 'warning', 'error', 'critical']
LEVEL_ENV_VAR = "METRICLUST_LOG_LEVEL"


class LogConfig:
    """
    Class to configure logging for metriclust.
    """

    @staticmethod
    def setup_logging(
        name: str = "metriclust",
        level: str = None,
        fname: str = None,
        console: bool = True
    ) -> logging.Logger:
        """
        Set up logging for metriclust. Library modules log under the
        `metriclust.*` hierarchy, so configuring the `metriclust` logger is
        enough to capture everything.

        Parameters:
        ------------
        - name (str): The name of the logger. Default is 'metriclust'.
        - level (str): The level of logging to be used. When None, the value
            of METRICLUST_LOG_LEVEL is used, or 'info' if unset.
            Posible values are: 'debug', 'info', 'warning', 'error', 'critical'.
        - fname (str): The name of the log file. Default is `.{name}.log`.
        - console (bool): Whether to echo warnings and errors on the console.

        Returns:
        --------
        - logger: The logger object.
        """
        if level is None:
            level = os.environ.get(LEVEL_ENV_VAR, "info").lower()
        assert level in VALID_LEVELS, \
            f"Level '{level}' not recognized. Possible values are: {VALID_LEVELS}"

        log_fname = fname if fname is not None else f".{name}.log"
        tz = time.strftime('%z')
        fmt = '%(asctime)s' + tz + ' %(levelname)s %(name)s %(message)s'

        logger = logging.getLogger(name)
        logger.setLevel(getattr(logging, level.upper()))
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()

        file_handler = logging.FileHandler(log_fname, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(fmt))
        logger.addHandler(file_handler)

        if console:
            console_handler = RichHandler(
                level=logging.WARNING, show_path=False, markup=False)
            logger.addHandler(console_handler)

        return logger

    @staticmethod
    def shutdown(name: str = "metriclust"):
        """
        Detach and close every handler installed by `setup_logging`.
        """
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()
