"""

Tests for the logging setup.

"""
# pylint: disable=E1101:no-member, W0201:attribute-defined-outside-init, W0511:fixme
# pylint: disable=C0103:invalid-name, W0212:protected-access
# pylint: disable=C0116:missing-function-docstring, C0115:missing-class-docstring
# pylint: disable=R0913:too-many-arguments, R0903:too-few-public-methods
# pylint: disable=C0413:wrong-import-position

import logging
import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(
    os.path.join(os.path.dirname(__file__), '../..')))

from metriclust.logconfig import LEVEL_ENV_VAR, LogConfig


class Test_LogConfig:

    # Library messages reach the log file
    def test_file(self, tmp_path):
        fname = tmp_path / "run.log"
        LogConfig.setup_logging(level="debug", fname=str(fname), console=False)
        logging.getLogger("metriclust.kmeans").debug("restart %d done", 3)
        LogConfig.shutdown()
        text = fname.read_text(encoding="utf-8")
        assert "DEBUG metriclust.kmeans restart 3 done" in text

    # Unknown levels are refused
    def test_invalid_level(self, tmp_path):
        with pytest.raises(AssertionError):
            LogConfig.setup_logging(level="loud", fname=str(tmp_path / "x.log"))

    # The level defaults to the environment variable
    def test_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv(LEVEL_ENV_VAR, "WARNING")
        logger = LogConfig.setup_logging(fname=str(tmp_path / "x.log"), console=False)
        assert logger.level == logging.WARNING
        LogConfig.shutdown()
        assert not logger.handlers

    # Setting up twice does not duplicate handlers
    def test_idempotent(self, tmp_path):
        LogConfig.setup_logging(level="info", fname=str(tmp_path / "x.log"))
        logger = LogConfig.setup_logging(level="info", fname=str(tmp_path / "x.log"))
        assert len(logger.handlers) == 2
        LogConfig.shutdown()
