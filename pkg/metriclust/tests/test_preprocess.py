"""

Tests for standardization and principal component analysis.

"""
# pylint: disable=E1101:no-member, W0201:attribute-defined-outside-init, W0511:fixme
# pylint: disable=C0103:invalid-name, W0212:protected-access
# pylint: disable=C0116:missing-function-docstring, C0115:missing-class-docstring
# pylint: disable=R0913:too-many-arguments, R0903:too-few-public-methods
# pylint: disable=C0413:wrong-import-position

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(
    os.path.join(os.path.dirname(__file__), '../..')))

from metriclust.errors import ConfigError, DataError
from metriclust.preprocess import pca_fit, pca_project, pca_reconstruct, standardize


def correlated(n=500, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, 3))
    return z @ np.array([[3.0, 0.0, 0.0], [1.0, 0.5, 0.0], [0.2, 0.1, 10.0]]) + 7.0


class Test_Standardize:

    # Columns end with mean zero and unit sample variance
    def test_zero_mean_unit_variance(self):
        scaled, params = standardize(correlated())
        assert np.allclose(scaled.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(scaled.std(axis=0, ddof=1), 1.0)
        assert not params.zero_variance.any()

    # The parameters undo the transformation
    def test_inverse(self):
        data = correlated()
        scaled, params = standardize(data)
        assert np.allclose(params.inverse_transform(scaled), data)
        assert np.allclose(params.transform(data), scaled)

    # Constant columns are centred and flagged
    def test_zero_variance(self, caplog):
        data = np.column_stack([np.arange(5.0), np.full(5, 3.0)])
        scaled, params = standardize(data)
        assert params.zero_variance.tolist() == [False, True]
        assert np.array_equal(scaled[:, 1], np.zeros(5))
        assert "zero variance" in caplog.text

    # One row cannot be standardized
    def test_single_row(self):
        with pytest.raises(DataError):
            standardize([[1.0, 2.0]])


class Test_Pca:

    # Explained variance ratios sum to one and are sorted
    def test_ratios(self):
        model = pca_fit(standardize(correlated())[0])
        assert model.explained_variance_ratio.sum() == pytest.approx(1.0)
        assert np.all(np.diff(model.eigenvalues) <= 0)
        assert model.cumulative_ratio()[-1] == pytest.approx(1.0)

    # On two-dimensional data the scores are a rotation of the centred data
    def test_rotation(self):
        data = correlated()[:, :2]
        model = pca_fit(data)
        scores = pca_project(model, data, 2)
        centred = data - data.mean(axis=0)
        assert np.allclose(np.linalg.norm(scores, axis=1), np.linalg.norm(centred, axis=1))
        assert np.allclose(model.components.T @ model.components, np.eye(2))

    # Rank-one data has no variance on the second axis
    def test_rank_one(self):
        t = np.random.default_rng(3).normal(size=200)
        model = pca_fit(np.column_stack([t, -2.0 * t + 1.0]))
        assert model.explained_variance_ratio[1] <= 1e-9

    # Projecting on every axis and back recovers the data
    def test_round_trip(self):
        data = correlated()
        model = pca_fit(data)
        back = pca_reconstruct(model, pca_project(model, data, 3))
        assert np.max(np.abs(back - data)) <= 1e-8

    # The number of components must fit the data
    def test_components_range(self):
        model = pca_fit(correlated())
        with pytest.raises(ConfigError):
            pca_project(model, correlated(), 4)
        with pytest.raises(ConfigError):
            pca_project(model, correlated(), 0)

    # Constant data has nothing to explain
    def test_zero_total_variance(self):
        with pytest.raises(DataError):
            pca_fit(np.ones((10, 2)))
