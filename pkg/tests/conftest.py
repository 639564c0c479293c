"""Shared fixtures: default parameter sets and derived constants."""

import pytest

from tpass import SystemParams, derive_constants, two_user_defaults


@pytest.fixture(scope="session")
def params():
    return SystemParams()


@pytest.fixture(scope="session")
def consts(params):
    return derive_constants(params)


@pytest.fixture(scope="session")
def params_2u():
    return two_user_defaults()


@pytest.fixture(scope="session")
def consts_2u(params_2u):
    return derive_constants(params_2u)
