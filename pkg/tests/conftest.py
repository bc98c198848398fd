import pytest

import fdrelay as fd


@pytest.fixture(scope="session")
def stock_config():
    """Four relays, 20 dB caps, mild leakage, 10 dB interference cap."""
    return fd.NetworkConfig(num_relays=4, zeta=0.001,
                            p_s_max=fd.db_to_linear(20.0),
                            p_r_max=fd.db_to_linear(20.0),
                            i_bar_p=fd.db_to_linear(10.0))


@pytest.fixture(scope="session")
def stock_channels(stock_config):
    return fd.sample_channels(stock_config, seed=7)
