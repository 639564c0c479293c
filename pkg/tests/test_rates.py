"""Power-split bounds, optimal splits, and per-slot rate formulas."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpass import (
    InfeasibleError,
    SystemParams,
    beta_bounds,
    optimal_beta,
    pair_rates,
    slot_rates,
    weighted_optimal_beta,
)
from tpass.rates import (
    BETA_FLOOR,
    beta_bounds_arrays,
    noma_pair_rates,
    snr_scales,
    weighted_beta_arrays,
)

P2U = SystemParams(N=1, K=1, w0=1.0, w_k=1.0)

# a comfortable reference slot: wired gain 0.1, wireless gain 1e-8,
# P = 0.1 W over sigma2 = 1e-12 W -> (m, z) = (1e10, 1e3)
G_WIRED, G_WIRELESS = 0.1, 1e-8

gains = st.tuples(
    st.floats(min_value=1e-6, max_value=1e2),
    st.floats(min_value=1e-10, max_value=1e-4),
)


def test_snr_scales(params):
    m, z = snr_scales(G_WIRED, G_WIRELESS, params)
    assert m == pytest.approx(1e10)
    assert z == pytest.approx(1e3)


def test_pair_rates_golden():
    rate_wired, rate_wireless = pair_rates(z=1.0, m=3.0, beta=1.0 / 3.0)
    assert rate_wired == pytest.approx(1.0)
    assert rate_wireless == pytest.approx(0.5849625007211562)


def test_pair_rates_full_power_edges():
    # beta = 0: everything to the wireless user; beta = 1: everything wired
    rate_wired, rate_wireless = pair_rates(z=7.0, m=15.0, beta=0.0)
    assert rate_wired == 0.0
    assert rate_wireless == pytest.approx(3.0)
    rate_wired, rate_wireless = pair_rates(z=7.0, m=15.0, beta=1.0)
    assert rate_wired == pytest.approx(4.0)
    assert rate_wireless == 0.0


def test_slot_rates_golden(params):
    slot = slot_rates(G_WIRED, G_WIRELESS, beta=0.4995, params=params)
    assert slot.rate_wired == pytest.approx(32.21783753229278)
    assert slot.rate_wireless == pytest.approx(1.0)
    assert slot.p_wired == pytest.approx(0.04995)
    assert slot.p_wireless == pytest.approx(params.P_max - 0.04995)
    assert slot.sic_feasible


def test_slot_rates_rejects_bad_beta(params):
    with pytest.raises(ValueError):
        slot_rates(G_WIRED, G_WIRELESS, beta=1.5, params=params)


def test_beta_bounds_golden(params):
    beta_min, beta_max = beta_bounds(G_WIRED, G_WIRELESS, params)
    assert beta_min == pytest.approx(1e-10)
    assert beta_max == pytest.approx(0.4995)


def test_beta_bounds_hit_rate_floors_exactly(params):
    """The bounds are defined by meeting the two QoS floors with equality."""
    beta_min, beta_max = beta_bounds(G_WIRED, G_WIRELESS, params)
    m, z = snr_scales(G_WIRED, G_WIRELESS, params)
    at_min = pair_rates(z, m, beta_min)
    at_max = pair_rates(z, m, beta_max)
    assert at_min[0] == pytest.approx(params.R0_min, rel=1e-9)
    assert at_max[1] == pytest.approx(params.R1_min, rel=1e-9)


def test_beta_bounds_infeasible_when_wireless_too_weak(params):
    # z below 2^R1_min - 1 leaves no beta meeting the wireless floor
    with pytest.raises(InfeasibleError) as err:
        beta_bounds(G_WIRED, 1e-12, params)
    assert err.value.constraint == "power-split"


def test_beta_bounds_rejects_nonpositive_gains(params):
    with pytest.raises(ValueError):
        beta_bounds(0.0, G_WIRELESS, params)


@settings(max_examples=80, deadline=None)
@given(gains=gains, scale=st.floats(min_value=1.1, max_value=100.0))
def test_beta_window_monotone_in_wireless_gain(gains, scale):
    """A stronger wireless channel relaxes its floor: beta_max increases."""
    params = SystemParams()
    g0, g1 = gains
    m, z1 = snr_scales(g0, g1, params)
    _, z2 = snr_scales(g0, g1 * scale, params)
    _, hi1 = beta_bounds_arrays(z1, m, params)
    _, hi2 = beta_bounds_arrays(z2, m, params)
    assert hi2 > hi1


@settings(max_examples=80, deadline=None)
@given(gains=gains, scale=st.floats(min_value=1.1, max_value=100.0))
def test_beta_floor_monotone_in_wired_gain(gains, scale):
    """A weaker wired channel needs a larger share: beta_min increases."""
    params = SystemParams()
    g0, g1 = gains
    m1, z = snr_scales(g0, g1, params)
    m2, _ = snr_scales(g0 / scale, g1, params)
    lo1, _ = beta_bounds_arrays(z, m1, params)
    lo2, _ = beta_bounds_arrays(z, m2, params)
    assert lo2 > lo1


def test_optimal_beta_is_capped_upper_end(params):
    assert optimal_beta(G_WIRED, G_WIRELESS, params) == pytest.approx(0.4995)
    # with a huge wireless gain the cap at one half binds instead
    strong = optimal_beta(G_WIRED, 1e-3, params)
    assert strong == pytest.approx(0.5)


def test_optimal_beta_requires_wired_stronger(params):
    with pytest.raises(InfeasibleError) as err:
        optimal_beta(1e-9, 1e-3, params)
    assert err.value.constraint == "sic-order"


@settings(max_examples=60, deadline=None)
@given(
    m=st.floats(min_value=10.0, max_value=1e10),
    ratio=st.floats(min_value=1.0, max_value=1e6),
    beta_pair=st.tuples(
        st.floats(min_value=0.0, max_value=0.5),
        st.floats(min_value=0.0, max_value=0.5),
    ),
)
def test_sum_rate_monotone_in_beta_under_strong_wired(m, ratio, beta_pair):
    """With m >= z, the slot sum rate never decreases as beta grows."""
    z = m / ratio
    lo, hi = sorted(beta_pair)
    sum_lo = sum(pair_rates(z, m, lo))
    sum_hi = sum(pair_rates(z, m, hi))
    assert sum_hi >= sum_lo - 1e-9


def test_optimal_beta_beats_feasible_grid(params):
    """No feasible beta on a dense grid outscores the closed form."""
    best = optimal_beta(G_WIRED, G_WIRELESS, params)
    m, z = snr_scales(G_WIRED, G_WIRELESS, params)
    best_sum = sum(pair_rates(z, m, best))
    beta_min, beta_max = beta_bounds(G_WIRED, G_WIRELESS, params)
    grid = np.linspace(beta_min, min(beta_max, 0.5), 4001)
    sums = np.add(*pair_rates(z, m, grid))
    assert best_sum >= np.max(sums) - 1e-9


def test_weighted_beta_matches_grid_argmax():
    """The closed-form weighted split agrees with a dense grid argmax."""
    params = SystemParams()  # w_k > w0, the stationary-point branch
    m, z = snr_scales(G_WIRED, G_WIRELESS, params)
    beta = float(weighted_beta_arrays(np.array(z), np.array(m), params))
    assert beta == pytest.approx(0.0024999996499999993, rel=1e-9)

    grid = np.linspace(BETA_FLOOR, 0.4995, 200_001)
    rate_wired, rate_wireless = pair_rates(z, m, grid)
    utility = params.w0 * rate_wired + params.w_k * rate_wireless
    assert beta == pytest.approx(grid[int(np.argmax(utility))], abs=3e-6)

    want = params.w0 * math.log2(1 + m * beta) + params.w_k * math.log2(
        1 + z * (1 - beta) / (z * beta + 1)
    )
    assert want >= float(np.max(utility)) - 1e-9


def test_weighted_beta_equal_weights_reduces_to_sum_rate():
    beta_sum = optimal_beta(G_WIRED, G_WIRELESS, P2U)
    beta_weighted = weighted_optimal_beta(G_WIRED, G_WIRELESS, P2U)
    assert beta_weighted == pytest.approx(beta_sum, rel=1e-12)


def test_weighted_beta_respects_floor_when_wired_dominates():
    # with comparable gains and a heavy wireless weight the stationary
    # point is nonpositive, so the wired QoS floor binds
    params = SystemParams(w0=0.01, w_k=0.99)
    g0, g1 = 2e-8, 1e-8
    m, z = snr_scales(g0, g1, params)
    assert params.w0 * m - params.w_k * z < 0
    beta = weighted_optimal_beta(g0, g1, params)
    beta_min, _ = beta_bounds(g0, g1, params)
    assert beta == pytest.approx(max(beta_min, BETA_FLOOR))


def test_weighted_beta_nan_and_raise_on_infeasible(params):
    out = weighted_beta_arrays(np.array([1e-3]), np.array([1e10]), params)
    assert np.isnan(out[0])
    with pytest.raises(InfeasibleError) as err:
        weighted_optimal_beta(G_WIRED, 1e-12, params)
    assert err.value.constraint == "power-split"


def test_noma_pair_rates_match_slot_convention(params):
    """The generic decoding-order helper reproduces the slot formulas."""
    beta = 0.3
    m, z = snr_scales(G_WIRED, G_WIRELESS, params)
    rate_first, rate_second, sic_ok = noma_pair_rates(
        gain_first=G_WIRELESS,
        gain_second=G_WIRED,
        p_first=(1 - beta) * params.P_max,
        p_second=beta * params.P_max,
        sigma2=params.sigma2,
    )
    rate_wired, rate_wireless = pair_rates(z, m, beta)
    assert rate_second == pytest.approx(float(rate_wired))
    assert rate_first == pytest.approx(float(rate_wireless))
    assert sic_ok


def test_noma_pair_rates_flags_bad_order(params):
    # ordering reversed: the "second" user is the weaker one and cannot
    # decode the first user's stream at its required rate
    _, _, sic_ok = noma_pair_rates(
        gain_first=G_WIRED,
        gain_second=G_WIRELESS,
        p_first=0.03,
        p_second=0.07,
        sigma2=params.sigma2,
    )
    assert not sic_ok
