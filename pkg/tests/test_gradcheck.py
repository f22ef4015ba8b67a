"""Finite-difference checks of the hand-written reverse pass."""

import numpy as np
import pytest

from steelinv.nncore import LossKind, OutputMode, grad_check, init_mlp, use_kernel


@pytest.mark.parametrize("hidden", [4, 8, 16])
@pytest.mark.parametrize("mode", [OutputMode.LINEAR, OutputMode.SIGMOID])
def test_random_nets(hidden, mode):
    rng = np.random.default_rng(hidden)
    for seed in range(3):
        net = init_mlp(3, hidden, 2, seed=seed, output_mode=mode)
        x = rng.uniform(-1.0, 1.0, size=(4, 3))
        assert grad_check(net, x, LossKind.MSE) < 1e-4


def test_sum_loss():
    net = init_mlp(2, 8, 1, seed=11)
    x = np.random.default_rng(0).uniform(size=(3, 2))
    assert grad_check(net, x, "sum") < 1e-4


def test_mse_against_target():
    net = init_mlp(13, 8, 1, seed=12)
    rng = np.random.default_rng(1)
    x = rng.uniform(size=(5, 13))
    target = rng.uniform(size=(5, 1))
    assert grad_check(net, x, LossKind.MSE, target=target) < 1e-4


def test_zero_net_zero_input():
    net = init_mlp(3, 4, 2, seed=0)
    for p in net.parameters():
        p[...] = 0.0
    assert grad_check(net, np.zeros((2, 3))) == 0.0


def test_parameters_restored():
    net = init_mlp(3, 4, 1, seed=2)
    before = net.digest()
    grad_check(net, np.ones((2, 3)))
    assert net.digest() == before


def test_blas_kernel_too():
    net = init_mlp(4, 8, 3, seed=3, output_mode=OutputMode.SIGMOID)
    x = np.random.default_rng(2).uniform(size=(3, 4))
    with use_kernel("blas"):
        assert grad_check(net, x) < 1e-4
