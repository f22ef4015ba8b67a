"""Residual-ELU multilayer perceptron with hand-written reverse mode.

Topology is fixed: an input projection to width ``h`` (no activation), three
``h x h`` blocks ``z -> z + elu(W z + b)``, and a head to the output width.
The head is either linear or passed through the logistic function.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import ContractError, DimensionError, FrozenTeacherError
from ..utils.digest import array_digest
from .ops import as_matrix, batch_outer, column_sums, elu_array, elu_derivative, matmul, sigmoid

N_HIDDEN = 3

_net_ids = itertools.count(1)


class OutputMode(Enum):
    """Activation applied after the head layer."""
    LINEAR = "linear"
    SIGMOID = "sigmoid"


@dataclass(eq=False)
class LinearLayer:
    """One dense layer; ``weight`` is (out x in)."""
    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[0],):
            raise DimensionError(
                f"layer shapes inconsistent: weight {self.weight.shape}, bias {self.bias.shape}"
            )

    @property
    def in_width(self) -> int:
        return self.weight.shape[1]

    @property
    def out_width(self) -> int:
        return self.weight.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return matmul(x, self.weight.T) + self.bias

    def copy(self) -> "LinearLayer":
        return LinearLayer(self.weight.copy(), self.bias.copy())


@dataclass(eq=False)
class Mlp:
    """Input projection, three residual ELU blocks and a head."""
    input_proj: LinearLayer
    hidden: list[LinearLayer]
    head: LinearLayer
    output_mode: OutputMode = OutputMode.LINEAR
    # Bumped on every in-place parameter update so stale caches are detected.
    version: int = field(default=0, compare=False)
    uid: int = field(default_factory=lambda: next(_net_ids), compare=False, repr=False)
    frozen: bool = field(default=False, compare=False)

    def __post_init__(self):
        if len(self.hidden) != N_HIDDEN:
            raise DimensionError(f"expected {N_HIDDEN} hidden layers, got {len(self.hidden)}")
        h = self.input_proj.out_width
        for i, layer in enumerate(self.hidden):
            if layer.weight.shape != (h, h):
                raise DimensionError(
                    f"hidden.{i}: residual block must be {h}x{h}, got {layer.weight.shape}"
                )
        if self.head.in_width != h:
            raise DimensionError(f"head expects width {self.head.in_width}, hidden width is {h}")

    @property
    def in_width(self) -> int:
        return self.input_proj.in_width

    @property
    def hidden_width(self) -> int:
        return self.input_proj.out_width

    @property
    def out_width(self) -> int:
        return self.head.out_width

    @property
    def widths(self) -> tuple[int, int, int]:
        return (self.in_width, self.hidden_width, self.out_width)

    def layers(self) -> list[tuple[str, LinearLayer]]:
        named = [("input_proj", self.input_proj)]
        named += [(f"hidden.{i}", layer) for i, layer in enumerate(self.hidden)]
        named.append(("head", self.head))
        return named

    def parameters(self) -> list[np.ndarray]:
        """Parameter arrays in canonical order (weight, bias per layer)."""
        params = []
        for _, layer in self.layers():
            params.extend([layer.weight, layer.bias])
        return params

    def parameter_names(self) -> list[str]:
        names = []
        for name, _ in self.layers():
            names.extend([f"{name}.weight", f"{name}.bias"])
        return names

    def n_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def digest(self) -> str:
        return array_digest(self.parameters())

    def freeze(self) -> str:
        """Mark parameters read-only for optimizers; returns the digest at freeze time."""
        self.frozen = True
        return self.digest()

    def copy(self) -> "Mlp":
        return Mlp(
            input_proj=self.input_proj.copy(),
            hidden=[layer.copy() for layer in self.hidden],
            head=self.head.copy(),
            output_mode=self.output_mode,
        )

    def soft_update_from(self, source: "Mlp", tau: float) -> None:
        """Polyak averaging: ``self <- tau * source + (1 - tau) * self``."""
        if self.frozen:
            raise FrozenTeacherError("cannot update a frozen network")
        for target, live in zip(self.parameters(), source.parameters()):
            target *= 1.0 - tau
            target += tau * live
        self.version += 1

    def __call__(self, x) -> np.ndarray:
        return forward(self, x)[0]


@dataclass
class ForwardCache:
    """Activations recorded by ``forward`` for the matching ``backward``."""
    net_uid: int
    net_version: int
    x: np.ndarray
    block_inputs: list[np.ndarray]
    pre_activations: list[np.ndarray]
    head_input: np.ndarray
    y: np.ndarray


@dataclass
class GradientTape:
    """Gradients mirroring an Mlp's parameters, plus the input gradient."""
    grads: list[np.ndarray]
    input_grad: np.ndarray
    names: list[str] = field(default_factory=list)

    def first_non_finite(self) -> Optional[str]:
        for name, g in zip(self.names, self.grads):
            if not np.all(np.isfinite(g)):
                return name
        if not np.all(np.isfinite(self.input_grad)):
            return "input"
        return None


def init_mlp(
    in_width: int,
    hidden_width: int,
    out_width: int,
    seed: int,
    output_mode: OutputMode = OutputMode.LINEAR,
) -> Mlp:
    """Seeded uniform init in +-sqrt(6 / fan_in); biases zero."""
    if min(in_width, hidden_width, out_width) < 1:
        raise ValueError("all widths must be positive")
    rng = np.random.default_rng(seed)

    def layer(fan_in: int, fan_out: int) -> LinearLayer:
        bound = np.sqrt(6.0 / fan_in)
        return LinearLayer(
            weight=rng.uniform(-bound, bound, size=(fan_out, fan_in)),
            bias=np.zeros(fan_out),
        )

    return Mlp(
        input_proj=layer(in_width, hidden_width),
        hidden=[layer(hidden_width, hidden_width) for _ in range(N_HIDDEN)],
        head=layer(hidden_width, out_width),
        output_mode=output_mode,
    )


def forward(net: Mlp, x) -> tuple[np.ndarray, ForwardCache]:
    """Evaluate ``net`` on a batch; returns outputs and the backward cache."""
    x = as_matrix(x, "input")
    if x.shape[1] != net.in_width:
        raise DimensionError(f"input has {x.shape[1]} columns, network expects {net.in_width}")

    z = net.input_proj.apply(x)
    block_inputs, pre_activations = [], []
    for layer in net.hidden:
        a = layer.apply(z)
        block_inputs.append(z)
        pre_activations.append(a)
        z = z + elu_array(a)
    out = net.head.apply(z)
    y = sigmoid(out) if net.output_mode is OutputMode.SIGMOID else out

    cache = ForwardCache(
        net_uid=net.uid,
        net_version=net.version,
        x=x,
        block_inputs=block_inputs,
        pre_activations=pre_activations,
        head_input=z,
        y=y,
    )
    return y, cache


def backward(net: Mlp, cache: ForwardCache, dL_dy: np.ndarray) -> GradientTape:
    """Reverse pass: parameter gradients and the gradient w.r.t. the input."""
    if cache.net_uid != net.uid or cache.net_version != net.version:
        raise ContractError("forward cache does not belong to this network state")
    dL_dy = np.asarray(dL_dy, dtype=np.float64)
    if dL_dy.shape != cache.y.shape:
        raise DimensionError(f"output gradient {dL_dy.shape} does not match output {cache.y.shape}")

    if net.output_mode is OutputMode.SIGMOID:
        d_out = dL_dy * cache.y * (1.0 - cache.y)
    else:
        d_out = dL_dy

    head_w = batch_outer(d_out, cache.head_input)
    head_b = column_sums(d_out)
    dz = matmul(d_out, net.head.weight)

    hidden_grads: list[tuple[np.ndarray, np.ndarray]] = []
    for i in reversed(range(N_HIDDEN)):
        layer = net.hidden[i]
        da = dz * elu_derivative(cache.pre_activations[i])
        hidden_grads.append((batch_outer(da, cache.block_inputs[i]), column_sums(da)))
        dz = dz + matmul(da, layer.weight)
    hidden_grads.reverse()

    proj_w = batch_outer(dz, cache.x)
    proj_b = column_sums(dz)
    input_grad = matmul(dz, net.input_proj.weight)

    grads = [proj_w, proj_b]
    for gw, gb in hidden_grads:
        grads.extend([gw, gb])
    grads.extend([head_w, head_b])
    return GradientTape(grads=grads, input_grad=input_grad, names=net.parameter_names())


def mse(pred, target) -> tuple[float, np.ndarray]:
    """Mean squared error over all entries and its gradient w.r.t. ``pred``."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DimensionError(f"prediction {pred.shape} and target {target.shape} differ")
    diff = pred - target
    n = diff.size
    loss = float(np.sum(diff * diff) / n)
    return loss, 2.0 * diff / n
