"""Tandem network: forward predictor, inverse generator, and training.

The forward network maps 17-dim design vectors to 11-dim performance
vectors through three ReLU hidden layers of width 64 and a linear output
head.  The inverse network mirrors it (11 -> 64 -> 64 -> 64 -> 17) with
a constrained head: sigmoid over the eleven normalized scalar slots and
softmax over the six-wide material block, so every generated design
vector is valid by construction.

Training is two-stage.  The forward network first learns the
design-to-performance map under a squared error whose per-coefficient
weights come from the PCA explained variances.  It is then frozen, and
the inverse network trains through it on performance error, optionally
pulled toward the known dataset designs by an unweighted L2 term with
relative weight alpha.

Everything is plain numpy with analytic gradients; given a seed,
training is bit-reproducible on the same platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .pca import PcaModel
from .splits import SplitSpec, split_indices

HEAD_LINEAR = "linear"
HEAD_SOFTMAX_SIGMOID = "softmax_sigmoid"

FORWARD_DIMS = (17, 64, 64, 64, 11)
INVERSE_DIMS = (11, 64, 64, 64, 17)

#: Leading inverse-head outputs squashed by sigmoid; the rest form the
#: softmax material block.
SIGMOID_SLOTS = 11

SERIALIZATION_VERSION = 1


@dataclass
class Mlp:
    """Dense network: weights[l] has shape (dims[l], dims[l+1])."""

    dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    head: str

    def copy(self) -> "Mlp":
        return Mlp(
            dims=self.dims,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            head=self.head,
        )


@dataclass(frozen=True)
class LossWeights:
    """Per-slot error weights: explained-variance fractions, then 1."""

    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        if (self.w < 0.0).any():
            raise ValueError("loss weights must be nonnegative")


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    weight_decay: float = 1.0
    batch_size: int = 16
    max_epochs: int = 500
    patience: int = 50
    alpha: float = 1.0
    seed: int = 0
    split: tuple[float, float, float] = (0.80, 0.10, 0.10)
    loss_mode: str = "elementwise"  # or "dot": square the weighted residual sum
    decay_mode: str = "decoupled"  # or "coupled": fold decay into the gradient

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.max_epochs <= 0:
            raise ValueError("learning_rate, batch_size, max_epochs must be positive")
        if self.patience <= 0:
            raise ValueError("patience must be positive")
        if self.weight_decay < 0 or self.alpha < 0:
            raise ValueError("weight_decay and alpha must be nonnegative")
        if self.loss_mode not in ("elementwise", "dot"):
            raise ValueError(f"unknown loss_mode {self.loss_mode!r}")
        if self.decay_mode not in ("decoupled", "coupled"):
            raise ValueError(f"unknown decay_mode {self.decay_mode!r}")

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)

    def with_alpha(self, alpha: float) -> "TrainConfig":
        return replace(self, alpha=alpha)


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = np.inf
    epochs_run: int = 0


@dataclass
class AdamState:
    """Moment accumulators; one slot per trainable array."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def loss_weights_from_pca(model: PcaModel) -> LossWeights:
    """Coefficient weights lambda_j / sum(lambda), displacement weight 1."""
    lam = model.eigenvalues
    total = lam.sum()
    if total <= 0.0:
        raise ValueError("PCA eigenvalues sum to zero; cannot form loss weights")
    return LossWeights(w=np.concatenate([lam / total, [1.0]]))


def init_mlp(dims, head: str, rng: np.random.Generator) -> Mlp:
    """Kaiming-style uniform fan-in initialization, zero biases."""
    dims = tuple(int(d) for d in dims)
    if head not in (HEAD_LINEAR, HEAD_SOFTMAX_SIGMOID):
        raise ValueError(f"unknown head {head!r}")
    weights = []
    biases = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Mlp(dims=dims, weights=weights, biases=biases, head=head)


def new_forward_net(seed_rng: np.random.Generator) -> Mlp:
    return init_mlp(FORWARD_DIMS, HEAD_LINEAR, seed_rng)


def new_inverse_net(seed_rng: np.random.Generator) -> Mlp:
    return init_mlp(INVERSE_DIMS, HEAD_SOFTMAX_SIGMOID, seed_rng)


def param_count(net: Mlp) -> int:
    return sum(w.size + b.size for w, b in zip(net.weights, net.biases))


def _apply_head(head: str, z: np.ndarray) -> np.ndarray:
    if head == HEAD_LINEAR:
        return z
    y = np.empty_like(z)
    y[:, :SIGMOID_SLOTS] = expit(z[:, :SIGMOID_SLOTS])
    block = z[:, SIGMOID_SLOTS:]
    shifted = block - block.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    y[:, SIGMOID_SLOTS:] = e / e.sum(axis=1, keepdims=True)
    return y


def _head_backward(head: str, y: np.ndarray, gout: np.ndarray) -> np.ndarray:
    if head == HEAD_LINEAR:
        return gout
    gz = np.empty_like(gout)
    sig = y[:, :SIGMOID_SLOTS]
    gz[:, :SIGMOID_SLOTS] = gout[:, :SIGMOID_SLOTS] * sig * (1.0 - sig)
    soft = y[:, SIGMOID_SLOTS:]
    gs = gout[:, SIGMOID_SLOTS:]
    gz[:, SIGMOID_SLOTS:] = soft * (gs - (gs * soft).sum(axis=1, keepdims=True))
    return gz


def _forward_cached(net: Mlp, x: np.ndarray):
    """Forward pass keeping the per-layer activations for backprop."""
    activations = [x]
    a = x
    last = len(net.weights) - 1
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        a = z if layer == last else np.maximum(z, 0.0)
        activations.append(a)
    out = _apply_head(net.head, a)
    return out, activations


def forward_pass(net: Mlp, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on a vector or a batch of row vectors."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.shape[1] != net.dims[0]:
        raise ValueError(
            f"input width {arr.shape[1]} does not match network input {net.dims[0]}"
        )
    out, _ = _forward_cached(net, arr)
    return out[0] if single else out


def _backward(
    net: Mlp,
    activations: list[np.ndarray],
    head_out: np.ndarray,
    gout: np.ndarray,
    need_param_grads: bool = True,
    need_input_grad: bool = False,
):
    """Reverse-mode pass.  ReLU subgradient at exactly 0 is taken as 0."""
    delta = _head_backward(net.head, head_out, gout)
    grads_w = [None] * len(net.weights) if need_param_grads else None
    grads_b = [None] * len(net.biases) if need_param_grads else None
    for layer in range(len(net.weights) - 1, -1, -1):
        a_prev = activations[layer]
        if need_param_grads:
            grads_w[layer] = a_prev.T @ delta
            grads_b[layer] = delta.sum(axis=0)
        if layer > 0 or need_input_grad:
            delta = delta @ net.weights[layer].T
            if layer > 0:
                delta = delta * (activations[layer] > 0.0)
    input_grad = delta if need_input_grad else None
    if need_param_grads:
        return grads_w, grads_b, input_grad
    return None, None, input_grad


def loss_forward(
    pred: np.ndarray,
    target: np.ndarray,
    weights: LossWeights,
    mode: str = "elementwise",
) -> float:
    """Weighted squared error between performance vectors, batch mean.

    ``elementwise`` squares each weighted residual before summing, so
    signed errors cannot cancel; ``dot`` squares the weighted residual
    sum instead (the literal inner-product reading).
    """
    value, _ = _loss_forward_grad(
        np.atleast_2d(pred), np.atleast_2d(target), weights, mode
    )
    return value


def _loss_forward_grad(pred, target, weights, mode):
    n = pred.shape[0]
    delta = target - pred
    w = weights.w
    if mode == "elementwise":
        value = float(((w * delta) ** 2).sum() / n)
        grad = -2.0 * (w**2) * delta / n
    elif mode == "dot":
        s = delta @ w
        value = float((s**2).sum() / n)
        grad = -2.0 * s[:, None] * w[None, :] / n
    else:
        raise ValueError(f"unknown loss mode {mode!r}")
    return value, grad


def _loss_design_grad(pred, target):
    """Unweighted MSE over all 17 entries; batch mean."""
    n, dim = pred.shape
    delta = target - pred
    value = float((delta**2).sum() / (n * dim))
    grad = -2.0 * delta / (n * dim)
    return value, grad


def loss_inverse(
    batch_designs: np.ndarray,
    batch_performances: np.ndarray,
    fwd: Mlp,
    inv: Mlp,
    weights: LossWeights,
    alpha: float,
    mode: str = "elementwise",
) -> float:
    """Tandem objective: performance error through the frozen forward
    net, plus alpha times the design proximity term."""
    d = np.atleast_2d(batch_designs)
    p = np.atleast_2d(batch_performances)
    d_hat = forward_pass(inv, p)
    p_hat = forward_pass(fwd, d_hat)
    l_p, _ = _loss_forward_grad(p_hat, p, weights, mode)
    l_d, _ = _loss_design_grad(d_hat, d)
    return l_p + alpha * l_d


def forward_gradients(
    net: Mlp,
    batch_designs: np.ndarray,
    batch_performances: np.ndarray,
    weights: LossWeights,
    mode: str = "elementwise",
):
    """Loss and analytic parameter gradients for the forward stage."""
    d = np.atleast_2d(batch_designs)
    p = np.atleast_2d(batch_performances)
    pred, acts = _forward_cached(net, d)
    value, gout = _loss_forward_grad(pred, p, weights, mode)
    grads_w, grads_b, _ = _backward(net, acts, pred, gout)
    return value, grads_w, grads_b


def inverse_gradients(
    inv: Mlp,
    fwd: Mlp,
    batch_designs: np.ndarray,
    batch_performances: np.ndarray,
    weights: LossWeights,
    alpha: float,
    mode: str = "elementwise",
):
    """Loss and analytic gradients for the inverse stage.

    The forward network is frozen: its parameters receive no gradient;
    it only routes the performance error back to the inverse output.
    """
    d = np.atleast_2d(batch_designs)
    p = np.atleast_2d(batch_performances)
    d_hat, acts_i = _forward_cached(inv, p)
    p_hat, acts_f = _forward_cached(fwd, d_hat)
    l_p, g_phat = _loss_forward_grad(p_hat, p, weights, mode)
    _, _, g_dhat = _backward(
        fwd, acts_f, p_hat, g_phat, need_param_grads=False, need_input_grad=True
    )
    l_d, g_design = _loss_design_grad(d_hat, d)
    gout = g_dhat + alpha * g_design
    grads_w, grads_b, _ = _backward(inv, acts_i, d_hat, gout)
    return l_p + alpha * l_d, grads_w, grads_b


def init_adam(net: Mlp) -> AdamState:
    arrays = net.weights + net.biases
    return AdamState(
        m=[np.zeros_like(a) for a in arrays],
        v=[np.zeros_like(a) for a in arrays],
    )


def adam_step(
    net: Mlp,
    grads_w: list[np.ndarray],
    grads_b: list[np.ndarray],
    state: AdamState,
    lr: float,
    weight_decay: float = 0.0,
    decay_mode: str = "decoupled",
) -> None:
    """One Adam update in place.  Biases are exempt from weight decay.

    Decay defaults to the decoupled form (applied directly to the
    parameters, scaled by the learning rate) so that a large decay
    cannot distort the adaptive gradient scaling; ``coupled`` folds
    ``decay * theta`` into the gradient before the moment updates.
    """
    state.step += 1
    t = state.step
    arrays = net.weights + net.biases
    grads = list(grads_w) + list(grads_b)
    n_weights = len(net.weights)
    for k, (theta, g) in enumerate(zip(arrays, grads)):
        decays = weight_decay > 0.0 and k < n_weights
        if decays and decay_mode == "coupled":
            g = g + weight_decay * theta
        state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g
        state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g**2
        m_hat = state.m[k] / (1.0 - state.beta1**t)
        v_hat = state.v[k] / (1.0 - state.beta2**t)
        update = m_hat / (np.sqrt(v_hat) + state.eps)
        if decays and decay_mode == "decoupled":
            update = update + weight_decay * theta
        theta -= lr * update


def _epoch_batches(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def _train(
    net: Mlp,
    loss_grad_fn,
    loss_fn,
    train_data: tuple[np.ndarray, np.ndarray],
    val_data: tuple[np.ndarray, np.ndarray],
    config: TrainConfig,
    shuffle_rng: np.random.Generator,
) -> TrainHistory:
    d_train, p_train = train_data
    n = len(d_train)
    state = init_adam(net)
    history = TrainHistory()
    best = None
    stale = 0
    for epoch in range(config.max_epochs):
        total = 0.0
        for idx in _epoch_batches(n, config.batch_size, shuffle_rng):
            value, gw, gb = loss_grad_fn(net, d_train[idx], p_train[idx])
            adam_step(
                net,
                gw,
                gb,
                state,
                config.learning_rate,
                config.weight_decay,
                config.decay_mode,
            )
            total += value * len(idx)
        history.train_loss.append(total / n)
        val = loss_fn(net, *val_data)
        history.val_loss.append(val)
        history.epochs_run = epoch + 1
        if val < history.best_val_loss:
            history.best_val_loss = val
            history.best_epoch = epoch
            best = net.copy()
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    if best is not None:
        net.weights = best.weights
        net.biases = best.biases
    return history


def train_forward(
    design_vectors: np.ndarray,
    performance_vectors: np.ndarray,
    weights: LossWeights,
    config: TrainConfig,
) -> tuple[Mlp, TrainHistory]:
    """Stage 1: train the forward predictor with early stopping.

    Splits the data per ``config.split``/``config.seed``, runs
    mini-batch Adam, checkpoints the best-validation weights, and stops
    after ``config.patience`` epochs without improvement (capped at
    ``config.max_epochs``).  Fully deterministic given the seed.
    """
    d, p, splits = _prepare(design_vectors, performance_vectors, config)
    train_idx, val_idx, _ = splits
    net = new_forward_net(np.random.default_rng([config.seed, 1]))
    shuffle_rng = np.random.default_rng([config.seed, 2])

    def loss_grad(n_, bd, bp):
        return forward_gradients(n_, bd, bp, weights, config.loss_mode)

    def loss(n_, bd, bp):
        return loss_forward(forward_pass(n_, bd), bp, weights, config.loss_mode)

    history = _train(
        net,
        loss_grad,
        loss,
        (d[train_idx], p[train_idx]),
        (d[val_idx], p[val_idx]),
        config,
        shuffle_rng,
    )
    return net, history


def train_inverse(
    design_vectors: np.ndarray,
    performance_vectors: np.ndarray,
    weights: LossWeights,
    fwd: Mlp,
    config: TrainConfig,
) -> tuple[Mlp, TrainHistory]:
    """Stage 2: freeze the forward net and train the inverse generator.

    Uses the same seeded split as stage 1.  The forward parameters are
    never written to; the caller can hash them to confirm.
    """
    if tuple(fwd.dims) != FORWARD_DIMS or fwd.head != HEAD_LINEAR:
        raise ValueError(
            f"forward network architecture mismatch: dims={fwd.dims}, head={fwd.head!r}"
        )
    d, p, splits = _prepare(design_vectors, performance_vectors, config)
    train_idx, val_idx, _ = splits
    inv = new_inverse_net(np.random.default_rng([config.seed, 3]))
    shuffle_rng = np.random.default_rng([config.seed, 4])

    def loss_grad(n_, bd, bp):
        return inverse_gradients(
            n_, fwd, bd, bp, weights, config.alpha, config.loss_mode
        )

    def loss(n_, bd, bp):
        return loss_inverse(bd, bp, fwd, n_, weights, config.alpha, config.loss_mode)

    history = _train(
        inv,
        loss_grad,
        loss,
        (d[train_idx], p[train_idx]),
        (d[val_idx], p[val_idx]),
        config,
        shuffle_rng,
    )
    return inv, history


def _prepare(design_vectors, performance_vectors, config: TrainConfig):
    d = np.asarray(design_vectors, dtype=float)
    p = np.asarray(performance_vectors, dtype=float)
    if len(d) != len(p):
        raise ValueError("design and performance arrays must align")
    splits = split_indices(len(d), SplitSpec(seed=config.seed, fractions=config.split))
    if len(splits[0]) == 0 or len(splits[1]) == 0:
        raise ValueError("empty train or validation split")
    return d, p, splits


def net_to_dict(net: Mlp, metadata: dict | None = None) -> dict:
    """Versioned JSON-ready form: flat weight/bias arrays per layer."""
    return {
        "version": SERIALIZATION_VERSION,
        "architecture": list(net.dims),
        "head": net.head,
        "layers": [
            {"weights": w.ravel().tolist(), "biases": b.tolist()}
            for w, b in zip(net.weights, net.biases)
        ],
        "metadata": metadata or {},
    }


def net_from_dict(doc: dict) -> Mlp:
    version = doc.get("version")
    if version != SERIALIZATION_VERSION:
        raise ValueError(
            f"unsupported network version {version!r}; "
            f"this build reads version {SERIALIZATION_VERSION}"
        )
    dims = tuple(int(d) for d in doc["architecture"])
    head = doc["head"]
    weights = []
    biases = []
    for (fan_in, fan_out), layer in zip(zip(dims[:-1], dims[1:]), doc["layers"]):
        w = np.array(layer["weights"], dtype=float).reshape(fan_in, fan_out)
        b = np.array(layer["biases"], dtype=float)
        if b.shape != (fan_out,):
            raise ValueError("bias shape does not match architecture")
        weights.append(w)
        biases.append(b)
    if len(weights) != len(dims) - 1:
        raise ValueError("layer count does not match architecture")
    return Mlp(dims=dims, weights=weights, biases=biases, head=head)


def net_fingerprint(net: Mlp) -> str:
    """Stable hash of all parameters (for freeze/reproducibility checks)."""
    import hashlib

    h = hashlib.sha256()
    for arr in net.weights + net.biases:
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()
