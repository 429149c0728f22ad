"""Structured neural vector field: d subnetworks with groupable input columns.

Each output coordinate ``j`` is produced by its own feed-forward network.  The
weights of subnetwork ``j`` that multiply input coordinate ``k`` form the
group ``(k, j)``; the Euclidean norms of these groups are the candidate-edge
scores of the dependency graph, and zeroing a group makes output ``j``
bitwise invariant to input ``k``.

Layout of subnetwork ``j`` with hidden width ``h``:

    z1 = x @ W_in[j] + b_in[j]            W_in[j]: (d, h)
    s  = act(z1)
    z  = s @ W_m[j] + b_m[j]  (per middle layer m)   W_m[j]: (h, h)
    f_j(x) = act(z_last) @ W_out[j]       W_out[j]: (h,)

Biases follow every weight matrix except the output one, and the output layer
has no activation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

_ACTIVATIONS = ("tanh", "softplus", "elu")


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    if name == "softplus":
        return np.logaddexp(0.0, z)
    if name == "elu":
        return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))
    raise ValueError(f"unknown activation {name!r}")


def _act_deriv(name: str, s: np.ndarray) -> np.ndarray:
    """Activation derivative recovered from the activation value alone.

    tanh' = 1 - s^2; softplus' = sigmoid(z) = 1 - exp(-s); elu' is 1 on the
    positive branch and s + 1 on the negative one (s = exp(z) - 1 there).
    """
    if name == "tanh":
        return 1.0 - s * s
    if name == "softplus":
        return 1.0 - np.exp(-s)
    if name == "elu":
        return np.where(s > 0, 1.0, s + 1.0)
    raise ValueError(f"unknown activation {name!r}")


@dataclass(frozen=True)
class StructuredMLP:
    """Immutable parameter bundle for the d-subnetwork vector field.

    Arrays are never mutated in place; every update constructs a new instance.
    """

    input_weights: np.ndarray          # (d, d, h), [j, k, :] = weights of input k in subnet j
    input_bias: np.ndarray             # (d, h)
    hidden_weights: tuple              # each (d, h, h)
    hidden_biases: tuple               # each (d, h)
    output_weights: np.ndarray         # (d, h)
    activation: str = "tanh"

    def __post_init__(self):
        d, d_in, h = self.input_weights.shape
        if d != d_in:
            raise ValueError("vector field must map R^d -> R^d")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        for arr in self._arrays():
            if not np.isfinite(arr).all():
                raise ValueError("parameters must be finite")

    # ------------------------------------------------------------------ shape
    @property
    def dim(self) -> int:
        return self.input_weights.shape[0]

    @property
    def width(self) -> int:
        return self.input_weights.shape[2]

    @property
    def n_layers(self) -> int:
        return 2 + len(self.hidden_weights)

    def _arrays(self):
        out = [self.input_weights, self.input_bias]
        for w, b in zip(self.hidden_weights, self.hidden_biases):
            out.extend([w, b])
        out.append(self.output_weights)
        return out

    @property
    def n_params(self) -> int:
        return sum(a.size for a in self._arrays())

    @property
    def input_block_size(self) -> int:
        """Length of the leading flat-vector block holding ``input_weights``."""
        return self.input_weights.size

    # ------------------------------------------------------------ flat vector
    def to_flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self._arrays()])

    def with_flat(self, vec: np.ndarray) -> "StructuredMLP":
        """New field with parameters taken from a flat vector (copied)."""
        if vec.size != self.n_params:
            raise ValueError("flat vector has wrong length")
        pos = 0
        parts = []
        for a in self._arrays():
            parts.append(vec[pos:pos + a.size].reshape(a.shape).copy())
            pos += a.size
        n_hidden = len(self.hidden_weights)
        hw = tuple(parts[2 + 2 * i] for i in range(n_hidden))
        hb = tuple(parts[3 + 2 * i] for i in range(n_hidden))
        return StructuredMLP(
            input_weights=parts[0],
            input_bias=parts[1],
            hidden_weights=hw,
            hidden_biases=hb,
            output_weights=parts[-1],
            activation=self.activation,
        )

    # --------------------------------------------------------------- forward
    def _packed_input(self) -> np.ndarray:
        """Input weights reshaped ``(d_in, d_out * h)`` so the first layer is
        one GEMM; cached per (immutable) instance."""
        cached = getattr(self, "_packed", None)
        if cached is None:
            d, _, h = self.input_weights.shape
            cached = np.ascontiguousarray(
                self.input_weights.transpose(1, 0, 2).reshape(d, d * h)
            )
            object.__setattr__(self, "_packed", cached)
        return cached

    def forward_with_activations(self, xb: np.ndarray):
        """Batch forward pass returning the output and per-layer activations.

        The activation list is what :meth:`vjp` needs to run its backward
        sweep without recomputing the forward pass (solver steps record it).
        """
        d, h = self.dim, self.width
        s = _act(self.activation,
                 (xb @ self._packed_input()).reshape(-1, d, h) + self.input_bias)
        acts = [s]
        for w, b in zip(self.hidden_weights, self.hidden_biases):
            # (j, B, h) @ (j, h, g) batched over the subnetwork axis
            s = _act(self.activation,
                     np.matmul(s.transpose(1, 0, 2), w).transpose(1, 0, 2) + b)
            acts.append(s)
        return (s * self.output_weights).sum(axis=2), acts

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the drift; accepts ``(d,)`` or a batch ``(B, d)``."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        out, _ = self.forward_with_activations(x[None, :] if single else x)
        return out[0] if single else out

    def vjp(self, x: np.ndarray, cot: np.ndarray, acts: list | None = None):
        """Reverse-mode product: cotangents of ``<cot, f(x)>``.

        Args:
            x: states, ``(d,)`` or a batch ``(B, d)``.
            cot: output cotangent(s), same shape as ``f(x)``.
            acts: optional per-layer activations from
                :meth:`forward_with_activations` at the same ``x``; when
                omitted the forward pass is recomputed.

        Returns:
            ``(state_cotangent, flat_param_cotangent)``; the parameter part is
            summed over the batch.
        """
        x = np.asarray(x, dtype=float)
        cot = np.asarray(cot, dtype=float)
        single = x.ndim == 1
        xb = x[None, :] if single else x
        cb = cot[None, :] if single else cot
        d, h = self.dim, self.width

        if acts is None:
            _, acts = self.forward_with_activations(xb)

        g_out = (acts[-1] * cb[:, :, None]).sum(axis=0)
        ds = self.output_weights * cb[:, :, None]

        g_hidden_w, g_hidden_b = [], []
        for m in range(len(self.hidden_weights) - 1, -1, -1):
            dz = ds * _act_deriv(self.activation, acts[m + 1])
            g_hidden_w.append(np.matmul(acts[m].transpose(1, 2, 0), dz.transpose(1, 0, 2)))
            g_hidden_b.append(dz.sum(axis=0))
            ds = np.matmul(dz.transpose(1, 0, 2),
                           self.hidden_weights[m].transpose(0, 2, 1)).transpose(1, 0, 2)
        g_hidden_w.reverse()
        g_hidden_b.reverse()

        dz = ds * _act_deriv(self.activation, acts[0])
        dz_flat = dz.reshape(-1, d * h)
        g_in = (xb.T @ dz_flat).reshape(d, d, h).transpose(1, 0, 2)
        g_in_b = dz.sum(axis=0)
        dx = dz_flat @ self._packed_input().T

        flat = [g_in.ravel(), g_in_b.ravel()]
        for w, b in zip(g_hidden_w, g_hidden_b):
            flat.extend([w.ravel(), b.ravel()])
        flat.append(g_out.ravel())
        grad = np.concatenate(flat)
        return (dx[0] if single else dx), grad

    # ----------------------------------------------------------- structure
    def input_column_norms(self) -> np.ndarray:
        """Edge-score matrix: ``scores[k, j] = ||group (k, j)||_2``.

        A score is zero iff every weight in the group is exactly zero; groups
        whose sum of squares underflows fall back to the max absolute entry so
        the exact-zero contract survives subnormal weights.
        """
        sq = np.einsum("jkh,jkh->jk", self.input_weights, self.input_weights)
        norms = np.sqrt(sq)
        nonzero = (self.input_weights != 0.0).any(axis=2)
        under = nonzero & (norms == 0.0)
        if under.any():
            norms = np.where(under, np.abs(self.input_weights).max(axis=2), norms)
        return norms.T.copy()

    def zero_column(self, j: int, k: int) -> "StructuredMLP":
        """Copy of the field with group ``(k, j)`` set exactly to zero.

        Output ``j`` of the result is bitwise invariant to input ``k``.
        Indices are 0-based.
        """
        d = self.dim
        if not (0 <= j < d and 0 <= k < d):
            raise IndexError(f"(j={j}, k={k}) outside 0..{d - 1}")
        w = self.input_weights.copy()
        w[j, k, :] = 0.0
        return replace(self, input_weights=w)

    def with_input_weights(self, w: np.ndarray) -> "StructuredMLP":
        if w.shape != self.input_weights.shape:
            raise ValueError("input weight shape mismatch")
        return replace(self, input_weights=w)

    # -------------------------------------------------------- construction
    @classmethod
    def random(
        cls,
        dim: int,
        width: int = 10,
        hidden_layers: int = 1,
        activation: str = "tanh",
        rng: np.random.Generator | None = None,
        scale: str = "fan-in",
    ) -> "StructuredMLP":
        """Seeded random initialization.

        ``scale="fan-in"`` draws weights N(0, 1/fan_in) with zero biases;
        ``scale="unit"`` draws all weights and biases from N(0, 1).
        ``hidden_layers`` counts activation layers, so 1 gives the default
        two-weight-matrix architecture.
        """
        if hidden_layers < 1:
            raise ValueError("need at least one hidden layer")
        if rng is None:
            rng = np.random.default_rng(0)
        unit = scale == "unit"
        if not unit and scale != "fan-in":
            raise ValueError(f"unknown scale {scale!r}")

        def w(shape, fan_in):
            sd = 1.0 if unit else 1.0 / np.sqrt(fan_in)
            return sd * rng.standard_normal(shape)

        def b(shape):
            return rng.standard_normal(shape) if unit else np.zeros(shape)

        hw, hb = [], []
        in_w = w((dim, dim, width), dim)
        in_b = b((dim, width))
        for _ in range(hidden_layers - 1):
            hw.append(w((dim, width, width), width))
            hb.append(b((dim, width)))
        out_w = w((dim, width), width)
        return cls(
            input_weights=in_w,
            input_bias=in_b,
            hidden_weights=tuple(hw),
            hidden_biases=tuple(hb),
            output_weights=out_w,
            activation=activation,
        )

    @classmethod
    def zeros(cls, dim: int, width: int = 10, hidden_layers: int = 1, activation: str = "tanh"):
        rng = np.random.default_rng(0)
        f = cls.random(dim, width, hidden_layers, activation, rng)
        return f.with_flat(np.zeros(f.n_params))


# ------------------------------------------------------------- serialization

FIELD_FORMAT = "ctgraph-field-v1"


def save_field(path, f: StructuredMLP) -> None:
    """Write a field to a self-describing JSON parameter file."""
    doc = {
        "format": FIELD_FORMAT,
        "dim": f.dim,
        "width": f.width,
        "hidden_layers": len(f.hidden_weights) + 1,
        "activation": f.activation,
        "input_weights": f.input_weights.tolist(),
        "input_bias": f.input_bias.tolist(),
        "hidden_weights": [w.tolist() for w in f.hidden_weights],
        "hidden_biases": [b.tolist() for b in f.hidden_biases],
        "output_weights": f.output_weights.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_field(path) -> StructuredMLP:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FIELD_FORMAT:
        raise ValueError(f"not a {FIELD_FORMAT} file: {path}")
    return StructuredMLP(
        input_weights=np.asarray(doc["input_weights"], dtype=float),
        input_bias=np.asarray(doc["input_bias"], dtype=float),
        hidden_weights=tuple(np.asarray(w, dtype=float) for w in doc["hidden_weights"]),
        hidden_biases=tuple(np.asarray(b, dtype=float) for b in doc["hidden_biases"]),
        output_weights=np.asarray(doc["output_weights"], dtype=float),
        activation=doc["activation"],
    )
