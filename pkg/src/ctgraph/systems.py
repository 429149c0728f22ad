"""Benchmark stochastic systems with known dependency graphs, and datasets.

Every system bundles a drift function, a diffusion scale, an initial-state
sampler and the ground-truth adjacency ``truth[k, j] = 1`` iff drift output
``j`` depends on input ``k``.  The stored truth of each shipped system is
validated against a numerical sensitivity oracle (:func:`ground_truth_check`).

Datasets are produced by Euler-Maruyama simulation on a grid finer than the
observation interval (``sim_substeps`` internal steps per interval) and then
subsampled according to the observation scheme.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .exceptions import BadDimensionError, NonFiniteError, TruthMismatchError
from .field import StructuredMLP
from .ode import euler_maruyama
from .training import TimeSeries

# ------------------------------------------------------------------ drifts


@dataclass(frozen=True)
class Lorenz96Drift:
    """Cyclic advection model: ``(x[i+1] - x[i-2]) x[i-1] - x[i] + F``."""

    dim: int
    forcing: float

    def __call__(self, x: np.ndarray) -> np.ndarray:
        xp1 = np.roll(x, -1, axis=-1)
        xm1 = np.roll(x, 1, axis=-1)
        xm2 = np.roll(x, 2, axis=-1)
        return (xp1 - xm2) * xm1 - x + self.forcing


@dataclass(frozen=True)
class RosslerDrift:
    """Generalized hyperchaotic ring.

    First coordinate: ``a x1 - x2``; last coordinate:
    ``eps + b x[d-1] (x[d-2] - q)`` (the classic spiking Roessler variable).
    Middle coordinates couple to their neighbours cyclically:

    * ``linear-ring``: ``x[i-1] - x[i+1]`` (skew chain; neutral rotation core,
      so trajectories stay on a bounded attractor for most draws);
    * ``sine-ring``:   ``sin(x[i-1]) - sin(x[i+2])`` (saturated coupling with
      a shifted second index; the chain loses its skew symmetry and most
      paths ramp away or escape, see ``generate_bounded_dataset``).
    """

    dim: int
    a: float
    eps: float
    b: float
    q: float
    coupling: str = "linear-ring"

    def __post_init__(self):
        if self.coupling not in ("linear-ring", "sine-ring"):
            raise ValueError(f"unknown coupling {self.coupling!r}")

    @property
    def _shift(self) -> int:
        return 1 if self.coupling == "linear-ring" else 2

    def __call__(self, x: np.ndarray) -> np.ndarray:
        d = self.dim
        out = np.empty_like(x)
        out[..., 0] = self.a * x[..., 0] - x[..., 1]
        mid = np.arange(1, d - 1)
        if self.coupling == "linear-ring":
            out[..., mid] = x[..., mid - 1] - x[..., (mid + 1) % d]
        else:
            out[..., mid] = np.sin(x[..., mid - 1]) - np.sin(x[..., (mid + 2) % d])
        out[..., d - 1] = self.eps + self.b * x[..., d - 1] * (x[..., d - 2] - self.q)
        return out


@dataclass(frozen=True)
class GlycolysisDrift:
    """Seven-species yeast glycolysis oscillator.

    The Michaelis-Menten-type flux ``J = 100 x1 x6 / (1 + (x6/0.52)^4)`` is
    shared by the equations for x1, x2 and x6.
    """

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x1, x2, x3, x4 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
        x5, x6, x7 = x[..., 4], x[..., 5], x[..., 6]
        flux = 100.0 * x1 * x6 / (1.0 + (x6 / 0.52) ** 4)
        out = np.empty_like(x)
        out[..., 0] = 2.5 - flux
        out[..., 1] = 2.0 * flux - 6.0 * x2 * (1.0 - x5) - 12.0 * x2 * x5
        out[..., 2] = 6.0 * x2 * (1.0 - x5) - 16.0 * x3 * (4.0 - x6)
        out[..., 3] = 16.0 * x3 * (4.0 - x6) - 100.0 * x4 * x5 - 13.0 * (x4 - x7)
        out[..., 4] = 6.0 * x2 * (1.0 - x5) - 100.0 * x4 * x5 - 12.0 * x2 * x5
        out[..., 5] = -2.0 * flux + 32.0 * x3 * (4.0 - x6) - 1.28 * x6
        out[..., 6] = 1.3 * (x4 - x7) - 1.8 * x7
        return out


# ----------------------------------------------------------- init samplers


@dataclass(frozen=True)
class StandardNormalInit:
    dim: int

    def __call__(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.dim)


@dataclass(frozen=True)
class UniformBoxInit:
    lows: tuple
    highs: tuple

    def __call__(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(np.asarray(self.lows), np.asarray(self.highs))


# ------------------------------------------------------------------ system


@dataclass(frozen=True)
class SdeSystem:
    """Generative model ``dx = f(x) dt + sigma dW`` with known structure."""

    name: str
    dim: int
    drift: object                    # callable (B, d) -> (B, d)
    sigma: float
    init_sampler: object             # callable rng -> (d,)
    truth: np.ndarray                # (d, d) int8, [k, j]
    sim_substeps: int = 10           # EM steps per observation interval
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        t = np.asarray(self.truth, dtype=np.int8)
        if t.shape != (self.dim, self.dim):
            raise ValueError("truth must be (d, d)")
        object.__setattr__(self, "truth", t)


# ----------------------------------------------------------------- factories


def lorenz96(d: int = 10, forcing: float = 10.0, sigma: float = 0.5) -> SdeSystem:
    """Lorenz-96 system; output ``i`` depends on inputs ``{i-2, i-1, i, i+1}`` mod d."""
    if d < 4:
        raise BadDimensionError("lorenz96 needs d >= 4")
    truth = np.zeros((d, d), dtype=np.int8)
    for j in range(d):
        for k in (j - 2, j - 1, j, j + 1):
            truth[k % d, j] = 1
    return SdeSystem(
        name="lorenz96",
        dim=d,
        drift=Lorenz96Drift(d, forcing),
        sigma=sigma,
        init_sampler=StandardNormalInit(d),
        truth=truth,
        params={"d": d, "forcing": forcing, "sigma": sigma},
    )


def rossler_generalized(d: int = 10, a: float = 0.0, eps: float = 0.1,
                        b: float = 4.0, q: float = 2.0, sigma: float = 0.1,
                        coupling: str = "linear-ring") -> SdeSystem:
    """Generalized hyperchaotic ring; self-edge of x1 present only when a != 0.

    ``coupling="linear-ring"`` (default) is the neighbour-difference chain
    whose trajectories stay bounded often enough to sample; ``"sine-ring"``
    is the saturated variant with the second neighbour shifted by one more,
    kept for reference despite its escaping trajectories.
    """
    if d < 4:
        raise BadDimensionError("rossler_generalized needs d >= 4")
    drift = RosslerDrift(d, a, eps, b, q, coupling)
    shift = drift._shift
    truth = np.zeros((d, d), dtype=np.int8)
    if a != 0.0:
        truth[0, 0] = 1
    truth[1, 0] = 1
    for j in range(1, d - 1):
        truth[j - 1, j] = 1
        truth[(j + shift) % d, j] = 1
    if b != 0.0:
        truth[d - 1, d - 1] = 1
        truth[d - 2, d - 1] = 1
    return SdeSystem(
        name="rossler",
        dim=d,
        drift=drift,
        sigma=sigma,
        init_sampler=StandardNormalInit(d),
        truth=truth,
        params={"d": d, "a": a, "eps": eps, "b": b, "q": q, "sigma": sigma,
                "coupling": coupling},
    )


# Initial-condition ranges for the glycolysis benchmark (editable defaults;
# the manifest written next to each dataset records the values actually used).
GLYCOLYSIS_INIT_RANGES = (
    (0.15, 1.60),
    (0.19, 2.16),
    (0.04, 0.20),
    (0.10, 0.35),
    (0.08, 0.30),
    (0.14, 2.67),
    (0.05, 0.10),
)


def glycolysis(sigma: float = 0.01, init_ranges=GLYCOLYSIS_INIT_RANGES) -> SdeSystem:
    """Yeast glycolysis oscillator with uniform initial conditions.

    The drift is stiff relative to the 0.1 observation interval, so the
    simulation grid uses 100 substeps per interval instead of the default 10.
    """
    ranges = tuple((float(lo), float(hi)) for lo, hi in init_ranges)
    if len(ranges) != 7:
        raise BadDimensionError("glycolysis is a 7-species system")
    deps = {
        0: (0, 5),
        1: (0, 1, 4, 5),
        2: (1, 2, 4, 5),
        3: (2, 3, 4, 5, 6),
        4: (1, 3, 4),
        5: (0, 2, 5),
        6: (3, 6),
    }
    truth = np.zeros((7, 7), dtype=np.int8)
    for j, ks in deps.items():
        for k in ks:
            truth[k, j] = 1
    lows = tuple(lo for lo, _ in ranges)
    highs = tuple(hi for _, hi in ranges)
    return SdeSystem(
        name="glycolysis",
        dim=7,
        drift=GlycolysisDrift(),
        sigma=sigma,
        init_sampler=UniformBoxInit(lows, highs),
        truth=truth,
        sim_substeps=100,
        params={"sigma": sigma, "init_ranges": [list(r) for r in ranges]},
    )


def synthetic_nn_system(d: int = 50, k_significant: int = 5, hidden_layers: int = 3,
                        hidden_width: int = 10, sigma: float = 1.0,
                        seed: int = 0) -> SdeSystem:
    """Random network drift where each output keeps only ``k`` live inputs.

    Weights and biases are standard normal; for every output the complement
    of a random ``k``-subset of first-layer columns is zeroed, which defines
    the ground-truth graph by construction.
    """
    if not (1 <= k_significant <= d):
        raise BadDimensionError("need 1 <= k_significant <= d")
    rng = np.random.default_rng(seed)
    net = StructuredMLP.random(d, hidden_width, hidden_layers, "tanh", rng, scale="unit")
    truth = np.zeros((d, d), dtype=np.int8)
    w = net.input_weights.copy()
    for j in range(d):
        keep = rng.choice(d, size=k_significant, replace=False)
        mask = np.ones(d, dtype=bool)
        mask[keep] = False
        w[j, mask, :] = 0.0
        truth[keep, j] = 1
    net = net.with_input_weights(w)
    return SdeSystem(
        name="synthetic",
        dim=d,
        drift=net,
        sigma=sigma,
        init_sampler=StandardNormalInit(d),
        truth=truth,
        params={
            "d": d,
            "k_significant": k_significant,
            "hidden_layers": hidden_layers,
            "hidden_width": hidden_width,
            "sigma": sigma,
            "seed": seed,
        },
    )


_FACTORIES = {
    "lorenz96": lorenz96,
    "rossler": rossler_generalized,
    "glycolysis": glycolysis,
    "synthetic": synthetic_nn_system,
}


def make_system(name: str, params: dict | None = None) -> SdeSystem:
    """Build a shipped system by name with keyword parameters."""
    if name not in _FACTORIES:
        raise ValueError(f"unknown system {name!r}; available: {sorted(_FACTORIES)}")
    return _FACTORIES[name](**(params or {}))


# ------------------------------------------------------------------- oracle


def ground_truth_check(system: SdeSystem, n_states: int = 64, seed: int = 0,
                       tol: float = 1e-9) -> np.ndarray:
    """Validate the stored adjacency with a perturbation sensitivity oracle.

    For every input ``k`` the drift is evaluated at random plausible states
    with coordinate ``k`` shifted over a fixed grid; any output change above
    ``tol`` marks a dependence.  The oracle matrix must equal the stored
    truth exactly, otherwise :class:`TruthMismatchError` is raised.
    """
    rng = np.random.default_rng(seed)
    base = np.stack([system.init_sampler(rng) for _ in range(n_states)])
    f0 = system.drift(base)
    found = np.zeros((system.dim, system.dim), dtype=np.int8)
    for k in range(system.dim):
        for delta in (-1.0, -0.5, -0.1, 0.1, 0.5, 1.0):
            x = base.copy()
            x[:, k] += delta
            diff = np.abs(system.drift(x) - f0).max(axis=0)
            found[k, :] |= (diff > tol).astype(np.int8)
    if not np.array_equal(found, system.truth):
        bad = np.argwhere(found != system.truth)
        raise TruthMismatchError(
            f"{system.name}: oracle disagrees with stored truth at (k, j) pairs "
            f"{bad.tolist()[:10]}"
        )
    return found


# ------------------------------------------------------------ observation


@dataclass(frozen=True)
class ObservationScheme:
    """Sampling pattern of the observation process.

    ``kind`` is ``"regular"`` (n points spaced dt apart) or
    ``"irregular-drop"`` (regular grid with every point after the first
    removed independently with probability ``drop_fraction``).
    """

    kind: str = "regular"
    dt: float = 0.1
    n: int = 1000
    drop_fraction: float = 0.0

    def __post_init__(self):
        if self.kind not in ("regular", "irregular-drop"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not (0.0 <= self.drop_fraction < 1.0):
            raise ValueError("drop_fraction must lie in [0, 1)")

    @property
    def horizon(self) -> float:
        return self.dt * (self.n - 1)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dt": self.dt, "n": self.n,
                "drop_fraction": self.drop_fraction}

    @classmethod
    def from_dict(cls, doc: dict) -> "ObservationScheme":
        return cls(**doc)


def generate_dataset(system: SdeSystem, scheme: ObservationScheme, seed: int,
                     horizon: float | None = None) -> TimeSeries:
    """Simulate the system and subsample per the observation scheme.

    The simulation runs Euler-Maruyama on a grid ``system.sim_substeps``
    times finer than the observation interval.  The random stream covers, in
    order: the initial state, the Brownian increments, and the drop mask, so
    the result is a pure function of ``(system, scheme, horizon, seed)``.
    """
    if horizon is None:
        horizon = scheme.horizon
    n_obs = int(round(horizon / scheme.dt)) + 1
    sub = system.sim_substeps
    fine = np.linspace(0.0, horizon, (n_obs - 1) * sub + 1)
    rng = np.random.default_rng(seed)
    x0 = system.init_sampler(rng)
    init_seed = int(rng.integers(2 ** 63))
    traj = euler_maruyama(system.drift, system.sigma, x0, fine, init_seed)
    times = traj.times[::sub]
    values = traj.states[::sub]

    if scheme.kind == "irregular-drop" and scheme.drop_fraction > 0:
        keep = rng.random(len(times)) >= scheme.drop_fraction
        keep[0] = True
        times, values = times[keep], values[keep]
    return TimeSeries(times=times, values=values)


def generate_bounded_dataset(system: SdeSystem, scheme: ObservationScheme, seed: int,
                             bound: float, max_tries: int = 200,
                             horizon: float | None = None):
    """Draw datasets until one stays within ``|x| <= bound``.

    Some benchmark drifts (the generalized sine-coupled ring in particular)
    have no global attractor and a nonzero probability of escaping to
    infinity; reported results implicitly condition on the bounded paths.
    This samples that conditional distribution explicitly: attempt ``k``
    re-derives the seed as ``SeedSequence([seed, k])``, and the number of
    discarded attempts is returned for the record.

    Returns:
        ``(TimeSeries, attempts_used)``.

    Raises:
        NonFiniteError: no bounded path found within ``max_tries``.
    """
    for attempt in range(max_tries):
        sub_seed = int(np.random.SeedSequence([seed, attempt]).generate_state(1)[0])
        try:
            ts = generate_dataset(system, scheme, sub_seed, horizon)
        except NonFiniteError:
            continue
        if np.abs(ts.values).max() <= bound:
            return ts, attempt + 1
    raise NonFiniteError(
        f"no path of {system.name} stayed within |x| <= {bound} in {max_tries} tries"
    )


# ---------------------------------------------------------------------- io


def write_timeseries_csv(path, ts: TimeSeries) -> None:
    """CSV with header ``t,x1,...,xd`` and shortest-roundtrip decimal floats."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        cols = ",".join(f"x{i + 1}" for i in range(ts.dim))
        fh.write(f"t,{cols}\n")
        for t, row in zip(ts.times, ts.values):
            fh.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def read_timeseries_csv(path) -> TimeSeries:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[0] != "t":
            raise ValueError("expected header starting with 't'")
        rows = [list(map(float, line.strip().split(","))) for line in fh if line.strip()]
    arr = np.asarray(rows, dtype=float)
    return TimeSeries(times=arr[:, 0], values=arr[:, 1:])


def write_manifest(path, system: SdeSystem, scheme: ObservationScheme, seed: int) -> None:
    """Companion JSON: system identity, parameters, scheme, seed, and truth."""
    doc = {
        "format": "ctgraph-manifest-v1",
        "system": system.name,
        "dim": system.dim,
        "sigma": system.sigma,
        "parameters": system.params,
        "scheme": scheme.to_dict(),
        "seed": seed,
        "truth": system.truth.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    doc["truth"] = np.asarray(doc["truth"], dtype=np.int8)
    return doc
