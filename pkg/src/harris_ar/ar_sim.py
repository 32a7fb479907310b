"""Trajectory engines for the four AR(1) random-selection schemes.

Model 1: X_n = e_n w.p. p, else X_{n-1} + e_n.
Model 2: the same recursion on the aggregate sum of k components.
Model 3: X_n = e_n w.p. p, else max(X_{n-1}, e_n).
Model 4: the same recursion on the aggregate maximum of k components.

For models 2 and 4 the innovation descriptor is the per-component law; the
aggregate innovation is the sum / max of k i.i.d. components drawn fresh
each step, and the recursion keeps or drops the whole previous aggregate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

import numpy as np

from . import catalog as C
from . import descriptors as D
from . import dist_core as dc
from . import laws as L
from . import samplers as S
from .errors import ConfigError, HarrisARError, UnsupportedError

DEFAULT_BURN_IN = 100
ADDITIVE = (1, 2)
MAXIMUM = (3, 4)

# stream roles inside one replicate
_INITIAL, _SELECTOR, _INNOVATION = 0, 1, 2
_ROLES = 3


@dataclass(frozen=True)
class ModelConfig:
    model: int
    p: float
    k: int = 1
    innovation: str = "exponential(rate=1.0)"
    initial: str = "stationary"
    n_steps: int = 1000
    n_replicates: int = 1
    seed: int = 0
    burn_in: Optional[int] = None

    def __post_init__(self):
        if self.model not in (1, 2, 3, 4):
            raise ConfigError("model", f"must be one of 1, 2, 3, 4, got {self.model}")
        if not 0 < self.p < 1:
            raise ConfigError("p", f"must lie in (0, 1), got {self.p}")
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError("k", f"must be a positive integer, got {self.k}")
        if self.model in (1, 3) and self.k != 1:
            raise ConfigError("k", f"model {self.model} requires k = 1, got {self.k}")
        if self.n_steps < 1:
            raise ConfigError("n_steps", "must be >= 1")
        if self.n_replicates < 1:
            raise ConfigError("n_replicates", "must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if self.burn_in is not None and self.burn_in < 0:
            raise ConfigError("burn_in", "must be >= 0")
        for key in ("innovation", "initial"):
            text = getattr(self, key)
            if key == "initial" and text == "stationary":
                continue
            try:
                object.__setattr__(self, key, str(C.resolve(text).descriptor))
            except HarrisARError as exc:
                raise ConfigError(key, str(exc)) from exc

    @property
    def harris(self) -> dc.HarrisParams:
        return dc.HarrisParams.from_p(self.p, self.k)

    @property
    def effective_burn_in(self) -> int:
        if self.burn_in is not None:
            return self.burn_in
        return 0 if self.initial == "stationary" else DEFAULT_BURN_IN

    @classmethod
    def from_mapping(cls, items: Mapping[str, str]) -> "ModelConfig":
        """Build from string key/value pairs, naming the offending key on error."""
        casts = {
            "model": int,
            "p": float,
            "k": int,
            "innovation": str,
            "initial": str,
            "n_steps": int,
            "n_replicates": int,
            "seed": int,
            "burn_in": int,
        }
        kwargs = {}
        for key, raw in items.items():
            if key not in casts:
                raise ConfigError(key, "unknown key")
            try:
                kwargs[key] = casts[key](raw) if not isinstance(raw, casts[key]) else raw
            except (TypeError, ValueError) as exc:
                raise ConfigError(key, f"cannot parse {raw!r}") from exc
        for key in ("model", "p"):
            if key not in kwargs:
                raise ConfigError(key, "required")
        return cls(**kwargs)

    def as_mapping(self) -> dict[str, str]:
        out = {
            "model": str(self.model),
            "p": repr(float(self.p)),
            "k": str(self.k),
            "innovation": self.innovation,
            "initial": self.initial,
            "n_steps": str(self.n_steps),
            "n_replicates": str(self.n_replicates),
            "seed": str(self.seed),
        }
        if self.burn_in is not None:
            out["burn_in"] = str(self.burn_in)
        return out


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One replicate.  Index 0 holds the starting value; entries of
    ``selector`` are 1 (replace), 0 (combine) or -1 (no step recorded)."""

    replicate: int
    values: np.ndarray
    selector: np.ndarray
    innovations: np.ndarray
    components: Optional[np.ndarray] = None

    @property
    def n_steps(self) -> int:
        return len(self.values)


def _combine(model: int):
    return np.add if model in ADDITIVE else np.maximum


def _aggregate(model: int, comps: np.ndarray) -> np.ndarray:
    return comps.sum(axis=0) if model in ADDITIVE else comps.max(axis=0)


def _component_initial_sampler(config: ModelConfig, innovation: C.Law) -> S.SamplerObj:
    """Per-component law of Y_0; ``stationary`` uses the exact random sum/max."""
    if config.initial != "stationary":
        return C.resolve(config.initial).need("sampler")
    eps = innovation.need("sampler")
    if config.k == 1:
        count = S.sample_geometric(config.p)
    else:
        count = S.sample_harris(config.harris)
    if config.model in ADDITIVE:
        return S.sample_random_sum(count, eps)
    return S.sample_random_max(count, eps)


def replay(model: int, initial: float, selector: np.ndarray, innovations: np.ndarray) -> np.ndarray:
    """Recompute a trajectory from its starting value, selectors and innovations."""
    op = _combine(model)
    values = np.empty(len(innovations))
    values[0] = initial
    for n in range(1, len(values)):
        values[n] = innovations[n] if selector[n] == 1 else op(values[n - 1], innovations[n])
    return values


def simulate(config: ModelConfig) -> list[Trajectory]:
    """Simulate ``config.n_replicates`` independent trajectories.

    Replicate r draws from three streams keyed by (seed, 3r + role): one for
    the starting value, one for the Bernoulli selectors and one for the
    innovations, so selector outcomes are independent of innovation draws.
    """
    innovation = C.resolve(config.innovation)
    eps = innovation.need("sampler")
    init = _component_initial_sampler(config, innovation)
    k, model = config.k, config.model
    burn = config.effective_burn_in
    total = burn + config.n_steps
    R = config.n_replicates

    X = np.empty((R, total))
    sel = np.empty((R, total), dtype=np.int8)
    comps = np.empty((R, k, total))
    for r in range(R):
        g_init = S.RngStream(config.seed, _ROLES * r + _INITIAL)
        g_sel = S.RngStream(config.seed, _ROLES * r + _SELECTOR)
        g_inn = S.RngStream(config.seed, _ROLES * r + _INNOVATION)
        y0 = np.asarray(init.draw(g_init, k), dtype=float)
        X[r, 0] = y0.sum() if model in ADDITIVE else y0.max()
        sel[r] = (g_sel.generator.random(total) < config.p).astype(np.int8)
        sel[r, 0] = -1
        draws = np.asarray(eps.draw(g_inn, k * (total - 1)), dtype=float)
        comps[r, :, 0] = np.nan
        comps[r, :, 1:] = draws.reshape(total - 1, k).T
    innov = np.full((R, total), np.nan)
    innov[:, 1:] = _aggregate(model, comps[:, :, 1:].transpose(1, 0, 2))
    op = _combine(model)
    for n in range(1, total):
        X[:, n] = np.where(sel[:, n] == 1, innov[:, n], op(X[:, n - 1], innov[:, n]))

    keep = slice(burn, total)
    out = []
    for r in range(R):
        s = sel[r, keep].copy()
        if burn == 0:
            s[0] = -1
        out.append(
            Trajectory(
                replicate=r,
                values=X[r, keep].copy(),
                selector=s,
                innovations=innov[r, keep].copy(),
                components=comps[r, :, keep].copy() if model in (2, 4) else None,
            )
        )
    return out


def pooled_at(trajectories: Iterable[Trajectory], n: int) -> np.ndarray:
    """Cross-replicate sample of the aggregate at time index n."""
    return np.array([tr.values[n] for tr in trajectories])


# -- stationary laws ---------------------------------------------------------


def stationary_aggregate_df(config: ModelConfig) -> dc.DistFnObj:
    """d.f. of the stationary aggregate for the max models.

    Model 3 is the geometric maximum of the innovation; in model 4 each
    component is the Harris(a, k) maximum F of the per-component innovation
    and the aggregate maximum has d.f. F**k.
    """
    if config.model not in MAXIMUM:
        raise UnsupportedError("aggregate d.f. only for the maximum models 3 and 4")
    F_eps = C.resolve(config.innovation).need("df")
    if config.model == 3:
        return L.geom_max_df(config.p, F_eps)
    return L.power_df(L.harris_max_df(config.harris, F_eps), float(config.k))


def stationary_aggregate_cf(config: ModelConfig) -> dc.CharFnObj:
    if config.model not in ADDITIVE:
        raise UnsupportedError("aggregate CF only for the additive models 1 and 2")
    f_eps = C.resolve(config.innovation).need("cf")
    k = config.k
    # geometric sum of the aggregate innovation, whose CF is f_eps**k
    return dc.CharFnObj(
        func=lambda t: L._geom_sum_level(config.p, f_eps(t) ** k),
        descriptor=D.make("aggregate", model=config.model, p=config.p, k=k, X=f_eps.descriptor),
    )


def _same_k(desc: D.Descriptor, k: int) -> bool:
    return int(desc.get("k", 1)) == k


def stationary_innovation(config: ModelConfig, target) -> str:
    """Per-component innovation descriptor whose forward transform is ``target``.

    ``target`` is the per-component stationary law (the d.f. F for the max
    models, the CF f_y for the additive ones).
    """
    law = C.resolve(target)
    desc = law.descriptor
    p, k, model = config.p, config.k, config.model
    if model in MAXIMUM:
        law.need("df")
        if desc.tag in ("harris_max_id", "gamma_max_id") and _same_k(desc, k):
            H = desc["H"]
            return str(D.make(desc.tag, H=D.make("power", F=H, e=p), k=k))
        if desc.tag == "geom_max_id" and k == 1:
            return str(D.make("geom_max_id", H=D.make("power", F=desc["H"], e=p)))
        if model == 3:
            return str(D.make("geom_max_innovation", p=p, F=desc))
        return str(D.make("harris_max_innovation", a=1.0 / p, k=k, F=desc))

    if desc.tag in ("harris_id", "gamma_id") and _same_k(desc, k):
        h = C.resolve(desc["h"])
        return str(D.make(desc.tag, h=C.id_power(h, p).descriptor, k=k))
    if desc.tag == "exponential" and k == 1:
        return str(D.make("exponential", rate=float(desc["rate"]) / p))
    if desc.tag == "gamma" and math.isclose(float(desc["shape"]), 1.0 / k):
        return str(D.make("gamma", shape=float(desc["shape"]), scale=float(desc["scale"]) * p))
    raise UnsupportedError(f"no closed-form innovation for additive target {desc}")


def per_component_decomposition(config: ModelConfig, aggregate_innovation) -> C.Law:
    """Component law whose k-fold sum (model 2) or max (model 4) is the aggregate."""
    agg = C.resolve(aggregate_innovation)
    k = config.k
    if config.model not in (2, 4):
        raise UnsupportedError("decomposition only applies to models 2 and 4")
    if k == 1:
        return agg
    if config.model == 4:
        return C.resolve(D.make("power", F=agg.descriptor, e=1.0 / k))
    if agg.id_power is None:
        raise UnsupportedError(f"no registered {k}-fold decomposition of {agg.descriptor}")
    return C.id_power(agg, 1.0 / k)


# -- CSV ---------------------------------------------------------------------


def _fmt(x: float) -> str:
    if math.isnan(x):
        return ""
    return repr(float(x))


def trajectories_to_csv(trajectories: list[Trajectory], k: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replicate", "n", "value", "selector"] + [f"component_{i + 1}" for i in range(k)])
    for tr in trajectories:
        for n in range(tr.n_steps):
            s = int(tr.selector[n])
            comps = [""] * k if tr.components is None else [_fmt(c) for c in tr.components[:, n]]
            w.writerow([tr.replicate, n, _fmt(tr.values[n]), "" if s < 0 else s] + comps)
    return buf.getvalue()


def trajectories_from_csv(text: str) -> list[Trajectory]:
    """Read values and selectors back (innovations are not stored)."""
    rows = list(csv.DictReader(io.StringIO(text)))
    by_rep: dict[int, list[dict]] = {}
    for row in rows:
        by_rep.setdefault(int(row["replicate"]), []).append(row)
    out = []
    for r in sorted(by_rep):
        rs = sorted(by_rep[r], key=lambda row: int(row["n"]))
        comp_keys = sorted((c for c in rs[0] if c.startswith("component_")), key=lambda c: int(c.split("_")[1]))
        values = np.array([float(row["value"]) for row in rs])
        selector = np.array([int(row["selector"]) if row["selector"] != "" else -1 for row in rs], dtype=np.int8)
        comps = None
        if comp_keys and any(rs[1][c] != "" for c in comp_keys if len(rs) > 1):
            comps = np.array([[float(row[c]) if row[c] != "" else np.nan for row in rs] for c in comp_keys])
        out.append(Trajectory(r, values, selector, np.full(len(values), np.nan), comps))
    return out
