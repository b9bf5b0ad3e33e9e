"""The :class:`Weaver` facade and declarative pipelines.

A Weaver keeps the series it was built from and the current result of the
stages applied so far. Every stage method returns the Weaver itself::

    wv = Weaver(*load_dataset("tiktok"), seed=42)
    wv.oversample(60).integral_match().smooth(1.0).noise(snr=30)
    x, y = wv.get()
"""

from __future__ import annotations

import hashlib
import secrets
import struct
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Union

import numpy as np

from . import match, oversampling, transform
from .core import TimeSeries, make_interpolant, validate
from .errors import StageError, ValidationError, WeaverError
from .trendexpr import TrendExpression

STAGE_KINDS = ("oversample", "integral_match", "smooth", "repeat", "trend", "noise")

SEED_MASK = (1 << 64) - 1


def derive_seed(global_seed: int, index: int) -> int:
    """64-bit stage seed: first 8 bytes (little endian) of BLAKE2b over both values packed as ``<QQ``."""
    payload = struct.pack("<QQ", int(global_seed) & SEED_MASK, int(index) & SEED_MASK)
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class StageDescriptor:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STAGE_KINDS:
            raise ValidationError(f"unknown stage kind {self.kind!r}; expected one of {STAGE_KINDS}")
        object.__setattr__(self, "params", dict(self.params))

    def to_dict(self) -> dict:
        params = {}
        for key, value in self.params.items():
            if isinstance(value, TrendExpression):
                value = value.source
            elif isinstance(value, np.ndarray):
                value = value.tolist()
            elif callable(value):
                raise ValidationError(f"{self.kind} parameter {key!r} is a Python callable and cannot be serialized")
            params[key] = value
        return {"kind": self.kind, "params": params}


def tile_reference(original: TimeSeries, domain_end: float) -> TimeSeries:
    """Repeat ``original`` until it reaches ``domain_end`` (for matching after ``repeat``)."""
    if domain_end <= original.x[-1] + 1e-9 * max(1.0, abs(original.x[-1])):
        return original
    step = (original.x[-1] - original.x[0]) / (len(original) - 1)
    period = len(original) * step
    copies = int(np.ceil((domain_end - original.x[-1]) / period - 1e-9)) + 1
    return transform.repeat(original, copies)


def resolve_stage(d: StageDescriptor, index: int, global_seed: Optional[int] = None) -> StageDescriptor:
    """Check ``d`` against its stage's parameter spec and fill in defaults and the noise seed."""
    p = dict(d.params)
    kind = d.kind
    allowed = {
        "oversample": {"n", "strategy", "alpha", "lam", "gamma"},
        "integral_match": {"kappa"},
        "smooth": {"s"},
        "repeat": {"k"},
        "trend": {"expr"},
        "noise": {"snr_db", "std", "seed"},
    }[kind]
    unknown = sorted(set(p) - allowed)
    if unknown:
        raise ValidationError(f"{kind}: unknown parameter(s) {unknown}")
    if kind == "oversample":
        spec = oversampling.OversampleSpec(**p)
        p = {"n": spec.n, "strategy": spec.strategy, "alpha": spec.alpha, "lam": spec.lam, "gamma": spec.gamma}
    elif kind == "integral_match":
        kappa = float(p.get("kappa", 3.0))
        if not kappa > 0 or not np.isfinite(kappa):
            raise ValidationError(f"integral_match: kappa must be positive, got {kappa!r}")
        p = {"kappa": kappa}
    elif kind == "smooth":
        transform.SmoothSpec(p.get("s"))
        p = {"s": p.get("s")}
    elif kind == "repeat":
        k = p.get("k")
        if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
            raise ValidationError(f"repeat: k must be a positive integer, got {k!r}")
        p = {"k": int(k)}
    elif kind == "trend":
        if "expr" not in p:
            raise ValidationError("trend: missing parameter 'expr'")
        if isinstance(p["expr"], str):
            p["expr"] = TrendExpression(p["expr"])
        elif not callable(p["expr"]):
            raise ValidationError("trend: 'expr' must be an expression string or a callable")
    elif kind == "noise":
        seed = p.get("seed")
        if seed is None:
            seed = derive_seed(global_seed, index) if global_seed is not None else secrets.randbits(64)
        p["seed"] = int(seed)
        if isinstance(p.get("snr_db"), (list, tuple)):
            p["snr_db"] = np.asarray(p["snr_db"], dtype=float)
        transform.NoiseSpec(p.get("snr_db"), p.get("std"), p["seed"])
    return StageDescriptor(kind, p)


class Weaver:
    """Chainable processing of one series.

    Parameters
    ----------
    x, y : array_like or TimeSeries
        Either the two coordinate sequences or a single :class:`TimeSeries`.
    seed : int, optional
        Global seed; a noise stage without an explicit seed uses
        ``derive_seed(seed, stage_index)``. Without any seed, fresh entropy is
        drawn and recorded in the log.
    """

    def __init__(self, x, y=None, *, seed: Optional[int] = None):
        if y is None:
            if not isinstance(x, TimeSeries):
                raise ValidationError("Weaver needs x and y, or a TimeSeries")
            ts = x
            if len(ts) < 2:
                ts = validate(ts.x, ts.y)
        else:
            ts = validate(x, y)
        if seed is not None and (isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= SEED_MASK):
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self._original = ts
        self._current = ts
        self._log: list = []
        self.seed = seed

    def __repr__(self):
        kinds = ",".join(d.kind for d in self._log) or "-"
        return f"Weaver(original={self._original!r}, current={self._current!r}, stages={kinds})"

    @property
    def original(self) -> TimeSeries:
        return self._original

    @property
    def current(self) -> TimeSeries:
        return self._current

    @property
    def log(self) -> tuple:
        return tuple(self._log)

    # -- retrieval ----------------------------------------------------------

    def get(self) -> TimeSeries:
        return self._current

    def get_original(self) -> TimeSeries:
        return self._original

    def to_function(self, kind: str = "natural-cubic"):
        return make_interpolant(self._current, kind)

    # -- stages -------------------------------------------------------------

    def apply_stage(self, descriptor: StageDescriptor) -> "Weaver":
        index = len(self._log)
        try:
            resolved = resolve_stage(descriptor, index, self.seed)
            self._current = self._run(resolved)
        except WeaverError as exc:
            if isinstance(exc, StageError):
                raise
            raise StageError(index, descriptor.kind, exc) from exc
        self._log.append(resolved)
        return self

    def _run(self, d: StageDescriptor) -> TimeSeries:
        cur = self._current
        p = d.params
        if d.kind == "oversample":
            return oversampling.oversample(cur, oversampling.OversampleSpec(**p))
        if d.kind == "integral_match":
            reference = tile_reference(self._original, cur.x[-1])
            return match.integral_match(cur, match.MatchSpec(reference, p["kappa"]))
        if d.kind == "smooth":
            return transform.smooth(cur, transform.SmoothSpec(p["s"]))
        if d.kind == "repeat":
            return transform.repeat(cur, p["k"])
        if d.kind == "trend":
            return transform.apply_trend(cur, transform.TrendSpec(p["expr"]))
        return transform.add_noise(cur, transform.NoiseSpec(p.get("snr_db"), p.get("std"), p["seed"]))

    def oversample(self, n: int, strategy: str = "exp_adaptive", **params) -> "Weaver":
        return self.apply_stage(StageDescriptor("oversample", {"n": n, "strategy": strategy, **params}))

    def integral_match(self, kappa: float = 3.0) -> "Weaver":
        return self.apply_stage(StageDescriptor("integral_match", {"kappa": kappa}))

    def smooth(self, s: Optional[float] = None) -> "Weaver":
        return self.apply_stage(StageDescriptor("smooth", {"s": s}))

    def repeat(self, k: int) -> "Weaver":
        return self.apply_stage(StageDescriptor("repeat", {"k": k}))

    def trend(self, trend_func: Union[str, Callable]) -> "Weaver":
        return self.apply_stage(StageDescriptor("trend", {"expr": trend_func}))

    def noise(self, snr=None, *, std: Optional[float] = None, seed: Optional[int] = None) -> "Weaver":
        """Add Gaussian noise; ``snr`` is in dB, scalar or one value per sample."""
        params = {"seed": seed}
        if snr is not None:
            params["snr_db"] = snr
        if std is not None:
            params["std"] = std
        return self.apply_stage(StageDescriptor("noise", params))

    def replay(self) -> "Weaver":
        """Fresh Weaver rebuilt from the original and this Weaver's stage log."""
        return replay(self._original, self._log, seed=self.seed)


def replay(original: TimeSeries, log, seed: Optional[int] = None) -> Weaver:
    wv = Weaver(original, seed=seed)
    for d in log:
        wv.apply_stage(d if isinstance(d, StageDescriptor) else StageDescriptor(d["kind"], d.get("params", {})))
    return wv


@dataclass(frozen=True)
class PipelineConfig:
    """Declarative pipeline: where the input comes from, the stages, the seed.

    ``source`` is either a :class:`TimeSeries` or a callable returning one;
    document parsing lives in :mod:`tsweave.config`.
    """

    source: Any
    stages: tuple = ()
    seed: Optional[int] = None

    def load_input(self) -> TimeSeries:
        return self.source() if callable(self.source) else self.source


def run_pipeline(config: PipelineConfig) -> Weaver:
    wv = Weaver(config.load_input(), seed=config.seed)
    for stage in config.stages:
        wv.apply_stage(stage)
    return wv
