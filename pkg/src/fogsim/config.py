"""Scenario configuration: defaults, validation, file loading and echo."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Any

SCHEMES = ("proposed", "baseline1", "baseline2")


class ConfigError(ValueError):
    """Raised when a configuration fails validation or parsing."""


@dataclass
class ScenarioConfig:
    # topology / workload
    n_cloudlets: int = 30
    n_uns: int = 90
    n_tasks: int = 90
    cacheable_fraction: float = 1.0 / 3.0
    zipf_z: float = 0.6
    n_profiles: int = 3
    traffic_intensity_mbps: float = 9.0
    mean_task_size_bits: float = 1.0e5
    # latency / reliability targets
    delay_threshold_s: float = 1.0
    epsilon: float = 0.01
    # clustering
    theta: float = 0.5
    sigma_d_sq: float = 500.0
    k_min: int = 2
    k_max: int | None = None  # None -> n_uns // 2
    # compute
    kappa_over_clocal_s_per_bit: float = 1.0e-7
    kappa_over_ce_s_per_bit: float = 1.0e-8
    storage_slots: int = 10
    tau_lp_range_ms: tuple[float, float] = (0.0, 0.125)
    tau_ep_range_ms: tuple[float, float] = (0.125, 0.25)
    # radio
    tx_power_dbm: float = 20.0
    bandwidth_hz: float = 1.4e6
    noise_dbm: float = -126.0
    coverage_pathloss_db: float = 83.5
    area_side_m: float = 500.0
    # time base
    slot_duration_s: float = 1.0e-3
    fading_coherence_slots: int = 500
    n_training_slots: int = 5000
    n_slots: int = 100_000
    warmup_slots: int = 2000
    # scheme / estimator / seed
    scheme: str = "proposed"
    estimator_exponent: float = 0.55
    seed: int = 1

    # -- derived quantities ------------------------------------------------

    @property
    def traffic_bits_per_s(self) -> float:
        return self.traffic_intensity_mbps * 1.0e6

    @property
    def arrival_rate_per_un(self) -> float:
        return self.traffic_bits_per_s / (self.n_uns * self.mean_task_size_bits)

    @property
    def n_cacheable(self) -> int:
        return int(self.cacheable_fraction * self.n_tasks + 0.5)

    @property
    def noise_mw(self) -> float:
        return 10.0 ** (self.noise_dbm / 10.0)

    @property
    def tau_lp_range_s(self) -> tuple[float, float]:
        return (self.tau_lp_range_ms[0] * 1e-3, self.tau_lp_range_ms[1] * 1e-3)

    @property
    def tau_ep_range_s(self) -> tuple[float, float]:
        return (self.tau_ep_range_ms[0] * 1e-3, self.tau_ep_range_ms[1] * 1e-3)

    @property
    def tau_lp_mean_s(self) -> float:
        lo, hi = self.tau_lp_range_s
        return 0.5 * (lo + hi)

    @property
    def tau_ep_mean_s(self) -> float:
        lo, hi = self.tau_ep_range_s
        return 0.5 * (lo + hi)

    @property
    def delay_budget_s(self) -> float:
        """Mean offloaded-delay budget after the probabilistic-to-mean relaxation."""
        return self.delay_threshold_s * self.epsilon

    @property
    def resolved_k_max(self) -> int:
        return self.n_uns // 2 if self.k_max is None else self.k_max

    @property
    def proactiveness(self) -> float:
        return self.storage_slots / self.n_cacheable if self.n_cacheable else 0.0

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        err = []
        if self.n_cloudlets < 1:
            err.append("n_cloudlets must be >= 1")
        if self.n_tasks < 1:
            err.append("n_tasks must be >= 1")
        if self.n_uns < self.k_min:
            err.append("n_uns must be >= k_min")
        if not 0.0 <= self.cacheable_fraction <= 1.0:
            err.append("cacheable_fraction must lie in [0, 1]")
        if self.zipf_z < 0:
            err.append("zipf_z must be >= 0")
        if self.n_profiles < 1:
            err.append("n_profiles must be >= 1")
        if self.traffic_intensity_mbps <= 0:
            err.append("traffic_intensity_mbps must be positive")
        if self.mean_task_size_bits <= 0:
            err.append("mean_task_size_bits must be positive")
        if self.delay_threshold_s <= 0:
            err.append("delay_threshold_s must be positive")
        if not 0.0 < self.epsilon < 1.0:
            err.append("epsilon must lie in (0, 1)")
        if not 0.0 <= self.theta <= 1.0:
            err.append("theta must lie in [0, 1]")
        if self.sigma_d_sq <= 0:
            err.append("sigma_d_sq must be positive")
        if self.k_min < 2:
            err.append("k_min must be >= 2")
        if self.resolved_k_max < self.k_min:
            err.append("k_max must be >= k_min")
        if self.kappa_over_clocal_s_per_bit <= 0 or self.kappa_over_ce_s_per_bit <= 0:
            err.append("kappa-over-rate ratios must be positive")
        if self.storage_slots < 0:
            err.append("storage_slots must be >= 0")
        for name, rng in (("tau_lp_range_ms", self.tau_lp_range_ms),
                          ("tau_ep_range_ms", self.tau_ep_range_ms)):
            if len(rng) != 2 or rng[0] < 0 or rng[1] < rng[0]:
                err.append(f"{name} must be (lo, hi) with 0 <= lo <= hi")
        if self.bandwidth_hz <= 0:
            err.append("bandwidth_hz must be positive")
        if self.area_side_m <= 0:
            err.append("area_side_m must be positive")
        if self.slot_duration_s <= 0:
            err.append("slot_duration_s must be positive")
        if self.fading_coherence_slots < 1:
            err.append("fading_coherence_slots must be >= 1")
        if self.n_training_slots < 0:
            err.append("n_training_slots must be >= 0")
        if self.n_slots < 0:
            err.append("n_slots must be >= 0")
        if not 0 <= self.warmup_slots <= self.n_slots:
            err.append("warmup_slots must lie in [0, n_slots]")
        if self.scheme not in SCHEMES:
            err.append(f"scheme must be one of {SCHEMES}")
        if not 0.0 < self.estimator_exponent <= 1.0:
            err.append("estimator_exponent must lie in (0, 1]")
        if self.scheme in ("proposed", "baseline1") and self.n_training_slots < 1:
            err.append("proposed/baseline1 require n_training_slots >= 1 to warm rate estimates")
        if err:
            raise ConfigError("; ".join(err))

    # -- serialisation --------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["k_max"] = self.resolved_k_max
        d["tau_lp_range_ms"] = list(self.tau_lp_range_ms)
        d["tau_ep_range_ms"] = list(self.tau_ep_range_ms)
        return d

    def replace(self, **kw) -> "ScenarioConfig":
        return dataclasses.replace(self, **kw)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}


def _coerce(name: str, value: Any) -> Any:
    """Coerce a raw config value (from JSON or a --set string) to its field type."""
    if name in ("tau_lp_range_ms", "tau_ep_range_ms"):
        if isinstance(value, str):
            parts = value.split(",")
            value = [float(p) for p in parts]
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(f"{name} must be a two-element (lo, hi) pair")
        return (float(value[0]), float(value[1]))
    if name == "scheme":
        return str(value)
    if name == "k_max":
        if value is None or value == "none":
            return None
        return int(value)
    int_fields = {"n_cloudlets", "n_uns", "n_tasks", "n_profiles", "storage_slots",
                  "n_training_slots", "n_slots", "warmup_slots", "k_min", "seed",
                  "fading_coherence_slots"}
    if name in int_fields:
        return int(value)
    return float(value)


def config_from_dict(raw: dict[str, Any], base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Build a config from a mapping; unknown keys are a hard error."""
    unknown = sorted(set(raw) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = base or ScenarioConfig()
    cfg = cfg.replace(**{k: _coerce(k, v) for k, v in raw.items()})
    return cfg


def load_config(path: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Load a JSON config file. All fields optional; defaults fill the rest."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(raw, base=base)


def apply_overrides(cfg: ScenarioConfig, pairs: list[str]) -> ScenarioConfig:
    """Apply repeated KEY=VALUE override strings."""
    raw: dict[str, Any] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not KEY=VALUE")
        key, value = pair.split("=", 1)
        raw[key.strip()] = value.strip()
    return config_from_dict(raw, base=cfg)


def dump_config(cfg: ScenarioConfig, path: str) -> None:
    """Write the fully resolved config; the file re-ingests via load_config."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
