from dataclasses import dataclass, fields, replace

NOISE_MODES = ('dirichlet-jitter', 'label-flip')


def _seed_from_settings(values):
    from django.conf import settings

    if settings.UNIRE['SEED'] is not None:
        values['seed'] = settings.UNIRE['SEED']
    return values


@dataclass(frozen=True)
class GenConfig:
    """
    Synthetic corpus settings.

    Every entity token is drawn from a pool owned by its entity type and its
    role (no relation, head or tail of a directed type, argument of an
    undirected type); with probability 1 - signal it comes from a shared
    noise pool instead. Entities are separated by at least `min_gap`
    filler tokens.
    """
    seed: int = 0
    min_length: int = 5
    max_length: int = 20
    vocab_size: int = 200
    n_entity_types: int = 3
    n_relation_types: int = 2
    symmetric_fraction: float = 0.5
    max_entities: int = 5
    min_entity_length: int = 1
    max_entity_length: int = 3
    relation_density: float = 0.5
    signal: float = 1.0
    min_gap: int = 1
    max_retries: int = 100

    def __post_init__(self):
        if not 1 <= self.min_length <= self.max_length:
            raise ValueError(f"Need 1 <= min_length <= max_length, got {self.min_length}..{self.max_length}.")
        if not 1 <= self.min_entity_length <= self.max_entity_length:
            raise ValueError("Need 1 <= min_entity_length <= max_entity_length.")
        if self.n_entity_types < 1 or self.n_relation_types < 0 or self.max_entities < 0:
            raise ValueError("Need at least one entity type and non-negative relation/entity counts.")
        for name in ('symmetric_fraction', 'relation_density', 'signal'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {getattr(self, name)}.")
        if self.min_gap < 0 or self.max_retries < 1:
            raise ValueError("min_gap must be >= 0 and max_retries >= 1.")

    @classmethod
    def from_settings(cls, **overrides) -> 'GenConfig':
        values = {key: value for key, value in overrides.items() if value is not None}
        return cls(**_seed_from_settings(values))

    def replace(self, **changes) -> 'GenConfig':
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class NoiseConfig:
    """`sigma` is the mixing weight for dirichlet-jitter and the per-cell flip probability for label-flip."""
    mode: str = 'dirichlet-jitter'
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in NOISE_MODES:
            raise ValueError(f"Unknown noise mode {self.mode!r}; expected one of {NOISE_MODES}.")
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError(f"sigma must be in [0, 1], got {self.sigma}.")

    @classmethod
    def from_settings(cls, **overrides) -> 'NoiseConfig':
        values = {key: value for key, value in overrides.items() if value is not None}
        return cls(**_seed_from_settings(values))
