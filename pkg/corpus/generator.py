"""
Synthetic corpora with controllable type signal.

Token identity carries the table: every entity token comes from a pool owned
by (entity type, role), so at full signal a context-free encoder can fill
every cell from the two tokens that index it.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from label_table.models import Entity, LabelSpace, Relation, SentenceAnnotation

from .exceptions import GenerationError
from .models import GenConfig

logger = logging.getLogger(__name__)

FILLER = 'filler'
NOISE = 'noise'


@dataclass(frozen=True)
class RelationSignature:
    label: int
    head_type: int
    tail_type: int
    symmetric: bool


def label_space_for(cfg: GenConfig) -> LabelSpace:
    """ENT0.. entity types and REL0.. relation types; the last round(fraction * count) relations are undirected."""
    entity_types = [f"ENT{k}" for k in range(cfg.n_entity_types)]
    relation_types = [f"REL{k}" for k in range(cfg.n_relation_types)]
    n_symmetric = int(round(cfg.symmetric_fraction * cfg.n_relation_types))
    symmetric = relation_types[len(relation_types) - n_symmetric:] if n_symmetric else []
    return LabelSpace.build(entity_types, relation_types, symmetric)


def relation_signatures(ls: LabelSpace) -> List[RelationSignature]:
    n_types = len(ls.entity_types)
    signatures = []
    for offset, label in enumerate(ls.relation_ids):
        label = int(label)
        head = 1 + offset % n_types
        if ls.is_symmetric(label):
            signatures.append(RelationSignature(label, head, head, True))
        else:
            signatures.append(RelationSignature(label, head, 1 + (offset + 1) % n_types, False))
    return signatures


def build_pools(cfg: GenConfig, ls: LabelSpace) -> Dict[tuple, List[str]]:
    """
    Partition the vocabulary into disjoint token pools.

    Keys are FILLER, NOISE, (entity id, 'none') and (relation id, role) with
    role 'head', 'tail' or 'arg'.
    """
    keys = [(int(t), 'none') for t in ls.entity_ids]
    for signature in relation_signatures(ls):
        if signature.symmetric:
            keys.append((signature.label, 'arg'))
        else:
            keys += [(signature.label, 'head'), (signature.label, 'tail')]
    size = cfg.vocab_size // (len(keys) + 2)
    needed = max(cfg.max_entities, 2) * cfg.max_entity_length
    if size < needed:
        raise GenerationError(
            f"vocab_size {cfg.vocab_size} gives {size} tokens per pool; "
            f"need {needed} for {cfg.max_entities} entities of length {cfg.max_entity_length}."
        )
    vocab = [f"t{index:04d}" for index in range(cfg.vocab_size)]
    pools = {NOISE: vocab[:size]}
    for position, key in enumerate(keys, start=1):
        pools[key] = vocab[position * size:(position + 1) * size]
    pools[FILLER] = vocab[(len(keys) + 1) * size:]
    return pools


class CorpusGenerator:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.label_space = label_space_for(cfg)
        self.signatures = relation_signatures(self.label_space)
        self.pools = build_pools(cfg, self.label_space)
        self.rng = np.random.default_rng(cfg.seed)

    def _plan(self):
        """Sample a length, the relations and the entity list; None when they do not fit."""
        cfg, rng = self.cfg, self.rng
        n = int(rng.integers(cfg.min_length, cfg.max_length + 1))
        chosen = [s for s in self.signatures if rng.random() < cfg.relation_density]
        chosen = chosen[:cfg.max_entities // 2]
        # (entity label, pool key, relation slot)
        specs = []
        for slot, signature in enumerate(chosen):
            if signature.symmetric:
                key = (signature.label, 'arg')
                specs += [(signature.head_type, key, (slot, 0)), (signature.tail_type, key, (slot, 1))]
            else:
                specs += [(signature.head_type, (signature.label, 'head'), (slot, 0)),
                          (signature.tail_type, (signature.label, 'tail'), (slot, 1))]
        extra = int(rng.integers(0, cfg.max_entities - len(specs) + 1))
        for _ in range(extra):
            label = int(rng.choice(self.label_space.entity_ids))
            specs.append((label, (label, 'none'), None))
        lengths = rng.integers(cfg.min_entity_length, cfg.max_entity_length + 1, size=len(specs))
        needed = int(lengths.sum()) + max(len(specs) - 1, 0) * cfg.min_gap
        if needed > n:
            return None
        return n, chosen, specs, lengths

    def sentence(self) -> SentenceAnnotation:
        cfg, rng = self.cfg, self.rng
        for _ in range(cfg.max_retries):
            plan = self._plan()
            if plan is not None:
                break
        else:
            raise GenerationError(
                f"No sentence of length {cfg.min_length}..{cfg.max_length} fits up to {cfg.max_entities} "
                f"entities of length {cfg.min_entity_length}..{cfg.max_entity_length} "
                f"after {cfg.max_retries} attempts."
            )
        n, chosen, specs, lengths = plan
        m = len(specs)
        free = n - int(lengths.sum()) - max(m - 1, 0) * cfg.min_gap
        gaps = rng.multinomial(free, np.full(m + 1, 1.0 / (m + 1)))
        order = rng.permutation(m)

        tokens = list(rng.choice(self.pools[FILLER], size=n))
        used = set()
        placed = {}
        position = int(gaps[0])
        for rank, index in enumerate(order):
            label, key, _ = specs[index]
            start, end = position, position + int(lengths[index])
            available = [token for token in self.pools[key] if token not in used]
            picked = rng.choice(available, size=end - start, replace=False)
            for offset, token in enumerate(picked):
                token = str(token)
                used.add(token)
                if rng.random() >= cfg.signal:
                    token = str(rng.choice(self.pools[NOISE]))
                tokens[start + offset] = token
            placed[index] = Entity(start=start, end=end, label=label)
            position = end + cfg.min_gap + int(gaps[rank + 1])

        entities = sorted(placed.values())
        index_of = {entity: i for i, entity in enumerate(entities)}
        arguments = {}
        for index, (_, _, slot) in enumerate(specs):
            if slot is not None:
                arguments[slot] = index_of[placed[index]]
        relations = []
        for slot, signature in enumerate(chosen):
            head, tail = arguments[(slot, 0)], arguments[(slot, 1)]
            relations.append(Relation(head=head, tail=tail, label=signature.label))
            if signature.symmetric:
                relations.append(Relation(head=tail, tail=head, label=signature.label))
        annotation = SentenceAnnotation(tokens=tuple(str(t) for t in tokens), entities=tuple(entities),
                                        relations=tuple(sorted(relations)))
        return annotation.validate(self.label_space)


def generate_corpus(cfg: GenConfig, n: int) -> Tuple[List[SentenceAnnotation], LabelSpace]:
    """`n` sentences, deterministic in `cfg.seed`."""
    if n < 1:
        raise ValueError(f"Need at least one sentence, got n = {n}.")
    generator = CorpusGenerator(cfg)
    sentences = [generator.sentence() for _ in range(n)]
    logger.info("Generated %d sentences (seed %d, %d tokens).", n, cfg.seed, sum(len(s) for s in sentences))
    return sentences, generator.label_space
