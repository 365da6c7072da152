from collections import Counter
from typing import Iterable, List, Sequence

from .models import PAD_ID, UNK_ID

PAD_TOKEN = '<pad>'
UNK_TOKEN = '<unk>'


class Vocabulary:
    """Token string <-> id mapping with PAD pinned at 0 and UNK at 1."""

    def __init__(self, tokens: Iterable[str] = ()):
        self.itos: List[str] = [PAD_TOKEN, UNK_TOKEN]
        self.stoi = {PAD_TOKEN: PAD_ID, UNK_TOKEN: UNK_ID}
        for token in tokens:
            self.add(token)

    @classmethod
    def build(cls, sentences: Iterable[Sequence[str]], min_count: int = 1) -> 'Vocabulary':
        """Collect tokens in first-seen order, keeping those seen at least `min_count` times."""
        counts = Counter()
        order = []
        for tokens in sentences:
            for token in tokens:
                if token not in counts:
                    order.append(token)
                counts[token] += 1
        return cls(token for token in order if counts[token] >= min_count)

    def add(self, token: str) -> int:
        if token not in self.stoi:
            self.stoi[token] = len(self.itos)
            self.itos.append(token)
        return self.stoi[token]

    def __len__(self):
        return len(self.itos)

    def __contains__(self, token):
        return token in self.stoi

    def lookup(self, tokens: Sequence[str]) -> List[int]:
        return [self.stoi.get(token, UNK_ID) for token in tokens]

    def to_dict(self) -> dict:
        return {'tokens': self.itos[2:]}

    @classmethod
    def from_dict(cls, data: dict) -> 'Vocabulary':
        return cls(data['tokens'])
