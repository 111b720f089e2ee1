"""Eventually periodic defining sequences over the epimorphism alphabet."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NotFactorable, UnknownEpiId, ValidationError


def _ids(seq) -> tuple[str, ...]:
    if isinstance(seq, str):
        return tuple(seq)
    return tuple(str(s) for s in seq)


@dataclass(frozen=True)
class OmegaSequence:
    """``omega_1 omega_2 ...`` = prefix followed by the period repeated forever.

    ``offset`` records how many shifts produced this sequence; the
    prefix/period pair is always kept in normalized form, so ``at`` never
    needs the offset.
    """

    prefix: tuple
    period: tuple
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "prefix", _ids(self.prefix))
        object.__setattr__(self, "period", _ids(self.period))
        if not self.period:
            raise ValidationError("omega period must be non-empty")
        if self.offset < 0:
            raise ValidationError("omega offset must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "OmegaSequence":
        """``"012"`` (pure period), ``"0(12)"`` or ``"0|12"`` (prefix, period)."""
        text = text.strip()
        if "(" in text:
            head, _, rest = text.partition("(")
            return cls(head, rest.rstrip(")"))
        if "|" in text:
            head, _, rest = text.partition("|")
            return cls(head, rest)
        return cls((), text)

    def at(self, i: int) -> str:
        """1-indexed term."""
        if i < 1:
            raise IndexError("omega is indexed from 1")
        j = i - 1
        if j < len(self.prefix):
            return self.prefix[j]
        return self.period[(j - len(self.prefix)) % len(self.period)]

    def terms(self, start: int, length: int) -> list[str]:
        return [self.at(i) for i in range(start, start + length)]

    def shift(self, k: int = 1) -> "OmegaSequence":
        if k < 0:
            raise ValidationError("shift must be non-negative")
        m = len(self.prefix)
        if k <= m:
            return OmegaSequence(self.prefix[k:], self.period, self.offset + k)
        t = (k - m) % len(self.period)
        return OmegaSequence((), self.period[t:] + self.period[:t], self.offset + k)

    def offset_class(self, o: int) -> int:
        """Canonical representative of the shift ``o``: shifts with the same
        class give identical sequences."""
        m = len(self.prefix)
        if o < m:
            return o
        return m + (o - m) % len(self.period)

    @property
    def n_classes(self) -> int:
        return len(self.prefix) + len(self.period)

    def epi_ids(self) -> set:
        return set(self.prefix) | set(self.period)

    def __str__(self) -> str:
        pre = "".join(self.prefix) if all(len(s) == 1 for s in self.prefix) else ",".join(self.prefix)
        per = "".join(self.period) if all(len(s) == 1 for s in self.period) else ",".join(self.period)
        return f"{pre}({per})" if pre else per


def _kernels(ids, data) -> list[frozenset]:
    out = []
    for e in ids:
        if e not in data.epis:
            raise UnknownEpiId(f"unknown epimorphism id {e!r}")
        out.append(data.epis[e].kernel)
    return out


def is_complete(segment: Sequence[str], data) -> bool:
    """Do the kernels of the segment cover the level group?"""
    covered: set = set()
    for k in _kernels(_ids(segment), data):
        covered |= k
    return len(covered) == data.level_group.order


def is_admissible(omega: OmegaSequence, data) -> bool:
    _kernels(omega.prefix, data)
    ks = _kernels(omega.period, data)
    identity = data.level_group.identity
    for b in range(data.level_group.order):
        if b == identity:
            continue
        inside = [b in k for k in ks]
        if not (any(inside) and not all(inside)):
            return False
    return True


def scan_starts(omega: OmegaSequence) -> range:
    # window properties are periodic in the start once past the prefix
    return range(1, len(omega.prefix) + len(omega.period) + 1)


def minimal_homogeneity(omega: OmegaSequence, data, r_max: int) -> int | None:
    """Smallest r <= r_max with every length-r window complete."""
    starts = scan_starts(omega)
    for r in range(1, r_max + 1):
        if all(is_complete(omega.terms(s, r), data) for s in starts):
            return r
    return None


def factor_complete(omega: OmegaSequence, data, r: int, horizon: int) -> list[int]:
    """Greedy factorization of omega_1..omega_horizon into shortest complete
    blocks. The last block may run past ``horizon`` until it is complete."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    kernels = {e: data.epis[e].kernel for e in omega.epi_ids() if e in data.epis}
    _kernels(omega.epi_ids(), data)
    order = data.level_group.order
    blocks: list[int] = []
    i = 1
    while i <= horizon:
        covered: set = set()
        n = 0
        while len(covered) < order:
            if n >= r:
                raise NotFactorable(f"no complete block of length <= {r} starting at position {i}")
            covered |= kernels[omega.at(i + n)]
            n += 1
        blocks.append(n)
        i += n
    return blocks
