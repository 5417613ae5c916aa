"""
Replay handles for campaign cells.

A cell is fully determined by its coordinates: fields and weights are
regenerated from the seed, never stored. The digest spells the coordinates
out and appends a short sha256 checksum so a mangled handle is rejected
instead of replaying a different computation.

    thm21|scaled_pair|seed=42|dim=3|n=5|r=-|lambda=-#3f9a0c1d2e4b
"""
import hashlib
from dataclasses import dataclass
from typing import Optional

from .errors import DigestError

_UNSET = "-"


@dataclass(frozen=True)
class Cell:
    inequality: str
    generator: str
    seed: int
    dim: int
    n: int
    r: Optional[float] = None
    lam: Optional[float] = None

    def sort_key(self):
        """Records are emitted in (seed, dim, n, r, lambda) order; unset r/lambda sort first."""
        return (
            self.seed,
            self.dim,
            self.n,
            float("-inf") if self.r is None else self.r,
            float("-inf") if self.lam is None else self.lam,
        )


def _fmt(value: Optional[float]) -> str:
    return _UNSET if value is None else repr(float(value))


def _parse(text: str) -> Optional[float]:
    return None if text == _UNSET else float(text)


def checksum(body: str) -> str:
    return hashlib.sha256(body.encode("utf-8")).hexdigest()[:12]


def encode_cell(cell: Cell) -> str:
    body = "|".join([
        cell.inequality,
        cell.generator,
        f"seed={cell.seed}",
        f"dim={cell.dim}",
        f"n={cell.n}",
        f"r={_fmt(cell.r)}",
        f"lambda={_fmt(cell.lam)}",
    ])
    return f"{body}#{checksum(body)}"


def decode_digest(digest: str) -> Cell:
    body, sep, tag = digest.strip().partition("#")
    if not sep:
        raise DigestError(f"digest has no checksum: {digest!r}")
    if checksum(body) != tag:
        raise DigestError(f"digest checksum mismatch: {digest!r}")
    parts = body.split("|")
    if len(parts) != 7:
        raise DigestError(f"digest must have 7 fields, got {len(parts)}: {digest!r}")
    inequality, generator, *pairs = parts
    values = {}
    for pair in pairs:
        key, eq, value = pair.partition("=")
        if not eq:
            raise DigestError(f"malformed digest field {pair!r}")
        values[key] = value
    try:
        return Cell(
            seed=int(values["seed"]),
            dim=int(values["dim"]),
            n=int(values["n"]),
            r=_parse(values["r"]),
            lam=_parse(values["lambda"]),
            inequality=inequality,
            generator=generator,
        )
    except (KeyError, ValueError) as e:
        raise DigestError(f"malformed digest {digest!r}: {e}") from None
