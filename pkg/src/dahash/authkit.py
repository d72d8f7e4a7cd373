"""Account creation and login with password-dependent hash cost.

The cost ``k`` of a password comes from a public policy (a frequency
dictionary plus thresholds) and is recomputed from the candidate password at
login. It is never written to the record store: a stored ``k`` would let an
offline attacker discard every guess whose cost differs.

Record file, one line per account::

    v1:<username>:<salt-hex>:<digest-hex>

Policy file::

    tau 3
    threshold 1000
    threshold 10
    cost 4096
    cost 256
    cost 64
    dict common.txt

Dictionary file lines are ``<frequency>\\t<password>``.
"""
from __future__ import annotations

import hashlib
import hmac
import os
import secrets
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

RECORD_VERSION = "v1"
DEFAULT_SALT_BITS = 128


class PolicyError(ValueError):
    pass


class StoreError(ValueError):
    pass


class HashPrimitive:
    """A cryptographic hash with an invocation counter."""

    def __init__(self, name: str = "sha256"):
        self.name = name
        self._ctor: Callable = getattr(hashlib, name)
        self.calls = 0

    def __call__(self, data: bytes) -> bytes:
        self.calls += 1
        return self._ctor(data).digest()


def stretch(pw: str, salt: bytes, k: int, primitive: HashPrimitive | None = None) -> bytes:
    """Chained key stretching: d_0 = H(salt|pw), d_i = H(d_{i-1}|salt|pw); k calls to H."""
    if int(k) != k or k < 1:
        raise ValueError("iteration count must be a positive integer")
    H = primitive or HashPrimitive()
    tail = salt + pw.encode("utf-8")
    d = H(tail)
    for _ in range(int(k) - 1):
        d = H(d + tail)
    return d


@dataclass(frozen=True)
class Policy:
    """GetHardness for arbitrary passwords.

    Group 1 holds passwords seen at least ``thresholds[0]`` times, group j
    those with thresholds[j-2] > f >= thresholds[j-1], and the last group
    everything rarer, including passwords missing from the dictionary.
    """

    dictionary: Mapping[str, int]
    thresholds: tuple[int, ...]
    costs: tuple[int, ...]
    dict_path: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(int(t) for t in self.thresholds))
        object.__setattr__(self, "costs", tuple(int(c) for c in self.costs))
        if len(self.costs) != len(self.thresholds) + 1:
            raise PolicyError("need exactly tau costs and tau-1 thresholds")
        if any(c < 1 for c in self.costs):
            raise PolicyError("costs must be positive iteration counts")
        if any(a <= b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise PolicyError("thresholds must be strictly descending")
        if self.thresholds and self.thresholds[-1] < 1:
            raise PolicyError("thresholds must be positive")

    @property
    def tau(self) -> int:
        return len(self.costs)

    def group_of(self, pw: str) -> int:
        """0-based strength group; 0 is the weakest."""
        f = self.dictionary.get(pw, 0)
        for j, t in enumerate(self.thresholds):
            if f >= t:
                return j
        return self.tau - 1

    def get_hardness(self, pw: str) -> int:
        return self.costs[self.group_of(pw)]


def read_dictionary(lines: Iterable[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        freq, sep, pw = line.partition("\t")
        if not sep or not pw:
            raise PolicyError(f"dictionary line {lineno}: expected '<frequency>\\t<password>'")
        try:
            f = int(freq)
        except ValueError:
            raise PolicyError(f"dictionary line {lineno}: bad frequency {freq!r}") from None
        if f < 1:
            raise PolicyError(f"dictionary line {lineno}: frequency must be positive")
        out[pw] = out.get(pw, 0) + f
    return out


def load_policy(path: str | os.PathLike) -> Policy:
    path = Path(path)
    tau = None
    thresholds: list[int] = []
    costs: list[int] = []
    dict_path = None
    with open(path, encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            key, _, value = line.partition(" ")
            try:
                if key == "tau":
                    tau = int(value)
                elif key == "threshold":
                    thresholds.append(int(value))
                elif key == "cost":
                    costs.append(int(value))
                elif key == "dict":
                    dict_path = value.strip()
                else:
                    raise PolicyError(f"policy line {lineno}: unknown key {key!r}")
            except ValueError as e:
                if isinstance(e, PolicyError):
                    raise
                raise PolicyError(f"policy line {lineno}: bad value {value!r}") from None
    if tau is None or dict_path is None:
        raise PolicyError("policy needs 'tau' and 'dict' lines")
    if len(costs) != tau or len(thresholds) != tau - 1:
        raise PolicyError(f"tau={tau} needs {tau - 1} thresholds and {tau} costs")
    resolved = path.parent / dict_path
    with open(resolved, encoding="utf-8") as fh:
        dictionary = read_dictionary(fh)
    return Policy(dictionary, tuple(thresholds), tuple(costs), dict_path)


def write_policy(path: str | os.PathLike, policy: Policy, dict_path: str) -> None:
    lines = [f"tau {policy.tau}"]
    lines += [f"threshold {t}" for t in policy.thresholds]
    lines += [f"cost {c}" for c in policy.costs]
    lines.append(f"dict {dict_path}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_dictionary(path: str | os.PathLike, dictionary: Mapping[str, int]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pw, f in sorted(dictionary.items(), key=lambda kv: (-kv[1], kv[0])):
            fh.write(f"{f}\t{pw}\n")


@dataclass(frozen=True)
class AccountRecord:
    username: str
    salt: bytes
    digest: bytes

    def serialize(self) -> str:
        return f"{RECORD_VERSION}:{self.username}:{self.salt.hex()}:{self.digest.hex()}"

    @classmethod
    def parse(cls, line: str) -> "AccountRecord":
        parts = line.rstrip("\n").split(":")
        if len(parts) != 4 or parts[0] != RECORD_VERSION:
            raise StoreError(f"malformed record {line!r}")
        _, user, salt, digest = parts
        return cls(user, bytes.fromhex(salt), bytes.fromhex(digest))


def _check_username(u: str) -> None:
    if not u or not u.isascii() or not u.isprintable() or ":" in u:
        raise StoreError(f"username must be non-empty printable ASCII without ':': {u!r}")


class RecordStore:
    """Append-only record file; the whole file is indexed in memory on open."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._records: dict[str, AccountRecord] = {}
        if self.path.exists():
            with open(self.path, encoding="ascii") as fh:
                for line in fh:
                    if line.strip():
                        rec = AccountRecord.parse(line)
                        self._records[rec.username] = rec

    def __contains__(self, username: str) -> bool:
        return username in self._records

    def __len__(self) -> int:
        return len(self._records)

    def find(self, username: str) -> AccountRecord | None:
        return self._records.get(username)

    def store(self, record: AccountRecord) -> None:
        _check_username(record.username)
        if record.username in self._records:
            raise StoreError(f"user {record.username!r} already exists")
        with open(self.path, "a", encoding="ascii", newline="\n") as fh:
            fh.write(record.serialize() + "\n")
        self._records[record.username] = record


def create_account(store: RecordStore, policy: Policy, u: str, pw: str,
                   salt_bits: int = DEFAULT_SALT_BITS,
                   primitive: HashPrimitive | None = None) -> AccountRecord:
    _check_username(u)
    if u in store:
        raise StoreError(f"user {u!r} already exists")
    if salt_bits < 8 or salt_bits % 8:
        raise ValueError("salt length must be a positive multiple of 8 bits")
    salt = secrets.token_bytes(salt_bits // 8)
    k = policy.get_hardness(pw)
    record = AccountRecord(u, salt, stretch(pw, salt, k, primitive))
    store.store(record)
    return record


_DUMMY_SALT = bytes(DEFAULT_SALT_BITS // 8)


def authenticate(store: RecordStore, policy: Policy, u: str, pw: str,
                 primitive: HashPrimitive | None = None,
                 response_floor: float | None = None) -> bool:
    """Recompute the digest with the cost of the *candidate* password and compare.

    Unknown users run the same work against a dummy salt and are rejected
    like a wrong password. With ``response_floor`` (seconds) the call does not
    return before that much wall-clock time has passed.
    """
    start = time.monotonic()
    record = store.find(u)
    k = policy.get_hardness(pw)
    salt = record.salt if record else _DUMMY_SALT
    digest = stretch(pw, salt, k, primitive)
    ok = record is not None and hmac.compare_digest(digest, record.digest)
    if response_floor:
        remaining = response_floor - (time.monotonic() - start)
        if remaining > 0:
            time.sleep(remaining)
    return ok

