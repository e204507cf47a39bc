"""
Update scripts: replayable sequences of inserts, deletes and queries.

    P 3 1 2        optional first command, preloads the array
    I <pos> <v>    insert v so that it lands at index pos
    D <pos>        delete the element at index pos
    Q <i> <j>      approximate LIS of the subarray i..j (inclusive)
    QC <i> <j>     same, and print a witness
    Q / QC         without indices: the whole array

Blank lines and lines starting with '#' are skipped.
"""

import random
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Optional, Tuple

from approxlis.errors import ScriptParseError

_ARITY = {"I": (2,), "D": (1,), "Q": (0, 2), "QC": (0, 2)}


class Command(NamedTuple):
    op: str
    args: Tuple[int, ...]
    line: int = 0

    def __str__(self) -> str:
        return " ".join([self.op, *map(str, self.args)])


@dataclass
class UpdateScript:
    preload: List[int] = field(default_factory=list)
    commands: List[Command] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.commands)

    def __iter__(self) -> Iterator[Command]:
        return iter(self.commands)

    @property
    def has_inserts(self) -> bool:
        return any(c.op == "I" for c in self.commands)

    def replace_commands(self, commands: List[Command]) -> "UpdateScript":
        return UpdateScript(list(self.preload), list(commands))

    def dumps(self) -> str:
        lines = []
        if self.preload:
            lines.append("P " + " ".join(map(str, self.preload)))
        lines.extend(str(c) for c in self.commands)
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "UpdateScript":
        script = cls()
        seen_command = False
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            op, *fields = line.split()
            args = _integers(fields, number)
            if op == "P":
                if seen_command:
                    raise ScriptParseError(number, "P must be the first command")
                script.preload = list(args)
                seen_command = True
                continue
            if op not in _ARITY:
                raise ScriptParseError(number, f"unknown command {op!r}")
            if len(args) not in _ARITY[op]:
                expected = " or ".join(map(str, _ARITY[op]))
                raise ScriptParseError(number, f"{op} takes {expected} arguments, got {len(args)}")
            if any(a < 0 for a in (args if op != "I" else args[:1])):
                raise ScriptParseError(number, "positions must be non-negative")
            script.commands.append(Command(op, args, number))
            seen_command = True
        return script

    @classmethod
    def load(cls, path: str) -> "UpdateScript":
        with open(path, "r", encoding="utf-8") as f:
            return cls.parse(f.read())


def _integers(fields: List[str], number: int) -> Tuple[int, ...]:
    try:
        return tuple(int(f) for f in fields)
    except ValueError:
        raise ScriptParseError(number, f"expected integers, got {' '.join(fields)!r}") from None


def read_values(path: str) -> List[int]:
    """Whitespace-separated integers from a file."""
    values = []
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            values.extend(_integers(line.split(), number))
    return values


def random_script(seed: int, ops: int, *, preload: int = 0, insert_share: float = 0.5,
                  query_share: float = 0.3, max_value: Optional[int] = None,
                  max_size: Optional[int] = None) -> UpdateScript:
    """A random script whose positions are valid when replayed in order.

    With insert_share == 0 the script only deletes, which makes it a decremental script.
    """
    rng = random.Random(seed)
    top = max_value if max_value is not None else 4 * (preload + ops) + 1
    script = UpdateScript(preload=[rng.randint(0, top) for _ in range(preload)])
    size = preload
    for _ in range(ops):
        roll = rng.random()
        if roll < query_share:
            if size == 0:
                script.commands.append(Command("Q", ()))
                continue
            i = rng.randrange(size)
            j = rng.randrange(i, size)
            script.commands.append(Command("QC" if rng.random() < 0.5 else "Q", (i, j)))
            continue
        grow = rng.random() < insert_share and (max_size is None or size < max_size)
        if grow:
            script.commands.append(Command("I", (rng.randint(0, size), rng.randint(0, top))))
            size += 1
        elif size:
            script.commands.append(Command("D", (rng.randrange(size),)))
            size -= 1
    return script
