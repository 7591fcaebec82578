"""
Result file writing shared by the commands.
"""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Union

from sme_correlate.errors import OutputError


@contextmanager
def writing_to(path: Union[str, Path]) -> Iterator[Path]:
    """
    Turn OSErrors raised inside the block into an OutputError naming the path.
    """
    p = Path(path)
    try:
        yield p
    except OSError as exc:
        raise OutputError(f"cannot write {p}: {exc.strerror or exc}", path=str(p)) from exc


def write_output(path: Union[str, Path], text: str) -> Path:
    with writing_to(path) as p:
        p.write_text(text)
    return p


def prepare_dir(path: Union[str, Path]) -> Path:
    with writing_to(path) as p:
        p.mkdir(parents=True, exist_ok=True)
    return p
