"""
Nested progress bars for long experiment runs (pipeline stages, scree
sweeps, metric comparisons), drawn with rich.
"""
from dataclasses import dataclass
from typing import List

from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)


@dataclass
class Entry:
    id: int
    name: str
    steps: int
    progress: float


class ProgBar:
    """
    A stack of named progress bars. The first bar tracks the whole run and
    every subtask bar below it tracks the current step of its parent.

    Parameters
    ----------
    name: str
        Name of the main bar.
    num_steps: int
        Number of steps of the main bar.
    max_descr_len: int
        Width reserved for the descriptions.
    silent: bool
        When True nothing is drawn, but the bookkeeping still happens.
    """

    def __init__(
            self,
            name: str = None,
            num_steps: int = None,
            max_descr_len: int = 30,
            silent: bool = False):
        self.silent = silent
        self.max_descr_len = max_descr_len
        self.stack: List[Entry] = []

        description = "[progress.description]{{task.description:<{}s}}".format(
            self.max_descr_len)
        self.progress = Progress(
            TextColumn(description),
            TextColumn("•"),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            BarColumn(),
            MofNCompleteColumn(),
            TextColumn("•"),
            TimeElapsedColumn(),
            TextColumn("•"),
            TimeRemainingColumn(),
            transient=True,
            disable=silent)
        self.start_subtask(name or "Progress", num_steps)
        if not silent:
            self.progress.start()

    def _label(self, name: str) -> str:
        if len(name) > self.max_descr_len:
            return name[:self.max_descr_len - 1] + '.'
        return name + "." * (self.max_descr_len - len(name))

    def start_subtask(self, name: str = None, steps: int = None):
        assert steps is not None, "The total number of steps must be provided"
        if name is None:
            name = f"subtask_{len(self.stack)}"
        assert self._get_idx(name) == -1, f"Progress bar '{name}' already exists"
        task_id = self.progress.add_task(self._label(name), total=steps)
        self.stack.append(Entry(task_id, name, steps, 0.0))
        return self

    def update_subtask(self, name: str, steps: int):
        """
        Set the completed steps of the bar `name`. When the innermost bar
        moves, every bar above it advances by the corresponding fraction of
        one of its own steps.
        """
        idx = self._get_idx(name)
        assert idx != -1, \
            f"Element '{name}' NOT found. Available pbars are: " \
            f"{[n.name for n in self.stack]}"

        entry = self.stack[idx]
        delta = steps - entry.progress
        entry.progress = steps
        self.progress.update(entry.id, completed=steps)

        if idx == 0 or idx != len(self.stack) - 1 or delta == 0:
            return

        # advance is expressed in steps of the bar being updated
        advance = delta / entry.steps
        for upper in reversed(self.stack[:idx]):
            upper.progress += advance
            self.progress.update(upper.id, completed=upper.progress)
            advance = advance / upper.steps

    def reset_subtask(self, name: str):
        idx = self._get_idx(name)
        if idx <= 0:
            return
        entry = self.stack[idx]
        entry.progress = 0.0
        self.progress.reset(entry.id)

    def remove(self, name: str):
        idx = self._get_idx(name)
        if idx == -1:
            return
        entry = self.stack.pop(idx)
        self.progress.remove_task(entry.id)
        if not self.stack:
            self.progress.stop()

    def close(self):
        for entry in reversed(list(self.stack)):
            self.remove(entry.name)

    def completed(self, name: str) -> float:
        idx = self._get_idx(name)
        assert idx != -1, f"Element '{name}' NOT found"
        return self.stack[idx].progress

    def _get_idx(self, name: str) -> int:
        return next(
            (i for i, element in enumerate(self.stack) if element.name == name), -1)
