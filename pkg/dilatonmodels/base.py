import numpy as np
import psutil
import csv
import sys
import os

DEBUG = False
QUIET = False

RST = "\033[0m"
RED = "\033[38;5;9m"
GREEN = "\033[38;5;10m"
BLUE = "\033[38;5;4m"


def sizefmt(num: int, suffix="B") -> str:
    """
    Format sizes in a human readible style.
    """
    for unit in ["", "K", "M", "G", "T", "P", "E", "Z"]:
        if abs(num) < 1024.0:
            return "%3.1f%s%s" % (num, unit, suffix)
        num /= 1024.0
    return "%.1f%s%s" % (num, "Yi", suffix)


def log(msg: str = "", noinfo: bool = False, color=GREEN):
    """
    Log a message.
    """
    if QUIET:
        return
    process = psutil.Process(os.getpid())
    rss = sizefmt(process.memory_info().rss)
    mem = "" if noinfo else f"[MEM {rss}]"
    if isinstance(msg, str) and msg.startswith("#"):
        msg = "\n" + color + str(msg) + RST + " " + mem + "\n"
    elif isinstance(msg, str) and msg.startswith("@"):
        msg = BLUE + msg[1:] + RST
    else:
        msg = str(msg)
    if DEBUG and not msg.startswith("\n"):
        print(mem + "\t" + msg, file=sys.stderr)
    else:
        print(msg, file=sys.stderr)


def warning(msg: str):
    """
    Warning!
    """
    print("\n" + RED + str(msg) + RST, file=sys.stderr)


def numfmt(value) -> str:
    """
    Format a value for CSV output. Floats keep full double precision
    (17 significant digits) so that rows round-trip exactly.
    """
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (list, tuple)):
        return ";".join(numfmt(v) for v in value)
    return str(value)


class CSVWriter:

    """
    Streaming CSV writer: comma separated, header row, UTF-8 and LF line
    endings. The header is fixed by the first row written.
    """

    def __init__(self, fn: str):
        self.fn = fn
        self.columns = None
        self._fd = None
        self._writer = None

    def __enter__(self):
        self._fd = open(self.fn, "w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._fd, lineterminator="\n")
        return self

    def __exit__(self, *exc):
        self._fd.close()
        self._fd = None

    def write(self, row: dict):
        if self.columns is None:
            self.columns = list(row.keys())
            self._writer.writerow(self.columns)
        self._writer.writerow([numfmt(row.get(c, "")) for c in self.columns])


def write_csv(fn: str, rows) -> int:
    """
    Write an iterable of dict rows to `fn`. Returns the number of rows.
    """
    n = 0
    with CSVWriter(fn) as writer:
        for row in rows:
            writer.write(row)
            n += 1
    return n


class Scenario:

    """
    Base class for the runnable scenarios. Parameters are plain attributes set
    through `update`, exactly as the CLI config provides them. A scenario only
    needs to implement `evaluate`; `evaluate_and_save` streams one row per
    sweep point to disk.
    """

    # parameter name -> default value; subclasses extend this
    defaults = {}

    def __init__(self, **kwargs):
        self.verbose = True
        for k, v in self.defaults.items():
            setattr(self, k, v)
        self.update(**kwargs)

    def update(self, **kwargs):
        for k, v in kwargs.items():
            setattr(self, k, v)

    @property
    def parameters(self) -> dict:
        return {k: getattr(self, k) for k in self.defaults}

    def log(self, s):
        if self.verbose:
            print(s, file=sys.stderr)

    def evaluate(self, **point) -> dict:
        raise NotImplementedError

    def warnings(self, **point) -> list:
        """
        Messages about approximations that do not hold at `point`.
        """
        return []

    def row(self, point: dict) -> dict:
        """
        Evaluate one sweep point and echo every input alongside the outputs.
        """
        params = {**self.parameters, **point}
        return {**params, **self.evaluate(**params)}

    def evaluate_and_save(self, fn: str, points: list, jobs: int = 1) -> int:
        from joblib import Parallel, delayed

        self.log(f"Writing {len(points)} rows to {fn} ({jobs} jobs)")

        if jobs == 1:
            rows = (self.row(p) for p in points)
        else:
            rows = Parallel(n_jobs=jobs, return_as="generator")(delayed(self.row)(p) for p in points)

        return write_csv(fn, rows)
