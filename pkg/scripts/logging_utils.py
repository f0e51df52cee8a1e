import logging
import sys
from numbers import Number

LOGGER_NAME = "maxtree"


class _CleanFormatter(logging.Formatter):
    _PREFIXES = {
        logging.DEBUG:    "debug  ",
        logging.WARNING:  "warn   ",
        logging.ERROR:    "error  ",
        logging.CRITICAL: "fatal  ",
    }

    def format(self, record: logging.LogRecord) -> str:
        prefix = self._PREFIXES.get(record.levelno, "")
        msg = record.getMessage()
        if record.exc_info:
            msg += "\n" + self.formatException(record.exc_info)
        return f"{self.formatTime(record, '%H:%M:%S')}  {prefix}{msg}"


def setup_logging(level: int | None = None, stream=None) -> logging.Logger:
    """Attach the shared handler once. The CLI passes stderr so stdout stays data-only."""
    logger = logging.getLogger(LOGGER_NAME)
    if not logger.handlers:
        handler = logging.StreamHandler(stream or sys.stdout)
        handler.setFormatter(_CleanFormatter())
        logger.addHandler(handler)
        logger.setLevel(level if level is not None else logging.INFO)
    elif level is not None:
        logger.setLevel(level)
    return logger


def format_table(headers: list[str], rows: list, right_cols: set[int] | None = None) -> str:
    """
    Fixed-width text table. Columns whose cells are all numbers are right-aligned;
    right_cols forces right alignment for other column indices.
    """
    ncols = len(headers)
    padded = [list(row) + [""] * max(0, ncols - len(row)) for row in rows]
    right = set(right_cols or ())
    for i in range(ncols):
        cells = [row[i] for row in padded if row[i] != ""]
        if cells and all(isinstance(v, Number) and not isinstance(v, bool) for v in cells):
            right.add(i)
    str_rows = [[str(v) for v in row] for row in padded]
    widths = [max(len(r[i]) for r in [headers] + str_rows) for i in range(ncols)]

    def fmt(row: list[str]) -> str:
        return "  " + "  ".join(
            v.rjust(w) if i in right else v.ljust(w) for i, (v, w) in enumerate(zip(row, widths))
        ).rstrip()

    rule = "  " + "  ".join("─" * w for w in widths)
    return "\n".join([fmt(headers), rule] + [fmt(r) for r in str_rows])


def phase_rows(phases: dict[str, float]) -> list[list]:
    """Table rows `phase, ms` for a PhaseTimer, total last."""
    rows = [[name, f"{ms:.1f} ms"] for name, ms in phases.items()]
    rows.append(["total", f"{sum(phases.values()):.1f} ms"])
    return rows
