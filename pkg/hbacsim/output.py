"""Functionality related to output."""

import io
import math
import os
import sys

import numpy as np

from .error import FileError

FLOAT_FORMAT = ".17g"  # Enough digits for every double to round-trip.
INDENT = "  "


def format_float(value):
    """Renders a float with 17 significant digits, always float-looking.

    Non-finite values have no JSON representation and become null.
    """
    value = float(value)
    if not math.isfinite(value):
        return "null"
    text = format(value, FLOAT_FORMAT)
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _render_str(value):
    out = ['"']
    for char in value:
        if char in '"\\':
            out.append("\\" + char)
        elif ord(char) < 0x20:
            out.append(f"\\u{ord(char):04x}")
        else:
            out.append(char)
    out.append('"')
    return "".join(out)


def _render(value, nesting, out):
    """Appends the JSON rendering of value to the out list.

    Dicts keep their insertion order, so callers control the field order.
    """
    if value is None:
        out.append("null")
    elif isinstance(value, (bool, np.bool_)):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(_render_str(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for idx, (key, item) in enumerate(value.items()):
            out.append(INDENT * (nesting + 1) + _render_str(str(key)) + ": ")
            _render(item, nesting + 1, out)
            out.append(",\n" if idx < len(value) - 1 else "\n")
        out.append(INDENT * nesting + "}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        items = list(value)
        if not items:
            out.append("[]")
            return
        # Flat numeric lists stay on one line; that keeps population and
        # polarization vectors readable.
        if all(isinstance(i, (int, float, np.number)) and not isinstance(i, bool) for i in items):
            out.append("[")
            for idx, item in enumerate(items):
                if idx:
                    out.append(", ")
                _render(item, nesting + 1, out)
            out.append("]")
            return
        out.append("[\n")
        for idx, item in enumerate(items):
            out.append(INDENT * (nesting + 1))
            _render(item, nesting + 1, out)
            out.append(",\n" if idx < len(items) - 1 else "\n")
        out.append(INDENT * nesting + "]")
    else:
        raise TypeError(f"cannot render {type(value).__name__} as JSON")


def render_json(value):
    """Deterministic JSON rendering of a report, newline-terminated."""
    out = []
    _render(value, 0, out)
    out.append("\n")
    return "".join(out)


def render_csv(header, rows):
    """CSV text with a header row and one sample per line."""
    buf = io.StringIO()
    np.savetxt(
        buf,
        np.asarray(rows, dtype=np.float64).reshape(-1, len(header)),
        fmt="%" + FLOAT_FORMAT,
        delimiter=",",
        header=",".join(header),
        comments="",
    )
    return buf.getvalue()


def write_text(text, path=None):
    """Writes text to the given path, or to stdout when path is None or "-".

    OS-level failures turn into FileError.
    """
    if path is None or str(path) == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            #  https://docs.python.org/3/library/signal.html#note-on-sigpipe:
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
            sys.exit(1)
        return

    try:
        with open(path, "w", encoding="utf-8", newline="\n") as ostream:
            ostream.write(text)
    except OSError as err:
        raise FileError(str(err)) from err


def print_error(*args, **kwargs):
    """A print() wrapper that writes to stderr."""
    print(*args, file=sys.stderr, **kwargs)
