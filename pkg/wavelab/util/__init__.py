# -*- coding: UTF-8 -*-
import base64
import csv
import io
import json
import logging
import math
import os
import re
import tempfile

import numpy as np
import requests


logger = logging.getLogger('WAVELAB')


def is_url(output):
    return bool(output) and bool(re.match("^https?://", output))


def write_file(filepath, data, fileclass=None, writetype="w", output=None):
    """
    Write a result file to disk or to a remote callback, specified in the
    output parameter. On disk the file is written to a temporary file in
    the target directory and moved into place.
    """
    logger.debug("[.] Writing file: %s to: %s" % (filepath, output))
    if not output:
        return None

    # Rest API callback mode
    if is_url(output):
        # (b64encode) bytes -> (decode) str
        if type(data) == bytes:
            encoded = base64.b64encode(data).decode()
        else:
            encoded = base64.b64encode(bytes(data, "utf-8")).decode()
        payload = {
            "name": filepath,
            "data": encoded,
        }
        if fileclass:
            payload["fileclass"] = fileclass
        headers = {
            "content-type": "application/json"
        }
        r = requests.post(
            output, data=json.dumps(payload).encode("utf-8"), headers=headers
        )
        if r.status_code >= 400:
            logger.error("[!] Callback %s answered %s for %s" % (
                output, r.status_code, filepath))
        return r.status_code

    # filesystem mode
    path = os.path.join(output, filepath)
    dirpath = os.path.dirname(path)
    if not os.path.exists(dirpath):
        os.makedirs(dirpath)
    fd, tmp = tempfile.mkstemp(dir=dirpath, prefix=".wavelab-")
    try:
        with os.fdopen(fd, writetype) as f:
            f.write(data)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def format_value(value):
    """
    17 significant digits for floats, so equal runs give equal text.
    """
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if value is None:
        return ""
    return str(value)


def csv_text(columns, rows, header=None):
    """
    CSV with `# key=value` provenance lines (sorted by key) on top.
    """
    buf = io.StringIO()
    for key in sorted(header or {}):
        buf.write("# %s=%s\n" % (key, format_value(header[key])))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def read_csv(path):
    """
    (header dict, rows as dicts) of a file written by csv_text.
    """
    header = {}
    with open(path) as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
        elif line.strip():
            body.append(line)
    return header, list(csv.DictReader(body))


def fit_line(x, y):
    """
    Least-squares line through (x, y): (slope, intercept, r^2).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least 2 points to fit a line")
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def parse_int_range(text):
    """
    "3..6" -> [3, 4, 5, 6]; "3,5" -> [3, 5]; "4" -> [4].
    """
    text = str(text).strip()
    match = re.match(r"^(-?\d+)\.\.(-?\d+)$", text)
    if match:
        lo, hi = int(match.group(1)), int(match.group(2))
        if hi < lo:
            raise ValueError("Empty range: %s" % text)
        return list(range(lo, hi + 1))
    return [int(v) for v in re.split(r"\s*,\s*", text) if v]


def parse_float_list(text):
    return [float(v) for v in re.split(r"\s*,\s*", str(text).strip()) if v]


def refine_crossing(t0, t1, m0, m1, cap):
    """
    Point in [t0, t1] where the log of a positive quantity, interpolated
    linearly from m0 at t0 to m1 at t1, reaches log cap. Falls back to t1
    when the bracket is not usable.
    """
    if not (m0 > 0 and np.isfinite(m1)) or m0 >= cap or m1 <= cap:
        return t1
    a, b = math.log(m0), math.log(m1)
    return t0 + (math.log(cap) - a) * (t1 - t0) / (b - a)
