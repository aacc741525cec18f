import csv
import json
import logging
import math
import pytz
import re

from datetime import datetime

import numpy as np

from qclscape.constants import CSV_COMMENT, CSV_FLOAT_FORMAT

log = logging.getLogger(__name__)

JSON_FLOAT_MARK = '@float:'
JSON_FLOAT_PATTERN = re.compile(r'"@float:([^"]+)"')


class UTCFormatter(logging.Formatter):
    converter = datetime.fromtimestamp

    def formatTime(self, record, datefmt=None, timezone="UTC"):
        retval = self.converter(record.created, tz=pytz.timezone(timezone))
        if datefmt:
            return retval.strftime(datefmt)
        else:
            return retval.isoformat()


def format_float(value):
    return format(float(value), CSV_FLOAT_FORMAT)


def json_float(value):
    """Float as JSON text with 17 significant digits, integral values keep a `.0`."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"Out of range float values are not JSON compliant: {value!r}")
    text = format_float(value)
    return text if '.' in text or 'e' in text else f'{text}.0'


def mark_floats(data):
    if isinstance(data, dict):
        return {key: mark_floats(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [mark_floats(value) for value in data]
    if isinstance(data, (float, np.floating)):
        return JSON_FLOAT_MARK + json_float(data)
    if isinstance(data, np.integer):
        return int(data)
    return data


def dump_json(data):
    """Indented, key-sorted JSON document with every float written like the CSV cells."""
    text = json.dumps(mark_floats(data), indent=2, sort_keys=True)
    return JSON_FLOAT_PATTERN.sub(r'\1', text) + '\n'


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if np.isnan(value):
            return ''
        return format_float(value)
    return str(value)


def write_csv(path, command, config, header, rows):
    """Write rows under a `# qclscape <command> <config>` provenance line."""
    count = 0
    with open(path, 'w', newline='') as handle:
        handle.write(f"{CSV_COMMENT} qclscape {command} {json.dumps(config, sort_keys=True)}\n")
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
            count += 1
    log.debug(f"Wrote {count} rows to {path}")
    return count


def read_csv(path):
    """Return (provenance, header, rows) where rows are lists of strings."""
    provenance = {}
    header = None
    rows = []
    with open(path, newline='') as handle:
        for line in handle:
            if line.startswith(CSV_COMMENT):
                parts = line[1:].strip().split(' ', 2)
                if len(parts) == 3:
                    try:
                        provenance = json.loads(parts[2])
                    except ValueError:
                        log.warning(f"Ignoring unreadable provenance line in {path}")
                continue
            if not line.strip():
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
            else:
                rows.append(cells)
    return provenance, header or [], rows


def parse_float(cell):
    return float(cell) if cell != '' else float('nan')


def columns_as_array(header, rows, names):
    index = [header.index(name) for name in names]
    data = np.empty((len(rows), len(names)), dtype=float)
    for i, row in enumerate(rows):
        for j, k in enumerate(index):
            data[i, j] = parse_float(row[k])
    return data


def amplitude_columns(header):
    names = [name for name in header if name.startswith('a') and name[1:].isdigit()]
    return sorted(names, key=lambda name: int(name[1:]))
