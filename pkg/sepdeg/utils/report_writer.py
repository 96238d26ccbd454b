import csv
import io
import json
import logging
from typing import List, Optional, Sequence

from sepdeg.config import Config
from sepdeg.core.oracle import Prediction, VerificationReport

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'markdown')
CSV_COLUMNS = ['descriptor', 'field', 'quantity', 'predicted', 'computed', 'verdict', 'millis']


def field_label(field: dict) -> str:
    q = field['p'] ** field['k']
    return f"F{q}" if field['k'] == 1 else f"F{q}{field['modulus']}".replace(' ', '')


def compact(obj) -> str:
    return json.dumps(obj, separators=(',', ':'), sort_keys=True)


def predicted_text(predictions: Sequence[Prediction]) -> str:
    parts = [str(p.value) if p.exact else f">={p.value}" for p in predictions]
    return ';'.join(dict.fromkeys(parts))


class ReportWriter:
    """Renders verification reports, compute records and tables as json, csv or markdown."""

    def __init__(self, fmt: str = 'json'):
        if fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
        self.fmt = fmt

    # --- verification ---

    def verification(self, reports: List[VerificationReport], suite: Optional[str] = None) -> str:
        if self.fmt == 'json':
            payload = {
                'version': Config.VERSION,
                'suite': suite,
                'reports': [r.to_dict() for r in reports],
                'verdict': 'pass' if all(r.verdict == 'pass' for r in reports) else 'fail',
            }
            return self._json(payload)
        rows = []
        for report in reports:
            for res in report.results:
                rows.append({
                    'descriptor': report.label or compact(report.descriptor),
                    'field': field_label(report.field_spec),
                    'quantity': res.target,
                    'predicted': predicted_text(res.predictions),
                    'computed': '' if res.computed is None else res.computed,
                    'verdict': res.verdict,
                    'millis': '' if res.millis is None else res.millis,
                })
        if self.fmt == 'csv':
            return self._csv(rows)
        return self._markdown(CSV_COLUMNS[:-1] + (['millis'] if any(r['millis'] != '' for r in rows) else []),
                              rows)

    # --- compute / invariants ---

    def record(self, record: dict) -> str:
        if self.fmt == 'json':
            return self._json(record)
        row = {
            'descriptor': compact(record['descriptor']),
            'field': field_label(record['field']),
            'quantity': record['quantity'],
            'predicted': '',
            'computed': record['value'],
            'verdict': '',
            'millis': '' if record.get('millis') is None else record['millis'],
        }
        if self.fmt == 'csv':
            return self._csv([row])
        lines = self._markdown(CSV_COLUMNS, [row])
        if record.get('witness'):
            lines += f"\nwitness: {record['witness']}\n"
        return lines

    # --- tables ---

    def table(self, title: str, columns: List[str], rows: List[dict]) -> str:
        if self.fmt == 'json':
            return self._json({'table': title, 'columns': columns, 'rows': rows})
        if self.fmt == 'csv':
            return self._csv(rows, columns)
        return f"## {title}\n\n" + self._markdown(columns, rows)

    # --- encoders ---

    @staticmethod
    def _json(payload) -> str:
        return json.dumps(payload, indent=2, sort_keys=True) + '\n'

    @staticmethod
    def _csv(rows: List[dict], columns: List[str] = CSV_COLUMNS) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, '') for c in columns})
        return buf.getvalue()

    @staticmethod
    def _markdown(columns: List[str], rows: List[dict]) -> str:
        lines = ['| ' + ' | '.join(columns) + ' |',
                 '|' + '|'.join('---' for _ in columns) + '|']
        for row in rows:
            lines.append('| ' + ' | '.join(str(row.get(c, '')) for c in columns) + ' |')
        return '\n'.join(lines) + '\n'
