#!/usr/bin/env python3
"""
End-to-end checks of the sepdeg command line
"""

import csv
import io
import json

import pytest

from sepdeg.cli import main
from sepdeg.config import Config

V2 = '{"type":"jordan","p":2,"r":1,"n":2}'
V3 = '{"type":"jordan","p":2,"r":2,"n":3}'
V4 = '{"type":"jordan","p":2,"r":2,"n":4}'
Z9_V4 = '{"type":"jordan","p":3,"r":2,"n":4}'
W_PAIR = ('{"type":"sum","summands":[{"type":"w","p":2,"r":1,"m":3,"n":2,"lambda":[1]},'
          '{"type":"w","p":2,"r":1,"m":3,"n":1,"lambda":{"order":3}}]}')


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_invariants_listing(capsys):
    code, out = run(capsys, 'invariants', '--desc', V2, '--degree', '2', '--format', 'markdown')
    assert code == 0
    assert out == "dim=2: x1^2 ; x1*x2 + x2^2\n"

    code, out = run(capsys, 'invariants', '--desc', V2, '--degree', '0', '--format', 'markdown')
    assert out == "dim=1: 1\n"


def test_invariants_json(capsys):
    code, out = run(capsys, 'invariants', '--desc', V3, '--degree', '1')
    record = json.loads(out)
    assert code == 0
    assert record['dimension'] == 1
    assert record['basis'] == ['x1']
    assert record['version'] == Config.VERSION

    _, out = run(capsys, 'invariants', '--desc', V3, '--degree', '4', '--dims-only')
    assert json.loads(out)['basis'] is None


def test_compute(capsys):
    code, out = run(capsys, 'compute', 'epsilon', '--desc', V3, '--point', '[0,0,1]')
    assert code == 0
    assert json.loads(out)['value'] == 4

    _, out = run(capsys, 'compute', 'delta', '--desc', Z9_V4)
    assert json.loads(out)['value'] == 9

    _, out = run(capsys, 'compute', 'gamma', '--desc', W_PAIR)
    record = json.loads(out)
    assert record['value'] == 3
    assert record['field']['k'] == 2
    assert record['millis'] is None


def test_verify_exit_codes(capsys):
    code, out = run(capsys, 'verify', '--desc', V4, '--targets', 'delta')
    assert code == 0
    assert json.loads(out)['verdict'] == 'pass'

    code, out = run(capsys, 'verify', '--desc', V4, '--targets', 'delta', '--expect', 'delta=5')
    assert code == 1
    assert json.loads(out)['verdict'] == 'fail'


def test_verify_csv(capsys):
    code, out = run(capsys, 'verify', '--desc', V3, '--targets', 'epsilon@[0,0,1],delta',
                    '--format', 'csv')
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["descriptor", "field", "quantity", "predicted", "computed", "verdict", "millis"]
    assert rows[1][1:] == ["F2", "delta", "4;>=4", "4", "pass", ""]
    assert rows[2][2] == "epsilon@[0,0,1]"
    assert json.loads(rows[1][0])["n"] == 3


def test_input_errors_exit_2(capsys):
    assert main(['compute', 'delta', '--desc', '{not json']) == 2
    assert main(['compute', 'delta', '--desc', V3, '--field', '{"p":4,"k":1}']) == 2
    assert main(['compute', 'epsilon', '--desc', V3]) == 2
    assert main(['compute', 'epsilon', '--desc', V3, '--point', '[0,0,0]']) == 2
    assert main(['verify', '--desc', V3, '--targets', 'sigma']) == 2
    with pytest.raises(SystemExit):
        main(['compute', 'theta', '--desc', V3])


def test_resource_errors_exit_3(capsys):
    assert main(['compute', 'delta', '--desc', V4, '--group-cap', '2']) == 3
    assert main(['compute', 'gamma', '--desc', V2, '--point-cap', '1']) == 3


def test_tables(capsys):
    code, out = run(capsys, 'tables', 'cyclic-epsilon', '--format', 'markdown')
    assert code == 0
    assert "| 3 | 4 | 4 | pass |" in out

    code, out = run(capsys, 'tables', 'klein', '--format', 'markdown')
    assert code == 0
    assert "| W3 | 2 | 2 | pass |" in out
    assert "| V5 | 4 | 4 | pass |" in out


def test_out_file(capsys, tmp_path):
    target = tmp_path / 'reports' / 'v3.json'
    code = main(['verify', '--desc', V3, '--targets', 'delta,gamma', '--out', str(target)])
    assert code == 0
    assert capsys.readouterr().out == ''
    assert json.loads(target.read_text())['reports'][0]['results'][1]['target'] == 'gamma'


def test_reports_are_deterministic(capsys):
    argv = ['verify', '--desc', V3, '--targets', 'gamma,delta,lemma_divide@3']
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second


def test_compute_delta_over_an_explicit_large_field(capsys):
    code, out = run(capsys, 'compute', 'delta', '--desc', '{"type":"jordan","p":5,"r":1,"n":2}',
                    '--field', '{"p":5,"k":4}')
    record = json.loads(out)
    assert code == 0
    assert record['value'] == 5
    assert record['field']['k'] == 4


def test_oversized_order_root_exits_2(capsys):
    desc = '{"type":"w","p":2,"r":1,"m":37,"n":1,"lambda":{"order":37}}'
    assert main(['compute', 'delta', '--desc', desc]) == 2


def test_skipped_table_rows_do_not_fail_the_run(capsys, monkeypatch):
    monkeypatch.setattr(Config, 'COMPONENT_LIMIT', 2)
    code, out = run(capsys, 'tables', 'cyclic-epsilon')
    rows = json.loads(out)['rows']
    assert code == 0
    assert [row['verdict'] for row in rows] == ['pass', 'pass', 'skipped', 'skipped']
    assert [row['computed'] for row in rows] == [1, 2, None, None]
    assert [row['predicted'] for row in rows] == [1, 2, 4, 4]

if __name__ == '__main__':
    checks = [
        (['invariants', '--desc', V2, '--degree', '2', '--format', 'markdown'], 0),
        (['compute', 'epsilon', '--desc', V3, '--point', '[0,0,1]'], 0),
        (['verify', '--desc', V4, '--targets', 'delta'], 0),
        (['verify', '--desc', V4, '--targets', 'delta', '--expect', 'delta=5'], 1),
        (['compute', 'delta', '--desc', '{not json'], 2),
        (['compute', 'delta', '--desc', V4, '--group-cap', '2'], 3),
    ]
    print("Testing sepdeg command line")
    print("=" * 30)
    for argv, expected in checks:
        code = main(argv)
        mark = "✓" if code == expected else "✗"
        print(f"{mark} {' '.join(argv[:2])} -> exit {code} (expected {expected})")
