import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from sepdeg.config import Config
from sepdeg.core.errors import BadParameter, SepdegError, UnknownTable
from sepdeg.core.invariants import InvariantEngine
from sepdeg.core.oracle import verify
from sepdeg.core.reps import build
from sepdeg.core.suite import cyclic_epsilon_table, klein_table, pm_table, run_suite
from sepdeg.utils.descriptor_parser import (
    DescriptorParser, field_for, parse_expectations, parse_field, parse_point, parse_targets,
)
from sepdeg.utils.report_writer import FORMATS, ReportWriter

logger = logging.getLogger(__name__)

TABLES = ('klein', 'cyclic-epsilon', 'pm-trichotomy')


@dataclass
class RunConfig:
    command: str
    desc: Optional[str] = None
    desc_file: Optional[str] = None
    field_json: Optional[str] = None
    degree: Optional[int] = None
    point: Optional[str] = None
    quantity: Optional[str] = None
    targets: Optional[str] = None
    suite: Optional[str] = None
    expect: List[str] = field(default_factory=list)
    table: Optional[str] = None
    p: int = 2
    r: int = 2
    fmt: str = 'json'
    out: Optional[str] = None
    group_cap: int = Config.GROUP_CAP
    point_cap: int = Config.POINT_CAP
    jobs: int = Config.JOBS
    timings: bool = False
    dims_only: bool = False
    seed: Optional[int] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        values = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__}
        values['fmt'] = args.format
        values['field_json'] = args.field
        return cls(**values)


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='sepdeg',
        description='Exact epsilon/delta/gamma separation degrees of modular representations',
    )
    parser.add_argument('--version', action='version', version=f"sepdeg {Config.VERSION}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--desc', help='inline JSON module descriptor')
    common.add_argument('--desc-file', help='path to a JSON module descriptor')
    common.add_argument('--field', help='field override, e.g. \'{"p":2,"k":2,"modulus":[1,1,1]}\'')
    common.add_argument('--format', choices=FORMATS, default='json')
    common.add_argument('--out', help='write the report here instead of stdout')
    common.add_argument('--group-cap', type=positive_int, default=Config.GROUP_CAP)
    common.add_argument('--point-cap', type=positive_int, default=Config.POINT_CAP)
    common.add_argument('--jobs', type=positive_int, default=Config.JOBS)
    common.add_argument('--timings', action='store_true', help='record wall-clock millis')
    common.add_argument('--seed', type=int, help='reserved for sampling diagnostics')

    sub = parser.add_subparsers(dest='command', required=True)

    inv = sub.add_parser('invariants', parents=[common], help='basis of F[V]^G in one degree')
    inv.add_argument('--degree', type=int, required=True)
    inv.add_argument('--dims-only', action='store_true')

    comp = sub.add_parser('compute', parents=[common], help='compute epsilon, delta or gamma')
    comp.add_argument('quantity', choices=('epsilon', 'delta', 'gamma'))
    comp.add_argument('--point', help="point for epsilon, e.g. '[0,0,1]'")
    comp.add_argument('--degree', type=positive_int, help='maximal degree searched for epsilon')

    ver = sub.add_parser('verify', parents=[common], help='compare predictions with brute force')
    ver.add_argument('--targets', help="e.g. 'delta,gamma,epsilon@[0,0,1],lemma_divide@4'")
    ver.add_argument('--suite', choices=('paper',))
    ver.add_argument('--expect', action='append', default=[], help='quantity=value')

    tab = sub.add_parser('tables', parents=[common], help='render a classification table')
    tab.add_argument('table', choices=TABLES)
    tab.add_argument('--p', type=positive_int, default=2)
    tab.add_argument('--r', type=positive_int, default=2)
    return parser


class Commands:
    """One method per subcommand; each returns (text, exit code)."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.engine = InvariantEngine(config.group_cap, config.point_cap)
        self.writer = ReportWriter(config.fmt)

    def _module(self):
        desc = DescriptorParser().load(self.config.desc, self.config.desc_file)
        override = parse_field(self.config.field_json) if self.config.field_json else None
        spec = field_for(desc, override)
        return desc, spec, build(desc, spec)

    def _header(self, desc, spec) -> dict:
        return {
            'version': Config.VERSION,
            'descriptor': desc.to_dict(),
            'field': spec.to_dict(),
            'caps': {'group_cap': self.engine.group_cap, 'point_cap': self.engine.point_cap},
        }

    def invariants(self):
        desc, spec, rep = self._module()
        d = self.config.degree
        if self.config.dims_only:
            dim = self.engine.invariant_dimension(rep, d)
            basis = None
        else:
            graded = self.engine.invariant_basis(rep, d)
            dim, basis = graded.dimension, [str(f) for f in graded.basis]
        if self.config.fmt == 'json':
            record = dict(self._header(desc, spec), degree=d, dimension=dim, basis=basis)
            return self.writer.record(record), 0
        text = f"dim={dim}"
        if basis:
            text += ': ' + ' ; '.join(basis)
        return text + '\n', 0

    def compute(self):
        desc, spec, rep = self._module()
        start = time.monotonic()
        record = dict(self._header(desc, spec), quantity=self.config.quantity)
        if self.config.quantity == 'epsilon':
            if not self.config.point:
                raise BadParameter("compute epsilon needs --point")
            result = self.engine.epsilon(rep, parse_point(self.config.point, spec), self.config.degree)
            record.update(value=result.degree_found, point=list(result.point),
                          witness=str(result.witness), per_degree_dims=list(result.per_degree_dims))
        else:
            sweep = (self.engine.delta_sweep(rep) if self.config.quantity == 'delta'
                     else self.engine.gamma_sweep(rep))
            record.update(value=sweep.value, point_count=sweep.point_count,
                          point=list(sweep.worst_point) if sweep.worst_point is not None else None,
                          witness=str(sweep.witness) if sweep.witness is not None else None,
                          per_degree_dims=list(sweep.per_degree_dims))
        record['millis'] = int((time.monotonic() - start) * 1000) if self.config.timings else None
        return self.writer.record(record), 0

    def verify(self):
        if self.config.suite:
            reports = run_suite(self.engine, self.config.jobs, self.config.timings)
        else:
            desc, spec, _ = self._module()
            if not self.config.targets:
                raise BadParameter("verify needs --targets or --suite paper")
            targets = parse_targets(self.config.targets, spec)
            expectations = parse_expectations(self.config.expect)
            reports = [verify(desc, spec, targets, expectations, self.engine, self.config.jobs,
                              self.config.timings)]
        failed = any(r.verdict != 'pass' for r in reports)
        return self.writer.verification(reports, self.config.suite), 1 if failed else 0

    def tables(self):
        name = self.config.table
        if name == 'klein':
            title, columns, rows = klein_table(self.engine, self.config.jobs)
        elif name == 'cyclic-epsilon':
            title, columns, rows = cyclic_epsilon_table(self.config.p, self.config.r, self.engine)
        elif name == 'pm-trichotomy':
            title, columns, rows = pm_table(self.engine)
        else:
            raise UnknownTable(name)
        failed = any(row['verdict'] == 'fail' for row in rows)
        return self.writer.table(title, columns, rows), 1 if failed else 0


def emit(text: str, out: Optional[str]):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"Report written to {path}")
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
                        format='%(levelname)s %(name)s: %(message)s')
    args = build_parser().parse_args(argv)
    config = RunConfig.from_args(args)
    handler = getattr(Commands(config), config.command)
    try:
        text, code = handler()
        emit(text, config.out)
        return code
    except SepdegError as e:
        logger.error(f"{config.command} failed: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return 3


if __name__ == '__main__':
    sys.exit(main())
