import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from sepdeg.core.errors import BadDegree, DescriptorError
from sepdeg.core.gf import FieldSpec, default_field, fq_make, root_of_unity, smallest_degree_for
from sepdeg.core.linalg import vector
from sepdeg.core.oracle import Target
from sepdeg.core.reps import (
    BorelDesc, DihedralDesc, DualDesc, JordanDesc, KleinDesc, ModuleDescriptor, PermDesc,
    SumDesc, SymPowerDesc, WModuleDesc, characteristic, lambda_coords,
)

logger = logging.getLogger(__name__)

TYPE_ALIASES = {
    'w_module': 'w',
    'sym_power': 'sym',
    'direct_sum': 'sum',
}


class DescriptorParser:
    """Turns the JSON descriptor schema into descriptor objects."""

    _degrees: Dict[int, int] = {}

    def load(self, text: Optional[str] = None, path: Optional[str] = None) -> ModuleDescriptor:
        if path is not None:
            try:
                text = Path(path).read_text()
            except OSError as e:
                raise DescriptorError(f"cannot read descriptor file {path}: {e}")
        if text is None:
            raise DescriptorError("no descriptor given (use --desc or --desc-file)")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise DescriptorError(f"descriptor is not valid JSON: {e}")
        return self.parse(obj)

    def parse(self, obj) -> ModuleDescriptor:
        self._degrees = self._order_degrees(obj)
        return self._parse(obj)

    def _parse(self, obj) -> ModuleDescriptor:
        if not isinstance(obj, dict) or 'type' not in obj:
            raise DescriptorError(f"descriptor must be an object with a 'type', got {obj!r}")
        kind = TYPE_ALIASES.get(obj['type'], obj['type'])
        handler = getattr(self, f"_parse_{kind}", None)
        if handler is None:
            raise DescriptorError(f"unknown descriptor type {obj['type']!r}")
        return handler(obj)

    # --- helpers ---

    @staticmethod
    def _int(obj: dict, key: str, default=None) -> int:
        value = obj.get(key, default)
        if value is None:
            raise DescriptorError(f"{obj.get('type')} descriptor needs '{key}'")
        if isinstance(value, bool) or not isinstance(value, int):
            raise DescriptorError(f"'{key}' must be an integer, got {value!r}")
        return value

    def _order_degrees(self, obj) -> Dict[int, int]:
        """Per characteristic, the smallest degree holding every {"order": m} lambda in obj."""
        orders: Dict[int, List[int]] = {}
        stack = [obj]
        while stack:
            node = stack.pop()
            if not isinstance(node, dict):
                continue
            p = 2 if node.get('type') == 'klein' else node.get('p')
            value = node.get('lambda')
            if isinstance(p, int) and isinstance(value, dict) and isinstance(value.get('order'), int):
                orders.setdefault(p, []).append(value['order'])
            stack.append(node.get('inner'))
            if isinstance(node.get('summands'), list):
                stack.extend(node['summands'])
        return {p: smallest_degree_for(p, ms) for p, ms in orders.items()}

    def _lambda(self, obj: dict, p: int, default=(1,)):
        """Coordinates of lambda: a coordinate list, an integer, or {"order": m}.

        An order resolves to the first element of that order in the smallest
        field holding every order named in the descriptor.
        """
        value = obj.get('lambda', list(default))
        if isinstance(value, int) and not isinstance(value, bool):
            return (value,)
        if isinstance(value, dict) and 'order' in value:
            m = int(value['order'])
            k = self._degrees.get(p) or smallest_degree_for(p, [m])
            spec = default_field(p, k)
            return tuple(root_of_unity(spec, m).coeffs)
        if isinstance(value, list) and all(isinstance(c, int) for c in value) and value:
            return tuple(value)
        raise DescriptorError(f"lambda must be a coordinate list, an integer or {{'order': m}}, got {value!r}")

    # --- one parser per descriptor type ---

    def _parse_jordan(self, obj):
        return JordanDesc(self._int(obj, 'p'), self._int(obj, 'r'), self._int(obj, 'n'))

    def _parse_w(self, obj):
        p = self._int(obj, 'p')
        return WModuleDesc(p, self._int(obj, 'r'), self._int(obj, 'm'), self._int(obj, 'n'),
                           self._lambda(obj, p))

    def _parse_klein(self, obj):
        variant = obj.get('variant')
        if variant == 'regular':
            return KleinDesc('regular')
        m = self._int(obj, 'm')
        lam = self._lambda(obj, 2, default=(0,)) if variant == 'v2m' else (0,)
        return KleinDesc(variant, m, lam)

    def _parse_perm(self, obj):
        n = self._int(obj, 'n')
        gens = obj.get('gens', obj.get('generators'))
        if not isinstance(gens, list) or not all(isinstance(g, list) for g in gens):
            raise DescriptorError("perm descriptor needs 'gens': a list of image lists")
        p = obj.get('p')
        return PermDesc(n, tuple(tuple(int(i) for i in g) for g in gens),
                        self._int(obj, 'p') if p is not None else None)

    def _parse_borel(self, obj):
        return BorelDesc(self._int(obj, 'p'))

    def _parse_dihedral(self, obj):
        return DihedralDesc(self._int(obj, 'n'), self._int(obj, 'p', 2))

    def _parse_sym(self, obj):
        if 'inner' not in obj:
            raise DescriptorError("sym descriptor needs 'inner'")
        return SymPowerDesc(self._parse(obj['inner']), self._int(obj, 'n'))

    def _parse_dual(self, obj):
        if 'inner' not in obj:
            raise DescriptorError("dual descriptor needs 'inner'")
        return DualDesc(self._parse(obj['inner']))

    def _parse_sum(self, obj):
        summands = obj.get('summands')
        if not isinstance(summands, list) or not summands:
            raise DescriptorError("sum descriptor needs a nonempty 'summands' list")
        return SumDesc(tuple(self._parse(s) for s in summands))


def parse_field(text: str) -> FieldSpec:
    """'{"p":2,"k":2,"modulus":[1,1,1]}'; modulus may be omitted."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DescriptorError(f"field is not valid JSON: {e}")
    if not isinstance(obj, dict) or 'p' not in obj:
        raise DescriptorError("field must be an object with 'p' (and optional 'k', 'modulus')")
    p, k = int(obj['p']), int(obj.get('k', 1))
    if k < 1:
        raise BadDegree(f"extension degree must be >= 1, got {k}")
    if 'modulus' in obj:
        return fq_make(p, k, obj['modulus'])
    fq_make(p, 1, (0, 1))  # rejects a non-prime p before any modulus search
    return default_field(p, k)


def field_for(desc: ModuleDescriptor, override: Optional[FieldSpec] = None) -> FieldSpec:
    """The override, else the default field the lambda coordinates are written in.

    A coordinate list of length L is read in the default F_{p^L}; lambdas in the
    prime subfield fit any field.
    """
    if override is not None:
        return override
    p = characteristic(desc)
    if p is None:
        raise DescriptorError("descriptor does not fix a characteristic; add 'p' or pass --field")
    lengths = set()
    for coords in lambda_coords(desc):
        if any(c % p for c in coords[1:]):
            lengths.add(len(coords))
    if len(lengths) > 1:
        raise DescriptorError(
            f"lambda coordinates of lengths {sorted(lengths)} name different fields; pass --field")
    k = lengths.pop() if lengths else 1
    spec = default_field(p, k)
    logger.info(f"Using default field {spec.name} (modulus {list(spec.modulus)})")
    return spec


def parse_point(text: str, spec: FieldSpec) -> np.ndarray:
    """'[0,0,1]' or '[[0,1],0]': entries are prime residues or coordinate lists."""
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as e:
        raise DescriptorError(f"point is not valid JSON: {e}")
    if not isinstance(entries, list):
        raise DescriptorError(f"point must be a list, got {entries!r}")
    return vector(spec, entries)


def split_targets(text: str) -> List[str]:
    """Split on commas that are not inside brackets."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == '[':
            depth += 1
        elif ch == ']':
            depth -= 1
        if ch == ',' and depth == 0:
            parts.append(''.join(current).strip())
            current = []
        else:
            current.append(ch)
    parts.append(''.join(current).strip())
    return [p for p in parts if p]


def parse_targets(text: str, spec: FieldSpec) -> List[Target]:
    targets = []
    for item in split_targets(text):
        name, _, arg = item.partition('@')
        if name in ('delta', 'gamma', 'klein_absence') and not arg:
            targets.append(Target(name))
        elif name == 'epsilon' and arg:
            targets.append(Target('epsilon', tuple(int(c) for c in parse_point(arg, spec))))
        elif name == 'lemma_divide' and arg.isdigit():
            targets.append(Target('lemma_divide', (int(arg),)))
        else:
            raise DescriptorError(f"unknown target {item!r}")
    if not targets:
        raise DescriptorError("no targets given")
    return targets


def parse_expectations(items: Sequence[str]) -> Dict[str, int]:
    """'delta=4' style pairs."""
    out = {}
    for item in items or ():
        name, sep, value = item.partition('=')
        if not sep or name not in ('delta', 'gamma', 'epsilon') or not value.lstrip('-').isdigit():
            raise DescriptorError(f"expectation must look like delta=4, got {item!r}")
        out[name] = int(value)
    return out
