"""Exception hierarchy shared by every sepdeg module.

InputError subclasses describe bad user input (CLI exit code 2),
EngineError subclasses describe resource limits or internal failures
(CLI exit code 3).
"""


class SepdegError(Exception):
    exit_code = 3


class InputError(SepdegError):
    exit_code = 2


class EngineError(SepdegError):
    exit_code = 3


# --- input errors -----------------------------------------------------------

class NonPrime(InputError):
    def __init__(self, p):
        self.p = p
        super().__init__(f"characteristic {p} is not prime")


class ReducibleModulus(InputError):
    def __init__(self, p, modulus):
        self.p = p
        self.modulus = tuple(modulus)
        super().__init__(f"modulus {list(modulus)} is reducible over F_{p}")


class BadDegree(InputError):
    pass


class FieldMismatch(InputError):
    pass


class BadParameter(InputError):
    pass


class DescriptorError(InputError):
    pass


class ArityMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class LabelMismatch(InputError):
    pass


class UnknownGenerator(InputError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"unknown generator label {label!r}")


class DegreeMismatch(InputError):
    pass


class ZeroPoint(InputError):
    def __init__(self):
        super().__init__("epsilon is undefined at the zero vector")


class EmptySupport(InputError):
    pass


class NotFaithful(InputError):
    pass


class TrivialModule(InputError):
    pass


class NotCyclicJordan(InputError):
    pass


class UnknownTable(InputError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown table {name!r}")


class FieldTooLarge(InputError):
    def __init__(self, p, k, limit):
        self.p = p
        self.k = k
        super().__init__(f"F_{p}^{k} has more than {limit} elements")


class NoSuchRoot(InputError):
    def __init__(self, m, q):
        self.m = m
        self.q = q
        super().__init__(f"no element of order {m} in F_{q}: {m} does not divide {q - 1}")


class NotUnipotent(InputError):
    pass


class NotPGroup(InputError):
    pass


class BadGroupOrder(InputError):
    pass


# --- engine errors ----------------------------------------------------------

class DivisionByZero(EngineError, ZeroDivisionError):
    pass


class Singular(EngineError):
    pass


class CapExceeded(EngineError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"group closure exceeds cap {cap} (raise --group-cap)")


class PointBudgetExceeded(EngineError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} projective points exceed point cap {cap} (raise --point-cap)")


class NotSeparated(EngineError):
    def __init__(self, max_degree):
        self.max_degree = max_degree
        super().__init__(f"no invariant of degree <= {max_degree} separates the point")


class InvariantCheckFailed(EngineError):
    pass


class ComponentTooLarge(EngineError):
    def __init__(self, columns, limit):
        self.columns = columns
        self.limit = limit
        super().__init__(f"dense block of {columns} monomials exceeds the component limit {limit} "
                         f"(raise SEPDEG_COMPONENT_LIMIT)")


class BudgetExceeded(EngineError):
    def __init__(self, seconds, degree):
        self.seconds = seconds
        self.degree = degree
        super().__init__(f"time budget of {seconds}s exhausted before degree {degree}")
