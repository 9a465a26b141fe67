"""Growth-function expressions and the admissible-function bound calculus.

Expressions are evaluated in signed log space, so ``exp(n^2)`` at n = 1e100
has the finite ``log f(n) = 1e200`` although f itself overflows. Every analytic check here is a scan over
an explicit grid and says so in its report.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

EPS_REL = 1e-12
NEG_INF = -math.inf

# ---------------------------------------------------------------- parsing


class GrowthExprError(ValueError):
    def __init__(self, msg: str, pos: Optional[int] = None):
        self.pos = pos
        super().__init__(f"{msg} at offset {pos}" if pos is not None else msg)


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|(exp|log|n)\b|(.))")


def _tokenize(src: str):
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(("num", float(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            out.append((m.group(2), None, m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise GrowthExprError(f"unexpected character {ch!r}", m.start(3))
            out.append((ch, None, m.start(3)))
        pos = m.end()
    out.append(("end", None, len(src)))
    return out


class _Parser:
    """expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
    factor := base ('^' factor)?; base := number | n | exp(expr) | log(expr) | (expr)"""

    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str):
        tok = self.toks[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[0])
            raise GrowthExprError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise GrowthExprError(f"unexpected {tok[0]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in "+-":
            op = self.take(self.peek()[0])[0]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take(self.peek()[0])[0]
            node = ("mul" if op == "*" else "div", node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek()[0] == "^":
            self.take("^")
            node = ("pow", node, self.factor())
        return node

    def base(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.i += 1
            return ("num", val)
        if kind == "n":
            self.i += 1
            return ("n",)
        if kind in ("exp", "log"):
            self.i += 1
            self.take("(")
            inner = self.expr()
            self.take(")")
            return (kind, inner)
        if kind == "(":
            self.i += 1
            inner = self.expr()
            self.take(")")
            return inner
        what = "end of input" if kind == "end" else repr(kind)
        raise GrowthExprError(f"expected a number, n, exp, log or '(', found {what}", pos)


def to_source(node) -> str:
    kind = node[0]
    if kind == "num":
        return repr(node[1]) if node[1] != int(node[1]) or abs(node[1]) >= 1e16 else str(int(node[1]))
    if kind == "n":
        return "n"
    if kind in ("exp", "log"):
        return f"{kind}({to_source(node[1])})"
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[kind]
    return f"({to_source(node[1])}{sym}{to_source(node[2])})"


# ---------------------------------------------------------------- evaluation
# A value is a pair (sign, log|v|); sign 0 means v = 0.


def _from_float(v: float):
    if v > 0:
        return (1, math.log(v))
    if v < 0:
        return (-1, math.log(-v))
    return (0, NEG_INF)


def _to_float(sv) -> float:
    s, l = sv
    if s == 0:
        return 0.0
    try:
        return s * math.exp(l)
    except OverflowError:
        return s * math.inf


def _add(x, y):
    (sx, lx), (sy, ly) = x, y
    if sx == 0:
        return y
    if sy == 0:
        return x
    if lx < ly:
        (sx, lx), (sy, ly) = (sy, ly), (sx, lx)
    d = ly - lx
    if sx == sy:
        return (sx, lx + math.log1p(math.exp(d)))
    t = -math.expm1(d)  # 1 - e^d
    if t <= 0:
        return (0, NEG_INF)
    return (sx, lx + math.log(t))


class _Domain(ArithmeticError):
    pass


def _compile(node) -> Callable[[float], tuple]:
    """Compile to a function of log n, so n itself may exceed the float range."""
    kind = node[0]
    if kind == "num":
        c = _from_float(node[1])
        return lambda n: c
    if kind == "n":
        def var(ln):
            return (1, ln)
        return var
    if kind == "exp":
        a = _compile(node[1])

        def exp_(n):
            return (1, _to_float(a(n)))
        return exp_
    if kind == "log":
        a = _compile(node[1])

        def log_(n):
            s, l = a(n)
            if s <= 0:
                raise _Domain("log of a non-positive value")
            return _from_float(l)
        return log_
    a, b = _compile(node[1]), _compile(node[2])
    if kind == "add":
        return lambda n: _add(a(n), b(n))
    if kind == "sub":
        def sub(n):
            sb, lb = b(n)
            return _add(a(n), (-sb, lb))
        return sub
    if kind == "mul":
        def mul(n):
            (sa, la), (sb, lb) = a(n), b(n)
            if sa == 0 or sb == 0:
                return (0, NEG_INF)
            return (sa * sb, la + lb)
        return mul
    if kind == "div":
        def div(n):
            (sa, la), (sb, lb) = a(n), b(n)
            if sb == 0:
                raise _Domain("division by zero")
            if sa == 0:
                return (0, NEG_INF)
            return (sa * sb, la - lb)
        return div
    if kind == "pow":
        def pow_(n):
            (sa, la), e = a(n), _to_float(b(n))
            if sa < 0:
                raise _Domain("negative base in a power")
            if sa == 0:
                if e > 0:
                    return (0, NEG_INF)
                raise _Domain("zero to a non-positive power")
            return (1, e * la)
        return pow_
    raise ValueError(f"unknown node {kind!r}")


def _log_n(n: float) -> float:
    if n <= 0:
        raise _Domain("n must be positive")
    return math.log(n)


@lru_cache(maxsize=256)
def _compiled(node) -> Callable[[float], tuple]:
    return _compile(node)


def _valid(fn, n: float) -> bool:
    try:
        s, l = fn(_log_n(n))
    except (_Domain, OverflowError, ValueError):
        return False
    return s > 0 and math.isfinite(l)


FLOOR_LIMIT = 10**6


def _find_floor(fn) -> int:
    small = list(range(1, 2049))
    big = sorted({int(round(2048 * 1.05**j)) for j in range(1, 400)} | {FLOOR_LIMIT})
    big = [x for x in big if 2048 < x <= FLOOR_LIMIT]
    grid = small + big
    ok = [_valid(fn, float(x)) for x in grid]
    if not ok[-1]:
        raise GrowthExprError(f"expression is not positive and finite at any n <= {FLOOR_LIMIT}")
    j = len(grid) - 1
    while j > 0 and ok[j - 1]:
        j -= 1
    if grid[j] <= 2048 or j == 0:
        return grid[j]
    lo, hi = grid[j - 1], grid[j]  # invalid at lo, valid at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _valid(fn, float(mid)):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class GrowthFn:
    """A real function of n given by an expression; see :func:`parse_growth_expr`."""

    src: str
    ast: tuple
    domain_floor: int
    _fn: Callable = field(repr=False, compare=False, default=None)

    def log(self, n: float) -> float:
        """log f(n); raises ValueError outside the domain."""
        try:
            return self.log_at(_log_n(float(n)))
        except _Domain as e:
            raise ValueError(f"{self.src} undefined at n={n}: {e}") from None

    def log_at(self, u: float) -> float:
        """log f(e^u); works past the float range of n."""
        try:
            s, l = self._fn(u)
        except _Domain as e:
            raise ValueError(f"{self.src} undefined at log n={u}: {e}") from None
        except OverflowError:
            raise ValueError(f"{self.src} overflows at log n={u}") from None
        if s <= 0:
            raise ValueError(f"{self.src} is not positive at log n={u}")
        return l

    def loglog_at(self, u: float) -> float:
        """log log f(e^u), exact in log space when f = exp(h) with h > 0."""
        if self.ast[0] == "exp":
            s, l = _compiled(self.ast[1])(u)
            if s <= 0:
                raise ValueError(f"log {self.src} <= 0 at log n={u}")
            return l
        lf = self.log_at(u)
        if lf <= 0:
            raise ValueError(f"log {self.src} <= 0 at log n={u}")
        return math.log(lf)

    def __call__(self, n: float) -> float:
        return _to_float(self._fn(_log_n(float(n))))

    def phi(self, x: float) -> float:
        """x / log f(x)."""
        lf = self.log(x)
        if lf <= 0:
            raise ValueError(f"log {self.src} <= 0 at x={x}; ratio x/log f undefined")
        return x / lf

    def __str__(self) -> str:
        return self.src


def parse_growth_expr(src: str) -> GrowthFn:
    ast = _Parser(src).parse()
    fn = _compile(ast)
    return GrowthFn(src, ast, _find_floor(fn), fn)


def as_growth_fn(f: Union[str, GrowthFn]) -> GrowthFn:
    return f if isinstance(f, GrowthFn) else parse_growth_expr(f)


def _log_of(g, n: float) -> float:
    if hasattr(g, "log"):
        return g.log(n)
    return math.log(g(n))


# ---------------------------------------------------------------- comparisons


def compare(x: float, y: float, eps: float = EPS_REL) -> int:
    """Sign of x - y, or 0 when they agree to relative ``eps`` (inconclusive)."""
    if x == y:
        return 0
    if math.isinf(x) or math.isinf(y):
        return 1 if x > y else -1
    scale = max(abs(x), abs(y))
    if abs(x - y) <= eps * scale:
        return 0
    return 1 if x > y else -1


def check_grid(n_lo: int, n_hi: int, dense: int = 256) -> list[int]:
    """Unit steps over the first ``dense`` integers, then dyadic points, then n_hi."""
    pts = set(range(n_lo, min(n_hi, n_lo + dense) + 1))
    p = 1
    while p <= n_hi:
        if p >= n_lo:
            pts.add(p)
        p *= 2
    pts.add(n_hi)
    return sorted(pts)


@dataclass
class PropertyCheck:
    holds: Optional[bool]  # None when only inconclusive ties were seen
    witness: Optional[float] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {"holds": self.holds, "witness": self.witness, "note": self.note}


@dataclass
class AdmissibilityReport:
    function: str
    n_lo: int
    n_hi: int
    increasing: PropertyCheck
    subexponential: PropertyCheck
    phi_increasing: PropertyCheck
    grid_size: int
    scope: str = "range-checked"

    @property
    def admissible(self) -> bool:
        return bool(self.increasing.holds and self.subexponential.holds and self.phi_increasing.holds)

    def to_dict(self) -> dict:
        return {
            "function": self.function, "n_lo": self.n_lo, "n_hi": self.n_hi, "scope": self.scope,
            "grid_size": self.grid_size, "admissible": self.admissible,
            "increasing": self.increasing.to_dict(), "subexponential": self.subexponential.to_dict(),
            "phi_increasing": self.phi_increasing.to_dict(),
        }


def _strict_increase(values: Sequence[float], grid: Sequence[int], label: str) -> PropertyCheck:
    tie = None
    for j in range(1, len(values)):
        c = compare(values[j], values[j - 1])
        if c < 0:
            return PropertyCheck(False, grid[j], f"{label} drops between {grid[j - 1]} and {grid[j]}")
        if c == 0 and tie is None:
            tie = grid[j]
    if tie is not None:
        return PropertyCheck(None, tie, f"{label} flat within slack at {tie}")
    return PropertyCheck(True)


def admissibility_report(f: Union[str, GrowthFn], n_lo: int, n_hi: int) -> AdmissibilityReport:
    f = as_growth_fn(f)
    if n_lo < f.domain_floor:
        raise ValueError(f"n_lo={n_lo} is below the domain floor {f.domain_floor}")
    if n_hi <= n_lo:
        raise ValueError("need n_hi > n_lo")
    grid = check_grid(n_lo, n_hi)
    logs = [f.log(n) for n in grid]
    inc = _strict_increase(logs, grid, "f")
    # log f(n)/n must not increase and must end strictly below where it started
    ratios = [l / n for l, n in zip(logs, grid)]
    sub = PropertyCheck(True)
    for j in range(1, len(ratios)):
        if compare(ratios[j], ratios[j - 1]) > 0:
            sub = PropertyCheck(False, grid[j], "log f(n)/n increases")
            break
    else:
        if compare(ratios[-1], ratios[0]) >= 0:
            sub = PropertyCheck(False, grid[-1], "log f(n)/n does not decrease over the range")
    if any(l <= 0 for l in logs):
        bad = grid[next(j for j, l in enumerate(logs) if l <= 0)]
        phi = PropertyCheck(False, bad, "log f <= 0, ratio n/log f undefined")
    else:
        phi = _strict_increase([n / l for n, l in zip(grid, logs)], grid, "n/log f(n)")
    return AdmissibilityReport(f.src, n_lo, n_hi, inc, sub, phi, len(grid))


# ---------------------------------------------------------------- inverse


class FStarError(ValueError):
    pass


def f_star(f: Union[str, GrowthFn], z: float, rel_tol: float = 1e-15) -> float:
    """The x with x / log f(x) = z, by bracketing and bisection."""
    f = as_growth_fn(f)
    lo = float(f.domain_floor)
    try:
        phi_lo = f.phi(lo)
    except ValueError:
        # step right until log f > 0
        while True:
            lo *= 2
            if lo > 1e300:
                raise FStarError(f"log {f.src} never becomes positive") from None
            try:
                phi_lo = f.phi(lo)
                break
            except ValueError:
                continue
    if z < phi_lo * (1 - 1e-12):
        raise FStarError(f"z={z} is below the range of n/log f (starts at {phi_lo} at x={lo})")
    hi = max(2 * lo, 2.0)
    phi_hi = f.phi(hi)
    while phi_hi < z:
        if compare(phi_hi, phi_lo) < 0:
            raise FStarError(f"x/log f(x) is not increasing near x={hi}; {f.src} is not admissible there")
        lo, phi_lo = hi, phi_hi
        if hi >= 1e300:
            raise FStarError(f"z={z} not reached by x/log f(x) below 1e300")
        hi = min(hi * hi if hi >= 4 else 2 * hi, 1e300)
        phi_hi = f.phi(hi)
    for _ in range(2000):
        if hi - lo <= rel_tol * hi:
            break
        # geometric midpoint while the bracket spans orders of magnitude
        mid = math.sqrt(lo) * math.sqrt(hi) if hi > 4 * lo and lo > 0 else 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        pm = f.phi(mid)
        if compare(pm, phi_lo) < 0 or compare(pm, phi_hi) > 0:
            raise FStarError(f"x/log f(x) is not monotone near x={mid}; {f.src} is not admissible there")
        if pm < z:
            lo, phi_lo = mid, pm
        else:
            hi, phi_hi = mid, pm
    if hi - lo > 1e-9 * hi:
        raise FStarError(f"bisection for z={z} stalled at [{lo}, {hi}]")
    x = hi if abs(phi_hi - z) <= abs(phi_lo - z) else lo
    return x


def log_f_star(f: Union[str, GrowthFn], z: float) -> float:
    """log f*(z); past 1e300 the root is found in u = log x instead."""
    f = as_growth_fn(f)
    try:
        return math.log(f_star(f, z))
    except FStarError as e:
        if "below 1e300" not in str(e):
            raise
    # psi(u) = u - log log f(e^u) is increasing for admissible f; solve psi = log z
    target = math.log(z)

    def psi(u):
        try:
            llf = f.loglog_at(u)
        except OverflowError:
            return math.inf  # treat as past the root
        if not math.isfinite(llf):
            return -math.inf if llf > 0 else math.inf
        return u - llf

    lo = math.log(1e300)
    hi = 2 * lo
    try:
        while psi(hi) < target:
            lo, hi = hi, 2 * hi
            if hi > 1e6:
                raise FStarError(f"z={z} not reached by x/log f(x) below exp(1e6)")
    except ValueError as e:
        raise FStarError(str(e)) from None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if psi(mid) < target:
            lo = mid
        else:
            hi = mid
    if not math.isfinite(psi(lo)) or abs(psi(lo) - target) > 1e-9 * max(1.0, abs(target)):
        raise FStarError(f"z={z}: f*(z) lies where log {f.src} overflows")
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------- bounds


@dataclass(frozen=True)
class BoundConstants:
    K: float = 20000.0
    Kprime: float = 20000.0

    def __post_init__(self):
        if not (self.K > 0 and self.Kprime > 0):
            raise ValueError("K and K' must be positive")

    @staticmethod
    def c(k: int) -> int:
        return (1 << (k + 1)) - 1

    def d(self, i: int) -> float:
        return (1 << (i + 1)) * self.K

    def d_prime(self, i: int) -> float:
        return (1 << (i + 1)) * self.Kprime

    @staticmethod
    def theta(m: int) -> int:
        return (1 << m) - 1

    def to_dict(self) -> dict:
        return {"K": self.K, "Kprime": self.Kprime}


def upsilon(g, i: int) -> float:
    """min of n / log g(n) over integers n with theta(i)/2 <= n <= theta(i)."""
    th = (1 << i) - 1
    if th < 1:
        raise ValueError("need i >= 1")
    lo = (th + 1) // 2
    best = math.inf
    for n in range(lo, th + 1):
        lg = _log_of(g, n)
        if lg <= 0:
            raise ValueError(f"log g({n}) <= 0; ratio undefined")
        best = min(best, n / lg)
    return best


def log_gamma_hat(g, i: int, H_order: int, T: float, n: int, ups: Optional[float] = None) -> float:
    """log of the three-regime envelope; boundaries take the larger formula."""
    th = (1 << i) - 1
    if T < th:
        raise ValueError(f"T={T} is below theta(i)={th}")
    if ups is None:
        ups = upsilon(g, i)
    first = lambda: _log_of(g, n)
    middle = lambda: n / ups
    top = lambda: (1 << i) * math.log(H_order) + _log_of(g, n)
    if n < th:
        return first()
    if n == th:
        vals = [first(), middle()] + ([top()] if n == T else [])
        return max(vals)
    if n < T:
        return middle()
    if n == T:
        return max(middle(), top())
    return top()


def gamma_hat(g, i: int, H_order: int, T: float, n: int, ups: Optional[float] = None) -> float:
    return _exp(log_gamma_hat(g, i, H_order, T, n, ups))


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def log_bound_U(f, g, i: int) -> float:
    f = as_growth_fn(f)
    ups = upsilon(g, i)
    return f_star(f, 2 * ups / 3) / ((1 << (i + 1)) * ups)


def bound_U(f, g, i: int) -> float:
    return _exp(log_bound_U(f, g, i))


@dataclass
class UReport:
    i: int
    upsilon: float
    log_U: float
    warnings: list

    def to_dict(self) -> dict:
        return {"i": self.i, "upsilon": self.upsilon, "log_U": self.log_U, "warnings": self.warnings,
                "scope": "range-checked"}


def bound_U_report(f, g, i: int, n_hi: Optional[int] = None) -> UReport:
    """log U with the side conditions (f/g increasing, f >= g^3 past theta(i)) scanned."""
    f = as_growth_fn(f)
    th = (1 << i) - 1
    n_hi = n_hi or max(4 * th, th + 64)
    warnings = []
    prev = None
    for n in check_grid(max(th, f.domain_floor), n_hi):
        lf, lg = f.log(n), _log_of(g, n)
        if prev is not None and compare(lf - lg, prev) < 0:
            warnings.append(f"f/g decreases at n={n}")
            break
        prev = lf - lg
    for n in check_grid(max(th + 1, f.domain_floor), n_hi):
        if compare(f.log(n), 3 * _log_of(g, n)) < 0:
            warnings.append(f"f < g^3 at n={n}")
            break
    return UReport(i, upsilon(g, i), log_bound_U(f, g, i), warnings)


def log_bound_L(f, i: int, Kprime: float) -> float:
    f = as_growth_fn(f)
    dp = (1 << (i + 1)) * Kprime
    return f_star(f, dp) / ((1 << i) * dp)


def bound_L(f, i: int, Kprime: float) -> float:
    return _exp(log_bound_L(f, i, Kprime))


def bound_N_from_U(U: float) -> float:
    return 0.5 * (2 * U) ** (1 / 3)


def bound_N(f, g, i: int) -> float:
    return bound_N_from_U(bound_U(f, g, i))


def log_bound_N(f, g, i: int) -> float:
    """log of 1/2 (2U)^(1/3), stable for huge U."""
    return (math.log(2) + log_bound_U(f, g, i)) / 3 - math.log(2)


# ---------------------------------------------------------------- growth-gap condition


def log_grid(n_lo: float, n_hi: float, per_decade: int = 40) -> list[float]:
    pts = set(float(n) for n in range(int(n_lo), int(min(n_hi, max(n_lo, 64))) + 1))
    if n_hi > 64:
        a, b = math.log10(max(n_lo, 64)), math.log10(n_hi)
        steps = max(1, int(math.ceil((b - a) * per_decade)))
        pts.update(10 ** (a + (b - a) * j / steps) for j in range(steps + 1))
    return sorted(p for p in pts if n_lo <= p <= n_hi)


@dataclass
class ConditionReport:
    mode: str
    C: float
    n_lo: float
    n_hi: float
    holds_from: Optional[float]
    grid_size: int
    margin_at_end: Optional[float]
    errors: list = field(default_factory=list)
    scope: str = "range-checked"

    def to_dict(self) -> dict:
        hf = self.holds_from
        return {
            "mode": self.mode, "C": self.C, "n_lo": self.n_lo, "n_hi": self.n_hi,
            "holds_from": (int(hf) if hf is not None and hf < 2**63 else hf),
            "grid_size": self.grid_size, "margin_at_end": self.margin_at_end,
            "errors": self.errors[:10], "n_errors": len(self.errors), "scope": self.scope,
        }


def _vi_margin(f1, f2, g1, C, n):
    lg = g1.log(n)
    lhs = _exp(math.log(lg) - math.log(C) - 2 * math.log(n) + log_f_star(f1, n / (C * lg)))
    rhs = math.log(C) + log_f_star(f2, C * n) - 2 * math.log(n)
    return lhs - rhs


def _vi_prime_value(f1, g1, n):
    lg = g1.log(n)
    return _exp(math.log(lg) - 2 * math.log(n) + log_f_star(f1, n / lg))


def condition_check(f1, f2, g1, mode: str = "vi", C: float = 1.0, n_lo: float = 2, n_hi: float = 1e9,
                    threshold: float = 1.0, per_decade: int = 40) -> ConditionReport:
    """Least grid point n0 from which the condition holds at every later grid point.

    ``vi``: exp[(log g1(n))/(C n^2) f1*(n/(C log g1(n)))] > C f2*(Cn)/n^2,
    compared in log space. ``vi_prime``: (log g1(n))/n^2 f1*(n/log g1(n))
    exceeds ``threshold`` and is increasing. Points where an f* argument is
    outside its range count as failures and are listed in ``errors``.
    """
    f1, f2, g1 = as_growth_fn(f1), as_growth_fn(f2), as_growth_fn(g1)
    if mode not in ("vi", "vi_prime"):
        raise ValueError(f"unknown mode {mode!r}")
    n_lo = max(n_lo, g1.domain_floor, 2)
    grid = log_grid(n_lo, n_hi, per_decade)
    ok = []
    errors = []
    margin = None
    prev = None
    for n in grid:
        try:
            if mode == "vi":
                margin = _vi_margin(f1, f2, g1, C, n)
                good = compare(margin, 0.0) > 0 if margin != 0 else False
            else:
                v = _vi_prime_value(f1, g1, n)
                margin = v - threshold
                good = v > threshold and (prev is None or v > prev)
                prev = v
        except (FStarError, ValueError) as e:
            errors.append({"n": n, "error": str(e)})
            good = False
            margin = None
        ok.append(good)
    holds_from = None
    for j in range(len(grid) - 1, -1, -1):
        if not ok[j]:
            break
        holds_from = grid[j]
    if holds_from is not None and holds_from < 2**53:
        holds_from = float(math.ceil(holds_from))
    return ConditionReport(mode, C, n_lo, n_hi, holds_from, len(grid), margin, errors)


# ---------------------------------------------------------------- comparators


@dataclass
class ComparisonReport:
    relation: str
    holds: bool
    c: Optional[float]
    points: int
    witness: Optional[float] = None
    scope: str = "range-checked"


C_GRID = [2.0**e for e in range(-10, 11)]


def _less_at(f: GrowthFn, g: GrowthFn, c: float, n: float) -> bool:
    try:
        return compare(f.log(n), g.log(c * n)) < 0
    except ValueError:
        return False


def preceq(f, g, n_lo: int, n_hi: int) -> ComparisonReport:
    """f(n) < g(cn) on every grid point, for the smallest c in 2^-10..2^10 that works."""
    f, g = as_growth_fn(f), as_growth_fn(g)
    grid = check_grid(n_lo, n_hi)
    witness = None
    for c in C_GRID:
        bad = next((n for n in grid if not _less_at(f, g, c, n)), None)
        if bad is None:
            return ComparisonReport("preceq", True, c, len(grid))
        witness = bad
    return ComparisonReport("preceq", False, None, len(grid), witness)


def ll(f, g, n_lo: int, n_hi: int) -> ComparisonReport:
    """f(n) < g(cn) at some grid point in the upper half of the range.

    Stands in for "infinitely many n"; a finite scan can only show it is
    still happening late in the range.
    """
    f, g = as_growth_fn(f), as_growth_fn(g)
    grid = [n for n in check_grid(n_lo, n_hi) if n >= (n_lo + n_hi) / 2]
    for c in C_GRID:
        hits = [n for n in grid if _less_at(f, g, c, n)]
        if hits:
            return ComparisonReport("ll", True, c, len(hits), hits[-1])
    return ComparisonReport("ll", False, None, 0)
