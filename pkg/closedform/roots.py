import logging
import math
from dataclasses import dataclass
from typing import Callable

from django.conf import settings
from scipy import optimize

from .exceptions import BracketError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootResult:
    root: float
    iterations: int


def increasing_root(fn: Callable[[float], float], dfn: Callable[[float], float], lo: float,
                    hi: float = 1.0) -> RootResult:
    """
    Root of a function increasing on [lo, +inf): the upper end of the bracket is
    grown geometrically until the sign changes, then bisection narrows it and a
    few Newton steps polish the result.
    """
    f_lo = fn(lo)
    if f_lo == 0:
        return RootResult(lo, 0)
    if f_lo > 0:
        raise BracketError(f'Residual is already positive at the lower end {lo} of the bracket')

    hi = max(hi, lo + 1.0)
    for _ in range(settings.ROOT_BRACKET_GROWTH_LIMIT):
        f_hi = fn(hi)
        if f_hi == 0:
            return RootResult(hi, 0)
        if f_hi > 0:
            break
        hi = lo + 2 * (hi - lo)
    else:
        raise BracketError(f'No sign change found up to {hi}')

    root, info = optimize.bisect(fn, lo, hi, xtol=settings.ROOT_BISECTION_XTOL, full_output=True)
    steps = settings.ROOT_NEWTON_STEPS
    if steps <= 0:
        return RootResult(root, info.iterations)
    polished = optimize.newton(fn, root, fprime=dfn, maxiter=steps, tol=1e-15, disp=False)
    if not math.isfinite(polished) or abs(fn(polished)) > abs(fn(root)):
        logger.debug(f'Newton polish rejected at {polished}, keeping bisection root {root}')
        polished = root
    return RootResult(float(polished), info.iterations + steps)


def sign_changes(fn: Callable[[float], float], lo: float, hi: float, samples: int = 10000) -> int:
    """ Number of sign changes of ``fn`` on a uniform sampling of [lo, hi] """
    step = (hi - lo) / (samples - 1)
    signs = [math.copysign(1.0, fn(lo + i * step)) for i in range(samples)]
    return sum(1 for left, right in zip(signs[:-1], signs[1:]) if left != right)
