"""Ordered fan-out for exhaustive sweeps."""
import logging
from concurrent.futures import ProcessPoolExecutor

from .conf import lab_settings

logger = logging.getLogger(__name__)


def ordered_map(fn, items, jobs=None):
    """Map ``fn`` over ``items``, returning results in input order.

    ``fn`` and the items must be picklable when ``jobs`` > 1.
    """
    items = list(items)
    jobs = lab_settings.JOBS if jobs is None else jobs
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug('Fanning %d items out to %d workers', len(items), jobs)
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
