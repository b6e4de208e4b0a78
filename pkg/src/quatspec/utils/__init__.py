"""
Utilities for the quatspec library
"""
import concurrent.futures

from cryptography.hazmat.backends import default_backend
from cryptography.hazmat.primitives import hashes


def parallel_map(func, items, threads=1):
    """
    Apply func to every item, keeping the order of items in the result.

    :param func: Callable taking one item
    :param items: Iterable of inputs
    :param int threads: Worker count; 1 or less evaluates serially
    :returns: list of results in input order
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def format_float(value):
    """
    Format a real number with 17 significant digits, '.' as decimal mark.
    """
    return format(float(value), '.17g')


def complex_pair(value):
    """
    Return a complex number as the JSON pair ``[re, im]``.
    """
    value = complex(value)
    return [value.real, value.imag]


def sha256_hex(data):
    """
    Return the hex SHA-256 digest of a byte string.

    :param bytes data: The bytes to digest
    """
    digest = hashes.Hash(hashes.SHA256(), backend=default_backend())
    digest.update(data)
    return digest.finalize().hex()
