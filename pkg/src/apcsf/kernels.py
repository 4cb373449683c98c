"""Kernel selection: the compiled extension when built, else pure Python.

``BACKEND`` names the implementation in use (``"cython"`` or ``"python"``).
"""

from . import _blocktri_py

try:
    from . import _blocktri as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _blocktri_py.block_thomas}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.block_thomas

BACKEND = "cython" if _compiled is not None else "python"
block_thomas = BACKENDS[BACKEND]


def get_block_thomas(backend=None):
    """Return the kernel for ``backend`` (default: the selected one)."""
    if backend is None:
        return block_thomas
    try:
        return BACKENDS[backend]
    except KeyError:
        raise ValueError(f"backend {backend!r} unavailable; have {sorted(BACKENDS)}") from None
