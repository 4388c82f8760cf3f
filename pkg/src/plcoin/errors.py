"""Exception taxonomy shared by the library and the command line tool.

Three failure families, mirrored by the CLI's exit codes:

* `InputError` (exit 2): the data itself is malformed — unreadable JSON, a
  vertex map naming unknown vertices, a simplex listing a vertex twice.
* `PreconditionError` (exit 3): the data is well-formed but violates a
  mathematical hypothesis of the requested operation — a non-manifold complex
  passed to the duality machinery, a support that is not a full subcomplex,
  a coincidence set that refuses to become simplicial within the subdivision
  budget.  Messages say what failed and what the caller can do about it.
* `VerificationError` (exit 1): inputs were fine, the computation ran, and a
  claimed identity did not hold.
"""


class InputError(ValueError):
    """Malformed input data (CLI exit code 2)."""


class PreconditionError(ValueError):
    """A mathematical hypothesis of the operation is violated (exit code 3)."""


class VerificationError(RuntimeError):
    """A verified identity failed to hold (exit code 1)."""
