"""Exception hierarchy shared across the pipeline.

``exit_code`` drives the CLI's exit-status contract: 1 usage, 2 validation,
3 backend, 4 integrity.
"""


class DivgenError(Exception):
    exit_code = 2  # validation unless a subclass says otherwise


class UsageError(DivgenError):
    exit_code = 1


class BackendError(DivgenError):
    exit_code = 3


class IntegrityError(DivgenError):
    exit_code = 4
