"""Exception types shared across the toolkit."""


class DdparseError(Exception):
    """Base class for all toolkit errors."""


class ParseError(DdparseError):
    """A corpus file could not be read or decoded."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)
        self.reason = reason


class ValidationError(DdparseError):
    """A document violates a structural invariant."""

    def __init__(self, doc_id, rule):
        super().__init__(f"{doc_id}: {rule}")
        self.doc_id = doc_id
        self.rule = rule


class EmptyCorpus(DdparseError):
    pass


class InvalidCount(DdparseError):
    pass


class TerminalState(DdparseError):
    pass


class IllegalAction(DdparseError):
    def __init__(self, action, state):
        super().__init__(f"action {action} is illegal in state {state}")
        self.action = action
        self.state = state


class NonProjective(DdparseError):
    """The tree has no arc-standard derivation."""

    def __init__(self, doc_id=""):
        super().__init__(f"no derivation exists for document {doc_id!r}")
        self.doc_id = doc_id


class DegenerateData(DdparseError):
    pass


class FormatError(DdparseError):
    pass


class VersionMismatch(DdparseError):
    pass


class NoTrainableTrees(DdparseError):
    pass


class AdapterError(DdparseError):
    """Translation of one EDU failed; the whole document is aborted."""

    def __init__(self, edu_id, cause):
        super().__init__(f"translation failed for EDU {edu_id}: {cause}")
        self.edu_id = edu_id
        self.cause = cause


class AlignmentError(DdparseError):
    pass


class Mismatch(DdparseError):
    def __init__(self, doc_id, detail=""):
        msg = f"prediction/gold mismatch for {doc_id!r}"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.doc_id = doc_id
