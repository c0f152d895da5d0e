class Max4pcError(Exception):
    """Base class for every error raised by max4pc."""


# tree-core

class MalformedInput(Max4pcError, ValueError):
    pass


class NotATree(Max4pcError, ValueError):
    pass


class LabelOutOfRange(Max4pcError, ValueError):
    pass


# pair-matrix

class UnknownPair(Max4pcError, KeyError):
    pass


class OverflowGuard(Max4pcError, ArithmeticError):
    pass


# exact-linalg

class NotSquare(Max4pcError, ValueError):
    pass


class NotSymmetric(Max4pcError, ValueError):
    pass


# basis-builder

class TooSmall(Max4pcError, ValueError):
    pass


class NotAStar(Max4pcError, ValueError):
    pass


class NotALeaf(Max4pcError, ValueError):
    pass


class IsAStar(Max4pcError, ValueError):
    pass


class BadStarIndices(Max4pcError, ValueError):
    pass
