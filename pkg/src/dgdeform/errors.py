"""Exception hierarchy shared by every module of the engine."""


class DeformError(Exception):
    """Base class for all engine errors."""


class ContextMismatch(DeformError):
    pass


class OddEpsilonPower(DeformError):
    """Conjugation was asked of a scalar carrying an odd power of e = sqrt(h/i)."""


class DegreeError(DeformError):
    pass


class EvenDegree(DeformError):
    """A differential of even degree was supplied where an odd one is required."""


class NotSquareZero(DeformError):
    def __init__(self, generator, witness):
        self.generator = generator
        self.witness = witness
        super().__init__(f"d^2({generator}) = {witness} != 0")


class InvalidDifferential(DeformError):
    pass


class NonHomogeneous(DeformError):
    pass


class OddComponentPresent(DeformError):
    pass


class MixedParityInput(DeformError):
    pass


class NotChainMap(DeformError):
    def __init__(self, generator, witness):
        self.generator = generator
        self.witness = witness
        super().__init__(f"morphism does not intertwine differentials at {generator}: defect {witness}")


class NonCommutingDerivations(DeformError):
    def __init__(self, i, j, witness):
        self.i, self.j, self.witness = i, j, witness
        super().__init__(f"derivations {i} and {j} do not commute: {witness}")


class MissingTruncationOrder(DeformError):
    pass


class ComplexMismatch(DeformError):
    pass


class EmptyWindow(DeformError):
    pass


class PresentationMismatch(DeformError):
    pass


class NotCoalgebraMap(DeformError):
    def __init__(self, reason, witness=None):
        self.reason = reason
        self.witness = witness
        msg = reason if witness is None else f"{reason}: {witness}"
        super().__init__(msg)


class InfiniteDimensional(DeformError):
    pass


class UnknownInstance(DeformError):
    pass


class InvalidInstance(DeformError):
    """A catalog constructor produced an object that fails its validator."""


class ParamOutOfRange(DeformError):
    pass


class UnknownSuite(DeformError):
    pass
