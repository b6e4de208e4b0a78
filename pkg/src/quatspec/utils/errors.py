"""
Error and Exceptions in the quatspec library
"""


class QuatSpecException(Exception):
    """
    Base class for exceptions in the quatspec library
    """
    pass

class DegenerateLattice(QuatSpecException):
    """
    Lattice generators are collinear or negatively oriented.
    """
    pass

class InvalidPoint(QuatSpecException):
    """
    Homogeneous coordinates of a point of the quaternionic projective line
    are both zero.
    """
    pass

class SplittingCollapsed(QuatSpecException):
    """
    The two lines of a splitting coincide at a point.

    A sphere congruence cannot be built from L and L♯ when L = L♯.
    """
    pass

class PotentialUnderResolved(QuatSpecException):
    """
    The Fourier support of the potential does not fit in the truncation
    window.
    """
    pass

class NonZeroDegree(QuatSpecException):
    """
    Holomorphic line bundle of nonzero degree, which has no trivialization
    over the torus.
    """
    pass

class FiberSolveError(QuatSpecException):
    """
    The eigen-solver failed on a fiber over a point of the a-plane.
    """

    def __init__(self, message, a=None):
        super().__init__(message)
        self.a = a

class NotOnSpectrum(QuatSpecException):
    """
    A harmonic form was expected on the spectrum but the operator there
    has no small singular value.
    """
    pass

class BranchPointOnGrid(QuatSpecException):
    """
    The differential of an immersion is degenerate at a grid point.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location

class FrameSingularity(QuatSpecException):
    """
    The trivializing frame degenerates at a grid point.

    Raised after every frame reference within the retry budget hit the
    point of the sphere where its frame is undefined.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location

class ChartSingularity(QuatSpecException):
    """
    A transformed surface passes through the point at infinity of the chart.
    """
    pass

class DegenerateMetric(QuatSpecException):
    """
    The induced metric of a grid surface is not positive definite.
    """
    pass

class NotImmersed(QuatSpecException):
    """
    The pointwise derivative map is numerically singular at a cell.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location

class RepresentationsDisagree(QuatSpecException):
    """
    The Fourier and grid representations of a section disagree.
    """
    pass

class DifferentialDegenerate(QuatSpecException):
    """
    The differential of a prolonged section vanishes at a cell.
    """
    pass

class TransformsNotDistinct(QuatSpecException):
    """
    Two Darboux transforms coincide somewhere, so they cannot be composed.
    """
    pass

class NotOnBranch(QuatSpecException):
    """
    A harmonic form does not lie on the requested branch of a closed form
    spectrum.
    """
    pass

class NoIsolatedZero(QuatSpecException):
    """
    A section has no isolated zero near the requested grid point.
    """
    pass

class InvalidConfig(QuatSpecException):
    """
    A run configuration failed schema validation.
    """
    pass
