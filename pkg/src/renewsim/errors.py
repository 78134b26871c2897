"""Exception and warning types raised across the package."""


class RenewsimError(Exception):
    """Base class for every error raised by renewsim."""


class AtomAtZero(RenewsimError, ValueError):
    """A lifetime law puts positive mass at zero."""


class InfiniteMean(RenewsimError, ArithmeticError):
    pass


class InfiniteSecondMoment(RenewsimError, ArithmeticError):
    pass


class InfiniteMoment(RenewsimError, ArithmeticError):
    pass


class DivergentExponentialMoment(RenewsimError, ArithmeticError):
    pass


class NonFinite(RenewsimError, ValueError):
    """A function sampled on a grid returned a negative or non-finite value."""


class BudgetExceeded(RenewsimError, RuntimeError):
    """Convolution powers did not decay before the iteration cap."""


class OutOfRange(RenewsimError, ValueError):
    """A time argument lies outside the tabulated range."""


class LatticeCycle(RenewsimError, ValueError):
    """A cycle law is lattice where the limit theorem needs it non-lattice."""


class LatticeSupport(RenewsimError, ValueError):
    """The union of essential level supports sits on a lattice."""


class InvalidChain(RenewsimError, ValueError):
    """A transition matrix is not a valid stochastic matrix."""


class MultipleClosedClasses(InvalidChain):
    """The embedded chain has more than one closed communicating class."""


class UnknownState(RenewsimError, KeyError):
    pass


class TransientState(RenewsimError, ValueError):
    pass


class NoHit(RenewsimError, RuntimeError):
    """A simulated path failed to reach the target state within the jump cap."""


class NoSamples(RenewsimError, RuntimeError):
    """No Monte Carlo replica satisfied the conditioning event."""


class LatticeWarning(UserWarning):
    """A limit formula was evaluated for a lattice law, outside its hypotheses."""
