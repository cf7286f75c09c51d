""" Exception hierarchy shared by every module of the package. """


class WhittakerError(Exception):
    """Base class. `code` is the short tag the CLI writes into error rows."""

    code = "error"


class DomainError(WhittakerError, ValueError):
    code = "domain"


class PoleError(DomainError):
    code = "pole"


class PoleAtEigenvalue(PoleError):
    code = "pole_at_eigenvalue"


class ExceptionalEnergy(PoleError):
    code = "exceptional"


class BranchPointError(DomainError):
    code = "branch_point"


class DegenerateCase(DomainError):
    code = "degenerate"


class UnsupportedCase(DomainError):
    code = "unsupported"


class SingularFamilyPoint(DomainError):
    code = "singular_family_point"


class NotAnEigenvalue(DomainError):
    code = "not_an_eigenvalue"


class RealOnly(DomainError):
    code = "real_only"


class SeriesNotApplicable(DomainError):
    code = "series_not_applicable"


class NoConvergence(WhittakerError, ArithmeticError):
    code = "no_convergence"


class AsymptoticDivergence(NoConvergence):
    code = "asymptotic_divergence"


class DegenerateLimitUnstable(NoConvergence):
    code = "degenerate_limit_unstable"


class StiffnessFailure(NoConvergence):
    code = "stiffness"
