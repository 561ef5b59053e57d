class PRamseyException(Exception):

    """Parent class for all kind of exceptions raised by the construction and verification toolkit"""

    def __init__(self, value):
        self.value = value

    def __str__(self):
        """
        >>> str(PRamseyException('foo'))
        "'foo'"
        """
        return repr(self.value)


class InvalidInputError(PRamseyException):
    pass


class DegenerateConfigError(PRamseyException):
    pass


class NotEmbeddableError(PRamseyException):

    def __init__(self, value, witness=None):
        super(NotEmbeddableError, self).__init__(value)
        self.witness = witness


class NotASimplexError(PRamseyException):
    pass


class SizeLimitError(PRamseyException):
    pass


class SearchFailureError(PRamseyException):

    def __init__(self, value, best_residual=None):
        super(SearchFailureError, self).__init__(value)
        self.best_residual = best_residual


class PipelineVerificationError(PRamseyException):

    def __init__(self, value, residuals=None):
        super(PipelineVerificationError, self).__init__(value)
        self.residuals = residuals or {}


class PipelineStageError(PRamseyException):

    """Any failure inside `run_pipeline`, tagged with the stage that raised it"""

    def __init__(self, stage, error):
        super(PipelineStageError, self).__init__('{0}: {1}'.format(stage, error))
        self.stage = stage
        self.error = error


class CertificateInvalidError(PRamseyException):
    pass


class ConsistencyError(PRamseyException):
    pass


class ShrinkLimitError(PRamseyException):

    """Shrinking every squared side by the same amount does not reduce the circumradius.

    Obtuse simplices whose circumcentre lies well outside the hull behave this way, the
    construction does not apply to them."""

    def __init__(self, value, rho=None, rho_shrunk=None):
        super(ShrinkLimitError, self).__init__(value)
        self.rho = rho
        self.rho_shrunk = rho_shrunk
