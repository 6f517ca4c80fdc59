'''
exception types raised across the package

input problems derive from ValueError and numerical problems from RuntimeError, so callers that only
care about the broad category can keep catching the builtins.
'''


class InputError(ValueError):
    '''
    root of every problem caused by the caller's input (cli exit code 2)
    '''


class DomainError(InputError):
    '''
    an argument lies outside the mathematical domain of the operation
    '''


class LossDomainError(DomainError):
    '''
    the argument of a LINEX logarithm is not positive
    '''


class SchemeParseError(InputError):
    '''
    a censoring scheme string could not be parsed
    '''


class SchemeError(InputError):
    '''
    a censoring scheme violates sum(R) + m = n or another structural constraint
    '''


class DegenerateSampleError(InputError):
    '''
    the sample carries no information about alpha (S_m = 0)
    '''


class DataFileError(InputError):
    '''
    a failure-time file could not be read

    :param path: path of the offending file
    :param line: 1-based line number, or None if the problem is not tied to a line
    :param message: description of the problem
    '''

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        if line is None:
            super().__init__(f'{self.path}: {message}')
        else:
            super().__init__(f'{self.path}:{line}: {message}')
        self.message = message

    def __reduce__(self):
        return (DataFileError, (self.path, self.line, self.message))


class NumericalError(RuntimeError):
    '''
    root of every numerical failure (cli exit code 3)
    '''


class ConvergenceError(NumericalError):
    '''
    a quadrature or series did not reach its tolerance

    :param message: description of the failure
    :param estimate: best estimate available when the iteration stopped
    :param error_bound: error estimate attached to the best estimate
    :param context: optional dict describing where the failure happened, e.g. the (a, b) point
    '''

    def __init__(self, message, estimate=None, error_bound=None, context=None):
        self.estimate = estimate
        self.error_bound = error_bound
        self.context = dict(context or {})
        self.base_message = message
        if self.context:
            message = message + ' [' + ', '.join(f'{k}={v}' for k, v in self.context.items()) + ']'
        super().__init__(message)

    def __reduce__(self):
        return (ConvergenceError, (self.base_message, self.estimate, self.error_bound, self.context))

    def with_context(self, **context):
        '''
        return a copy of this error with additional context attached
        '''
        merged = dict(self.context)
        merged.update(context)
        return ConvergenceError(self.base_message, self.estimate, self.error_bound, merged)


class NumericalIntegrityError(NumericalError):
    '''
    an estimate landed outside its admissible range, e.g. a reliability outside [0, 1]
    '''


class EstimatorFailure(NumericalError):
    '''
    an estimator failed inside a monte carlo replication

    :param scheme: rendered censoring scheme
    :param replication: replication index
    :param estimator: estimator label (MLE, BS, ...)
    :param cause: the underlying exception
    '''

    def __init__(self, scheme, replication, estimator, cause):
        self.scheme = scheme
        self.replication = replication
        self.estimator = estimator
        self.cause = cause
        super().__init__(f'estimator {estimator} failed on scheme {scheme}, replication {replication}: {cause}')

    def __reduce__(self):
        return (EstimatorFailure, (self.scheme, self.replication, self.estimator, self.cause))
