# All error types of the package have one common base class `Error`, in the
# style of DB API 2 exception hierarchies.
from typing import Any, List, Optional, Union
import warnings


class SimulationWarning(Warning):
    def __init__(self, messages: Optional[Union[str, List[str]]] = None) -> None:
        super().__init__(prepare_message(messages))


class Error(Exception):
    """
    Base error that can carry a diagnostic report (e.g. ResidualReport).

    Messages can be a string or a list of lines, the lines are indented.
    """
    def __init__(self,
                 messages: Optional[Union[str, List[str]]] = None,
                 report: Any = None
                 ) -> None:
        self.report = report
        super().__init__(prepare_message(messages))


class InterfaceError(Error):
    pass  # invalid input parameters, should be raised directly


class DataError(InterfaceError):
    pass  # malformed arrays or serialized data


class ConvergenceError(Error):
    """An iterative method did not converge within its iteration cap.

    The attribute `report` holds the last diagnostics, e.g. a ResidualReport
    of the Picard iteration or the number of Jacobi sweeps.
    """


class InternalError(Error):
    pass  # a pathwise invariant that must hold was violated beyond tolerance


class NotSupportedError(Error):
    pass  # the operation is undefined in this parameter regime


def prepare_message(messages: Optional[Union[str, List[str]]] = None) -> str:
    """Join message lines by an indented new line"""
    if messages is None:
        messages = []
    if isinstance(messages, str):
        messages = [messages]
    assert isinstance(messages, list)
    separ = '\n    '
    messages = [x.replace('\n', separ) for x in messages]
    return separ.join(messages)


def warn_sim(messages: Union[str, List[str]]) -> None:
    """Issue a SimulationWarning"""
    warnings.warn(SimulationWarning(messages), stacklevel=2)
