from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ExperimentResponse:
    """Simple maxiset experiment response

    This class represents the outcome of running one experiment through the lab.

    The value of `success` should be checked before using the other fields.

    If `success` is True, `message` holds the verdict and `paths` the files that were written.

    If `success` is False, `message` contains the error message and `exit_code` tells the command line how to exit.

    Attributes:
        success (bool): True if the experiment ran to completion, False otherwise
        message (str): The verdict or the error message
        exit_code (int): The exit code the command line should use
        paths (list[Path]): The files written for the experiment
    """

    success: bool
    message: str
    exit_code: int = 0
    paths: list[Path] = field(default_factory=list)
