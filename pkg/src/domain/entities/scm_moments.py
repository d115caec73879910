from dataclasses import dataclass


@dataclass(frozen=True)
class ScmMoments:
    """Closed-form second-order moments of the SCM under an elliptical population"""

    mse: float
    nmse: float
    expected_tr_s2: float
