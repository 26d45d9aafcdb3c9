from ._sfrl import (
    SfrlError,
    capacity,
    entropy,
    entropy_bound,
    lb_example,
    mutual_information,
    psi_lower_bound,
    rate_distortion,
    run_cli,
    zipf_params,
)

__all__ = [
    "SfrlError",
    "capacity",
    "entropy",
    "entropy_bound",
    "lb_example",
    "mutual_information",
    "psi_lower_bound",
    "rate_distortion",
    "run_cli",
    "zipf_params",
]
