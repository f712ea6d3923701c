"""The record produced by every inequality check."""

from dataclasses import asdict, dataclass, field
import hashlib
import json

BOUND_IDS = (
    "K0_pointwise", "K0_L1x", "K0_L1xt", "K1_L1x", "K1_L1xt", "K2_L1x",
    "linear_u", "nonlinear_u", "nonlinear_v",
)


@dataclass
class BoundCertificate:
    """Outcome of checking ``lhs <= rhs`` over a finite check set.

    ``margin`` is the smallest ``rhs - lhs`` seen; ``slack`` is the summed
    numerical error budget of the LHS. ``passed`` holds iff the margin is at
    least ``-slack``.
    """

    bound_id: str
    observed_max_lhs: float
    rhs_min_over_check_set: float
    margin: float
    passed: bool
    scenario_digest: str
    slack: float = 0.0
    points: int = 0
    notes: dict = field(default_factory=dict)

    @classmethod
    def from_arrays(cls, bound_id, lhs, rhs, slack, digest, **notes):
        import numpy as np

        lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if bound_id not in BOUND_IDS:
            raise ValueError(f"unknown bound id {bound_id!r}")
        margin = float(np.min(rhs - lhs))
        return cls(
            bound_id=bound_id,
            observed_max_lhs=float(np.max(lhs)),
            rhs_min_over_check_set=float(np.min(rhs)),
            margin=margin,
            passed=bool(margin >= -slack),
            scenario_digest=digest,
            slack=float(slack),
            points=int(lhs.size),
            notes=notes,
        )

    def to_dict(self):
        return asdict(self)


def digest(*parts):
    """Stable short hash of JSON-serialisable scenario descriptors."""
    blob = json.dumps(parts, sort_keys=True, default=repr).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
