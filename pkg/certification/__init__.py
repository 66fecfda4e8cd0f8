"""Nets of pure states, sup-norm estimation and eps-randomizing verdicts."""
from certification.certify import (
    CertificationReport,
    CertifyParams,
    certify_randomizing,
    choi_bound,
    net_bound,
    rank_deficiency_witness,
    scan_net,
)
from certification.estimator import (
    SupEstimate,
    adjoint_deviation_map,
    deviation_eval,
    deviation_map,
    estimate_sup,
)
from certification.nets import PureStateNet, build_net, load_net, save_net
from certification.planner import (
    NetPlan,
    constant_rule_sample_size,
    coupon_lower_bound,
    net_size_bound,
    plan_net,
    polylog_sample_size,
    union_failure_bound,
    union_sample_size,
    volumetric_bound,
)
from certification.states import (
    PureState,
    bloch_vector,
    random_pure_state,
    state_from_bloch,
    trace_distance_pure,
)
