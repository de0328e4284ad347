from .distributions import (
    BINARY_ALPHABET,
    BOTTOM,
    DUAL_ALPHABET,
    NO,
    TICK_ALPHABET,
    YES,
    BaselineTicks,
    ResponseDistribution,
    binary_distribution,
    bottom_label,
    ddps_distribution,
    deniability_distribution,
    dual_distribution_b,
    dual_distributions,
    multivalue_alphabet,
    multivalue_distributions,
    rr_baseline_distribution,
    sampling_noise_distribution,
    sampling_only_distribution,
)
from .params import (
    PARAM_TYPES,
    BaselineParams,
    CouplingMode,
    DdpsParams,
    DeniabilityParams,
    DualParams,
    MultiValueParams,
    SamplingParams,
    Truth,
    build_params,
    check_probability,
)
from .sampling import (
    draw,
    draw_many,
    draw_multivalue_pair,
    draw_multivalue_pair_many,
    draw_pair,
    draw_pair_many,
)

__all__ = [
    'ResponseDistribution', 'BaselineTicks',
    'BINARY_ALPHABET', 'TICK_ALPHABET', 'DUAL_ALPHABET', 'BOTTOM', 'YES', 'NO',
    'bottom_label', 'multivalue_alphabet',
    'sampling_noise_distribution', 'sampling_only_distribution', 'deniability_distribution',
    'ddps_distribution', 'binary_distribution', 'dual_distributions', 'dual_distribution_b',
    'multivalue_distributions', 'rr_baseline_distribution',
    'draw', 'draw_many', 'draw_pair', 'draw_pair_many',
    'draw_multivalue_pair', 'draw_multivalue_pair_many',
    'Truth', 'CouplingMode', 'SamplingParams', 'DeniabilityParams', 'DdpsParams',
    'DualParams', 'MultiValueParams', 'BaselineParams', 'PARAM_TYPES', 'build_params',
    'check_probability',
]
