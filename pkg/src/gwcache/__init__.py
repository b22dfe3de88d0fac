"""Gray-Wyner based caching and coded multicast for two receivers and three
correlated files: bit-exact simulation, closed-form rates and lower bounds."""

from .allocator import CacheAllocation, achievable_curve, allocate, lattice, rate_l1, rate_l2, rate_l3, rate_theorem1
from .bounds import GapCertificate, gap_certificate, lower_bound, tilde_tuple
from .gray_wyner import DescriptionSet, RateTuple, RequestSets, generating_tuple, gw_decode, gw_encode, request_sets
from .harness import RateCurvePoint, SimReport, Simulation, run_demand, run_peak, sweep
from .schemes import (
    CacheContents,
    CacheUnit,
    MulticastCodeword,
    OffGridError,
    PacketRef,
    l1_decode,
    l1_deliver,
    l1_place,
    l2_decode,
    l2_deliver,
    l2_place,
    l3_decode,
    l3_deliver,
    l3_place,
    memory_share,
)
from .source_model import (
    EntropyProfile,
    Library,
    PmfSource,
    SourceSpec,
    entropy_profile_pmf,
    entropy_profile_structured,
    load_source,
    make_structured_library,
)

__version__ = "0.1.0"
