"""Link-level simulator for massive MIMO arrays with pattern-reconfigurable antennas."""

__version__ = "0.1.0"

from .arch import Architecture
from .errors import (ConfigError, ContractError, DomainError, SearchRefused,
                     SingularChannelError)
from .patterns import (Direction, PatternSet, PatternSpec, make_legacy_set, make_type_set,
                       pattern_gain, rotate_dipole)
from .geometry import ArrayGeometry, dual_pol_ula, place_cell_ula, place_ula
from .channel import (UE, ChannelRealization, ClusterSet, cluster_channel, free_space_channel,
                      path_loss)
from .precoding import (AnalogPrecoder, DigitalPrecoder, SERecord, hybrid_precode, mrt_precoder,
                        sca_analog, spectral_efficiency, zf_digital)
from .emr_search import (PrecodingSetup, SearchConfig, SearchResult, exhaustive_emr_search,
                         greedy_emr_search, random_emr_search)
from .power import EERecord, PowerModel, energy_efficiency, precoder_power
from .scenario import ScenarioConfig, load_config
