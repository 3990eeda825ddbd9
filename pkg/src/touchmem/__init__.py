"""Touch-driven sequential memory for compliant arm control.

Joint states become bipolar population place codes, skin forces become
spike-rate densities through an Izhikevich neuron, and the two are
bound into keys of a hetero-associative memory whose stored values
replay guided motion sequences. Recall sharpness is a single
temperature, giving one knob between exact replay and compliant
force-tracking behavior.
"""

from .config import (
    EncoderConfig,
    JointConfig,
    MemoryConfig,
    PatchConfig,
    SimConfig,
    SystemConfig,
    TactileConfig,
    default_config,
    load_config,
)
from .errors import ConfigError, DataError, ProtocolError
from .memory import (
    AssociationEncoder,
    Decision,
    MemoryBank,
    bind,
    decision_to_command,
    pair_samples,
    softmax,
    weight_entropy,
)
from .placecode import JointTuning, PlaceCodec, encode_joints, make_tuning, quantize_rate
from .recording import Recording, RecordingMeta, RecordingWriter, TickSample
from .rope3d import Rope3D, block_frequencies, rodrigues, rotate_blocks
from .sim import (
    ArmWorld,
    ControlLoop,
    TrajectoryLog,
    derive_features,
    run_closed_loop,
    run_scripted,
)
from .tactile import (
    IzhikevichNeuron,
    IzhikevichParams,
    PatchFrame,
    TactileChannel,
    TactileFeature,
    build_embedding,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ConfigError",
    "DataError",
    "ProtocolError",
    "JointConfig",
    "PatchConfig",
    "EncoderConfig",
    "TactileConfig",
    "MemoryConfig",
    "SimConfig",
    "SystemConfig",
    "default_config",
    "load_config",
    "JointTuning",
    "PlaceCodec",
    "make_tuning",
    "quantize_rate",
    "encode_joints",
    "Rope3D",
    "block_frequencies",
    "rodrigues",
    "rotate_blocks",
    "IzhikevichParams",
    "IzhikevichNeuron",
    "PatchFrame",
    "TactileFeature",
    "TactileChannel",
    "build_embedding",
    "bind",
    "softmax",
    "weight_entropy",
    "Decision",
    "AssociationEncoder",
    "MemoryBank",
    "pair_samples",
    "decision_to_command",
    "Recording",
    "RecordingMeta",
    "RecordingWriter",
    "TickSample",
    "ArmWorld",
    "ControlLoop",
    "TrajectoryLog",
    "derive_features",
    "run_scripted",
    "run_closed_loop",
]
