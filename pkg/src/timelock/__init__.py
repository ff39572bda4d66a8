"""Chained time-lock puzzles with delegated generation and solving.

Messages are locked behind sequential modular squaring work.  A chain
hides each link's generator inside the previous link, so varied release
intervals cost one squaring pass instead of one pass per message, and an
escrow contract pays a solving helper exactly when it registers valid
solutions on time.
"""

from .rng import Rng, system_rng
from .group_arith import (
    GenerationExhaustedError,
    OpCounter,
    RsaGroup,
    RsaTrapdoor,
    SquaringReport,
    gen_modulus,
    group_from_primes,
    pow_mod,
    repeated_square,
    sample_unit,
)
from .primitives import (
    Ciphertext,
    DecryptionError,
    commit,
    commit_verify,
    new_witness,
    parse,
    ske_dec,
    ske_enc,
    ske_keygen,
)
from .tlp_base import (
    KeyEmbeddingError,
    TlpPublic,
    TlpPuzzle,
    TlpSecret,
    tlp_gen,
    tlp_setup,
    tlp_solve,
)
from .gctlp import (
    ChainPublic,
    ChainPuzzle,
    ChainSecret,
    ChainSolution,
    ChainSolveError,
    chain_extend_gen,
    chain_extend_setup,
    chain_gen,
    chain_prove,
    chain_setup,
    chain_solve,
    chain_verify,
)
from .cedg import (
    DeadlineSchedule,
    HelperProfile,
    NetworkDelayParams,
    cedg_derived,
    cedg_paper,
    schedule,
)
from .contract import CoinLedger, EscrowContract, ManualClock, WallClock, deploy
from .edtlp import (
    ClientKeys,
    DemoConfig,
    DemoReport,
    EncodedMessages,
    client_delegate,
    client_setup,
    helper_c_run,
    helper_s_run,
    retrieve,
    run_demo,
    server_delegate,
)
from .bench import SquaringRate, TimingReport, calibrate, run_timing

__all__ = [name for name in dir() if not name.startswith("_")]
