"""Reversible modular-multiplication circuits: synthesis, scheduling,
cost models and exact gate-level verification."""

from .angles import DyadicAngle, TruncationPolicy, dyadic, default_truncation
from .circuit import (Circuit, Gate, GateKind, RegisterDesc, Role,
                      from_json, from_text, gate_histogram, inverse,
                      new_circuit, to_json, to_text)
from .adders import AdderBackend, AddSpec, BackendKind
from .numtheory import (BarrettParams, ModulusCtx, barrett_params,
                        barrett_qhat_oracle, build_ctx, mod_inverse,
                        redc_oracle, sample_modulus, sample_multiplicand)
from .schedule import (CostModel, ResourceReport, commutes, cost_model,
                       decompose_cry, depth_by_kinds, report, reordered,
                       schedule)
from .simulate import SimulationError, equivalence, simulate, simulate_batch
from .synth import (Design, MultiplierSpec, synth_inplace, synth_modular_adder,
                    synth_oop, synth_qq_oop, synth_shift_reduce, synthesize)
from .verify import VerifyPlan, VerifyResult, verify

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
