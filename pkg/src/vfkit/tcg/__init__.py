"""LLM-driven test-case generation: prompts, parsing, and pipelines."""

from .llm import (
    LlmError,
    LlmRequest,
    LlmResponse,
    LiveClient,
    ReplayClient,
    ReplayMissError,
    ReplayStore,
    llm_call,
    request_hash,
)
from .parsing import CaseScript, parse_direct_response, parse_generation_response, split_case_output
from .pipeline import (
    GenerationRecord,
    GroundTruthError,
    TcgConfig,
    gen_direct,
    gen_random_inputs,
    label_outputs,
    run_case_script,
    saga_generate,
    self_validate,
)

__all__ = [
    "CaseScript",
    "GenerationRecord",
    "GroundTruthError",
    "LiveClient",
    "LlmError",
    "LlmRequest",
    "LlmResponse",
    "ReplayClient",
    "ReplayMissError",
    "ReplayStore",
    "TcgConfig",
    "gen_direct",
    "gen_random_inputs",
    "label_outputs",
    "llm_call",
    "parse_direct_response",
    "parse_generation_response",
    "request_hash",
    "run_case_script",
    "saga_generate",
    "self_validate",
    "split_case_output",
]
