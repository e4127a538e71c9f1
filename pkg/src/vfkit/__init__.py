"""vfkit: measuring and improving how well test suites catch wrong programs.

Submodules:
    dataset     corpus and suite records, persistence, validation
    execution   sandboxed compile/run with resource limits and checkers
    killmatrix  test-by-solution detection matrices
    metrics     detection rate, verification accuracy, @k curves, AUC
    saturation  correlated-test saturation model and simulator
    tcg         LLM-driven test-case generation pipelines
    report      CSV / markdown / SVG emission
    cli         command-line entry points
"""

__version__ = "0.1.0"
