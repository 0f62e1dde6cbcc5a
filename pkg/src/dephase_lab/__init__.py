"""Final entropy of dephased qubit systems versus their initial entanglement."""

__version__ = "0.1.0"
