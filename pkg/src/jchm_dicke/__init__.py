"""Mean-field phase diagrams and excitations of the Jaynes-Cummings-Hubbard and Dicke models."""

__version__ = "0.1.0"
