"""Bound states of V(r) = [V0 + V1 tanh^2(lr) + V2 tanh^4(lr)] / sinh^2(lr) by the asymptotic iteration method."""

from .aim import AimSettings, AimState, EigenResult, Status, aim_iterate, build_coefficients, delta_k, find_spectrum
from .errors import (ConfigError, DivisionByZeroConstantTerm, DomainError, GridTooCoarse, NoRootsFound,
                     OrderExhausted, OrderMismatch, UnsupportedParams)
from .jet import Jet, jet_arith, jet_derivative, jet_transcendental
from .oracle import OracleGrid, TridiagonalOperator, discretize, eigen_bisect, oracle_spectrum
from .potential import (PotentialParams, PotentialShape, Shape, classify_potential, pt_exact_spectrum, r_of_x,
                        v_of_r, v_of_x, x_of_r)
from .report import ComparisonRow, Mode, RunConfig, reproduce_table, run

__version__ = "0.1.0"
