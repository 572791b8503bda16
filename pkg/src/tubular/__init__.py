"""Residual finiteness of tubular groups with exact lattice arithmetic.

A tubular group is a finite graph of groups with Z^2 vertex groups and
infinite cyclic edge groups. The package decides residual finiteness
through expansion sequences and, for one-vertex groups, through a
complete search for regulating tuples. Every verdict carries a
certificate that can be rechecked from its JSON alone.
"""

from .errors import TubularError
from .exactlat import Lattice2, Vec, coords, hnf, is_primitive_in, vec
from .expansion import (ExpansionOutcome, RigidIso, Verdict, decide,
                        detect_rigid_iso, edge_degrees, expand, run_sequence)
from .model import (Edge, TubularGroup, group_from_json, group_to_json,
                    is_primitive, scale, snowflake, subtubular, validate)
from .regulating import is_regulating, primitive_domain, single_vertex_decide
from .words import britton_reduce, local_quotient, parse_word, witness_modulus

__version__ = "0.1.0"
