"""Cascading failures and entity hardening in interdependent infrastructure."""

from .bench import BenchmarkReport, BenchmarkRow, BenchmarkSpec, BoundViolation, run_benchmark
from .cascade import (CascadeTrace, cascade, kill_set, protection_set, protection_sets,
                      prune_system, remove_operational)
from .estimators import CascadeSimulator, EntityHardener, TargetedHardener, solve_enh, solve_teh
from .exact import (EnhInstance, SearchSpaceTooLarge, SolveReport, TehInstance, VulnerableSet,
                    k_most_vulnerable, solve_enh_exact, solve_teh_exact)
from .generators import (Bus, GeoAsset, InsufficientAssetsError, Line, PowerTopology,
                         assets_from_dicts, gen_interdep_idrs, gen_power_idrs, gen_random,
                         nine_bus_topology)
from .heuristics import cfmhv, fmhv, pcfmhv, pfmhv, solve_enh_heuristic, solve_teh_heuristic
from .ilp import IlpEncoding, check_trace_feasible, encode_enh_ilp, encode_teh_ilp, export_lp, format_lp
from .instance_io import InstanceSpec, load_instance, parse_instance
from .restricted import (IdrClass, IdrClassError, check_laminar_protection, classify,
                         solve_enh_case1, solve_enh_case2_maxcov, solve_teh_case1,
                         solve_teh_case2_setcover)
from .system import (EntityId, Idr, Minterm, System, SystemFormatError, UnknownEntityError,
                     format_system, load_system, parse_system)

__version__ = "0.1.0"
