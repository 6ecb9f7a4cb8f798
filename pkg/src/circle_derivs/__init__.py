"""Numerical laboratory for zeros of generalized derivatives of random
polynomials with i.i.d. zeros on the unit circle."""

from .errors import (CircleDerivsError, DegenerateWeights, DegreeTooLarge,
                     EigenFailure, OrderTooLarge, PoleProximity, PTooLarge,
                     SizeTooLarge, SupportTooLarge)
from .experiments import (ConvergenceRow, ErrorRow, ExperimentConfig,
                          SelftestReport, SzNagyRandom, default_char_grid,
                          power_sum_selftest, rows_to_csv, rows_to_json,
                          run_convergence)
from .laws import (ArcLaw, AtomsLaw, CircleLaw, SeedSpec, UniformLaw,
                   format_complex, parse_complex, parse_law, uniform_doubles)
from .measures import (EmpiricalMeasure, ProhorovResult, discretized_target,
                       empirical_char, mass_in_disk, mixed_power_mean,
                       pairing_fraction, prohorov, prohorov_bruteforce,
                       read_measure_csv, write_measure_csv)
from .polys import (Ordinary, Polar, RootPoly, SzNagy, WeightScheme,
                    alpha_weights, coefficients, log_derivative_value,
                    parse_scheme, resolve_weights)
from .powersums import (PowerSumReport, closed_form_power_mean,
                        composition_term_count, compositions,
                        direct_power_mean, power_sum_report, trace_power_sum)
from .rootfind import (ContainmentReport, DerivedZeros, containment_check,
                       derived_zeros, kth_derivative_zeros)

__version__ = "0.1.0"
