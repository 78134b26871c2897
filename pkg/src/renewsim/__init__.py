"""Renewal and linearwise Markov processes: exact evaluation and Monte Carlo checks."""
from renewsim.dist import (Deterministic, Discrete, Distribution, Empirical, Exponential,
                           Gamma, Mixture, SupportDescriptor, Uniform, from_config,
                           lattice_span)
from renewsim.linearwise import (EmbeddedChain, LinearwiseProcess, StationaryLaw,
                                 chain_frequencies, estimate_law, simulate, stationary_law)
from renewsim.renewal import (RenewalFunctionTable, key_renewal_integral, key_renewal_limit,
                              overjump_survival_exact, renewal_function, sample_over_under,
                              simulate_renewal, stationary_overjump_mean,
                              stationary_overjump_survival)

__version__ = "0.1.0"

__all__ = [
    "Deterministic", "Discrete", "Distribution", "EmbeddedChain", "Empirical", "Exponential",
    "Gamma", "LinearwiseProcess", "Mixture", "RenewalFunctionTable", "StationaryLaw",
    "SupportDescriptor", "Uniform", "chain_frequencies", "estimate_law", "from_config",
    "key_renewal_integral", "key_renewal_limit", "lattice_span", "overjump_survival_exact",
    "renewal_function", "sample_over_under", "simulate", "simulate_renewal",
    "stationary_law", "stationary_overjump_mean", "stationary_overjump_survival",
]
