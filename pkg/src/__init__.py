"""
HJM Quadrature Monte Carlo - Source Package
"""
from .grid import GridPair, build_grid_pair, alpha_for_simpson
from .models import VasicekParams, ProportionalParams, vasicek_model, proportional_model
from .quadrature import AlgorithmOrder
from .simulate import NoiseKind, simulate_path
from .parallel_processor import ParallelProcessor
from .pricing import Contract, ContractKind, McEstimate, mc_price
from .config_loader import ConfigLoader, RunConfig
from .report_generator import ReportGenerator

__all__ = [
    "GridPair", "build_grid_pair", "alpha_for_simpson",
    "VasicekParams", "ProportionalParams", "vasicek_model", "proportional_model",
    "AlgorithmOrder", "NoiseKind", "simulate_path",
    "ParallelProcessor", "Contract", "ContractKind", "McEstimate", "mc_price",
    "ConfigLoader", "RunConfig", "ReportGenerator",
]
