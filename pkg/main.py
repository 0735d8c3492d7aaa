#!/usr/bin/env python3
"""
HJM Quadrature Monte Carlo
==========================
Simulates HJM forward curves with rectangle, trapezoid or Simpson drift quadrature
and prices caplets and swaptions by Monte Carlo.

Usage:
    python main.py price --algo 5.1 --h 0.2 --paths 1000000
    python main.py converge --algo 5.3 --h 0.2,0.1,0.05 --out output/table3.csv
    python main.py compare --h 0.1 --paths 1000000
    python main.py reference --model proportional --paths 10000000
"""
import argparse
import asyncio
import sys
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.panel import Panel
from rich.text import Text

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from config import OUTPUT_DIR, REFERENCE_H
from src.config_loader import ConfigLoader
from src.errors import ConfigError, NumericalError, OutOfRange
from src.report_generator import ReportGenerator
from src.study import (
    compute_reference_async,
    run_comparison_async,
    run_convergence_study_async,
    run_price_async,
)

console = Console()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def print_banner():
    """Print application banner"""
    banner = Text()
    banner.append("📈 ", style="bold")
    banner.append("HJM Quadrature Monte Carlo", style="bold cyan")
    banner.append("\n")
    banner.append("Forward-curve simulation and caplet/swaption pricing", style="dim")

    console.print(Panel(banner, border_style="cyan"))


def overrides_from(args: argparse.Namespace) -> dict:
    """Command-line flags keyed like run-file entries"""
    return {
        "MODEL": args.model,
        "ALGO": args.algo,
        "H": args.h,
        "DELTA": args.delta,
        "STEP_LAW": args.step_law,
        "PATHS": args.paths,
        "SEED": args.seed,
        "THREADS": args.threads,
        "NOISE": args.noise,
        "OUT": args.out,
        "ALPHA_ROUNDING": args.alpha_rounding,
        "ROUGH_DISCOUNT": "1" if args.rough_discount else None,
    }


async def main(args: argparse.Namespace) -> int:
    """Main execution function"""
    if not args.quiet:
        print_banner()

    try:
        config = ConfigLoader(args.config).load(overrides_from(args))
    except (ConfigError, OutOfRange, FileNotFoundError) as e:
        console.print(f"[red]❌ {e}[/red]")
        return EXIT_CONFIG

    generator = ReportGenerator(OUTPUT_DIR)
    show_progress = not args.quiet
    title = f"Algorithm {config.algo.label} · {config.model_family} · {config.contract_kind.value}"

    try:
        if args.command == "reference":
            await compute_reference_async(
                config, h=args.reference_h, path=args.reference_out, show_progress=show_progress
            )
            return EXIT_OK

        if args.command == "compare":
            pairs = await run_comparison_async(config, show_progress=show_progress)
            rows, slope = [row for _, row in pairs], None
        elif args.command == "price":
            rows, slope = [await run_price_async(config, show_progress=show_progress)], None
        else:
            rows, slope = await run_convergence_study_async(config, show_progress=show_progress)
    except (ConfigError, OutOfRange) as e:
        console.print(f"[red]❌ {e}[/red]")
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError) as e:
        console.print(f"[red]❌ Numerical failure: {e}[/red]")
        return EXIT_NUMERICAL

    if args.command == "compare":
        generator.render_comparison(pairs, f"All algorithms · {config.model_family} · {config.contract_kind.value}")
    else:
        generator.render(rows, title, slope)
    if config.out is not None:
        generator.emit_csv(rows, config.out, timings=not args.no_timings)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="HJM forward-rate Monte Carlo with quadrature-based drift",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py price --algo 5.1 --h 0.2                 # Vasicek caplet, delta = h
  python main.py converge --algo 5.2 --out table2.csv     # delta = sqrt(h) over the default ladder
  python main.py converge --config runs/proportional.env   # flat KEY=value run file
  python main.py compare --config runs/vasicek_low.env     # all three algorithms at one step
  python main.py reference --model proportional           # cache a fine-step reference price

Exit codes: 0 success, 2 configuration error, 3 numerical failure
        """
    )
    parser.add_argument("command", choices=("price", "converge", "compare", "reference"), help="What to run")
    parser.add_argument("--config", type=Path, help="Flat KEY=value run file")
    parser.add_argument("--model", choices=("vasicek", "proportional"), help="Volatility model")
    parser.add_argument("--algo", choices=("5.1", "5.2", "5.3"), help="Algorithm (quadrature order)")
    parser.add_argument("--h", help="Time step, or comma-separated ladder for converge")
    step = parser.add_mutually_exclusive_group()
    step.add_argument("--delta", type=float, help="Explicit maturity step")
    step.add_argument("--step-law", choices=("h", "sqrt", "quartic"), help="Maturity step law")
    parser.add_argument("--paths", type=int, help="Monte Carlo path count L")
    parser.add_argument("--seed", type=int, help="Root random seed")
    parser.add_argument("--threads", type=int, help="Concurrent path blocks (results do not depend on it)")
    parser.add_argument("--noise", choices=("weak", "gaussian"), help="Weak +-1 or Gaussian increments")
    parser.add_argument("--out", type=Path, help="CSV output file")
    parser.add_argument("--alpha-rounding", choices=("nearest", "ceil"), help="Maturity node-count rounding")
    parser.add_argument("--rough-discount", action="store_true", help="Diagnostic discount shortcut")
    parser.add_argument("--reference-h", type=float, default=REFERENCE_H, help="Time step of the reference run")
    parser.add_argument("--reference-out", type=Path, help="Reference cache file")
    parser.add_argument("--no-timings", action="store_true", help="Leave the seconds column blank")
    parser.add_argument("-q", "--quiet", action="store_true", help="No banner or progress bars")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def run(argv: Optional[List[str]] = None):
    """CLI entry point"""
    args = parse_args(argv)
    sys.exit(asyncio.run(main(args)))


if __name__ == "__main__":
    run()
