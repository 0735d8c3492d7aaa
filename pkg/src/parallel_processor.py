"""
Parallel Processor Module
Runs Monte Carlo path blocks concurrently while keeping results in block order
"""
import asyncio
import time
from typing import Callable, List, Optional, TypeVar

from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn

import sys
from pathlib import Path
sys.path.append(str(Path(__file__).parent.parent))
from config import MAX_CONCURRENT_BLOCKS

console = Console()

T = TypeVar("T")


class ParallelProcessor:
    """Processes path blocks on worker threads, at most max_concurrent at a time"""

    def __init__(self, max_concurrent: int = MAX_CONCURRENT_BLOCKS, show_progress: bool = True):
        if max_concurrent < 1:
            raise ValueError(f"max_concurrent must be at least 1, got {max_concurrent}")
        self.max_concurrent = max_concurrent
        self.show_progress = show_progress
        self.semaphore: Optional[asyncio.Semaphore] = None
        self.results: list = []

    async def _process_single(
        self,
        job: Callable[[], T],
        progress: Progress,
        task_id: int,
    ) -> T:
        """Run one block with semaphore control"""
        async with self.semaphore:
            result = await asyncio.to_thread(job)
            progress.advance(task_id)
            return result

    async def process_all(self, jobs: List[Callable[[], T]], label: str = "paths") -> List[T]:
        """
        Run all blocks concurrently

        Args:
            jobs: Zero-argument callables, one per path block
            label: Progress description

        Returns:
            Block results in job order, independent of completion order
        """
        if not jobs:
            console.print("[yellow]⚠️ No path blocks to process[/yellow]")
            return []

        # bound to the running loop
        self.semaphore = asyncio.Semaphore(self.max_concurrent)
        start_time = time.perf_counter()

        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=console,
            disable=not self.show_progress,
        ) as progress:
            task_id = progress.add_task(f"[cyan]Simulating {label}...[/cyan]", total=len(jobs))
            tasks = [self._process_single(job, progress, task_id) for job in jobs]
            self.results = await asyncio.gather(*tasks)

        if self.show_progress:
            total_time = time.perf_counter() - start_time
            console.print(
                f"  [dim]⏱️ {len(jobs)} block(s) in {total_time:.2f}s "
                f"with {self.max_concurrent} worker(s)[/dim]"
            )

        return self.results

    def get_results(self) -> list:
        """Get the block results of the last run"""
        return self.results


if __name__ == "__main__":
    async def test():
        processor = ParallelProcessor(max_concurrent=2)
        squares = await processor.process_all([lambda i=i: i * i for i in range(8)], label="squares")
        print(f"Processor returned {squares}")

    asyncio.run(test())
