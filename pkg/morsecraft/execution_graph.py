"""
Stage graph - a DAG of pipeline stages with data dependencies.

Stages run in a deterministic topological order; a failing stage marks
everything downstream as skipped and the failure is re-raised.
"""

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import networkx as nx

logger = logging.getLogger(__name__)


class StageStatus(Enum):
    """Status of a stage in the graph."""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"
    SKIPPED = "skipped"


@dataclass
class Stage:
    """
    One unit of pipeline work.

    function receives parameters plus the results of its dependencies,
    keyed by dependency id.
    """
    stage_id: str
    function: Callable[..., Any]
    dependencies: List[str] = field(default_factory=list)
    parameters: Dict[str, Any] = field(default_factory=dict)
    status: StageStatus = StageStatus.PENDING
    result: Optional[Any] = None
    error: Optional[str] = None
    start_time: Optional[datetime] = None
    end_time: Optional[datetime] = None

    def execute(self, inputs: Dict[str, Any]) -> Any:
        self.status = StageStatus.RUNNING
        self.start_time = datetime.now(timezone.utc)
        try:
            self.result = self.function(inputs, **self.parameters)
            self.status = StageStatus.COMPLETED
            return self.result
        except Exception as e:
            self.error = str(e)
            self.status = StageStatus.FAILED
            raise
        finally:
            self.end_time = datetime.now(timezone.utc)


class StageGraph:
    """
    A DAG of stages executed in dependency order.
    """

    def __init__(self):
        self.graph = nx.DiGraph()
        self.stages: Dict[str, Stage] = {}
        self._order: Optional[List[str]] = None

    def add_stage(self, stage: Stage) -> None:
        """
        Add a stage whose dependencies are already present.

        Raises:
            ValueError: On a duplicate id or an unknown dependency
        """
        if stage.stage_id in self.stages:
            raise ValueError(f"Stage {stage.stage_id} already exists")
        for dep_id in stage.dependencies:
            if dep_id not in self.stages:
                raise ValueError(f"Dependency {dep_id} not found for stage {stage.stage_id}")
        self.stages[stage.stage_id] = stage
        self.graph.add_node(stage.stage_id)
        for dep_id in stage.dependencies:
            self.graph.add_edge(dep_id, stage.stage_id)
        self._order = None

    def execution_order(self) -> List[str]:
        if self._order is None:
            if not nx.is_directed_acyclic_graph(self.graph):
                raise ValueError("Stage graph contains cycles")
            insertion = {sid: i for i, sid in enumerate(self.stages)}
            self._order = list(nx.lexicographical_topological_sort(self.graph, key=insertion.get))
        return self._order

    def execute(self) -> Dict[str, Any]:
        """
        Run every stage.

        Returns:
            Stage id -> result

        Raises:
            Whatever the failing stage raised, after its descendants are
            marked SKIPPED
        """
        results: Dict[str, Any] = {}
        for stage_id in self.execution_order():
            stage = self.stages[stage_id]
            inputs = {dep: results[dep] for dep in stage.dependencies}
            logger.info("stage %s started", stage_id)
            try:
                results[stage_id] = stage.execute(inputs)
            except Exception:
                logger.warning("stage %s failed: %s", stage_id, stage.error)
                for dependent in nx.descendants(self.graph, stage_id):
                    self.stages[dependent].status = StageStatus.SKIPPED
                raise
            logger.info("stage %s finished", stage_id)
        return results

    def status(self, stage_id: str) -> StageStatus:
        return self.stages[stage_id].status

    def failed_stage(self) -> Optional[str]:
        for stage_id in self.execution_order():
            if self.stages[stage_id].status is StageStatus.FAILED:
                return stage_id
        return None

    def summary(self) -> List[Dict[str, Any]]:
        """Per-stage status records in execution order."""
        return [
            {
                "stage": stage_id,
                "status": self.stages[stage_id].status.value,
                "dependencies": list(self.stages[stage_id].dependencies),
                "error": self.stages[stage_id].error,
            }
            for stage_id in self.execution_order()
        ]
