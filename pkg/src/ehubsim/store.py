"""Embedded relational store for traffic, station, and trip tables.

Backed by sqlite3 behind a fixed contract: three tables, batched atomic
ingestion, and a read-only SELECT surface for the question-answering
pipeline. Single writer, any number of readers.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .errors import (
    AlreadyInitialized,
    DuplicateKey,
    NoDataYet,
    NotReadOnly,
    SqlSyntaxError,
    StoreError,
    UnknownRelation,
)
from .network import AgentClass

MAX_BATCH_SIZE = 500

CLASS_COLUMNS = {
    AgentClass.PEDESTRIAN: "pedestrian_speed",
    AgentClass.BICYCLE: "bike_speed",
    AgentClass.CAR: "car_speed",
}


@dataclass(frozen=True)
class EdgeTrafficRecord:
    """One aggregation window of per-class mean speeds on one edge.

    Speeds are None for classes the edge does not allow.
    """

    edge_id: str
    simulation_time: int
    pedestrian_speed: Optional[float]
    bike_speed: Optional[float]
    car_speed: Optional[float]

    def speed_for(self, cls: AgentClass) -> Optional[float]:
        return getattr(self, CLASS_COLUMNS[cls])

    def as_tuple(self) -> tuple:
        return (self.edge_id, self.simulation_time, self.pedestrian_speed,
                self.bike_speed, self.car_speed)

    def to_json(self) -> str:
        return json.dumps({
            "edge_id": self.edge_id,
            "simulation_time": self.simulation_time,
            "pedestrian_speed": self.pedestrian_speed,
            "bike_speed": self.bike_speed,
            "car_speed": self.car_speed,
        }, separators=(",", ":"))


@dataclass(frozen=True)
class IngestBatch:
    records: tuple[EdgeTrafficRecord, ...]

    def __post_init__(self) -> None:
        if not self.records:
            raise StoreError("ingest batch must be non-empty")
        if len(self.records) > MAX_BATCH_SIZE:
            raise StoreError(
                f"ingest batch exceeds max size {MAX_BATCH_SIZE}"
            )
        keys = [(r.simulation_time, r.edge_id) for r in self.records]
        if keys != sorted(keys):
            raise StoreError(
                "ingest batch must be sorted by (simulation_time, edge_id)"
            )


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    logical_type: str  # text | integer | real
    primary_key: bool = False


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[ColumnSpec, ...]
    foreign_keys: tuple[tuple[str, str, str], ...] = ()  # (column, table, column)
    description: str = ""

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def primary_key(self) -> list[str]:
        return [c.name for c in self.columns if c.primary_key]


PLATFORM_SCHEMAS: tuple[TableSchema, ...] = (
    TableSchema(
        name="online_demo",
        description="Per-edge mean speeds for each aggregation window of the "
                    "running simulation.",
        columns=(
            ColumnSpec("edge_id", "text", primary_key=True),
            ColumnSpec("simulation_time", "integer", primary_key=True),
            ColumnSpec("pedestrian_speed", "real"),
            ColumnSpec("bike_speed", "real"),
            ColumnSpec("car_speed", "real"),
        ),
    ),
    TableSchema(
        name="stations",
        description="Docked shared vehicles: one row per vehicle currently "
                    "at a station.",
        columns=(
            ColumnSpec("station_id", "text", primary_key=True),
            ColumnSpec("edge_id", "text"),
            ColumnSpec("vehicle_id", "text", primary_key=True),
            ColumnSpec("vehicle_type", "text"),
            ColumnSpec("battery_level", "real"),
        ),
        foreign_keys=(("edge_id", "online_demo", "edge_id"),),
    ),
    TableSchema(
        name="user_paths",
        description="Committed trips: endpoints, time cost, solver execution "
                    "time, and the optimal path as '(edge,mode)' groups.",
        columns=(
            ColumnSpec("path_id", "integer", primary_key=True),
            ColumnSpec("start_edge", "text"),
            ColumnSpec("end_edge", "text"),
            ColumnSpec("time_cost_s", "real"),
            ColumnSpec("execution_time_ms", "real"),
            ColumnSpec("optimal_path_sequence", "text"),
        ),
        foreign_keys=(
            ("start_edge", "online_demo", "edge_id"),
            ("end_edge", "online_demo", "edge_id"),
        ),
    ),
)

_SQLITE_TYPES = {"text": "TEXT", "integer": "INTEGER", "real": "REAL"}


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def to_json_rows(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]


# sqlite authorizer action codes that a plain SELECT may trigger.
_ALLOWED_ACTIONS = {
    sqlite3.SQLITE_SELECT,
    sqlite3.SQLITE_READ,
    sqlite3.SQLITE_FUNCTION,
    getattr(sqlite3, "SQLITE_RECURSIVE", 33),
}


def _read_only_authorizer(action, *args):
    if action in _ALLOWED_ACTIONS:
        return sqlite3.SQLITE_OK
    return sqlite3.SQLITE_DENY


def _allow_all(action, *args):
    # set_authorizer(None) does not clear the hook on Python 3.10
    return sqlite3.SQLITE_OK


def _strip_sql(sql: str) -> str:
    """Drop leading whitespace and -- / block comments."""
    i, n = 0, len(sql)
    while i < n:
        if sql[i].isspace():
            i += 1
        elif sql.startswith("--", i):
            j = sql.find("\n", i)
            i = n if j < 0 else j + 1
        elif sql.startswith("/*", i):
            j = sql.find("*/", i + 2)
            i = n if j < 0 else j + 2
        else:
            break
    return sql[i:]


def _count_statements(sql: str) -> int:
    """Top-level statement count (semicolons outside string literals)."""
    count, in_str, buf = 0, False, False
    i, n = 0, len(sql)
    while i < n:
        ch = sql[i]
        if in_str:
            if ch == "'":
                if i + 1 < n and sql[i + 1] == "'":
                    i += 1
                else:
                    in_str = False
        elif ch == "'":
            in_str = True
        elif ch == ";":
            if buf:
                count += 1
            buf = False
        elif not ch.isspace():
            buf = True
        i += 1
    return count + (1 if buf else 0)


class Datastore:
    """Sqlite-backed store exposing the platform tables.

    All access is serialized through one connection; batch ingest commits
    are atomic, and execute_sql only runs read-only SELECTs.
    """

    def __init__(self, path: str | Path = ":memory:"):
        self._path = str(path)
        self._conn = sqlite3.connect(self._path, check_same_thread=False)
        self._lock = threading.RLock()
        self._initialized = self._detect_initialized()

    def _detect_initialized(self) -> bool:
        cur = self._conn.execute(
            "SELECT name FROM sqlite_master WHERE type='table'"
        )
        names = {row[0] for row in cur.fetchall()}
        return all(s.name in names for s in PLATFORM_SCHEMAS)

    # --- schema ------------------------------------------------------------

    def init_schema(self) -> None:
        with self._lock:
            if self._initialized:
                raise AlreadyInitialized("platform schema already present")
            for schema in PLATFORM_SCHEMAS:
                cols = ", ".join(
                    f"{c.name} {_SQLITE_TYPES[c.logical_type]}"
                    for c in schema.columns
                )
                pk = ", ".join(schema.primary_key())
                self._conn.execute(
                    f"CREATE TABLE {schema.name} ({cols}, PRIMARY KEY ({pk}))"
                )
            self._conn.commit()
            self._initialized = True

    def list_tables(self) -> list[str]:
        cur = self._conn.execute(
            "SELECT name FROM sqlite_master WHERE type='table' "
            "AND name NOT LIKE 'sqlite_%' ORDER BY name"
        )
        return [row[0] for row in cur.fetchall()]

    def table_columns(self, table: str) -> list[tuple[str, str, bool]]:
        """(name, declared type, is primary key) per column, in order."""
        if table not in self.list_tables():
            raise UnknownRelation(f"no such table: {table}")
        cur = self._conn.execute(f"PRAGMA table_info({table})")
        return [(row[1], row[2].lower(), row[5] > 0) for row in cur.fetchall()]

    def schema_for(self, table: str) -> TableSchema:
        for schema in PLATFORM_SCHEMAS:
            if schema.name == table:
                return schema
        raise UnknownRelation(f"no such table: {table}")

    def _require_schema(self) -> None:
        if not self._initialized:
            raise StoreError("schema not initialized")

    # --- ingestion -----------------------------------------------------------

    def ingest(self, batch: IngestBatch) -> int:
        """All-or-nothing insert of one traffic batch; returns rows written."""
        self._require_schema()
        rows = [r.as_tuple() for r in batch.records]
        with self._lock:
            try:
                with self._conn:
                    self._conn.executemany(
                        "INSERT INTO online_demo (edge_id, simulation_time, "
                        "pedestrian_speed, bike_speed, car_speed) "
                        "VALUES (?, ?, ?, ?, ?)", rows)
            except sqlite3.IntegrityError as exc:
                raise DuplicateKey(
                    f"batch contains an existing (edge_id, simulation_time) key: {exc}"
                ) from exc
            except sqlite3.Error as exc:
                raise StoreError(str(exc)) from exc
        return len(rows)

    def ingest_records(self, records: Sequence[EdgeTrafficRecord]) -> int:
        """Split an arbitrary sorted record list into max-size batches."""
        written = 0
        for i in range(0, len(records), MAX_BATCH_SIZE):
            written += self.ingest(IngestBatch(tuple(records[i:i + MAX_BATCH_SIZE])))
        return written

    def replace_station_rows(self, stations) -> int:
        from .stations import station_rows
        self._require_schema()
        rows = station_rows(stations)
        with self._lock, self._conn:
            self._conn.execute("DELETE FROM stations")
            self._conn.executemany(
                "INSERT INTO stations VALUES (?, ?, ?, ?, ?)", rows)
        return len(rows)

    def insert_user_path(self, start_edge: str, end_edge: str, time_cost_s: float,
                         execution_time_ms: float, sequence: str) -> int:
        self._require_schema()
        with self._lock, self._conn:
            cur = self._conn.execute(
                "INSERT INTO user_paths (start_edge, end_edge, time_cost_s, "
                "execution_time_ms, optimal_path_sequence) VALUES (?, ?, ?, ?, ?)",
                (start_edge, end_edge, time_cost_s, execution_time_ms, sequence))
            return int(cur.lastrowid)

    def seed_table_from_jsonl(self, table: str, path: str | Path) -> int:
        """Load fixture rows (one JSON object per line) into a table."""
        self._require_schema()
        schema = self.schema_for(table)
        cols = schema.column_names()
        rows = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            rows.append(tuple(rec.get(c) for c in cols))
        placeholders = ", ".join("?" for _ in cols)
        with self._lock, self._conn:
            self._conn.executemany(
                f"INSERT INTO {table} ({', '.join(cols)}) VALUES ({placeholders})",
                rows)
        return len(rows)

    # --- queries -------------------------------------------------------------

    def execute_sql(self, sql: str) -> ResultTable:
        """Run one read-only SELECT and return the result table."""
        self._require_schema()
        stripped = _strip_sql(sql)
        if not stripped:
            raise SqlSyntaxError("empty statement")
        first = stripped.split(None, 1)[0].rstrip("(;").upper()
        if first not in ("SELECT", "WITH"):
            raise NotReadOnly(f"only SELECT statements are allowed, got {first}")
        if _count_statements(stripped) != 1:
            raise NotReadOnly("multiple statements are not allowed")
        with self._lock:
            self._conn.set_authorizer(_read_only_authorizer)
            try:
                cur = self._conn.execute(sql)
                rows = cur.fetchall()
                columns = [d[0] for d in cur.description] if cur.description else []
            except sqlite3.OperationalError as exc:
                msg = str(exc)
                if "no such table" in msg:
                    raise UnknownRelation(msg) from exc
                if "not authorized" in msg or "prohibited" in msg:
                    raise NotReadOnly(msg) from exc
                raise SqlSyntaxError(msg) from exc
            except sqlite3.DatabaseError as exc:
                msg = str(exc)
                if "not authorized" in msg or "prohibited" in msg:
                    raise NotReadOnly(msg) from exc
                raise SqlSyntaxError(msg) from exc
            finally:
                self._conn.set_authorizer(_allow_all)
        return ResultTable(columns=columns, rows=[tuple(r) for r in rows])

    def snapshot_traffic(self, t: float) -> dict[str, dict[AgentClass, Optional[float]]]:
        """Speeds from the latest completed window at or before ``t``."""
        self._require_schema()
        with self._lock:
            cur = self._conn.execute(
                "SELECT MAX(simulation_time) FROM online_demo "
                "WHERE simulation_time <= ?", (int(t),))
            window = cur.fetchone()[0]
            if window is None:
                raise NoDataYet(f"no completed aggregation window at t={t}")
            cur = self._conn.execute(
                "SELECT edge_id, pedestrian_speed, bike_speed, car_speed "
                "FROM online_demo WHERE simulation_time = ?", (window,))
            out: dict[str, dict[AgentClass, Optional[float]]] = {}
            for edge_id, ped, bike, car in cur.fetchall():
                out[edge_id] = {
                    AgentClass.PEDESTRIAN: ped,
                    AgentClass.BICYCLE: bike,
                    AgentClass.CAR: car,
                }
        return out

    def checksum(self) -> str:
        """Stable digest of all table contents, for read-only guarantees."""
        import hashlib
        h = hashlib.sha256()
        with self._lock:
            for table in self.list_tables():
                cur = self._conn.execute(f"SELECT * FROM {table} ORDER BY 1, 2")
                for row in cur.fetchall():
                    h.update(repr(row).encode())
        return h.hexdigest()

    def close(self) -> None:
        with self._lock:
            self._conn.close()
